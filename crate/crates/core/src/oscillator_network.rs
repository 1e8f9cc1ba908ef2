//! Classical mass-spring networks compiled from generators, and their propagation.
//!
//! Equal masses m sit at equilibrium positions r_i = 0. Mutual springs k_ij = k_ji
//! couple masses i and j, the self-coupling k_ii ties mass i to the frame (negative
//! for an inverted pendulum), and γ_ij = −γ_ji are non-reciprocal couplings used by
//! dissipative systems. The acceleration of mass i is
//!
//! ```text
//! m ẍ_i = Σ_{j≠i} (k_ij + γ_ij) x_j − (k_ii + Σ_{l≠i} |k_il|) x_i + f_i
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{antisymmetry_deviation, symmetric_eigh, symmetry_deviation, RMatrix, RVector};
use crate::liouville_map::Generator;
use crate::ode;

const COUPLING_TOL: f64 = 1e-12;
const ZERO_MODE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorNetwork {
    pub mass: f64,
    pub k: RMatrix,
    pub gamma: RMatrix,
    pub force: RVector,
    pub x0: RVector,
    pub v0: RVector,
}

impl OscillatorNetwork {
    pub fn new(
        mass: f64,
        k: RMatrix,
        gamma: RMatrix,
        force: RVector,
        x0: RVector,
        v0: RVector,
    ) -> Result<Self> {
        let net = OscillatorNetwork {
            mass,
            k,
            gamma,
            force,
            x0,
            v0,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        let n = self.k.nrows();
        for (found, what) in [
            (self.k.ncols(), "k columns"),
            (self.gamma.nrows(), "gamma rows"),
            (self.gamma.ncols(), "gamma columns"),
            (self.force.len(), "force"),
            (self.x0.len(), "x0"),
            (self.v0.len(), "v0"),
        ] {
            if found != n {
                return Err(Error::BadDimension(format!(
                    "{what} has length {found}, expected {n}"
                )));
            }
        }
        let scale = self.k.amax().max(1.0);
        let deviation = symmetry_deviation(&self.k);
        if deviation > COUPLING_TOL * scale {
            return Err(Error::NotSymmetric { deviation });
        }
        let deviation = antisymmetry_deviation(&self.gamma);
        if deviation > COUPLING_TOL * self.gamma.amax().max(1.0) {
            return Err(Error::NotAntisymmetric { deviation });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.k.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.k.nrows() == 0
    }

    pub fn with_initial(mut self, x0: RVector, v0: RVector) -> Result<Self> {
        self.x0 = x0;
        self.v0 = v0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: RMatrix) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    /// Full acceleration matrix: symmetric springs plus non-reciprocal couplings.
    pub fn acceleration_matrix(&self) -> RMatrix {
        generator_from_springs(self) + &self.gamma / self.mass
    }

    pub fn is_closed(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0) && self.force.iter().all(|&f| f == 0.0)
    }
}

/// Spring constants with Ω_Cl = Ω²: k_ij/m = (Ω²)_ij off the diagonal and
/// k_ii/m = −((Ω²)_ii + Σ_{l≠i} |(Ω²)_il|).
pub fn springs_from_omega_squared(osq: &RMatrix, mass: f64) -> Result<OscillatorNetwork> {
    if osq.nrows() != osq.ncols() {
        return Err(Error::BadDimension(format!(
            "coupling matrix must be square, got {}x{}",
            osq.nrows(),
            osq.ncols()
        )));
    }
    let deviation = symmetry_deviation(osq);
    if deviation > COUPLING_TOL * osq.amax().max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    let n = osq.nrows();
    let mut k = RMatrix::zeros(n, n);
    for i in 0..n {
        let mut mutual = 0.0;
        for j in 0..n {
            if i != j {
                k[(i, j)] = mass * osq[(i, j)];
                mutual += osq[(i, j)].abs();
            }
        }
        k[(i, i)] = -mass * (osq[(i, i)] + mutual);
    }
    OscillatorNetwork::new(
        mass,
        k,
        RMatrix::zeros(n, n),
        RVector::zeros(n),
        RVector::zeros(n),
        RVector::zeros(n),
    )
}

/// Ω_Cl from the symmetric springs: k_ij/m off the diagonal, −(k_ii + Σ_{l≠i}|k_il|)/m on it.
pub fn generator_from_springs(net: &OscillatorNetwork) -> RMatrix {
    let n = net.len();
    let k = &net.k;
    RMatrix::from_fn(n, n, |i, j| {
        if i != j {
            k[(i, j)] / net.mass
        } else {
            let mutual: f64 = (0..n).filter(|&l| l != i).map(|l| k[(i, l)].abs()).sum();
            -(k[(i, i)] + mutual) / net.mass
        }
    })
}

/// Normal modes of a symmetric coupling matrix with nonpositive spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    /// ω_a ≥ 0, in the eigensolver's order.
    pub frequencies: RVector,
    /// Orthonormal eigenvectors, one per column.
    pub modes: RMatrix,
}

impl NormalModes {
    /// Position and velocity at time t for initial (x0, v0).
    pub fn evolve(&self, x0: &RVector, v0: &RVector, t: f64) -> (RVector, RVector) {
        let a0 = self.modes.tr_mul(x0);
        let b0 = self.modes.tr_mul(v0);
        let mut pos = RVector::zeros(a0.len());
        let mut vel = RVector::zeros(a0.len());
        for (a, &w) in self.frequencies.iter().enumerate() {
            let (s, c) = (w * t).sin_cos();
            let sinc = if w == 0.0 { t } else { s / w };
            pos[a] = a0[a] * c + b0[a] * sinc;
            vel[a] = -a0[a] * w * s + b0[a] * c;
        }
        (&self.modes * pos, &self.modes * vel)
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().fold(0.0_f64, |m, &w| m.max(w))
    }
}

pub fn normal_modes(osq: &RMatrix) -> Result<NormalModes> {
    let deviation = symmetry_deviation(osq);
    if deviation > COUPLING_TOL * osq.amax().max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    let (values, modes) = symmetric_eigh(osq);
    let scale = values.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let tol = ZERO_MODE_TOL * scale;
    let mut frequencies = RVector::zeros(values.len());
    for (a, &l) in values.iter().enumerate() {
        if l > tol {
            return Err(Error::PositiveEigenvalue { eigenvalue: l, tol });
        }
        frequencies[a] = if l.abs() <= tol { 0.0 } else { (-l).sqrt() };
    }
    Ok(NormalModes { frequencies, modes })
}

/// Sampled positions (and optionally velocities) of n coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<RVector>,
    pub velocities: Option<Vec<RVector>>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        positions: Vec<RVector>,
        velocities: Option<Vec<RVector>>,
    ) -> Result<Self> {
        if positions.len() != times.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: positions.len(),
            });
        }
        if let Some(v) = &velocities {
            if v.len() != times.len() {
                return Err(Error::DimensionMismatch {
                    expected: times.len(),
                    found: v.len(),
                });
            }
        }
        ode::check_times(&times)?;
        Ok(Trajectory {
            times,
            positions,
            velocities,
        })
    }

    pub fn width(&self) -> usize {
        self.positions.first().map_or(0, |p| p.len())
    }

    /// Max over samples of the ∞-norm of the position difference.
    pub fn max_position_error(&self, other: &Trajectory) -> f64 {
        self.position_errors(other).into_iter().fold(0.0, f64::max)
    }

    pub fn position_errors(&self, other: &Trajectory) -> Vec<f64> {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| crate::linalg::max_abs_diff(a, b))
            .collect()
    }

    /// Keeps only the listed coordinates.
    pub fn select(&self, indices: &[usize]) -> Trajectory {
        let pick =
            |v: &RVector| RVector::from_iterator(indices.len(), indices.iter().map(|&i| v[i]));
        Trajectory {
            times: self.times.clone(),
            positions: self.positions.iter().map(pick).collect(),
            velocities: self
                .velocities
                .as_ref()
                .map(|vs| vs.iter().map(pick).collect()),
        }
    }

    /// CSV with header `t,r_1,...,r_n[,v_1,...,v_n]`.
    pub fn to_csv(&self, include_velocities: bool) -> String {
        let n = self.width();
        let with_v = include_velocities && self.velocities.is_some();
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",r_{i}");
        }
        if with_v {
            for i in 1..=n {
                let _ = write!(out, ",v_{i}");
            }
        }
        out.push('\n');
        for (row, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:e}");
            for x in self.positions[row].iter() {
                let _ = write!(out, ",{x:e}");
            }
            if with_v {
                let vs = self.velocities.as_ref().expect("checked above");
                for v in vs[row].iter() {
                    let _ = write!(out, ",{v:e}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Analytic normal-mode propagation of ṙ = Ω r from r(0) = `r0`; the initial velocity is Ω r(0).
pub fn propagate_modes(omega: &Generator, r0: &RVector, times: &[f64]) -> Result<Trajectory> {
    omega.check_antisymmetric()?;
    if r0.len() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: r0.len(),
        });
    }
    let modes = normal_modes(&omega.squared())?;
    let v0 = omega.matrix() * r0;
    let (positions, velocities) = times.iter().map(|&t| modes.evolve(r0, &v0, t)).unzip();
    Trajectory::new(times.to_vec(), positions, Some(velocities))
}

/// Shortest oscillation or decay time scale of ẍ = M x, from |λ(M)|.
pub fn shortest_period(m: &RMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let rate = m
        .complex_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.norm().sqrt()));
    if rate == 0.0 {
        f64::INFINITY
    } else {
        2.0 * std::f64::consts::PI / rate
    }
}

/// Fixed-step RK4 integration of m ẍ = (springs + γ) x + f from (x0, v0).
///
/// (x0, v0) is the state at t = 0. Fails with `StepTooLarge` when `step` exceeds a
/// twentieth of the shortest period.
pub fn integrate_ode(net: &OscillatorNetwork, times: &[f64], step: f64) -> Result<Trajectory> {
    net.validate()?;
    let m = net.acceleration_matrix();
    let limit = shortest_period(&m) / 20.0;
    if step > limit {
        return Err(Error::StepTooLarge { step, limit });
    }
    let drive = net
        .force
        .iter()
        .any(|&f| f != 0.0)
        .then(|| &net.force / net.mass);
    let (grid, skip) = from_origin(times)?;
    let (positions, velocities) =
        ode::second_order(&m, None, drive.as_ref(), &net.x0, &net.v0, &grid, step)?;
    Trajectory::new(
        times.to_vec(),
        positions.into_iter().skip(skip).collect(),
        Some(velocities.into_iter().skip(skip).collect()),
    )
}

/// Sample grid starting at t = 0, and how many leading samples to drop afterwards.
pub(crate) fn from_origin(times: &[f64]) -> Result<(Vec<f64>, usize)> {
    match times.first() {
        Some(&t) if t < 0.0 => Err(Error::InvalidArgument(format!(
            "integration starts at t = 0; got sample time {t}"
        ))),
        Some(&t) if t > 0.0 => {
            let mut grid = Vec::with_capacity(times.len() + 1);
            grid.push(0.0);
            grid.extend_from_slice(times);
            Ok((grid, 1))
        }
        _ => Ok((times.to_vec(), 0)),
    }
}

/// Exact solution of m ẍ = (springs + γ) x + f from (x0, v0) at t = 0, through the
/// exponential of the first-order system on (x, ẋ, 1).
pub fn propagate_network_exact(net: &OscillatorNetwork, times: &[f64]) -> Result<Trajectory> {
    net.validate()?;
    let n = net.len();
    let m = net.acceleration_matrix();
    let mut a = RMatrix::zeros(2 * n + 1, 2 * n + 1);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        a[(n + i, 2 * n)] = net.force[i] / net.mass;
    }
    a.view_mut((n, 0), (n, n)).copy_from(&m);
    let mut y0 = RVector::zeros(2 * n + 1);
    y0.rows_mut(0, n).copy_from(&net.x0);
    y0.rows_mut(n, n).copy_from(&net.v0);
    y0[2 * n] = 1.0;
    let (grid, skip) = from_origin(times)?;
    ode::check_times(&grid)?;
    let states: Vec<RVector> = crate::linalg::linear_flow(&a, &y0, &grid)
        .into_iter()
        .skip(skip)
        .collect();
    Trajectory::new(
        times.to_vec(),
        states.iter().map(|y| y.rows(0, n).into_owned()).collect(),
        Some(states.iter().map(|y| y.rows(n, n).into_owned()).collect()),
    )
}

/// Piecewise-constant generators. Positions carry across each boundary and the
/// velocities are re-initialized to Ω_next r, as the first-order equation demands.
pub fn piecewise_propagate(
    segments: &[(Generator, f64)],
    r0: &RVector,
    samples_per_segment: usize,
) -> Result<Trajectory> {
    if segments.is_empty() {
        return Err(Error::InvalidArgument("no segments".into()));
    }
    let samples = samples_per_segment.max(1);
    let mut times = vec![0.0];
    let mut positions = vec![r0.clone()];
    let mut velocities = Vec::new();
    let mut r = r0.clone();
    let mut t_start = 0.0;
    for (omega, duration) in segments {
        if !(*duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "segment duration must be positive, got {duration}"
            )));
        }
        if omega.dim() != r.len() {
            return Err(Error::DimensionMismatch {
                expected: r.len(),
                found: omega.dim(),
            });
        }
        omega.check_antisymmetric()?;
        let modes = normal_modes(&omega.squared())?;
        let v = omega.matrix() * &r;
        // the boundary sample reports the re-initialized velocity
        velocities.push(v.clone());
        let mut last = (r.clone(), v.clone());
        for s in 1..=samples {
            let dt = duration * s as f64 / samples as f64;
            last = modes.evolve(&r, &v, dt);
            times.push(t_start + dt);
            positions.push(last.0.clone());
            if s < samples {
                velocities.push(last.1.clone());
            }
        }
        r = last.0;
        t_start += duration;
    }
    let (final_omega, _) = segments.last().expect("nonempty");
    velocities.push(final_omega.matrix() * &r);
    Trajectory::new(times, positions, Some(velocities))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville_map::GeneratorSource;

    fn cross(w: [f64; 3]) -> RMatrix {
        RMatrix::from_row_slice(
            3,
            3,
            &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0],
        ) * 2.0
    }

    #[test]
    fn two_level_spring_constants() {
        let w = [0.4, 0.9, 1.3];
        let omega = cross(w);
        let net = springs_from_omega_squared(&(&omega * &omega), 1.0).unwrap();
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            assert!((net.k[(i, j)] / 4.0 - w[i] * w[j]).abs() < 1e-14);
            let diag = w[j] * (w[j] - w[i]) + w[k] * (w[k] - w[i]);
            assert!((net.k[(i, i)] / 4.0 - diag).abs() < 1e-14);
        }
        assert!(net.k[(2, 2)] < 0.0);
    }

    #[test]
    fn dimer_springs_are_uncoupled() {
        let v = 0.7;
        let omega = cross([v, 0.0, 0.0]);
        let mass = 2.5;
        let net = springs_from_omega_squared(&(&omega * &omega), mass).unwrap();
        let mut expected = RMatrix::zeros(3, 3);
        expected[(1, 1)] = 4.0 * v * v * mass;
        expected[(2, 2)] = 4.0 * v * v * mass;
        assert!((&net.k - expected).amax() < 1e-14);
    }

    #[test]
    fn zero_coupling() {
        let net = springs_from_omega_squared(&RMatrix::zeros(3, 3), 1.0).unwrap();
        assert_eq!(net.k, RMatrix::zeros(3, 3));
        assert_eq!(generator_from_springs(&net), RMatrix::zeros(3, 3));
    }

    #[test]
    fn lone_oscillator() {
        let w = 1.7;
        let mass = 3.0;
        let mk = |k: f64| {
            OscillatorNetwork::new(
                mass,
                RMatrix::from_element(1, 1, k),
                RMatrix::zeros(1, 1),
                RVector::zeros(1),
                RVector::zeros(1),
                RVector::zeros(1),
            )
            .unwrap()
        };
        let normal = generator_from_springs(&mk(mass * w * w));
        assert!((normal[(0, 0)] + w * w).abs() < 1e-14);
        let inverted = generator_from_springs(&mk(-mass * w * w));
        assert!((inverted[(0, 0)] - w * w).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let osq = RMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.4, -1.0]);
        assert!(matches!(
            springs_from_omega_squared(&osq, 1.0),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn modes_of_zero_and_positive_matrices() {
        let m = normal_modes(&RMatrix::zeros(3, 3)).unwrap();
        assert_eq!(m.frequencies, RVector::zeros(3));
        let bad = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            normal_modes(&bad),
            Err(Error::PositiveEigenvalue { .. })
        ));
    }

    #[test]
    fn dimer_mode_solution() {
        let v = 0.45;
        let g = Generator::new(cross([v, 0.0, 0.0]), GeneratorSource::Liouville).unwrap();
        let r0 = RVector::from_vec(vec![0.0, 0.0, 0.5]);
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.37).collect();
        let traj = propagate_modes(&g, &r0, &times).unwrap();
        assert_eq!(traj.positions[0], r0);
        for (t, r) in times.iter().zip(&traj.positions) {
            let (s, c) = (2.0 * v * t).sin_cos();
            let expected = RVector::from_vec(vec![0.0, -0.5 * s, 0.5 * c]);
            assert!((r - expected).amax() < 1e-13);
        }
    }

    #[test]
    fn zero_network_drifts() {
        let net = OscillatorNetwork::new(
            1.0,
            RMatrix::zeros(2, 2),
            RMatrix::zeros(2, 2),
            RVector::zeros(2),
            RVector::from_vec(vec![1.0, -2.0]),
            RVector::from_vec(vec![0.5, 0.25]),
        )
        .unwrap();
        let times = [0.0, 1.0, 4.0];
        let traj = integrate_ode(&net, &times, 0.1).unwrap();
        for (t, x) in times.iter().zip(&traj.positions) {
            assert!((x[0] - (1.0 + 0.5 * t)).abs() < 1e-13);
            assert!((x[1] - (-2.0 + 0.25 * t)).abs() < 1e-13);
        }
    }

    #[test]
    fn step_guard() {
        let net = springs_from_omega_squared(&RMatrix::from_element(1, 1, -1.0), 1.0)
            .unwrap()
            .with_initial(RVector::from_element(1, 1.0), RVector::zeros(1))
            .unwrap();
        let period = 2.0 * std::f64::consts::PI;
        assert!(matches!(
            integrate_ode(&net, &[0.0, 1.0], period / 10.0),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(integrate_ode(&net, &[0.0, 1.0], period / 25.0).is_ok());
    }

    #[test]
    fn single_segment_matches_modes() {
        let g = Generator::new(cross([0.3, -0.2, 0.5]), GeneratorSource::Liouville).unwrap();
        let r0 = RVector::from_vec(vec![0.1, 0.2, 0.3]);
        let pw = piecewise_propagate(&[(g.clone(), 2.0)], &r0, 4).unwrap();
        let direct = propagate_modes(&g, &r0, &pw.times).unwrap();
        assert!(pw.max_position_error(&direct) < 1e-15);
        let pv = pw.velocities.as_ref().unwrap();
        let dv = direct.velocities.as_ref().unwrap();
        for (a, b) in pv.iter().zip(dv) {
            assert!((a - b).amax() < 1e-14);
        }
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory::new(
            vec![0.0, 0.5],
            vec![RVector::from_vec(vec![1.0, 2.0]); 2],
            Some(vec![RVector::from_vec(vec![0.0, -1.0]); 2]),
        )
        .unwrap();
        let csv = traj.to_csv(true);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,r_1,r_2,v_1,v_2"));
        assert_eq!(lines.next(), Some("0e0,1e0,2e0,0e0,-1e0"));
        assert_eq!(traj.to_csv(false).lines().next(), Some("t,r_1,r_2"));
    }
}
