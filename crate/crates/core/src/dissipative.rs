//! Open systems: ṙ = (Ω + R) r + F and its second-order oscillator forms.
//!
//! With Γ = Ω + R the first-order equation can be differentiated two ways:
//!
//! * damped:       r̈ = Ω(Ω + R) r + R ṙ + Ω F
//! * frictionless: r̈ = Γ² r + Γ F
//!
//! The frictionless form is made homogeneous by appending ΓF as an extra column of
//! Γ² (and a zero row), with the state augmented by a last component fixed at 1.
//! The asymmetric part of that augmented matrix becomes non-reciprocal couplings.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{linear_flow, symmetry_deviation, RMatrix, RVector, C64};
use crate::liouville_map::{Generator, GeneratorSource};
use crate::ode;
use crate::oscillator_network::{
    from_origin, integrate_ode, springs_from_omega_squared, OscillatorNetwork, Trajectory,
};

/// Relaxation matrix R (symmetric) and the constant inhomogeneous term F.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationModel {
    r_matrix: RMatrix,
    f: RVector,
}

impl RelaxationModel {
    pub fn new(r_matrix: RMatrix, f: RVector) -> Result<Self> {
        if r_matrix.nrows() != r_matrix.ncols() || r_matrix.nrows() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: r_matrix.nrows(),
                found: f.len(),
            });
        }
        let deviation = symmetry_deviation(&r_matrix);
        if deviation > 1e-12 * r_matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric { deviation });
        }
        Ok(RelaxationModel { r_matrix, f })
    }

    pub fn r_matrix(&self) -> &RMatrix {
        &self.r_matrix
    }

    pub fn f(&self) -> &RVector {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }
}

fn check_dims(omega: &Generator, relax: &RelaxationModel) -> Result<()> {
    if omega.dim() != relax.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: relax.dim(),
        });
    }
    Ok(())
}

/// Γ = Ω + R.
pub fn build_gamma(omega: &Generator, relax: &RelaxationModel) -> Result<RMatrix> {
    check_dims(omega, relax)?;
    Ok(omega.matrix() + relax.r_matrix())
}

/// Coefficients of r̈ = stiffness·r + friction·ṙ + drive.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedForm {
    pub stiffness: RMatrix,
    pub friction: RMatrix,
    pub drive: RVector,
}

pub fn damped_oscillator_form(
    gamma: &RMatrix,
    omega: &Generator,
    relax: &RelaxationModel,
) -> Result<DampedForm> {
    check_dims(omega, relax)?;
    if gamma.nrows() != omega.dim() || gamma.ncols() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: gamma.nrows(),
        });
    }
    Ok(DampedForm {
        stiffness: omega.matrix() * gamma,
        friction: relax.r_matrix().clone(),
        drive: omega.matrix() * relax.f(),
    })
}

/// (Γ², ΓF).
pub fn frictionless_form(gamma: &RMatrix, f: &RVector) -> Result<(RMatrix, RVector)> {
    if gamma.nrows() != gamma.ncols() || gamma.nrows() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: gamma.nrows(),
            found: f.len(),
        });
    }
    Ok((gamma * gamma, gamma * f))
}

/// Γ̃ = [[Γ², ΓF], [0, 0]] and its symmetric/antisymmetric split.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub gamma_tilde: RMatrix,
    pub sym: RMatrix,
    pub antisym: RMatrix,
}

impl AugmentedSystem {
    pub fn dim(&self) -> usize {
        self.gamma_tilde.nrows()
    }
}

pub fn augment(gsq: &RMatrix, drive: &RVector) -> Result<AugmentedSystem> {
    let n = gsq.nrows();
    if gsq.ncols() != n || drive.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: drive.len(),
        });
    }
    let mut gamma_tilde = RMatrix::zeros(n + 1, n + 1);
    gamma_tilde.view_mut((0, 0), (n, n)).copy_from(gsq);
    gamma_tilde.view_mut((0, n), (n, 1)).copy_from(drive);
    let transpose = gamma_tilde.transpose();
    let sym = (&gamma_tilde + &transpose) * 0.5;
    let antisym = (&gamma_tilde - &transpose) * 0.5;
    Ok(AugmentedSystem {
        gamma_tilde,
        sym,
        antisym,
    })
}

/// Bloch precession about z at Larmor frequency ω3 with longitudinal and transverse relaxation.
///
/// Ω has Ω₂₁ = ω3 = −Ω₁₂, R = diag(−1/T2, −1/T2, −1/T1), F = (0, 0, M0/T1).
pub fn bloch_model(omega3: f64, t1: f64, t2: f64, m0: f64) -> Result<(Generator, RelaxationModel)> {
    if !(t1 > 0.0) {
        return Err(Error::NonPositiveTimeConstant {
            name: "T1",
            value: t1,
        });
    }
    if !(t2 > 0.0) {
        return Err(Error::NonPositiveTimeConstant {
            name: "T2",
            value: t2,
        });
    }
    let mut omega = RMatrix::zeros(3, 3);
    omega[(1, 0)] = omega3;
    omega[(0, 1)] = -omega3;
    let r = RMatrix::from_diagonal(&RVector::from_vec(vec![-1.0 / t2, -1.0 / t2, -1.0 / t1]));
    let f = RVector::from_vec(vec![0.0, 0.0, m0 / t1]);
    Ok((
        Generator::new(omega, GeneratorSource::Liouville)?,
        RelaxationModel::new(r, f)?,
    ))
}

/// Complex normal-mode frequencies sqrt(−λ) of Γ̃, principal branch with nonnegative real part.
///
/// Sorted by real part, then imaginary part.
pub fn augmented_mode_analysis(a: &AugmentedSystem) -> Vec<C64> {
    mode_frequencies(&a.gamma_tilde)
}

pub fn mode_frequencies(m: &RMatrix) -> Vec<C64> {
    let mut freqs: Vec<C64> = m
        .complex_eigenvalues()
        .iter()
        .map(|l: &Complex<f64>| {
            let w = (-l).sqrt();
            if w.re < 0.0 {
                -w
            } else {
                w
            }
        })
        .collect();
    freqs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    freqs
}

/// v0 = Γ r0 + F, the first-order equation at t = 0.
pub fn initial_velocity(gamma: &RMatrix, f: &RVector, r0: &RVector) -> RVector {
    gamma * r0 + f
}

/// Oscillator network for the augmented frictionless form: springs from Γ̃_S,
/// non-reciprocal couplings from Γ̃_A, state (r0, 1) with velocity (Γr0 + F, 0).
pub fn augmented_network(
    a: &AugmentedSystem,
    r0: &RVector,
    v0: &RVector,
    mass: f64,
) -> Result<OscillatorNetwork> {
    let n = a.dim() - 1;
    if r0.len() != n || v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r0.len(),
        });
    }
    let mut x = RVector::zeros(n + 1);
    x.rows_mut(0, n).copy_from(r0);
    x[n] = 1.0;
    let mut v = RVector::zeros(n + 1);
    v.rows_mut(0, n).copy_from(v0);
    springs_from_omega_squared(&a.sym, mass)?
        .with_gamma(&a.antisym * mass)?
        .with_initial(x, v)
}

/// The three equivalent open-system descriptions, ready to propagate.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    pub omega: Generator,
    pub relax: RelaxationModel,
    pub gamma: RMatrix,
}

impl OpenSystem {
    pub fn new(omega: Generator, relax: RelaxationModel) -> Result<Self> {
        let gamma = build_gamma(&omega, &relax)?;
        Ok(OpenSystem {
            omega,
            relax,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn augmented(&self) -> Result<AugmentedSystem> {
        let (gsq, drive) = frictionless_form(&self.gamma, self.relax.f())?;
        augment(&gsq, &drive)
    }

    /// Exact solution of ṙ = Γr + F via the exponential of [[Γ, F], [0, 0]].
    pub fn exact(&self, r0: &RVector, times: &[f64]) -> Result<Trajectory> {
        let n = self.dim();
        self.check_r0(r0)?;
        let mut a = RMatrix::zeros(n + 1, n + 1);
        a.view_mut((0, 0), (n, n)).copy_from(&self.gamma);
        a.view_mut((0, n), (n, 1)).copy_from(self.relax.f());
        let mut y0 = RVector::zeros(n + 1);
        y0.rows_mut(0, n).copy_from(r0);
        y0[n] = 1.0;
        let (grid, skip) = from_origin(times)?;
        ode::check_times(&grid)?;
        let positions = linear_flow(&a, &y0, &grid)
            .into_iter()
            .skip(skip)
            .map(|y| y.rows(0, n).into_owned())
            .collect();
        Trajectory::new(times.to_vec(), positions, None)
    }

    /// RK4 on the first-order equation.
    pub fn first_order(&self, r0: &RVector, times: &[f64], step: f64) -> Result<Trajectory> {
        self.check_r0(r0)?;
        let (grid, skip) = from_origin(times)?;
        let f = self.relax.f();
        let states = ode::rk4(|r| &self.gamma * r + f, r0, &grid, step)?;
        Trajectory::new(
            times.to_vec(),
            states.into_iter().skip(skip).collect(),
            None,
        )
    }

    /// RK4 on r̈ = Ω(Ω + R) r + R ṙ + ΩF.
    pub fn damped(&self, r0: &RVector, times: &[f64], step: f64) -> Result<Trajectory> {
        self.check_r0(r0)?;
        let form = damped_oscillator_form(&self.gamma, &self.omega, &self.relax)?;
        let v0 = initial_velocity(&self.gamma, self.relax.f(), r0);
        let (grid, skip) = from_origin(times)?;
        let (xs, vs) = ode::second_order(
            &form.stiffness,
            Some(&form.friction),
            Some(&form.drive),
            r0,
            &v0,
            &grid,
            step,
        )?;
        Trajectory::new(
            times.to_vec(),
            xs.into_iter().skip(skip).collect(),
            Some(vs.into_iter().skip(skip).collect()),
        )
    }

    /// RK4 on the augmented frictionless network, reported without the static coordinate.
    pub fn frictionless(&self, r0: &RVector, times: &[f64], step: f64) -> Result<Trajectory> {
        let net = self.network(r0, 1.0)?;
        let traj = integrate_ode(&net, times, step)?;
        let keep: Vec<usize> = (0..self.dim()).collect();
        Ok(traj.select(&keep))
    }

    pub fn network(&self, r0: &RVector, mass: f64) -> Result<OscillatorNetwork> {
        self.check_r0(r0)?;
        let v0 = initial_velocity(&self.gamma, self.relax.f(), r0);
        augmented_network(&self.augmented()?, r0, &v0, mass)
    }

    fn check_r0(&self, r0: &RVector) -> Result<()> {
        if r0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: r0.len(),
            });
        }
        Ok(())
    }
}
