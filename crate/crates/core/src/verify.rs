//! Exact quantum reference propagation and the classical-vs-quantum equivalence checks.

use serde::Serialize;

use crate::dissipative::OpenSystem;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{hermitian_eigh, hermiticity_deviation, CMatrix, CVector, RVector, C64};
use crate::liouville_map::{build_liouville_generator, Generator};
use crate::operator_basis::{expand, OperatorBasis};
use crate::oscillator_network::{propagate_modes, Trajectory};
use crate::schrodinger_map::{realify_generator, realify_state};

/// e^{−iHt} through the eigendecomposition H = V Λ V†.
#[derive(Debug, Clone)]
pub struct QuantumPropagator {
    energies: RVector,
    vectors: CMatrix,
}

impl QuantumPropagator {
    pub fn new(h: &Hamiltonian) -> Self {
        let (energies, vectors) = hermitian_eigh(h.matrix());
        QuantumPropagator { energies, vectors }
    }

    pub fn unitary(&self, t: f64) -> CMatrix {
        let n = self.energies.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let phase = C64::new(0.0, -self.energies[j] * t).exp();
            for i in 0..n {
                scaled[(i, j)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn state(&self, c0: &CVector, t: f64) -> CVector {
        let coeffs = self.vectors.adjoint() * c0;
        let evolved = CVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.energies.iter())
                .map(|(c, &e)| c * C64::new(0.0, -e * t).exp()),
        );
        &self.vectors * evolved
    }

    pub fn density(&self, rho0: &CMatrix, t: f64) -> CMatrix {
        let u = self.unitary(t);
        &u * rho0 * u.adjoint()
    }
}

/// c(t) = e^{−iHt} c0. A non-normalized c0 is propagated as given, with a warning.
pub fn evolve_state(h: &Hamiltonian, c0: &CVector, t: f64) -> Result<CVector> {
    if c0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: c0.len(),
        });
    }
    if (c0.norm() - 1.0).abs() > 1e-10 {
        log::warn!(
            "initial state has norm {}, propagating unnormalized",
            c0.norm()
        );
    }
    Ok(QuantumPropagator::new(h).state(c0, t))
}

/// Checks Hermiticity, unit trace and positivity to 1e-10.
pub fn check_density(rho: &CMatrix) -> Result<()> {
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::BadDensityMatrix(format!(
            "not square: {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let herm = hermiticity_deviation(rho);
    if herm > 1e-10 {
        return Err(Error::BadDensityMatrix(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let trace = rho.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::BadDensityMatrix(format!("trace is {trace}")));
    }
    let (vals, _) = hermitian_eigh(rho);
    if let Some(min) = vals.iter().copied().reduce(f64::min) {
        if min < -1e-10 {
            return Err(Error::BadDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
    }
    Ok(())
}

/// ρ(t) = e^{−iHt} ρ0 e^{iHt}.
pub fn evolve_density(h: &Hamiltonian, rho0: &CMatrix, t: f64) -> Result<CMatrix> {
    check_density(rho0)?;
    if rho0.nrows() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho0.nrows(),
        });
    }
    Ok(QuantumPropagator::new(h).density(rho0, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    LiouvilleMap,
    SchrodingerMap,
    Dissipative,
}

/// Outcome of comparing a classical trajectory against its reference.
///
/// Errors are the ∞-norm of the position difference at each sample time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub comparison: Comparison,
    pub tolerance: f64,
    pub max_abs_error: f64,
    /// Max over samples of the error divided by the reference ∞-norm.
    pub max_rel_error: f64,
    pub per_time_errors: Vec<f64>,
    pub passed: bool,
}

impl EquivalenceReport {
    pub fn compare(
        comparison: Comparison,
        reference: &[RVector],
        candidates: &[&Trajectory],
        tolerance: f64,
    ) -> Self {
        let mut per_time_errors = vec![0.0_f64; reference.len()];
        let mut max_rel_error = 0.0_f64;
        for traj in candidates {
            for (k, (r, c)) in reference.iter().zip(&traj.positions).enumerate() {
                let err = crate::linalg::max_abs_diff(r, c);
                per_time_errors[k] = per_time_errors[k].max(err);
                let scale = r.amax();
                if scale > 0.0 {
                    max_rel_error = max_rel_error.max(err / scale);
                } else if err > 0.0 {
                    max_rel_error = f64::INFINITY;
                }
            }
        }
        let max_abs_error = per_time_errors.iter().copied().fold(0.0, f64::max);
        EquivalenceReport {
            comparison,
            tolerance,
            max_abs_error,
            max_rel_error,
            per_time_errors,
            passed: max_abs_error <= tolerance,
        }
    }
}

/// Classical positions from normal modes against expand(ρ(t)).
pub fn verify_liouville_map(
    h: &Hamiltonian,
    basis: &OperatorBasis,
    rho0: &CMatrix,
    times: &[f64],
    tol: f64,
) -> Result<EquivalenceReport> {
    let omega = build_liouville_generator(h, basis)?;
    verify_liouville_generator(h, basis, &omega, rho0, times, tol)
}

/// Same as [`verify_liouville_map`] but with a caller-supplied generator.
pub fn verify_liouville_generator(
    h: &Hamiltonian,
    basis: &OperatorBasis,
    omega: &Generator,
    rho0: &CMatrix,
    times: &[f64],
    tol: f64,
) -> Result<EquivalenceReport> {
    check_density(rho0)?;
    let r0 = expand(rho0, basis)?;
    let classical = propagate_modes(omega, &r0.values, times)?;
    let q = QuantumPropagator::new(h);
    let reference = times
        .iter()
        .map(|&t| expand(&q.density(rho0, t), basis).map(|r| r.values))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceReport::compare(
        Comparison::LiouvilleMap,
        &reference,
        &[&classical],
        tol,
    ))
}

/// Classical (q, p) positions against realify(e^{−iHt} c0).
pub fn verify_schrodinger_map(
    h: &Hamiltonian,
    c0: &CVector,
    times: &[f64],
    tol: f64,
) -> Result<EquivalenceReport> {
    if c0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: c0.len(),
        });
    }
    let omega = realify_generator(h);
    let classical = propagate_modes(&omega, &realify_state(c0).to_vector(), times)?;
    let q = QuantumPropagator::new(h);
    let reference: Vec<RVector> = times
        .iter()
        .map(|&t| realify_state(&q.state(c0, t)).to_vector())
        .collect();
    Ok(EquivalenceReport::compare(
        Comparison::SchrodingerMap,
        &reference,
        &[&classical],
        tol,
    ))
}

/// Exact first-order solution against the damped and augmented frictionless
/// second-order forms, both integrated with RK4 at `step`.
pub fn verify_dissipative(
    system: &OpenSystem,
    r0: &RVector,
    times: &[f64],
    tol: f64,
    step: f64,
) -> Result<EquivalenceReport> {
    let reference = system.exact(r0, times)?;
    let damped = system.damped(r0, times, step)?;
    let frictionless = system.frictionless(r0, times, step)?;
    Ok(EquivalenceReport::compare(
        Comparison::Dissipative,
        &reference.positions,
        &[&damped, &frictionless],
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{two_level, TwoLevelParams};
    use crate::liouville_map::GeneratorSource;
    use crate::operator_basis::pauli_basis;

    fn ground(n: usize) -> CMatrix {
        let mut rho = CMatrix::zeros(n, n);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        rho
    }

    #[test]
    fn cayley_klein_form() {
        let p = TwoLevelParams::new(0.8, -0.1, C64::new(0.35, 0.6));
        let [w0, w1, w2, w3] = p.pauli_weights();
        let w = (w1 * w1 + w2 * w2 + w3 * w3).sqrt();
        let (n1, n2, n3) = (w1 / w, w2 / w, w3 / w);
        let q = QuantumPropagator::new(&two_level(p));
        for &t in &[0.0, 0.4, 2.2, 17.5] {
            let (s, c) = (w * t).sin_cos();
            let a = C64::new(c, -n3 * s);
            let b = -C64::new(n2, n1) * s;
            let global = C64::new(0.0, -w0 * t).exp();
            let expected = CMatrix::from_row_slice(2, 2, &[a, b, -b.conj(), a.conj()]) * global;
            assert!((q.unitary(t) - expected).camax() < 1e-13);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h = two_level(TwoLevelParams::new(1.0, 2.0, C64::new(0.3, 0.1)));
        let c0 = CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert!((evolve_state(&h, &c0, 0.0).unwrap() - &c0).camax() < 1e-15);
    }

    #[test]
    fn maximally_mixed_state_is_stationary() {
        let h = two_level(TwoLevelParams::new(1.0, 2.0, C64::new(0.3, 0.1)));
        let rho = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        let rt = evolve_density(&h, &rho, 3.7).unwrap();
        assert!((rt - rho).camax() < 1e-15);
    }

    #[test]
    fn bad_density_matrices() {
        let h = two_level(TwoLevelParams::new(1.0, 2.0, C64::new(0.3, 0.1)));
        let not_unit = CMatrix::identity(2, 2);
        assert!(matches!(
            evolve_density(&h, &not_unit, 1.0),
            Err(Error::BadDensityMatrix(_))
        ));
        let negative = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.5, 0.0),
            ],
        );
        assert!(evolve_density(&h, &negative, 1.0).is_err());
    }

    #[test]
    fn dimer_liouville_report() {
        let v = 0.9;
        let h = two_level(TwoLevelParams::new(0.4, 0.4, C64::new(v, 0.0)));
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let report = verify_liouville_map(&h, &pauli_basis(), &ground(2), &times, 1e-9).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.per_time_errors.len(), times.len());
    }

    #[test]
    fn corrupted_generator_fails() {
        let v = 0.9;
        let h = two_level(TwoLevelParams::new(0.4, 0.4, C64::new(v, 0.0)));
        let basis = pauli_basis();
        let good = build_liouville_generator(&h, &basis).unwrap();
        let mut m = good.matrix().clone();
        m[(3, 2)] = -m[(3, 2)];
        m[(2, 3)] = -m[(2, 3)];
        let bad = Generator::new(m, GeneratorSource::Liouville).unwrap();
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let report =
            verify_liouville_generator(&h, &basis, &bad, &ground(2), &times, 1e-9).unwrap();
        assert!(!report.passed);
        assert!(report.max_abs_error > 0.1);
    }

    #[test]
    fn dimer_schrodinger_initial_velocity() {
        let (w0, v) = (0.5, 0.2);
        let h = two_level(TwoLevelParams::new(w0, w0, C64::new(v, 0.0)));
        let c0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let omega = realify_generator(&h);
        let traj = propagate_modes(&omega, &realify_state(&c0).to_vector(), &[0.0, 1.0]).unwrap();
        assert!((&traj.positions[0] - RVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).amax() < 1e-15);
        let v0 = &traj.velocities.as_ref().unwrap()[0];
        assert!((v0 - RVector::from_vec(vec![0.0, 0.0, -w0, -v])).amax() < 1e-15);
        let report = verify_schrodinger_map(&h, &c0, &[0.0, 1.0, 5.0], 1e-9).unwrap();
        assert!(report.passed);
    }
}
