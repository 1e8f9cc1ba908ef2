//! Real 2N-dimensional form of the Schrödinger equation and mixed-state reduction.
//!
//! With c = q + ip and H = Q + iP, ċ = −iHc becomes
//!
//! ```text
//! d/dt [q; p] = [[P, Q], [−Q, P]] [q; p]
//! ```
//!
//! which is a rotation, so the same oscillator machinery as the Liouville route applies.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{hermitian_eigh, CMatrix, CVector, RMatrix, RVector, SkewExponential, C64};
use crate::liouville_map::{Generator, GeneratorSource};

/// Real and imaginary parts of a state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RealState {
    pub q: RVector,
    pub p: RVector,
}

impl RealState {
    /// Stacked coordinates (q_1..q_N, p_1..p_N).
    pub fn to_vector(&self) -> RVector {
        let n = self.q.len();
        RVector::from_fn(2 * n, |i, _| if i < n { self.q[i] } else { self.p[i - n] })
    }

    pub fn from_vector(v: &RVector) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::BadDimension(format!(
                "real state needs an even length, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Ok(RealState {
            q: v.rows(0, n).into_owned(),
            p: v.rows(n, n).into_owned(),
        })
    }

    pub fn norm_squared(&self) -> f64 {
        self.q.norm_squared() + self.p.norm_squared()
    }
}

pub fn realify_state(c: &CVector) -> RealState {
    RealState {
        q: c.map(|z| z.re),
        p: c.map(|z| z.im),
    }
}

pub fn complexify(s: &RealState) -> CVector {
    CVector::from_iterator(
        s.q.len(),
        s.q.iter().zip(s.p.iter()).map(|(&q, &p)| C64::new(q, p)),
    )
}

/// The 2N×2N block matrix [[P, Q], [−Q, P]].
pub fn realify_generator(h: &Hamiltonian) -> Generator {
    let m = h.matrix();
    let n = h.dim();
    let omega = RMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = m[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.im,
            (0, 1) => z.re,
            _ => -z.re,
        }
    });
    Generator::new(omega, GeneratorSource::Schrodinger)
        .expect("a Hermitian Hamiltonian realifies to an antisymmetric generator")
}

/// Ω² = [[−Re H², Im H²], [−Im H², −Re H²]], built from H² directly.
pub fn schrodinger_omega_squared(h: &Hamiltonian) -> RMatrix {
    let m = h.matrix();
    let h2 = m * m;
    let n = h.dim();
    RMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h2[(i % n, j % n)];
        match (i / n, j / n) {
            (0, 0) | (1, 1) => -z.re,
            (0, 1) => z.im,
            _ => -z.im,
        }
    })
}

/// e^{Ωt} applied to the realified state, mapped back to complex amplitudes.
pub fn propagate_state(omega: &Generator, c0: &CVector, t: f64) -> Result<CVector> {
    if omega.dim() != 2 * c0.len() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim() / 2,
            found: c0.len(),
        });
    }
    omega.check_antisymmetric()?;
    let r = SkewExponential::new(omega.matrix()).apply(&realify_state(c0).to_vector(), t);
    Ok(complexify(&RealState::from_vector(&r)?))
}

/// ρ = Σ_k p_k |Ψ_k⟩⟨Ψ_k|.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnsemble {
    weights: Vec<f64>,
    states: Vec<CVector>,
}

impl MixedEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<CVector>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if weights.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidEnsemble("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let n = states[0].len();
        for (k, s) in states.iter().enumerate() {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
            if (s.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidEnsemble(format!(
                    "state {k} has norm {}",
                    s.norm()
                )));
            }
        }
        Ok(MixedEnsemble { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn density(&self) -> CMatrix {
        let n = self.dim();
        let mut rho = CMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            rho += s * s.adjoint() * C64::new(*w, 0.0);
        }
        rho
    }
}

/// ρ = identity_weight · I + Σ_j w_j |Ψ_j⟩⟨Ψ_j|. Only the listed states evolve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEnsemble {
    pub dim: usize,
    pub identity_weight: f64,
    pub reduced: Vec<(f64, CVector)>,
}

impl ReducedEnsemble {
    pub fn density(&self) -> CMatrix {
        let mut rho = CMatrix::identity(self.dim, self.dim) * C64::new(self.identity_weight, 0.0);
        for (w, s) in &self.reduced {
            rho += s * s.adjoint() * C64::new(*w, 0.0);
        }
        rho
    }

    /// Tr(O ρ(t)), evolving each retained state through the realified rotation.
    pub fn expectation(&self, omega: &Generator, observable: &CMatrix, t: f64) -> Result<C64> {
        let mut acc = observable.trace() * self.identity_weight;
        for (w, s) in &self.reduced {
            let st = propagate_state(omega, s, t)?;
            acc += (st.adjoint() * observable * &st)[(0, 0)] * *w;
        }
        Ok(acc)
    }
}

const DEGENERACY_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Removes the static identity-proportional part of a mixed state.
///
/// The ensemble is first brought to an orthonormal, complete set of N states: an
/// orthonormal ensemble is completed with zero-weight states, anything else is
/// replaced by the eigendecomposition of ρ. The removed weight p* is the most
/// degenerate weight (largest on ties); with no degeneracy it is the smallest.
pub fn reduce_mixed(e: &MixedEnsemble) -> Result<ReducedEnsemble> {
    let n = e.dim();
    let (weights, states) = if is_orthonormal(e.states()) {
        complete(e.weights(), e.states())
    } else {
        let (vals, vecs) = hermitian_eigh(&e.density());
        let states = (0..n).map(|j| vecs.column(j).into_owned()).collect();
        (vals.iter().copied().collect(), states)
    };

    let p_star = select_identity_weight(&weights);
    let reduced = weights
        .iter()
        .zip(states)
        .filter(|(w, _)| (**w - p_star).abs() > DEGENERACY_TOL)
        .map(|(w, s)| (w - p_star, s))
        .collect();
    Ok(ReducedEnsemble {
        dim: n,
        identity_weight: p_star,
        reduced,
    })
}

fn is_orthonormal(states: &[CVector]) -> bool {
    states.len() <= states[0].len()
        && states.iter().enumerate().all(|(i, a)| {
            states.iter().enumerate().all(|(j, b)| {
                let target = if i == j { 1.0 } else { 0.0 };
                ((a.adjoint() * b)[(0, 0)] - C64::new(target, 0.0)).norm() <= ORTHONORMAL_TOL
            })
        })
}

/// Extends an orthonormal set to a basis with Gram-Schmidt over the standard basis vectors.
fn complete(weights: &[f64], states: &[CVector]) -> (Vec<f64>, Vec<CVector>) {
    let n = states[0].len();
    let mut w = weights.to_vec();
    let mut basis: Vec<CVector> = states.to_vec();
    let mut k = 0;
    while basis.len() < n && k < n {
        let mut v = CVector::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        for b in &basis {
            let overlap = (b.adjoint() * &v)[(0, 0)];
            v -= b * overlap;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / C64::new(norm, 0.0));
            w.push(0.0);
        }
        k += 1;
    }
    (w, basis)
}

fn select_identity_weight(weights: &[f64]) -> f64 {
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    // (representative, count) groups of weights equal within tolerance
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for w in sorted {
        match groups.last_mut() {
            Some((rep, count)) if (w - *rep).abs() <= DEGENERACY_TOL => *count += 1,
            _ => groups.push((w, 1)),
        }
    }
    let max_count = groups.iter().map(|g| g.1).max().unwrap_or(0);
    if max_count <= 1 {
        return groups[0].0;
    }
    groups
        .iter()
        .filter(|g| g.1 == max_count)
        .map(|g| g.0)
        .fold(f64::NEG_INFINITY, f64::max)
}
