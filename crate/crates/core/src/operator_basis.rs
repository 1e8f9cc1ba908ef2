//! Orthonormal operator bases for Liouville space and the coherence-vector expansion.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamiltonian::pauli;
use crate::linalg::{hermiticity_deviation, trace_of_product, CMatrix, CVector, RVector, C64};

/// An ordered set of N×N operators, orthonormal under `norm_factor * Tr(A† B)`.
///
/// Cloning is cheap: the elements are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Arc<Vec<CMatrix>>,
    labels: Arc<Vec<String>>,
    norm_factor: f64,
}

impl OperatorBasis {
    /// Builds a basis from explicit elements, checking orthonormality to 1e-12.
    pub fn new(elements: Vec<CMatrix>, labels: Vec<String>, norm_factor: f64) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::BadDimension("basis has no elements".into()))?;
        if labels.len() != elements.len() {
            return Err(Error::DimensionMismatch {
                expected: elements.len(),
                found: labels.len(),
            });
        }
        for e in &elements {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::BadDimension(format!(
                    "basis element is {}x{}, expected {dim}x{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
        }
        if elements.len() > dim * dim {
            return Err(Error::BadDimension(format!(
                "{} elements exceed N^2 = {}",
                elements.len(),
                dim * dim
            )));
        }
        let basis = OperatorBasis {
            dim,
            elements: Arc::new(elements),
            labels: Arc::new(labels),
            norm_factor,
        };
        let n = basis.len();
        let gram = basis.gram();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - C64::new(target, 0.0)).norm() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "basis is not orthonormal at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.dim * self.dim
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.elements
            .iter()
            .all(|e| hermiticity_deviation(e) <= tol)
    }

    /// `norm_factor * Tr(e_i† e_j)`.
    pub fn inner(&self, a: &CMatrix, b: &CMatrix) -> C64 {
        trace_of_product(&a.adjoint(), b) * self.norm_factor
    }

    pub fn gram(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| {
            self.inner(&self.elements[i], &self.elements[j])
        })
    }

    /// Indices of elements proportional to the identity (these never evolve).
    pub fn identity_indices(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| is_identity_multiple(e))
            .map(|(i, _)| i)
            .collect()
    }
}

fn is_identity_multiple(e: &CMatrix) -> bool {
    let n = e.nrows();
    let d = e[(0, 0)];
    if d.norm() == 0.0 {
        return false;
    }
    (0..n).all(|i| {
        (0..n).all(|j| {
            let target = if i == j { d } else { C64::new(0.0, 0.0) };
            (e[(i, j)] - target).norm() <= 1e-14
        })
    })
}

/// Generalized Gell-Mann basis, trace-orthonormal with `norm_factor = 1`.
///
/// Order: identity (optional), symmetric pairs j<k, antisymmetric pairs j<k, diagonal.
/// For N = 2 this is σ_α/√2.
pub fn gell_mann_basis(n: usize, include_identity: bool) -> Result<OperatorBasis> {
    if n < 2 {
        return Err(Error::BadDimension(format!(
            "Gell-Mann basis needs N >= 2, got {n}"
        )));
    }
    let zero = C64::new(0.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);

    if include_identity {
        elements.push(CMatrix::identity(n, n) * C64::new(1.0 / (n as f64).sqrt(), 0.0));
        labels.push("I".to_string());
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::from_element(n, n, zero);
            m[(j, k)] = C64::new(s, 0.0);
            m[(k, j)] = C64::new(s, 0.0);
            elements.push(m);
            labels.push(format!("S_{}{}", j + 1, k + 1));
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::from_element(n, n, zero);
            m[(j, k)] = C64::new(0.0, -s);
            m[(k, j)] = C64::new(0.0, s);
            elements.push(m);
            labels.push(format!("A_{}{}", j + 1, k + 1));
        }
    }
    for l in 1..n {
        let scale = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::from_element(n, n, zero);
        for i in 0..l {
            m[(i, i)] = C64::new(scale, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * scale, 0.0);
        elements.push(m);
        labels.push(format!("D_{l}"));
    }
    OperatorBasis::new(elements, labels, 1.0)
}

/// σ0..σ3 with the inner product ½Tr(σ_α σ_β) = δ_αβ.
pub fn pauli_basis() -> OperatorBasis {
    let elements = (0..4).map(pauli).collect();
    let labels = ["sigma_0", "sigma_x", "sigma_y", "sigma_z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    OperatorBasis::new(elements, labels, 0.5).expect("Pauli matrices are orthonormal")
}

/// Real coefficients r_j of a density matrix in an operator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceVector {
    pub values: RVector,
    pub basis: OperatorBasis,
}

impl CoherenceVector {
    pub fn new(values: RVector, basis: OperatorBasis) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: values.len(),
            });
        }
        Ok(CoherenceVector { values, basis })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn projections(rho: &CMatrix, basis: &OperatorBasis) -> Result<Vec<C64>> {
    if rho.nrows() != basis.dim() || rho.ncols() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: rho.nrows(),
        });
    }
    Ok(basis
        .elements()
        .iter()
        .map(|e| basis.inner(e, rho))
        .collect())
}

/// r_j = norm_factor · Tr(e_j† ρ), keeping the real part.
pub fn expand(rho: &CMatrix, basis: &OperatorBasis) -> Result<CoherenceVector> {
    let p = projections(rho, basis)?;
    Ok(CoherenceVector {
        values: RVector::from_iterator(p.len(), p.iter().map(|z| z.re)),
        basis: basis.clone(),
    })
}

/// Largest imaginary part discarded by [`expand`].
pub fn expansion_residue(rho: &CMatrix, basis: &OperatorBasis) -> Result<f64> {
    let p = projections(rho, basis)?;
    Ok(p.iter().fold(0.0_f64, |m, z| m.max(z.im.abs())))
}

/// ρ = Σ_j r_j e_j. Requires a complete basis.
pub fn reconstruct(r: &CoherenceVector) -> Result<CMatrix> {
    let basis = &r.basis;
    if !basis.is_complete() {
        return Err(Error::IncompleteBasis {
            dim: basis.dim(),
            elements: basis.len(),
            needed: basis.dim() * basis.dim(),
        });
    }
    Ok(combine(r))
}

/// Reconstruction for a traceless basis (identity omitted): adds `trace/N · I`.
pub fn reconstruct_with_trace(r: &CoherenceVector, trace: f64) -> Result<CMatrix> {
    let basis = &r.basis;
    let n = basis.dim();
    if !basis.identity_indices().is_empty() || basis.len() + 1 != n * n {
        return Err(Error::IncompleteBasis {
            dim: n,
            elements: basis.len(),
            needed: n * n - 1,
        });
    }
    let mut rho = combine(r);
    for i in 0..n {
        rho[(i, i)] += C64::new(trace / n as f64, 0.0);
    }
    Ok(rho)
}

fn combine(r: &CoherenceVector) -> CMatrix {
    let n = r.basis.dim();
    let mut rho = CMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for (e, &x) in r.basis.elements().iter().zip(r.values.iter()) {
        rho += e * C64::new(x, 0.0);
    }
    rho
}

/// Recovers c with ρ = c c†, fixing the global phase by making c real at the anchor index.
///
/// The anchor is the largest diagonal element, lowest index on ties.
pub fn extract_pure_state(rho: &CMatrix, phase_anchor_tol: f64) -> Result<CVector> {
    let n = rho.nrows();
    if n == 0 || rho.ncols() != n {
        return Err(Error::BadDimension(format!(
            "density matrix must be square, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let purity = trace_of_product(rho, rho).re;
    if purity < 1.0 - 1e-8 {
        return Err(Error::NotPure { purity });
    }
    let mut anchor = 0;
    for i in 1..n {
        if rho[(i, i)].re > rho[(anchor, anchor)].re {
            anchor = i;
        }
    }
    let diag = rho[(anchor, anchor)].re;
    if diag < phase_anchor_tol {
        return Err(Error::ZeroAnchor {
            tol: phase_anchor_tol,
        });
    }
    let ca = diag.sqrt();
    Ok(CVector::from_fn(n, |j, _| {
        if j == anchor {
            C64::new(ca, 0.0)
        } else {
            rho[(j, anchor)] / ca
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_identity(m: &CMatrix, tol: f64) {
        let id = CMatrix::identity(m.nrows(), m.ncols());
        assert!((m - id).camax() <= tol, "not identity: {m}");
    }

    #[test]
    fn two_level_gell_mann_is_scaled_pauli() {
        let b = gell_mann_basis(2, true).unwrap();
        assert_eq!(b.len(), 4);
        assert_identity(&b.gram(), 1e-15);
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (alpha, e) in b.elements().iter().enumerate() {
            assert!((e - pauli(alpha) * s).camax() < 1e-15);
        }
        let sx = &b.elements()[1];
        assert!((trace_of_product(sx, sx).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_level_gell_mann() {
        let b = gell_mann_basis(3, true).unwrap();
        assert_eq!(b.len(), 9);
        assert!(b.is_hermitian(0.0));
        assert_identity(&b.gram(), 1e-12);
        assert_eq!(b.identity_indices(), vec![0]);
        assert_eq!(gell_mann_basis(3, false).unwrap().len(), 8);
        assert!(gell_mann_basis(1, true).is_err());
    }

    #[test]
    fn pauli_gram() {
        let b = pauli_basis();
        assert_identity(&b.gram(), 0.0);
        assert_eq!(b.norm_factor(), 0.5);
        assert_eq!(b.inner(&pauli(1), &pauli(2)), C64::new(0.0, 0.0));
        assert_eq!(b.inner(&pauli(3), &pauli(3)), C64::new(1.0, 0.0));
    }

    #[test]
    fn expand_ground_state_in_pauli_basis() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let r = expand(&rho, &pauli_basis()).unwrap();
        assert_eq!(r.values.as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        let back = reconstruct(&r).unwrap();
        assert_eq!(back, rho);

        let mixed = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        let r = expand(&mixed, &pauli_basis()).unwrap();
        assert_eq!(r.values.as_slice(), &[0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn reconstruct_zero_and_incomplete() {
        let b = pauli_basis();
        let r = CoherenceVector::new(RVector::zeros(4), b).unwrap();
        assert_eq!(reconstruct(&r).unwrap(), CMatrix::zeros(2, 2));

        let traceless = gell_mann_basis(2, false).unwrap();
        let r = CoherenceVector::new(RVector::zeros(3), traceless).unwrap();
        assert!(matches!(
            reconstruct(&r),
            Err(Error::IncompleteBasis { .. })
        ));
        let rho = reconstruct_with_trace(&r, 1.0).unwrap();
        assert!((rho - CMatrix::identity(2, 2) * C64::new(0.5, 0.0)).camax() < 1e-15);
    }

    #[test]
    fn expand_dimension_mismatch() {
        let rho = CMatrix::identity(3, 3);
        assert!(matches!(
            expand(&rho, &pauli_basis()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pure_state_extraction() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let c = extract_pure_state(&rho, 1e-12).unwrap();
        assert_eq!(c.as_slice(), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)]);
        let rho = &psi * psi.adjoint();
        let c = extract_pure_state(&rho, 1e-12).unwrap();
        assert_eq!(c[0].im, 0.0);
        assert!(c[0].re > 0.0);
        let fidelity = (c.adjoint() * &psi)[(0, 0)].norm();
        assert!((fidelity - 1.0).abs() < 1e-12);

        let mixed = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(matches!(
            extract_pure_state(&mixed, 1e-12),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn anchor_ties_break_to_lowest_index() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![C64::new(0.0, s), C64::new(s, 0.0)]);
        let rho = &psi * psi.adjoint();
        let c = extract_pure_state(&rho, 1e-12).unwrap();
        assert!((c[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((c[1] - C64::new(0.0, -s)).norm() < 1e-15);
    }

    #[test]
    fn zero_anchor() {
        // a pure state always has some ρ_ii ≥ 1/N
        let mut rho = CMatrix::zeros(2, 2);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            extract_pure_state(&rho, 2.0),
            Err(Error::ZeroAnchor { .. })
        ));
    }
}
