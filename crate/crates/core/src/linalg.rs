//! Dense linear-algebra helpers shared by the quantum and classical sides.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Max |A_ij + A_ji|.
pub fn antisymmetry_deviation(a: &RMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] + a[(j, i)]).abs());
        }
    }
    dev
}

/// Max |A_ij - A_ji|.
pub fn symmetry_deviation(a: &RMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            dev = dev.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    dev
}

/// Max |A_ij - conj(A_ji)|.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs(a: &RMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &RVector, b: &RVector) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Tr(A B) without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn to_complex(a: &RMatrix) -> CMatrix {
    a.map(|x| C64::new(x, 0.0))
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and unitary eigenvectors (columns).
pub fn hermitian_eigh(a: &CMatrix) -> (RVector, CMatrix) {
    let eig = SymmetricEigen::new(a.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

/// Eigendecomposition of a real symmetric matrix.
pub fn symmetric_eigh(a: &RMatrix) -> (RVector, RMatrix) {
    let eig = SymmetricEigen::new(a.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

/// Exponential of a real antisymmetric matrix, built from the Hermitian matrix iΩ.
///
/// iΩ = V Λ V† with real Λ, so e^{Ωt} = V e^{-iΛt} V†, whose imaginary part vanishes.
#[derive(Debug, Clone)]
pub struct SkewExponential {
    eigenvalues: RVector,
    vectors: CMatrix,
}

impl SkewExponential {
    pub fn new(omega: &RMatrix) -> Self {
        let i_omega = omega.map(|x| C64::new(0.0, x));
        let (eigenvalues, vectors) = hermitian_eigh(&i_omega);
        SkewExponential {
            eigenvalues,
            vectors,
        }
    }

    pub fn at(&self, t: f64) -> RMatrix {
        let n = self.eigenvalues.len();
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::new(0.0, -l * t).exp())
            .collect();
        let mut scaled = self.vectors.clone();
        for (j, ph) in phases.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= ph;
            }
        }
        let full = scaled * self.vectors.adjoint();
        full.map(|z| z.re)
    }

    pub fn apply(&self, r: &RVector, t: f64) -> RVector {
        let rc = r.map(|x| C64::new(x, 0.0));
        let coeffs = self.vectors.adjoint() * rc;
        let evolved = CVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, &l)| c * C64::new(0.0, -l * t).exp()),
        );
        (&self.vectors * evolved).map(|z| z.re)
    }
}

/// Exact sampling of the linear system y' = A y at increasing `times`, starting from y(times[0]) = y0.
///
/// Each interval uses e^{AΔt}; equal intervals reuse the same exponential.
pub fn linear_flow(a: &RMatrix, y0: &RVector, times: &[f64]) -> Vec<RVector> {
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return out;
    }
    let mut y = y0.clone();
    out.push(y.clone());
    let mut cached: Option<(f64, RMatrix)> = None;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let reuse = matches!(&cached, Some((d, _)) if (d - dt).abs() <= 1e-14 * dt.abs().max(1.0));
        if !reuse {
            cached = Some((dt, (a * dt).exp()));
        }
        let (_, e) = cached.as_ref().expect("cached exponential");
        y = e * y;
        out.push(y.clone());
    }
    out
}
