#![allow(dead_code)]

use qosc::hamiltonian::Hamiltonian;
use qosc::linalg::{CMatrix, CVector, RMatrix, RVector, C64};
use rand::Rng;

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Hamiltonian {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = (&a + a.adjoint()) * C64::new(0.5 * scale, 0.0);
    Hamiltonian::new(h).expect("hermitian by construction")
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> CVector {
    let c = CVector::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = c.norm();
    c / C64::new(norm, 0.0)
}

/// A full-rank density matrix A A† / Tr.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_real<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_antisymmetric<R: Rng>(rng: &mut R, n: usize) -> RMatrix {
    let a = random_real(rng, n, n);
    &a - a.transpose()
}

/// Matrix exponential by Taylor series with scaling and squaring.
/// Independent of the eigendecompositions used by the library.
pub fn taylor_expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let s = (norm.log2().ceil() as i32 + 1).max(0);
    let scaled = a / C64::new(2f64.powi(s), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn taylor_expm_real(a: &RMatrix) -> RMatrix {
    taylor_expm(&a.map(|x| C64::new(x, 0.0))).map(|z| z.re)
}

/// e^{-iHt} c0 through the Taylor oracle.
pub fn oracle_state(h: &Hamiltonian, c0: &CVector, t: f64) -> CVector {
    taylor_expm(&(h.matrix() * C64::new(0.0, -t))) * c0
}

pub fn max_diff(a: &RVector, b: &RVector) -> f64 {
    (a - b).amax()
}
