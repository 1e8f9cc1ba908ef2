//! Quantum system definitions (ħ = 1, all energies are angular frequencies).

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, trace_of_product, CMatrix, C64};

/// Relative Hermiticity tolerance applied by [`Hamiltonian::new`].
pub const DEFAULT_HERM_TOL: f64 = 1e-10;

/// A validated Hermitian N×N Hamiltonian, N ≥ 2.
///
/// The stored matrix is exactly the one supplied; nothing is symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
}

impl Hamiltonian {
    /// Validates with the default tolerance, `DEFAULT_HERM_TOL * max |H_ij|`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let scale = matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        check(matrix, DEFAULT_HERM_TOL * scale)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Validates `matrix` as a Hamiltonian with an absolute Hermiticity tolerance.
pub fn validate(matrix: CMatrix, herm_tol: f64) -> Result<Hamiltonian> {
    if !(herm_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "herm_tol must be positive, got {herm_tol}"
        )));
    }
    check(matrix, herm_tol)
}

fn check(matrix: CMatrix, tol: f64) -> Result<Hamiltonian> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::BadDimension(format!(
            "Hamiltonian must be square, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.nrows() < 2 {
        return Err(Error::BadDimension(format!(
            "Hamiltonian dimension must be at least 2, got {}",
            matrix.nrows()
        )));
    }
    if matrix
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidArgument(
            "Hamiltonian has non-finite entries".into(),
        ));
    }
    let deviation = hermiticity_deviation(&matrix);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(Hamiltonian { matrix })
}

/// Parameters of the general two-level Hamiltonian `[[Δ1, V], [V*, Δ2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub delta1: f64,
    pub delta2: f64,
    /// V = ω1 − iω2.
    pub v: C64,
}

impl TwoLevelParams {
    pub fn new(delta1: f64, delta2: f64, v: C64) -> Self {
        TwoLevelParams { delta1, delta2, v }
    }

    /// Builds the parameters from the Pauli weights (ω0, ω1, ω2, ω3).
    pub fn from_pauli(w: [f64; 4]) -> Self {
        TwoLevelParams {
            delta1: w[0] + w[3],
            delta2: w[0] - w[3],
            v: C64::new(w[1], -w[2]),
        }
    }

    pub fn omega0(&self) -> f64 {
        0.5 * (self.delta1 + self.delta2)
    }

    pub fn omega1(&self) -> f64 {
        self.v.re
    }

    pub fn omega2(&self) -> f64 {
        -self.v.im
    }

    pub fn omega3(&self) -> f64 {
        0.5 * (self.delta1 - self.delta2)
    }

    /// (ω0, ω1, ω2, ω3).
    pub fn pauli_weights(&self) -> [f64; 4] {
        [self.omega0(), self.omega1(), self.omega2(), self.omega3()]
    }
}

pub fn two_level(params: TwoLevelParams) -> Hamiltonian {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(params.delta1, 0.0),
            params.v,
            params.v.conj(),
            C64::new(params.delta2, 0.0),
        ],
    );
    Hamiltonian { matrix: m }
}

/// σ0 (identity), σ1, σ2, σ3.
pub fn pauli(alpha: usize) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let entries = match alpha {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => panic!("Pauli index must be 0..=3, got {alpha}"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// ω_α = Tr(σ_α H) / 2 for a two-level Hamiltonian.
pub fn pauli_decompose(h: &Hamiltonian) -> Result<[f64; 4]> {
    if h.dim() != 2 {
        return Err(Error::BadDimension(format!(
            "Pauli decomposition needs N = 2, got {}",
            h.dim()
        )));
    }
    let mut w = [0.0; 4];
    for (alpha, slot) in w.iter_mut().enumerate() {
        *slot = 0.5 * trace_of_product(&pauli(alpha), h.matrix()).re;
    }
    Ok(w)
}
