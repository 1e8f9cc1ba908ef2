//! Real antisymmetric generator Ω of density-matrix evolution, ṙ = Ω r.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{
    antisymmetry_deviation, max_abs, CMatrix, RMatrix, RVector, SkewExponential, C64,
};
use crate::operator_basis::{CoherenceVector, OperatorBasis};

const ANTISYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorSource {
    Liouville,
    Schrodinger,
    DissipativeAugmented,
}

/// Matrix driving ṙ = Ω r. Antisymmetric unless built from a dissipative system.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    matrix: RMatrix,
    source: GeneratorSource,
}

impl Generator {
    pub fn new(matrix: RMatrix, source: GeneratorSource) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::BadDimension(format!(
                "generator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let g = Generator { matrix, source };
        if source != GeneratorSource::DissipativeAugmented {
            g.check_antisymmetric()?;
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn source(&self) -> GeneratorSource {
        self.source
    }

    pub fn check_antisymmetric(&self) -> Result<()> {
        let deviation = antisymmetry_deviation(&self.matrix);
        if deviation > ANTISYMMETRY_TOL * max_abs(&self.matrix).max(1.0) {
            return Err(Error::NotAntisymmetric { deviation });
        }
        Ok(())
    }

    /// Ω², the coupling matrix of the equivalent oscillators.
    pub fn squared(&self) -> RMatrix {
        &self.matrix * &self.matrix
    }
}

/// Ω_ij = −i · norm_factor · Tr(e_i† [H, e_j]).
pub fn build_liouville_generator(h: &Hamiltonian, basis: &OperatorBasis) -> Result<Generator> {
    if h.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: h.dim(),
        });
    }
    let hm = h.matrix();
    let n = basis.len();
    let elements = basis.elements();
    let commutators: Vec<CMatrix> = elements.iter().map(|e| hm * e - e * hm).collect();
    let minus_i = C64::new(0.0, -1.0);
    let mut omega = RMatrix::zeros(n, n);
    for i in 0..n {
        for (j, comm) in commutators.iter().enumerate() {
            let z = basis.inner(&elements[i], comm) * minus_i;
            if z.im.abs() > 1e-10 {
                return Err(Error::NonHermitianBasis {
                    row: i,
                    col: j,
                    residue: z.im,
                });
            }
            omega[(i, j)] = z.re;
        }
    }
    Generator::new(omega, GeneratorSource::Liouville)
}

/// ṙ = Ω r.
pub fn coherence_velocity(omega: &Generator, r: &RVector) -> Result<RVector> {
    if r.len() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: r.len(),
        });
    }
    Ok(omega.matrix() * r)
}

/// r(t) = e^{Ωt} r(0), via the eigenstructure of iΩ.
pub fn rotor_propagate(omega: &Generator, r0: &CoherenceVector, t: f64) -> Result<CoherenceVector> {
    let values = rotor_propagate_vector(omega, &r0.values, t)?;
    Ok(CoherenceVector {
        values,
        basis: r0.basis.clone(),
    })
}

pub fn rotor_propagate_vector(omega: &Generator, r0: &RVector, t: f64) -> Result<RVector> {
    omega.check_antisymmetric()?;
    if r0.len() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: r0.len(),
        });
    }
    Ok(SkewExponential::new(omega.matrix()).apply(r0, t))
}

/// A generator restricted to a subset of coordinates, with the map back to the full index set.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSubspace {
    /// `indices[k]` is the full-space index of reduced coordinate k.
    pub indices: Vec<usize>,
    pub generator: Generator,
}

impl ActiveSubspace {
    pub fn project(&self, full: &RVector) -> RVector {
        RVector::from_iterator(self.indices.len(), self.indices.iter().map(|&i| full[i]))
    }

    /// Writes reduced values back into a copy of `full` (static coordinates keep their values).
    pub fn embed(&self, reduced: &RVector, full: &RVector) -> RVector {
        let mut out = full.clone();
        for (k, &i) in self.indices.iter().enumerate() {
            out[i] = reduced[k];
        }
        out
    }
}

pub fn restrict(omega: &Generator, indices: &[usize]) -> Result<ActiveSubspace> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= omega.dim()) {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: bad + 1,
        });
    }
    let m = omega.matrix();
    let sub = RMatrix::from_fn(indices.len(), indices.len(), |a, b| {
        m[(indices[a], indices[b])]
    });
    Ok(ActiveSubspace {
        indices: indices.to_vec(),
        generator: Generator::new(sub, omega.source())?,
    })
}

/// Drops every coordinate whose row and column of Ω vanish; those coordinates are static.
pub fn reduce_active(omega: &Generator) -> ActiveSubspace {
    let m = omega.matrix();
    let n = omega.dim();
    let scale = max_abs(m);
    let tol = 1e-14 * scale;
    let indices: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| m[(i, j)].abs() > tol || m[(j, i)].abs() > tol))
        .collect();
    restrict(omega, &indices).expect("indices are in range and the source is unchanged")
}

/// Removes the identity-proportional basis elements (always static under unitary evolution).
pub fn drop_identity(omega: &Generator, basis: &OperatorBasis) -> Result<ActiveSubspace> {
    let skip = basis.identity_indices();
    let keep: Vec<usize> = (0..basis.len()).filter(|i| !skip.contains(i)).collect();
    restrict(omega, &keep)
}
