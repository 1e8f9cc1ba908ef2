//! JSON documents read and written by the command-line tool.
//!
//! Complex numbers are always `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector, RMatrix, RVector, C64};

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formalism {
    Liouville,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Pauli,
    GellMann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Initial {
    State(Vec<ComplexPair>),
    Density(Vec<Vec<ComplexPair>>),
    Ensemble {
        weights: Vec<f64>,
        states: Vec<Vec<ComplexPair>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relaxation {
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Times {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl Times {
    pub fn samples(&self) -> Vec<f64> {
        match self {
            Times::List(ts) => ts.clone(),
            Times::Range { start, stop, count } => match *count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

/// Input document describing a quantum system and what to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub hamiltonian: Vec<Vec<ComplexPair>>,
    pub formalism: Formalism,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisKind>,
    pub initial: Initial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<Relaxation>,
    pub times: Times,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

/// Compiled oscillator network as written by `qosc compile`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub tool_version: String,
    pub n: usize,
    pub mass: f64,
    pub k: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub force: Vec<f64>,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub index_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_weights: Option<Vec<f64>>,
}

pub fn complex_vector(v: &[ComplexPair]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1])))
}

/// Nested rows to a matrix; `None` if the rows are ragged.
pub fn complex_matrix(rows: &[Vec<ComplexPair>]) -> Option<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(CMatrix::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn real_matrix(rows: &[Vec<f64>]) -> Option<RMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(RMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

// Adding 0.0 turns -0.0 into 0.0 so documents do not depend on the sign of zero.
pub fn matrix_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    m.row_iter()
        .map(|r| r.iter().map(|x| x + 0.0).collect())
        .collect()
}

pub fn complex_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn vector_values(v: &RVector) -> Vec<f64> {
    v.iter().map(|x| x + 0.0).collect()
}
