//! A parsed system spec compiled down to generators, networks and reference solutions.

use std::fmt;

use super::spec::{
    complex_matrix, complex_vector, real_matrix, BasisKind, Formalism, Initial, SystemSpec,
};
use crate::dissipative::{OpenSystem, RelaxationModel};
use crate::error::Error;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{CMatrix, CVector, RMatrix, RVector};
use crate::liouville_map::{build_liouville_generator, drop_identity, Generator, GeneratorSource};
use crate::operator_basis::{expand, gell_mann_basis, pauli_basis, OperatorBasis};
use crate::oscillator_network::{
    integrate_ode, propagate_modes, shortest_period, springs_from_omega_squared, OscillatorNetwork,
    Trajectory,
};
use crate::schrodinger_map::{realify_generator, realify_state, reduce_mixed, MixedEnsemble};
use crate::verify::{check_density, QuantumPropagator};

/// Exit codes: 0 pass, 1 verification failed, 2 parse, 3 validation, 4 numeric guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    VerifyFailed = 1,
    Parse = 2,
    Validation = 3,
    Numeric = 4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Parse,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Validation,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }

    /// Wraps a library error, naming the field it came from.
    pub fn from_lib(field: &str, e: Error) -> Self {
        let kind = match e {
            Error::StepTooLarge { .. } | Error::PositiveEigenvalue { .. } => ExitKind::Numeric,
            _ => ExitKind::Validation,
        };
        CliError {
            kind,
            message: format!("{field}: {e}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone)]
enum Reference {
    /// Coherence components `keep` of expand(ρ(t)).
    Liouville {
        h: Hamiltonian,
        basis: OperatorBasis,
        keep: Vec<usize>,
        rho0: CMatrix,
    },
    /// Concatenated realified states.
    Schrodinger {
        h: Hamiltonian,
        states: Vec<CVector>,
    },
}

#[derive(Debug, Clone)]
enum Dynamics {
    Closed {
        generator: Generator,
        reference: Reference,
    },
    Open {
        system: OpenSystem,
    },
}

/// Everything needed to compile, simulate and verify one spec.
#[derive(Debug, Clone)]
pub struct Model {
    dynamics: Dynamics,
    x0: RVector,
    labels: Vec<String>,
    pub mass: f64,
    pub times: Vec<f64>,
    pub identity_weight: Option<f64>,
    pub state_weights: Option<Vec<f64>>,
}

pub fn parse_spec(text: &str) -> CliResult<SystemSpec> {
    let spec: SystemSpec =
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("spec: {e}")))?;
    if spec.hamiltonian.is_empty() || spec.hamiltonian.iter().all(|r| r.is_empty()) {
        return Err(CliError::parse("hamiltonian: matrix is empty"));
    }
    Ok(spec)
}

fn hamiltonian(spec: &SystemSpec) -> CliResult<Hamiltonian> {
    let m = complex_matrix(&spec.hamiltonian)
        .ok_or_else(|| CliError::parse("hamiltonian: rows have different lengths"))?;
    Hamiltonian::new(m).map_err(|e| CliError::from_lib("hamiltonian", e))
}

fn initial_density(initial: &Initial, n: usize) -> CliResult<CMatrix> {
    let rho = match initial {
        Initial::State(c) => {
            let c = checked_state(c, n, "initial.state")?;
            &c * c.adjoint()
        }
        Initial::Density(rows) => complex_matrix(rows)
            .ok_or_else(|| CliError::parse("initial.density: rows have different lengths"))?,
        Initial::Ensemble { .. } => ensemble(initial, n)?.density(),
    };
    if rho.nrows() != n || rho.ncols() != n {
        return Err(CliError::validation(format!(
            "initial.density: expected {n}x{n}, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    check_density(&rho).map_err(|e| CliError::from_lib("initial", e))?;
    Ok(rho)
}

fn checked_state(c: &[[f64; 2]], n: usize, field: &str) -> CliResult<CVector> {
    let c = complex_vector(c);
    if c.len() != n {
        return Err(CliError::validation(format!(
            "{field}: expected {n} amplitudes, got {}",
            c.len()
        )));
    }
    if (c.norm() - 1.0).abs() > 1e-10 {
        return Err(CliError::validation(format!(
            "{field}: state has norm {}",
            c.norm()
        )));
    }
    Ok(c)
}

fn ensemble(initial: &Initial, n: usize) -> CliResult<MixedEnsemble> {
    let Initial::Ensemble { weights, states } = initial else {
        unreachable!("called on an ensemble");
    };
    let states = states
        .iter()
        .map(|s| checked_state(s, n, "initial.ensemble.states"))
        .collect::<CliResult<Vec<_>>>()?;
    MixedEnsemble::new(weights.clone(), states)
        .map_err(|e| CliError::from_lib("initial.ensemble", e))
}

impl Model {
    pub fn from_spec(spec: &SystemSpec) -> CliResult<Self> {
        let h = hamiltonian(spec)?;
        let mass = spec.mass.unwrap_or(1.0);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(CliError::validation(format!(
                "mass: must be positive, got {mass}"
            )));
        }
        let times = spec.times.samples();
        crate::ode::check_times(&times).map_err(|e| CliError::from_lib("times", e))?;
        if times.first().is_some_and(|&t| t < 0.0) {
            return Err(CliError::validation("times: must start at t >= 0"));
        }
        match spec.formalism {
            Formalism::Liouville => Self::liouville(spec, h, mass, times),
            Formalism::Schrodinger => {
                if spec.relaxation.is_some() {
                    return Err(CliError::validation(
                        "relaxation: only supported with the liouville formalism",
                    ));
                }
                if spec.basis.is_some() {
                    return Err(CliError::validation(
                        "basis: only meaningful with the liouville formalism",
                    ));
                }
                Self::schrodinger(spec, h, mass, times)
            }
        }
    }

    fn liouville(spec: &SystemSpec, h: Hamiltonian, mass: f64, times: Vec<f64>) -> CliResult<Self> {
        let n = h.dim();
        let basis = match spec.basis.unwrap_or(BasisKind::GellMann) {
            BasisKind::Pauli if n != 2 => {
                return Err(CliError::validation(format!(
                    "basis: pauli needs a 2-level Hamiltonian, got N = {n}"
                )))
            }
            BasisKind::Pauli => pauli_basis(),
            BasisKind::GellMann => {
                gell_mann_basis(n, true).map_err(|e| CliError::from_lib("basis", e))?
            }
        };
        let rho0 = initial_density(&spec.initial, n)?;
        let omega = build_liouville_generator(&h, &basis)
            .map_err(|e| CliError::from_lib("hamiltonian", e))?;
        let active = drop_identity(&omega, &basis).map_err(|e| CliError::from_lib("basis", e))?;
        let r0 = expand(&rho0, &basis).map_err(|e| CliError::from_lib("initial", e))?;
        let x0 = active.project(&r0.values);
        let labels: Vec<String> = active
            .indices
            .iter()
            .map(|&i| basis.labels()[i].clone())
            .collect();

        let dynamics = match &spec.relaxation {
            None => Dynamics::Closed {
                generator: active.generator.clone(),
                reference: Reference::Liouville {
                    h,
                    basis,
                    keep: active.indices.clone(),
                    rho0,
                },
            },
            Some(relax) => {
                let r = real_matrix(&relax.r)
                    .ok_or_else(|| CliError::parse("relaxation.R: rows have different lengths"))?;
                let dim = labels.len();
                if r.nrows() != dim || r.ncols() != dim || relax.f.len() != dim {
                    return Err(CliError::validation(format!(
                        "relaxation: R must be {dim}x{dim} and F of length {dim} (one per traceless basis element)"
                    )));
                }
                let model = RelaxationModel::new(r, RVector::from_column_slice(&relax.f))
                    .map_err(|e| CliError::from_lib("relaxation.R", e))?;
                let system = OpenSystem::new(active.generator.clone(), model)
                    .map_err(|e| CliError::from_lib("relaxation", e))?;
                Dynamics::Open { system }
            }
        };
        Ok(Model {
            dynamics,
            x0,
            labels,
            mass,
            times,
            identity_weight: None,
            state_weights: None,
        })
    }

    fn schrodinger(
        spec: &SystemSpec,
        h: Hamiltonian,
        mass: f64,
        times: Vec<f64>,
    ) -> CliResult<Self> {
        let n = h.dim();
        let (states, weights, identity_weight) = match &spec.initial {
            Initial::State(c) => (vec![checked_state(c, n, "initial.state")?], None, None),
            other => {
                let e = match other {
                    Initial::Ensemble { .. } => ensemble(other, n)?,
                    _ => {
                        let rho = initial_density(other, n)?;
                        spectral_ensemble(&rho)?
                    }
                };
                let reduced = reduce_mixed(&e).map_err(|e| CliError::from_lib("initial", e))?;
                let (w, s): (Vec<f64>, Vec<CVector>) = reduced.reduced.into_iter().unzip();
                (s, Some(w), Some(reduced.identity_weight))
            }
        };

        let single = realify_generator(&h);
        let block = single.dim();
        let total = block * states.len();
        let mut big = RMatrix::zeros(total, total);
        let mut x0 = RVector::zeros(total);
        let mut labels = Vec::with_capacity(total);
        for (k, s) in states.iter().enumerate() {
            big.view_mut((k * block, k * block), (block, block))
                .copy_from(single.matrix());
            x0.rows_mut(k * block, block)
                .copy_from(&realify_state(s).to_vector());
            for part in ["q", "p"] {
                for i in 1..=n {
                    labels.push(if weights.is_some() {
                        format!("{part}_{i}#{}", k + 1)
                    } else {
                        format!("{part}_{i}")
                    });
                }
            }
        }
        let generator = Generator::new(big, GeneratorSource::Schrodinger)
            .map_err(|e| CliError::from_lib("hamiltonian", e))?;
        Ok(Model {
            dynamics: Dynamics::Closed {
                generator,
                reference: Reference::Schrodinger { h, states },
            },
            x0,
            labels,
            mass,
            times,
            identity_weight,
            state_weights: weights,
        })
    }

    pub fn is_open(&self) -> bool {
        matches!(self.dynamics, Dynamics::Open { .. })
    }

    pub fn open_system(&self) -> Option<&OpenSystem> {
        match &self.dynamics {
            Dynamics::Open { system } => Some(system),
            Dynamics::Closed { .. } => None,
        }
    }

    pub fn initial_positions(&self) -> &RVector {
        &self.x0
    }

    /// Number of physical coordinates (excludes the static coordinate of open systems).
    pub fn width(&self) -> usize {
        self.x0.len()
    }

    /// Compiled network and a label per oscillator.
    pub fn network(&self) -> CliResult<(OscillatorNetwork, Vec<String>)> {
        match &self.dynamics {
            Dynamics::Closed { generator, .. } => {
                let v0 = generator.matrix() * &self.x0;
                let net = springs_from_omega_squared(&generator.squared(), self.mass)
                    .and_then(|net| net.with_initial(self.x0.clone(), v0))
                    .map_err(|e| CliError::from_lib("network", e))?;
                Ok((net, self.labels.clone()))
            }
            Dynamics::Open { system } => {
                let net = system
                    .network(&self.x0, self.mass)
                    .map_err(|e| CliError::from_lib("network", e))?;
                let mut labels = self.labels.clone();
                labels.push("static".to_string());
                Ok((net, labels))
            }
        }
    }

    /// Analytic classical propagation: normal modes for closed systems, the exact
    /// linear flow of the augmented first-order equation for open ones.
    pub fn modes(&self, times: &[f64]) -> CliResult<Trajectory> {
        if self.width() == 0 {
            return Ok(empty_trajectory(times));
        }
        match &self.dynamics {
            Dynamics::Closed { generator, .. } => propagate_modes(generator, &self.x0, times),
            Dynamics::Open { system } => system.exact(&self.x0, times),
        }
        .map_err(|e| CliError::from_lib("modes", e))
    }

    /// Reference solution: exact quantum evolution for closed systems, the exact
    /// first-order relaxation equation for open ones.
    pub fn quantum(&self, times: &[f64]) -> CliResult<Trajectory> {
        let positions = match &self.dynamics {
            Dynamics::Open { system } => {
                return system
                    .exact(&self.x0, times)
                    .map_err(|e| CliError::from_lib("quantum", e))
            }
            Dynamics::Closed { reference, .. } => match reference {
                Reference::Liouville {
                    h,
                    basis,
                    keep,
                    rho0,
                } => {
                    let q = QuantumPropagator::new(h);
                    times
                        .iter()
                        .map(|&t| {
                            expand(&q.density(rho0, t), basis).map(|r| {
                                RVector::from_iterator(
                                    keep.len(),
                                    keep.iter().map(|&i| r.values[i]),
                                )
                            })
                        })
                        .collect::<crate::Result<Vec<_>>>()
                        .map_err(|e| CliError::from_lib("quantum", e))?
                }
                Reference::Schrodinger { h, states } => {
                    let q = QuantumPropagator::new(h);
                    times
                        .iter()
                        .map(|&t| {
                            let parts: Vec<f64> = states
                                .iter()
                                .flat_map(|s| {
                                    realify_state(&q.state(s, t))
                                        .to_vector()
                                        .data
                                        .as_vec()
                                        .clone()
                                })
                                .collect();
                            RVector::from_vec(parts)
                        })
                        .collect()
                }
            },
        };
        Trajectory::new(times.to_vec(), positions, None).map_err(|e| CliError::from_lib("times", e))
    }

    /// Default RK4 step: a thousandth of the shortest network period.
    pub fn default_step(&self) -> CliResult<f64> {
        let (net, _) = self.network()?;
        let period = shortest_period(&net.acceleration_matrix());
        if period.is_finite() {
            Ok(period / 1000.0)
        } else {
            let span = match (self.times.first(), self.times.last()) {
                (Some(a), Some(b)) => b.max(0.0) - a.min(0.0),
                _ => 0.0,
            };
            Ok(span.max(1.0) / 1000.0)
        }
    }

    /// RK4 integration of the compiled network, physical coordinates only.
    pub fn ode(&self, times: &[f64], step: f64) -> CliResult<Trajectory> {
        if self.width() == 0 {
            return Ok(empty_trajectory(times));
        }
        let (net, _) = self.network()?;
        let traj = integrate_ode(&net, times, step).map_err(|e| CliError::from_lib("step", e))?;
        let keep: Vec<usize> = (0..self.width()).collect();
        Ok(traj.select(&keep))
    }
}

fn empty_trajectory(times: &[f64]) -> Trajectory {
    Trajectory {
        times: times.to_vec(),
        positions: vec![RVector::zeros(0); times.len()],
        velocities: None,
    }
}

fn spectral_ensemble(rho: &CMatrix) -> CliResult<MixedEnsemble> {
    let (vals, vecs) = crate::linalg::hermitian_eigh(rho);
    let weights: Vec<f64> = vals.iter().map(|&w| w.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let weights = weights.iter().map(|w| w / total).collect();
    let states = (0..vecs.ncols())
        .map(|j| vecs.column(j).into_owned())
        .collect();
    MixedEnsemble::new(weights, states).map_err(|e| CliError::from_lib("initial.density", e))
}
