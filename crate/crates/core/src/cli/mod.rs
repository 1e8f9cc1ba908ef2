//! Command implementations behind the `qosc` binary.
//!
//! Every command takes document text and returns document text, so the binary only
//! handles files and exit codes.

pub mod model;
pub mod spec;

use serde::Serialize;

pub use model::{parse_spec, CliError, CliResult, ExitKind, Model};
use spec::{matrix_rows, real_matrix, vector_values, Formalism, NetworkDocument, SystemSpec};

use crate::linalg::RVector;
use crate::oscillator_network::{
    integrate_ode, propagate_network_exact, OscillatorNetwork, Trajectory,
};
use crate::verify::{Comparison, EquivalenceReport};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const TOL_ENV: &str = "QOSC_DEFAULT_TOL";
pub const EXAMPLES: [&str; 4] = ["dimer", "two-level", "symmetric", "bloch"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Modes,
    Ode,
    Quantum,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "modes" => Ok(Method::Modes),
            "ode" => Ok(Method::Ode),
            "quantum" => Ok(Method::Quantum),
            other => Err(format!("unknown method {other:?} (modes, ode, quantum)")),
        }
    }
}

pub fn tool_version() -> String {
    format!("qosc {}", env!("CARGO_PKG_VERSION"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

fn load_model(spec_text: &str, mass: Option<f64>) -> CliResult<Model> {
    let mut spec = parse_spec(spec_text)?;
    if mass.is_some() {
        spec.mass = mass;
    }
    Model::from_spec(&spec)
}

pub fn cmd_compile(spec_text: &str, mass: Option<f64>) -> CliResult<String> {
    let model = load_model(spec_text, mass)?;
    let (net, labels) = model.network()?;
    Ok(to_json(&NetworkDocument {
        tool_version: tool_version(),
        n: net.len(),
        mass: net.mass,
        k: matrix_rows(&net.k),
        gamma: matrix_rows(&net.gamma),
        force: vector_values(&net.force),
        x0: vector_values(&net.x0),
        v0: vector_values(&net.v0),
        index_labels: labels,
        identity_weight: model.identity_weight,
        state_weights: model.state_weights.clone(),
    }))
}

/// Reads a compiled network document back into a network and its labels.
pub fn parse_network(text: &str) -> CliResult<(OscillatorNetwork, Vec<String>)> {
    let doc: NetworkDocument =
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("network: {e}")))?;
    let k = real_matrix(&doc.k).ok_or_else(|| CliError::parse("network.k: ragged rows"))?;
    let gamma =
        real_matrix(&doc.gamma).ok_or_else(|| CliError::parse("network.gamma: ragged rows"))?;
    if doc.n != k.nrows() || doc.index_labels.len() != doc.n {
        return Err(CliError::validation(format!(
            "network.n: {} does not match k ({}) or index_labels ({})",
            doc.n,
            k.nrows(),
            doc.index_labels.len()
        )));
    }
    let net = OscillatorNetwork::new(
        doc.mass,
        k,
        gamma,
        RVector::from_vec(doc.force),
        RVector::from_vec(doc.x0),
        RVector::from_vec(doc.v0),
    )
    .map_err(|e| CliError::from_lib("network", e))?;
    Ok((net, doc.index_labels))
}

/// Indices of the oscillators that carry physical coordinates.
fn physical(labels: &[String]) -> Vec<usize> {
    (0..labels.len())
        .filter(|&i| labels[i] != "static")
        .collect()
}

fn network_trajectory(
    model: &Model,
    network_text: &str,
    times: &[f64],
    method: Method,
    step: Option<f64>,
) -> CliResult<Trajectory> {
    let (net, labels) = parse_network(network_text)?;
    let keep = physical(&labels);
    if keep.len() != model.width() {
        return Err(CliError::validation(format!(
            "network.n: {} physical oscillators, spec needs {}",
            keep.len(),
            model.width()
        )));
    }
    let traj = match method {
        Method::Ode => {
            let step = match step {
                Some(s) => s,
                None => model.default_step()?,
            };
            integrate_ode(&net, times, step).map_err(|e| CliError::from_lib("step", e))?
        }
        Method::Modes => {
            propagate_network_exact(&net, times).map_err(|e| CliError::from_lib("network", e))?
        }
        Method::Quantum => {
            return Err(CliError::validation(
                "method: quantum needs the spec, not a network",
            ))
        }
    };
    Ok(traj.select(&keep))
}

fn trajectory(
    model: &Model,
    method: Method,
    step: Option<f64>,
    network_text: Option<&str>,
) -> CliResult<Trajectory> {
    let times = model.times.clone();
    if let Some(s) = step {
        if !(s > 0.0) || !s.is_finite() {
            return Err(CliError::validation(format!(
                "step: must be positive, got {s}"
            )));
        }
    }
    if let Some(text) = network_text {
        return network_trajectory(model, text, &times, method, step);
    }
    match method {
        Method::Modes => model.modes(&times),
        Method::Quantum => model.quantum(&times),
        Method::Ode => {
            let step = match step {
                Some(s) => s,
                None => model.default_step()?,
            };
            model.ode(&times, step)
        }
    }
}

/// Trajectory CSV. With a network document the classical side runs on that network
/// and the spec supplies only the times.
pub fn cmd_simulate(
    spec_text: &str,
    method: Method,
    step: Option<f64>,
    mass: Option<f64>,
    network_text: Option<&str>,
) -> CliResult<String> {
    let model = load_model(spec_text, mass)?;
    Ok(trajectory(&model, method, step, network_text)?.to_csv(false))
}

/// Compares the exact motion of the compiled network (or of `network_text`) and the
/// analytic classical solution against the reference. Returns the report and whether
/// it passed.
pub fn cmd_verify(
    spec_text: &str,
    tol: f64,
    mass: Option<f64>,
    network_text: Option<&str>,
) -> CliResult<(String, bool)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CliError::validation(format!(
            "tol: must be positive, got {tol}"
        )));
    }
    let spec: SystemSpec = parse_spec(spec_text)?;
    let model = load_model(spec_text, mass)?;
    let comparison = if model.is_open() {
        Comparison::Dissipative
    } else {
        match spec.formalism {
            Formalism::Liouville => Comparison::LiouvilleMap,
            Formalism::Schrodinger => Comparison::SchrodingerMap,
        }
    };
    let times = model.times.clone();
    let reference = model.quantum(&times)?;
    let analytic = model.modes(&times)?;
    let network = match network_text {
        Some(text) => network_trajectory(&model, text, &times, Method::Modes, None)?,
        None => {
            let (net, labels) = model.network()?;
            propagate_network_exact(&net, &times)
                .map_err(|e| CliError::from_lib("network", e))?
                .select(&physical(&labels))
        }
    };
    let report = EquivalenceReport::compare(
        comparison,
        &reference.positions,
        &[&analytic, &network],
        tol,
    );
    Ok((to_json(&report), report.passed))
}

/// Tolerance from the environment, falling back to the built-in default.
pub fn default_tol() -> CliResult<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::parse(format!("{TOL_ENV}: not a number: {v:?}"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

pub fn cmd_example(name: &str) -> CliResult<String> {
    let text = match name {
        "dimer" => DIMER,
        "two-level" => TWO_LEVEL,
        "symmetric" => SYMMETRIC,
        "bloch" => BLOCH,
        other => {
            return Err(CliError::validation(format!(
                "name: unknown example {other:?} (expected one of {})",
                EXAMPLES.join(", ")
            )))
        }
    };
    // Round-trip through the parser so the emitted form is canonical.
    let spec = parse_spec(text)?;
    Ok(to_json(&spec))
}

// ω0 = 1, V = 0.5: r₃ = cos(t)/2, period 2π.
const DIMER: &str = r#"{
  "hamiltonian": [[[1, 0], [0.5, 0]], [[0.5, 0], [1, 0]]],
  "formalism": "liouville",
  "basis": "pauli",
  "initial": {"state": [[1, 0], [0, 0]]},
  "times": {"start": 0, "stop": 62.83185307179586, "count": 201}
}"#;

// Δ1 = 1, Δ2 = -0.5, V = 0.6 - 0.3i.
const TWO_LEVEL: &str = r#"{
  "hamiltonian": [[[1, 0], [0.6, -0.3]], [[0.6, 0.3], [-0.5, 0]]],
  "formalism": "schrodinger",
  "initial": {"state": [[0.8, 0], [0, 0.6]]},
  "times": {"start": 0, "stop": 20, "count": 201}
}"#;

// Δ1 = -Δ2 = 0.8, V = 0.3 - 0.4i.
const SYMMETRIC: &str = r#"{
  "hamiltonian": [[[0.8, 0], [0.3, -0.4]], [[0.3, 0.4], [-0.8, 0]]],
  "formalism": "schrodinger",
  "initial": {"state": [[1, 0], [0, 0]]},
  "times": {"start": 0, "stop": 20, "count": 201}
}"#;

// ω3 = 1, T1 = 2, T2 = 1, M0 = 1 on the traceless Pauli components.
const BLOCH: &str = r#"{
  "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
  "formalism": "liouville",
  "basis": "pauli",
  "initial": {"density": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]},
  "relaxation": {"R": [[-1, 0, 0], [0, -1, 0], [0, 0, -0.5]], "F": [0, 0, 0.25]},
  "times": {"start": 0, "stop": 10, "count": 201}
}"#;
