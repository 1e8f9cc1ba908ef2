use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qosc::cli::{self, CliError, CliResult, Method};

#[derive(Parser)]
#[command(
    name = "qosc",
    version,
    about = "Quantum systems as classical oscillator networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a spec into a network document.
    Compile {
        /// Spec file, `-` for stdin.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Write a trajectory CSV.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "modes")]
        method: Method,
        /// RK4 step for `--method ode`; defaults to T_min/1000.
        #[arg(long)]
        step: Option<f64>,
        /// Simulate this compiled network instead of compiling the spec.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Check the classical network against the quantum reference.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Defaults to $QOSC_DEFAULT_TOL, else 1e-8.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Emit a built-in example spec: dimer, two-level, symmetric, bloch.
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: &Path, field: &str) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::parse(format!("{field}: stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{field}: {}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    let result = match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    result.map_err(|e| CliError::validation(format!("out: {e}")))
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Compile { spec, out, mass } => {
            let doc = cli::cmd_compile(&read_input(&spec, "spec")?, mass)?;
            write_output(out.as_deref(), &doc)?;
        }
        Command::Simulate {
            spec,
            method,
            step,
            network,
            out,
            mass,
        } => {
            let network = network.map(|p| read_input(&p, "network")).transpose()?;
            let csv = cli::cmd_simulate(
                &read_input(&spec, "spec")?,
                method,
                step,
                mass,
                network.as_deref(),
            )?;
            write_output(out.as_deref(), &csv)?;
        }
        Command::Verify {
            spec,
            tol,
            network,
            out,
            mass,
        } => {
            let tol = match tol {
                Some(t) => t,
                None => cli::default_tol()?,
            };
            let network = network.map(|p| read_input(&p, "network")).transpose()?;
            let (report, passed) =
                cli::cmd_verify(&read_input(&spec, "spec")?, tol, mass, network.as_deref())?;
            write_output(out.as_deref(), &report)?;
            return Ok(passed);
        }
        Command::Example { name, out } => {
            write_output(out.as_deref(), &cli::cmd_example(&name)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qosc: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qosc: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
