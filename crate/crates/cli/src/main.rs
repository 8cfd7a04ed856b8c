//! `reslab`: band structure, states and inverse reconstruction from JSON.

mod commands;
mod files;
mod json;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::{Method, Suite};
use files::{ProblemFile, StatesFile};

#[derive(Parser)]
#[command(name = "reslab", version, about = "Resonances of finitely perturbed periodic Jacobi operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band edges, gaps and the states of the periodic background.
    Bands {
        /// Problem file; stdin when omitted.
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// States, constants and Jost polynomials of a perturbed operator.
    Direct {
        input: Option<PathBuf>,
        /// Gate on the relative residual of polynomial roots.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write lambda, F and S samples for plotting.
        #[arg(long)]
        dump_grid: Option<PathBuf>,
    },
    /// Recover the perturbation from a states file.
    Inverse {
        /// States file; stdin when omitted.
        input: Option<PathBuf>,
        /// Problem file holding the background.
        #[arg(long)]
        background: PathBuf,
        #[arg(long, value_enum, default_value = "glm")]
        method: Method,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity, oracle and round-trip suites.
    Check {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Finite-section size for the oracle suite.
        #[arg(long, default_value_t = 2000)]
        sections: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Lib(reslab::Error),
}

impl From<reslab::Error> for CliError {
    fn from(e: reslab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        use reslab::Error as E;
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) => 1,
            CliError::Lib(e) => match e {
                E::InvalidBackground(_) => 2,
                E::Ambiguous(_) => 3,
                E::InvalidPerturbation(_) | E::ClassViolation(_) => 4,
                E::InverseGate(_) => 5,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) => format!("parse error: {m}"),
            CliError::Io(m) => format!("i/o error: {m}"),
            CliError::Lib(e @ (reslab::Error::InvalidPerturbation(_) | reslab::Error::ClassViolation(_))) => {
                format!("not in X_nu: {e}")
            }
            CliError::Lib(e) => e.to_string(),
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(s)
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn read_problem(path: Option<&PathBuf>) -> Result<ProblemFile, CliError> {
    let problem: ProblemFile = parse(&read_input(path)?)?;
    match problem.schema_errors() {
        Some(m) => Err(CliError::Parse(m)),
        None => Ok(problem),
    }
}

fn write_output<T: Serialize>(value: &T, path: Option<&PathBuf>) -> Result<(), CliError> {
    let text = json::to_string(value).map_err(|e| CliError::Io(e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Runs the command; `Ok(false)` means a check suite ran but failed.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Bands { input, out } => {
            let problem: ProblemFile = parse(&read_input(input.as_ref())?)?;
            if problem.a0.len() != problem.q || problem.b0.len() != problem.q {
                return Err(CliError::Parse(format!("q = {} does not match a0 and b0", problem.q)));
            }
            write_output(&commands::bands(&problem)?, out.as_ref())?;
        }
        Command::Direct {
            input,
            tol,
            out,
            dump_grid,
        } => {
            let problem = read_problem(input.as_ref())?;
            let (states, jost) = commands::direct(&problem, tol)?;
            write_output(&states, out.as_ref())?;
            if let Some(path) = dump_grid {
                write_output(&commands::grid(&jost, 801), Some(&path))?;
            }
        }
        Command::Inverse {
            input,
            background,
            method,
            tol,
            out,
        } => {
            let states: StatesFile = parse(&read_input(input.as_ref())?)?;
            if let Some(m) = states.schema_errors() {
                return Err(CliError::Parse(m));
            }
            let problem: ProblemFile = parse(&read_input(Some(&background))?)?;
            let bg = problem.background()?;
            write_output(&commands::inverse(&states, &bg, method, tol)?, out.as_ref())?;
        }
        Command::Check {
            input,
            suite,
            sections,
            out,
        } => {
            let problem = read_problem(input.as_ref())?;
            let (report, passed) = commands::check(&problem, suite, sections, reslab::sample::env_seed())?;
            write_output(&report, out.as_ref())?;
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("reslab: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
