//! `csf-lab`: profile integration, construction, flow runs and barrier
//! verification from the command line.

mod construct;
mod evolve;
mod out;
mod verify;
mod yinyang;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "csf-lab", version, about = "Yin-Yang soliton, admissible curves and barrier checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the Yin-Yang profile and check its identities.
    Yinyang(yinyang::Flags),
    /// Build an admissible curve at an anchor arclength.
    Construct(construct::Flags),
    /// Run the flow on a benchmark or an admissible curve with monitors.
    Evolve(evolve::Flags),
    /// Endpoint grid, operator identity and truncation-order checks.
    Verify(verify::Flags),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON file with parameters for this command (flags take precedence).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "csf-out")]
    pub out: PathBuf,
    /// Format of the curve/profile artifacts. Reports are always JSON.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad parameters or unreadable config: exit 2.
    Config(String),
    /// A check did not hold: exit 1.
    Verification { message: String, details: serde_json::Value },
    /// A module gave up (construction, flow, I/O): exit 1.
    Module(ancient_csf::Error),
}

impl From<ancient_csf::Error> for Failure {
    fn from(e: ancient_csf::Error) -> Self {
        match e {
            ancient_csf::Error::InvalidParameter { .. } => Failure::Config(e.to_string()),
            e => Failure::Module(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Module(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Module(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Module(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

/// Parameters: the file (if any) over the defaults. Flags are applied by
/// the caller afterwards.
pub fn load_params<P: DeserializeOwned + Default>(path: Option<&Path>) -> Result<P, Failure> {
    let Some(path) = path else {
        return Ok(P::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result) = match cli.command {
        Command::Yinyang(f) => ("yinyang", yinyang::run(f)),
        Command::Construct(f) => ("construct", construct::run(f)),
        Command::Evolve(f) => ("evolve", evolve::run(f)),
        Command::Verify(f) => ("verify", verify::run(f)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, kind, message, details) = match f {
                Failure::Config(m) => (2, "config", m, serde_json::Value::Null),
                Failure::Verification { message, details } => (1, "verification", message, details),
                Failure::Module(e) => (1, "module", e.to_string(), serde_json::Value::Null),
            };
            let err = serde_json::json!({
                "command": name,
                "error": kind,
                "message": message,
                "details": details,
            });
            eprintln!("{err}");
            ExitCode::from(code)
        }
    }
}
