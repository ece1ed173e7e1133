mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cnz_core::oracle::DEFAULT_GRID_LIMIT;
use cnz_core::puzzle::DEFAULT_EXHAUSTIVE_BUDGET;
use cnz_core::ErrorClass;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "cnz",
    version,
    about = "Nullstellensatz and Schwartz-Zippel bounds, checked by brute force"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Coefficient ring: fp:<p>, int or zmod:<m>. Defaults to int, or fp:101 for pit.
    #[arg(long, global = true)]
    pub ring: Option<String>,

    /// Grid file: one line per variable, elements separated by commas.
    #[arg(long, global = true)]
    pub grid: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for grid enumeration and search; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest grid that will be enumerated.
    #[arg(long = "limit-grid", global = true, default_value_t = DEFAULT_GRID_LIMIT as u64)]
    pub limit_grid: u64,

    /// Variable names in index order, comma separated. Inferred from the input when absent.
    #[arg(long, global = true, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Which monomial conditions hold for the polynomial.
    Analyze { poly: PathBuf },
    /// Every applicable lower bound on the number of grid nonzeros.
    Bounds { poly: PathBuf },
    /// Count nonzeros on the grid and check every bound against the count.
    Verify {
        poly: PathBuf,
        #[arg(long)]
        list_zeros: bool,
    },
    /// Reduce the polynomial modulo the vanishing polynomials of the grid.
    Trim { poly: PathBuf },
    /// Recover a coefficient from grid values alone.
    Coeff {
        poly: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        monomial: Vec<u32>,
    },
    /// Randomized identity test of two expressions.
    Pit {
        expr1: String,
        expr2: String,
        /// Size of the per-variable sample set {0, ..., s-1}.
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Search for tables with many agreements between products and sums.
    Puzzle {
        #[command(subcommand)]
        mode: PuzzleMode,
    },
    /// The extremal product polynomial for the grid and degrees.
    Tightness {
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PuzzleMode {
    Exhaustive {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        range: i64,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BUDGET as u64)]
        budget: u64,
    },
    Local {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 30)]
        range: i64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(cnz_core::Error),
    Io(String),
    Usage(String),
}

impl From<cnz_core::Error> for CliError {
    fn from(e: cnz_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn class(&self) -> ErrorClass {
        match self {
            CliError::Core(e) => e.class(),
            _ => ErrorClass::Usage,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(m) | CliError::Usage(m) => m.clone(),
        }
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Hypothesis => 2,
        ErrorClass::Resource => 3,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Usage => "usage",
        ErrorClass::Hypothesis => "hypothesis",
        ErrorClass::Resource => "resource",
    }
}

fn report_error(err: &CliError, format: Format) -> ExitCode {
    let class = err.class();
    let code = exit_code(class);
    match format {
        Format::Json => {
            let obj = json!({
                "schema": 1,
                "error": {
                    "kind": err.kind(),
                    "class": class_name(class),
                    "exit_code": code,
                    "message": err.message(),
                }
            });
            eprintln!("{}", serde_json::to_string_pretty(&obj).unwrap());
        }
        Format::Text => eprintln!("error ({}): {}", err.kind(), err.message()),
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text_mode = std::env::args().any(|a| a == "text" || a == "--format=text");
            let format = if text_mode {
                Format::Text
            } else {
                Format::Json
            };
            return report_error(
                &CliError::Usage(e.to_string().trim_end().to_string()),
                format,
            );
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return report_error(
                &CliError::Usage("--threads must be at least 1".into()),
                cli.format,
            );
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return report_error(&CliError::Usage(e.to_string()), cli.format);
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(e) => report_error(&e, cli.format),
    }
}
