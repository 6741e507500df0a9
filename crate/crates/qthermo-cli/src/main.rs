//! Command-line front end for the certification library. Five subcommands:
//! `certify` one state across one cut, `sweep` a parameter grid, `threshold`
//! a lambda family, `simulate` a gate program, and `oracle` for the random
//! test batteries. Exit codes: 0 success, 2 bad input, 3 numerical failure,
//! 4 oracle-suite failure.

mod oracle;
mod output;
mod resolve;
mod simulate;
mod sweep;
mod threshold;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qthermo::cert::{certify, CertificationReport};

use crate::output::{write_records, Format};
use crate::resolve::{parse_partition, resolve_system, resolve_unit, Family};

/// A failed run, tagged by the stage that failed so `main` can pick the
/// exit code. Input covers everything the user supplied: flags, files,
/// state/system compatibility. Compute covers numerical work that started
/// from valid input. Oracle marks red suites in the oracle batteries.
pub enum Failure {
    Input(String),
    Compute(String),
    Oracle(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
            Failure::Oracle(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Compute(m) | Failure::Oracle(m) => m,
        }
    }
}

pub fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

pub fn compute_err(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "qthermo",
    version,
    about = "Entanglement certification from extractable work in spin registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify one state across one cut and emit the full report
    Certify(CertifyArgs),
    /// Tabulate gap and bounds over a parameter grid
    Sweep(sweep::SweepArgs),
    /// Solve detection thresholds of a lambda family by bisection
    Threshold(threshold::ThresholdArgs),
    /// Run a gate program and report snapshot energies and fidelities
    Simulate(simulate::SimulateArgs),
    /// Run the randomized oracle batteries and summarize pass/fail
    Oracle(oracle::OracleArgs),
}

/// Flags shared by every report-writing command.
#[derive(Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CertifyArgs {
    /// Named system (NAFP, BRTP, FAN, TMP, DBFM, identical:<n>:<gap>),
    /// a config file path, or path#name for a multi-system config file
    #[arg(long)]
    system: String,
    /// State family to build from parameters
    #[arg(long, value_enum, conflicts_with = "state")]
    family: Option<Family>,
    /// Matrix file holding the state instead of a family
    #[arg(long)]
    state: Option<PathBuf>,
    /// First preparation angle (bell-diag)
    #[arg(long)]
    beta: Option<f64>,
    /// Second preparation angle (bell-diag)
    #[arg(long)]
    gamma: Option<f64>,
    /// Mixing parameter (werner, noisy-ghz)
    #[arg(long)]
    lambda: Option<f64>,
    /// Qubits on the near side of the cut, comma-separated
    #[arg(long, default_value = "1")]
    partition: String,
    /// Energy unit for the report: MHz or the system's reference gap name
    #[arg(long)]
    units: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn cmd_certify(args: CertifyArgs) -> Result<(), Failure> {
    let sys = resolve_system(&args.system)?;
    let part = parse_partition(&args.partition, sys.h.qubit_count())?;
    let unit = resolve_unit(args.units.as_deref(), &sys)?;

    let rho = match (&args.family, &args.state) {
        (Some(family), None) => {
            family.build(&sys.h, args.beta, args.gamma, args.lambda)?
        }
        (None, Some(path)) => {
            let file = std::fs::File::open(path).map_err(input_err)?;
            let mut reader = std::io::BufReader::new(file);
            let rho = qthermo::states::read_matrix(&mut reader).map_err(input_err)?;
            if rho.qubit_count() != sys.h.qubit_count() {
                return Err(Failure::Input(format!(
                    "state file holds {} qubits but system {} has {}",
                    rho.qubit_count(),
                    sys.label,
                    sys.h.qubit_count()
                )));
            }
            rho
        }
        _ => {
            return Err(Failure::Input(
                "exactly one of --family or --state must be given".into(),
            ))
        }
    };

    let report: CertificationReport =
        certify(&rho, &sys.h, &part, (&unit.0, unit.1)).map_err(compute_err)?;
    write_records(&[report], args.output.format, args.output.out.as_deref())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Certify(args) => cmd_certify(args),
        Cmd::Sweep(args) => sweep::cmd_sweep(args),
        Cmd::Threshold(args) => threshold::cmd_threshold(args),
        Cmd::Simulate(args) => simulate::cmd_simulate(args),
        Cmd::Oracle(args) => oracle::cmd_oracle(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
