//! Command-line front end: argument definitions and a `run` entry point that
//! returns what to print and the exit code instead of touching the process,
//! so the whole surface is testable in-process.

pub mod commands;
pub mod parse;
pub mod record;

use std::ffi::OsString;
use std::time::Instant;

use binomcensus_core::census::HeshParams;
use binomcensus_core::ff::OracleConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CensusFlags, CommandError, LatticeSpec, EXIT_INVALID, EXIT_OK};
use record::OutputRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "binomcensus",
    version,
    about = "Exact counts of irreducible binomials x^t - a over F_q, checked against bounds and a field oracle"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// N_q(t) and the eligibility branch that applied.
    Nq {
        #[arg(long, value_parser = parse::parse_count)]
        q: u64,
        #[arg(long, value_parser = parse::parse_count)]
        t: u64,
    },
    /// The exact sum over t <= T, with optional strata, bounds and asymptotics.
    Census {
        #[arg(long, value_parser = parse::parse_count)]
        q: u64,
        #[arg(long, value_parser = parse::parse_count)]
        max_t: u64,
        #[arg(long)]
        strata: bool,
        #[arg(long)]
        bounds: bool,
        #[arg(long)]
        asymptotic: bool,
        #[command(flatten)]
        hesh: HeshArgs,
    },
    /// Brute-force cross-check of the formula, the order criterion and the Rabin test.
    Verify {
        #[arg(long, value_parser = parse::parse_count)]
        q: u64,
        #[arg(long, value_parser = parse::parse_count)]
        max_t: u64,
    },
    /// Lattice points of a tetrahedron, given by primes and T or by coefficients and lambda.
    Lattice {
        #[arg(long, value_parser = parse::parse_real_list)]
        coeffs: Option<std::vec::Vec<f64>>,
        #[arg(long, value_parser = parse::parse_count_list)]
        primes: Option<std::vec::Vec<u64>>,
        #[arg(long, value_parser = parse::parse_real)]
        lambda: Option<f64>,
        #[arg(long, value_parser = parse::parse_count)]
        max_t: Option<u64>,
        #[arg(long)]
        bounds: bool,
        /// Index of the coefficient left out of the Lehmer lower bound (default: largest).
        #[arg(long)]
        omit: Option<usize>,
    },
    /// One census row per T, with estimates, ratios and bound margins.
    Sweep {
        #[arg(long, value_parser = parse::parse_count)]
        q: u64,
        #[arg(long, value_parser = parse::parse_count_list)]
        max_t_list: std::vec::Vec<u64>,
        #[command(flatten)]
        hesh: HeshArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct HeshArgs {
    /// Exponent A of the averaged upper bound (q-1) T / (log T)^A.
    #[arg(long, default_value_t = 1.0, value_parser = parse::parse_real)]
    pub hesh_a: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse::parse_real)]
    pub hesh_eps: f64,
}

impl From<HeshArgs> for HeshParams {
    fn from(h: HeshArgs) -> Self {
        HeshParams {
            a: h.hesh_a,
            eps: h.hesh_eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn render(rec: &OutputRecord, format: Format) -> String {
    let mut s = match format {
        Format::Json => rec.to_json(),
        Format::Csv => rec.to_csv(),
        Format::Table => rec.to_table(),
    };
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn dispatch(command: &Command, cfg: &OracleConfig) -> Result<OutputRecord, CommandError> {
    match command {
        Command::Nq { q, t } => commands::nq(*q, *t),
        Command::Census {
            q,
            max_t,
            strata,
            bounds,
            asymptotic,
            hesh,
        } => commands::census(
            *q,
            *max_t,
            &CensusFlags {
                strata: *strata,
                bounds: *bounds,
                asymptotic: *asymptotic,
                hesh: (*hesh).into(),
            },
        ),
        Command::Verify { q, max_t } => commands::verify(*q, *max_t, cfg),
        Command::Lattice {
            coeffs,
            primes,
            lambda,
            max_t,
            bounds,
            omit,
        } => commands::lattice(&LatticeSpec {
            coeffs: coeffs.clone(),
            primes: primes.clone(),
            lambda: *lambda,
            max_t: *max_t,
            bounds: *bounds,
            omit: *omit,
        }),
        Command::Sweep {
            q,
            max_t_list,
            hesh,
        } => commands::sweep(*q, max_t_list, (*hesh).into()),
    }
}

/// Runs with an explicit oracle configuration. `args` includes the program
/// name, as in `std::env::args_os`.
pub fn run_with_config<I, T>(args: I, cfg: &OracleConfig) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_INVALID,
                }
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                }
            };
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let start = Instant::now();
    let result = dispatch(&cli.command, cfg);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let finish = |mut rec: OutputRecord| {
        rec.command = echo.clone();
        rec.wall_time_ms = elapsed;
        rec
    };
    match result {
        Ok(rec) => {
            let rec = finish(rec);
            let stderr = rec
                .flags
                .iter()
                .map(|f| format!("warning: {f}\n"))
                .collect();
            Outcome {
                stdout: render(&rec, cli.format),
                stderr,
                code: EXIT_OK,
            }
        }
        Err(CommandError::Mismatch(rec)) => {
            let rec = finish(*rec);
            Outcome {
                stdout: render(&rec, cli.format),
                stderr: "error: oracle disagrees with the formula; counterexample on stdout\n"
                    .into(),
                code: commands::EXIT_MISMATCH,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}

/// Runs with the oracle configuration taken from the environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_config(args, &OracleConfig::from_env())
}
