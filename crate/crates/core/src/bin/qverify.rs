//! Command-line front end: runs the verification suites and prints a JSON
//! report on stdout, with a human-readable summary on stderr.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qverify::cli::{
    run_check_complementary, run_check_mub, run_check_qkd, run_mean_king, FamilySource,
    MeanKingArgs, MeanKingMode, Report,
};
use qverify::families::Method;
use qverify::qkd::QkdProtocol;

#[derive(Parser)]
#[command(
    name = "qverify",
    version,
    about = "Exact verification of complementary families, quantum key distribution and the Mean King problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Include wall-clock timing in the JSON report (breaks byte-for-byte
    /// reproducibility).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Args)]
struct TolArg {
    /// Absolute tolerance for every comparison.
    #[arg(long, env = "VERIFIER_TOL", default_value_t = qverify::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct SourceArgs {
    /// Use the shipped basis family of this dimension.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    dim: Option<usize>,

    /// Load the family from a file (`dim m count N` header, then one basis
    /// vector per line as "re im" pairs).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> FamilySource {
        match (&self.dim, &self.file) {
            (Some(n), None) => FamilySource::Dim(*n),
            (None, Some(p)) => FamilySource::File(p.clone()),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify unitarity and pairwise unbiasedness of the shipped basis
    /// family for a dimension.
    CheckMub {
        /// Hilbert space dimension (2, 3, 4, 5, 7, 8 or 9).
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        tol: TolArg,
    },

    /// Run the complementarity characterizations on a family.
    CheckComplementary {
        #[command(flatten)]
        source: SourceArgs,
        /// Characterization to run: all, direct, doubled, alpha, reflected or
        /// controlled4.
        #[arg(long, default_value = "all")]
        method: String,
        #[command(flatten)]
        tol: TolArg,
    },

    /// Check the key-distribution equations on a family.
    CheckQkd {
        /// Protocol: bb84, e91 or both.
        #[arg(long, default_value = "both")]
        protocol: String,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArg,
    },

    /// Build, verify or simulate a Mean King scheme.
    MeanKing {
        /// Hilbert space dimension (2, 3, 4, 5, 7, 8 or 9).
        #[arg(long)]
        dim: usize,
        /// construct, verify or simulate.
        #[arg(long, default_value = "verify")]
        mode: String,
        /// King's basis index (simulate mode).
        #[arg(long)]
        basis: Option<usize>,
        /// King's outcome (simulate mode).
        #[arg(long)]
        outcome: Option<usize>,
        /// Corrupt one lookup entry to exercise the failure paths.
        #[arg(long)]
        corrupt_lookup: bool,
        #[command(flatten)]
        tol: TolArg,
    },
}

fn run(command: &Command) -> qverify::Result<Report> {
    match command {
        Command::CheckMub { dim, tol } => run_check_mub(*dim, tol.tol),
        Command::CheckComplementary {
            source,
            method,
            tol,
        } => {
            let methods: Vec<Method> = if method == "all" {
                Method::ALL.to_vec()
            } else {
                vec![method.parse()?]
            };
            run_check_complementary(&source.source(), &methods, tol.tol)
        }
        Command::CheckQkd {
            protocol,
            source,
            tol,
        } => {
            let protocols: Vec<QkdProtocol> = if protocol == "both" {
                vec![QkdProtocol::Bb84, QkdProtocol::E91]
            } else {
                vec![protocol.parse()?]
            };
            run_check_qkd(&protocols, &source.source(), tol.tol)
        }
        Command::MeanKing {
            dim,
            mode,
            basis,
            outcome,
            corrupt_lookup,
            tol,
        } => {
            let args = MeanKingArgs {
                n: *dim,
                mode: mode.parse::<MeanKingMode>()?,
                basis: *basis,
                outcome: *outcome,
                corrupt_lookup: *corrupt_lookup,
            };
            run_mean_king(&args, tol.tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli.command) {
        Ok(mut report) => {
            if cli.timings {
                report.wall_time_ms = Some(started.elapsed().as_millis() as u64);
            }
            println!("{}", report.to_json());
            if !cli.quiet {
                eprint!("{}", report.summary());
                if cli.timings {
                    eprintln!("wall time: {} ms", started.elapsed().as_millis());
                }
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
