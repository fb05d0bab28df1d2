use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use speclift::cli::{self, Command, Options};
use speclift::files::{parse_reading, ToleranceOverrides};

/// Solvability checks and constructive liftings for the spectral
/// Nevanlinna-Pick lifting problem.
#[derive(Parser)]
#[command(name = "speclift", version, about)]
struct CliArgs {
    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Args)]
struct CommonArgs {
    /// Instance file (JSON, schema 1).
    #[arg(long)]
    input: PathBuf,
    /// Report destination; stdout when omitted. Written atomically.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for every randomized path.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative rank threshold override.
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Eigenvalue clustering distance override.
    #[arg(long)]
    cluster_tol: Option<f64>,
    /// Consistency/verification tolerance override.
    #[arg(long)]
    verify_tol: Option<f64>,
    /// Jet noise cutoff override.
    #[arg(long)]
    jet_epsilon: Option<f64>,
    /// Criterion reading: "grouped" (default) or "per-block".
    #[arg(long)]
    reading: Option<String>,
    /// Disc sample count for verification and membership sweeps.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Symmetrized-polydisc coordinates of every matrix.
    Project(CommonArgs),
    /// Spectral-ball and symmetrized-polydisc membership with margins.
    Membership(CommonArgs),
    /// Jordan structure of one matrix.
    Jordan {
        #[command(flatten)]
        common: CommonArgs,
        /// Index into the instance's matrix list.
        #[arg(long)]
        matrix: usize,
    },
    /// Minimal-generator sequence of one matrix.
    Dseq {
        #[command(flatten)]
        common: CommonArgs,
        /// Index into the instance's matrix list.
        #[arg(long)]
        matrix: usize,
    },
    /// Local lifting criterion at one node.
    CheckLocal {
        #[command(flatten)]
        common: CommonArgs,
        /// Node index.
        #[arg(long)]
        node: usize,
    },
    /// Lifting criterion at every node; solvable iff all pass.
    CheckGlobal(CommonArgs),
    /// Construct a lifting (all targets must be cyclic) and verify it.
    Lift(CommonArgs),
    /// Shear path connecting two similar matrices of the instance.
    Connect {
        #[command(flatten)]
        common: CommonArgs,
        /// Source matrix index.
        #[arg(long)]
        i: usize,
        /// Target matrix index.
        #[arg(long)]
        j: usize,
    },
    /// Verify a lifting payload against the instance.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Lifting payload or lift report file.
        #[arg(long)]
        lifting: PathBuf,
    },
}

fn split(arg: CommandArg) -> (CommonArgs, Command) {
    match arg {
        CommandArg::Project(c) => (c, Command::Project),
        CommandArg::Membership(c) => (c, Command::Membership),
        CommandArg::Jordan { common, matrix } => (common, Command::Jordan { matrix }),
        CommandArg::Dseq { common, matrix } => (common, Command::Dseq { matrix }),
        CommandArg::CheckLocal { common, node } => (common, Command::CheckLocal { node }),
        CommandArg::CheckGlobal(c) => (c, Command::CheckGlobal),
        CommandArg::Lift(c) => (c, Command::Lift),
        CommandArg::Connect { common, i, j } => (common, Command::Connect { i, j }),
        CommandArg::Verify { common, lifting } => (common, Command::Verify { lifting }),
    }
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    let (common, command) = split(args.command);

    let reading = match common.reading.as_deref().map(parse_reading).transpose() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error [invalid-argument]: {e}");
            return ExitCode::from(2);
        }
    };

    let opts = Options {
        command,
        input: common.input,
        output: common.output,
        seed: common.seed,
        tolerances: ToleranceOverrides {
            rank_tol: common.rank_tol,
            cluster_tol: common.cluster_tol,
            verify_tol: common.verify_tol,
            jet_epsilon: common.jet_epsilon,
        },
        reading,
        samples: common.samples,
    };

    let outcome = cli::execute(&opts);
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    if let Some(report) = &outcome.report {
        let text = cli::report_json(report);
        match &opts.output {
            Some(path) => {
                if let Err(e) = cli::write_output(path, &text) {
                    eprintln!("error [io]: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            None => println!("{text}"),
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
