//! `lcltrees`: classify and solve LCL problems on Δ-regular trees.
//!
//! Exit codes: 0 success, 1 definitive negative answer, 2 input error,
//! 3 inconclusive within the budget.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "lcltrees", version, about = "Classify and solve LCL problems on bounded-degree trees")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an ℓ-full subset of the vertex configurations.
    Classify(ClassifyArgs),
    /// Label a tree from an ℓ-full subset.
    Solve(SolveArgs),
    /// Check a labeling against a problem.
    Verify(VerifyArgs),
    /// Generate a random or structured tree.
    Gen(GenArgs),
    /// Dump the rake-and-compress layers of a tree.
    Decompose(DecomposeArgs),
    /// Census of rooted and bipolar tree classes.
    Classes(ClassesArgs),
    /// Brute-force reference answers.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Maximum number of subsets examined.
    #[arg(long, env = "LCLTREES_BUDGET", default_value_t = 1 << 20)]
    pub budget: u64,
    /// Also write the report as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub tree: PathBuf,
    /// Subset file: a JSON array of configurations (arrays of label names),
    /// or a classification report.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    /// ℓ for the subset; defaults to its minimal ℓ.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Use the toast algorithm with this q instead of rake-and-compress.
    #[arg(long)]
    pub toast: Option<usize>,
    /// Nesting levels of the toast balls.
    #[arg(long, default_value_t = 3)]
    pub toast_levels: usize,
    /// Write the labeling here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Subset search budget when no subset is given.
    #[arg(long, env = "LCLTREES_BUDGET", default_value_t = 1 << 20)]
    pub budget: u64,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub labeling: PathBuf,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub delta: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// uniform, path, star, caterpillar or balanced.
    #[arg(long, default_value = "uniform")]
    pub model: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub gamma: usize,
    /// Compress threshold of the raw process.
    #[arg(long, default_value_t = 4)]
    pub ell: usize,
    /// Block size for post-processing; defaults to `ell - 1`.
    #[arg(long)]
    pub ell_prime: Option<usize>,
}

#[derive(Args)]
pub struct ClassesArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop the bipolar closure after this many classes.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exhaustive search for a labeling.
    Solve(OracleSolveArgs),
    /// Exhaustive path connectivity check.
    Connects(OracleConnectsArgs),
}

#[derive(Args)]
pub struct OracleSolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub tree: PathBuf,
    /// Search nodes before giving up.
    #[arg(long, env = "LCLTREES_BUDGET", default_value_t = 20_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 24)]
    pub max_vertices: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct OracleConnectsArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Subset file as for `solve`; defaults to all configurations.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long)]
    pub a1: String,
    /// Configuration as comma-separated label names, e.g. `M,U,U`.
    #[arg(long)]
    pub c1: String,
    #[arg(long)]
    pub a2: String,
    #[arg(long)]
    pub c2: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, env = "LCLTREES_BUDGET", default_value_t = 20_000_000)]
    pub budget: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fmt = cli.format;
    let result = match cli.command {
        Command::Classify(a) => commands::classify(&a, fmt),
        Command::Solve(a) => commands::solve(&a, fmt),
        Command::Verify(a) => commands::verify(&a, fmt),
        Command::Gen(a) => commands::gen(&a),
        Command::Decompose(a) => commands::decompose(&a, fmt),
        Command::Classes(a) => commands::classes(&a, fmt),
        Command::Oracle(OracleCommand::Solve(a)) => commands::oracle_solve(&a, fmt),
        Command::Oracle(OracleCommand::Connects(a)) => commands::oracle_connects(&a, fmt),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
