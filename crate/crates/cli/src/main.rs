use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod input;
mod run;

#[derive(Parser, Debug)]
#[command(name = "sched", version, about = "Exact combinatorics of scheduling problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Formula given inline
    #[arg(long, conflicts_with = "file")]
    pub expr: Option<String>,
    /// Formula text, or JSON `{"n", "formula"}` / `{"n", "faces"}`
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Number of items; defaults to the largest index used
    #[arg(long)]
    pub n: Option<usize>,
    /// Work with the forbidden configuration instead
    #[arg(long)]
    pub complement: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Recompute with the brute-force oracle and exit 2 on disagreement
    #[arg(long)]
    pub check: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisArg {
    Monomial,
    Fundamental,
    Cofundamental,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    H,
    Hstar,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Unique,
    Backtrack,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Chromatic,
    Order,
    Ppartition,
    Zeta,
    Flats,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Counting polynomial in the binomial and power bases
    Poly {
        #[command(flatten)]
        src: Source,
        /// Largest k compared against the oracle under --check
        #[arg(long, default_value_t = 6)]
        kmax: u64,
    },
    /// Number of k-schedules
    Count {
        #[command(flatten)]
        src: Source,
        #[arg(long, required_unless_present = "kmax")]
        k: Option<u64>,
        /// Tabulate k = 0..=kmax instead
        #[arg(long)]
        kmax: Option<u64>,
    },
    /// h- or h*-vector
    Hvec {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = Which::H)]
        which: Which,
    },
    /// Quasisymmetric expansion
    Qsym {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = BasisArg::Monomial)]
        basis: BasisArg,
    },
    /// Non-commutative quasisymmetric expansion
    Ncqsym {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = BasisArg::Monomial)]
        basis: BasisArg,
    },
    /// Cells of a decision tree with their analysis
    Cells {
        #[command(flatten)]
        src: Source,
    },
    /// Interval partition of the allowed configuration
    Partition {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = Method::Backtrack)]
        method: Method,
    },
    /// Compile a classical object into a scheduling problem
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// JSON description of the graph, poset, lattice or matroid
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Cross-check everything against the oracle, or check a given partition
    Verify {
        #[command(flatten)]
        src: Source,
        /// JSON list of `{"lower", "upper"}` intervals
        #[arg(long)]
        partition: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
