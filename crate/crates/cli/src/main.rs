mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_TIMEOUT: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pancake", version, about = "Colorings of pancake graphs P_n")]
pub struct Cli {
    /// Print the run report as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for edge streaming and search portfolios
    /// [default: available parallelism].
    #[arg(long, global = true, env = "PANCAKE_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Upper and lower bounds on the chromatic number.
    Bounds { n: u64 },
    /// Build a coloring and write it in coloring-file format.
    Color(ColorArgs),
    /// Check a coloring file or a built-in coloring.
    Verify(VerifyArgs),
    /// Efficient dominating sets D_i and D_i^j.
    Domsets(DomsetsArgs),
    /// The quotient graph Q_n in DIMACS format and its coloring.
    Quotient {
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chromatic number by exhaustive search (n <= 7).
    ExactChi {
        n: usize,
        /// Seconds.
        #[arg(long, default_value_t = 600.0)]
        timeout: f64,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Look for a k-coloring.
    Search(SearchArgs),
    /// Write P_n in DIMACS edge format (vertex id = rank + 1).
    ExportDimacs {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Parity-based 4-coloring, n in 5..=7.
    Parity4,
    /// Block composition along the first element; see --blocks.
    Compose,
    /// Equitable (n-1)-coloring lifted from Q_n.
    #[value(name = "equitable-nm1")]
    EquitableNm1,
    /// Color = first element.
    FirstElement,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Parity4 => "parity4",
            Method::Compose => "compose",
            Method::EquitableNm1 => "equitable-nm1",
            Method::FirstElement => "first-element",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BuiltinArgs {
    /// Block sizes for compose, e.g. 7,3.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Vec<usize>,
    /// Coloring file used as the base for blocks of its size (repeatable).
    #[arg(long)]
    pub base: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ColorArgs {
    pub n: usize,
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub builtin: BuiltinArgs,
    /// Verify properness and class sizes over every edge.
    #[arg(long)]
    pub verify: bool,
    /// Coloring file to write; standard output if omitted (table mode only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub n: usize,
    /// Coloring file.
    pub file: Option<PathBuf>,
    /// Verify a built-in coloring instead of a file.
    #[arg(long, value_enum, conflicts_with = "file")]
    pub builtin: Option<Method>,
    #[command(flatten)]
    pub builtin_args: BuiltinArgs,
    /// Also check whether the coloring is perfect.
    #[arg(long)]
    pub perfect: bool,
}

#[derive(Args, Debug)]
pub struct DomsetsArgs {
    pub n: usize,
    /// First element i of D_i.
    #[arg(long, short = 'i')]
    pub first: Option<u8>,
    /// Last element j: check D_i^j inside the copy P_{n-1}(j).
    #[arg(long, short = 'j', requires = "first")]
    pub last: Option<u8>,
    /// Check that the D_i^j partition the vertex set.
    #[arg(long)]
    pub partition: bool,
    /// Write the members here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Heuristic,
    Complete,
    /// Tabu search on the orbit graph of the order-21 relabelling group (n ≥ 7).
    Invariant,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    pub n: usize,
    #[arg(short = 'k', long)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    #[arg(long, value_enum, default_value_t = Mode::Heuristic)]
    pub mode: Mode,
    /// Independent tabu runs with seeds seed, seed+1, … [default: threads].
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli
        .threads
        .map(usize::from)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("pancake: {e}");
        return ExitCode::from(EXIT_FAILED);
    }
    match commands::run(&cli, argv, threads) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pancake: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
