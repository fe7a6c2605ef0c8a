//! `popdiff`: difference-popularity profiles, bound checks and searches
//! over `Z/pZ` from the command line.

/// Writes to stdout; a closed pipe (e.g. `| head`) ends the process quietly.
macro_rules! emit {
    ($($t:tt)*) => { $crate::write_stdout(format_args!($($t)*), false) };
}

macro_rules! emitln {
    () => { $crate::write_stdout(format_args!(""), true) };
    ($($t:tt)*) => { $crate::write_stdout(format_args!($($t)*), true) };
}

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use popdiff_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "popdiff",
    version,
    about = "Exact difference-popularity computations over Z/pZ"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print Δ_A(b) = |(A+b) \ A| for every b.
    Profile(ProfileArgs),
    /// Count nonzero b with Δ_A(b) <= m.
    Census(CensusArgs),
    /// μ_A(B) = max over b in B of Δ_A(b).
    Mu(MuArgs),
    /// Sumset operations and the structural checks built on them.
    Sumset(SumsetArgs),
    /// Evaluate one named inequality on concrete sets.
    Verify(VerifyArgs),
    /// Lift a residue set to the integers through its largest gap.
    Rectify(RectifyArgs),
    /// Run an exhaustive or seeded random campaign.
    Search(SearchArgs),
    /// Summarise a JSONL records file written by `search`.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// Set literal, e.g. `11:0,1,2,3`.
    #[arg(long)]
    set: String,
    /// naive | bitshift | ntt | auto
    #[arg(long, default_value = "auto")]
    backend: String,
    /// human | json | csv
    #[arg(long, default_value = "human")]
    out: String,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Set literal; omit to use the progression given by --p, --d, --n.
    #[arg(long, required_unless_present = "p")]
    set: Option<String>,
    #[arg(long)]
    m: u64,
    /// Modulus of the progression {0, d, ..., (n-1)d}; checks N_m = 2m.
    #[arg(long, requires_all = ["d", "n"], conflicts_with = "set")]
    p: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MuArgs {
    /// The set A (residue or `Z:` literal).
    #[arg(long = "A")]
    a: String,
    /// The set B of shifts.
    #[arg(long = "B")]
    b: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SumsetArgs {
    /// sum | hfold | symclosure | diffset | restricted | cd | freiman | coverap | difsetint
    #[arg(long)]
    op: String,
    #[arg(long = "A")]
    a: String,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long)]
    h: Option<usize>,
    /// Restricted-sum map as `b->a` pairs, e.g. `0->2,1->0`.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// P1 P2 P3 P4 EQ1 L31 L32 T33 L34 T1 T2 T2_CENSUS T51 T52 T53 CD
    #[arg(long)]
    claim: String,
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    /// Positive rational `num/den`.
    #[arg(long, default_value = "1/2")]
    c: String,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated shifts for P1-P3.
    #[arg(long)]
    shifts: Option<String>,
    /// Restricted-sum map; every map B -> A is checked when omitted.
    #[arg(long)]
    tau: Option<String>,
    /// Also print the case analysis for T2.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RectifyArgs {
    #[arg(long)]
    set: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// TOML file with campaign keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Inclusive range `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    prime_range: Option<Vec<u64>>,
    /// exhaustive | random
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// theorem | extended
    #[arg(long)]
    gate: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long, value_delimiter = ',')]
    suites: Vec<String>,
    #[arg(long)]
    min_card: Option<usize>,
    #[arg(long)]
    max_card: Option<usize>,
    #[arg(long)]
    m_max: Option<u64>,
    /// Enumerate every set rather than one per affine orbit.
    #[arg(long)]
    all_sets: bool,
    /// JSONL records file; `<output>.done` holds the completed tasks.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    stop_after: Option<u64>,
    #[arg(long, env = "POPDIFF_THREADS")]
    workers: Option<usize>,
    /// human | json | csv
    #[arg(long, default_value = "human")]
    format: String,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// JSONL records file.
    #[arg(long)]
    input: PathBuf,
    /// human | json | csv
    #[arg(long, default_value = "human")]
    format: String,
}

/// Everything ran; `violation` is set when a theorem-region check failed.
pub struct Completed {
    pub violation: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn write_stdout(args: std::fmt::Arguments<'_>, newline: bool) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let written = out.write_fmt(args).and_then(|()| {
        if newline {
            out.write_all(b"\n")
        } else {
            Ok(())
        }
    });
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing to stdout: {e}");
        std::process::exit(3);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Profile(a) => commands::profile(a),
        Command::Census(a) => commands::census(a),
        Command::Mu(a) => commands::mu(a),
        Command::Sumset(a) => commands::sumset(a),
        Command::Verify(a) => commands::verify(a),
        Command::Rectify(a) => commands::rectify(a),
        Command::Search(a) => commands::search(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(Completed { violation: false }) => ExitCode::SUCCESS,
        Ok(Completed { violation: true }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
