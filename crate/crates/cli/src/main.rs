use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jacarith::ffield::{FieldCache, DEFAULT_CAP};
use jacarith_cli::{run, Command, InstanceParams, Options};

#[derive(Parser)]
#[command(name = "jacarith", version, about = "Exact arithmetic of y^r = x^(r-1)(x+1)(x+u^d) over F_q(u)")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// L-function by closed form and by point counting
    Lfunction(Flags),
    /// Analytic rank, rank formula and descent bound
    Rank(Flags),
    /// Height pairing and discriminants
    Heights(Flags),
    /// Torsion and free rank of R/I
    Module(Flags),
    /// Explicit points and the (x - T) descent
    Descent(Flags),
    /// Local invariants and the BSD identity
    Bsd(Flags),
    /// Primes of Λ and predicted monodromy
    Monodromy(Flags),
    /// Every applicable check
    Report(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    ell: Option<u64>,
    /// Number of point-count terms used for the series
    #[arg(long)]
    max_n: Option<u32>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Print the subcommand's table as CSV instead of JSON
    #[arg(long)]
    csv: bool,
    #[arg(long, env = "JACARITH_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Largest field size for which a full log table is built
    #[arg(long, default_value_t = DEFAULT_CAP)]
    field_cap: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, f) = match cli.command {
        Sub::Lfunction(f) => (Command::Lfunction, f),
        Sub::Rank(f) => (Command::Rank, f),
        Sub::Heights(f) => (Command::Heights, f),
        Sub::Module(f) => (Command::Module, f),
        Sub::Descent(f) => (Command::Descent, f),
        Sub::Bsd(f) => (Command::Bsd, f),
        Sub::Monodromy(f) => (Command::Monodromy, f),
        Sub::Report(f) => (Command::Report, f),
    };
    let outcome = InstanceParams::new(f.p, f.q, f.r, f.d, f.ell).and_then(|params| {
        let opts = Options { max_n: f.max_n, fields: FieldCache::new(f.field_cap, f.cache_dir) };
        run(cmd, &params, &opts)
    });
    match outcome {
        Ok(report) => {
            let text = if f.csv { report.to_csv() } else { report.to_json_string() + "\n" };
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                eprintln!("jacarith: some checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("jacarith: {e}");
            ExitCode::from(2)
        }
    }
}
