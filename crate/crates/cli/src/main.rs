mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bvlab_core::limits::{DEFAULT_MAX_EXPANSION, DEFAULT_MAX_VARS};
use bvlab_core::Limits;
use clap::{Parser, Subcommand, ValueEnum};

use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "bvlab", version, about = "Boolean-valued forcing laboratory")]
struct Cli {
    /// Seed for every generated instance.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Largest variable count for exhaustive work (at most 20).
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VARS)]
    max_n: u32,
    /// Expansion budget for quantifier unfolding and search.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_EXPANSION)]
    budget: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and dump its syntax tree.
    Parse { formula: String },
    /// Translate a Sigma^B_0 formula into a circuit and check it exhaustively.
    Translate {
        formula: String,
        /// Numbers and string lengths, e.g. `X=3,Y=2,x=1`.
        #[arg(long, default_value = "")]
        bounds: String,
    },
    /// Boolean value of a formula over generic or seeded strings.
    Bval {
        formula: String,
        #[arg(long, default_value = "")]
        bounds: String,
        /// Use seeded random strings over this many variables.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Compare truth in M[G] with membership of the Boolean value in G, at every point generic.
    ForceCheck {
        formula: String,
        #[arg(long, default_value = "")]
        bounds: String,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Build and check the MCV value string on seeded instances.
    Mcv {
        #[arg(long, default_value_t = 6)]
        a: usize,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Least witnesses by binary search at every assignment of the string bits.
    Witness {
        matrix: String,
        #[arg(long, default_value = "")]
        bounds: String,
        #[arg(long, default_value = "Z")]
        z: String,
        /// Witnesses have length below this bound.
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 0)]
        x: u64,
    },
    /// Check an EF proof.
    EfCheck {
        proof: PathBuf,
        /// Companion circuit file; defaults to the proof path with extension `circ`.
        #[arg(long)]
        circuits: Option<PathBuf>,
    },
    /// Check an EF(S) proof against a premise file.
    EfsCheck {
        proof: PathBuf,
        #[arg(long)]
        circuits: Option<PathBuf>,
        /// Circuit file with one OUTPUT line per premise.
        #[arg(long)]
        premises: PathBuf,
    },
    /// Check a WF proof.
    WfCheck {
        proof: PathBuf,
        #[arg(long)]
        circuits: Option<PathBuf>,
    },
    /// Search for a refutation of a premise set up to total size `l`.
    Consistency {
        premises: PathBuf,
        #[arg(long, default_value_t = 200)]
        l: usize,
    },
    /// Evaluate a randomized circuit at every assignment.
    Randeval {
        circuit: PathBuf,
        /// Treat an undefined value as a failure.
        #[arg(long)]
        require_resolved: bool,
    },
    /// Range-avoidance counting for a seeded family F : 2^a -> 2^2a.
    DwphpRange {
        #[arg(long)]
        a: u32,
        #[arg(long, default_value = "random")]
        family: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
    },
    /// Surjection check and the induced set of tautologies.
    DwphpEmbed {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Circuit file with the C_i as OUTPUT lines; seeded when omitted.
        #[arg(long)]
        c: Option<PathBuf>,
        /// Circuit file with the D_j as OUTPUT lines; seeded when omitted.
        #[arg(long)]
        d: Option<PathBuf>,
    },
    /// Run the full acceptance battery.
    Suite,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let limits = match Limits::new(cli.max_n, cli.budget) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let records = match commands::run(&cli.command, cli.seed, &limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = Report::new(
        argv[1..].to_vec(),
        cli.seed,
        records,
        start.elapsed().as_millis() as u64,
    );
    if let Err(e) = report.emit(cli.format == Format::Json, cli.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
