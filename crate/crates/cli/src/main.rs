mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::report::Timings;

/// Decision procedures for finite presheaf toposes.
#[derive(Debug, Parser)]
#[command(name = "dectopos", version)]
pub struct Cli {
    /// Catalog name or path to a `.cat` file. Defaults to the base named by a
    /// `.psh` object file, else `refgraph`.
    #[arg(long, global = true)]
    pub base: Option<String>,

    /// Stage-size bound for corpus enumeration: one number, or one per object.
    #[arg(long, global = true, default_value = "3")]
    pub bound: String,

    /// Object to inspect: `builtin:NAME`, `corpus:BOUND:INDEX` or a `.psh` path.
    #[arg(long, global = true)]
    pub object: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for corpus evaluation.
    #[arg(long, global = true, env = "DECTOPOS_JOBS")]
    pub jobs: Option<usize>,

    /// Largest intermediate set the engine may build.
    #[arg(long, global = true)]
    pub size_cap: Option<usize>,

    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    /// `X → 1`.
    Terminal,
    /// `X → ΠX`.
    PiUnit,
    /// `X → M(X)`.
    Separated,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
    Lemma,
    Props,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the Nullstellensatz and cross-check it against the corpus.
    CheckNs,
    /// Is the object decidable?
    Decidable,
    /// Compute Π of the object.
    Pi,
    /// Is the object connected?
    Connected,
    /// Count complemented subobjects of the object.
    Subc,
    /// Decide whether a map out of the object has pneumoconnected fibers.
    Pneumo {
        #[arg(long, value_enum, default_value_t = MapArg::Terminal)]
        map: MapArg,
    },
    /// Decidable quotient uniqueness, for the object or over the corpus.
    CheckDqo,
    /// Decidable subobject uniqueness, for the object or over the corpus.
    CheckDso,
    /// Compare both sides of the criterion for dec(E) to be a topos.
    DecTopos,
    /// Build the adjoint string and check the precohesion conditions.
    Precohesion,
    /// Run a theorem harness over the corpus.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Search the corpus for a counterexample to a registered property.
    SearchCounterexample { property: String },
    /// List the built-in bases.
    Catalog {
        /// Write `.cat` and sample `.psh` files into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide universal validity of a formula with sorts `X` and `PX`.
    Valid { formula: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(cap) = cli.size_cap {
        dectopos::limits::set_size_cap(cap);
    }
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(mut report) => {
            if cli.timings {
                report.timings = Some(Timings {
                    total_ms: start.elapsed().as_millis(),
                });
            }
            match cli.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", report.to_json()),
            }
            ExitCode::from(report.verdict.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
