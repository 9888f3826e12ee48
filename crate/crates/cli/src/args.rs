use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "qwire", version, about = "Seeded state-vector runs of the textbook quantum algorithms")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed of the measurement stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Repeat the run this many times on derived streams and report
    /// outcome histograms.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: Option<u64>,

    /// Print one JSON document on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Dump the final amplitudes. Algorithms report the state just before
    /// their last measurement; a circuit whose `measure all` consumed its
    /// state reports nothing.
    #[arg(long, global = true)]
    pub state: bool,

    /// Allow --state above 16 qubits.
    #[arg(long, global = true)]
    pub force: bool,

    /// Only print the result, not the step-by-step narration.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Write the outcome distribution at every measurement of the first
    /// run as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_distribution: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deutsch's algorithm on a 1 -> 1 table.
    Deutsch {
        #[arg(long)]
        oracle: PathBuf,
    },
    /// Deutsch-Jozsa on an n -> 1 table.
    Dj {
        #[arg(long)]
        oracle: PathBuf,
    },
    /// Simon's algorithm on an n -> n table.
    Simon {
        #[arg(long)]
        oracle: PathBuf,
        /// Oracle calls allowed before giving up (default 10n).
        #[arg(long)]
        max_rounds: Option<u64>,
    },
    /// Factor N with Shor's algorithm.
    Shor {
        #[arg(long = "n", value_name = "N")]
        modulus: u64,
        /// Base; drawn at random when omitted.
        #[arg(long)]
        x: Option<u64>,
        /// Order-finding attempts per base.
        #[arg(long, default_value_t = qwire::algorithms::DEFAULT_ORDER_ATTEMPTS)]
        attempts: u64,
        /// Random bases to try when --x is omitted.
        #[arg(long, default_value_t = 10)]
        max_bases: u64,
    },
    /// Grover search on an n -> 1 table.
    Grover {
        #[arg(long)]
        oracle: PathBuf,
        /// Number of marked entries, when known.
        #[arg(long, default_value_t = 1, conflicts_with = "multi")]
        solutions: u64,
        /// Unknown number of marked entries.
        #[arg(long)]
        multi: bool,
        /// Growth factor of the iteration bound, in (1, 4/3).
        #[arg(long, default_value_t = 1.2, requires = "multi")]
        lambda: f64,
        /// Cumulative iteration budget (default ceil(9 sqrt(2^n))).
        #[arg(long, requires = "multi")]
        max_iterations: Option<u64>,
    },
    /// Estimate the number of marked entries of an n -> 1 table.
    Count {
        #[arg(long)]
        oracle: PathBuf,
        /// Counter qubits (default n + 2).
        #[arg(long)]
        p: Option<usize>,
    },
    /// Execute a circuit file.
    Run {
        circuit: PathBuf,
        /// Oracle table for the circuit, overriding its own `load` lines.
        #[arg(long = "table", value_name = "NAME=PATH", value_parser = parse_table)]
        tables: Vec<(String, PathBuf)>,
    },
}

fn parse_table(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or_else(|| format!("expected NAME=PATH, got `{s}`"))?;
    if name.is_empty() || path.is_empty() {
        return Err(format!("expected NAME=PATH, got `{s}`"));
    }
    Ok((name.to_string(), PathBuf::from(path)))
}
