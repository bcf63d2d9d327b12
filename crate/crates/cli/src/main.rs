use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wheeler_sums::fv::{TABLE_CAP_ENV, DEFAULT_TABLE_CAP};
use wheeler_sums::{Backend, Error};

mod bench;
mod commands;

#[derive(Parser)]
#[command(name = "wheeler-sums", version, about = "Wheeler-graph pattern index built on searchable partial sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a ranked graph and write its index.
    Build {
        /// Graph text file: `n <count>` header, then `origin dest label` lines.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "entropy")]
        backend: Backend,
    },
    /// Match patterns against an index; prints `pattern<TAB>start<TAB>end`
    /// or `pattern<TAB>-`.
    Query {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long = "pattern")]
        patterns: Vec<String>,
        /// One pattern per line. With neither this nor `-p`, reads stdin.
        #[arg(long = "patterns")]
        pattern_file: Option<PathBuf>,
    },
    /// Entropy and space report for an index or a whitespace-separated
    /// integer sequence.
    Stats {
        #[arg(short, long)]
        input: PathBuf,
        /// Highest context order reported for sequences.
        #[arg(short, default_value_t = 3)]
        k: usize,
    },
    /// Time sum and search over generated sequences.
    Bench {
        /// `key=values` pairs separated by `;`, keys n, sigma, dist, backend.
        /// Values are comma lists; n also accepts `2^a..2^b`.
        #[arg(long, default_value = bench::DEFAULT_GRID)]
        grid: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random queries per cell and operation.
        #[arg(long, default_value_t = 1_000_000)]
        queries: usize,
    },
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Build {
            input,
            output,
            backend,
        } => commands::build(&input, &output, backend, out),
        Command::Query {
            input,
            patterns,
            pattern_file,
        } => commands::query(&input, &patterns, pattern_file.as_deref(), out),
        Command::Stats { input, k } => commands::stats(&input, k, out),
        Command::Bench {
            grid,
            seed,
            queries,
        } => bench::run(&bench::Grid::parse(&grid)?, seed, queries, out),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => 2,
        Some(Error::NotWheeler(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(TABLE_CAP_ENV) {
        if !matches!(v.trim().parse::<u32>(), Ok(1..=32)) {
            eprintln!("warning: ignoring {TABLE_CAP_ENV}={v:?}; using {DEFAULT_TABLE_CAP}");
        }
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
