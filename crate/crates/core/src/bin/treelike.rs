use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use treelike::cli;

#[derive(Parser)]
#[command(version, about = "Decide and reconstruct tree-like k-dissimilarity families")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the k-dissimilarity family of a Newick tree.
    Kweights {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a family is ip-l-treelike / p-l-treelike.
    Check {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        diagnostics: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the pseudostar realizing a family.
    Reconstruct {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct random pseudostars and compare.
    Roundtrip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive search over all topologies (n <= 8).
    Oracle {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (mut stdout, mut stderr) = (std::io::stdout(), std::io::stderr());
    let result = match args.command {
        Command::Kweights { tree, k, out } => cli::kweights(&tree, k, out.as_deref(), &mut stdout),
        Command::Check {
            family,
            diagnostics,
            out,
        } => cli::check(&family, diagnostics, out.as_deref(), &mut stdout),
        Command::Reconstruct { family, out } => cli::reconstruct_cmd(&family, out.as_deref(), &mut stdout, &mut stderr),
        Command::Roundtrip { n, k, trials, seed } => cli::roundtrip(n, k, trials, seed, &mut stdout),
        Command::Oracle { family, out } => cli::oracle_cmd(&family, out.as_deref(), &mut stdout),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
