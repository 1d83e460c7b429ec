//! Command implementations behind the `treelike` binary.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;
use thiserror::Error;

use crate::checker::decide;
use crate::io::{family_to_json, read_family, read_input, verdict_to_json, FormatError};
use crate::newick::{parse_newick, NewickError};
use crate::oracle::{all_realizations, brute_decide, random_pseudostar, OracleError, WeightRange};
use crate::reconstruct::reconstruct;
use crate::tree::TreeError;

/// Largest `n` accepted by `roundtrip`.
pub const ROUNDTRIP_MAX_N: usize = 9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("bad tree: {0}")]
    Newick(#[from] NewickError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Process exit status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Affirmative,
    Negative,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Affirmative => 0,
            Outcome::Negative => 1,
        }
    }
}

impl CliError {
    pub fn code(&self) -> i32 {
        2
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) if path.as_os_str() != "-" => {
            fs::write(path, format!("{text}\n")).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })
        }
        _ => writeln!(stdout, "{text}").map_err(|source| CliError::Write {
            path: "stdout".into(),
            source,
        }),
    }
}

/// `kweights --tree FILE --k K --out FILE`
pub fn kweights(tree: &Path, k: usize, out: Option<&Path>, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let tree = parse_newick(read_input(tree)?.trim())?;
    let family = tree.k_dissimilarity(k)?;
    emit(out, &family_to_json(&family), stdout)?;
    Ok(Outcome::Affirmative)
}

/// `check --family FILE [--diagnostics] [--out FILE]`; affirmative iff the
/// family is ip-l-treelike.
pub fn check(
    family: &Path,
    diagnostics: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let f = read_family(family)?;
    let verdict = decide(&f).map_err(|e| CliError::Usage(e.to_string()))?;
    let doc = verdict_to_json(&verdict, diagnostics);
    emit(
        out,
        &serde_json::to_string_pretty(&doc).expect("json value serializes"),
        stdout,
    )?;
    Ok(if verdict.ip_l_treelike {
        Outcome::Affirmative
    } else {
        Outcome::Negative
    })
}

/// `reconstruct --family FILE --out FILE`; writes the Newick tree, or the
/// failing stage to stderr.
pub fn reconstruct_cmd(
    family: &Path,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let f = read_family(family)?;
    match reconstruct(&f) {
        Ok(r) => {
            emit(out, &r.tree.to_newick(), stdout)?;
            Ok(Outcome::Affirmative)
        }
        Err(e) => {
            let _ = writeln!(
                stderr,
                "reconstruction failed at stage {} ({}): {e}",
                e.stage(),
                e.stage_name()
            );
            Ok(Outcome::Negative)
        }
    }
}

/// `roundtrip --n N --k K --trials T --seed S`: random pseudostars with
/// possibly negative twigs must come back unchanged.
pub fn roundtrip(n: usize, k: usize, trials: usize, seed: u64, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    if !(4..=ROUNDTRIP_MAX_N).contains(&n) || k < 3 || k + 1 > n {
        return Err(CliError::Usage(format!(
            "roundtrip needs 4 <= n <= {ROUNDTRIP_MAX_N} and 3 <= k <= n - 1"
        )));
    }
    let range = WeightRange::with_negative_twigs(5);
    let write_err = |source| CliError::Write {
        path: "stdout".into(),
        source,
    };
    for t in 0..trials {
        let tree = random_pseudostar(n, k, seed.wrapping_add(t as u64), &range);
        let family = tree.k_dissimilarity(k)?;
        let got = reconstruct(&family);
        let ok = matches!(&got, Ok(r) if r.tree == tree);
        if !ok {
            let found = match got {
                Ok(r) => r.tree.to_newick(),
                Err(e) => format!("failure at stage {}: {e}", e.stage()),
            };
            writeln!(
                stdout,
                "trial {t} mismatch\n  source: {}\n  result: {found}",
                tree.to_newick()
            )
            .map_err(write_err)?;
            return Ok(Outcome::Negative);
        }
    }
    writeln!(stdout, "n = {n}, k = {k}: {trials}/{trials} trees reproduced").map_err(write_err)?;
    Ok(Outcome::Affirmative)
}

/// `oracle --family FILE`: exhaustive search over every topology.
pub fn oracle_cmd(family: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let f = read_family(family)?;
    let verdict = brute_decide(&f)?;
    let realizations: Vec<_> = all_realizations(&f)?
        .into_iter()
        .map(|r| {
            json!({
                "tree": r.tree.to_newick(),
                "unique": r.unique,
                "pseudostar": r.tree.topology().is_pseudostar(f.k()),
                "positive": r.tree.is_positive(),
            })
        })
        .collect();
    let doc = json!({
        "ip_l_treelike": verdict.ip_l_treelike,
        "p_l_treelike": verdict.p_l_treelike,
        "realizations": realizations,
    });
    emit(
        out,
        &serde_json::to_string_pretty(&doc).expect("json value serializes"),
        stdout,
    )?;
    Ok(if verdict.ip_l_treelike {
        Outcome::Affirmative
    } else {
        Outcome::Negative
    })
}
