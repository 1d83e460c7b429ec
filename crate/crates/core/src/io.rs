//! JSON formats for families, pair tables and verdicts.
//!
//! A family file is `{"n": 5, "k": 3, "entries": [{"I": [1,2,3], "D": "5"}, ...]}`
//! where `D` is either a string (`"7/2"`, `"-3"`, `"0.25"`) or a JSON
//! number. Numbers are read from their literal text, so decimals stay exact.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::checker::{Diagnostic, Verdict};
use crate::family::{FamilyError, KFamily, PairTable};
use crate::leafset::{LeafSet, MAX_LEAVES};
use crate::number::{format_rational, parse_rational, ParseRationalError, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {entry}: {message}")]
    Entry { entry: usize, message: String },
    #[error(transparent)]
    Value(#[from] ParseRationalError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("pair table needs 2 <= n <= {MAX_LEAVES}, got {0}")]
    PairRange(usize),
    #[error("pair table is missing ({0}, {1})")]
    MissingPair(usize, usize),
}

/// Reads a whole file, or stdin when `path` is `-`.
pub fn read_input(path: &Path) -> Result<String, FormatError> {
    let io_err = |source| FormatError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io_err)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn value_of(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
        other => Err(format!("expected a number or a string, found {other}")),
    }
}

fn subset_of(indices: &[usize], n: usize) -> Result<LeafSet, String> {
    let mut set = LeafSet::EMPTY;
    for &i in indices {
        if !(1..=n).contains(&i) {
            return Err(format!("index {i} is outside 1..={n}"));
        }
        if set.contains(i) {
            return Err(format!("index {i} is repeated"));
        }
        set = set.with(i);
    }
    Ok(set)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    n: usize,
    k: usize,
    entries: Vec<FamilyEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyEntry {
    #[serde(rename = "I")]
    subset: Vec<usize>,
    #[serde(rename = "D")]
    value: Value,
}

pub fn family_from_json(text: &str) -> Result<KFamily, FormatError> {
    let doc: FamilyDoc = serde_json::from_str(text)?;
    if doc.n > MAX_LEAVES {
        return Err(FamilyError::OutOfRange { n: doc.n, k: doc.k }.into());
    }
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (entry, e) in doc.entries.iter().enumerate() {
        let err = |message| FormatError::Entry { entry, message };
        let set = subset_of(&e.subset, doc.n).map_err(err)?;
        let value = value_of(&e.value).map_err(err)?;
        entries.push((set, value));
    }
    Ok(KFamily::from_entries(doc.n, doc.k, entries)?)
}

pub fn family_to_json(f: &KFamily) -> String {
    let doc = FamilyDoc {
        n: f.n(),
        k: f.k(),
        entries: f
            .iter()
            .map(|(s, d)| FamilyEntry {
                subset: s.to_vec(),
                value: Value::String(format_rational(d)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn read_family(path: &Path) -> Result<KFamily, FormatError> {
    family_from_json(&read_input(path)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    n: usize,
    entries: Vec<PairEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairEntry {
    pair: [usize; 2],
    #[serde(rename = "S")]
    value: Value,
}

/// `{"n": 4, "entries": [{"pair": [1, 2], "S": "11"}, ...]}`, total over
/// the pairs of `{1..n}`.
pub fn pair_table_from_json(text: &str) -> Result<PairTable, FormatError> {
    let doc: PairDoc = serde_json::from_str(text)?;
    if !(2..=MAX_LEAVES).contains(&doc.n) {
        return Err(FormatError::PairRange(doc.n));
    }
    let mut values: Vec<Option<Rational>> = vec![None; doc.n * doc.n];
    for (entry, e) in doc.entries.iter().enumerate() {
        let err = |message| FormatError::Entry { entry, message };
        let set = subset_of(&e.pair, doc.n).map_err(err)?;
        let (i, j) = (set.min().unwrap(), set.max().unwrap());
        let slot = &mut values[(i - 1) * doc.n + (j - 1)];
        if slot.is_some() {
            return Err(err(format!("pair ({i}, {j}) is listed twice")));
        }
        *slot = Some(value_of(&e.value).map_err(err)?);
    }
    for pair in LeafSet::full(doc.n).subsets(2) {
        let (i, j) = (pair.min().unwrap(), pair.max().unwrap());
        if values[(i - 1) * doc.n + (j - 1)].is_none() {
            return Err(FormatError::MissingPair(i, j));
        }
    }
    Ok(PairTable::from_fn(doc.n, |i, j| {
        values[(i - 1) * doc.n + (j - 1)].take().unwrap()
    }))
}

pub fn pair_table_to_json(p: &PairTable) -> String {
    let doc = PairDoc {
        n: p.n(),
        entries: p
            .iter()
            .map(|((i, j), s)| PairEntry {
                pair: [i, j],
                value: Value::String(format_rational(s)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

fn diagnostic_json(d: &Diagnostic) -> Value {
    match d {
        Diagnostic::Pass => json!({ "status": "pass" }),
        Diagnostic::Fail { indices, message } => json!({ "status": "fail", "indices": indices, "message": message }),
        Diagnostic::Skipped(why) => json!({ "status": "skipped", "reason": why }),
    }
}

/// The verdict document. `diagnostics` is included on request.
pub fn verdict_to_json(v: &Verdict, diagnostics: bool) -> Value {
    let tau = v.tau.as_ref().map(|tau| {
        tau.iter()
            .enumerate()
            .map(|(i, t)| ((i + 1).to_string(), Value::String(format_rational(t))))
            .collect::<Map<_, _>>()
    });
    let mut doc = json!({
        "ip_l_treelike": v.ip_l_treelike,
        "p_l_treelike": v.p_l_treelike,
        "tree": v.tree.as_ref().map(|t| t.to_newick()),
        "tau": tau,
    });
    if diagnostics {
        let map: Map<String, Value> = v
            .diagnostics
            .entries()
            .iter()
            .map(|(name, d)| (name.to_string(), diagnostic_json(d)))
            .collect();
        doc["diagnostics"] = Value::Object(map);
    }
    doc["witness"] = match &v.failure {
        None => Value::Null,
        Some(f) => json!({
            "stage": f.stage,
            "stage_name": f.stage_name,
            "indices": f.indices,
            "message": f.message,
        }),
    };
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, ratio};

    #[test]
    fn family_round_trip() {
        let text = r#"{"n": 4, "k": 3, "entries": [
            {"I": [1,2,3], "D": 11}, {"I": [1,2,4], "D": "12"},
            {"I": [4,1,3], "D": 0.1}, {"I": [2,3,4], "D": "-7/2"}]}"#;
        let f = family_from_json(text).unwrap();
        assert_eq!(f.get(LeafSet::from_labels([1, 3, 4])), &ratio(1, 10));
        assert_eq!(f.get(LeafSet::from_labels([2, 3, 4])), &ratio(-7, 2));
        assert_eq!(family_from_json(&family_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn family_errors() {
        let missing = r#"{"n": 4, "k": 3, "entries": [{"I": [1,2,3], "D": 1}]}"#;
        assert!(matches!(
            family_from_json(missing),
            Err(FormatError::Family(FamilyError::Missing(_)))
        ));
        let range = r#"{"n": 4, "k": 3, "entries": [{"I": [1,2,5], "D": 1}]}"#;
        assert!(matches!(
            family_from_json(range),
            Err(FormatError::Entry { entry: 0, .. })
        ));
        let value = r#"{"n": 4, "k": 3, "entries": [{"I": [1,2,3], "D": "x"}]}"#;
        assert!(matches!(family_from_json(value), Err(FormatError::Entry { .. })));
        assert!(matches!(family_from_json("{"), Err(FormatError::Json(_))));
        let k = r#"{"n": 4, "k": 4, "entries": []}"#;
        assert!(matches!(
            family_from_json(k),
            Err(FormatError::Family(FamilyError::OutOfRange { .. }))
        ));
    }

    #[test]
    fn pair_table_round_trip() {
        let p = PairTable::from_fn(4, |i, j| int((10 * i + j) as i64));
        let q = pair_table_from_json(&pair_table_to_json(&p)).unwrap();
        assert_eq!(q.get(2, 4), &int(24));
        assert!(matches!(
            pair_table_from_json(r#"{"n": 3, "entries": [{"pair": [1,2], "S": 1}]}"#),
            Err(FormatError::MissingPair(1, 3))
        ));
    }
}
