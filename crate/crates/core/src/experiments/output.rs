use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentKind, ExperimentResult};
use crate::error::{Error, Result};

/// One CSV line per target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub kind: ExperimentKind,
    pub n: usize,
    pub u: usize,
    pub target: String,
    pub count: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub theory: Option<f64>,
    pub theory_err: Option<f64>,
    pub z: Option<f64>,
}

impl ExperimentResult {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| CsvRow {
                kind: self.spec.kind,
                n: self.spec.n,
                u: self.spec.u,
                target: r.target.clone(),
                count: r.count,
                trials: r.trials,
                estimate: r.estimate,
                lo: r.lo,
                hi: r.hi,
                theory: r.theory,
                theory_err: r.theory_err,
                z: r.z,
            })
            .collect()
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Header plus the rows of every result, in order.
pub fn csv_string(results: &[ExperimentResult]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["kind", "n", "u", "target", "count", "trials", "estimate", "lo", "hi", "theory", "theory_err", "z"])
        .map_err(csv_error)?;
    for r in results {
        for row in r.csv_rows() {
            w.serialize(row).map_err(csv_error)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `{kind}-n{n}-u{u}-seed{seed}`, plus `-t{stamp}` when a timestamp is given.
pub fn result_file_stem(result: &ExperimentResult, stamp: Option<u64>) -> String {
    let s = &result.spec;
    let mut stem = format!("{}-n{}-u{}-seed{}", s.kind, s.n, s.u, s.seed);
    if let Some(t) = stamp {
        write!(stem, "-t{t}").unwrap();
    }
    stem
}

/// Writes `<stem>.json` and `<stem>.csv` into `dir` and returns both paths.
pub fn write_result_files(result: &ExperimentResult, dir: &Path, stamp: Option<u64>) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let stem = result_file_stem(result, stamp);
    let json = dir.join(format!("{stem}.json"));
    let csv = dir.join(format!("{stem}.csv"));
    let mut text = serde_json::to_string_pretty(result)?;
    text.push('\n');
    std::fs::write(&json, text)?;
    std::fs::write(&csv, csv_string(std::slice::from_ref(result))?)?;
    Ok((json, csv))
}

fn opt(x: Option<f64>, digits: usize) -> String {
    match x {
        Some(v) => format!("{v:.digits$}"),
        None => "-".into(),
    }
}

/// Plain-text table of the results, one section per kind.
pub fn render_report(results: &[ExperimentResult]) -> String {
    let mut by_kind: BTreeMap<ExperimentKind, Vec<&ExperimentResult>> = BTreeMap::new();
    for r in results {
        by_kind.entry(r.spec.kind).or_default().push(r);
    }
    let mut out = String::new();
    for (kind, rs) in by_kind {
        writeln!(out, "== {kind} ==").unwrap();
        writeln!(
            out,
            "{:<5} {:<4} {:<30} {:>8} {:>9} {:>19} {:>9} {:>8}  verdict",
            "n", "u", "target", "trials", "estimate", "interval", "theory", "z"
        )
        .unwrap();
        for r in rs {
            for c in super::compare_to_theory(r) {
                writeln!(
                    out,
                    "{:<5} {:<4} {:<30} {:>8} {:>9.5} [{:>8.5}, {:>8.5}] {:>9} {:>8}  {}",
                    r.spec.n,
                    r.spec.u,
                    c.target,
                    r.spec.trials,
                    c.estimate,
                    c.lo,
                    c.hi,
                    opt(c.theory, 5),
                    opt(c.z, 2),
                    c.verdict
                )
                .unwrap();
            }
            if r.other + r.infinite > 0 {
                writeln!(out, "{:<5} {:<4} other {} / infinite {}", "", "", r.other, r.infinite).unwrap();
            }
        }
        out.push('\n');
    }
    if !out.is_empty() {
        out.push_str("tolerances are engineering choices: the limit laws come with no finite-n error rate\n");
    }
    out
}
