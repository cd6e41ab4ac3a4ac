use std::collections::BTreeSet;
use std::fmt::Write as _;

use drep_core::homology::BettiTable;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::args::Format;

/// The outcome of one command, in both output formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub json: Value,
    pub table: String,
    /// `Some(false)` when a verification failed; `None` for plain computations.
    pub verified: Option<bool>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Table => {
                let mut s = self.table.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.verified {
            Some(false) => 1,
            _ => 0,
        }
    }
}

/// `{"cells": [...], "meta": {...}}` with every nonzero or truncated cell.
pub fn betti_json(b: &BettiTable, meta: Value) -> Value {
    let cells: Vec<Value> = b
        .cells()
        .map(|(&(h, w), c)| json!({"hdeg": h, "weight": w, "dim": c.dim, "lower_bound": c.lower_bound}))
        .collect();
    json!({"cells": cells, "meta": meta})
}

/// An hdeg × weight grid; `*` marks lower bounds.
pub fn betti_grid(b: &BettiTable) -> String {
    let hdegs: BTreeSet<i32> = b.cells().map(|(&(h, _), _)| h).collect();
    let weights: Vec<u32> = (0..=b.max_weight()).collect();
    let mut out = String::new();
    if hdegs.is_empty() {
        out.push_str("(all cells vanish)\n");
        return out;
    }
    let cell = |h: i32, w: u32| -> String {
        let d = b.get(h, w);
        let mark = if b.is_lower_bound(h, w) { "*" } else { "" };
        if d == 0 && mark.is_empty() {
            ".".into()
        } else {
            format!("{d}{mark}")
        }
    };
    let width = hdegs
        .iter()
        .flat_map(|&h| weights.iter().map(move |&w| (h, w)))
        .map(|(h, w)| cell(h, w).chars().count())
        .chain(weights.iter().map(|w| w.to_string().len()))
        .max()
        .unwrap_or(1);
    let hw = hdegs.iter().map(|h| h.to_string().len()).max().unwrap_or(1).max(3);
    let _ = write!(out, "{:>hw$} |", "h\\w");
    for w in &weights {
        let _ = write!(out, " {w:>width$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}-+{}", "-".repeat(hw), "-".repeat((width + 1) * weights.len()));
    for &h in &hdegs {
        let _ = write!(out, "{h:>hw$} |");
        for &w in &weights {
            let _ = write!(out, " {:>width$}", cell(h, w));
        }
        out.push('\n');
    }
    if b.cells().any(|(_, c)| c.lower_bound) {
        out.push_str("* lower bound: the cell sits at the homological truncation\n");
    }
    out
}

pub fn betti_report(b: &BettiTable, title: &str, meta: Value) -> Report {
    Report {
        json: betti_json(b, meta),
        table: format!("{title}\n{}", betti_grid(b)),
        verified: None,
    }
}

pub fn bigint_strings(cs: &[BigInt]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

/// `{"coefficients": [...], "verified": ..., "first_mismatch": ...}` plus extras.
pub fn series_json(
    coeffs: &[BigInt],
    verified: Option<bool>,
    first_mismatch: Option<u32>,
    extra: Map<String, Value>,
) -> Value {
    let mut m = Map::new();
    m.insert("coefficients".into(), json!(bigint_strings(coeffs)));
    m.insert("verified".into(), json!(verified));
    m.insert("first_mismatch".into(), json!(first_mismatch));
    m.extend(extra);
    Value::Object(m)
}

pub fn series_line(coeffs: &[BigInt]) -> String {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| format!("q^{i}: {c}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn verdict(verified: Option<bool>, first_mismatch: Option<u32>) -> String {
    match (verified, first_mismatch) {
        (Some(true), _) => "verified".into(),
        (Some(false), Some(k)) => format!("MISMATCH at degree {k}"),
        (Some(false), None) => "MISMATCH".into(),
        (None, _) => "no independent check for this input".into(),
    }
}
