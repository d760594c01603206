//! Machine-readable run reports: JSON and a flat CSV projection.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::ResidualReport;

/// Tabulated values accompanying the entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// Draws rejected for violating a domain constraint and redrawn.
    pub rejected: usize,
}

impl Summary {
    pub fn of(entries: &[ResidualReport], rejected: usize) -> Self {
        let passed = entries.iter().filter(|e| e.pass).count();
        let max = |f: fn(&ResidualReport) -> f64| entries.iter().map(f).fold(0.0, f64::max);
        Summary {
            total: entries.len(),
            passed,
            failed: entries.len() - passed,
            max_abs_residual: max(|e| e.abs_residual),
            max_rel_residual: max(|e| e.rel_residual),
            rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<C: Serialize> {
    pub version: String,
    pub config: C,
    pub entries: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub summary: Summary,
}

impl<C: Serialize> Report<C> {
    pub fn new(
        config: C,
        entries: Vec<ResidualReport>,
        table: Option<Table>,
        rejected: usize,
    ) -> Self {
        let summary = Summary::of(&entries, rejected);
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            entries,
            table,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parameter(format!("cannot serialize report: {e}")))
    }

    /// One row per entry; input columns are the sorted union of input names.
    /// Numbers use the shortest round-trip representation.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Parameter(format!("cannot write CSV: {e}"));
        let keys: BTreeSet<&String> = self.entries.iter().flat_map(|e| e.inputs.keys()).collect();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["identity".to_string(), "seed".to_string()];
        header.extend(keys.iter().map(|k| k.to_string()));
        header.extend(
            [
                "lhs",
                "rhs",
                "abs_residual",
                "rel_residual",
                "tol",
                "pass",
                "tail_estimate",
            ]
            .map(String::from),
        );
        w.write_record(&header).map_err(io)?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for e in &self.entries {
            let mut row = vec![e.identity.clone(), opt(e.seed.map(|s| s.to_string()))];
            row.extend(
                keys.iter()
                    .map(|k| opt(e.inputs.get(*k).map(|v| format!("{v:?}")))),
            );
            row.extend(
                [e.lhs, e.rhs, e.abs_residual, e.rel_residual, e.tol].map(|v| format!("{v:?}")),
            );
            row.push(e.pass.to_string());
            row.push(opt(e.tail_estimate.map(|v| format!("{v:?}"))));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Parameter(format!("cannot write CSV: {e}")))?;
        Ok(())
    }
}
