//! Machine-readable verification reports.
//!
//! Reports are deterministic for a fixed job and seed: all maps are ordered
//! and wall-clock timing is kept out of the file (it goes to stderr).

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sstoric::chow::{CycleExpression, KeyFormulaReport};
use sstoric::obstruction::{ObstructionTables, WallIdentityReport};
use sstoric::refinement::Refinement;

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub engine_version: String,
    pub input_hash: String,
    pub r: i64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<String>>,
    pub notes: Vec<String>,
    pub stages: Vec<StageReport>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_pretty_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

pub fn input_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// `{generator rendering -> coefficient}`, ordered.
pub fn expression_json(expr: &CycleExpression) -> Value {
    let map: BTreeMap<String, i64> = expr.terms().map(|(g, c)| (g.render(), c)).collect();
    json!(map)
}

pub fn refinement_summary(refinement: &Refinement, wall_count: usize) -> Value {
    json!({
        "vertices": refinement.vertex_count(),
        "facets": refinement.facets().count(),
        "relative_walls": wall_count,
        "r": refinement.r(),
    })
}

pub fn distance_table_json(refinement: &Refinement, tables: &ObstructionTables) -> Value {
    let mut rows: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
    for i in 0..refinement.vertex_count() {
        let row: BTreeMap<String, i64> = refinement
            .base()
            .vertices()
            .map(|v| (v.clone(), tables.d.get(i, v)))
            .collect();
        rows.insert(refinement.vertex(i).id.clone(), row);
    }
    json!(rows)
}

/// The intersection table as a dense matrix under explicit row and column
/// orders.
pub fn intersection_matrix(
    refinement: &Refinement,
    tables: &ObstructionTables,
    rows: &[String],
    cols: &[String],
) -> Option<Vec<Vec<i64>>> {
    let mut out = Vec::with_capacity(rows.len());
    let col_indices: Option<Vec<usize>> = cols
        .iter()
        .map(|key| tables.i.wall_index(refinement, key))
        .collect();
    let col_indices = col_indices?;
    for row in rows {
        let vertex = refinement.index_of_id(row).ok()?;
        out.push(
            col_indices
                .iter()
                .map(|&w| tables.i.get(w, vertex))
                .collect(),
        );
    }
    Some(out)
}

/// Lexicographic default orders: vertices by coordinate tuple, walls by key.
pub fn canonical_orders(
    refinement: &Refinement,
    tables: &ObstructionTables,
) -> (Vec<String>, Vec<String>) {
    let rows: Vec<String> = refinement.vertices().map(|v| v.id.clone()).collect();
    let cols: Vec<String> = tables
        .i
        .walls()
        .iter()
        .map(|w| w.key(refinement))
        .collect();
    (rows, cols)
}

pub fn intersection_table_json(
    refinement: &Refinement,
    tables: &ObstructionTables,
    rows: &[String],
    cols: &[String],
) -> Value {
    let values = intersection_matrix(refinement, tables, rows, cols)
        .expect("canonical orders resolve");
    json!({
        "rows": rows,
        "cols": cols,
        "values": values,
    })
}

pub fn wall_identity_json(report: &WallIdentityReport) -> Value {
    json!({
        "checked": report.checked,
        "violations": report
            .violations
            .iter()
            .map(|(v, wall, sum)| json!({"vertex": v, "wall": wall, "sum": sum}))
            .collect::<Vec<_>>(),
    })
}

pub fn key_formula_json(report: &KeyFormulaReport) -> Value {
    let mut per_vertex: BTreeMap<String, Value> = BTreeMap::new();
    for entry in &report.per_vertex {
        per_vertex.insert(
            entry.vertex.clone(),
            json!({
                "lhs": expression_json(&entry.lhs),
                "rhs": expression_json(&entry.rhs),
                "lhs_rendered": entry.lhs.render(),
                "rhs_rendered": entry.rhs.render(),
                "residual_walls": entry.residual_walls,
                "pass": entry.pass,
            }),
        );
    }
    json!(per_vertex)
}

/// CSV rendering of the intersection matrix.
pub fn matrix_csv(rows: &[String], cols: &[String], values: &[Vec<i64>]) -> String {
    let mut out = String::new();
    out.push_str("component");
    for c in cols {
        out.push(',');
        out.push('"');
        out.push_str(c);
        out.push('"');
    }
    out.push('\n');
    for (r, row) in rows.iter().zip(values) {
        out.push_str(r);
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Markdown rendering of the intersection matrix.
pub fn matrix_markdown(rows: &[String], cols: &[String], values: &[Vec<i64>]) -> String {
    let mut out = String::new();
    out.push_str("| component |");
    for c in cols {
        out.push_str(&format!(" {c} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in cols {
        out.push_str("---|");
    }
    out.push('\n');
    for (r, row) in rows.iter().zip(values) {
        out.push_str(&format!("| {r} |"));
        for v in row {
            out.push_str(&format!(" {v} |"));
        }
        out.push('\n');
    }
    out
}
