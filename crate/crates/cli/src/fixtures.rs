//! Golden fixtures: two fully worked resolutions with every expected
//! refinement datum, obstruction line, and intersection column recorded as
//! data. The fixture runner recomputes everything and compares exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use sstoric::chow::{
    verify_key_formula, Ambient, CycleExpression, CycleGenerator, Level, SymbolicOneCycle,
};
use sstoric::json::ComplexDto;
use sstoric::obstruction::{tables, verify_wall_identity, ObstructionTables};
use sstoric::refinement::Refinement;

use crate::job::{JobSpec, ResolvedJob};
use crate::report::intersection_matrix;
use crate::CmdError;

pub const A1: &str = include_str!("../fixtures/a1.json");
pub const A2: &str = include_str!("../fixtures/a2.json");

/// `[owner, endpoint, endpoint, coefficient]`.
pub type GammaTerm = (String, String, String, i64);
/// `[wall key, coefficient]`.
pub type AlphaTerm = (String, i64);

#[derive(Clone, Debug, Deserialize)]
pub struct PhiLine {
    pub gamma: Vec<GammaTerm>,
    pub alpha: Vec<AlphaTerm>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MatrixData {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub values: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Expected {
    pub vertices: Vec<String>,
    pub facets: Vec<Vec<String>>,
    pub walls: Vec<String>,
    pub phi: BTreeMap<String, PhiLine>,
    pub key_lhs: BTreeMap<String, Vec<GammaTerm>>,
    pub matrix: Option<MatrixData>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct FixtureFile {
    pub name: String,
    pub description: String,
    pub complex: ComplexDto,
    pub r: i64,
    pub schedule: Option<Vec<String>>,
    pub expected: Expected,
}

pub fn fixture_source(name: &str) -> Result<&'static str, CmdError> {
    match name {
        "a1" => Ok(A1),
        "a2" => Ok(A2),
        other => Err(CmdError::Input(format!(
            "unknown fixture {other:?}; available: a1, a2"
        ))),
    }
}

pub fn load(name: &str) -> Result<FixtureFile, CmdError> {
    let source = fixture_source(name)?;
    serde_json::from_str(source).map_err(|e| CmdError::Engine(format!("fixture data: {e}")))
}

impl FixtureFile {
    pub fn job(&self) -> JobSpec {
        JobSpec {
            complex: self.complex.clone(),
            r: self.r,
            schedule: self.schedule.clone(),
            refinement: None,
            commands: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub struct FixtureOutcome {
    pub checks: Vec<Check>,
    pub resolved: ResolvedJob,
    pub tables: ObstructionTables,
}

impl FixtureOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(checks: &mut Vec<Check>, name: &str, pass: bool, detail: String) {
    checks.push(Check {
        name: name.to_string(),
        pass,
        detail,
    });
}

fn expected_expression(
    ambient: Ambient,
    level: Level,
    gamma: &[GammaTerm],
    alpha: &[AlphaTerm],
) -> CycleExpression {
    let mut expr = CycleExpression::zero(ambient);
    for (owner, a, b, coeff) in gamma {
        expr.add_term(CycleGenerator::restricted(level, owner, a, b), *coeff);
    }
    for (wall, coeff) in alpha {
        expr.add_term(CycleGenerator::wall(level, wall), *coeff);
    }
    expr
}

/// Resolves the fixture and runs every comparison against the recorded data.
pub fn run(fixture: &FixtureFile) -> Result<FixtureOutcome, CmdError> {
    let resolved = fixture.job().resolve()?;
    let refinement = &resolved.refinement;
    let tb = tables(refinement).map_err(|e| CmdError::Engine(e.to_string()))?;
    let mut checks = Vec::new();

    let got_vertices: BTreeSet<String> = refinement.vertices().map(|v| v.id.clone()).collect();
    let want_vertices: BTreeSet<String> = fixture.expected.vertices.iter().cloned().collect();
    check(
        &mut checks,
        "vertices",
        got_vertices == want_vertices,
        format!("{} refined vertices", got_vertices.len()),
    );

    let got_facets: BTreeSet<Vec<String>> = refinement
        .facets()
        .map(|f| {
            let mut ids: Vec<String> = f.iter().map(|&i| refinement.vertex(i).id.clone()).collect();
            ids.sort();
            ids
        })
        .collect();
    let want_facets: BTreeSet<Vec<String>> = fixture
        .expected
        .facets
        .iter()
        .map(|f| {
            let mut ids = f.clone();
            ids.sort();
            ids
        })
        .collect();
    check(
        &mut checks,
        "facets",
        got_facets == want_facets,
        format!("{} cells", got_facets.len()),
    );

    let got_walls: BTreeSet<String> = tb
        .i
        .walls()
        .iter()
        .map(|w| w.key(refinement))
        .collect();
    let want_walls: BTreeSet<String> = fixture.expected.walls.iter().cloned().collect();
    check(
        &mut checks,
        "relative-walls",
        got_walls == want_walls,
        format!("{} relative walls", got_walls.len()),
    );

    // Obstruction lines for the full generic cycle.
    let cycle = SymbolicOneCycle::generic(refinement, &tb);
    let mut phi_failures = Vec::new();
    for (vertex, line) in &fixture.expected.phi {
        let index = refinement
            .index_of_id(vertex)
            .map_err(|e| CmdError::Input(e.to_string()))?;
        let got = sstoric::chow::phi_refined(refinement, &tb, &cycle, index);
        let want = expected_expression(
            Ambient::Refined(vertex.clone()),
            Level::Refined,
            &line.gamma,
            &line.alpha,
        );
        if got != want {
            phi_failures.push(format!(
                "{vertex}: got {}, want {}",
                got.render(),
                want.render()
            ));
        }
    }
    check(
        &mut checks,
        "phi-lines",
        phi_failures.is_empty(),
        if phi_failures.is_empty() {
            format!("{} lines reproduced", fixture.expected.phi.len())
        } else {
            phi_failures.join("; ")
        },
    );

    let wall_report = verify_wall_identity(refinement, &tb);
    check(
        &mut checks,
        "wall-identity",
        wall_report.pass(),
        format!("{} pairs checked", wall_report.checked),
    );

    let key_report =
        verify_key_formula(refinement, &tb, &cycle).map_err(|e| CmdError::Engine(e.to_string()))?;
    let mut key_failures = Vec::new();
    if !key_report.pass() {
        key_failures.push("residual terms in the weighted sum".to_string());
    }
    for (vertex, terms) in &fixture.expected.key_lhs {
        let entry = key_report
            .per_vertex
            .iter()
            .find(|p| &p.vertex == vertex)
            .expect("vertex in report");
        let want = expected_expression(Ambient::Base(vertex.clone()), Level::Pushed, terms, &[]);
        if entry.lhs != want || entry.rhs != want {
            key_failures.push(format!(
                "{vertex}: lhs {}, rhs {}, want {}",
                entry.lhs.render(),
                entry.rhs.render(),
                want.render()
            ));
        }
    }
    check(
        &mut checks,
        "key-formula",
        key_failures.is_empty(),
        if key_failures.is_empty() {
            format!("{} base components verified", key_report.per_vertex.len())
        } else {
            key_failures.join("; ")
        },
    );

    if let Some(matrix) = &fixture.expected.matrix {
        let got = intersection_matrix(refinement, &tb, &matrix.rows, &matrix.cols);
        let pass = got.as_ref() == Some(&matrix.values);
        check(
            &mut checks,
            "intersection-matrix",
            pass,
            format!(
                "{}x{} entries compared",
                matrix.rows.len(),
                matrix.cols.len()
            ),
        );
    }

    Ok(FixtureOutcome {
        checks,
        resolved,
        tables: tb,
    })
}

/// The fixture's expected matrix orders when present, else the lexicographic
/// defaults.
pub fn fixture_orders(
    fixture: &FixtureFile,
    refinement: &Refinement,
    tb: &ObstructionTables,
) -> (Vec<String>, Vec<String>) {
    match &fixture.expected.matrix {
        Some(m) => (m.rows.clone(), m.cols.clone()),
        None => crate::report::canonical_orders(refinement, tb),
    }
}
