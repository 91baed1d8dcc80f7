//! Command implementations behind the `sstoric` binary.
//!
//! Exit codes: 0 all verified, 2 verification failure, 3 input validation
//! failure, 4 engine error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use sstoric::chow::{verify_key_formula, SymbolicOneCycle};
use sstoric::json::RefinementDto;
use sstoric::obstruction::{tables, verify_wall_identity};

pub mod fixtures;
pub mod fuzz;
pub mod job;
pub mod report;

use job::JobSpec;
use report::{StageReport, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_ENGINE: i32 = 4;

/// Environment variable selecting the directory reports are written to.
pub const OUT_DIR_ENV: &str = "SSTORIC_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmdError {
    Input(String),
    Engine(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => EXIT_INPUT,
            CmdError::Engine(_) => EXIT_ENGINE,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Engine(m) => m,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Input(m) => write!(f, "input error: {m}"),
            CmdError::Engine(m) => write!(f, "engine error: {m}"),
        }
    }
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_artifact(name: &str, contents: &str) -> Result<PathBuf, CmdError> {
    let dir = out_dir();
    std::fs::create_dir_all(&dir)
        .map_err(|e| CmdError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

const ALL_STAGES: [&str; 4] = ["resolve", "tables", "wall-identity", "key-formula"];

fn job_stages(job: &JobSpec) -> Result<Vec<String>, CmdError> {
    match &job.commands {
        None => Ok(ALL_STAGES.iter().map(|s| s.to_string()).collect()),
        Some(stages) => {
            for s in stages {
                if !ALL_STAGES.contains(&s.as_str()) {
                    return Err(CmdError::Input(format!(
                        "unknown verification stage {s:?}; available: {}",
                        ALL_STAGES.join(", ")
                    )));
                }
            }
            Ok(stages.clone())
        }
    }
}

fn build_report(
    job: &JobSpec,
    raw: &[u8],
    stages_requested: &[String],
) -> Result<VerificationReport, CmdError> {
    let resolved = job.resolve()?;
    let refinement = &resolved.refinement;
    let tb = tables(refinement).map_err(|e| CmdError::Engine(e.to_string()))?;
    let (rows, cols) = report::canonical_orders(refinement, &tb);

    let mut stages = Vec::new();
    for stage in stages_requested {
        let entry = match stage.as_str() {
            "resolve" => StageReport {
                name: stage.clone(),
                pass: true,
                detail: report::refinement_summary(refinement, tb.i.wall_count()),
            },
            "tables" => StageReport {
                name: stage.clone(),
                pass: true,
                detail: json!({
                    "distance": report::distance_table_json(refinement, &tb),
                    "intersection": report::intersection_table_json(refinement, &tb, &rows, &cols),
                }),
            },
            "wall-identity" => {
                let wall = verify_wall_identity(refinement, &tb);
                StageReport {
                    name: stage.clone(),
                    pass: wall.pass(),
                    detail: report::wall_identity_json(&wall),
                }
            }
            "key-formula" => {
                let cycle = SymbolicOneCycle::generic(refinement, &tb);
                let key = verify_key_formula(refinement, &tb, &cycle)
                    .map_err(|e| CmdError::Engine(e.to_string()))?;
                StageReport {
                    name: stage.clone(),
                    pass: key.pass(),
                    detail: report::key_formula_json(&key),
                }
            }
            _ => unreachable!("stages validated"),
        };
        stages.push(entry);
    }
    let pass = stages.iter().all(|s| s.pass);
    Ok(VerificationReport {
        engine_version: sstoric::ENGINE_VERSION.to_string(),
        input_hash: report::input_hash(raw),
        r: job.r,
        mode: resolved.mode.as_str().to_string(),
        schedule: resolved.schedule.clone(),
        notes: resolved.notes.clone(),
        stages,
        pass,
    })
}

pub fn cmd_resolve(path: &Path) -> Result<i32, CmdError> {
    let started = Instant::now();
    let (job, raw) = JobSpec::load(path)?;
    let resolved = job.resolve()?;
    let refinement = &resolved.refinement;
    let tb = tables(refinement).map_err(|e| CmdError::Engine(e.to_string()))?;

    let dto = RefinementDto::from_refinement(refinement);
    let mut refinement_json =
        serde_json::to_string_pretty(&dto).map_err(|e| CmdError::Engine(e.to_string()))?;
    refinement_json.push('\n');
    let refinement_path = write_artifact("refinement.json", &refinement_json)?;

    let report = VerificationReport {
        engine_version: sstoric::ENGINE_VERSION.to_string(),
        input_hash: report::input_hash(&raw),
        r: job.r,
        mode: resolved.mode.as_str().to_string(),
        schedule: resolved.schedule.clone(),
        notes: resolved.notes.clone(),
        stages: vec![StageReport {
            name: "resolve".to_string(),
            pass: true,
            detail: report::refinement_summary(refinement, tb.i.wall_count()),
        }],
        pass: true,
    };
    let report_path = write_artifact("resolve_report.json", &report.to_pretty_json())?;

    println!(
        "resolve: {} refined vertices, {} cells, {} relative walls ({} mode)",
        refinement.vertex_count(),
        refinement.facets().count(),
        tb.i.wall_count(),
        resolved.mode.as_str(),
    );
    println!("resolve: wrote {}", refinement_path.display());
    println!("resolve: wrote {}", report_path.display());
    eprintln!("resolve: completed in {:?}", started.elapsed());
    Ok(EXIT_OK)
}

pub fn cmd_verify(path: &Path) -> Result<i32, CmdError> {
    let started = Instant::now();
    let (job, raw) = JobSpec::load(path)?;
    let stages = job_stages(&job)?;
    let report = build_report(&job, &raw, &stages)?;
    for stage in &report.stages {
        println!(
            "verify: {} ... {}",
            stage.name,
            if stage.pass { "PASS" } else { "FAIL" }
        );
    }
    let path = write_artifact("verify_report.json", &report.to_pretty_json())?;
    println!("verify: wrote {}", path.display());
    eprintln!("verify: completed in {:?}", started.elapsed());
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFICATION })
}

pub fn cmd_fixture(name: &str) -> Result<i32, CmdError> {
    let started = Instant::now();
    let fixture = fixtures::load(name)?;
    let outcome = fixtures::run(&fixture)?;
    for check in &outcome.checks {
        println!(
            "fixture {}: {} ... {} ({})",
            fixture.name,
            check.name,
            if check.pass { "PASS" } else { "FAIL" },
            check.detail,
        );
    }

    let refinement = &outcome.resolved.refinement;
    let (rows, cols) = fixtures::fixture_orders(&fixture, refinement, &outcome.tables);
    let report = VerificationReport {
        engine_version: sstoric::ENGINE_VERSION.to_string(),
        input_hash: report::input_hash(fixtures::fixture_source(name)?.as_bytes()),
        r: fixture.r,
        mode: outcome.resolved.mode.as_str().to_string(),
        schedule: outcome.resolved.schedule.clone(),
        notes: outcome.resolved.notes.clone(),
        stages: outcome
            .checks
            .iter()
            .map(|c| StageReport {
                name: c.name.clone(),
                pass: c.pass,
                detail: json!(c.detail),
            })
            .chain(std::iter::once(StageReport {
                name: "tables".to_string(),
                pass: true,
                detail: json!({
                    "distance": report::distance_table_json(refinement, &outcome.tables),
                    "intersection": report::intersection_table_json(
                        refinement,
                        &outcome.tables,
                        &rows,
                        &cols,
                    ),
                }),
            }))
            .collect(),
        pass: outcome.pass(),
    };
    let path = write_artifact(&format!("fixture_{name}_report.json"), &report.to_pretty_json())?;
    println!("fixture {name}: wrote {}", path.display());
    eprintln!("fixture {name}: completed in {:?}", started.elapsed());
    Ok(if outcome.pass() { EXIT_OK } else { EXIT_VERIFICATION })
}

pub fn cmd_fuzz(seed: u64, count: u32) -> Result<i32, CmdError> {
    let started = Instant::now();
    let campaign = fuzz::run_campaign(seed, count)?;
    let mut text =
        serde_json::to_string_pretty(&campaign).map_err(|e| CmdError::Engine(e.to_string()))?;
    text.push('\n');
    let path = write_artifact("fuzz_report.json", &text)?;
    println!(
        "fuzz: {}/{} cases passed (seed {})",
        campaign.passed, campaign.count, campaign.seed
    );
    if !campaign.failed.is_empty() {
        println!("fuzz: failing case indices: {:?}", campaign.failed);
    }
    println!("fuzz: wrote {}", path.display());
    eprintln!("fuzz: completed in {:?}", started.elapsed());
    Ok(if campaign.pass() { EXIT_OK } else { EXIT_VERIFICATION })
}

pub fn cmd_export_matrix(
    job_path: Option<&Path>,
    fixture_name: Option<&str>,
    format: &str,
) -> Result<i32, CmdError> {
    let (refinement, tb, orders) = match (job_path, fixture_name) {
        (Some(_), Some(_)) => {
            return Err(CmdError::Input(
                "pass either a job file or --fixture, not both".to_string(),
            ))
        }
        (None, None) => {
            return Err(CmdError::Input(
                "export-matrix needs a job file or --fixture".to_string(),
            ))
        }
        (Some(path), None) => {
            let (job, _) = JobSpec::load(path)?;
            let resolved = job.resolve()?;
            let tb = tables(&resolved.refinement).map_err(|e| CmdError::Engine(e.to_string()))?;
            let orders = report::canonical_orders(&resolved.refinement, &tb);
            (resolved.refinement, tb, orders)
        }
        (None, Some(name)) => {
            let fixture = fixtures::load(name)?;
            let resolved = fixture.job().resolve()?;
            let tb = tables(&resolved.refinement).map_err(|e| CmdError::Engine(e.to_string()))?;
            let orders = fixtures::fixture_orders(&fixture, &resolved.refinement, &tb);
            (resolved.refinement, tb, orders)
        }
    };
    let (rows, cols) = orders;
    let values = report::intersection_matrix(&refinement, &tb, &rows, &cols)
        .ok_or_else(|| CmdError::Engine("matrix ordering does not resolve".to_string()))?;
    let rendered = match format {
        "csv" => report::matrix_csv(&rows, &cols, &values),
        "md" => report::matrix_markdown(&rows, &cols, &values),
        other => {
            return Err(CmdError::Input(format!(
                "unknown format {other:?}; available: csv, md"
            )))
        }
    };
    print!("{rendered}");
    Ok(EXIT_OK)
}
