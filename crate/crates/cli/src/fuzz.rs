//! Randomized verification campaigns: random small complexes, random
//! ramification indices, default resolution, full verification. Deterministic
//! for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sstoric::chow::{verify_key_formula, SymbolicOneCycle};
use sstoric::json::ComplexDto;
use sstoric::obstruction::{tables, verify_wall_identity};
use sstoric::refinement::Refinement;
use sstoric::resolution::LocalFanState;

use crate::CmdError;

/// One generated input: at most 8 vertices, simplices of dimension at most 2,
/// ramification index between 1 and 6.
pub fn random_case(rng: &mut ChaCha8Rng) -> (ComplexDto, i64) {
    let nv: usize = rng.gen_range(1..=8);
    let vertices: Vec<String> = (1..=nv).map(|i| i.to_string()).collect();
    let mut facets: Vec<Vec<String>> = Vec::new();
    let triangles = if nv >= 3 { rng.gen_range(0..=3) } else { 0 };
    for _ in 0..triangles {
        facets.push(pick_distinct(rng, nv, 3));
    }
    let edges = if nv >= 2 { rng.gen_range(0..=4) } else { 0 };
    for _ in 0..edges {
        facets.push(pick_distinct(rng, nv, 2));
    }
    let r = rng.gen_range(1..=6);
    (ComplexDto { vertices, facets }, r)
}

fn pick_distinct(rng: &mut ChaCha8Rng, nv: usize, k: usize) -> Vec<String> {
    let mut chosen = Vec::new();
    while chosen.len() < k {
        let v = rng.gen_range(1..=nv).to_string();
        if !chosen.contains(&v) {
            chosen.push(v);
        }
    }
    chosen
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub index: u32,
    pub vertices: usize,
    pub facets: usize,
    pub r: i64,
    pub schedule_length: usize,
    pub refined_vertices: usize,
    pub relative_walls: usize,
    pub wall_identity: bool,
    pub key_formula: bool,
    pub structural: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub count: u32,
    pub passed: u32,
    pub failed: Vec<u32>,
    pub cases: Vec<CaseResult>,
}

impl CampaignReport {
    pub fn pass(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Runs `count` random cases under the given seed.
pub fn run_campaign(seed: u64, count: u32) -> Result<CampaignReport, CmdError> {
    if count == 0 {
        return Err(CmdError::Input("fuzz count must be at least 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count as usize);
    let mut failed = Vec::new();
    for index in 0..count {
        let (dto, r) = random_case(&mut rng);
        let result = run_case(index, &dto, r)?;
        if !result.pass {
            failed.push(index);
        }
        cases.push(result);
    }
    Ok(CampaignReport {
        seed,
        count,
        passed: count - failed.len() as u32,
        failed,
        cases,
    })
}

fn run_case(index: u32, dto: &ComplexDto, r: i64) -> Result<CaseResult, CmdError> {
    let complex = dto
        .to_complex()
        .map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?;
    let mut state = LocalFanState::initial_state(&complex, r)
        .map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?;
    let schedule = state
        .default_schedule()
        .map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?;
    let structural = state.check_terminal().regular;
    let refinement = Refinement::from_state(&state)
        .map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?;
    let tb = tables(&refinement).map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?;

    // Edges must refine into exactly r unit segments.
    let mut structural = structural;
    for edge in complex.simplices_of_dim(1) {
        structural &= refinement.cells_over(edge).len() as i64 == r;
    }

    let wall_identity = verify_wall_identity(&refinement, &tb).pass();
    let cycle = SymbolicOneCycle::generic(&refinement, &tb);
    let key_formula = verify_key_formula(&refinement, &tb, &cycle)
        .map_err(|e| CmdError::Engine(format!("case {index}: {e}")))?
        .pass();

    let pass = wall_identity && key_formula && structural;
    Ok(CaseResult {
        index,
        vertices: complex.vertex_count(),
        facets: complex.facets().count(),
        r,
        schedule_length: schedule.len(),
        refined_vertices: refinement.vertex_count(),
        relative_walls: tb.i.wall_count(),
        wall_identity,
        key_formula,
        structural,
        pass,
    })
}
