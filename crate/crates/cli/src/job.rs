//! Job specifications: a base complex, a ramification index, and exactly one
//! way of producing the refinement (explicit schedule, imported
//! triangulation, or the default greedy resolution).

use serde::{Deserialize, Serialize};

use sstoric::json::{ComplexDto, RefinementDto};
use sstoric::refinement::Refinement;
use sstoric::resolution::{LocalFanState, ResolutionError};

use crate::CmdError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobSpec {
    pub complex: ComplexDto,
    pub r: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementDto>,
    /// Verification stages to run; defaults to all of them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commands: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// How the refinement of a job was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionMode {
    Imported,
    Schedule,
    Default,
}

impl ResolutionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResolutionMode::Imported => "imported",
            ResolutionMode::Schedule => "schedule",
            ResolutionMode::Default => "default",
        }
    }
}

pub struct ResolvedJob {
    pub refinement: Refinement,
    pub mode: ResolutionMode,
    /// The schedule that was executed, when one was.
    pub schedule: Option<Vec<String>>,
    pub notes: Vec<String>,
}

impl JobSpec {
    pub fn load(path: &std::path::Path) -> Result<(Self, Vec<u8>), CmdError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
        let job: JobSpec = serde_json::from_slice(&bytes)
            .map_err(|e| CmdError::Input(format!("invalid job file {}: {e}", path.display())))?;
        job.validate()?;
        Ok((job, bytes))
    }

    pub fn validate(&self) -> Result<(), CmdError> {
        if self.schedule.is_some() && self.refinement.is_some() {
            return Err(CmdError::Input(
                "a job may carry a schedule or an imported refinement, not both".to_string(),
            ));
        }
        if let Some(dto) = &self.refinement {
            if dto.base != self.complex {
                return Err(CmdError::Input(
                    "the imported refinement's base complex differs from the job's complex"
                        .to_string(),
                ));
            }
            if dto.r != self.r {
                return Err(CmdError::Input(format!(
                    "the imported refinement has r = {}, the job has r = {}",
                    dto.r, self.r
                )));
            }
        }
        Ok(())
    }

    /// Produces the validated refinement for this job.
    pub fn resolve(&self) -> Result<ResolvedJob, CmdError> {
        if let Some(dto) = &self.refinement {
            let refinement = dto
                .to_refinement()
                .map_err(|e| CmdError::Input(e.to_string()))?;
            return Ok(ResolvedJob {
                refinement,
                mode: ResolutionMode::Imported,
                schedule: None,
                notes: Vec::new(),
            });
        }
        let complex = self
            .complex
            .to_complex()
            .map_err(|e| CmdError::Input(e.to_string()))?;
        let mut state =
            LocalFanState::initial_state(&complex, self.r).map_err(map_resolution_error)?;
        let (mode, schedule) = match &self.schedule {
            Some(schedule) => {
                state.run_schedule(schedule).map_err(map_resolution_error)?;
                (ResolutionMode::Schedule, schedule.clone())
            }
            None => {
                let schedule = state.default_schedule().map_err(map_resolution_error)?;
                (ResolutionMode::Default, schedule)
            }
        };
        let refinement =
            Refinement::from_state(&state).map_err(|e| CmdError::Input(e.to_string()))?;
        Ok(ResolvedJob {
            refinement,
            mode,
            schedule: Some(schedule),
            notes: state.notes.clone(),
        })
    }
}

pub fn map_resolution_error(e: ResolutionError) -> CmdError {
    match e {
        ResolutionError::InvalidRamification(_)
        | ResolutionError::UnknownComponent(_)
        | ResolutionError::UnsupportedDimension(_)
        | ResolutionError::ConsistencyViolation(_) => CmdError::Input(e.to_string()),
        ResolutionError::CenterNotPresent { .. }
        | ResolutionError::NoProgress
        | ResolutionError::SupportLost(_) => CmdError::Engine(e.to_string()),
    }
}
