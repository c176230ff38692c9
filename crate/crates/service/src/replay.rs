//! Re-running demonstration logs.

use foldlab_core::cloth::rasterize_topdown;
use foldlab_core::goals::{builtin_goal, render_goal};
use foldlab_core::scoring::{completion_time, score_trial, DEFAULT_ALIGN_RADIUS};
use foldlab_core::session::{replay_log, ReplayError as CoreReplayError};
use foldlab_core::{DemonstrationLog, Mask, Session, TrialScore};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("divergent log: {0}")]
    DivergentLog(String),
}

impl ReplayError {
    pub fn code(&self) -> &'static str {
        match self {
            ReplayError::SchemaError(_) => "schema_error",
            ReplayError::DivergentLog(_) => "divergent_log",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub session: Session,
    pub mask: Mask,
    pub score: TrialScore,
}

/// Parses NDJSON text and replays it.
pub fn replay_text(text: &str) -> Result<ReplayOutcome, ReplayError> {
    let log = DemonstrationLog::from_ndjson(text).map_err(|e| ReplayError::SchemaError(e.to_string()))?;
    replay(&log)
}

/// Drives a fresh session through the log and scores the final cloth
/// against the session's goal.
pub fn replay(log: &DemonstrationLog) -> Result<ReplayOutcome, ReplayError> {
    let session = replay_log(log).map_err(|e| match e {
        CoreReplayError::Schema(e) => ReplayError::SchemaError(e.to_string()),
        e @ CoreReplayError::Divergent { .. } => ReplayError::DivergentLog(e.to_string()),
    })?;
    let config = session.config();
    let mask = rasterize_topdown(session.cloth(), &config.grid);
    let goal = render_goal(&builtin_goal(config.goal_id), &config.cloth, &config.fold, &config.grid)
        .map_err(|e| ReplayError::SchemaError(e.to_string()))?;
    let mut score = score_trial(&mask, &goal, DEFAULT_ALIGN_RADIUS).expect("same grid");
    score.completion_time = completion_time(session.log()).ok();
    Ok(ReplayOutcome { session, mask, score })
}
