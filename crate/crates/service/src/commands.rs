//! Batch subcommands. Each returns the text to print on success.

use std::path::Path;

use foldlab_core::analysis::{analyze, read_records, AnalysisError};
use foldlab_core::goals::{builtin_goal, builtin_goals, render_goal, GoalId};
use foldlab_core::pnm::{self, PnmError};
use foldlab_core::scoring::{score_trial, segment_hsv, HsvRange, ScoreError};
use foldlab_core::session::SessionConfig;
use foldlab_core::Mask;
use serde_json::json;
use thiserror::Error;

use crate::replay::{replay_text, ReplayError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: exit code 2.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            // a missing or unreadable input is a bad argument
            std::io::ErrorKind::NotFound | std::io::ErrorKind::InvalidData => CliError::Validation(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<PnmError> for CliError {
    fn from(e: PnmError) -> Self {
        match e {
            PnmError::Io(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ReplayError> for CliError {
    fn from(e: ReplayError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Blue-cloth thresholds used when a pixmap is scored without `--hsv`.
pub fn default_hsv() -> HsvRange {
    HsvRange::new([180.0, 270.0], [0.3, 1.0], [0.2, 1.0]).expect("constant range is valid")
}

/// Parses `h0,h1,s0,s1,v0,v1`.
pub fn parse_hsv(text: &str) -> Result<HsvRange, CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Validation(format!("--hsv: {e}")))?;
    let [h0, h1, s0, s1, v0, v1] = v[..] else {
        return Err(CliError::Validation("--hsv expects six comma-separated numbers".into()));
    };
    Ok(HsvRange::new([h0, h1], [s0, s1], [v0, v1])?)
}

/// Reads a P5 mask, or segments a P6 photo with `hsv`.
pub fn load_result_mask(path: &Path, hsv: Option<&HsvRange>) -> Result<Mask, CliError> {
    let bytes = std::fs::read(path)?;
    if pnm::is_pixmap(&bytes) {
        let img = pnm::decode_rgb(&bytes)?;
        let range = hsv.copied().unwrap_or_else(default_hsv);
        Ok(segment_hsv(&img, &range)?)
    } else {
        Ok(pnm::decode_mask(&bytes)?)
    }
}

/// A builtin goal id renders with the default configuration; anything else
/// is read as a P5 file.
pub fn load_goal_mask(goal: &str) -> Result<Mask, CliError> {
    match goal.parse::<GoalId>() {
        Ok(id) => {
            let c = SessionConfig::default();
            render_goal(&builtin_goal(id), &c.cloth, &c.fold, &c.grid).map_err(|e| CliError::Validation(e.to_string()))
        }
        Err(_) if Path::new(goal).exists() => Ok(pnm::read_mask(goal)?),
        Err(_) => Err(CliError::Validation(format!("{goal:?} is neither a goal id nor a file"))),
    }
}

pub fn score(result: &Path, goal: &str, hsv: Option<&HsvRange>, radius: usize) -> Result<String, CliError> {
    let result = load_result_mask(result, hsv)?;
    let goal = load_goal_mask(goal)?;
    let s = score_trial(&result, &goal, radius)?;
    Ok(json!({ "iou": s.iou, "offset": s.offset, "radius": radius }).to_string())
}

pub fn replay(log: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let text = std::fs::read_to_string(log)?;
    let r = replay_text(&text)?;
    if let Some(out) = out {
        pnm::write_mask(out, &r.mask)?;
    }
    Ok(json!({
        "goal_id": r.session.config().goal_id,
        "executed": r.session.executed(),
        "events": r.session.log().len(),
        "sim_time": r.session.cloth().sim_time,
        "iou": r.score.iou,
        "offset": r.score.offset,
        "completion_time": r.score.completion_time,
        "mask_area": r.mask.count(),
    })
    .to_string())
}

/// Writes `G1.pgm`..`G4.pgm` and `manifest.json` into `out`.
pub fn goals_render(out: &Path) -> Result<String, CliError> {
    std::fs::create_dir_all(out)?;
    let c = SessionConfig::default();
    let mut entries = Vec::new();
    for g in builtin_goals() {
        let mask = render_goal(&g, &c.cloth, &c.fold, &c.grid).map_err(|e| CliError::Validation(e.to_string()))?;
        let file = format!("{}.pgm", g.id);
        pnm::write_mask(out.join(&file), &mask)?;
        entries.push(json!({
            "id": g.id,
            "name": g.name,
            "description": g.description,
            "script": g.script,
            "file": file,
            "area_px": mask.count(),
        }));
    }
    let manifest = json!({ "grid": c.grid, "cloth": c.cloth, "fold": c.fold, "goals": entries });
    let text = serde_json::to_string_pretty(&manifest).expect("json values serialize");
    std::fs::write(out.join("manifest.json"), &text)?;
    Ok(format!("wrote {} goals to {}", entries.len(), out.display()))
}

pub fn analyze_csv(path: &Path) -> Result<String, CliError> {
    let file = std::fs::File::open(path)?;
    let records = read_records(file)?;
    let reports = analyze(&records)?;
    Ok(reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"))
}
