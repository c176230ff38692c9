//! Browser bindings: one in-page session with marker placement, fold
//! preview with undo, and final fold scored against a builtin goal.

use foldlab_core::cloth::rasterize_topdown;
use foldlab_core::goals::{builtin_goal, builtin_goals, render_goal, GoalId};
use foldlab_core::scoring::{completion_time, score_trial, DEFAULT_ALIGN_RADIUS};
use foldlab_core::session::downsample_frames;
use foldlab_core::{ClothState, Command, Mask, MarkerKind, Session, SessionConfig};
use nalgebra::Vector2;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Frames kept per preview or fold animation.
const MAX_FRAMES: usize = 60;

fn flat_positions(s: &ClothState) -> Vec<f32> {
    s.positions.iter().flat_map(|p| [p.x as f32, p.y as f32, p.z as f32]).collect()
}

fn mask_bytes(m: &Mask) -> Vec<u8> {
    m.bits().iter().map(|&b| b as u8).collect()
}

/// Builtin goals as JSON: id, name and description.
#[wasm_bindgen]
pub fn goal_catalog() -> String {
    let goals: Vec<_> = builtin_goals()
        .into_iter()
        .map(|g| json!({ "id": g.id, "name": g.name, "description": g.description }))
        .collect();
    serde_json::Value::from(goals).to_string()
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
    goal: Mask,
    frames: Vec<ClothState>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(goal: &str, n_folds: usize, preview: bool) -> Result<Demo, String> {
        let goal_id: GoalId = goal.parse().map_err(|e: foldlab_core::goals::GoalError| e.to_string())?;
        let config = SessionConfig {
            n_folds,
            preview_enabled: preview,
            goal_id,
            ..SessionConfig::default()
        };
        let mask = render_goal(&builtin_goal(goal_id), &config.cloth, &config.fold, &config.grid)
            .map_err(|e| e.to_string())?;
        let session = Session::new(config).map_err(|e| e.to_string())?;
        Ok(Demo {
            frames: vec![session.cloth().clone()],
            session,
            goal: mask,
        })
    }

    /// Session state as JSON: slots, counters and which commands are enabled.
    pub fn state(&self) -> String {
        serde_json::to_string(&self.session.snapshot()).expect("snapshots serialize")
    }

    pub fn workspace_side(&self) -> f64 {
        self.session.config().grid.workspace_side
    }

    pub fn grid_pixels(&self) -> usize {
        self.session.config().grid.pixels_per_side
    }

    /// Places or moves a marker; `kind` is "pick" or "place".
    pub fn place_marker(&mut self, pair: usize, kind: &str, x: f64, y: f64, t_ms: f64) -> Result<(), String> {
        let kind = match kind {
            "pick" => MarkerKind::Pick,
            "place" => MarkerKind::Place,
            other => return Err(format!("unknown marker kind {other:?}")),
        };
        self.session
            .place_marker(pair, kind, Vector2::new(x, y), t_ms.max(0.0) as u64)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    /// Previews the next marker pair; returns the number of animation frames.
    pub fn simulate(&mut self, t_ms: f64) -> Result<usize, String> {
        self.run(Command::Simulate, t_ms)
    }

    /// Reverts the last preview.
    pub fn undo(&mut self, t_ms: f64) -> Result<usize, String> {
        self.run(Command::Undo, t_ms)
    }

    /// Executes every pair from the flat cloth and returns the score as JSON.
    pub fn fold(&mut self, t_ms: f64) -> Result<String, String> {
        self.run(Command::Fold, t_ms)?;
        let result = self.result_mask_inner();
        let mut score = score_trial(&result, &self.goal, DEFAULT_ALIGN_RADIUS).map_err(|e| e.to_string())?;
        score.completion_time = completion_time(self.session.log()).ok();
        Ok(json!({
            "iou": score.iou,
            "offset": score.offset,
            "completion_time": score.completion_time,
        })
        .to_string())
    }

    pub fn reset(&mut self, t_ms: f64) -> Result<usize, String> {
        self.run(Command::Reset, t_ms)
    }

    fn run(&mut self, cmd: Command, t_ms: f64) -> Result<usize, String> {
        let out = self
            .session
            .apply_command(cmd, t_ms.max(0.0) as u64)
            .map_err(|e| e.to_string())?;
        self.frames = if out.frames.is_empty() {
            vec![self.session.cloth().clone()]
        } else {
            downsample_frames(&out.frames, MAX_FRAMES)
        };
        Ok(self.frames.len())
    }

    /// Animation frames held from the last command.
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Flat x, y, z positions of animation frame `index` from the last command.
    pub fn frame(&self, index: usize) -> Vec<f32> {
        self.frames.get(index).map(flat_positions).unwrap_or_default()
    }

    /// Flat x, y, z positions of the current cloth.
    pub fn positions(&self) -> Vec<f32> {
        flat_positions(self.session.cloth())
    }

    /// Triangle vertex indices, three per triangle.
    pub fn triangles(&self) -> Vec<u32> {
        self.session
            .cloth()
            .topology
            .triangles
            .iter()
            .flat_map(|t| t.map(|i| i as u32))
            .collect()
    }

    /// Goal occupancy, row-major from the north edge, 1 for cloth.
    pub fn goal_mask(&self) -> Vec<u8> {
        mask_bytes(&self.goal)
    }

    /// Top-down occupancy of the current cloth, same layout as the goal.
    pub fn result_mask(&self) -> Vec<u8> {
        mask_bytes(&self.result_mask_inner())
    }

    /// The demonstration log as NDJSON.
    pub fn export_log(&self) -> String {
        self.session.export_log().to_ndjson()
    }
}

impl Demo {
    fn result_mask_inner(&self) -> Mask {
        rasterize_topdown(self.session.cloth(), &self.session.config().grid)
    }

    pub fn session(&self) -> &Session {
        &self.session
    }
}
