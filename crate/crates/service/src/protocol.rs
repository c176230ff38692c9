//! Wire messages. Every frame is one JSON object; client frames carry
//! `kind`, `session` and `payload`, server frames add a per-session `seq`.

use foldlab_core::cloth::ClothState;
use foldlab_core::session::{Command, MarkerKind};
use foldlab_core::Mask;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientKind {
    CreateSession,
    PlaceMarker,
    Command,
    GetState,
    ListGoals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientMessage {
    pub kind: ClientKind,
    #[serde(default)]
    pub session: Option<String>,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServerKind {
    SessionCreated,
    StateSnapshot,
    PreviewFrames,
    FoldResult,
    Score,
    GoalList,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerMessage {
    pub seq: u64,
    pub session: Option<String>,
    pub kind: ServerKind,
    pub payload: Value,
}

impl ServerMessage {
    pub fn error_code(&self) -> Option<&str> {
        (self.kind == ServerKind::Error)
            .then(|| self.payload.get("code").and_then(Value::as_str))
            .flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceMarkerPayload {
    pub pair: usize,
    pub kind: MarkerKind,
    pub x: f64,
    pub y: f64,
    /// Client-supplied session time; defaults to the server clock.
    #[serde(default)]
    pub t_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandPayload {
    pub command: Command,
    #[serde(default)]
    pub t_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: String,
    pub message: String,
}

/// Mask as alternating clear/set run lengths over row-major pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMask {
    pub width: usize,
    pub height: usize,
    pub runs: Vec<usize>,
}

impl From<&Mask> for WireMask {
    fn from(m: &Mask) -> Self {
        Self {
            width: m.width(),
            height: m.height(),
            runs: m.to_runs(),
        }
    }
}

impl WireMask {
    pub fn to_mask(&self) -> Option<Mask> {
        Mask::from_runs(self.width, self.height, &self.runs)
    }
}

/// Full-precision cloth pose, used where results must compare bitwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCloth {
    pub resolution: usize,
    pub sim_time: f64,
    pub positions: Vec<[f64; 3]>,
}

impl From<&ClothState> for WireCloth {
    fn from(s: &ClothState) -> Self {
        Self {
            resolution: s.resolution(),
            sim_time: s.sim_time,
            positions: s.positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
        }
    }
}

/// Frames sent per fold at most.
pub const MAX_FRAMES_PER_FOLD: usize = 60;
