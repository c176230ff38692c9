//! Core of the fold workbench: a deterministic position-based cloth
//! simulator, the top-down pick-and-place fold engine, the interactive
//! session state machine with its demonstration log, IoU scoring, the
//! builtin goal shapes and the study-analysis statistics.

pub mod analysis;
pub mod cloth;
pub mod fold;
pub mod goals;
pub mod log;
pub mod mask;
pub mod pnm;
pub mod scoring;
pub mod session;

pub use cloth::{ClothError, ClothSpec, ClothState, GridSpec};
pub use fold::{FoldAction, FoldError, FoldParams, FoldResult, Trajectory};
pub use goals::{GoalId, GoalSpec};
pub use log::{DemonstrationLog, EventKind, LogEvent};
pub use mask::Mask;
pub use scoring::{HsvRange, ScoreError, TrialScore};
pub use session::{Command, MarkerKind, Session, SessionConfig, SessionError};
