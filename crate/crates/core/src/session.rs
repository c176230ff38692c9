//! Interactive fold session: Pick/Place marker slots, the
//! Simulate/Fold/Undo/Reset command machine and its demonstration log.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::cloth::{create_cloth, ClothSpec, ClothState, GridSpec};
use crate::fold::{execute_fold, FoldAction, FoldError, FoldParams};
use crate::goals::GoalId;
use crate::log::{DemonstrationLog, EventKind, LogError, LogEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerKind {
    Pick,
    Place,
}

impl MarkerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MarkerKind::Pick => "pick",
            MarkerKind::Place => "place",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Fold,
    Undo,
    Reset,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Simulate, Command::Fold, Command::Undo, Command::Reset];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Fold => "fold",
            Command::Undo => "undo",
            Command::Reset => "reset",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no such marker slot: {0}")]
    NoSuchSlot(String),
    #[error("session already executed its fold")]
    SessionFinished,
    #[error("pair {0} is locked by a simulated fold; undo first")]
    PairLocked(usize),
    #[error("{} is disabled when preview is off", .0.as_str())]
    CommandDisabled(Command),
    #[error("no fully placed pair is waiting to be simulated")]
    NothingToSimulate,
    #[error("undo stack is empty")]
    NothingToUndo,
    #[error("not all marker pairs are placed")]
    MarkersIncomplete,
    #[error("invalid fold action: {0}")]
    InvalidAction(String),
}

impl SessionError {
    /// Stable snake_case code used on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidConfig(_) => "invalid_config",
            SessionError::NoSuchSlot(_) => "no_such_slot",
            SessionError::SessionFinished => "session_finished",
            SessionError::PairLocked(_) => "pair_locked",
            SessionError::CommandDisabled(_) => "command_disabled",
            SessionError::NothingToSimulate => "nothing_to_simulate",
            SessionError::NothingToUndo => "nothing_to_undo",
            SessionError::MarkersIncomplete => "markers_incomplete",
            SessionError::InvalidAction(_) => "invalid_action",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub n_folds: usize,
    pub preview_enabled: bool,
    pub goal_id: GoalId,
    pub cloth: ClothSpec,
    pub fold: FoldParams,
    pub grid: GridSpec,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n_folds: 2,
            preview_enabled: true,
            goal_id: GoalId::G1,
            cloth: ClothSpec::default(),
            fold: FoldParams::default(),
            grid: GridSpec::default(),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), SessionError> {
        let bad = |e: &dyn std::fmt::Display| SessionError::InvalidConfig(e.to_string());
        if self.n_folds == 0 {
            return Err(SessionError::InvalidConfig("n_folds must be at least 1".into()));
        }
        self.cloth.validate().map_err(|e| bad(&e))?;
        self.fold.validate().map_err(|e| bad(&e))?;
        self.grid.validate().map_err(|e| bad(&e))?;
        if self.cloth.side_length > self.grid.workspace_side {
            return Err(SessionError::InvalidConfig("cloth does not fit in the workspace".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerSlot {
    pub pair_index: usize,
    pub kind: MarkerKind,
    pub position: Option<[f64; 2]>,
    /// Session time in milliseconds of the latest placement.
    pub placed_at: Option<u64>,
}

/// Result of a successful command.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub command: Command,
    /// Animation frames; empty for Undo and Reset.
    pub frames: Vec<ClothState>,
    /// Pairs whose pick point missed the cloth and were applied as no-ops.
    pub missed_pairs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    slots: Vec<MarkerSlot>,
    initial: ClothState,
    cloth: ClothState,
    undo_stack: Vec<(ClothState, usize)>,
    simulated_pairs: usize,
    executed: bool,
    log: DemonstrationLog,
}

impl Session {
    /// Starts a session with a flat cloth centered in the workspace and logs
    /// `session_start` at t = 0.
    pub fn new(config: SessionConfig) -> Result<Self, SessionError> {
        config.validate()?;
        let initial = create_cloth(&config.cloth, config.grid.center())
            .map_err(|e| SessionError::InvalidConfig(e.to_string()))?;
        let start = LogEvent {
            t_ms: 0,
            event: EventKind::SessionStart,
            payload: json!({ "config": config }),
        };
        let mut s = Self {
            config,
            slots: Vec::new(),
            cloth: initial.clone(),
            initial,
            undo_stack: Vec::new(),
            simulated_pairs: 0,
            executed: false,
            log: DemonstrationLog::new(vec![start]),
        };
        s.spawn_pair(0);
        Ok(s)
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn cloth(&self) -> &ClothState {
        &self.cloth
    }

    pub fn initial_cloth(&self) -> &ClothState {
        &self.initial
    }

    /// Visible slots, two per spawned pair.
    pub fn slots(&self) -> &[MarkerSlot] {
        &self.slots
    }

    pub fn simulated_pairs(&self) -> usize {
        self.simulated_pairs
    }

    pub fn undo_depth(&self) -> usize {
        self.undo_stack.len()
    }

    pub fn executed(&self) -> bool {
        self.executed
    }

    pub fn log(&self) -> &DemonstrationLog {
        &self.log
    }

    pub fn export_log(&self) -> DemonstrationLog {
        self.log.clone()
    }

    /// Index of the pair currently accepting new markers.
    pub fn active_pair(&self) -> usize {
        self.complete_pairs().min(self.config.n_folds - 1)
    }

    fn spawn_pair(&mut self, pair: usize) {
        for kind in [MarkerKind::Pick, MarkerKind::Place] {
            self.slots.push(MarkerSlot {
                pair_index: pair,
                kind,
                position: None,
                placed_at: None,
            });
        }
    }

    fn slot(&self, pair: usize, kind: MarkerKind) -> Option<&MarkerSlot> {
        self.slots.get(2 * pair + (kind == MarkerKind::Place) as usize)
    }

    fn pair_complete(&self, pair: usize) -> bool {
        [MarkerKind::Pick, MarkerKind::Place]
            .iter()
            .all(|&k| self.slot(pair, k).is_some_and(|s| s.position.is_some()))
    }

    /// Number of leading fully placed pairs.
    pub fn complete_pairs(&self) -> usize {
        (0..self.config.n_folds).take_while(|&p| self.pair_complete(p)).count()
    }

    fn next_t(&self, t_ms: u64) -> u64 {
        t_ms.max(self.log.last().map_or(0, |e| e.t_ms))
    }

    fn push_event(&mut self, t_ms: u64, event: EventKind, payload: serde_json::Value) -> u64 {
        let t_ms = self.next_t(t_ms);
        self.log.events.push(LogEvent { t_ms, event, payload });
        t_ms
    }

    /// Places or moves a marker; the position is clamped to the workspace.
    pub fn place_marker(
        &mut self,
        pair: usize,
        kind: MarkerKind,
        position: Vector2<f64>,
        t_ms: u64,
    ) -> Result<[f64; 2], SessionError> {
        if self.executed {
            return Err(SessionError::SessionFinished);
        }
        if pair >= self.config.n_folds || self.slot(pair, kind).is_none() {
            return Err(SessionError::NoSuchSlot(format!("pair {pair} {} is not visible", kind.as_str())));
        }
        if kind == MarkerKind::Place && self.slot(pair, MarkerKind::Pick).is_none_or(|s| s.position.is_none()) {
            return Err(SessionError::NoSuchSlot(format!("pair {pair} place requires its pick first")));
        }
        if pair < self.simulated_pairs {
            return Err(SessionError::PairLocked(pair));
        }
        let p = self.config.grid.clamp(position);
        let t = self.push_event(
            t_ms,
            EventKind::MarkerPlaced,
            json!({ "pair": pair, "kind": kind.as_str(), "x": p.x, "y": p.y }),
        );
        let idx = 2 * pair + (kind == MarkerKind::Place) as usize;
        self.slots[idx].position = Some([p.x, p.y]);
        self.slots[idx].placed_at = Some(t);
        let spawned = self.slots.len() / 2;
        if self.pair_complete(pair) && pair + 1 == spawned && spawned < self.config.n_folds {
            self.spawn_pair(spawned);
        }
        Ok([p.x, p.y])
    }

    fn action(&self, pair: usize) -> Result<FoldAction, SessionError> {
        let pos = |k| self.slot(pair, k).and_then(|s: &MarkerSlot| s.position).expect("pair is complete");
        let [px, py] = pos(MarkerKind::Pick);
        let [qx, qy] = pos(MarkerKind::Place);
        let a = FoldAction::new(Vector2::new(px, py), Vector2::new(qx, qy));
        a.validate(Some(&self.config.grid))
            .map_err(|e| SessionError::InvalidAction(e.to_string()))?;
        Ok(a)
    }

    /// Marker pairs as fold actions, in pair order, for complete pairs only.
    pub fn actions(&self) -> Vec<FoldAction> {
        (0..self.complete_pairs()).filter_map(|p| self.action(p).ok()).collect()
    }

    pub fn can_apply(&self, command: Command) -> Result<(), SessionError> {
        let preview_only = matches!(command, Command::Simulate | Command::Undo);
        if preview_only && !self.config.preview_enabled {
            return Err(SessionError::CommandDisabled(command));
        }
        if command != Command::Reset && self.executed {
            return Err(SessionError::SessionFinished);
        }
        match command {
            Command::Simulate if self.simulated_pairs >= self.complete_pairs() => Err(SessionError::NothingToSimulate),
            Command::Simulate => self.action(self.simulated_pairs).map(|_| ()),
            Command::Undo if self.undo_stack.is_empty() => Err(SessionError::NothingToUndo),
            Command::Fold if self.complete_pairs() < self.config.n_folds => Err(SessionError::MarkersIncomplete),
            Command::Fold => (0..self.config.n_folds).try_for_each(|p| self.action(p).map(|_| ())),
            _ => Ok(()),
        }
    }

    fn run_fold(&self, state: &ClothState, action: &FoldAction) -> Result<Option<crate::fold::FoldResult>, SessionError> {
        match execute_fold(state, &self.config.cloth, action, &self.config.fold) {
            Ok(r) => Ok(Some(r)),
            Err(FoldError::NothingGrasped) => Ok(None),
            Err(e) => Err(SessionError::InvalidAction(e.to_string())),
        }
    }

    /// Applies a command; on error the session is left untouched.
    pub fn apply_command(&mut self, command: Command, t_ms: u64) -> Result<CommandOutcome, SessionError> {
        self.can_apply(command)?;
        let mut out = CommandOutcome {
            command,
            frames: Vec::new(),
            missed_pairs: Vec::new(),
        };
        match command {
            Command::Simulate => {
                let pair = self.simulated_pairs;
                let action = self.action(pair)?;
                let result = self.run_fold(&self.cloth, &action)?;
                self.undo_stack.push((self.cloth.clone(), self.simulated_pairs));
                match result {
                    Some(r) => {
                        out.frames = r.frames;
                        self.cloth = r.final_state;
                    }
                    None => {
                        out.frames = vec![self.cloth.clone()];
                        out.missed_pairs.push(pair);
                    }
                }
                self.simulated_pairs += 1;
                self.push_event(t_ms, EventKind::Simulate, json!({ "pair": pair }));
            }
            Command::Undo => {
                let (cloth, pairs) = self.undo_stack.pop().expect("checked non-empty");
                self.cloth = cloth;
                self.simulated_pairs = pairs;
                self.push_event(t_ms, EventKind::Undo, json!({ "pair": pairs }));
            }
            Command::Fold => {
                let actions: Vec<FoldAction> = (0..self.config.n_folds)
                    .map(|p| self.action(p))
                    .collect::<Result<_, _>>()?;
                let mut st = self.initial.clone();
                let mut frames = Vec::new();
                for (pair, a) in actions.iter().enumerate() {
                    match self.run_fold(&st, a)? {
                        Some(r) => {
                            frames.extend(r.frames);
                            st = r.final_state;
                        }
                        None => out.missed_pairs.push(pair),
                    }
                }
                if frames.is_empty() {
                    frames.push(st.clone());
                }
                let sim_ms = ((st.sim_time - self.initial.sim_time) * 1000.0).round() as u64;
                let t0 = self.push_event(t_ms, EventKind::FoldStart, json!({ "pairs": self.config.n_folds }));
                self.push_event(
                    t0 + sim_ms,
                    EventKind::FoldComplete,
                    json!({ "sim_ms": sim_ms, "missed_pairs": out.missed_pairs }),
                );
                out.frames = frames;
                self.cloth = st;
                self.undo_stack.clear();
                self.simulated_pairs = self.config.n_folds;
                self.executed = true;
            }
            Command::Reset => {
                self.slots.clear();
                self.spawn_pair(0);
                self.cloth = self.initial.clone();
                self.undo_stack.clear();
                self.simulated_pairs = 0;
                self.executed = false;
                self.push_event(t_ms, EventKind::Reset, json!({}));
            }
        }
        Ok(out)
    }

    /// Compact view for clients.
    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            n_folds: self.config.n_folds,
            preview_enabled: self.config.preview_enabled,
            goal_id: self.config.goal_id,
            slots: self.slots.clone(),
            active_pair: self.active_pair(),
            simulated_pairs: self.simulated_pairs,
            undo_depth: self.undo_stack.len(),
            executed: self.executed,
            can_simulate: self.can_apply(Command::Simulate).is_ok(),
            can_undo: self.can_apply(Command::Undo).is_ok(),
            can_fold: self.can_apply(Command::Fold).is_ok(),
            cloth: CompactCloth::from(&self.cloth),
        }
    }
}

/// Positions rounded to 0.1 mm plus the triangle list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactCloth {
    pub resolution: usize,
    pub sim_time: f64,
    pub positions: Vec<[f64; 3]>,
}

impl From<&ClothState> for CompactCloth {
    fn from(s: &ClothState) -> Self {
        let r = |v: f64| (v * 1e4).round() / 1e4;
        Self {
            resolution: s.resolution(),
            sim_time: s.sim_time,
            positions: s.positions.iter().map(|p| [r(p.x), r(p.y), r(p.z)]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub n_folds: usize,
    pub preview_enabled: bool,
    pub goal_id: GoalId,
    pub slots: Vec<MarkerSlot>,
    pub active_pair: usize,
    pub simulated_pairs: usize,
    pub undo_depth: usize,
    pub executed: bool,
    pub can_simulate: bool,
    pub can_undo: bool,
    pub can_fold: bool,
    pub cloth: CompactCloth,
}

/// Evenly thins `frames` to at most `max` entries, always keeping the first
/// and last.
pub fn downsample_frames<T: Clone>(frames: &[T], max: usize) -> Vec<T> {
    if frames.len() <= max {
        return frames.to_vec();
    }
    if max < 2 {
        return frames.last().into_iter().take(max).cloned().collect();
    }
    let last = frames.len() - 1;
    (0..max).map(|k| frames[k * last / (max - 1)].clone()).collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error(transparent)]
    Schema(#[from] LogError),
    #[error("event {index}: {message}")]
    Divergent { index: usize, message: String },
}

fn divergent(index: usize, message: impl Into<String>) -> ReplayError {
    ReplayError::Divergent {
        index,
        message: message.into(),
    }
}

/// Re-drives a fresh session through the logged placements and commands.
/// The session configuration is taken from the `session_start` payload.
pub fn replay_log(log: &DemonstrationLog) -> Result<Session, ReplayError> {
    log.validate()?;
    let start = &log.events[0];
    let config: SessionConfig = serde_json::from_value(start.payload.get("config").cloned().unwrap_or(json!({})))
        .map_err(|e| LogError::Schema(format!("session_start config: {e}")))?;
    let mut session = Session::new(config).map_err(|e| LogError::Schema(e.to_string()))?;
    for (i, e) in log.events.iter().enumerate().skip(1) {
        let t = e.t_ms;
        let cmd = match e.event {
            EventKind::MarkerPlaced => {
                let p = &e.payload;
                let pair = p.get("pair").and_then(|v| v.as_u64()).ok_or_else(|| divergent(i, "missing pair"))?;
                let kind: MarkerKind = p
                    .get("kind")
                    .cloned()
                    .and_then(|k| serde_json::from_value(k).ok())
                    .ok_or_else(|| divergent(i, "bad marker kind"))?;
                let coord = |k: &str| p.get(k).and_then(|v| v.as_f64()).ok_or_else(|| divergent(i, format!("missing {k}")));
                let pos = Vector2::new(coord("x")?, coord("y")?);
                session
                    .place_marker(pair as usize, kind, pos, t)
                    .map_err(|err| divergent(i, err.to_string()))?;
                continue;
            }
            EventKind::Simulate => Command::Simulate,
            EventKind::Undo => Command::Undo,
            EventKind::Reset => Command::Reset,
            EventKind::FoldStart => Command::Fold,
            // emitted together with fold_start
            EventKind::FoldComplete => continue,
            EventKind::SessionStart => unreachable!("validated"),
        };
        session.apply_command(cmd, t).map_err(|err| divergent(i, err.to_string()))?;
    }
    Ok(session)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloth::GridSpec;
    use crate::fold::execute_sequence;

    fn v(x: f64, y: f64) -> Vector2<f64> {
        Vector2::new(x, y)
    }

    fn config(n: usize, preview: bool) -> SessionConfig {
        SessionConfig {
            n_folds: n,
            preview_enabled: preview,
            ..SessionConfig::default()
        }
    }

    fn half_fold_markers(s: &mut Session, pair: usize) {
        let g = GridSpec::default();
        s.place_marker(pair, MarkerKind::Pick, g.cloth_point(0.3, [0.0, 0.5]), 10).unwrap();
        s.place_marker(pair, MarkerKind::Place, g.cloth_point(0.3, [1.0, 0.5]), 20).unwrap();
    }

    #[test]
    fn new_session_states() {
        let s = Session::new(config(2, true)).unwrap();
        assert_eq!(s.slots().len(), 2);
        assert_eq!(s.simulated_pairs(), 0);
        assert!(s.cloth().bit_eq(s.initial_cloth()));
        assert_eq!(s.log().len(), 1);
        assert_eq!(s.log().events[0].event, EventKind::SessionStart);

        let off = Session::new(config(1, false)).unwrap();
        assert_eq!(off.can_apply(Command::Simulate), Err(SessionError::CommandDisabled(Command::Simulate)));
        assert_eq!(off.can_apply(Command::Undo), Err(SessionError::CommandDisabled(Command::Undo)));
        assert!(matches!(Session::new(config(0, true)), Err(SessionError::InvalidConfig(_))));
    }

    #[test]
    fn marker_rules() {
        let mut s = Session::new(config(2, true)).unwrap();
        assert!(matches!(
            s.place_marker(0, MarkerKind::Place, v(0.1, 0.1), 0),
            Err(SessionError::NoSuchSlot(_))
        ));
        assert!(matches!(
            s.place_marker(1, MarkerKind::Pick, v(0.1, 0.1), 0),
            Err(SessionError::NoSuchSlot(_))
        ));
        s.place_marker(0, MarkerKind::Pick, v(0.05, 0.15), 5).unwrap();
        assert_eq!(s.slots()[0].position, Some([0.05, 0.15]));
        assert_eq!(s.place_marker(0, MarkerKind::Place, v(9.0, 9.0), 6).unwrap(), [0.5, 0.5]);
        assert_eq!(s.slots().len(), 4);
        // overwrite before simulating is allowed
        s.place_marker(0, MarkerKind::Place, v(0.3, 0.2), 7).unwrap();
        assert_eq!(s.slots().len(), 4);
        assert_eq!(s.active_pair(), 1);
    }

    #[test]
    fn simulate_undo_restores_bitwise() {
        let mut s = Session::new(config(2, true)).unwrap();
        half_fold_markers(&mut s, 0);
        let before = s.cloth().clone();
        let out = s.apply_command(Command::Simulate, 30).unwrap();
        assert!(!out.frames.is_empty());
        assert!(!s.cloth().bit_eq(&before));
        assert!(matches!(
            s.place_marker(0, MarkerKind::Pick, v(0.2, 0.2), 31),
            Err(SessionError::PairLocked(0))
        ));
        assert_eq!(s.apply_command(Command::Simulate, 32).unwrap_err(), SessionError::NothingToSimulate);
        s.apply_command(Command::Undo, 40).unwrap();
        assert!(s.cloth().bit_eq(&before));
        assert_eq!(s.simulated_pairs(), 0);
        assert_eq!(s.apply_command(Command::Undo, 41).unwrap_err(), SessionError::NothingToUndo);
        s.place_marker(0, MarkerKind::Pick, v(0.2, 0.2), 42).unwrap();
    }

    #[test]
    fn fold_matches_direct_execution_and_replays() {
        let mut s = Session::new(config(2, true)).unwrap();
        assert_eq!(s.apply_command(Command::Fold, 1).unwrap_err(), SessionError::MarkersIncomplete);
        half_fold_markers(&mut s, 0);
        let g = GridSpec::default();
        s.place_marker(1, MarkerKind::Pick, g.cloth_point(0.3, [0.75, 0.0]), 50).unwrap();
        s.place_marker(1, MarkerKind::Place, g.cloth_point(0.3, [0.75, 1.0]), 60).unwrap();
        s.apply_command(Command::Simulate, 70).unwrap();
        s.apply_command(Command::Fold, 80).unwrap();
        assert!(s.executed());
        let cfg = s.config().clone();
        let direct = execute_sequence(s.initial_cloth(), &cfg.cloth, &s.actions(), &cfg.fold).unwrap();
        assert!(s.cloth().bit_eq(&direct));
        let log = s.export_log();
        assert_eq!(log.last().unwrap().event, EventKind::FoldComplete);
        log.validate().unwrap();
        assert_eq!(s.place_marker(0, MarkerKind::Pick, v(0.1, 0.1), 99).unwrap_err(), SessionError::SessionFinished);

        let text = log.to_ndjson();
        let replayed = replay_log(&DemonstrationLog::from_ndjson(&text).unwrap()).unwrap();
        assert!(replayed.cloth().bit_eq(s.cloth()));
        assert_eq!(replayed.export_log(), log);

        s.apply_command(Command::Reset, 200).unwrap();
        assert!(s.cloth().bit_eq(s.initial_cloth()));
        assert!(!s.executed());
        assert_eq!(s.slots().len(), 2);
        assert!(s.slots().iter().all(|m| m.position.is_none()));
    }

    #[test]
    fn replay_rejects_bad_logs() {
        assert!(matches!(replay_log(&DemonstrationLog::default()), Err(ReplayError::Schema(_))));
        let s = Session::new(config(2, true)).unwrap();
        let mut log = s.export_log();
        log.events.push(LogEvent {
            t_ms: 5,
            event: EventKind::FoldStart,
            payload: json!({}),
        });
        log.events.push(LogEvent {
            t_ms: 6,
            event: EventKind::FoldComplete,
            payload: json!({}),
        });
        assert!(matches!(replay_log(&log), Err(ReplayError::Divergent { index: 1, .. })));
    }

    #[test]
    fn downsampling_keeps_ends() {
        let v: Vec<usize> = (0..200).collect();
        let d = downsample_frames(&v, 60);
        assert_eq!(d.len(), 60);
        assert_eq!((d[0], d[59]), (0, 199));
        assert_eq!(downsample_frames(&v[..10], 60).len(), 10);
    }
}
