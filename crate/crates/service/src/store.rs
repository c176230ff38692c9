//! Session registry and message dispatch.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use foldlab_core::cloth::rasterize_topdown;
use foldlab_core::goals::{builtin_goal, builtin_goals, render_goal, GoalId};
use foldlab_core::log::event_line;
use foldlab_core::scoring::{completion_time, score_trial, DEFAULT_ALIGN_RADIUS};
use foldlab_core::session::{downsample_frames, CompactCloth, CommandOutcome, SessionConfig};
use foldlab_core::{Command, Mask, Session, SessionError};
use nalgebra::Vector2;
use serde::Serialize;
use serde_json::{json, Value};

use crate::protocol::{
    ClientKind, ClientMessage, CommandPayload, ErrorPayload, PlaceMarkerPayload, ServerKind, ServerMessage, WireCloth,
    WireMask, MAX_FRAMES_PER_FOLD,
};

struct Entry {
    session: Session,
    seq: u64,
    created: Instant,
    /// Log events already flushed to disk.
    persisted: usize,
    file: Option<File>,
}

/// Goal masks keyed by goal and the geometry they were rendered with.
#[derive(Default)]
pub struct GoalCache {
    masks: Mutex<HashMap<String, Arc<Mask>>>,
}

impl GoalCache {
    pub fn get(&self, id: GoalId, config: &SessionConfig) -> Arc<Mask> {
        let key = json!([id, config.cloth, config.fold, config.grid]).to_string();
        if let Some(m) = self.masks.lock().unwrap().get(&key) {
            return m.clone();
        }
        let mask = Arc::new(
            render_goal(&builtin_goal(id), &config.cloth, &config.fold, &config.grid)
                .expect("validated session configs render every builtin goal"),
        );
        self.masks.lock().unwrap().insert(key, mask.clone());
        mask
    }
}

pub struct SessionStore {
    data_dir: Option<PathBuf>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Entry>>>>,
    next_id: AtomicU64,
    loose_seq: AtomicU64,
    goals: GoalCache,
}

/// Outcome of one dispatch: the replies, all tagged with the same session.
struct Replies {
    session: Option<String>,
    items: Vec<(ServerKind, Value)>,
}

fn error(code: &str, message: impl Into<String>) -> (ServerKind, Value) {
    let p = ErrorPayload {
        code: code.to_string(),
        message: message.into(),
    };
    (ServerKind::Error, serde_json::to_value(p).expect("plain struct"))
}

fn session_error(e: &SessionError) -> (ServerKind, Value) {
    error(e.code(), e.to_string())
}

fn value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("protocol payloads serialize")
}

impl SessionStore {
    /// A store that persists logs to `data_dir` when given.
    pub fn new(data_dir: Option<PathBuf>) -> Self {
        Self {
            data_dir,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            loose_seq: AtomicU64::new(0),
            goals: GoalCache::default(),
        }
    }

    pub fn goal_mask(&self, id: GoalId, config: &SessionConfig) -> Arc<Mask> {
        self.goals.get(id, config)
    }

    /// Parses and dispatches one text frame.
    pub fn handle_text(&self, text: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(msg) => self.handle_message(msg),
            Err(e) => {
                let session = serde_json::from_str::<Value>(text)
                    .ok()
                    .and_then(|v| v.get("session").and_then(Value::as_str).map(str::to_string));
                self.stamp(Replies {
                    session,
                    items: vec![error("bad_request", e.to_string())],
                })
            }
        }
    }

    pub fn handle_message(&self, msg: ClientMessage) -> Vec<ServerMessage> {
        let replies = match msg.kind {
            ClientKind::CreateSession => self.create(msg.payload),
            ClientKind::ListGoals => Replies {
                session: msg.session,
                items: vec![(ServerKind::GoalList, self.goal_list())],
            },
            ClientKind::PlaceMarker | ClientKind::Command | ClientKind::GetState => self.dispatch(msg),
        };
        self.stamp(replies)
    }

    fn stamp(&self, replies: Replies) -> Vec<ServerMessage> {
        let entry = replies.session.as_ref().and_then(|id| self.entry(id));
        let next = || match &entry {
            Some(e) => {
                let mut e = e.lock().unwrap();
                e.seq += 1;
                e.seq
            }
            None => self.loose_seq.fetch_add(1, Ordering::SeqCst) + 1,
        };
        replies
            .items
            .into_iter()
            .map(|(kind, payload)| ServerMessage {
                seq: next(),
                session: replies.session.clone(),
                kind,
                payload,
            })
            .collect()
    }

    fn entry(&self, id: &str) -> Option<Arc<Mutex<Entry>>> {
        self.sessions.lock().unwrap().get(id).cloned()
    }

    fn goal_list(&self) -> Value {
        let config = SessionConfig::default();
        let goals: Vec<Value> = builtin_goals()
            .into_iter()
            .map(|g| {
                let mask = self.goals.get(g.id, &config);
                json!({
                    "id": g.id,
                    "name": g.name,
                    "description": g.description,
                    "script": g.script,
                    "mask": WireMask::from(mask.as_ref()),
                })
            })
            .collect();
        json!({ "goals": goals })
    }

    fn create(&self, payload: Value) -> Replies {
        let payload = if payload.is_null() { json!({}) } else { payload };
        let config: SessionConfig = match serde_json::from_value(payload) {
            Ok(c) => c,
            Err(e) => {
                return Replies {
                    session: None,
                    items: vec![error("bad_request", e.to_string())],
                }
            }
        };
        let session = match Session::new(config) {
            Ok(s) => s,
            Err(e) => {
                return Replies {
                    session: None,
                    items: vec![session_error(&e)],
                }
            }
        };
        let (id, file) = self.allocate_id();
        let mut entry = Entry {
            session,
            seq: 0,
            created: Instant::now(),
            persisted: 0,
            file,
        };
        persist(&mut entry);
        let created = json!({ "session": id, "config": entry.session.config() });
        let snapshot = value(entry.session.snapshot());
        self.sessions.lock().unwrap().insert(id.clone(), Arc::new(Mutex::new(entry)));
        Replies {
            session: Some(id),
            items: vec![(ServerKind::SessionCreated, created), (ServerKind::StateSnapshot, snapshot)],
        }
    }

    /// Next free session id; with a data directory, ids whose log file
    /// already exists from an earlier run are skipped.
    fn allocate_id(&self) -> (String, Option<File>) {
        loop {
            let id = format!("s{}", self.next_id.fetch_add(1, Ordering::SeqCst));
            let Some(dir) = &self.data_dir else {
                return (id, None);
            };
            if std::fs::create_dir_all(dir).is_err() {
                tracing::warn!("cannot create {}", dir.display());
                return (id, None);
            }
            match OpenOptions::new().append(true).create_new(true).open(dir.join(format!("{id}.ndjson"))) {
                Ok(f) => return (id, Some(f)),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => {
                    tracing::warn!("cannot open session log: {e}");
                    return (id, None);
                }
            }
        }
    }

    fn dispatch(&self, msg: ClientMessage) -> Replies {
        let Some(id) = msg.session.clone() else {
            return Replies {
                session: None,
                items: vec![error("bad_request", "missing session id")],
            };
        };
        let Some(entry) = self.entry(&id) else {
            return Replies {
                session: Some(id.clone()),
                items: vec![error("unknown_session", format!("no session {id:?}"))],
            };
        };
        // Holding the entry lock serializes this session's messages.
        let mut e = entry.lock().unwrap();
        let now = e.created.elapsed().as_millis() as u64;
        let items = match msg.kind {
            ClientKind::GetState => vec![(ServerKind::StateSnapshot, value(e.session.snapshot()))],
            ClientKind::PlaceMarker => match serde_json::from_value::<PlaceMarkerPayload>(msg.payload) {
                Err(err) => vec![error("bad_request", err.to_string())],
                Ok(p) => match e.session.place_marker(p.pair, p.kind, Vector2::new(p.x, p.y), p.t_ms.unwrap_or(now)) {
                    Ok(_) => vec![(ServerKind::StateSnapshot, value(e.session.snapshot()))],
                    Err(err) => vec![session_error(&err)],
                },
            },
            ClientKind::Command => match serde_json::from_value::<CommandPayload>(msg.payload) {
                Err(err) => vec![error("bad_request", err.to_string())],
                Ok(p) => match e.session.apply_command(p.command, p.t_ms.unwrap_or(now)) {
                    Ok(out) => self.command_replies(&e.session, out),
                    Err(err) => vec![session_error(&err)],
                },
            },
            ClientKind::CreateSession | ClientKind::ListGoals => unreachable!("handled before dispatch"),
        };
        persist(&mut e);
        drop(e);
        Replies {
            session: Some(id),
            items,
        }
    }

    fn command_replies(&self, session: &Session, out: CommandOutcome) -> Vec<(ServerKind, Value)> {
        let frames = |frames: &[foldlab_core::ClothState]| -> Vec<CompactCloth> {
            downsample_frames(frames, MAX_FRAMES_PER_FOLD * session.config().n_folds.max(1))
                .iter()
                .map(CompactCloth::from)
                .collect()
        };
        let snapshot = (ServerKind::StateSnapshot, value(session.snapshot()));
        match out.command {
            Command::Simulate => {
                let frames: Vec<CompactCloth> = downsample_frames(&out.frames, MAX_FRAMES_PER_FOLD)
                    .iter()
                    .map(CompactCloth::from)
                    .collect();
                vec![
                    (
                        ServerKind::PreviewFrames,
                        json!({
                            "pair": session.simulated_pairs() - 1,
                            "frames": frames,
                            "missed_pairs": out.missed_pairs,
                        }),
                    ),
                    snapshot,
                ]
            }
            Command::Fold => {
                let config = session.config();
                let mask = rasterize_topdown(session.cloth(), &config.grid);
                let goal = self.goals.get(config.goal_id, config);
                let mut score = score_trial(&mask, &goal, DEFAULT_ALIGN_RADIUS).expect("same grid");
                score.completion_time = completion_time(session.log()).ok();
                vec![
                    (
                        ServerKind::FoldResult,
                        json!({
                            "final_state": WireCloth::from(session.cloth()),
                            "frames": frames(&out.frames),
                            "missed_pairs": out.missed_pairs,
                            "mask": WireMask::from(&mask),
                        }),
                    ),
                    (
                        ServerKind::Score,
                        json!({
                            "goal_id": config.goal_id,
                            "iou": score.iou,
                            "offset": score.offset,
                            "radius": DEFAULT_ALIGN_RADIUS,
                            "completion_time": score.completion_time,
                        }),
                    ),
                    snapshot,
                ]
            }
            Command::Undo | Command::Reset => vec![snapshot],
        }
    }

    /// Current demonstration log of a session.
    pub fn export_log(&self, id: &str) -> Option<foldlab_core::DemonstrationLog> {
        self.entry(id).map(|e| e.lock().unwrap().session.export_log())
    }

    /// Clone of a session's state machine.
    pub fn session(&self, id: &str) -> Option<Session> {
        self.entry(id).map(|e| e.lock().unwrap().session.clone())
    }
}

/// Appends log events not yet written.
fn persist(e: &mut Entry) {
    let events = &e.session.log().events;
    if let Some(f) = e.file.as_mut() {
        let mut buf = String::new();
        for ev in &events[e.persisted.min(events.len())..] {
            buf.push_str(&event_line(ev));
            buf.push('\n');
        }
        if f.write_all(buf.as_bytes()).and_then(|_| f.flush()).is_err() {
            tracing::warn!("failed to append session log");
        }
    }
    e.persisted = events.len();
}
