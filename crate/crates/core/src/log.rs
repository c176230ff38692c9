//! Demonstration logs: one JSON object per line with fields `t_ms`,
//! `event` and `payload`, in that order. Payload objects serialize with
//! sorted keys so identical sessions produce identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    SessionStart,
    MarkerPlaced,
    Simulate,
    Undo,
    Reset,
    FoldStart,
    FoldComplete,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::SessionStart => "session_start",
            EventKind::MarkerPlaced => "marker_placed",
            EventKind::Simulate => "simulate",
            EventKind::Undo => "undo",
            EventKind::Reset => "reset",
            EventKind::FoldStart => "fold_start",
            EventKind::FoldComplete => "fold_complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    /// Milliseconds since the session started.
    pub t_ms: u64,
    pub event: EventKind,
    pub payload: Value,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemonstrationLog {
    pub events: Vec<LogEvent>,
}

impl DemonstrationLog {
    pub fn new(events: Vec<LogEvent>) -> Self {
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last(&self) -> Option<&LogEvent> {
        self.events.last()
    }

    /// Checks the structural rules every log must satisfy: a single leading
    /// `session_start`, non-decreasing timestamps and no `fold_complete`
    /// without an open `fold_start`.
    pub fn validate(&self) -> Result<(), LogError> {
        let first = self
            .events
            .first()
            .ok_or_else(|| LogError::Schema("missing session_start".into()))?;
        if first.event != EventKind::SessionStart {
            return Err(LogError::Schema("first event must be session_start".into()));
        }
        let mut open_fold = false;
        let mut prev = 0;
        for (i, e) in self.events.iter().enumerate() {
            if e.t_ms < prev {
                return Err(LogError::Schema(format!("event {i}: timestamp goes backwards")));
            }
            prev = e.t_ms;
            match e.event {
                EventKind::SessionStart if i > 0 => {
                    return Err(LogError::Schema(format!("event {i}: duplicate session_start")));
                }
                EventKind::FoldStart => open_fold = true,
                EventKind::FoldComplete => {
                    if !open_fold {
                        return Err(LogError::Schema(format!("event {i}: fold_complete without fold_start")));
                    }
                    open_fold = false;
                }
                _ => {}
            }
            if !e.payload.is_object() {
                return Err(LogError::Schema(format!("event {i}: payload must be an object")));
            }
        }
        Ok(())
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&event_line(e));
            out.push('\n');
        }
        out
    }

    /// Parses newline-delimited records; blank lines are skipped. Only the
    /// per-line syntax is checked here, see [`DemonstrationLog::validate`].
    pub fn from_ndjson(text: &str) -> Result<Self, LogError> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: LogEvent = serde_json::from_str(line).map_err(|err| LogError::Parse {
                line: i + 1,
                message: err.to_string(),
            })?;
            events.push(e);
        }
        Ok(Self { events })
    }
}

/// Single-line JSON encoding of one event.
pub fn event_line(e: &LogEvent) -> String {
    serde_json::to_string(e).expect("log events always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn ev(t_ms: u64, event: EventKind) -> LogEvent {
        LogEvent {
            t_ms,
            event,
            payload: json!({}),
        }
    }

    #[test]
    fn line_format_is_stable() {
        let e = LogEvent {
            t_ms: 12,
            event: EventKind::MarkerPlaced,
            payload: json!({"y": 0.5, "kind": "pick", "x": 0.25, "pair": 0}),
        };
        assert_eq!(
            event_line(&e),
            r#"{"t_ms":12,"event":"marker_placed","payload":{"kind":"pick","pair":0,"x":0.25,"y":0.5}}"#
        );
    }

    #[test]
    fn ndjson_round_trip() {
        let log = DemonstrationLog::new(vec![ev(0, EventKind::SessionStart), ev(5, EventKind::Reset)]);
        let text = log.to_ndjson();
        assert_eq!(DemonstrationLog::from_ndjson(&text).unwrap(), log);
    }

    #[test]
    fn validation_rules() {
        assert!(DemonstrationLog::default().validate().is_err());
        assert!(DemonstrationLog::new(vec![ev(0, EventKind::Reset)]).validate().is_err());
        let backwards = DemonstrationLog::new(vec![ev(5, EventKind::SessionStart), ev(1, EventKind::Reset)]);
        assert!(backwards.validate().is_err());
        let orphan = DemonstrationLog::new(vec![ev(0, EventKind::SessionStart), ev(1, EventKind::FoldComplete)]);
        assert!(orphan.validate().is_err());
        let twice = DemonstrationLog::new(vec![ev(0, EventKind::SessionStart), ev(1, EventKind::SessionStart)]);
        assert!(twice.validate().is_err());
        let ok = DemonstrationLog::new(vec![
            ev(0, EventKind::SessionStart),
            ev(1, EventKind::FoldStart),
            ev(9, EventKind::FoldComplete),
        ]);
        assert!(ok.validate().is_ok());
        assert!(DemonstrationLog::from_ndjson("{not json").is_err());
    }
}
