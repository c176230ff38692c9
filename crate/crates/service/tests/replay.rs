use foldlab::replay::{replay, replay_text, ReplayError};
use foldlab::SessionStore;
use serde_json::json;

fn live_session(store: &SessionStore) -> String {
    let r = store.handle_text(&json!({"kind": "create_session", "payload": {"goal_id": "G2"}}).to_string());
    let id = r[0].session.clone().unwrap();
    let steps = [
        json!({"kind": "place_marker", "payload": {"pair": 0, "kind": "pick", "x": 0.11, "y": 0.11, "t_ms": 1200}}),
        json!({"kind": "place_marker", "payload": {"pair": 0, "kind": "place", "x": 0.39, "y": 0.39, "t_ms": 2300}}),
        json!({"kind": "command", "payload": {"command": "simulate", "t_ms": 3000}}),
        json!({"kind": "command", "payload": {"command": "undo", "t_ms": 4000}}),
        json!({"kind": "place_marker", "payload": {"pair": 0, "kind": "place", "x": 0.38, "y": 0.38, "t_ms": 4500}}),
        json!({"kind": "command", "payload": {"command": "simulate", "t_ms": 5000}}),
        json!({"kind": "place_marker", "payload": {"pair": 1, "kind": "pick", "x": 0.38, "y": 0.38, "t_ms": 6000}}),
        json!({"kind": "place_marker", "payload": {"pair": 1, "kind": "place", "x": 0.25, "y": 0.25, "t_ms": 7000}}),
        json!({"kind": "command", "payload": {"command": "fold", "t_ms": 8000}}),
    ];
    for mut s in steps {
        s["session"] = json!(id);
        let r = store.handle_text(&s.to_string());
        assert!(r.iter().all(|m| m.error_code().is_none()), "{s}: {r:?}");
    }
    id
}

#[test]
fn exported_log_replays_bit_identically() {
    let store = SessionStore::new(None);
    let id = live_session(&store);
    let live = store.session(&id).unwrap();
    let text = store.export_log(&id).unwrap().to_ndjson();

    let first = replay_text(&text).unwrap();
    assert!(first.session.cloth().bit_eq(live.cloth()));
    assert_eq!(first.session.export_log().to_ndjson(), text);

    let second = replay(&first.session.export_log()).unwrap();
    assert!(second.session.cloth().bit_eq(live.cloth()));
    assert_eq!(second.mask, first.mask);
    assert_eq!(second.score, first.score);
    assert_eq!(first.score.completion_time, Some((8000.0 + sim_ms(&live)) / 1000.0));
}

fn sim_ms(s: &foldlab_core::Session) -> f64 {
    ((s.cloth().sim_time - s.initial_cloth().sim_time) * 1000.0).round()
}

#[test]
fn malformed_logs_are_schema_errors() {
    for text in ["", "\n\n", "{not json}\n", r#"{"t_ms":0,"event":"fold_start","payload":{}}"#] {
        let e = replay_text(text).unwrap_err();
        assert!(matches!(e, ReplayError::SchemaError(_)), "{text:?}: {e:?}");
        assert_eq!(e.code(), "schema_error");
    }
}

#[test]
fn impossible_history_is_divergent() {
    let text = concat!(
        r#"{"t_ms":0,"event":"session_start","payload":{"config":{}}}"#,
        "\n",
        r#"{"t_ms":10,"event":"fold_start","payload":{"pairs":2}}"#,
        "\n",
        r#"{"t_ms":20,"event":"fold_complete","payload":{"sim_ms":10,"missed_pairs":[]}}"#,
        "\n",
    );
    let e = replay_text(text).unwrap_err();
    assert!(matches!(e, ReplayError::DivergentLog(_)), "{e:?}");
    assert_eq!(e.code(), "divergent_log");
}
