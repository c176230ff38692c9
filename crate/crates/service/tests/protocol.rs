use foldlab::protocol::{ServerKind, ServerMessage, WireCloth, WireMask};
use foldlab::{commands, SessionStore};
use foldlab_core::cloth::rasterize_topdown;
use foldlab_core::fold::execute_sequence;
use foldlab_core::pnm;
use foldlab_core::SessionConfig;
use serde_json::{json, Value};

fn send(store: &SessionStore, v: Value) -> Vec<ServerMessage> {
    store.handle_text(&v.to_string())
}

fn create(store: &SessionStore, payload: Value) -> String {
    let r = send(store, json!({"kind": "create_session", "payload": payload}));
    assert_eq!(r[0].kind, ServerKind::SessionCreated, "{r:?}");
    r[0].session.clone().unwrap()
}

fn marker(store: &SessionStore, id: &str, pair: usize, kind: &str, x: f64, y: f64, t: u64) -> Vec<ServerMessage> {
    send(
        store,
        json!({"kind": "place_marker", "session": id, "payload": {"pair": pair, "kind": kind, "x": x, "y": y, "t_ms": t}}),
    )
}

fn command(store: &SessionStore, id: &str, cmd: &str, t: u64) -> Vec<ServerMessage> {
    send(store, json!({"kind": "command", "session": id, "payload": {"command": cmd, "t_ms": t}}))
}

const MARKERS: [(usize, &str, f64, f64); 4] = [
    (0, "pick", 0.10, 0.25),
    (0, "place", 0.40, 0.25),
    (1, "pick", 0.325, 0.10),
    (1, "place", 0.325, 0.40),
];

#[test]
fn malformed_frames_get_one_bad_request() {
    let store = SessionStore::new(None);
    for text in ["not json", "{}", r#"{"kind":"dance"}"#, r#"{"kind":"get_state","extra":1}"#] {
        let r = store.handle_text(text);
        assert_eq!(r.len(), 1, "{text}");
        assert_eq!(r[0].error_code(), Some("bad_request"), "{text}");
    }
    let id = create(&store, json!({}));
    let r = send(&store, json!({"kind": "place_marker", "session": id, "payload": {"pair": 0}}));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].error_code(), Some("bad_request"));
    assert_eq!(r[0].session.as_deref(), Some(id.as_str()));
}

#[test]
fn create_session_replies_with_snapshot() {
    let store = SessionStore::new(None);
    let r = send(&store, json!({"kind": "create_session", "payload": {"n_folds": 1, "goal_id": "G3"}}));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].kind, ServerKind::SessionCreated);
    assert_eq!(r[1].kind, ServerKind::StateSnapshot);
    assert_eq!(r[0].payload["config"]["n_folds"], 1);
    assert_eq!(r[1].payload["goal_id"], "G3");
    assert_eq!(r[1].payload["can_fold"], false);
    assert_eq!(r[1].payload["slots"].as_array().unwrap().len(), 2);

    let bad = send(&store, json!({"kind": "create_session", "payload": {"n_folds": 0}}));
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].error_code(), Some("invalid_config"));
    let bad = send(&store, json!({"kind": "create_session", "payload": {"goal_id": "G9"}}));
    assert_eq!(bad[0].error_code(), Some("bad_request"));
}

#[test]
fn scripted_fold_matches_engine_and_cli_score() {
    let store = SessionStore::new(None);
    let id = create(&store, json!({"goal_id": "G1"}));
    let mut seqs = Vec::new();
    for (k, &(pair, kind, x, y)) in MARKERS.iter().enumerate() {
        let r = marker(&store, &id, pair, kind, x, y, 1000 * (k as u64 + 1));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, ServerKind::StateSnapshot, "{:?}", r[0].payload);
        seqs.extend(r.iter().map(|m| m.seq));
    }
    let r = command(&store, &id, "fold", 9000);
    seqs.extend(r.iter().map(|m| m.seq));
    let kinds: Vec<ServerKind> = r.iter().map(|m| m.kind).collect();
    assert_eq!(kinds, [ServerKind::FoldResult, ServerKind::Score, ServerKind::StateSnapshot]);
    assert!(seqs.windows(2).all(|w| w[1] == w[0] + 1), "{seqs:?}");

    let session = store.session(&id).unwrap();
    let config = SessionConfig::default();
    let direct = execute_sequence(session.initial_cloth(), &config.cloth, &session.actions(), &config.fold).unwrap();
    let wire: WireCloth = serde_json::from_value(r[0].payload["final_state"].clone()).unwrap();
    assert_eq!(wire, WireCloth::from(&direct));
    assert!(session.cloth().bit_eq(&direct));

    let mask: WireMask = serde_json::from_value(r[0].payload["mask"].clone()).unwrap();
    let mask = mask.to_mask().unwrap();
    assert_eq!(mask, rasterize_topdown(&direct, &config.grid));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.pgm");
    pnm::write_mask(&path, &mask).unwrap();
    let cli: Value = serde_json::from_str(&commands::score(&path, "G1", None, 20).unwrap()).unwrap();
    assert_eq!(r[1].payload["iou"], cli["iou"]);
    assert_eq!(r[1].payload["offset"], cli["offset"]);
    assert_eq!(r[1].payload["completion_time"].as_f64().unwrap(), (9000.0 + sim_ms(&session)) / 1000.0);
    assert!(r[1].payload["iou"].as_f64().unwrap() > 0.9);

    let again = command(&store, &id, "fold", 10_000);
    assert_eq!(again[0].error_code(), Some("session_finished"));
}

fn sim_ms(s: &foldlab_core::Session) -> f64 {
    ((s.cloth().sim_time - s.initial_cloth().sim_time) * 1000.0).round()
}

#[test]
fn preview_frames_and_undo() {
    let store = SessionStore::new(None);
    let id = create(&store, json!({}));
    for &(pair, kind, x, y) in &MARKERS[..2] {
        marker(&store, &id, pair, kind, x, y, 0);
    }
    let r = command(&store, &id, "simulate", 0);
    assert_eq!(r[0].kind, ServerKind::PreviewFrames);
    assert_eq!(r[0].payload["pair"], 0);
    let frames = r[0].payload["frames"].as_array().unwrap();
    assert!(frames.len() >= 2 && frames.len() <= 60);
    assert_eq!(r[1].payload["simulated_pairs"], 1);
    assert_eq!(r[1].payload["can_undo"], true);

    let locked = marker(&store, &id, 0, "pick", 0.2, 0.2, 0);
    assert_eq!(locked[0].error_code(), Some("pair_locked"));

    let r = command(&store, &id, "undo", 0);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].payload["simulated_pairs"], 0);
    let fresh = store.session(&id).unwrap();
    assert!(fresh.cloth().bit_eq(fresh.initial_cloth()));

    let r = command(&store, &id, "undo", 0);
    assert_eq!(r[0].error_code(), Some("nothing_to_undo"));
}

#[test]
fn preview_off_disables_simulate_and_undo() {
    let store = SessionStore::new(None);
    let id = create(&store, json!({"preview_enabled": false}));
    for &(pair, kind, x, y) in &MARKERS[..2] {
        marker(&store, &id, pair, kind, x, y, 0);
    }
    for cmd in ["simulate", "undo"] {
        let r = command(&store, &id, cmd, 0);
        assert_eq!(r[0].error_code(), Some("command_disabled"), "{cmd}");
    }
    assert_eq!(command(&store, &id, "fold", 0)[0].error_code(), Some("markers_incomplete"));
}

#[test]
fn sessions_are_isolated_and_sequenced_separately() {
    let store = SessionStore::new(None);
    let a = create(&store, json!({}));
    let b = create(&store, json!({"n_folds": 1}));
    assert_ne!(a, b);
    marker(&store, &a, 0, "pick", 0.12, 0.2, 0);
    let sa = send(&store, json!({"kind": "get_state", "session": a}));
    let sb = send(&store, json!({"kind": "get_state", "session": b}));
    assert!(sa[0].payload["slots"][0]["position"].is_array());
    assert!(sb[0].payload["slots"][0]["position"].is_null());
    // a: created(1) snapshot(2) marker(3) state(4); b: created(1) snapshot(2) state(3)
    assert_eq!(sa[0].seq, 4);
    assert_eq!(sb[0].seq, 3);
    assert_eq!(store.export_log(&a).unwrap().len(), 2);
    assert_eq!(store.export_log(&b).unwrap().len(), 1);
}

#[test]
fn unknown_session_is_reported() {
    let store = SessionStore::new(None);
    let r = send(&store, json!({"kind": "get_state", "session": "nope"}));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].error_code(), Some("unknown_session"));
    let r = send(&store, json!({"kind": "command", "payload": {"command": "fold"}}));
    assert_eq!(r[0].error_code(), Some("bad_request"));
}

#[test]
fn goal_list_carries_masks() {
    let store = SessionStore::new(None);
    let r = send(&store, json!({"kind": "list_goals"}));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].kind, ServerKind::GoalList);
    let goals = r[0].payload["goals"].as_array().unwrap();
    let ids: Vec<&str> = goals.iter().map(|g| g["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["G1", "G2", "G3", "G4"]);
    for g in goals {
        let m: WireMask = serde_json::from_value(g["mask"].clone()).unwrap();
        let m = m.to_mask().unwrap();
        assert_eq!((m.width(), m.height()), (256, 256));
        assert!(m.count() > 0);
        assert_eq!(commands::load_goal_mask(g["id"].as_str().unwrap()).unwrap(), m);
    }
}

#[test]
fn logs_persist_to_data_dir_without_clobbering() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s1.ndjson"), "old\n").unwrap();
    let store = SessionStore::new(Some(dir.path().to_path_buf()));
    let id = create(&store, json!({}));
    assert_eq!(id, "s2");
    marker(&store, &id, 0, "pick", 0.12, 0.2, 5);
    assert_eq!(std::fs::read_to_string(dir.path().join("s1.ndjson")).unwrap(), "old\n");
    let text = std::fs::read_to_string(dir.path().join("s2.ndjson")).unwrap();
    assert_eq!(text, store.export_log(&id).unwrap().to_ndjson());
}
