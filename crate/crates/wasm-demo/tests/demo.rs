use foldlab_core::fold::execute_sequence;
use foldlab_core::session::replay_log;
use foldlab_core::DemonstrationLog;
use foldlab_wasm::{goal_catalog, Demo};
use serde_json::Value;

fn state(d: &Demo) -> Value {
    serde_json::from_str(&d.state()).unwrap()
}

#[test]
fn catalog_lists_builtin_goals() {
    let v: Value = serde_json::from_str(&goal_catalog()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["id"], "G1");
}

#[test]
fn preview_undo_fold_and_score() {
    let mut d = Demo::new("g1", 2, true).unwrap();
    let n = d.grid_pixels();
    assert_eq!(d.goal_mask().len(), n * n);
    assert_eq!(d.triangles().len() % 3, 0);
    let flat = d.positions();

    d.place_marker(0, "pick", 0.10, 0.25, 100.0).unwrap();
    d.place_marker(0, "place", 0.40, 0.25, 200.0).unwrap();
    let frames = d.simulate(300.0).unwrap();
    assert!((2..=60).contains(&frames));
    assert_eq!(d.frame(0), flat);
    assert_eq!(d.frame(frames - 1), d.positions());
    assert!(d.frame(frames).is_empty());
    assert_eq!(d.frame_count(), frames);
    assert_eq!(state(&d)["can_undo"], true);

    d.undo(400.0).unwrap();
    assert_eq!(d.positions(), flat);
    assert!(d.place_marker(1, "place", 0.2, 0.2, 450.0).is_err());

    d.place_marker(1, "pick", 0.325, 0.10, 500.0).unwrap();
    d.place_marker(1, "place", 0.325, 0.40, 600.0).unwrap();
    let score: Value = serde_json::from_str(&d.fold(700.0).unwrap()).unwrap();
    assert!(score["iou"].as_f64().unwrap() > 0.9, "{score}");
    assert!(score["completion_time"].as_f64().unwrap() > 0.7);
    assert_eq!(state(&d)["executed"], true);
    assert!(d.simulate(800.0).is_err());

    let s = d.session();
    let direct = execute_sequence(s.initial_cloth(), &s.config().cloth, &s.actions(), &s.config().fold).unwrap();
    assert!(s.cloth().bit_eq(&direct));
    let replayed = replay_log(&DemonstrationLog::from_ndjson(&d.export_log()).unwrap()).unwrap();
    assert!(replayed.cloth().bit_eq(s.cloth()));
    assert!(d.result_mask().contains(&1));
}

#[test]
fn preview_off_and_bad_input() {
    let mut d = Demo::new("G2", 1, false).unwrap();
    d.place_marker(0, "pick", 0.11, 0.11, 0.0).unwrap();
    d.place_marker(0, "place", 0.39, 0.39, 0.0).unwrap();
    let s = state(&d);
    assert_eq!(s["can_simulate"], false);
    assert_eq!(s["can_fold"], true);
    assert!(d.simulate(0.0).is_err());
    assert!(d.place_marker(0, "poke", 0.1, 0.1, 0.0).is_err());
    assert!(Demo::new("G5", 1, true).is_err());
    assert!(Demo::new("G1", 0, true).is_err());
}
