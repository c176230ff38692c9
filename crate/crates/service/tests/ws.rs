use std::sync::Arc;

use foldlab::server::router;
use foldlab::{ServerKind, ServerMessage, SessionStore};
use futures::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;

type Socket = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn start(store: Arc<SessionStore>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(store, None)).await.unwrap() });
    format!("ws://{addr}/ws")
}

async fn recv(ws: &mut Socket) -> ServerMessage {
    loop {
        match ws.next().await.unwrap().unwrap() {
            Message::Text(t) => return serde_json::from_str(&t).unwrap(),
            Message::Ping(_) | Message::Pong(_) => continue,
            other => panic!("unexpected frame {other:?}"),
        }
    }
}

async fn request(ws: &mut Socket, msg: Value, replies: usize) -> Vec<ServerMessage> {
    ws.send(Message::Text(msg.to_string().into())).await.unwrap();
    let mut out = Vec::new();
    for _ in 0..replies {
        out.push(recv(ws).await);
    }
    out
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn full_session_over_websocket() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(SessionStore::new(Some(dir.path().to_path_buf())));
    let url = start(store.clone()).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(&url).await.unwrap();

    let r = request(&mut ws, json!({"kind": "create_session", "payload": {"n_folds": 1, "goal_id": "G1"}}), 2).await;
    assert_eq!(r[0].kind, ServerKind::SessionCreated);
    let id = r[0].session.clone().unwrap();

    for (kind, x, y) in [("pick", 0.10, 0.25), ("place", 0.40, 0.25)] {
        let m = json!({"kind": "place_marker", "session": id, "payload": {"pair": 0, "kind": kind, "x": x, "y": y}});
        let r = request(&mut ws, m, 1).await;
        assert_eq!(r[0].kind, ServerKind::StateSnapshot);
    }
    let r = request(&mut ws, json!({"kind": "command", "session": id, "payload": {"command": "simulate"}}), 2).await;
    assert_eq!(r[0].kind, ServerKind::PreviewFrames);
    let r = request(&mut ws, json!({"kind": "command", "session": id, "payload": {"command": "fold"}}), 3).await;
    assert_eq!(r[1].kind, ServerKind::Score);
    assert!(r[1].payload["iou"].as_f64().unwrap() > 0.0);
    assert!(r[1].payload["completion_time"].as_f64().is_some());
    let live_iou = r[1].payload["iou"].as_f64().unwrap();

    let r = request(&mut ws, json!({"kind": "get_state", "session": "missing"}), 1).await;
    assert_eq!(r[0].error_code(), Some("unknown_session"));
    ws.send(Message::Binary(vec![1, 2, 3].into())).await.unwrap();
    assert_eq!(recv(&mut ws).await.error_code(), Some("bad_request"));

    // the persisted log replays to the same score
    let text = std::fs::read_to_string(dir.path().join(format!("{id}.ndjson"))).unwrap();
    assert_eq!(text, store.export_log(&id).unwrap().to_ndjson());
    let replayed = foldlab::replay::replay_text(&text).unwrap();
    assert_eq!(replayed.score.iou, live_iou);
    ws.close(None).await.unwrap();
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn clients_do_not_share_sequence_numbers() {
    let store = Arc::new(SessionStore::new(None));
    let url = start(store).await;
    let (mut a, _) = tokio_tungstenite::connect_async(&url).await.unwrap();
    let (mut b, _) = tokio_tungstenite::connect_async(&url).await.unwrap();
    let ra = request(&mut a, json!({"kind": "create_session"}), 2).await;
    let rb = request(&mut b, json!({"kind": "create_session"}), 2).await;
    assert_ne!(ra[0].session, rb[0].session);
    assert_eq!([ra[0].seq, ra[1].seq], [1, 2]);
    assert_eq!([rb[0].seq, rb[1].seq], [1, 2]);
}

#[tokio::test]
async fn status_page_is_served() {
    let store = Arc::new(SessionStore::new(None));
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(store, None)).await.unwrap() });
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(b"GET / HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut body = String::new();
    stream.read_to_string(&mut body).await.unwrap();
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.contains("/ws"));
}
