//! HTTP + websocket front end on a single port.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::store::SessionStore;

const INDEX: &str = include_str!("../static/index.html");

/// Routes: `/ws` for sessions, `/` for the status page, and static files
/// from `assets` when given.
pub fn router(store: Arc<SessionStore>, assets: Option<PathBuf>) -> Router {
    let router = Router::new().route("/ws", get(ws_upgrade)).with_state(store);
    match assets {
        Some(dir) if dir.join("index.html").exists() => router.fallback_service(ServeDir::new(dir)),
        Some(dir) => router
            .route("/", get(|| async { Html(INDEX) }))
            .fallback_service(ServeDir::new(dir)),
        None => router.route("/", get(|| async { Html(INDEX) })),
    }
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(store): State<Arc<SessionStore>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| client_loop(socket, store))
}

/// Frames from one client are handled strictly in arrival order.
async fn client_loop(mut socket: WebSocket, store: Arc<SessionStore>) {
    while let Some(Ok(msg)) = socket.recv().await {
        let text = match msg {
            Message::Text(t) => t.to_string(),
            Message::Binary(_) => r#"{"kind":"binary frame"}"#.to_string(),
            Message::Close(_) => break,
            _ => continue,
        };
        let s = store.clone();
        let replies = match tokio::task::spawn_blocking(move || s.handle_text(&text)).await {
            Ok(r) => r,
            Err(e) => {
                tracing::error!("handler panicked: {e}");
                break;
            }
        };
        for r in replies {
            let body = serde_json::to_string(&r).expect("server messages serialize");
            if socket.send(Message::Text(body.into())).await.is_err() {
                return;
            }
        }
    }
}

/// Binds `addr` and serves until the process is interrupted.
pub async fn serve(addr: SocketAddr, data_dir: PathBuf, assets: Option<PathBuf>) -> std::io::Result<()> {
    std::fs::create_dir_all(&data_dir)?;
    let store = Arc::new(SessionStore::new(Some(data_dir)));
    let listener = TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
