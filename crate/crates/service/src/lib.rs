//! Fold workbench service: the session message protocol, log replay, the
//! websocket server and the batch subcommands behind the `foldlab` binary.

pub mod commands;
pub mod protocol;
pub mod replay;
pub mod server;
pub mod store;

pub use protocol::{ClientMessage, ServerKind, ServerMessage};
pub use store::SessionStore;
