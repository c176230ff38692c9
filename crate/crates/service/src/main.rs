use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use foldlab::commands::{self, CliError};

#[derive(Parser)]
#[command(name = "foldlab", version, about = "Cloth-folding demonstration workbench")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the websocket session server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for the per-session NDJSON logs.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        /// Static UI files served next to the socket.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Re-run a demonstration log and report its score.
    Replay {
        log: PathBuf,
        /// Write the final top-down mask as P5.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a result mask (P5) or photo (P6) against a goal.
    Score {
        #[arg(long)]
        result: PathBuf,
        /// Builtin goal id (G1-G4) or a P5 file.
        #[arg(long)]
        goal: String,
        /// h0,h1,s0,s1,v0,v1 for segmenting P6 input.
        #[arg(long)]
        hsv: Option<String>,
        /// Alignment search radius in pixels.
        #[arg(long, default_value_t = foldlab_core::scoring::DEFAULT_ALIGN_RADIUS)]
        align: usize,
    },
    /// Builtin goal utilities.
    Goals {
        #[command(subcommand)]
        action: GoalsCmd,
    },
    /// Summaries and repeated-measures ANOVA for study data.
    Analyze { csv: PathBuf },
}

#[derive(Subcommand)]
enum GoalsCmd {
    /// Render G1-G4 as P5 masks plus manifest.json.
    Render {
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Cmd::Serve {
            port,
            data_dir,
            assets,
            host,
        } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(foldlab::server::serve(SocketAddr::new(host, port), data_dir, assets))?;
            Ok(String::new())
        }
        Cmd::Replay { log, out } => commands::replay(&log, out.as_deref()),
        Cmd::Score {
            result,
            goal,
            hsv,
            align,
        } => {
            let hsv = hsv.as_deref().map(commands::parse_hsv).transpose()?;
            commands::score(&result, &goal, hsv.as_ref(), align)
        }
        Cmd::Goals {
            action: GoalsCmd::Render { out },
        } => commands::goals_render(&out),
        Cmd::Analyze { csv } => commands::analyze_csv(&csv),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
