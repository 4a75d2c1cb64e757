use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use weft_cli::{OutputMode, Session};

/// Multilayer network engine: interactive shell and script runner.
#[derive(Parser)]
#[command(name = "weft", version)]
struct Cli {
    /// Start in JSON output mode (one JSON object per statement).
    #[arg(long)]
    json: bool,
    /// Run this script and exit.
    #[arg(long, value_name = "PATH")]
    script: Option<PathBuf>,
    /// No banner or prompt.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut session = Session::new();
    if cli.json {
        session.set_mode(OutputMode::Json);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();

    if let Some(path) = cli.script {
        return match session.run_script(&path, &mut out) {
            Ok(report) if report.aborted => ExitCode::from(1),
            Ok(_) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("weft: cannot run {}: {e}", path.display());
                ExitCode::from(1)
            }
        };
    }

    if !cli.quiet && session.mode() == OutputMode::Text {
        let _ = writeln!(out, "weft {} (type help() for commands, quit() to leave)", env!("CARGO_PKG_VERSION"));
    }
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        if !cli.quiet && session.mode() == OutputMode::Text {
            let _ = write!(out, "> ");
            let _ = out.flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        if let Err(e) = session.execute_line(&line, &mut out) {
            eprintln!("weft: {e}");
            return ExitCode::from(1);
        }
        if session.should_quit() {
            break;
        }
    }
    ExitCode::SUCCESS
}
