//! Batch front end: load a JSON workspace, run a check, emit a JSON report.

pub mod commands;
pub mod doc;
pub mod workspace;

use std::io::{IsTerminal, Read, Write};

pub use commands::{Cli, Command, Output};
pub use workspace::Workspace;

pub const BOUND_VAR: &str = "FAMKIT_DEFAULT_BOUND";

/// `FAMKIT_DEFAULT_BOUND` as a positive integer, 3 when unset.
pub fn default_bound(var: Option<String>) -> Result<usize, String> {
    match var {
        None => Ok(3),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{BOUND_VAR} must be a positive integer, got `{s}`")),
        },
    }
}

fn read_workspace(cli: &Cli) -> Result<String, String> {
    let stdin = || -> Result<String, String> {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("standard input: {e}"))?;
        Ok(s)
    };
    match &cli.workspace {
        Some(p) if p.as_os_str() == "-" => stdin(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        // zoo only produces documents, so it never waits on an inherited stream
        None if !matches!(cli.command, Command::Zoo { .. }) && !std::io::stdin().is_terminal() => stdin(),
        None => Ok(String::new()),
    }
}

/// Parse, validate and run; returns the exit code. Diagnostics go to standard error.
pub fn main_with(cli: Cli) -> i32 {
    let setup = || -> Result<Workspace, String> {
        let bound = default_bound(std::env::var(BOUND_VAR).ok())?;
        let doc = doc::parse(&read_workspace(&cli)?).map_err(|e| format!("workspace: {e}"))?;
        let ws = Workspace::new(doc, bound);
        ws.validate()?;
        Ok(ws)
    };
    let out = setup().and_then(|ws| commands::run(&ws, &cli.command));
    let out = match out {
        Ok(o) => o,
        Err(e) => {
            eprintln!("famkit: {e}");
            return 2;
        }
    };
    let text = out.render();
    let written = match &cli.output {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| format!("{}: {e}", p.display())),
        None => match writeln!(std::io::stdout(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("standard output: {e}")),
            _ => Ok(()),
        },
    };
    if let Err(e) = written {
        eprintln!("famkit: {e}");
        return 2;
    }
    out.exit_code()
}
