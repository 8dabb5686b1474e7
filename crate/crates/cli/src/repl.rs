use std::io::{IsTerminal, Write};
use std::path::Path;

use crate::session::Session;

const HELP: &str = "commands:
  load facts|frames|plan <path>
  ask <question>
  explain
  facts [<id> | <text>]
  quit";

/// Read commands until `quit` or end of input. Errors are printed and the
/// session carries on.
pub fn run(s: &mut Session, mut lines: impl Iterator<Item = String>, mut out: impl Write) {
    let prompt = std::io::stdin().is_terminal();
    loop {
        if prompt {
            let _ = write!(out, "> ");
            let _ = out.flush();
        }
        let Some(line) = lines.next() else { break };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let reply = match cmd {
            "quit" | "exit" => break,
            "ask" => s.ask(rest),
            "explain" => s.explain(),
            "facts" => Ok(s.facts(rest).join("\n")),
            "load" => load(s, rest),
            _ => Ok(HELP.to_string()),
        };
        let text = reply.unwrap_or_else(|e| format!("error: {e:#}"));
        if !text.is_empty() {
            let _ = writeln!(out, "{text}");
        }
    }
}

fn load(s: &mut Session, args: &str) -> anyhow::Result<String> {
    let (what, path) = args.split_once(char::is_whitespace).unwrap_or((args, ""));
    let path = Path::new(path.trim());
    match what {
        "facts" => s.load_facts(path).map(|n| format!("{n} facts loaded")),
        "frames" => s.load_frames(path).map(|n| format!("{n} frames loaded")),
        "plan" => s.load_plan(path).map(|()| "plan loaded".to_string()),
        _ => Ok(HELP.to_string()),
    }
}
