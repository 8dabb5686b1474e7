//! `inferqa`: load facts, frames and a city plan, then answer questions in
//! batch, one-shot or interactive mode.

mod repl;
mod session;

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser as _;
use inferqa::inference::EngineConfig;
use inferqa::time::Calendar;

use session::Session;

#[derive(clap::Parser, Debug)]
#[command(name = "inferqa", version, about = "Answer questions over a fact database with frame-based inference")]
struct Args {
    /// Fact files, one or more sentences per line.
    #[arg(long, num_args = 1..)]
    facts: Vec<PathBuf>,
    /// Frame files.
    #[arg(long, num_args = 1..)]
    frames: Vec<PathBuf>,
    /// City plan.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Verb dictionary (`lemma|past|state|applies` lines).
    #[arg(long)]
    verbs: PathBuf,
    /// Speed table for travel times.
    #[arg(long)]
    speeds: Option<PathBuf>,
    /// Reference date, YYYY-MM-DD. Its year is the database year.
    #[arg(long)]
    asof: Option<String>,
    /// Days before the reference date that count as recent.
    #[arg(long, default_value_t = 7)]
    recency_days: u32,
    /// Answer one question and exit.
    #[arg(long, conflicts_with = "questions")]
    ask: Option<String>,
    /// Answer every line of a file.
    #[arg(long)]
    questions: Option<PathBuf>,
    /// Print the justification trail with each answer.
    #[arg(long)]
    verbose: bool,
}

fn session(args: &Args) -> Result<Session> {
    let mut config = EngineConfig { recency_days: args.recency_days, ..EngineConfig::default() };
    let mut calendar = Calendar::default();
    if let Some(text) = &args.asof {
        let Some((year, date)) = Calendar::parse_iso_date(text) else { bail!("--asof wants YYYY-MM-DD, got `{text}`") };
        calendar = Calendar::new(year);
        config.asof = Some(date);
    }
    let mut s = Session::new(&args.verbs, calendar, config)?;
    s.verbose = args.verbose;
    for path in &args.frames {
        s.load_frames(path)?;
    }
    for path in &args.facts {
        s.load_facts(path)?;
    }
    if let Some(path) = &args.plan {
        s.load_plan(path)?;
    }
    if let Some(path) = &args.speeds {
        s.load_speeds(path)?;
    }
    Ok(s)
}

/// Answers in input order; a bad line is reported and skipped.
fn run_batch(s: &mut Session, text: &str) -> bool {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut clean = true;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match s.ask(line) {
            Ok(answer) => {
                let _ = writeln!(out, "{answer}");
            }
            Err(e) => {
                clean = false;
                let _ = out.flush();
                eprintln!("line {}: {e:#}", i + 1);
            }
        }
    }
    clean
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut s = match session(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let clean = if let Some(q) = &args.ask {
        run_batch(&mut s, q)
    } else if let Some(path) = &args.questions {
        match fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())) {
            Ok(text) => run_batch(&mut s, &text),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        }
    } else {
        let stdin = io::stdin();
        repl::run(&mut s, stdin.lock().lines().map_while(Result::ok), io::stdout().lock());
        true
    };
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
