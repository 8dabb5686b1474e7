use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn inferqa() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_inferqa"));
    cmd.arg("--verbs")
        .arg(fixture("verbs.txt"))
        .arg("--frames")
        .arg(fixture("frames.txt"))
        .arg("--facts")
        .arg(fixture("facts_golden.txt"))
        .arg("--plan")
        .arg(fixture("demo_city.plan"))
        .arg("--asof")
        .arg("2009-11-08");
    cmd
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn repl(input: &str) -> String {
    let mut child = inferqa().stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    text(&out.stdout)
}

fn batch(questions: &PathBuf) -> Output {
    inferqa().arg("--questions").arg(questions).output().unwrap()
}

#[test]
fn golden_batch_is_exact_and_repeatable() {
    let first = batch(&fixture("questions_golden.txt"));
    assert_eq!(first.status.code(), Some(0), "{}", text(&first.stderr));
    let expected = std::fs::read_to_string(fixture("answers_golden.txt")).unwrap();
    assert_eq!(text(&first.stdout), expected);
    let second = batch(&fixture("questions_golden.txt"));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn empty_question_file() {
    let out = batch(&scratch("empty.txt", ""));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_line_is_reported_and_skipped() {
    let golden = std::fs::read_to_string(fixture("questions_golden.txt")).unwrap();
    let mut lines: Vec<&str> = golden.lines().collect();
    lines[2] = "Colorless green ideas sleep furiously.";
    let out = batch(&scratch("bad_line.txt", &lines.join("\n")));
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.starts_with("line 3: "), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("line ")).count(), 1);
    assert_eq!(text(&out.stdout).matches("validity: ").count(), 9);
}

#[test]
fn one_shot_and_verbose() {
    let out = inferqa().args(["--ask", "Why did Petrov shoot a girl in 9 Street1 Street?"]).output().unwrap();
    assert_eq!(text(&out.stdout), "as subject is criminal\nvalidity: plausible\n");

    let out = inferqa().args(["--verbose", "--ask", "How did Petrov shoot a girl in 9 Street1 Street?"]).output().unwrap();
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("by pistol\n"));
    assert!(stdout.contains("way.person | facts: 4 |"), "{stdout}");
    assert!(stdout.ends_with("validity: plausible\n"));
}

#[test]
fn verbs_are_required() {
    let out = Command::new(env!("CARGO_BIN_EXE_inferqa")).args(["--ask", "How is Ivanov?"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn bad_asof_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_inferqa"))
        .arg("--verbs")
        .arg(fixture("verbs.txt"))
        .args(["--asof", "7 Nov", "--ask", "How is Ivanov?"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("YYYY-MM-DD"));
}

#[test]
fn repl_who_then_explain() {
    let out = repl("explain\nask Who shot a girl in 9 Street1 Street?\nexplain\nquit\n");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("error: no previous answer"));
    assert_eq!(lines.next(), Some("Petrov"));
    assert_eq!(lines.next(), Some("validity: plausible"));
    let trail: Vec<&str> = lines.collect();
    assert_eq!(trail.last(), Some(&"validity: plausible"));
    let cited: Vec<&str> = trail.iter().filter_map(|l| l.split(" | ").nth(1)).flat_map(|f| f.trim_start_matches("facts: ").split(", ")).filter(|s| !s.is_empty()).collect();
    for id in ["0", "1", "2", "3", "4"] {
        assert!(cited.contains(&id), "fact {id} not cited:\n{out}");
    }
    assert!(trail.iter().any(|l| l.contains("shoot: motive robbing")));
    assert!(trail.iter().any(|l| l.contains("shoot: way by pistol")));
}

#[test]
fn repl_explained_ids_resolve() {
    let first = repl("ask Who shot a girl in 9 Street1 Street?\nexplain\n");
    let mut ids: Vec<String> = first
        .lines()
        .filter_map(|l| l.split(" | ").nth(1))
        .flat_map(|f| f.trim_start_matches("facts: ").split(", ").map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    ids.sort();
    ids.dedup();
    let script: String = ids.iter().map(|id| format!("facts {id}\n")).collect();
    let listed = repl(&script);
    for (id, line) in ids.iter().zip(listed.lines()) {
        assert!(line.starts_with(&format!("{id}: ")), "{line}");
    }
    assert_eq!(listed.lines().count(), ids.len());
}

#[test]
fn repl_survives_errors() {
    let out = repl("load plan missing.txt\nfrobnicate\nask Did Petrov shoot a girl in 9 Street1 Street?\nfacts pistol\n");
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("error: cannot read missing.txt"));
    assert_eq!(lines.next(), Some("commands:"));
    let rest: Vec<&str> = lines.skip_while(|l| l.starts_with("  ")).collect();
    assert_eq!(rest, ["yes", "validity: plausible", "4: Petrov has a pistol."]);
}

#[test]
fn repl_loads_more_facts() {
    let extra = scratch("extra_facts.txt", "Ivanov has high temperature.\nIvanov has cough.\n");
    let out = repl(&format!("load facts {}\nask How is Ivanov?\nquit\nask ignored\n", extra.display()));
    assert_eq!(out, "2 facts loaded\ninfluenza\nvalidity: plausible\n");
}
