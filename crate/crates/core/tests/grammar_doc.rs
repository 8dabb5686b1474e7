//! Every example on the grammar page parses.

mod common;

use common::kb;
use inferqa::cnl_parser::Parser;

fn examples(section: &str) -> Vec<String> {
    let page = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/grammar.md")).unwrap();
    let body = page.split(&format!("## {section}\n")).nth(1).unwrap();
    let body = body.split("\n## ").next().unwrap();
    body.lines()
        .filter(|l| l.starts_with("| `") && !l.starts_with("|---"))
        .filter_map(|l| l.rsplit(" | `").next())
        .map(|cell| cell.trim_end_matches(['|', ' ', '`']).to_string())
        .collect()
}

#[test]
fn fact_examples_parse() {
    let kb = kb();
    let facts = examples("Facts");
    assert_eq!(facts.len(), 5);
    for s in facts {
        Parser::new(&kb).parse_fact(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}

#[test]
fn question_examples_parse() {
    let kb = kb();
    let questions = examples("Questions");
    assert_eq!(questions.len(), 11);
    for q in questions {
        Parser::new(&kb).parse_question(&q).unwrap_or_else(|e| panic!("{q}: {e}"));
    }
}
