//! Canonical sentences for facts and one-line answers.

use crate::fact_store::{capitalize, Entity, Fact, FactKind, FactStore};
use crate::inference::{Answer, Slot, Verdict};
use crate::knowledge_base::KnowledgeBase;
use crate::time::{month_name, Qualifier, Timestamp};

fn subject_np(e: &Entity) -> String {
    if e.is_named() {
        e.to_string()
    } else {
        format!("The {}", e.token())
    }
}

fn object_np(e: &Entity) -> String {
    if e.is_named() {
        e.to_string()
    } else {
        format!("a {}", e.token())
    }
}

fn past_of(kb: &KnowledgeBase, verb: &str) -> String {
    kb.verbs().by_lemma(verb).map(|e| e.past_form.clone()).unwrap_or_else(|| verb.to_string())
}

fn time_phrase(ts: &Timestamp) -> String {
    let mut parts = Vec::new();
    if let Some(h) = ts.hour() {
        let q = match ts.qualifier() {
            Qualifier::After => "after",
            Qualifier::Before => "before",
            Qualifier::At | Qualifier::None => "at",
        };
        if ts.minute() == 0 {
            parts.push(format!("{q} {h} o'clock"));
        } else {
            parts.push(format!("{q} {h}:{:02}", ts.minute()));
        }
    }
    match (ts.day(), ts.month()) {
        (Some(d), Some(m)) => parts.push(format!("on the {d} of {}", capitalize(month_name(m)))),
        (None, Some(m)) => parts.push(format!("in {}", capitalize(month_name(m)))),
        _ => {}
    }
    parts.join(" ")
}

/// Sentence that parses back to an equal fact.
pub fn render_fact(fact: &Fact, kb: &KnowledgeBase) -> String {
    let subject = fact.subject.as_ref();
    let mut s = match fact.kind {
        FactKind::Action => {
            let mut s = format!("{} {}", subject_np(subject.unwrap()), past_of(kb, fact.verb.as_deref().unwrap_or("")));
            if let Some(o) = &fact.object {
                s += &format!(" {}", object_np(o));
            }
            if let Some(i) = &fact.instrument {
                s += &format!(" with a {i}");
            }
            s
        }
        FactKind::Attribute => format!("{} is {}", subject_np(subject.unwrap()), fact.state.as_deref().unwrap_or("")),
        FactKind::Possession => format!("{} has {}", subject_np(subject.unwrap()), object_np(fact.object.as_ref().unwrap())),
        FactKind::Event => {
            format!("{} is {}", subject_np(fact.object.as_ref().unwrap()), fact.state.as_deref().unwrap_or(""))
        }
        FactKind::Situation => {
            format!("{} {}", capitalize(subject.unwrap().token()), fact.state.as_deref().unwrap_or(""))
        }
    };
    if let Some(t) = &fact.time {
        let tp = time_phrase(t);
        if !tp.is_empty() {
            s += " ";
            s += &tp;
        }
    }
    if let Some(p) = &fact.place {
        s += &format!(" in {p}");
    }
    s.push('.');
    s
}

/// Bare lower-case description without articles, time or place:
/// "man shot girl", "ship has distress", "signalling does not work".
pub fn fact_phrase(fact: &Fact, kb: &KnowledgeBase) -> String {
    let tok = |e: &Option<Entity>| e.as_ref().map(|e| e.token().to_string()).unwrap_or_default();
    let state = fact.state.clone().unwrap_or_default();
    let words = match fact.kind {
        FactKind::Action => {
            let mut v = vec![tok(&fact.subject), past_of(kb, fact.verb.as_deref().unwrap_or(""))];
            if fact.object.is_some() {
                v.push(tok(&fact.object));
            }
            if let Some(i) = &fact.instrument {
                v.push(format!("with {i}"));
            }
            v
        }
        FactKind::Attribute => vec![tok(&fact.subject), "is".into(), state],
        FactKind::Possession => vec![tok(&fact.subject), "has".into(), tok(&fact.object)],
        FactKind::Event => vec![tok(&fact.object), "is".into(), state],
        FactKind::Situation => vec![tok(&fact.subject), state],
    };
    words.join(" ")
}

/// The store as fact-file text, one canonical sentence per line.
pub fn snapshot(store: &FactStore, kb: &KnowledgeBase) -> String {
    store.all().iter().map(|f| render_fact(f, kb) + "\n").collect()
}

/// One-line answer text; way stages and script consequences get a line each.
pub fn render_answer(answer: &Answer) -> String {
    if answer.verdict != Verdict::Yes || answer.bindings.is_empty() {
        return answer.verdict.to_string();
    }
    let mut lines: Vec<String> = Vec::new();
    let mut inline: Vec<String> = Vec::new();
    for b in &answer.bindings {
        match b.slot {
            Slot::Stage | Slot::Consequence => lines.push(b.phrase.clone()),
            Slot::Cause => inline.push(format!("as {}", b.phrase)),
            Slot::Tool => inline.push(format!("by {}", b.phrase)),
            Slot::Operation => inline.push(format!("to {}", b.phrase)),
            Slot::Person | Slot::State | Slot::Disease => inline.push(b.phrase.clone()),
        }
    }
    if !inline.is_empty() {
        lines.insert(0, inline.join(", "));
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{Binding, Step};

    fn yes(b: Vec<Binding>) -> Answer {
        Answer::new(Verdict::Yes, b, vec![Step::new("test", "")])
    }

    #[test]
    fn answer_phrasing() {
        assert_eq!(render_answer(&yes(vec![Binding::new(Slot::Cause, "subject is criminal")])), "as subject is criminal");
        assert_eq!(render_answer(&yes(vec![Binding::new(Slot::Tool, "pistol")])), "by pistol");
        assert_eq!(render_answer(&yes(vec![])), "yes");
        assert_eq!(render_answer(&Answer::unknown(vec![])), "unknown");
        let two = yes(vec![Binding::new(Slot::Stage, "to come in through window"), Binding::new(Slot::Stage, "to open safe with tool")]);
        assert_eq!(render_answer(&two), "to come in through window\nto open safe with tool");
    }
}
