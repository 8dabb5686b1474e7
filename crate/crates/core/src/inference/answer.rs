use std::fmt;

use crate::fact_store::{FactId, FactStore};
use crate::knowledge_base::{FrameEntry, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    /// Reserved for explicit contradictions; no rule derives it yet.
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Validity {
    Deductive,
    Plausible,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Deductive => "deductive",
            Validity::Plausible => "plausible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Person,
    /// Motive cause or producing action; rendered with "as".
    Cause,
    /// Tool of an action; rendered with "by".
    Tool,
    Operation,
    Stage,
    State,
    Disease,
    Consequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub slot: Slot,
    pub phrase: String,
}

impl Binding {
    pub fn new(slot: Slot, phrase: impl Into<String>) -> Self {
        Binding { slot, phrase: phrase.into() }
    }
}

/// One line of a justification trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: &'static str,
    pub facts: Vec<FactId>,
    pub frames: Vec<FrameEntry>,
    pub plausible: bool,
    pub note: String,
}

impl Step {
    pub fn new(rule: &'static str, note: impl Into<String>) -> Self {
        Step { rule, facts: Vec::new(), frames: Vec::new(), plausible: false, note: note.into() }
    }

    pub fn facts(mut self, ids: impl IntoIterator<Item = FactId>) -> Self {
        for id in ids {
            if !self.facts.contains(&id) {
                self.facts.push(id);
            }
        }
        self
    }

    pub fn frame(mut self, entry: FrameEntry) -> Self {
        self.frames.push(entry);
        self
    }

    pub fn plausible_if(mut self, flag: bool) -> Self {
        self.plausible |= flag;
        self
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.facts.iter().map(ToString::to_string).collect();
        let frames: Vec<String> = self.frames.iter().map(ToString::to_string).collect();
        let tag = if self.plausible { Validity::Plausible } else { Validity::Deductive };
        write!(f, "{} | facts: {} | frames: {} | {} | {}", self.rule, ids.join(", "), frames.join("; "), tag, self.note)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub verdict: Verdict,
    pub bindings: Vec<Binding>,
    pub justification: Vec<Step>,
}

impl Answer {
    pub fn new(verdict: Verdict, bindings: Vec<Binding>, justification: Vec<Step>) -> Self {
        Answer { verdict, bindings, justification }
    }

    pub fn unknown(justification: Vec<Step>) -> Self {
        Answer::new(Verdict::Unknown, Vec::new(), justification)
    }

    /// Plausible as soon as any step of the trail is.
    pub fn validity(&self) -> Validity {
        if self.justification.iter().any(|s| s.plausible) {
            Validity::Plausible
        } else {
            Validity::Deductive
        }
    }

    pub fn cited_facts(&self) -> Vec<FactId> {
        let mut ids: Vec<FactId> = self.justification.iter().flat_map(|s| s.facts.iter().copied()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn phrases(&self, slot: Slot) -> Vec<&str> {
        self.bindings.iter().filter(|b| b.slot == slot).map(|b| b.phrase.as_str()).collect()
    }

    /// Every cited fact exists in `store` and every cited frame entry in `kb`.
    pub fn is_sound(&self, store: &FactStore, kb: &KnowledgeBase) -> bool {
        self.justification.iter().all(|s| {
            s.facts.iter().all(|id| store.get(*id).is_some()) && s.frames.iter().all(|e| kb.contains_entry(e))
        })
    }

    /// Trail followed by the validity tag, one step per line.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        for step in &self.justification {
            out.push_str(&step.to_string());
            out.push('\n');
        }
        out.push_str(&format!("validity: {}", self.validity()));
        out
    }
}
