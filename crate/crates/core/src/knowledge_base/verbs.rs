//! Verb dictionary: lemma, past form, and the state an action leaves behind.

use std::fmt;

use super::KbError;
use crate::fact_store::normalize_token;

/// Who ends up in the result state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Target {
    #[default]
    Object,
    Subject,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Object => "object",
            Target::Subject => "subject",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbEntry {
    pub verb: String,
    pub past_form: String,
    pub result_state: Option<String>,
    pub result_applies_to: Target,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerbDictionary {
    entries: Vec<VerbEntry>,
}

impl VerbDictionary {
    /// Parse `lemma|past_form|result_state|applies_to` lines.
    pub fn load(text: &str) -> Result<VerbDictionary, KbError> {
        let mut dict = VerbDictionary::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let f: Vec<String> = content.split('|').map(normalize_token).collect();
            let err = |message: String| KbError::Parse { line, message };
            if f.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", f.len())));
            }
            if f[0].is_empty() || f[1].is_empty() {
                return Err(err("lemma and past form are required".into()));
            }
            let applies = match f[3].as_str() {
                "" | "object" => Target::Object,
                "subject" => Target::Subject,
                other => return Err(err(format!("applies_to must be object or subject, found `{other}`"))),
            };
            dict.insert(VerbEntry {
                verb: f[0].clone(),
                past_form: f[1].clone(),
                result_state: (!f[2].is_empty()).then(|| f[2].clone()),
                result_applies_to: applies,
            });
        }
        Ok(dict)
    }

    /// Add or replace the entry for a lemma.
    pub fn insert(&mut self, entry: VerbEntry) {
        match self.entries.iter_mut().find(|e| e.verb == entry.verb) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    /// Resolve a lemma or a past form.
    pub fn lookup(&self, token: &str) -> Option<&VerbEntry> {
        let t = token.to_lowercase();
        self.entries.iter().find(|e| e.verb == t).or_else(|| self.entries.iter().find(|e| e.past_form == t))
    }

    pub fn by_lemma(&self, lemma: &str) -> Option<&VerbEntry> {
        let t = lemma.to_lowercase();
        self.entries.iter().find(|e| e.verb == t)
    }

    pub fn by_past(&self, past: &str) -> Option<&VerbEntry> {
        let t = past.to_lowercase();
        self.entries.iter().find(|e| e.past_form == t)
    }

    pub fn state_producing_verbs(&self, state: &str) -> Vec<&VerbEntry> {
        let s = normalize_token(state);
        self.entries.iter().filter(|e| e.result_state.as_deref() == Some(s.as_str())).collect()
    }

    /// True when some verb leaves `state` behind ("dead", "wounded", ...).
    pub fn is_result_state(&self, state: &str) -> bool {
        !self.state_producing_verbs(state).is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VerbEntry> {
        self.entries.iter()
    }
}
