//! Controlled-English parser for facts and questions.
//!
//! The grammar is a fixed set of clause templates followed by optional
//! time/place adjuncts in any order. See `docs/grammar.md` for the full list.

mod lexicon;
mod render;

use std::fmt;

use thiserror::Error;

pub use render::{fact_phrase, render_answer, render_fact, snapshot};

use crate::fact_store::{Entity, Fact, FactId, FactStore, Place};
use crate::knowledge_base::{operation_key, KnowledgeBase, VerbEntry};
use crate::time::{TimeError, Timestamp};
use lexicon::{split_adjuncts, split_sentences, tokenize, Token, PRONOUNS};

pub const QUESTION_TEMPLATES: [&str; 10] = [
    "Did <person> <verb> <object> [with <tool>] [adjuncts]?",
    "Who <verb-past> <object> [adjuncts]?",
    "Why did <person> <verb> <object> [adjuncts]?",
    "How did <person> <verb> <object> [adjuncts]?",
    "Who plans|intends|wants to <operation> [adjuncts]?",
    "What does <person> plan [adjuncts]?",
    "Which|What operation does <person> plan [adjuncts]?",
    "How does <person> plan|intend|want to <operation> [adjuncts]?",
    "Why is <object> <state> [adjuncts]?",
    "What is the state of <person> [adjuncts]? / How is <person>?",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty sentence")]
    Empty,
    #[error("cannot parse at `{token}`")]
    Unexpected { token: String },
    #[error("unknown verb form `{0}`")]
    UnknownVerb(String),
    #[error("invalid time: {0}")]
    Time(TimeError),
    #[error("unrecognized question; supported templates:\n  {}", QUESTION_TEMPLATES.join("\n  "))]
    UnsupportedQuestion,
}

/// A fact-file line that failed to load.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FactFileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuestionKind {
    YesNoAction,
    Who,
    WhyAction,
    HowAction,
    WhoPlans,
    WhatPlans,
    HowPlans,
    WhyEvent,
    StateOf,
}

impl fmt::Display for QuestionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuestionKind::YesNoAction => "yes_no_action",
            QuestionKind::Who => "who",
            QuestionKind::WhyAction => "why_action",
            QuestionKind::HowAction => "how_action",
            QuestionKind::WhoPlans => "who_plans",
            QuestionKind::WhatPlans => "what_plans",
            QuestionKind::HowPlans => "how_plans",
            QuestionKind::WhyEvent => "why_event",
            QuestionKind::StateOf => "state_of",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub kind: QuestionKind,
    pub subject: Option<Entity>,
    pub verb: Option<String>,
    pub object: Option<Entity>,
    pub way: Option<String>,
    pub operation: Option<String>,
    pub state: Option<String>,
    pub place: Option<Place>,
    pub time: Option<Timestamp>,
}

impl Question {
    fn new(kind: QuestionKind) -> Self {
        Question {
            kind,
            subject: None,
            verb: None,
            object: None,
            way: None,
            operation: None,
            state: None,
            place: None,
            time: None,
        }
    }

    /// Kind-specific slots are present.
    pub fn is_well_formed(&self) -> bool {
        use QuestionKind::*;
        match self.kind {
            YesNoAction | WhyAction | HowAction => self.subject.is_some() && self.verb.is_some(),
            Who => self.verb.is_some(),
            WhoPlans => self.operation.is_some(),
            WhatPlans => self.subject.is_some(),
            HowPlans => self.subject.is_some() && self.operation.is_some(),
            WhyEvent => self.object.is_some() && self.state.is_some(),
            StateOf => self.subject.is_some(),
        }
    }
}

/// Parser over the verb dictionary and operation names of a knowledge base.
pub struct Parser<'a> {
    kb: &'a KnowledgeBase,
}

impl<'a> Parser<'a> {
    pub fn new(kb: &'a KnowledgeBase) -> Self {
        Parser { kb }
    }

    /// Parse one line of a fact file; a line may hold several sentences.
    pub fn parse_facts(&self, line: &str) -> Result<Vec<Fact>, ParseError> {
        split_sentences(line).into_iter().map(|s| self.parse_fact(s)).collect()
    }

    /// Parse a fact file (one or more sentences per line, `#` comments) and
    /// assert the facts in order.
    pub fn load_facts(&self, store: &mut FactStore, text: &str) -> Result<Vec<FactId>, FactFileError> {
        let mut ids = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| FactFileError { line: idx + 1, message };
            for fact in self.parse_facts(line).map_err(|e| err(e.to_string()))? {
                ids.push(store.assert_fact(fact).map_err(|e| err(e.to_string()))?);
            }
        }
        Ok(ids)
    }

    pub fn parse_fact(&self, sentence: &str) -> Result<Fact, ParseError> {
        let tokens = tokenize(sentence);
        if tokens.is_empty() {
            return Err(ParseError::Empty);
        }
        let unexpected = |t: &Token| ParseError::Unexpected { token: t.text.clone() };

        let Some(vi) = tokens.iter().position(|t| self.is_clause_verb(t)) else {
            // A lone subject followed by an -ed word reads as an unknown verb.
            if let Some(t) = tokens.get(1).filter(|t| t.lower.ends_with("ed")) {
                return Err(ParseError::UnknownVerb(t.text.clone()));
            }
            return Err(unexpected(&tokens[0]));
        };
        if vi == 0 {
            return Err(unexpected(&tokens[0]));
        }
        let subject_tokens = &tokens[..vi];
        let verb = &tokens[vi];
        let rest = &tokens[vi + 1..];
        let (core_len, adj) = split_adjuncts(rest);
        let core = &rest[..core_len];
        let time = adj.timestamp()?;

        let mut fact = match verb.lower.as_str() {
            "is" | "was" | "are" => {
                if core.is_empty() {
                    return Err(unexpected(verb));
                }
                let state = words(core);
                let subject = entity(subject_tokens);
                if self.kb.verbs().is_result_state(&state) {
                    Fact::event(subject, &state)
                } else {
                    Fact::attribute(subject, &state)
                }
            }
            "has" | "have" | "had" => {
                if core.is_empty() {
                    return Err(unexpected(verb));
                }
                Fact::possession(entity(subject_tokens), entity(core))
            }
            "does" | "do" => {
                if core.first().map(|t| t.lower.as_str()) != Some("not") || core.len() < 2 {
                    return Err(core.first().map(unexpected).unwrap_or_else(|| unexpected(verb)));
                }
                let subject = Entity::common(&words(subject_tokens));
                Fact::situation(subject, &format!("does {}", words(core)))
            }
            _ => {
                let entry = self.kb.verbs().by_past(&verb.lower).expect("clause verb is a past form");
                let (object, instrument) = object_and_tool(core).map_err(unexpected)?;
                let mut f = Fact::action(entity(subject_tokens), &entry.verb);
                if let Some(o) = object {
                    f = f.with_object(o);
                }
                if let Some(i) = instrument {
                    f = f.with_instrument(&i);
                }
                f
            }
        };
        if let Some(t) = time {
            fact = fact.with_time(t);
        }
        if let Some(p) = adj.place {
            fact = fact.with_place(p);
        }
        Ok(fact)
    }

    fn is_clause_verb(&self, t: &Token) -> bool {
        matches!(t.lower.as_str(), "is" | "was" | "are" | "has" | "have" | "had" | "does" | "do")
            || self.kb.verbs().by_past(&t.lower).is_some()
    }

    pub fn parse_question(&self, text: &str) -> Result<Question, ParseError> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Err(ParseError::Empty);
        }
        let w = |i: usize| tokens.get(i).map(|t| t.lower.as_str()).unwrap_or("");
        use QuestionKind::*;
        let q = match (w(0), w(1)) {
            ("did", _) => self.action_question(YesNoAction, &tokens[1..])?,
            ("why", "did") => self.action_question(WhyAction, &tokens[2..])?,
            ("how", "did") => self.action_question(HowAction, &tokens[2..])?,
            ("who", p) if is_plan_word(p) && w(2) == "to" => self.operation_question(WhoPlans, None, &tokens[3..])?,
            ("who", _) => self.who_question(&tokens[1..])?,
            ("how", "does") => {
                let pi = tokens.iter().skip(2).position(|t| is_plan_word(&t.lower)).map(|p| p + 2);
                let Some(pi) = pi.filter(|&p| p > 2 && w(p + 1) == "to") else {
                    return Err(ParseError::UnsupportedQuestion);
                };
                self.operation_question(HowPlans, Some(entity(&tokens[2..pi])), &tokens[pi + 2..])?
            }
            ("what", "does") => self.what_plans(&tokens[2..])?,
            ("which" | "what", "operation") if w(2) == "does" => self.what_plans(&tokens[3..])?,
            ("what", "is") if w(2) == "state" && w(3) == "of" => self.state_question(&tokens[4..])?,
            ("how", "is") => self.state_question(&tokens[2..])?,
            ("why", "is" | "was") => self.why_event(&tokens[2..])?,
            _ => return Err(ParseError::UnsupportedQuestion),
        };
        debug_assert!(q.is_well_formed());
        Ok(q)
    }

    /// `<person> <lemma> <object> [with <tool>] [adjuncts]`
    fn action_question(&self, kind: QuestionKind, tokens: &[Token]) -> Result<Question, ParseError> {
        let vi = tokens
            .iter()
            .position(|t| self.kb.verbs().by_lemma(&t.lower).is_some())
            .ok_or(ParseError::UnsupportedQuestion)?;
        if vi == 0 {
            return Err(ParseError::Unexpected { token: tokens[0].text.clone() });
        }
        let mut q = Question::new(kind);
        q.subject = Some(entity(&tokens[..vi]));
        self.fill_action(&mut q, self.kb.verbs().by_lemma(&tokens[vi].lower).unwrap(), &tokens[vi + 1..])?;
        Ok(q)
    }

    fn who_question(&self, tokens: &[Token]) -> Result<Question, ParseError> {
        let entry = tokens
            .first()
            .and_then(|t| self.kb.verbs().by_past(&t.lower))
            .ok_or(ParseError::UnsupportedQuestion)?;
        let mut q = Question::new(QuestionKind::Who);
        self.fill_action(&mut q, entry, &tokens[1..])?;
        Ok(q)
    }

    fn fill_action(&self, q: &mut Question, entry: &VerbEntry, rest: &[Token]) -> Result<(), ParseError> {
        let (core_len, adj) = split_adjuncts(rest);
        let (object, tool) =
            object_and_tool(&rest[..core_len]).map_err(|t| ParseError::Unexpected { token: t.text.clone() })?;
        q.verb = Some(entry.verb.clone());
        q.object = object;
        q.way = tool;
        q.time = adj.timestamp()?;
        q.place = adj.place;
        Ok(())
    }

    fn operation_question(
        &self,
        kind: QuestionKind,
        subject: Option<Entity>,
        tokens: &[Token],
    ) -> Result<Question, ParseError> {
        let (op, adj) = self.operation_phrase(tokens)?;
        let mut q = Question::new(kind);
        q.subject = subject;
        q.operation = Some(op);
        q.time = adj.timestamp()?;
        q.place = adj.place;
        Ok(q)
    }

    /// Longest prefix naming a loaded operation, else everything before the
    /// adjuncts.
    fn operation_phrase(&self, tokens: &[Token]) -> Result<(String, lexicon::Adjuncts), ParseError> {
        for end in (1..=tokens.len()).rev() {
            let name = operation_key(&words(&tokens[..end]));
            if self.kb.get_operation_frame(&name).is_some() {
                if let Some(adj) = lexicon::adjuncts(&tokens[end..]) {
                    return Ok((name, adj));
                }
            }
        }
        let (core_len, adj) = split_adjuncts(tokens);
        if core_len == 0 {
            return Err(ParseError::UnsupportedQuestion);
        }
        Ok((operation_key(&words(&tokens[..core_len])), adj))
    }

    /// `<person> plan [adjuncts]`
    fn what_plans(&self, tokens: &[Token]) -> Result<Question, ParseError> {
        let pi = tokens.iter().position(|t| is_plan_word(&t.lower)).filter(|&p| p > 0);
        let Some(pi) = pi else { return Err(ParseError::UnsupportedQuestion) };
        let adj = lexicon::adjuncts(&tokens[pi + 1..])
            .ok_or_else(|| ParseError::Unexpected { token: tokens[pi + 1].text.clone() })?;
        let mut q = Question::new(QuestionKind::WhatPlans);
        q.subject = Some(entity(&tokens[..pi]));
        q.time = adj.timestamp()?;
        q.place = adj.place;
        Ok(q)
    }

    fn state_question(&self, tokens: &[Token]) -> Result<Question, ParseError> {
        let (core_len, adj) = split_adjuncts(tokens);
        if core_len == 0 {
            return Err(ParseError::UnsupportedQuestion);
        }
        let mut q = Question::new(QuestionKind::StateOf);
        q.subject = Some(entity(&tokens[..core_len]));
        q.time = adj.timestamp()?;
        q.place = adj.place;
        Ok(q)
    }

    /// `<object> <state> [adjuncts]`
    fn why_event(&self, tokens: &[Token]) -> Result<Question, ParseError> {
        let (core_len, adj) = split_adjuncts(tokens);
        if core_len < 2 {
            return Err(ParseError::UnsupportedQuestion);
        }
        let core = &tokens[..core_len];
        let mut q = Question::new(QuestionKind::WhyEvent);
        q.object = Some(entity(&core[..core_len - 1]));
        q.state = Some(core[core_len - 1].lower.clone());
        q.time = adj.timestamp()?;
        q.place = adj.place;
        Ok(q)
    }
}

fn is_plan_word(w: &str) -> bool {
    matches!(w, "plan" | "plans" | "intend" | "intends" | "want" | "wants")
}

fn words(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.lower.as_str()).collect::<Vec<_>>().join(" ")
}

/// A noun phrase: a single capitalized word without an article is a proper
/// name; anything else is a common noun.
fn entity(tokens: &[Token]) -> Entity {
    let named = tokens.len() == 1
        && tokens[0].is_capitalized()
        && !tokens[0].after_article
        && !PRONOUNS.contains(&tokens[0].lower.as_str());
    if named {
        Entity::named(&tokens[0].lower)
    } else {
        Entity::common(&words(tokens))
    }
}

type ObjectAndTool = (Option<Entity>, Option<String>);

fn object_and_tool(core: &[Token]) -> Result<ObjectAndTool, &Token> {
    match core.iter().position(|t| t.lower == "with") {
        Some(wi) => {
            let tool = &core[wi + 1..];
            if tool.is_empty() {
                return Err(&core[wi]);
            }
            let object = (wi > 0).then(|| entity(&core[..wi]));
            Ok((object, Some(words(tool))))
        }
        None => Ok(((!core.is_empty()).then(|| entity(core)), None)),
    }
}
