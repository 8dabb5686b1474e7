//! Frame types and the frame-file reader/writer.
//!
//! A frame file is a sequence of blocks, each opened by `frame is <name>`:
//!
//! ```text
//! frame is rob office
//! alternative 1; to go to office
//! alternative 1; to come in through window if signalling does not work
//!
//! frame is rob
//! to take money as subject is criminal
//!
//! frame is the script of distress
//! ship has distress
//! persons may die from lack of water and food
//!
//! frame is influenza
//! there is cough
//! ```
//!
//! The body decides the frame kind: `alternative` lines make an operation,
//! `there is` lines a disease, a `script of` header a script, and
//! `<motive> as <cause>` / `by <tool>` lines an action frame.

use std::fmt;

use super::KbError;
use crate::fact_store::normalize_token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    SubjectAttribute,
    Situation,
    SubjectCapability,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    pub kind: ConditionKind,
    pub pattern: String,
}

impl Condition {
    pub fn parse(pattern: &str) -> Option<Condition> {
        let pattern = normalize_token(pattern);
        if pattern.is_empty() {
            return None;
        }
        let kind = if pattern.starts_with("subject can ") {
            ConditionKind::SubjectCapability
        } else if pattern.starts_with("subject ") {
            ConditionKind::SubjectAttribute
        } else {
            ConditionKind::Situation
        };
        Some(Condition { kind, pattern })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preposition {
    By,
    With,
    Through,
}

impl Preposition {
    fn word(self) -> &'static str {
        match self {
            Preposition::By => "by",
            Preposition::With => "with",
            Preposition::Through => "through",
        }
    }

    fn from_word(w: &str) -> Option<Self> {
        match w {
            "by" => Some(Preposition::By),
            "with" => Some(Preposition::With),
            "through" => Some(Preposition::Through),
            _ => None,
        }
    }
}

/// A means of acting: a tool ("by pistol", "with tool") or a passage
/// ("through window").
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Way {
    pub preposition: Preposition,
    pub target: String,
}

impl Way {
    pub fn new(preposition: Preposition, target: &str) -> Self {
        Way { preposition, target: normalize_token(target) }
    }

    pub fn tool(&self) -> Option<&str> {
        match self.preposition {
            Preposition::Through => None,
            _ => Some(&self.target),
        }
    }

    pub fn text(&self) -> String {
        format!("{} {}", self.preposition.word(), self.target)
    }

    fn parse_line(line: &str) -> Option<Way> {
        let (head, rest) = line.split_once(' ')?;
        let prep = Preposition::from_word(head)?;
        let rest = rest.trim();
        (!rest.is_empty()).then(|| Way::new(prep, rest))
    }

    /// The way carried by the last `with`/`through`/`by` phrase of a stage.
    fn trailing(action: &str) -> Option<Way> {
        let words: Vec<&str> = action.split(' ').collect();
        let pos = words.iter().rposition(|w| Preposition::from_word(w).is_some())?;
        if pos + 1 >= words.len() {
            return None;
        }
        Some(Way::new(Preposition::from_word(words[pos])?, &words[pos + 1..].join(" ")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motive {
    pub text: String,
    pub cause: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionFrame {
    pub action: String,
    pub motives: Vec<Motive>,
    pub ways: Vec<Way>,
}

impl ActionFrame {
    pub fn tools(&self) -> impl Iterator<Item = &str> {
        self.ways.iter().filter_map(Way::tool)
    }

    pub fn way_for(&self, target: &str) -> Option<&Way> {
        self.ways.iter().find(|w| w.target == target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub action_text: String,
    pub condition: Option<Condition>,
    pub way: Option<Way>,
}

impl Stage {
    pub fn parse(text: &str) -> Option<Stage> {
        let text = normalize_token(text);
        let (action, condition) = match text.split_once(" if ") {
            Some((a, c)) => (a.trim().to_string(), Some(Condition::parse(c)?)),
            None => (text.clone(), None),
        };
        if action.is_empty() {
            return None;
        }
        let way = Way::trailing(&action);
        Some(Stage { action_text: action, condition, way })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.action_text)?;
        if let Some(c) = &self.condition {
            write!(f, " if {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub index: u32,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationFrame {
    pub name: String,
    pub alternatives: Vec<Alternative>,
    /// Verb of the action the operation serves, e.g. `rob` for "rob office".
    pub planned_action: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Does,
    Can,
    May,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consequence {
    pub subject: String,
    pub modality: Modality,
    pub phrase: String,
}

impl Consequence {
    fn parse(line: &str) -> Option<Consequence> {
        let mut words = line.split(' ');
        let subject = words.next()?.to_string();
        let rest: Vec<&str> = words.collect();
        let (modality, phrase) = match rest.first() {
            Some(&"can") => (Modality::Can, &rest[1..]),
            Some(&"may") => (Modality::May, &rest[1..]),
            _ => (Modality::Does, &rest[..]),
        };
        if phrase.is_empty() {
            return None;
        }
        Some(Consequence { subject, modality, phrase: phrase.join(" ") })
    }

    /// Predicate with its modality, e.g. "may die from lack of water and food".
    pub fn predicate(&self) -> String {
        match self.modality {
            Modality::Does => self.phrase.clone(),
            Modality::Can => format!("can {}", self.phrase),
            Modality::May => format!("may {}", self.phrase),
        }
    }
}

impl fmt::Display for Consequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.subject, self.predicate())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptFrame {
    pub name: String,
    pub trigger: String,
    pub consequences: Vec<Consequence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiseaseFrame {
    pub name: String,
    pub symptoms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Action(ActionFrame),
    Operation(OperationFrame),
    Script(ScriptFrame),
    Disease(DiseaseFrame),
}

impl Frame {
    pub fn name(&self) -> &str {
        match self {
            Frame::Action(f) => &f.action,
            Frame::Operation(f) => &f.name,
            Frame::Script(f) => &f.name,
            Frame::Disease(f) => &f.name,
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Action(a) => {
                writeln!(f, "frame is {}", a.action)?;
                for m in &a.motives {
                    writeln!(f, "{} as {}", m.text, m.cause)?;
                }
                for w in &a.ways {
                    writeln!(f, "{}", w.text())?;
                }
            }
            Frame::Operation(op) => {
                writeln!(f, "frame is {}", op.name)?;
                for alt in &op.alternatives {
                    for stage in &alt.stages {
                        writeln!(f, "alternative {}; {}", alt.index, stage)?;
                    }
                }
            }
            Frame::Script(s) => {
                writeln!(f, "frame is the script of {}", s.name)?;
                writeln!(f, "{}", s.trigger)?;
                for c in &s.consequences {
                    writeln!(f, "{c}")?;
                }
            }
            Frame::Disease(d) => {
                writeln!(f, "frame is {}", d.name)?;
                for s in &d.symptoms {
                    writeln!(f, "there is {s}")?;
                }
            }
        }
        Ok(())
    }
}

struct RawFrame {
    header_line: usize,
    name: String,
    body: Vec<(usize, String)>,
}

/// Split frame-file text into frames.
pub fn parse_frames(text: &str) -> Result<Vec<Frame>, KbError> {
    let mut raw: Vec<RawFrame> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = normalize_token(line.split('#').next().unwrap_or(""));
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix("frame is ") {
            raw.push(RawFrame { header_line: line_no, name: name.trim().to_string(), body: Vec::new() });
            continue;
        }
        match raw.last_mut() {
            Some(frame) => frame.body.push((line_no, content)),
            None => return Err(KbError::Parse { line: line_no, message: format!("`{content}` appears before any `frame is` header") }),
        }
    }
    raw.into_iter().map(build_frame).collect()
}

fn build_frame(raw: RawFrame) -> Result<Frame, KbError> {
    let err = |line: usize, message: String| KbError::Parse { line, message };
    if raw.name.is_empty() {
        return Err(err(raw.header_line, "frame without a name".into()));
    }
    if raw.body.is_empty() {
        return Err(err(raw.header_line, format!("frame `{}` has no body", raw.name)));
    }

    let script_name = raw.name.strip_prefix("the script of ").or_else(|| raw.name.strip_prefix("script of "));
    if let Some(name) = script_name {
        let (_, trigger) = &raw.body[0];
        let mut consequences = Vec::new();
        for (line, text) in &raw.body[1..] {
            consequences.push(Consequence::parse(text).ok_or_else(|| err(*line, format!("bad script statement `{text}`")))?);
        }
        return Ok(Frame::Script(ScriptFrame { name: name.to_string(), trigger: trigger.clone(), consequences }));
    }

    if raw.body.iter().any(|(_, l)| l.starts_with("alternative")) {
        let mut alternatives: Vec<Alternative> = Vec::new();
        for (line, text) in &raw.body {
            let (head, stage_text) = text
                .split_once(';')
                .ok_or_else(|| err(*line, format!("expected `alternative <n>; <stage>`, found `{text}`")))?;
            let index: u32 = head
                .trim()
                .strip_prefix("alternative")
                .and_then(|n| n.trim().parse().ok())
                .filter(|n| *n > 0)
                .ok_or_else(|| err(*line, format!("bad alternative number in `{head}`")))?;
            let stage = Stage::parse(stage_text).ok_or_else(|| err(*line, format!("bad stage `{stage_text}`")))?;
            match alternatives.iter_mut().find(|a| a.index == index) {
                Some(a) => a.stages.push(stage),
                None => alternatives.push(Alternative { index, stages: vec![stage] }),
            }
        }
        alternatives.sort_by_key(|a| a.index);
        let name = operation_key(&raw.name);
        let planned_action = name.split(' ').next().unwrap_or_default().to_string();
        return Ok(Frame::Operation(OperationFrame { name, alternatives, planned_action }));
    }

    if raw.body.iter().all(|(_, l)| l.starts_with("there is ")) {
        let symptoms = raw.body.iter().map(|(_, l)| l["there is ".len()..].trim().to_string()).collect();
        return Ok(Frame::Disease(DiseaseFrame { name: raw.name, symptoms }));
    }

    let mut motives: Vec<Motive> = Vec::new();
    let mut ways = Vec::new();
    for (line, text) in &raw.body {
        if let Some(way) = Way::parse_line(text) {
            ways.push(way);
        } else if let Some((motive, cause)) = text.split_once(" as ") {
            let cause = Condition::parse(cause).ok_or_else(|| err(*line, "empty cause".into()))?;
            let motive = motive.trim().to_string();
            if motives.iter().any(|m| m.text == motive) {
                return Err(err(*line, format!("duplicate motive `{motive}`")));
            }
            motives.push(Motive { text: motive, cause });
        } else {
            return Err(err(*line, format!("cannot classify line `{text}` in frame `{}`", raw.name)));
        }
    }
    Ok(Frame::Action(ActionFrame { action: raw.name, motives, ways }))
}

/// Lookup key for operation names: lower case, no leading "to", no articles.
pub fn operation_key(name: &str) -> String {
    let norm = normalize_token(name);
    let words: Vec<&str> = norm.split(' ').filter(|w| !matches!(*w, "a" | "an" | "the")).collect();
    let words = match words.first() {
        Some(&"to") => &words[1..],
        _ => &words[..],
    };
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_with_condition_and_way() {
        let s = Stage::parse("to come in through window if signalling does not work").unwrap();
        assert_eq!(s.action_text, "to come in through window");
        assert_eq!(s.condition.as_ref().unwrap().pattern, "signalling does not work");
        assert_eq!(s.condition.as_ref().unwrap().kind, ConditionKind::Situation);
        assert_eq!(s.way, Some(Way::new(Preposition::Through, "window")));
    }

    #[test]
    fn stage_with_tool() {
        let s = Stage::parse("to open safe with tool").unwrap();
        assert_eq!(s.way.as_ref().unwrap().tool(), Some("tool"));
        assert!(Stage::parse("to go to office").unwrap().way.is_none());
    }

    #[test]
    fn condition_kinds() {
        assert_eq!(Condition::parse("subject is criminal").unwrap().kind, ConditionKind::SubjectAttribute);
        assert_eq!(Condition::parse("subject can drive").unwrap().kind, ConditionKind::SubjectCapability);
        assert_eq!(Condition::parse("insult of subject").unwrap().kind, ConditionKind::Situation);
        assert!(Condition::parse("  ").is_none());
    }

    #[test]
    fn line_before_header() {
        let err = parse_frames("\nalternative 1; to go to office\nframe is x\n").unwrap_err();
        assert!(matches!(err, KbError::Parse { line: 2, .. }));
    }

    #[test]
    fn consequences_carry_modality() {
        let c = Consequence::parse("persons may die from lack of water and food").unwrap();
        assert_eq!(c.modality, Modality::May);
        assert_eq!(c.predicate(), "may die from lack of water and food");
        assert_eq!(Consequence::parse("persons sit down in boats").unwrap().modality, Modality::Does);
    }

    #[test]
    fn operation_keys_ignore_articles() {
        assert_eq!(operation_key("to rob the office"), "rob office");
        assert_eq!(operation_key("Rob  Office"), "rob office");
    }

    #[test]
    fn unclassifiable_body() {
        assert!(parse_frames("frame is shoot\nsomething odd\n").is_err());
        assert!(parse_frames("frame is shoot\nrobbing as x\nrobbing as y\n").is_err());
    }
}
