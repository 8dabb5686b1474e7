//! Frame knowledge: action frames, operations, scripts, diseases and the
//! verb dictionary.

mod frames;
mod verbs;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

pub use frames::{
    operation_key, parse_frames, ActionFrame, Alternative, Condition, ConditionKind, Consequence, DiseaseFrame, Frame,
    Modality, Motive, OperationFrame, Preposition, ScriptFrame, Stage, Way,
};
pub use verbs::{Target, VerbDictionary, VerbEntry};

use crate::fact_store::normalize_token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("at least one symptom is required")]
    NoSymptoms,
}

/// One citable piece of the knowledge base, used in justification trails.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FrameEntry {
    Motive { action: String, motive: String },
    Way { action: String, way: String },
    Stage { operation: String, alternative: u32, stage: usize },
    Operation { name: String },
    Symptom { disease: String, symptom: String },
    ScriptTrigger { script: String },
    Consequence { script: String, index: usize },
    Verb { lemma: String },
}

impl fmt::Display for FrameEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameEntry::Motive { action, motive } => write!(f, "{action}: motive {motive}"),
            FrameEntry::Way { action, way } => write!(f, "{action}: way {way}"),
            FrameEntry::Stage { operation, alternative, stage } => {
                write!(f, "{operation}: alternative {alternative} stage {stage}")
            }
            FrameEntry::Operation { name } => write!(f, "operation {name}"),
            FrameEntry::Symptom { disease, symptom } => write!(f, "{disease}: symptom {symptom}"),
            FrameEntry::ScriptTrigger { script } => write!(f, "script {script}: trigger"),
            FrameEntry::Consequence { script, index } => write!(f, "script {script}: consequence {index}"),
            FrameEntry::Verb { lemma } => write!(f, "verb {lemma}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiseaseMatch {
    pub disease: String,
    pub matched: Vec<String>,
    pub total: usize,
}

impl DiseaseMatch {
    pub fn fraction(&self) -> f64 {
        self.matched.len() as f64 / self.total as f64
    }

    pub fn is_complete(&self) -> bool {
        self.matched.len() == self.total
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    actions: IndexMap<String, ActionFrame>,
    operations: IndexMap<String, OperationFrame>,
    scripts: IndexMap<String, ScriptFrame>,
    diseases: IndexMap<String, DiseaseFrame>,
    verbs: VerbDictionary,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_verbs(verbs: VerbDictionary) -> Self {
        KnowledgeBase { verbs, ..Self::default() }
    }

    pub fn verbs(&self) -> &VerbDictionary {
        &self.verbs
    }

    pub fn set_verbs(&mut self, verbs: VerbDictionary) {
        self.verbs = verbs;
    }

    /// Load frame-file text. Frames whose name is already known replace the
    /// earlier definition.
    pub fn load_frames(&mut self, text: &str) -> Result<usize, KbError> {
        let frames = parse_frames(text)?;
        let n = frames.len();
        for frame in frames {
            self.insert(frame);
        }
        Ok(n)
    }

    pub fn insert(&mut self, frame: Frame) {
        let name = frame.name().to_string();
        let key = operation_key(&name);
        match frame {
            Frame::Action(f) => {
                self.operations.shift_remove(&key);
                self.scripts.shift_remove(&name);
                self.diseases.shift_remove(&name);
                self.actions.insert(name, f);
            }
            Frame::Operation(f) => {
                self.actions.shift_remove(&name);
                self.scripts.shift_remove(&name);
                self.diseases.shift_remove(&name);
                self.operations.insert(key, f);
            }
            Frame::Script(f) => {
                self.scripts.insert(name, f);
            }
            Frame::Disease(f) => {
                self.actions.shift_remove(&name);
                self.operations.shift_remove(&key);
                self.diseases.insert(name, f);
            }
        }
    }

    pub fn frame_count(&self) -> usize {
        self.actions.len() + self.operations.len() + self.scripts.len() + self.diseases.len()
    }

    pub fn get_action_frame(&self, verb: &str) -> Option<&ActionFrame> {
        self.actions.get(&normalize_token(verb))
    }

    pub fn get_operation_frame(&self, name: &str) -> Option<&OperationFrame> {
        self.operations.get(&operation_key(name))
    }

    /// Operation frames in load order.
    pub fn list_operation_frames(&self) -> Vec<&OperationFrame> {
        self.operations.values().collect()
    }

    pub fn scripts(&self) -> impl Iterator<Item = &ScriptFrame> {
        self.scripts.values()
    }

    pub fn diseases(&self) -> impl Iterator<Item = &DiseaseFrame> {
        self.diseases.values()
    }

    pub fn verb_lookup(&self, token: &str) -> Option<&VerbEntry> {
        self.verbs.lookup(token)
    }

    pub fn state_producing_verbs(&self, state: &str) -> Vec<&VerbEntry> {
        self.verbs.state_producing_verbs(state)
    }

    /// Diseases with at least one observed symptom, best fraction first,
    /// ties by name.
    pub fn match_diseases(&self, observed: &[&str]) -> Result<Vec<DiseaseMatch>, KbError> {
        if observed.is_empty() {
            return Err(KbError::NoSymptoms);
        }
        let observed: Vec<String> = observed.iter().map(|s| normalize_token(s)).collect();
        let mut out: Vec<DiseaseMatch> = self
            .diseases
            .values()
            .filter_map(|d| {
                let matched: Vec<String> = d
                    .symptoms
                    .iter()
                    .filter(|s| observed.iter().any(|o| phrase_contains(s, o) || phrase_contains(o, s)))
                    .cloned()
                    .collect();
                (!matched.is_empty()).then(|| DiseaseMatch { disease: d.name.clone(), matched, total: d.symptoms.len() })
            })
            .collect();
        out.sort_by(|a, b| {
            let lhs = b.matched.len() * a.total;
            let rhs = a.matched.len() * b.total;
            lhs.cmp(&rhs).then_with(|| a.disease.cmp(&b.disease))
        });
        Ok(out)
    }

    /// Whether a cited entry exists in this knowledge base.
    pub fn contains_entry(&self, entry: &FrameEntry) -> bool {
        match entry {
            FrameEntry::Motive { action, motive } => {
                self.get_action_frame(action).is_some_and(|f| f.motives.iter().any(|m| &m.text == motive))
            }
            FrameEntry::Way { action, way } => {
                self.get_action_frame(action).is_some_and(|f| f.ways.iter().any(|w| &w.text() == way))
            }
            FrameEntry::Stage { operation, alternative, stage } => self.get_operation_frame(operation).is_some_and(|op| {
                op.alternatives.iter().any(|a| a.index == *alternative && *stage >= 1 && *stage <= a.stages.len())
            }),
            FrameEntry::Operation { name } => self.get_operation_frame(name).is_some(),
            FrameEntry::Symptom { disease, symptom } => {
                self.diseases.get(disease).is_some_and(|d| d.symptoms.iter().any(|s| s == symptom))
            }
            FrameEntry::ScriptTrigger { script } => self.scripts.contains_key(script),
            FrameEntry::Consequence { script, index } => {
                self.scripts.get(script).is_some_and(|s| *index >= 1 && *index <= s.consequences.len())
            }
            FrameEntry::Verb { lemma } => self.verbs.by_lemma(lemma).is_some(),
        }
    }

    /// Frame-file text for every loaded frame. Loading the result yields an
    /// equal knowledge base (verbs aside).
    pub fn serialize(&self) -> String {
        let mut blocks: Vec<String> = Vec::new();
        blocks.extend(self.actions.values().map(|f| Frame::Action(f.clone()).to_string()));
        blocks.extend(self.operations.values().map(|f| Frame::Operation(f.clone()).to_string()));
        blocks.extend(self.scripts.values().map(|f| Frame::Script(f.clone()).to_string()));
        blocks.extend(self.diseases.values().map(|f| Frame::Disease(f.clone()).to_string()));
        blocks.join("\n")
    }
}

/// True when the words of `needle` occur contiguously in `haystack`.
pub fn phrase_contains(haystack: &str, needle: &str) -> bool {
    let h: Vec<&str> = haystack.split_whitespace().collect();
    let n: Vec<&str> = needle.split_whitespace().collect();
    !n.is_empty() && h.windows(n.len()).any(|w| w == n.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAMES: &str = include_str!("../../fixtures/frames.txt");

    fn kb() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.load_frames(FRAMES).unwrap();
        kb
    }

    #[test]
    fn rob_office_has_five_stages() {
        let mut kb = KnowledgeBase::new();
        let text = "frame  is  rob office\n\
                    alternative 1; to go to office\n\
                    alternative 1; to come in through window  if  signalling does not work\n\
                    alternative 1; to open safe with tool\n\
                    alternative 1; to take money\n\
                    alternative 1; to come out  through window\n";
        assert_eq!(kb.load_frames(text).unwrap(), 1);
        let op = kb.get_operation_frame("rob office").unwrap();
        assert_eq!(op.alternatives.len(), 1);
        assert_eq!(op.alternatives[0].stages.len(), 5);
        assert_eq!(op.planned_action, "rob");
        assert!(std::ptr::eq(op, kb.get_operation_frame("to rob the office").unwrap()));
    }

    #[test]
    fn empty_text_loads_nothing() {
        let mut kb = KnowledgeBase::new();
        assert_eq!(kb.load_frames("").unwrap(), 0);
        assert!(kb.list_operation_frames().is_empty());
    }

    #[test]
    fn action_frames() {
        let kb = kb();
        let shoot = kb.get_action_frame("shoot").unwrap();
        assert_eq!(shoot.motives[0].text, "robbing");
        assert_eq!(shoot.motives[0].cause.pattern, "subject is criminal");
        assert!(shoot.tools().any(|t| t == "pistol"));
        let rob = kb.get_action_frame("rob").unwrap();
        assert_eq!(rob.motives[0].text, "to take money");
        assert!(kb.get_action_frame("juggle").is_none());
    }

    #[test]
    fn influenza_symptoms() {
        let kb = kb();
        let m = kb.match_diseases(&["high temperature", "cough"]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].disease, "influenza");
        assert_eq!((m[0].matched.len(), m[0].total), (2, 3));
        let m = kb.match_diseases(&["headache"]).unwrap();
        assert_eq!((m[0].matched.len(), m[0].total), (1, 3));
        assert_eq!(kb.match_diseases(&[]), Err(KbError::NoSymptoms));
    }

    #[test]
    fn script_frame() {
        let kb = kb();
        let s = kb.scripts().next().unwrap();
        assert_eq!(s.name, "distress");
        assert_eq!(s.trigger, "ship has distress");
        assert_eq!(s.consequences.len(), 3);
        assert_eq!(s.consequences[2].modality, Modality::May);
    }

    #[test]
    fn serialize_is_a_fixed_point() {
        let kb = kb();
        let text = kb.serialize();
        let mut again = KnowledgeBase::new();
        again.load_frames(&text).unwrap();
        assert_eq!(again, kb);
        assert_eq!(again.serialize(), text);
    }

    #[test]
    fn duplicates_replace() {
        let mut kb = kb();
        kb.load_frames("frame is shoot\nby rifle\n").unwrap();
        let shoot = kb.get_action_frame("shoot").unwrap();
        assert!(shoot.motives.is_empty());
        assert_eq!(shoot.tools().collect::<Vec<_>>(), vec!["rifle"]);
    }

    #[test]
    fn phrase_containment_respects_words() {
        assert!(phrase_contains("high temperature", "temperature"));
        assert!(!phrase_contains("coughing", "cough"));
    }
}
