//! Question answering over facts, frames and the city plan.
//!
//! Every public operation returns an [`Answer`] whose trail cites the facts
//! and frame entries it used. Steps that lean on an undated fact, a greedy
//! route fallback, a partial symptom match, an assumed transmission of a
//! situation or a possession-as-capability proxy are tagged plausible.

mod answer;
mod events;
mod operations;

use thiserror::Error;

pub use answer::{Answer, Binding, Slot, Step, Validity, Verdict};

use crate::city_plan::{CityPlan, SpeedTable, TravelMode};
use crate::cnl_parser::{Question, QuestionKind};
use crate::fact_store::{Entity, Fact, FactId, FactKind, FactStore, Place, PlaceMatch};
use crate::knowledge_base::{Condition, ConditionKind, FrameEntry, KnowledgeBase, Motive};
use crate::time::{TimeWindow, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unresolvable place: street `{0}`")]
    UnresolvablePlace(String),
    #[error("ambiguous basic fact: candidates {}", ids(.0))]
    AmbiguousBasicFact(Vec<FactId>),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("question lacks a {0}")]
    MissingSlot(&'static str),
}

fn ids(v: &[FactId]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Days before `asof` that count as "lately".
    pub recency_days: u32,
    pub travel_mode: TravelMode,
    pub asof: Option<Timestamp>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { recency_days: 7, travel_mode: TravelMode::Pedestrian, asof: None }
    }
}

/// Basic fact plus the place and time an examination works with.
type Scene = (Option<BasicFact>, Option<Place>, Option<Timestamp>);

/// The unknown-person action a hypothesis is anchored to.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicFact {
    pub fact: FactId,
    pub verb: String,
    pub object: Option<Entity>,
    pub instrument: Option<String>,
    pub place: Option<Place>,
    pub time: Option<Timestamp>,
}

/// Facts supporting a condition.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Evidence {
    pub facts: Vec<FactId>,
    pub plausible: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotiveMatch {
    pub motive: Motive,
    pub step: Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WayMatch {
    pub tool: String,
    pub step: Step,
}

/// Which circumstance a why/how question asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facet {
    Cause,
    Way,
}

/// Outcome of the stay, motive and way checks for one person.
struct Examination {
    steps: Vec<Step>,
    motive: Option<Motive>,
    tool: Option<String>,
    passed: bool,
}

pub struct Engine<'a> {
    store: &'a FactStore,
    kb: &'a KnowledgeBase,
    plan: Option<&'a CityPlan>,
    speeds: SpeedTable,
    config: EngineConfig,
}

impl<'a> Engine<'a> {
    pub fn new(store: &'a FactStore, kb: &'a KnowledgeBase) -> Self {
        Engine { store, kb, plan: None, speeds: SpeedTable::default(), config: EngineConfig::default() }
    }

    pub fn with_plan(mut self, plan: &'a CityPlan) -> Self {
        self.plan = Some(plan);
        self
    }

    pub fn with_speeds(mut self, speeds: SpeedTable) -> Self {
        self.speeds = speeds;
        self
    }

    pub fn with_config(mut self, config: EngineConfig) -> Self {
        self.config = config;
        self
    }

    pub fn answer(&self, q: &Question) -> Result<Answer, EngineError> {
        let subject = || q.subject.as_ref().ok_or(EngineError::MissingSlot("subject"));
        let verb = || q.verb.as_deref().ok_or(EngineError::MissingSlot("verb"));
        let operation = || q.operation.as_deref().ok_or(EngineError::MissingSlot("operation"));
        let (place, time, object, way) = (q.place.as_ref(), q.time.as_ref(), q.object.as_ref(), q.way.as_deref());
        match q.kind {
            QuestionKind::YesNoAction => self.check_hypothesis(subject()?, verb()?, object, way, place, time),
            QuestionKind::Who => self.determine_person(verb()?, object, way, place, time),
            QuestionKind::WhyAction => {
                self.determine_circumstance(subject()?, verb()?, object, Facet::Cause, place, time)
            }
            QuestionKind::HowAction => self.determine_circumstance(subject()?, verb()?, object, Facet::Way, place, time),
            QuestionKind::WhoPlans => self.find_planner(operation()?, place),
            QuestionKind::WhatPlans => self.determine_planned_operation(subject()?, place),
            QuestionKind::HowPlans => self.determine_operation_ways(subject()?, operation()?, place),
            QuestionKind::WhyEvent => {
                let object = object.ok_or(EngineError::MissingSlot("object"))?;
                let state = q.state.as_deref().ok_or(EngineError::MissingSlot("state"))?;
                self.determine_event_cause(object, state, time, place)
            }
            QuestionKind::StateOf => Ok(self.determine_person_state(subject()?, time.copied())),
        }
    }

    fn window(&self, time: Option<&Timestamp>) -> Option<TimeWindow> {
        time.and_then(|t| self.store.calendar().interval(t))
    }

    fn resolve_place(&self, place: &Place) -> Result<(), EngineError> {
        match self.plan {
            Some(plan) => plan
                .locate(place)
                .map(|_| ())
                .map_err(|_| EngineError::UnresolvablePlace(place.street().to_string())),
            None => Ok(()),
        }
    }

    fn facts_of<'s>(&'s self, person: &'s Entity) -> impl Iterator<Item = &'s Fact> + 's {
        self.store.all().iter().filter(move |f| f.subject.as_ref().is_some_and(|s| s.same_referent(person)))
    }

    /// Tools a person has or has used: possession objects and action
    /// instruments, in fact order.
    fn person_tools(&self, person: &Entity) -> Vec<(String, FactId)> {
        self.facts_of(person)
            .filter_map(|f| match f.kind {
                FactKind::Possession => f.object.as_ref().map(|o| (o.token().to_string(), f.id)),
                FactKind::Action => f.instrument.clone().map(|i| (i, f.id)),
                _ => None,
            })
            .collect()
    }

    /// The single stored action by an unnamed subject matching the question.
    pub fn find_basic_fact(
        &self,
        verb: &str,
        object: Option<&Entity>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Result<Option<BasicFact>, EngineError> {
        let window = self.window(time);
        let cal = self.store.calendar();
        let found: Vec<&Fact> = self
            .store
            .all()
            .iter()
            .filter(|f| {
                f.kind == FactKind::Action
                    && f.verb.as_deref() == Some(verb)
                    && f.subject.as_ref().is_some_and(|s| !s.is_named())
                    && object.is_none_or(|o| f.object.as_ref().is_some_and(|fo| fo.same_referent(o)))
                    && place.is_none_or(|p| f.place.as_ref().is_some_and(|fp| fp.matches(p, PlaceMatch::ExactAddress)))
                    && match (&window, &f.time) {
                        (Some(w), Some(t)) => cal.overlaps(t, w),
                        _ => true,
                    }
            })
            .collect();
        match found.as_slice() {
            [] => Ok(None),
            [f] => Ok(Some(BasicFact {
                fact: f.id,
                verb: verb.to_string(),
                object: f.object.clone(),
                instrument: f.instrument.clone(),
                place: f.place.clone(),
                time: f.time,
            })),
            many => Err(EngineError::AmbiguousBasicFact(many.iter().map(|f| f.id).collect())),
        }
    }

    /// Question slots first, basic-fact slots as fallback.
    fn scene(
        &self,
        verb: &str,
        object: Option<&Entity>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
        steps: &mut Vec<Step>,
    ) -> Result<Scene, EngineError> {
        let basic = self.find_basic_fact(verb, object, place, time)?;
        let mut place = place.cloned();
        let mut time = time.copied();
        match &basic {
            Some(b) => {
                let mut taken = Vec::new();
                if place.is_none() && b.place.is_some() {
                    place = b.place.clone();
                    taken.push("place");
                }
                if let Some(bt) = &b.time {
                    let refined = time.map_or(*bt, |t| t.refined_by(bt));
                    if Some(refined) != time {
                        taken.push("time");
                    }
                    time = Some(refined);
                }
                let note = if taken.is_empty() {
                    "basic fact".to_string()
                } else {
                    format!("basic fact supplies {}", taken.join(" and "))
                };
                steps.push(Step::new("basic_fact", note).facts([b.fact]));
            }
            None => steps.push(Step::new("basic_fact", format!("no unknown-person fact for `{verb}`"))),
        }
        Ok((basic, place, time))
    }

    /// Placeless facts of `person` whose hour falls inside the window.
    fn corroborating(&self, person: &Entity, window: Option<&TimeWindow>, time: Option<&Timestamp>) -> Vec<FactId> {
        let (Some(w), Some(_)) = (window, time.and_then(Timestamp::hour)) else { return Vec::new() };
        self.facts_of(person)
            .filter(|f| f.place.is_none() && f.time.is_some_and(|ft| ft.hour().is_some() && self.store.calendar().overlaps(&ft, w)))
            .map(|f| f.id)
            .collect()
    }

    /// Was `person` at `place` around `time`? Step 1 looks for facts that put
    /// the person there; step 2 asks whether the person could have walked or
    /// driven there from another located, timed fact.
    pub fn check_stay(&self, person: &Entity, place: &Place, time: Option<&Timestamp>) -> Result<Answer, EngineError> {
        self.resolve_place(place)?;
        let cal = self.store.calendar();
        let window = self.window(time);
        let present: Vec<FactId> = self
            .facts_of(person)
            .filter(|f| {
                f.person().is_some()
                    && f.place.as_ref().is_some_and(|fp| fp.matches(place, PlaceMatch::ExactAddress))
                    && self.in_window(f, window.as_ref())
            })
            .map(|f| f.id)
            .collect();
        if !present.is_empty() {
            let undated = present.iter().any(|id| !self.store.get(*id).is_some_and(Fact::is_dated));
            let mut step = Step::new("stay.direct", format!("{person} in {place}")).facts(present);
            let corroborating = self.corroborating(person, window.as_ref(), time);
            if !corroborating.is_empty() {
                step.note += "; time consistent with other facts";
                step = step.facts(corroborating);
            }
            if undated {
                step.note += "; undated fact matches any date";
            }
            return Ok(Answer::new(Verdict::Yes, Vec::new(), vec![step.plausible_if(undated)]));
        }

        let mut steps = Vec::new();
        let (Some(plan), Some(target_time)) = (self.plan, time) else {
            steps.push(Step::new("stay.direct", format!("no fact places {person} in {place}")));
            return Ok(Answer::unknown(steps));
        };
        let Some(target_moment) = cal.moment(target_time) else {
            steps.push(Step::new("stay.direct", format!("no fact places {person} in {place}; time too vague for travel")));
            return Ok(Answer::unknown(steps));
        };
        let target = plan.locate(place).map_err(|_| EngineError::UnresolvablePlace(place.street().to_string()))?;
        for fact in self.facts_of(person) {
            let (Some(from_place), Some(ft)) = (&fact.place, &fact.time) else { continue };
            let Some(from_moment) = cal.moment(ft) else { continue };
            let Ok(from) = plan.locate(from_place) else { continue };
            let path = match plan.route(from.position, target.position) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let minutes = i64::from(self.speeds.travel_time(&path, self.config.travel_mode, Some(ft)));
            let gap = (target_moment - from_moment).abs();
            let note = format!("{:.0} m from {from_place}: {minutes} min against a {gap} min gap", path.total_length);
            if minutes <= gap {
                steps.push(Step::new("stay.travel", note).facts([fact.id]).plausible_if(true));
                return Ok(Answer::new(Verdict::Yes, Vec::new(), steps));
            }
            steps.push(Step::new("stay.travel", format!("{note}: infeasible")).facts([fact.id]));
        }
        if steps.is_empty() {
            steps.push(Step::new("stay.direct", format!("no fact places {person} in {place}")));
        }
        Ok(Answer::unknown(steps))
    }

    /// Does a fact make `condition` true for `person`?
    pub(crate) fn condition_holds(&self, person: &Entity, cond: &Condition, place: Option<&Place>) -> Option<Evidence> {
        let pattern = cond.pattern.as_str();
        let found = |facts: Vec<FactId>, plausible: bool| {
            (!facts.is_empty()).then(|| Evidence { facts, plausible, note: format!("`{pattern}` holds for {person}") })
        };
        match cond.kind {
            ConditionKind::SubjectAttribute => {
                let rest = pattern.strip_prefix("subject ")?;
                if let Some(state) = rest.strip_prefix("is ") {
                    let ids = self
                        .facts_of(person)
                        .filter(|f| f.kind == FactKind::Attribute && f.state.as_deref() == Some(state))
                        .map(|f| f.id)
                        .collect();
                    found(ids, false)
                } else if let Some(thing) = rest.strip_prefix("has ") {
                    let ids = self
                        .facts_of(person)
                        .filter(|f| f.kind == FactKind::Possession && f.object.as_ref().is_some_and(|o| o.token() == thing))
                        .map(|f| f.id)
                        .collect();
                    found(ids, false)
                } else {
                    None
                }
            }
            ConditionKind::SubjectCapability => {
                let verb = pattern.strip_prefix("subject can ")?.split(' ').next()?;
                let lemma = self.kb.verbs().lookup(verb).map_or(verb.to_string(), |e| e.verb.clone());
                let ids = self
                    .facts_of(person)
                    .filter(|f| f.kind == FactKind::Action && f.verb.as_deref() == Some(lemma.as_str()))
                    .map(|f| f.id)
                    .collect();
                found(ids, true)
            }
            ConditionKind::Situation => {
                if let Some(noun) = pattern.strip_suffix(" of subject") {
                    let lemma = self.kb.verbs().lookup(noun).map_or(noun.to_string(), |e| e.verb.clone());
                    let ids = self
                        .store
                        .all()
                        .iter()
                        .filter(|f| {
                            f.kind == FactKind::Action
                                && f.verb.as_deref() == Some(lemma.as_str())
                                && f.object.as_ref().is_some_and(|o| o.same_referent(person))
                        })
                        .map(|f| f.id)
                        .collect();
                    return found(ids, false);
                }
                let wanted: String = pattern
                    .split(' ')
                    .map(|w| if w == "subject" { person.token() } else { w })
                    .collect::<Vec<_>>()
                    .join(" ");
                let ids = self
                    .store
                    .all()
                    .iter()
                    .filter(|f| {
                        f.kind == FactKind::Situation
                            && crate::cnl_parser::fact_phrase(f, self.kb) == wanted
                            && match (place, &f.place) {
                                (Some(p), Some(fp)) => fp.matches(p, PlaceMatch::SameStreet),
                                _ => true,
                            }
                    })
                    .map(|f| f.id)
                    .collect();
                found(ids, false)
            }
        }
    }

    /// First motive of `verb`'s frame whose cause holds for `person`.
    pub fn check_motive(&self, person: &Entity, verb: &str) -> Option<MotiveMatch> {
        let frame = self.kb.get_action_frame(verb)?;
        frame.motives.iter().find_map(|m| {
            let ev = self.condition_holds(person, &m.cause, None)?;
            let step = Step::new("motive", format!("motive {} of {verb}: {}", m.text, ev.note))
                .facts(ev.facts)
                .frame(FrameEntry::Motive { action: frame.action.clone(), motive: m.text.clone() })
                .plausible_if(ev.plausible);
            Some(MotiveMatch { motive: m.clone(), step })
        })
    }

    /// Three-step way check: the question's way, then the person's own tools,
    /// then the basic fact's instrument.
    pub fn check_way(
        &self,
        person: &Entity,
        verb: &str,
        question_way: Option<&str>,
        basic: Option<&BasicFact>,
    ) -> Option<WayMatch> {
        let frame = self.kb.get_action_frame(verb)?;
        let tools = self.person_tools(person);
        let way_entry = |tool: &str| {
            frame.way_for(tool).map(|w| FrameEntry::Way { action: frame.action.clone(), way: w.text() })
        };

        match question_way {
            Some(qw) => {
                let entry = way_entry(qw)?;
                let ids: Vec<FactId> = tools.iter().filter(|(t, _)| t == qw).map(|(_, id)| *id).collect();
                if !ids.is_empty() {
                    let step = Step::new("way.question", format!("{person} uses {qw}")).facts(ids).frame(entry);
                    return Some(WayMatch { tool: qw.to_string(), step });
                }
            }
            None => {
                for (tool, id) in &tools {
                    if let Some(entry) = way_entry(tool) {
                        let step = Step::new("way.person", format!("{person} has or used {tool}")).facts([*id]).frame(entry);
                        return Some(WayMatch { tool: tool.clone(), step });
                    }
                }
            }
        }

        let basic = basic?;
        let instrument = basic.instrument.as_deref()?;
        if question_way.is_some_and(|qw| qw != instrument) {
            return None;
        }
        let used: Vec<FactId> = self
            .facts_of(person)
            .filter(|f| f.kind == FactKind::Action && f.instrument.as_deref() == Some(instrument))
            .map(|f| f.id)
            .collect();
        if used.is_empty() {
            return None;
        }
        let entry = way_entry(instrument);
        if entry.is_none() && basic.verb != verb {
            return None;
        }
        let mut step = Step::new("way.basic_fact", format!("{person} used {instrument}, the way of the basic fact"))
            .facts([basic.fact])
            .facts(used);
        if let Some(e) = entry {
            step = step.frame(e);
        }
        Some(WayMatch { tool: instrument.to_string(), step })
    }

    fn examine(
        &self,
        person: &Entity,
        verb: &str,
        object: Option<&Entity>,
        way: Option<&str>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Result<Examination, EngineError> {
        let mut steps = Vec::new();
        let fail = |steps| Ok(Examination { steps, motive: None, tool: None, passed: false });
        if self.kb.get_action_frame(verb).is_none() {
            steps.push(Step::new("frame", format!("no action frame for `{verb}`")));
            return fail(steps);
        }
        let (basic, place, time) = self.scene(verb, object, place, time, &mut steps)?;
        if basic.is_none() {
            return fail(steps);
        }
        let Some(place) = place else {
            steps.push(Step::new("stay.direct", "no place to check"));
            return fail(steps);
        };
        let stay = self.check_stay(person, &place, time.as_ref())?;
        let stayed = stay.verdict == Verdict::Yes;
        steps.extend(stay.justification);
        if !stayed {
            return fail(steps);
        }
        let Some(motive) = self.check_motive(person, verb) else {
            steps.push(Step::new("motive", format!("no motive cause of `{verb}` holds for {person}")));
            return fail(steps);
        };
        steps.push(motive.step);
        let Some(w) = self.check_way(person, verb, way, basic.as_ref()) else {
            steps.push(Step::new("way", format!("no way of `{verb}` available to {person}")));
            return fail(steps);
        };
        steps.push(w.step);
        Ok(Examination { steps, motive: Some(motive.motive), tool: Some(w.tool), passed: true })
    }

    /// Did `person` do `verb` to `object`?
    pub fn check_hypothesis(
        &self,
        person: &Entity,
        verb: &str,
        object: Option<&Entity>,
        way: Option<&str>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Result<Answer, EngineError> {
        if self.kb.get_action_frame(verb).is_none() {
            return Ok(self.plain_lookup(person, verb, object, place, time));
        }
        let ex = self.examine(person, verb, object, way, place, time)?;
        let verdict = if ex.passed { Verdict::Yes } else { Verdict::Unknown };
        Ok(Answer::new(verdict, Vec::new(), ex.steps))
    }

    /// Without a frame, only a stored action of the person answers yes.
    fn plain_lookup(
        &self,
        person: &Entity,
        verb: &str,
        object: Option<&Entity>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Answer {
        let window = self.window(time);
        let cal = self.store.calendar();
        let hit = self.facts_of(person).find(|f| {
            f.kind == FactKind::Action
                && f.verb.as_deref() == Some(verb)
                && object.is_none_or(|o| f.object.as_ref().is_some_and(|fo| fo.same_referent(o)))
                && place.is_none_or(|p| f.place.as_ref().is_some_and(|fp| fp.matches(p, PlaceMatch::ExactAddress)))
                && match (&window, &f.time) {
                    (Some(w), Some(t)) => cal.overlaps(t, w),
                    _ => true,
                }
        });
        match hit {
            Some(f) => {
                let step = Step::new("lookup", format!("no action frame for `{verb}`; stored action"))
                    .facts([f.id])
                    .plausible_if(time.is_some() && !f.is_dated());
                Answer::new(Verdict::Yes, Vec::new(), vec![step])
            }
            None => Answer::unknown(vec![Step::new("lookup", format!("no action frame for `{verb}` and no stored action"))]),
        }
    }

    /// Who did `verb` to `object`? Candidates are the persons present at the
    /// resolved place and time; each must pass the motive and way checks.
    pub fn determine_person(
        &self,
        verb: &str,
        object: Option<&Entity>,
        way: Option<&str>,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Result<Answer, EngineError> {
        let mut steps = Vec::new();
        if self.kb.get_action_frame(verb).is_none() {
            steps.push(Step::new("frame", format!("no action frame for `{verb}`")));
            return Ok(Answer::unknown(steps));
        }
        let (basic, place, time) = self.scene(verb, object, place, time, &mut steps)?;
        let Some(place) = place else {
            steps.push(Step::new("candidates", "no place to select persons"));
            return Ok(Answer::unknown(steps));
        };
        self.resolve_place(&place)?;
        let window = self.window(time.as_ref());
        let presence = self
            .store
            .presence_at(&place, window.as_ref(), None)
            .map_err(|_| EngineError::UnresolvablePlace(place.street().to_string()))?;
        let cited: Vec<FactId> = presence
            .iter()
            .flat_map(|p| p.facts.iter().copied().chain(self.corroborating(&p.person, window.as_ref(), time.as_ref())))
            .collect();
        let undated = cited.iter().any(|id| !self.store.get(*id).is_some_and(Fact::is_dated));
        let names: Vec<String> = presence.iter().map(|p| p.person.to_string()).collect();
        steps.push(
            Step::new("candidates", format!("persons in {place}: {}", if names.is_empty() { "none".into() } else { names.join(", ") }))
                .facts(cited)
                .plausible_if(undated),
        );
        let mut bindings = Vec::new();
        for p in &presence {
            let motive = self.check_motive(&p.person, verb);
            let tool = self.check_way(&p.person, verb, way, basic.as_ref());
            match (motive, tool) {
                (Some(m), Some(w)) => {
                    steps.push(m.step);
                    steps.push(w.step);
                    bindings.push(Binding::new(Slot::Person, p.person.to_string()));
                }
                (m, _) => {
                    let why = if m.is_none() { "no motive" } else { "no way" };
                    steps.push(Step::new("candidate.rejected", format!("{}: {why}", p.person)));
                }
            }
        }
        if bindings.is_empty() {
            return Ok(Answer::unknown(steps));
        }
        Ok(Answer::new(Verdict::Yes, bindings, steps))
    }

    /// Why or how did `person` do `verb`?
    pub fn determine_circumstance(
        &self,
        person: &Entity,
        verb: &str,
        object: Option<&Entity>,
        facet: Facet,
        place: Option<&Place>,
        time: Option<&Timestamp>,
    ) -> Result<Answer, EngineError> {
        let ex = self.examine(person, verb, object, None, place, time)?;
        if !ex.passed {
            return Ok(Answer::unknown(ex.steps));
        }
        let binding = match facet {
            Facet::Cause => Binding::new(Slot::Cause, ex.motive.map(|m| m.cause.pattern).unwrap_or_default()),
            Facet::Way => Binding::new(Slot::Tool, ex.tool.unwrap_or_default()),
        };
        Ok(Answer::new(Verdict::Yes, vec![binding], ex.steps))
    }
}

