//! Event causes and person states.

use super::{Answer, Binding, Engine, EngineError, Slot, Step, Verdict};
use crate::cnl_parser::fact_phrase;
use crate::fact_store::{Entity, Fact, FactKind, Place, PlaceMatch};
use crate::knowledge_base::{FrameEntry, Modality, Target};
use crate::time::{TimeWindow, Timestamp};

struct Rule {
    bindings: Vec<Binding>,
    step: Step,
}

impl Engine<'_> {
    pub(super) fn in_window(&self, fact: &Fact, window: Option<&TimeWindow>) -> bool {
        match (window, &fact.time) {
            (Some(w), Some(t)) => self.store.calendar().overlaps(t, w),
            _ => true,
        }
    }

    /// Ordering key for "latest": undated facts sort first, then by moment,
    /// then by id.
    fn recency_key(&self, fact: &Fact) -> (Option<i64>, u64) {
        let start = fact.time.as_ref().and_then(|t| self.store.calendar().interval(t)).map(|w| w.start);
        (start, fact.id.0)
    }

    /// Entity an action leaves in its verb's result state.
    fn affected<'f>(&self, fact: &'f Fact) -> Option<(&'f Entity, String)> {
        let entry = self.kb.verbs().by_lemma(fact.verb.as_deref()?)?;
        let state = entry.result_state.clone()?;
        let who = match entry.result_applies_to {
            Target::Object => fact.object.as_ref()?,
            Target::Subject => fact.subject.as_ref()?,
        };
        Some((who, state))
    }

    /// Why is `object` in `state`? Finds the latest action whose verb
    /// produces the state for that object, not later than the event.
    pub fn determine_event_cause(
        &self,
        object: &Entity,
        state: &str,
        time: Option<&Timestamp>,
        place: Option<&Place>,
    ) -> Result<Answer, EngineError> {
        if let Some(p) = place {
            self.resolve_place(p)?;
        }
        let mut steps = Vec::new();
        if self.kb.state_producing_verbs(state).is_empty() {
            steps.push(Step::new("event.verbs", format!("no verb produces `{state}`")));
            return Ok(Answer::unknown(steps));
        }
        let window = self.window(time);
        let at_place = |f: &Fact| place.is_none_or(|p| f.place.as_ref().is_some_and(|fp| fp.matches(p, PlaceMatch::ExactAddress)));

        let events: Vec<&Fact> = self
            .store
            .all()
            .iter()
            .filter(|f| {
                f.kind == FactKind::Event
                    && f.state.as_deref() == Some(state)
                    && f.object.as_ref().is_some_and(|o| o.same_referent(object))
                    && self.in_window(f, window.as_ref())
                    && at_place(f)
            })
            .collect();
        let limit = events
            .iter()
            .filter_map(|e| e.time.as_ref().and_then(|t| self.store.calendar().interval(t)))
            .map(|w| w.end)
            .max()
            .or(window.map(|w| w.end));
        if !events.is_empty() {
            let undated = events.iter().any(|e| !e.is_dated());
            steps.push(
                Step::new("event.select", format!("{} is {state}", object.token()))
                    .facts(events.iter().map(|e| e.id))
                    .plausible_if(undated),
            );
        }

        let mut candidates: Vec<&Fact> = self
            .store
            .all()
            .iter()
            .filter(|f| {
                f.kind == FactKind::Action
                    && self.affected(f).is_some_and(|(who, s)| s == state && who.same_referent(object))
                    && self.in_window(f, window.as_ref())
                    && at_place(f)
                    && match (limit, self.recency_key(f).0) {
                        (Some(l), Some(start)) => start <= l,
                        _ => true,
                    }
            })
            .collect();
        candidates.sort_by_key(|f| self.recency_key(f));
        let Some(chosen) = candidates.pop() else {
            steps.push(Step::new("event.action", format!("no stored action leaves {} {state}", object.token())));
            return Ok(Answer::unknown(steps));
        };
        let lemma = chosen.verb.clone().unwrap_or_default();
        let phrase = fact_phrase(chosen, self.kb);
        steps.push(
            Step::new("event.action", format!("{phrase} produces {state}"))
                .facts([chosen.id])
                .frame(FrameEntry::Verb { lemma })
                .plausible_if(!chosen.is_dated()),
        );
        if !candidates.is_empty() {
            steps.push(Step::new("event.other_actions", "earlier producing actions").facts(candidates.iter().map(|f| f.id)));
        }
        Ok(Answer::new(Verdict::Yes, vec![Binding::new(Slot::Cause, phrase)], steps))
    }

    /// State of `person` as of `asof` (or the configured date): a recent
    /// state-producing action, then a disease, then a script.
    pub fn determine_person_state(&self, person: &Entity, asof: Option<Timestamp>) -> Answer {
        let asof = asof.or(self.config.asof);
        let window = asof.and_then(|a| self.store.calendar().days_before(&a, self.config.recency_days));
        let rules = [
            self.state_by_action(person, window.as_ref()),
            self.state_by_disease(person, window.as_ref()),
            self.state_by_script(person, window.as_ref()),
        ];
        let mut winner: Option<Rule> = None;
        let mut also = Vec::new();
        for rule in rules.into_iter().flatten() {
            if winner.is_none() {
                winner = Some(rule);
            } else {
                let mut step = rule.step;
                step.rule = "state.also";
                step.plausible = false;
                step.note = format!("not used: {}", step.note);
                also.push(step);
            }
        }
        match winner {
            Some(rule) => {
                let mut steps = vec![rule.step];
                steps.extend(also);
                Answer::new(Verdict::Yes, rule.bindings, steps)
            }
            None => Answer::unknown(vec![Step::new("state", format!("nothing known about the state of {}", person))]),
        }
    }

    fn state_by_action(&self, person: &Entity, window: Option<&TimeWindow>) -> Option<Rule> {
        let mut hits: Vec<(&Fact, String)> = self
            .store
            .all()
            .iter()
            .filter(|f| self.in_window(f, window))
            .filter_map(|f| match f.kind {
                FactKind::Action => self.affected(f).filter(|(who, _)| who.same_referent(person)).map(|(_, s)| (f, s)),
                FactKind::Event if f.object.as_ref().is_some_and(|o| o.same_referent(person)) => {
                    f.state.clone().map(|s| (f, s))
                }
                _ => None,
            })
            .collect();
        hits.sort_by_key(|(f, _)| self.recency_key(f));
        let (fact, state) = hits.pop()?;
        let mut step = Step::new("state.recent_action", format!("{} leaves {} {state}", fact_phrase(fact, self.kb), person.token()))
            .facts([fact.id])
            .plausible_if(window.is_some() && !fact.is_dated());
        if let Some(v) = fact.verb.as_ref().filter(|_| fact.kind == FactKind::Action) {
            step = step.frame(FrameEntry::Verb { lemma: v.clone() });
        }
        Some(Rule { bindings: vec![Binding::new(Slot::State, state)], step })
    }

    fn state_by_disease(&self, person: &Entity, window: Option<&TimeWindow>) -> Option<Rule> {
        let observed: Vec<(&Fact, String)> = self
            .facts_of(person)
            .filter(|f| self.in_window(f, window))
            .filter_map(|f| match f.kind {
                FactKind::Possession => f.object.as_ref().map(|o| (f, o.token().to_string())),
                FactKind::Attribute => f.state.clone().map(|s| (f, s)),
                _ => None,
            })
            .collect();
        if observed.is_empty() {
            return None;
        }
        let phrases: Vec<&str> = observed.iter().map(|(_, p)| p.as_str()).collect();
        let best = self.kb.match_diseases(&phrases).ok()?.into_iter().next()?;
        let matching_facts = observed.iter().filter(|(_, p)| {
            best.matched.iter().any(|s| crate::knowledge_base::phrase_contains(s, p) || crate::knowledge_base::phrase_contains(p, s))
        });
        let mut step = Step::new(
            "state.disease",
            format!("{} of {} symptoms of {}", best.matched.len(), best.total, best.disease),
        )
        .facts(matching_facts.map(|(f, _)| f.id))
        .plausible_if(!best.is_complete());
        for s in &best.matched {
            step = step.frame(FrameEntry::Symptom { disease: best.disease.clone(), symptom: s.clone() });
        }
        Some(Rule { bindings: vec![Binding::new(Slot::Disease, best.disease)], step })
    }

    fn state_by_script(&self, person: &Entity, window: Option<&TimeWindow>) -> Option<Rule> {
        // The person plus whatever they are "on"/"in" (a ship, a train).
        let mut linked = vec![(person.clone(), None)];
        for f in self.facts_of(person).filter(|f| f.kind == FactKind::Attribute) {
            let state = f.state.as_deref().unwrap_or("");
            if let Some(thing) = state.strip_prefix("on ").or_else(|| state.strip_prefix("in ")) {
                linked.push((Entity::common(thing), Some(f.id)));
            }
        }
        let mut situations: Vec<(&Fact, Option<crate::fact_store::FactId>)> = self
            .store
            .all()
            .iter()
            .filter(|f| self.in_window(f, window))
            .filter_map(|f| {
                let who = if f.kind == FactKind::Event { f.object.as_ref() } else { f.subject.as_ref() }?;
                linked.iter().find(|(e, _)| e.same_referent(who)).map(|(_, link)| (f, *link))
            })
            .collect();
        situations.sort_by_key(|(f, _)| self.recency_key(f));
        for (fact, link) in situations.into_iter().rev() {
            let phrase = fact_phrase(fact, self.kb);
            let Some(script) = self.kb.scripts().find(|s| s.trigger == phrase) else { continue };
            let mut step = Step::new("state.script", format!("`{phrase}` starts the script of {}", script.name))
                .facts(link.into_iter().chain([fact.id]))
                .frame(FrameEntry::ScriptTrigger { script: script.name.clone() })
                .plausible_if(true);
            let mut bindings = Vec::new();
            for (i, c) in script.consequences.iter().enumerate() {
                if c.modality != Modality::Does {
                    bindings.push(Binding::new(Slot::Consequence, c.predicate()));
                    step = step.frame(FrameEntry::Consequence { script: script.name.clone(), index: i + 1 });
                }
            }
            if bindings.is_empty() {
                continue;
            }
            return Some(Rule { bindings, step });
        }
        None
    }
}
