//! Operation planning: who plans an operation, which operation a person
//! plans, and how they would carry it out.

use std::collections::HashSet;

use super::{Answer, Binding, Engine, EngineError, Slot, Step, Verdict};
use crate::fact_store::{Entity, Place};
use crate::knowledge_base::{ConditionKind, FrameEntry, OperationFrame};

/// The alternative that passed and the checks behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationCheck {
    pub alternative: u32,
    pub steps: Vec<Step>,
}

impl Engine<'_> {
    /// First alternative whose every stage passes for `person`.
    pub fn check_operation(&self, person: &Entity, op: &OperationFrame, place: Option<&Place>) -> Option<OperationCheck> {
        let tools = self.person_tools(person);
        'alternatives: for alt in &op.alternatives {
            let mut steps = Vec::new();
            for (i, stage) in alt.stages.iter().enumerate() {
                let entry = FrameEntry::Stage { operation: op.name.clone(), alternative: alt.index, stage: i + 1 };
                if let Some(cond) = &stage.condition {
                    let Some(ev) = self.condition_holds(person, cond, place) else { continue 'alternatives };
                    let transmitted = cond.kind == ConditionKind::Situation;
                    let mut note = ev.note;
                    if transmitted {
                        note += "; assumed known to the subject";
                    }
                    steps.push(
                        Step::new("operation.condition", note)
                            .facts(ev.facts)
                            .frame(entry.clone())
                            .plausible_if(ev.plausible || transmitted),
                    );
                }
                if let Some(tool) = stage.way.as_ref().and_then(|w| w.tool()) {
                    let ids: Vec<_> = tools.iter().filter(|(t, _)| t == tool).map(|(_, id)| *id).collect();
                    if ids.is_empty() {
                        continue 'alternatives;
                    }
                    steps.push(
                        Step::new("operation.way", format!("{person} has or used {tool}"))
                            .facts(ids)
                            .frame(entry)
                            .plausible_if(true),
                    );
                }
            }
            steps.insert(
                0,
                Step::new("operation", format!("{} alternative {} for {person}", op.name, alt.index))
                    .frame(FrameEntry::Operation { name: op.name.clone() }),
            );
            return Some(OperationCheck { alternative: alt.index, steps });
        }
        None
    }

    fn operation(&self, name: &str) -> Result<&OperationFrame, EngineError> {
        self.kb.get_operation_frame(name).ok_or_else(|| EngineError::UnknownOperation(name.to_string()))
    }

    /// Persons motivated for the operation's planned action for whom some
    /// alternative passes.
    pub fn find_planner(&self, operation: &str, place: Option<&Place>) -> Result<Answer, EngineError> {
        let op = self.operation(operation)?;
        if let Some(p) = place {
            self.resolve_place(p)?;
        }
        let mut steps = Vec::new();
        let mut bindings = Vec::new();
        for person in self.store.persons() {
            let Some(motive) = self.check_motive(&person, &op.planned_action) else { continue };
            match self.check_operation(&person, op, place) {
                Some(check) => {
                    steps.push(motive.step);
                    steps.extend(check.steps);
                    bindings.push(Binding::new(Slot::Person, person.to_string()));
                }
                None => steps.push(Step::new("candidate.rejected", format!("{person}: no alternative of {} passes", op.name))),
            }
        }
        if bindings.is_empty() {
            steps.push(Step::new("planner", format!("nobody is motivated and able to {}", op.name)));
            return Ok(Answer::unknown(steps));
        }
        Ok(Answer::new(Verdict::Yes, bindings, steps))
    }

    /// First operation (load order) that passes and that the person has a
    /// motive for.
    pub fn determine_planned_operation(&self, person: &Entity, place: Option<&Place>) -> Result<Answer, EngineError> {
        if let Some(p) = place {
            self.resolve_place(p)?;
        }
        let mut steps = Vec::new();
        for op in self.kb.list_operation_frames() {
            let Some(check) = self.check_operation(person, op, place) else {
                steps.push(Step::new("operation.rejected", format!("{}: no alternative passes", op.name)));
                continue;
            };
            let Some(motive) = self.check_motive(person, &op.planned_action) else {
                steps.push(Step::new("operation.rejected", format!("{}: {person} has no motive", op.name)));
                continue;
            };
            steps.extend(check.steps);
            steps.push(motive.step);
            return Ok(Answer::new(Verdict::Yes, vec![Binding::new(Slot::Operation, op.name.clone())], steps));
        }
        steps.push(Step::new("operation", format!("no operation fits {person}")));
        Ok(Answer::unknown(steps))
    }

    /// The way-bearing stages of the alternative that passes for `person`,
    /// one per distinct way.
    pub fn determine_operation_ways(
        &self,
        person: &Entity,
        operation: &str,
        place: Option<&Place>,
    ) -> Result<Answer, EngineError> {
        let op = self.operation(operation)?;
        if let Some(p) = place {
            self.resolve_place(p)?;
        }
        let Some(check) = self.check_operation(person, op, place) else {
            return Ok(Answer::unknown(vec![Step::new("operation", format!("no alternative of {} passes for {person}", op.name))]));
        };
        let Some(motive) = self.check_motive(person, &op.planned_action) else {
            return Ok(Answer::unknown(vec![Step::new("motive", format!("{person} has no motive to {}", op.planned_action))]));
        };
        let mut steps = check.steps;
        steps.push(motive.step);
        let alt = op.alternatives.iter().find(|a| a.index == check.alternative).expect("checked alternative exists");
        let mut seen = HashSet::new();
        let mut bindings = Vec::new();
        let mut cited = Step::new("operation.ways", "stages carrying a way");
        for (i, stage) in alt.stages.iter().enumerate() {
            let Some(way) = &stage.way else { continue };
            if seen.insert(way.target.clone()) {
                bindings.push(Binding::new(Slot::Stage, stage.action_text.clone()));
                cited = cited.frame(FrameEntry::Stage { operation: op.name.clone(), alternative: alt.index, stage: i + 1 });
            }
        }
        if bindings.is_empty() {
            steps.push(Step::new("operation.ways", "no stage carries a way"));
            return Ok(Answer::unknown(steps));
        }
        steps.push(cited);
        Ok(Answer::new(Verdict::Yes, bindings, steps))
    }
}
