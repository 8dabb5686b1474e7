//! In-memory fact database with time- and place-filtered retrieval.

use std::fmt;

use thiserror::Error;

use crate::geometry::Point;
use crate::time::{Calendar, TimeWindow, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactError {
    #[error("{0} required")]
    Missing(&'static str),
    #[error("unresolvable place: street `{0}`")]
    UnresolvablePlace(String),
    #[error("no fact with id {0}")]
    UnknownId(FactId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactId(pub u64);

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A person, thing or generic referent. Tokens are lower-cased; `named`
/// distinguishes proper names ("Petrov") from common nouns ("the man").
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity {
    token: String,
    named: bool,
}

impl Entity {
    pub fn named(token: &str) -> Self {
        Entity { token: normalize_token(token), named: true }
    }

    pub fn common(token: &str) -> Self {
        Entity { token: normalize_token(token), named: false }
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn is_named(&self) -> bool {
        self.named
    }

    pub fn same_referent(&self, other: &Entity) -> bool {
        self.token == other.token
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.named {
            f.write_str(&capitalize(&self.token))
        } else {
            f.write_str(&self.token)
        }
    }
}

pub fn normalize_token(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// An address such as "9 Street1 Street" (house 9 on Street1).
#[derive(Debug, Clone, PartialEq)]
pub struct Place {
    pub house_number: Option<u32>,
    street: String,
    pub resolved_position: Option<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlaceMatch {
    /// Street must agree; house numbers must agree when both sides give one.
    #[default]
    ExactAddress,
    SameStreet,
}

impl Place {
    pub fn new(house_number: Option<u32>, street: &str) -> Result<Self, FactError> {
        let street = normalize_token(street);
        if street.is_empty() {
            return Err(FactError::Missing("street name"));
        }
        Ok(Place { house_number, street, resolved_position: None })
    }

    pub fn street(&self) -> &str {
        &self.street
    }

    pub fn matches(&self, other: &Place, mode: PlaceMatch) -> bool {
        if self.street != other.street {
            return false;
        }
        match (mode, self.house_number, other.house_number) {
            (PlaceMatch::SameStreet, _, _) => true,
            (PlaceMatch::ExactAddress, Some(a), Some(b)) => a == b,
            (PlaceMatch::ExactAddress, _, _) => true,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.house_number {
            write!(f, "{n} ")?;
        }
        write!(f, "{} Street", capitalize(&self.street))
    }
}

/// Something that can check whether a place exists (normally the city plan).
pub trait PlaceResolver {
    fn resolves(&self, place: &Place) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactKind {
    Action,
    Attribute,
    Possession,
    Event,
    Situation,
}

impl fmt::Display for FactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactKind::Action => "action",
            FactKind::Attribute => "attribute",
            FactKind::Possession => "possession",
            FactKind::Event => "event",
            FactKind::Situation => "situation",
        })
    }
}

impl std::str::FromStr for FactKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "action" => FactKind::Action,
            "attribute" => FactKind::Attribute,
            "possession" => FactKind::Possession,
            "event" => FactKind::Event,
            "situation" => FactKind::Situation,
            other => return Err(format!("unknown fact kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub id: FactId,
    pub kind: FactKind,
    pub subject: Option<Entity>,
    pub verb: Option<String>,
    pub object: Option<Entity>,
    pub instrument: Option<String>,
    pub state: Option<String>,
    pub time: Option<Timestamp>,
    pub place: Option<Place>,
}

impl Fact {
    fn blank(kind: FactKind) -> Self {
        Fact {
            id: FactId(0),
            kind,
            subject: None,
            verb: None,
            object: None,
            instrument: None,
            state: None,
            time: None,
            place: None,
        }
    }

    pub fn action(subject: Entity, verb: &str) -> Self {
        Fact { subject: Some(subject), verb: Some(normalize_token(verb)), ..Fact::blank(FactKind::Action) }
    }

    pub fn attribute(subject: Entity, state: &str) -> Self {
        Fact { subject: Some(subject), state: Some(normalize_token(state)), ..Fact::blank(FactKind::Attribute) }
    }

    pub fn possession(subject: Entity, object: Entity) -> Self {
        Fact { subject: Some(subject), object: Some(object), ..Fact::blank(FactKind::Possession) }
    }

    pub fn event(object: Entity, state: &str) -> Self {
        Fact { object: Some(object), state: Some(normalize_token(state)), ..Fact::blank(FactKind::Event) }
    }

    pub fn situation(subject: Entity, state: &str) -> Self {
        Fact { subject: Some(subject), state: Some(normalize_token(state)), ..Fact::blank(FactKind::Situation) }
    }

    pub fn with_object(mut self, object: Entity) -> Self {
        self.object = Some(object);
        self
    }

    pub fn with_instrument(mut self, instrument: &str) -> Self {
        self.instrument = Some(normalize_token(instrument));
        self
    }

    pub fn with_time(mut self, time: Timestamp) -> Self {
        self.time = Some(time);
        self
    }

    pub fn with_place(mut self, place: Place) -> Self {
        self.place = Some(place);
        self
    }

    pub fn validate(&self) -> Result<(), FactError> {
        let need = |present: bool, field| if present { Ok(()) } else { Err(FactError::Missing(field)) };
        match self.kind {
            FactKind::Action => {
                need(self.subject.is_some(), "subject")?;
                need(self.verb.is_some(), "verb")
            }
            FactKind::Attribute | FactKind::Situation => {
                need(self.subject.is_some(), "subject")?;
                need(self.state.is_some(), "state")
            }
            FactKind::Possession => {
                need(self.subject.is_some(), "subject")?;
                need(self.object.is_some(), "object")
            }
            FactKind::Event => {
                need(self.object.is_some(), "object")?;
                need(self.state.is_some(), "state")
            }
        }
    }

    pub fn is_dated(&self) -> bool {
        self.time.is_some_and(|t| t.is_dated())
    }

    /// Persons are named subjects of actions, attributes and possessions.
    pub fn person(&self) -> Option<&Entity> {
        match self.kind {
            FactKind::Action | FactKind::Attribute | FactKind::Possession => {
                self.subject.as_ref().filter(|s| s.is_named())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FactFilter {
    pub kind: Option<FactKind>,
    pub subject: Option<Entity>,
    pub verb: Option<String>,
    pub object: Option<Entity>,
    pub instrument: Option<String>,
    pub state: Option<String>,
    pub time_window: Option<TimeWindow>,
    pub place: Option<Place>,
    pub place_mode: PlaceMatch,
}

impl FactFilter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kind(mut self, kind: FactKind) -> Self {
        self.kind = Some(kind);
        self
    }
    pub fn subject(mut self, subject: &Entity) -> Self {
        self.subject = Some(subject.clone());
        self
    }
    pub fn verb(mut self, verb: &str) -> Self {
        self.verb = Some(normalize_token(verb));
        self
    }
    pub fn object(mut self, object: &Entity) -> Self {
        self.object = Some(object.clone());
        self
    }
    pub fn instrument(mut self, instrument: &str) -> Self {
        self.instrument = Some(normalize_token(instrument));
        self
    }
    pub fn state(mut self, state: &str) -> Self {
        self.state = Some(normalize_token(state));
        self
    }
    pub fn within(mut self, window: TimeWindow) -> Self {
        self.time_window = Some(window);
        self
    }
    pub fn at_place(mut self, place: &Place, mode: PlaceMatch) -> Self {
        self.place = Some(place.clone());
        self.place_mode = mode;
        self
    }

    pub fn matches(&self, fact: &Fact, calendar: &Calendar) -> bool {
        fn entity_ok(want: &Option<Entity>, have: &Option<Entity>) -> bool {
            match want {
                None => true,
                Some(w) => have.as_ref().is_some_and(|h| h.same_referent(w)),
            }
        }
        fn text_ok(want: &Option<String>, have: &Option<String>) -> bool {
            match want {
                None => true,
                Some(w) => have.as_deref() == Some(w.as_str()),
            }
        }
        if self.kind.is_some_and(|k| k != fact.kind) {
            return false;
        }
        if !entity_ok(&self.subject, &fact.subject)
            || !entity_ok(&self.object, &fact.object)
            || !text_ok(&self.verb, &fact.verb)
            || !text_ok(&self.instrument, &fact.instrument)
            || !text_ok(&self.state, &fact.state)
        {
            return false;
        }
        if let Some(window) = &self.time_window {
            if let Some(ts) = &fact.time {
                if !calendar.overlaps(ts, window) {
                    return false;
                }
            }
        }
        if let Some(place) = &self.place {
            match &fact.place {
                Some(p) if p.matches(place, self.place_mode) => {}
                _ => return false,
            }
        }
        true
    }
}

/// A named person found at a place, with the facts that put them there.
#[derive(Debug, Clone, PartialEq)]
pub struct Presence {
    pub person: Entity,
    pub facts: Vec<FactId>,
}

#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: Vec<Fact>,
    next_id: u64,
    calendar: Calendar,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_calendar(calendar: Calendar) -> Self {
        FactStore { calendar, ..Self::default() }
    }

    pub fn calendar(&self) -> &Calendar {
        &self.calendar
    }

    pub fn assert_fact(&mut self, mut fact: Fact) -> Result<FactId, FactError> {
        fact.validate()?;
        let id = FactId(self.next_id);
        self.next_id += 1;
        fact.id = id;
        self.facts.push(fact);
        Ok(id)
    }

    /// Remove a fact. Remaining ids are unchanged.
    pub fn retract(&mut self, id: FactId) -> Result<Fact, FactError> {
        let pos = self.facts.binary_search_by_key(&id, |f| f.id).map_err(|_| FactError::UnknownId(id))?;
        Ok(self.facts.remove(pos))
    }

    pub fn get(&self, id: FactId) -> Option<&Fact> {
        self.facts.binary_search_by_key(&id, |f| f.id).ok().map(|i| &self.facts[i])
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn all(&self) -> &[Fact] {
        &self.facts
    }

    /// Facts matching every set field of `filter`, ascending by id.
    pub fn query_facts(&self, filter: &FactFilter) -> Vec<&Fact> {
        self.facts.iter().filter(|f| filter.matches(f, &self.calendar)).collect()
    }

    /// Distinct named persons with a fact on the same street inside `window`.
    pub fn persons_at(
        &self,
        place: &Place,
        window: Option<&TimeWindow>,
        resolver: Option<&dyn PlaceResolver>,
    ) -> Result<Vec<Entity>, FactError> {
        Ok(self.presence_at(place, window, resolver)?.into_iter().map(|p| p.person).collect())
    }

    pub fn presence_at(
        &self,
        place: &Place,
        window: Option<&TimeWindow>,
        resolver: Option<&dyn PlaceResolver>,
    ) -> Result<Vec<Presence>, FactError> {
        if let Some(r) = resolver {
            if !r.resolves(place) {
                return Err(FactError::UnresolvablePlace(place.street().to_string()));
            }
        }
        let mut filter = FactFilter::new().at_place(place, PlaceMatch::SameStreet);
        filter.time_window = window.copied();
        let mut out: Vec<Presence> = Vec::new();
        for fact in self.query_facts(&filter) {
            let Some(person) = fact.person() else { continue };
            match out.iter_mut().find(|p| p.person.same_referent(person)) {
                Some(p) => p.facts.push(fact.id),
                None => out.push(Presence { person: person.clone(), facts: vec![fact.id] }),
            }
        }
        Ok(out)
    }

    /// Distinct named persons in order of first appearance.
    pub fn persons(&self) -> Vec<Entity> {
        let mut out: Vec<Entity> = Vec::new();
        for person in self.facts.iter().filter_map(Fact::person) {
            if !out.iter().any(|p| p.same_referent(person)) {
                out.push(person.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Qualifier;

    fn street1() -> Place {
        Place::new(Some(9), "Street1").unwrap()
    }

    /// Facts of the murder scenario, asserted in source order.
    fn scenario() -> FactStore {
        let mut s = FactStore::new();
        let petrov = Entity::named("Petrov");
        s.assert_fact(
            Fact::action(Entity::common("man"), "shoot")
                .with_object(Entity::common("girl"))
                .with_time(Timestamp::at(11, 7, 20).unwrap())
                .with_place(street1()),
        )
        .unwrap();
        s.assert_fact(Fact::action(petrov.clone(), "meet").with_object(Entity::common("friend")).with_place(street1()))
            .unwrap();
        s.assert_fact(
            Fact::action(petrov.clone(), "buy")
                .with_object(Entity::common("cheese"))
                .with_time(Timestamp::new(None, None, Some(19), 0, Qualifier::After).unwrap()),
        )
        .unwrap();
        s.assert_fact(Fact::attribute(petrov.clone(), "criminal")).unwrap();
        s.assert_fact(Fact::possession(petrov, Entity::common("pistol"))).unwrap();
        s
    }

    fn nov7_evening(s: &FactStore) -> TimeWindow {
        s.calendar().between(&Timestamp::at(11, 7, 19).unwrap(), &Timestamp::at(11, 7, 21).unwrap()).unwrap()
    }

    #[test]
    fn ids_follow_assertion_order() {
        let s = scenario();
        let buy = s.query_facts(&FactFilter::new().verb("buy"));
        assert_eq!(buy[0].id, FactId(2));
        let criminal = s.query_facts(&FactFilter::new().kind(FactKind::Attribute));
        assert_eq!(criminal[0].id, FactId(3));
    }

    #[test]
    fn action_without_verb_is_rejected() {
        let mut s = FactStore::new();
        let mut f = Fact::action(Entity::named("Petrov"), "buy");
        f.verb = None;
        let err = s.assert_fact(f).unwrap_err();
        assert_eq!(err.to_string(), "verb required");
    }

    #[test]
    fn possession_query() {
        let s = scenario();
        let petrov = Entity::named("petrov");
        let got = s.query_facts(&FactFilter::new().subject(&petrov).kind(FactKind::Possession));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].object.as_ref().unwrap().token(), "pistol");
    }

    #[test]
    fn empty_store_returns_nothing() {
        let s = FactStore::new();
        assert!(s.query_facts(&FactFilter::new().kind(FactKind::Action)).is_empty());
        assert!(s.persons_at(&street1(), None, None).unwrap().is_empty());
    }

    #[test]
    fn place_and_window_query() {
        // Shooting (dated, placed) and meeting (undated, placed) qualify; the
        // purchase carries no place.
        let s = scenario();
        let w = nov7_evening(&s);
        let got: Vec<_> = s.query_facts(&FactFilter::new().at_place(&street1(), PlaceMatch::ExactAddress).within(w)).iter().map(|f| f.id).collect();
        assert_eq!(got, vec![FactId(0), FactId(1)]);
    }

    #[test]
    fn persons_at_skips_unnamed_actors() {
        let s = scenario();
        let w = nov7_evening(&s);
        let got = s.persons_at(&street1(), Some(&w), None).unwrap();
        assert_eq!(got, vec![Entity::named("Petrov")]);
    }

    #[test]
    fn disjoint_window_with_only_dated_facts() {
        let mut s = FactStore::new();
        s.assert_fact(
            Fact::action(Entity::named("Petrov"), "meet")
                .with_time(Timestamp::at(11, 7, 20).unwrap())
                .with_place(street1()),
        )
        .unwrap();
        let nov8 = s.calendar().interval(&Timestamp::date(11, 8).unwrap()).unwrap();
        assert!(s.persons_at(&street1(), Some(&nov8), None).unwrap().is_empty());
    }

    struct NoStreets;
    impl PlaceResolver for NoStreets {
        fn resolves(&self, _: &Place) -> bool {
            false
        }
    }

    #[test]
    fn unresolvable_place_names_street() {
        let s = scenario();
        let err = s.persons_at(&Place::new(None, "Street9").unwrap(), None, Some(&NoStreets)).unwrap_err();
        assert_eq!(err, FactError::UnresolvablePlace("street9".into()));
    }

    #[test]
    fn retract_keeps_other_ids() {
        let mut s = scenario();
        s.retract(FactId(1)).unwrap();
        assert!(s.get(FactId(1)).is_none());
        assert_eq!(s.get(FactId(2)).unwrap().verb.as_deref(), Some("buy"));
        assert!(s.retract(FactId(1)).is_err());
    }

    #[test]
    fn house_numbers_only_compared_when_both_present() {
        let nine = street1();
        let bare = Place::new(None, "street1").unwrap();
        let eleven = Place::new(Some(11), "Street1").unwrap();
        assert!(nine.matches(&bare, PlaceMatch::ExactAddress));
        assert!(!nine.matches(&eleven, PlaceMatch::ExactAddress));
        assert!(nine.matches(&eleven, PlaceMatch::SameStreet));
    }
}
