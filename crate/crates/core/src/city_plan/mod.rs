//! City plan: streets, crossings, blocks, constructions and apartments, with
//! the greedy block-walking router and travel-time estimates.
//!
//! Orientation conventions (coordinates are meters, y grows upwards):
//! - a crossing lists its blocks clockwise starting with the top-left one;
//! - a block lists its crossings clockwise starting with the down-left one,
//!   and street `i` runs between crossing `i` and crossing `i + 1`.

mod route;
mod travel;

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use thiserror::Error;

use crate::fact_store::{normalize_token, Place, PlaceResolver};
use crate::geometry::{polygon_contains, Point};

pub use route::{Path, RouteError};
pub use travel::{SpeedBand, SpeedTable, TravelMode};

pub type StreetCode = u32;
pub type CrossingCode = u32;
pub type BlockCode = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{predicate} {code}: field `{field}` refers to unknown code {target}")]
    Dangling { predicate: &'static str, code: u32, field: &'static str, target: u32 },
    #[error("{predicate} {code}: {message}")]
    Invalid { predicate: &'static str, code: u32, message: String },
    #[error("unknown street `{0}`")]
    UnknownStreet(String),
    #[error("no house {house} on street `{street}`")]
    UnknownHouse { street: String, house: u32 },
    #[error("unknown apartment {0}")]
    UnknownApartment(u32),
    #[error("position {0} lies outside every block")]
    Outside(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Street {
    pub code: StreetCode,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub code: CrossingCode,
    pub center: Point,
    pub blocks: [Option<BlockCode>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub code: BlockCode,
    pub streets: [Option<StreetCode>; 4],
    pub crossings: [Option<CrossingCode>; 4],
    pub center: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub code: u32,
    pub house_number: Option<u32>,
    pub street: StreetCode,
    pub name: Option<String>,
    pub center: Point,
    pub block: BlockCode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Apartment {
    pub code: u32,
    pub house: u32,
    pub entrance: u32,
    pub floor: i32,
    pub number: u32,
}

/// A resolved position and the block it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub position: Point,
    pub block: BlockCode,
}

/// One step along a block perimeter: the crossing reached and the street used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PerimeterEdge {
    pub crossing: CrossingCode,
    pub street: Option<StreetCode>,
}

#[derive(Debug, Clone, Default)]
pub struct CityPlan {
    streets: BTreeMap<StreetCode, Street>,
    crossings: BTreeMap<CrossingCode, Crossing>,
    blocks: BTreeMap<BlockCode, Block>,
    constructions: BTreeMap<u32, Construction>,
    apartments: BTreeMap<u32, Apartment>,
    polygons: BTreeMap<BlockCode, Vec<Point>>,
}

impl CityPlan {
    /// Parse and validate a plan file.
    pub fn load(text: &str) -> Result<CityPlan, PlanError> {
        let mut plan = CityPlan::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split('|').map(str::trim).collect();
            let rec = Record { line, fields: &fields };
            match fields[0] {
                "street" => {
                    rec.arity(3)?;
                    let code = rec.req(1)?;
                    plan.streets.insert(code, Street { code, name: normalize_token(rec.text(2)?) });
                }
                "crossing" => {
                    rec.arity(8)?;
                    let code = rec.req(1)?;
                    let center = Point::new(rec.req(2)?, rec.req(3)?);
                    let blocks = [rec.opt(4)?, rec.opt(5)?, rec.opt(6)?, rec.opt(7)?];
                    plan.crossings.insert(code, Crossing { code, center, blocks });
                }
                "block" => {
                    rec.arity(12)?;
                    let code = rec.req(1)?;
                    let streets = [rec.opt(2)?, rec.opt(3)?, rec.opt(4)?, rec.opt(5)?];
                    let crossings = [rec.opt(6)?, rec.opt(7)?, rec.opt(8)?, rec.opt(9)?];
                    let center = Point::new(rec.req(10)?, rec.req(11)?);
                    plan.blocks.insert(code, Block { code, streets, crossings, center });
                }
                "construction" => {
                    rec.arity(8)?;
                    let code = rec.req(1)?;
                    let name = rec.text(4).ok().filter(|s| !s.is_empty()).map(normalize_token);
                    plan.constructions.insert(
                        code,
                        Construction {
                            code,
                            house_number: rec.opt(2)?,
                            street: rec.req(3)?,
                            name,
                            center: Point::new(rec.req(5)?, rec.req(6)?),
                            block: rec.req(7)?,
                        },
                    );
                }
                "apartment" => {
                    rec.arity(6)?;
                    let code = rec.req(1)?;
                    plan.apartments.insert(
                        code,
                        Apartment {
                            code,
                            house: rec.req(2)?,
                            entrance: rec.req(3)?,
                            floor: rec.req(4)?,
                            number: rec.req(5)?,
                        },
                    );
                }
                other => {
                    return Err(PlanError::Parse { line, message: format!("unknown record type `{other}`") });
                }
            }
        }
        plan.validate()?;
        plan.polygons = plan
            .blocks
            .values()
            .map(|b| (b.code, b.crossings.iter().flatten().map(|c| plan.crossings[c].center).collect()))
            .collect();
        Ok(plan)
    }

    fn validate(&self) -> Result<(), PlanError> {
        for c in self.crossings.values() {
            if !c.center.is_finite() {
                return Err(PlanError::Invalid { predicate: "crossing", code: c.code, message: "non-finite coordinates".into() });
            }
            if c.blocks.iter().all(Option::is_none) {
                return Err(PlanError::Invalid { predicate: "crossing", code: c.code, message: "no block listed".into() });
            }
            for b in c.blocks.iter().flatten() {
                if !self.blocks.contains_key(b) {
                    return Err(PlanError::Dangling { predicate: "crossing", code: c.code, field: "block", target: *b });
                }
            }
        }
        for b in self.blocks.values() {
            if !b.center.is_finite() {
                return Err(PlanError::Invalid { predicate: "block", code: b.code, message: "non-finite coordinates".into() });
            }
            for s in b.streets.iter().flatten() {
                if !self.streets.contains_key(s) {
                    return Err(PlanError::Dangling { predicate: "block", code: b.code, field: "street", target: *s });
                }
            }
            let listed: Vec<_> = b.crossings.iter().flatten().collect();
            if listed.len() < 2 {
                return Err(PlanError::Invalid { predicate: "block", code: b.code, message: "fewer than 2 crossings".into() });
            }
            for c in listed {
                let Some(crossing) = self.crossings.get(c) else {
                    return Err(PlanError::Dangling { predicate: "block", code: b.code, field: "crossing", target: *c });
                };
                if !crossing.blocks.contains(&Some(b.code)) {
                    return Err(PlanError::Invalid {
                        predicate: "block",
                        code: b.code,
                        message: format!("crossing {c} does not list this block"),
                    });
                }
            }
        }
        for k in self.constructions.values() {
            if !self.streets.contains_key(&k.street) {
                return Err(PlanError::Dangling { predicate: "construction", code: k.code, field: "street", target: k.street });
            }
            if !self.blocks.contains_key(&k.block) {
                return Err(PlanError::Dangling { predicate: "construction", code: k.code, field: "block", target: k.block });
            }
        }
        for a in self.apartments.values() {
            if !self.constructions.contains_key(&a.house) {
                return Err(PlanError::Dangling { predicate: "apartment", code: a.code, field: "house", target: a.house });
            }
        }
        Ok(())
    }

    pub fn streets(&self) -> impl Iterator<Item = &Street> {
        self.streets.values()
    }
    pub fn crossings(&self) -> impl Iterator<Item = &Crossing> {
        self.crossings.values()
    }
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }
    pub fn constructions(&self) -> impl Iterator<Item = &Construction> {
        self.constructions.values()
    }
    pub fn crossing(&self, code: CrossingCode) -> Option<&Crossing> {
        self.crossings.get(&code)
    }
    pub fn block(&self, code: BlockCode) -> Option<&Block> {
        self.blocks.get(&code)
    }
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn street_by_name(&self, name: &str) -> Option<&Street> {
        let name = normalize_token(name);
        self.streets.values().find(|s| s.name == name)
    }

    /// Blocks whose outline (boundary included) contains `p`, by code.
    pub fn blocks_containing(&self, p: &Point) -> Vec<BlockCode> {
        self.polygons.iter().filter(|(_, poly)| polygon_contains(poly, p)).map(|(c, _)| *c).collect()
    }

    pub fn block_contains(&self, block: BlockCode, p: &Point) -> bool {
        self.polygons.get(&block).is_some_and(|poly| polygon_contains(poly, p))
    }

    pub fn crossing_at(&self, p: &Point) -> Option<CrossingCode> {
        self.crossings.values().find(|c| c.center.near(p)).map(|c| c.code)
    }

    /// Perimeter cycle of a block: each present crossing with the street
    /// leading to the next present crossing.
    pub(crate) fn perimeter(&self, block: &Block) -> Vec<PerimeterEdge> {
        let slots: Vec<usize> = (0..4).filter(|&i| block.crossings[i].is_some()).collect();
        slots
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let j = slots[(k + 1) % slots.len()];
                PerimeterEdge {
                    crossing: block.crossings[i].expect("present slot"),
                    street: if j == (i + 1) % 4 { block.streets[i] } else { None },
                }
            })
            .collect()
    }

    /// Crossings lying on a street, from block perimeters.
    fn street_crossings(&self, street: StreetCode) -> BTreeSet<CrossingCode> {
        let mut out = BTreeSet::new();
        for b in self.blocks.values() {
            let cycle = self.perimeter(b);
            for (k, e) in cycle.iter().enumerate() {
                if e.street == Some(street) {
                    out.insert(e.crossing);
                    out.insert(cycle[(k + 1) % cycle.len()].crossing);
                }
            }
        }
        out
    }

    /// Street between two adjacent crossings, if a block edge joins them.
    pub fn street_between(&self, a: CrossingCode, b: CrossingCode) -> Option<StreetCode> {
        for blk in self.blocks.values() {
            let cycle = self.perimeter(blk);
            for (k, e) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()].crossing;
                if (e.crossing == a && next == b) || (e.crossing == b && next == a) {
                    if let Some(s) = e.street {
                        return Some(s);
                    }
                }
            }
        }
        None
    }

    /// Resolve a place to a position: the construction's center for a house
    /// address, the midpoint of the street's crossing span otherwise.
    pub fn locate(&self, place: &Place) -> Result<Location, PlanError> {
        let street = self.street_by_name(place.street()).ok_or_else(|| PlanError::UnknownStreet(place.street().to_string()))?;
        if let Some(house) = place.house_number {
            let k = self
                .constructions
                .values()
                .find(|k| k.street == street.code && k.house_number == Some(house))
                .ok_or_else(|| PlanError::UnknownHouse { street: street.name.clone(), house })?;
            return Ok(Location { position: k.center, block: k.block });
        }
        let on_street: Vec<Point> = self.street_crossings(street.code).iter().map(|c| self.crossings[c].center).collect();
        let mut best: Option<(f64, Point, Point)> = None;
        for (i, a) in on_street.iter().enumerate() {
            for b in &on_street[i..] {
                let d = a.distance(b);
                if best.is_none_or(|(bd, _, _)| d > bd) {
                    best = Some((d, *a, *b));
                }
            }
        }
        let (_, a, b) = best.ok_or_else(|| PlanError::UnknownStreet(street.name.clone()))?;
        let position = a.midpoint(&b);
        let block = *self.blocks_containing(&position).first().ok_or(PlanError::Outside(position))?;
        Ok(Location { position, block })
    }

    pub fn locate_apartment(&self, code: u32) -> Result<Location, PlanError> {
        let apt = self.apartments.get(&code).ok_or(PlanError::UnknownApartment(code))?;
        let k = &self.constructions[&apt.house];
        Ok(Location { position: k.center, block: k.block })
    }
}

impl PlaceResolver for CityPlan {
    fn resolves(&self, place: &Place) -> bool {
        self.locate(place).is_ok()
    }
}

struct Record<'a> {
    line: usize,
    fields: &'a [&'a str],
}

impl Record<'_> {
    fn arity(&self, n: usize) -> Result<(), PlanError> {
        if self.fields.len() == n {
            Ok(())
        } else {
            Err(PlanError::Parse {
                line: self.line,
                message: format!("`{}` record expects {} fields, found {}", self.fields[0], n, self.fields.len()),
            })
        }
    }

    fn text(&self, i: usize) -> Result<&str, PlanError> {
        self.fields.get(i).copied().ok_or(PlanError::Parse { line: self.line, message: format!("missing field {i}") })
    }

    fn opt<T: FromStr>(&self, i: usize) -> Result<Option<T>, PlanError> {
        let s = self.text(i)?;
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| PlanError::Parse { line: self.line, message: format!("field {i}: cannot parse `{s}`") })
    }

    fn req<T: FromStr>(&self, i: usize) -> Result<T, PlanError> {
        self.opt(i)?.ok_or(PlanError::Parse { line: self.line, message: format!("field {i} is required") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = include_str!("../../fixtures/grid2x2.plan");
    const DEMO: &str = include_str!("../../fixtures/demo_city.plan");

    #[test]
    fn grid_fixture_loads() {
        let plan = CityPlan::load(GRID).unwrap();
        assert_eq!(plan.crossing_count(), 9);
        assert_eq!(plan.blocks().count(), 4);
        for code in [1, 3, 7, 9] {
            let listed = plan.crossing(code).unwrap().blocks.iter().flatten().count();
            assert_eq!(listed, 1, "corner crossing {code}");
        }
        assert_eq!(plan.crossing(5).unwrap().blocks.iter().flatten().count(), 4);
    }

    #[test]
    fn dangling_street_is_reported() {
        let text = format!("{GRID}\nconstruction|50|3|99|shop|10|10|1\n");
        let err = CityPlan::load(&text).unwrap_err();
        assert_eq!(err, PlanError::Dangling { predicate: "construction", code: 50, field: "street", target: 99 });
    }

    #[test]
    fn one_sided_block_listing_is_rejected() {
        let text = GRID.replace("crossing|1|0|0||1||", "crossing|1|0|0|||2|");
        assert!(CityPlan::load(&text).is_err());
    }

    #[test]
    fn bad_arity_reports_line() {
        let err = CityPlan::load("street|1\n").unwrap_err();
        assert!(matches!(err, PlanError::Parse { line: 1, .. }));
    }

    #[test]
    fn demo_house_resolves() {
        let plan = CityPlan::load(DEMO).unwrap();
        let loc = plan.locate(&Place::new(Some(9), "Street1").unwrap()).unwrap();
        assert_eq!(loc.position, Point::new(100.0, 20.0));
        assert_eq!(loc.block, 1);
    }

    #[test]
    fn street_only_resolves_to_span_midpoint() {
        // Street1 runs along y = 0 from crossing (0,0) to crossing (400,0).
        let plan = CityPlan::load(DEMO).unwrap();
        let loc = plan.locate(&Place::new(None, "Street1").unwrap()).unwrap();
        assert_eq!(loc.position, Point::new(200.0, 0.0));
        assert_eq!(loc.block, 1);
    }

    #[test]
    fn unknown_street_and_house() {
        let plan = CityPlan::load(DEMO).unwrap();
        assert_eq!(plan.locate(&Place::new(None, "Street9").unwrap()), Err(PlanError::UnknownStreet("street9".into())));
        assert!(matches!(plan.locate(&Place::new(Some(77), "Street1").unwrap()), Err(PlanError::UnknownHouse { .. })));
    }

    #[test]
    fn apartments_resolve_to_their_house() {
        let plan = CityPlan::load(DEMO).unwrap();
        let loc = plan.locate_apartment(1).unwrap();
        assert_eq!(loc.position, Point::new(100.0, 20.0));
        assert!(plan.locate_apartment(42).is_err());
    }
}
