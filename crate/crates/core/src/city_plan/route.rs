//! Greedy block-walking router.
//!
//! From the start, walk to the crossing of the start block nearest the
//! destination, then repeatedly pick the block around the current crossing
//! whose center is nearest the destination. If that block holds the
//! destination, finish with a straight segment; otherwise walk its streets to
//! its crossing nearest the destination and repeat.
//!
//! The loop may revisit crossings on irregular plans. A visited set stops it,
//! after which the route is recomputed exactly over the crossing graph and
//! marked as a fallback.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use super::{BlockCode, CityPlan, CrossingCode, StreetCode};
use crate::geometry::{polyline_length, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError {
    #[error("position {0} lies outside the plan")]
    OutsidePlan(Point),
    #[error("destination unreachable after {} waypoints", partial.waypoints.len())]
    Unreachable { partial: Path },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub waypoints: Vec<Point>,
    /// Street travelled by each segment; `None` for cuts through a block.
    pub streets: Vec<Option<StreetCode>>,
    pub total_length: f64,
    /// Executions of the block-selection step.
    pub iterations: usize,
    /// True when the greedy walk stalled and the exact route was used.
    pub fallback: bool,
}

impl Path {
    fn start(p: Point) -> Self {
        Path { waypoints: vec![p], streets: Vec::new(), total_length: 0.0, iterations: 0, fallback: false }
    }

    fn push(&mut self, p: Point, street: Option<StreetCode>) {
        let last = *self.waypoints.last().expect("path has a start");
        self.total_length += last.distance(&p);
        self.waypoints.push(p);
        self.streets.push(street);
    }

    /// Lengths of the individual segments.
    pub fn segments(&self) -> impl Iterator<Item = (f64, Option<StreetCode>)> + '_ {
        self.waypoints.windows(2).zip(&self.streets).map(|(w, s)| (w[0].distance(&w[1]), *s))
    }

    pub fn recomputed_length(&self) -> f64 {
        polyline_length(&self.waypoints)
    }
}

fn closest<I>(plan: &CityPlan, candidates: I, target: &Point) -> Option<CrossingCode>
where
    I: IntoIterator<Item = CrossingCode>,
{
    candidates
        .into_iter()
        .map(|c| (plan.crossings[&c].center.distance(target), c))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, c)| c)
}

impl CityPlan {
    /// Route from `start` to `end` with the greedy block walk.
    pub fn route(&self, start: Point, end: Point) -> Result<Path, RouteError> {
        if start.near(&end) {
            return Ok(Path::start(start));
        }
        let start_blocks = self.blocks_containing(&start);
        if start_blocks.is_empty() {
            return Err(RouteError::OutsidePlan(start));
        }
        let end_blocks = self.blocks_containing(&end);
        if end_blocks.is_empty() {
            return Err(RouteError::OutsidePlan(end));
        }
        let mut path = Path::start(start);
        if start_blocks.iter().any(|b| end_blocks.contains(b)) {
            path.push(end, None);
            return Ok(path);
        }

        let mut current = match self.crossing_at(&start) {
            Some(c) => c,
            None => {
                let candidates: BTreeSet<CrossingCode> =
                    start_blocks.iter().flat_map(|b| self.blocks[b].crossings.iter().flatten().copied()).collect();
                let c = closest(self, candidates, &end).expect("blocks have crossings");
                path.push(self.crossings[&c].center, None);
                c
            }
        };
        let mut visited = BTreeSet::from([current]);

        loop {
            if path.iterations == self.crossing_count() {
                return self.fallback(start, end, path);
            }
            path.iterations += 1;
            let selected: BlockCode = self.crossings[&current]
                .blocks
                .iter()
                .flatten()
                .map(|b| (self.blocks[b].center.distance(&end), *b))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, b)| b)
                .expect("crossings list at least one block");
            if self.block_contains(selected, &end) {
                path.push(end, None);
                return Ok(path);
            }
            let block = &self.blocks[&selected];
            let next = closest(self, block.crossings.iter().flatten().copied(), &end).expect("blocks have crossings");
            if next == current || visited.contains(&next) {
                return self.fallback(start, end, path);
            }
            for (crossing, street) in self.perimeter_walk(selected, current, next) {
                path.push(self.crossings[&crossing].center, street);
            }
            visited.insert(next);
            current = next;
        }
    }

    fn fallback(&self, start: Point, end: Point, partial: Path) -> Result<Path, RouteError> {
        let iterations = partial.iterations;
        match self.shortest_route(start, end) {
            Some(mut exact) => {
                exact.iterations = iterations;
                exact.fallback = true;
                Ok(exact)
            }
            None => Err(RouteError::Unreachable { partial }),
        }
    }

    /// Walk the perimeter of `block` from `from` to `to` along the shorter
    /// side. Equal sides: the one whose first crossing has the smaller code.
    fn perimeter_walk(
        &self,
        block: BlockCode,
        from: CrossingCode,
        to: CrossingCode,
    ) -> Vec<(CrossingCode, Option<StreetCode>)> {
        let cycle = self.perimeter(&self.blocks[&block]);
        let n = cycle.len();
        let ia = cycle.iter().position(|e| e.crossing == from).expect("crossing on block");
        let ib = cycle.iter().position(|e| e.crossing == to).expect("crossing on block");

        let mut forward = Vec::new();
        let mut i = ia;
        while i != ib {
            let street = cycle[i].street;
            i = (i + 1) % n;
            forward.push((cycle[i].crossing, street));
        }
        let mut backward = Vec::new();
        let mut i = ia;
        while i != ib {
            let j = (i + n - 1) % n;
            backward.push((cycle[j].crossing, cycle[j].street));
            i = j;
        }
        let length = |steps: &[(CrossingCode, Option<StreetCode>)]| {
            let mut prev = self.crossings[&from].center;
            steps.iter().fold(0.0, |acc, (c, _)| {
                let p = self.crossings[c].center;
                let d = prev.distance(&p);
                prev = p;
                acc + d
            })
        };
        let (lf, lb) = (length(&forward), length(&backward));
        let forward_wins = match lf.total_cmp(&lb) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => forward.first().map(|s| s.0) <= backward.first().map(|s| s.0),
        };
        if forward_wins {
            forward
        } else {
            backward
        }
    }

    /// Exact shortest route: straight cuts from `start`/`end` to the crossings
    /// of their blocks, street edges between crossings.
    pub fn shortest_route(&self, start: Point, end: Point) -> Option<Path> {
        let codes: Vec<CrossingCode> = self.crossings.keys().copied().collect();
        let index = |c: CrossingCode| codes.binary_search(&c).expect("known crossing");
        let n = codes.len();
        let (src, dst) = (n, n + 1);
        let mut adj: Vec<Vec<(usize, f64, Option<StreetCode>)>> = vec![Vec::new(); n + 2];
        for block in self.blocks.values() {
            let cycle = self.perimeter(block);
            for (k, e) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()].crossing;
                if next == e.crossing {
                    continue;
                }
                let (a, b) = (index(e.crossing), index(next));
                let w = self.crossings[&e.crossing].center.distance(&self.crossings[&next].center);
                adj[a].push((b, w, e.street));
                adj[b].push((a, w, e.street));
            }
        }
        let start_blocks = self.blocks_containing(&start);
        let end_blocks = self.blocks_containing(&end);
        for b in &start_blocks {
            for c in self.blocks[b].crossings.iter().flatten() {
                adj[src].push((index(*c), start.distance(&self.crossings[c].center), None));
            }
        }
        for b in &end_blocks {
            for c in self.blocks[b].crossings.iter().flatten() {
                adj[index(*c)].push((dst, self.crossings[c].center.distance(&end), None));
            }
        }
        if start_blocks.iter().any(|b| end_blocks.contains(b)) {
            adj[src].push((dst, start.distance(&end), None));
        }

        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev: Vec<Option<(usize, Option<StreetCode>)>> = vec![None; n + 2];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapEntry { cost: 0.0, node: src });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if node == dst {
                break;
            }
            for &(next, w, street) in &adj[node] {
                let cand = cost + w;
                if cand < dist[next] {
                    dist[next] = cand;
                    prev[next] = Some((node, street));
                    heap.push(HeapEntry { cost: cand, node: next });
                }
            }
        }
        if !dist[dst].is_finite() {
            return None;
        }
        let mut chain = Vec::new();
        let mut at = dst;
        while let Some((p, street)) = prev[at] {
            chain.push((at, street));
            at = p;
        }
        chain.reverse();
        let mut path = Path::start(start);
        for (node, street) in chain {
            let p = if node == dst { end } else { self.crossings[&codes[node]].center };
            if !p.near(path.waypoints.last().expect("start")) {
                path.push(p, street);
            }
        }
        Some(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> CityPlan {
        CityPlan::load(include_str!("../../fixtures/grid2x2.plan")).unwrap()
    }

    #[test]
    fn identity_route() {
        let p = Point::new(30.0, 40.0);
        let path = grid().route(p, p).unwrap();
        assert_eq!(path.waypoints, vec![p]);
        assert_eq!(path.total_length, 0.0);
    }

    #[test]
    fn same_block_is_a_straight_segment() {
        let (a, b) = (Point::new(10.0, 10.0), Point::new(40.0, 50.0));
        let path = grid().route(a, b).unwrap();
        assert_eq!(path.waypoints, vec![a, b]);
        assert!((path.total_length - 50.0).abs() < 1e-9);
    }

    #[test]
    fn outside_points_are_rejected() {
        assert!(matches!(grid().route(Point::new(-5.0, 0.0), Point::new(50.0, 50.0)), Err(RouteError::OutsidePlan(_))));
    }

    #[test]
    fn perimeter_tie_prefers_smaller_first_crossing() {
        // Around block 1 from crossing 1 to crossing 5: via 4 or via 2, both 200 m.
        let walk = grid().perimeter_walk(1, 1, 5);
        assert_eq!(walk.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(walk.iter().map(|s| s.1).collect::<Vec<_>>(), vec![Some(1), Some(5)]);
    }

    #[test]
    fn exact_route_on_grid() {
        let path = grid().shortest_route(Point::new(0.0, 0.0), Point::new(200.0, 200.0)).unwrap();
        assert!((path.total_length - 2.0 * 100f64.hypot(100.0)).abs() < 1e-9);
    }
}
