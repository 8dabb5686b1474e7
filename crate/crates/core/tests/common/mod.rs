//! Shared fixtures: fixture paths, the scenario session and a rectangular
//! grid generator with a closed-form shortest-path oracle.
#![allow(dead_code)]

use std::path::PathBuf;

use inferqa::city_plan::CityPlan;
use inferqa::cnl_parser::Parser;
use inferqa::fact_store::FactStore;
use inferqa::geometry::Point;
use inferqa::inference::{Answer, Engine, EngineConfig};
use inferqa::knowledge_base::{KnowledgeBase, VerbDictionary};
use inferqa::time::Timestamp;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn kb() -> KnowledgeBase {
    kb_with(&read_fixture("frames.txt"))
}

pub fn kb_with(frames: &str) -> KnowledgeBase {
    let mut kb = KnowledgeBase::with_verbs(VerbDictionary::load(&read_fixture("verbs.txt")).unwrap());
    kb.load_frames(frames).unwrap();
    kb
}

pub fn store(kb: &KnowledgeBase, facts: &str) -> FactStore {
    let mut store = FactStore::new();
    Parser::new(kb).load_facts(&mut store, facts).unwrap();
    store
}

pub fn golden_facts() -> String {
    read_fixture("facts_golden.txt")
}

pub fn demo_plan() -> CityPlan {
    CityPlan::load(&read_fixture("demo_city.plan")).unwrap()
}

/// Parse and answer one question against the demo city.
pub fn ask(kb: &KnowledgeBase, store: &FactStore, question: &str) -> Answer {
    let plan = demo_plan();
    let q = Parser::new(kb).parse_question(question).unwrap();
    let config = EngineConfig { asof: Some(Timestamp::date(11, 8).unwrap()), ..EngineConfig::default() };
    Engine::new(store, kb).with_plan(&plan).with_config(config).answer(&q).unwrap()
}

/// One 10 km street with a house at each end.
pub fn long_street() -> CityPlan {
    CityPlan::load(
        "street|1|Far\n\
         crossing|1|0|0||1||\n\
         crossing|2|0|10||||1\n\
         crossing|3|10000|10|||1|\n\
         crossing|4|10000|0|1|||\n\
         block|1|1|1|1|1|1|2|3|4|5000|5\n\
         construction|1|1|1||0|5|1\n\
         construction|2|2|1||10000|5|1\n",
    )
    .unwrap()
}

/// Rectangular grid with irregular column widths and row heights.
///
/// Crossing `(i, j)` sits at `(xs[i], ys[j])`; block `(i, j)` spans
/// `[xs[i], xs[i+1]] x [ys[j], ys[j+1]]`.
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    pub fn random<R: Rng>(rng: &mut R, max_cols: usize, max_rows: usize) -> Grid {
        let cols = rng.gen_range(1..=max_cols);
        let rows = rng.gen_range(1..=max_rows);
        let mut xs = vec![0.0];
        for _ in 0..cols {
            let last = *xs.last().unwrap();
            xs.push(last + rng.gen_range(30.0..250.0_f64).round());
        }
        let mut ys = vec![0.0];
        for _ in 0..rows {
            let last = *ys.last().unwrap();
            ys.push(last + rng.gen_range(30.0..250.0_f64).round());
        }
        Grid { xs, ys }
    }

    pub fn cols(&self) -> usize {
        self.xs.len() - 1
    }
    pub fn rows(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn crossing_code(&self, i: usize, j: usize) -> u32 {
        (j * (self.cols() + 1) + i + 1) as u32
    }

    fn block_code(&self, i: usize, j: usize) -> u32 {
        (j * self.cols() + i + 1) as u32
    }

    /// Plan file text in the `street|crossing|block` record format.
    pub fn plan_text(&self) -> String {
        let (c, r) = (self.cols(), self.rows());
        let hstreet = |j: usize| j as u32 + 1;
        let vstreet = |i: usize| (r + 1 + i) as u32 + 1;
        let block = |i: isize, j: isize| -> String {
            if i < 0 || j < 0 || i >= c as isize || j >= r as isize {
                String::new()
            } else {
                self.block_code(i as usize, j as usize).to_string()
            }
        };
        let mut out = String::new();
        for j in 0..=r {
            out += &format!("street|{}|h{}\n", hstreet(j), j);
        }
        for i in 0..=c {
            out += &format!("street|{}|v{}\n", vstreet(i), i);
        }
        for j in 0..=r {
            for i in 0..=c {
                let (ii, jj) = (i as isize, j as isize);
                out += &format!(
                    "crossing|{}|{}|{}|{}|{}|{}|{}\n",
                    self.crossing_code(i, j),
                    self.xs[i],
                    self.ys[j],
                    block(ii - 1, jj),
                    block(ii, jj),
                    block(ii, jj - 1),
                    block(ii - 1, jj - 1),
                );
            }
        }
        for j in 0..r {
            for i in 0..c {
                out += &format!(
                    "block|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}\n",
                    self.block_code(i, j),
                    vstreet(i),
                    hstreet(j + 1),
                    vstreet(i + 1),
                    hstreet(j),
                    self.crossing_code(i, j),
                    self.crossing_code(i, j + 1),
                    self.crossing_code(i + 1, j + 1),
                    self.crossing_code(i + 1, j),
                    (self.xs[i] + self.xs[i + 1]) / 2.0,
                    (self.ys[j] + self.ys[j + 1]) / 2.0,
                );
            }
        }
        out
    }

    pub fn plan(&self) -> CityPlan {
        CityPlan::load(&self.plan_text()).expect("generated plan loads")
    }

    pub fn crossing_count(&self) -> usize {
        (self.cols() + 1) * (self.rows() + 1)
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        if rng.gen_bool(0.1) {
            let i = rng.gen_range(0..=self.cols());
            let j = rng.gen_range(0..=self.rows());
            return Point::new(self.xs[i], self.ys[j]);
        }
        Point::new(rng.gen_range(0.0..=*self.xs.last().unwrap()), rng.gen_range(0.0..=*self.ys.last().unwrap()))
    }

    /// Blocks `(i, j)` whose closed rectangle contains `p`.
    pub fn cells_containing(&self, p: &Point) -> Vec<(usize, usize)> {
        const TOL: f64 = 1e-6;
        let mut out = Vec::new();
        for j in 0..self.rows() {
            for i in 0..self.cols() {
                if p.x >= self.xs[i] - TOL && p.x <= self.xs[i + 1] + TOL && p.y >= self.ys[j] - TOL && p.y <= self.ys[j + 1] + TOL {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn share_cell(&self, a: &Point, b: &Point) -> bool {
        let cb = self.cells_containing(b);
        self.cells_containing(a).iter().any(|c| cb.contains(c))
    }

    fn cell_corners(&self, (i, j): (usize, usize)) -> [Point; 4] {
        [
            Point::new(self.xs[i], self.ys[j]),
            Point::new(self.xs[i], self.ys[j + 1]),
            Point::new(self.xs[i + 1], self.ys[j + 1]),
            Point::new(self.xs[i + 1], self.ys[j]),
        ]
    }

    /// Exact shortest length under the routing model: a straight cut from the
    /// start to a corner of one of its blocks, streets between crossings, a
    /// straight cut from a corner of one of the end's blocks. On a
    /// rectangular grid the street distance between crossings is Manhattan.
    pub fn oracle_length(&self, s: &Point, e: &Point) -> f64 {
        if s.distance(e) <= 1e-9 {
            return 0.0;
        }
        if self.share_cell(s, e) {
            return s.distance(e);
        }
        let starts: Vec<Point> = self.cells_containing(s).into_iter().flat_map(|c| self.cell_corners(c)).collect();
        let ends: Vec<Point> = self.cells_containing(e).into_iter().flat_map(|c| self.cell_corners(c)).collect();
        let mut best = f64::INFINITY;
        for a in &starts {
            for b in &ends {
                let d = s.distance(a) + (a.x - b.x).abs() + (a.y - b.y).abs() + b.distance(e);
                best = best.min(d);
            }
        }
        best
    }
}
