//! Plane geometry over plan coordinates (meters).

use std::fmt;

pub const EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn near(&self, other: &Point) -> bool {
        self.distance(other) <= EPS
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Total length of a polyline.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Boundary-inclusive point-in-polygon test for a simple polygon.
pub fn polygon_contains(polygon: &[Point], p: &Point) -> bool {
    let n = polygon.len();
    if n == 0 {
        return false;
    }
    if n < 3 {
        return polygon.windows(2).any(|w| on_segment(&w[0], &w[1], p)) || polygon.iter().any(|v| v.near(p));
    }
    let mut inside = false;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        if on_segment(&a, &b, p) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a.near(p);
    }
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    if !(-EPS..=1.0 + EPS).contains(&t) {
        return false;
    }
    let cross = (p.x - a.x) * dy - (p.y - a.y) * dx;
    cross.abs() / len2.sqrt() <= EPS
}
