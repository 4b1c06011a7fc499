//! Simple polygons with canonical indexing.
//!
//! Vertices are addressed by 1-based ids `1..=n`, matching the convention
//! that vertex 1 is reflex whenever the polygon has any reflex vertex.
//! Orientation is normalized to counter-clockwise on construction.

use std::fmt;

use num_traits::Zero;

use super::{orient, segment_intersection, Point, SegIntersection};
use crate::rational::{format_rat, parse_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeomError {
    /// Two non-adjacent edges intersect, or adjacent edges overlap.
    NotSimple,
    /// Repeated vertices, collinear input, or too few points.
    DegeneratePolygon(String),
    /// Malformed polygon file.
    Parse(String),
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::NotSimple => write!(f, "polygon is not simple"),
            GeomError::DegeneratePolygon(why) => write!(f, "degenerate polygon: {why}"),
            GeomError::Parse(why) => write!(f, "polygon parse error: {why}"),
        }
    }
}

impl std::error::Error for GeomError {}

/// A validated simple polygon.
///
/// Invariants: counter-clockwise orientation; vertex ids `1..=n` in boundary
/// order; if any vertex is reflex, vertex 1 is the reflex vertex with the
/// lexicographically smallest `(x, y)`. Vertices with straight (180 degree)
/// interior angles are classified convex; they never appear in validated
/// user input but do appear in the internally built subdivisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    points: Vec<Point>,
    reflex: Vec<usize>,
    convex: Vec<usize>,
}

impl Polygon {
    /// Validates raw user input: at least 3 points, no repeated points, no
    /// collinear consecutive triples, simple boundary. Accepts either
    /// orientation and normalizes to CCW; rotates so vertex 1 is reflex when
    /// any reflex vertex exists.
    pub fn validate(raw: Vec<Point>) -> Result<Polygon, GeomError> {
        Self::build(raw, true)
    }

    /// Constructs a polygon that may contain straight-angle vertices, as the
    /// edge subdivisions do. Same checks as `validate` minus the
    /// collinear-consecutive rejection.
    pub(crate) fn from_boundary(points: Vec<Point>) -> Result<Polygon, GeomError> {
        Self::build(points, false)
    }

    fn build(mut points: Vec<Point>, strict: bool) -> Result<Polygon, GeomError> {
        let n = points.len();
        if n < 3 {
            return Err(GeomError::DegeneratePolygon(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        {
            let mut sorted: Vec<&Point> = points.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(GeomError::DegeneratePolygon("repeated point".into()));
            }
        }
        if points[2..].iter().all(|p| orient(&points[0], &points[1], p) == 0) {
            return Err(GeomError::DegeneratePolygon("all points collinear".into()));
        }
        check_simple(&points)?;
        let area2 = signed_area_doubled(&points);
        if area2.is_zero() {
            return Err(GeomError::DegeneratePolygon("zero area".into()));
        }
        if area2 < Rat::zero() {
            points.reverse();
        }
        if strict {
            for i in 0..n {
                let a = &points[(i + n - 1) % n];
                let b = &points[i];
                let c = &points[(i + 1) % n];
                if orient(a, b, c) == 0 {
                    return Err(GeomError::DegeneratePolygon(
                        "collinear consecutive vertices".into(),
                    ));
                }
            }
        }

        let mut poly = Polygon {
            points,
            reflex: Vec::new(),
            convex: Vec::new(),
        };
        poly.classify();
        poly.rotate_canonical();
        Ok(poly)
    }

    fn classify(&mut self) {
        let n = self.points.len();
        self.reflex.clear();
        self.convex.clear();
        for i in 0..n {
            let a = &self.points[(i + n - 1) % n];
            let b = &self.points[i];
            let c = &self.points[(i + 1) % n];
            // CCW boundary: right turn means interior angle > 180 degrees.
            // Straight angles count as convex.
            if orient(a, b, c) < 0 {
                self.reflex.push(i + 1);
            } else {
                self.convex.push(i + 1);
            }
        }
    }

    fn rotate_canonical(&mut self) {
        if self.reflex.is_empty() {
            return;
        }
        let start = self
            .reflex
            .iter()
            .map(|&id| id - 1)
            .min_by(|&a, &b| self.points[a].cmp(&self.points[b]))
            .unwrap();
        self.points.rotate_left(start);
        self.classify();
        debug_assert!(self.reflex.contains(&1));
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Point of the 1-based vertex `id`.
    pub fn point(&self, id: usize) -> &Point {
        &self.points[id - 1]
    }

    /// All vertex points in boundary order (index 0 is vertex 1).
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Reflex vertex ids, ascending.
    pub fn reflex_ids(&self) -> &[usize] {
        &self.reflex
    }

    /// Convex vertex ids, ascending. Includes straight-angle vertices.
    pub fn convex_ids(&self) -> &[usize] {
        &self.convex
    }

    pub fn reflex_count(&self) -> usize {
        self.reflex.len()
    }

    pub fn is_reflex(&self, id: usize) -> bool {
        self.reflex.binary_search(&id).is_ok()
    }

    /// Cyclic successor of a vertex id.
    pub fn next_id(&self, id: usize) -> usize {
        if id == self.n() {
            1
        } else {
            id + 1
        }
    }

    /// Cyclic predecessor of a vertex id.
    pub fn prev_id(&self, id: usize) -> usize {
        if id == 1 {
            self.n()
        } else {
            id - 1
        }
    }

    /// Edges as point pairs, edge `i` joining vertex `i+1` to its successor.
    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.points.len();
        (0..n).map(move |i| (&self.points[i], &self.points[(i + 1) % n]))
    }

    /// 1-based id of the vertex at `point`, if any.
    pub fn vertex_id_at(&self, point: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == point).map(|i| i + 1)
    }
}

fn signed_area_doubled(points: &[Point]) -> Rat {
    let n = points.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        let a = &points[i];
        let b = &points[(i + 1) % n];
        acc += &a.x * &b.y - &b.x * &a.y;
    }
    acc
}

fn check_simple(points: &[Point]) -> Result<(), GeomError> {
    let n = points.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a1, b1) = (&points[i], &points[(i + 1) % n]);
            let (a2, b2) = (&points[j], &points[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            match segment_intersection(a1, b1, a2, b2) {
                SegIntersection::None => {
                    if adjacent {
                        // Adjacent edges must meet at their shared endpoint.
                        return Err(GeomError::NotSimple);
                    }
                }
                SegIntersection::At { .. } => {
                    if !adjacent {
                        return Err(GeomError::NotSimple);
                    }
                    // Shared endpoint contact is the only allowed touch; a
                    // point contact between adjacent edges is necessarily it.
                }
                SegIntersection::Overlap { .. } => return Err(GeomError::NotSimple),
            }
        }
    }
    Ok(())
}

/// Parses the polygon text format: optional `#` comment lines, a count line
/// `n`, then `n` lines `x y` with exact coordinates, in boundary order of
/// either orientation.
pub fn parse_polygon(text: &str) -> Result<Polygon, GeomError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| GeomError::Parse("empty file".into()))?
        .parse()
        .map_err(|_| GeomError::Parse("first line must be the vertex count".into()))?;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| GeomError::Parse(format!("expected {n} vertices, got {i}")))?;
        let mut tokens = line.split_whitespace();
        let x = tokens
            .next()
            .ok_or_else(|| GeomError::Parse(format!("vertex {}: missing x", i + 1)))?;
        let y = tokens
            .next()
            .ok_or_else(|| GeomError::Parse(format!("vertex {}: missing y", i + 1)))?;
        if tokens.next().is_some() {
            return Err(GeomError::Parse(format!(
                "vertex {}: trailing tokens",
                i + 1
            )));
        }
        let x = parse_rat(x).map_err(|e| GeomError::Parse(e.to_string()))?;
        let y = parse_rat(y).map_err(|e| GeomError::Parse(e.to_string()))?;
        points.push(Point::new(x, y));
    }
    if lines.next().is_some() {
        return Err(GeomError::Parse("trailing content after vertex list".into()));
    }
    Polygon::validate(points)
}

/// Writes a polygon in the text format, in its canonical vertex order.
pub fn write_polygon(poly: &Polygon) -> String {
    let mut out = String::new();
    out.push_str(&poly.n().to_string());
    out.push('\n');
    for p in poly.points() {
        out.push_str(&format_rat(&p.x));
        out.push(' ');
        out.push_str(&format_rat(&p.y));
        out.push('\n');
    }
    out
}
