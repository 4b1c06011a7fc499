//! Boundary discretizations for the boundary problem variants.
//!
//! The essential set collects, for every line through two vertices, its
//! intersection points with every edge not contained in that line. P1 is the
//! polygon subdivided at those points; P2 splits every edge of P1 once more
//! at its midpoint.

use std::collections::BTreeMap;

use super::{on_segment, orient, GeomError, Point, Polygon};
use crate::rational::Rat;

/// Boundary points of a polygon in boundary order, each flagged as an
/// original vertex or an added subdivision point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialSet {
    pub points: Vec<Point>,
    pub origin_flags: Vec<bool>,
}

impl EssentialSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Intersection of the infinite line through `l1`,`l2` with the closed
/// segment `ab`. Returns `None` when they miss or when `ab` lies inside the
/// line (the sub-segment case, which the essential set excludes).
fn line_segment_intersection(l1: &Point, l2: &Point, a: &Point, b: &Point) -> Option<Point> {
    let sa = orient(l1, l2, a);
    let sb = orient(l1, l2, b);
    if sa == 0 && sb == 0 {
        return None;
    }
    if sa == 0 {
        return Some(a.clone());
    }
    if sb == 0 {
        return Some(b.clone());
    }
    if sa * sb > 0 {
        return None;
    }
    let d = Point::new(&l2.x - &l1.x, &l2.y - &l1.y);
    let c1 = &d.x * &(&a.y - &l1.y) - &d.y * &(&a.x - &l1.x);
    let c2 = &d.x * &(&b.y - &l1.y) - &d.y * &(&b.x - &l1.x);
    let t = &c1 / &(&c1 - &c2);
    Some(Point::new(
        &a.x + &(&b.x - &a.x) * &t,
        &a.y + &(&b.y - &a.y) * &t,
    ))
}

/// Position of a boundary point as (edge index, parameter in [0, 1)). Unique
/// per boundary point, so it doubles as the deduplication key.
fn boundary_key(poly: &Polygon, p: &Point) -> Option<(usize, Rat)> {
    let n = poly.n();
    for k in 0..n {
        let a = poly.point(k + 1);
        let b = poly.point(poly.next_id(k + 1));
        if !on_segment(p, a, b) {
            continue;
        }
        if p == b {
            // Belongs to the next edge at parameter 0.
            continue;
        }
        let dx = &b.x - &a.x;
        let t = if !num_traits::Zero::is_zero(&dx) {
            (&p.x - &a.x) / &dx
        } else {
            (&p.y - &a.y) / &(&b.y - &a.y)
        };
        return Some((k, t));
    }
    None
}

/// The essential set of a polygon: every vertex, plus every intersection of a
/// vertex-pair line with an edge. Sorted in boundary order, deduplicated.
pub fn essential_set(poly: &Polygon) -> EssentialSet {
    let n = poly.n();
    let mut keyed: BTreeMap<(usize, Rat), Point> = BTreeMap::new();
    let mut insert = |poly: &Polygon, p: Point| {
        let key = boundary_key(poly, &p).expect("essential point must lie on the boundary");
        keyed.entry(key).or_insert(p);
    };
    for id in 1..=n {
        insert(poly, poly.point(id).clone());
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let (l1, l2) = (poly.point(i), poly.point(j));
            for k in 1..=n {
                let a = poly.point(k);
                let b = poly.point(poly.next_id(k));
                if let Some(p) = line_segment_intersection(l1, l2, a, b) {
                    insert(poly, p);
                }
            }
        }
    }
    let points: Vec<Point> = keyed.into_values().collect();
    let origin_flags = points
        .iter()
        .map(|p| poly.vertex_id_at(p).is_some())
        .collect();
    EssentialSet {
        points,
        origin_flags,
    }
}

/// Builds P1: the polygon whose vertex list is `extra` (which must contain
/// every vertex of `poly` and lie on its boundary, in boundary order). The
/// added vertices have straight angles, so the reflex set is preserved.
pub fn subdivide(poly: &Polygon, extra: &EssentialSet) -> Result<Polygon, GeomError> {
    let refined = Polygon::from_boundary(extra.points.clone())?;
    debug_assert_eq!(
        reflex_points(poly),
        reflex_points(&refined),
        "subdivision must preserve the reflex set"
    );
    Ok(refined)
}

/// Builds P2 from P1: every edge split once at its midpoint, doubling the
/// vertex count and preserving the reflex set.
pub fn midpoint_refine(poly: &Polygon) -> Result<Polygon, GeomError> {
    let n = poly.n();
    let mut points = Vec::with_capacity(2 * n);
    for id in 1..=n {
        let a = poly.point(id);
        let b = poly.point(poly.next_id(id));
        points.push(a.clone());
        points.push(a.midpoint(b));
    }
    let refined = Polygon::from_boundary(points)?;
    debug_assert_eq!(refined.n(), 2 * n);
    debug_assert_eq!(reflex_points(poly), reflex_points(&refined));
    Ok(refined)
}

fn reflex_points(poly: &Polygon) -> Vec<Point> {
    let mut pts: Vec<Point> = poly
        .reflex_ids()
        .iter()
        .map(|&id| poly.point(id).clone())
        .collect();
    pts.sort();
    pts
}
