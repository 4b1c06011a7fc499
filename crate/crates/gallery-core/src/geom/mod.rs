//! Exact plane geometry: points, orientation and segment predicates, simple
//! polygons, visibility, and the boundary discretizations used by the
//! boundary problem variants.

mod essential;
mod polygon;
mod visibility;

pub use essential::{essential_set, midpoint_refine, subdivide, EssentialSet};
pub use polygon::{parse_polygon, write_polygon, GeomError, Polygon};
pub use visibility::{contains, sees, vertex_visibility, visibility_table, VisibilityTable};

use crate::rational::{sign, Rat};

/// A point in the exact rational plane.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    /// Midpoint of the segment from `self` to `other`.
    pub fn midpoint(&self, other: &Point) -> Point {
        let two = crate::rational::rat(2);
        Point::new(
            (&self.x + &other.x) / &two,
            (&self.y + &other.y) / &two,
        )
    }
}

/// Convenience constructor from integer coordinates.
pub fn pt(x: i64, y: i64) -> Point {
    Point::new(crate::rational::rat(x), crate::rational::rat(y))
}

/// 2D cross product of `b - a` and `c - a`.
///
/// Positive for a left turn a→b→c, negative for a right turn, zero when
/// collinear.
pub fn cross(a: &Point, b: &Point, c: &Point) -> Rat {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// Sign of the orientation test: 1 left turn, -1 right turn, 0 collinear.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    sign(&cross(a, b, c))
}

/// True when `p` lies on the closed segment `ab`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    // Collinear: check the projection interval on both axes.
    let in_range = |v: &Rat, lo: &Rat, hi: &Rat| {
        if lo <= hi {
            lo <= v && v <= hi
        } else {
            hi <= v && v <= lo
        }
    };
    in_range(&p.x, &a.x, &b.x) && in_range(&p.y, &a.y, &b.y)
}

/// How two closed segments intersect.
///
/// Parameters are reported along the first segment `pq`, as exact rationals
/// in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegIntersection {
    None,
    /// Single intersection point at parameter `t` along `pq` and `u` along
    /// `ab`.
    At { t: Rat, u: Rat },
    /// Collinear overlap covering parameters `[t0, t1]` along `pq`, t0 < t1.
    Overlap { t0: Rat, t1: Rat },
}

/// Exact intersection of the closed segments `pq` and `ab`.
pub fn segment_intersection(p: &Point, q: &Point, a: &Point, b: &Point) -> SegIntersection {
    let r = Point::new(&q.x - &p.x, &q.y - &p.y);
    let s = Point::new(&b.x - &a.x, &b.y - &a.y);
    let denom = &r.x * &s.y - &r.y * &s.x;
    let ap = Point::new(&a.x - &p.x, &a.y - &p.y);
    if !num_traits::Zero::is_zero(&denom) {
        // Lines cross at a single point; accept it when it lies on both
        // closed segments.
        let t = (&ap.x * &s.y - &ap.y * &s.x) / &denom;
        let u = (&ap.x * &r.y - &ap.y * &r.x) / &denom;
        let zero = Rat::from_integer(0.into());
        let one = Rat::from_integer(1.into());
        if t >= zero && t <= one && u >= zero && u <= one {
            return SegIntersection::At { t, u };
        }
        return SegIntersection::None;
    }
    // Parallel. Distinct lines never meet.
    if !num_traits::Zero::is_zero(&(&ap.x * &r.y - &ap.y * &r.x)) {
        return SegIntersection::None;
    }
    // Collinear: project a and b onto pq.
    let len2 = &r.x * &r.x + &r.y * &r.y;
    if num_traits::Zero::is_zero(&len2) {
        // pq is a single point; it intersects iff it lies on ab.
        return if on_segment(p, a, b) {
            let zero = Rat::from_integer(0.into());
            SegIntersection::At { t: zero.clone(), u: zero }
        } else {
            SegIntersection::None
        };
    }
    let proj = |v: &Point| (&(&v.x - &p.x) * &r.x + &(&v.y - &p.y) * &r.y) / &len2;
    let (ta, tb) = (proj(a), proj(b));
    let (mut lo, mut hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    if lo < zero {
        lo = zero.clone();
    }
    if hi > one {
        hi = one;
    }
    if lo > hi {
        SegIntersection::None
    } else if lo == hi {
        // Touch at a single point. The parameter along ab is not needed by
        // callers in the overlap case; report the touch point parameter.
        SegIntersection::At { t: lo, u: zero }
    } else {
        SegIntersection::Overlap { t0: lo, t1: hi }
    }
}

/// True when the open interiors of `pq` and `ab` cross transversally.
pub fn proper_crossing(p: &Point, q: &Point, a: &Point, b: &Point) -> bool {
    let o1 = orient(p, q, a);
    let o2 = orient(p, q, b);
    let o3 = orient(a, b, p);
    let o4 = orient(a, b, q);
    o1 * o2 < 0 && o3 * o4 < 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn orientation_signs() {
        assert_eq!(orient(&pt(0, 0), &pt(1, 0), &pt(0, 1)), 1);
        assert_eq!(orient(&pt(0, 0), &pt(0, 1), &pt(1, 0)), -1);
        assert_eq!(orient(&pt(0, 0), &pt(1, 1), &pt(2, 2)), 0);
    }

    #[test]
    fn segment_point_membership() {
        assert!(on_segment(&pt(1, 1), &pt(0, 0), &pt(2, 2)));
        assert!(on_segment(&pt(0, 0), &pt(0, 0), &pt(2, 2)));
        assert!(!on_segment(&pt(3, 3), &pt(0, 0), &pt(2, 2)));
        assert!(!on_segment(&pt(1, 2), &pt(0, 0), &pt(2, 2)));
    }

    #[test]
    fn proper_crossings() {
        assert!(proper_crossing(&pt(0, 0), &pt(2, 2), &pt(0, 2), &pt(2, 0)));
        // Touching at an endpoint is not a proper crossing.
        assert!(!proper_crossing(&pt(0, 0), &pt(1, 1), &pt(1, 1), &pt(2, 0)));
        assert!(!proper_crossing(&pt(0, 0), &pt(1, 0), &pt(0, 1), &pt(1, 1)));
    }

    #[test]
    fn crossing_point_parameters() {
        match segment_intersection(&pt(0, 0), &pt(2, 2), &pt(0, 2), &pt(2, 0)) {
            SegIntersection::At { t, u } => {
                assert_eq!(t, ratio(1, 2));
                assert_eq!(u, ratio(1, 2));
            }
            other => panic!("expected point intersection, got {other:?}"),
        }
        assert_eq!(
            segment_intersection(&pt(0, 0), &pt(1, 0), &pt(0, 1), &pt(1, 1)),
            SegIntersection::None
        );
    }

    #[test]
    fn collinear_overlap_parameters() {
        match segment_intersection(&pt(0, 0), &pt(4, 0), &pt(1, 0), &pt(6, 0)) {
            SegIntersection::Overlap { t0, t1 } => {
                assert_eq!(t0, ratio(1, 4));
                assert_eq!(t1, rat(1));
            }
            other => panic!("expected overlap, got {other:?}"),
        }
        // Collinear but disjoint.
        assert_eq!(
            segment_intersection(&pt(0, 0), &pt(1, 0), &pt(2, 0), &pt(3, 0)),
            SegIntersection::None
        );
        // Collinear touch at a single point.
        match segment_intersection(&pt(0, 0), &pt(1, 0), &pt(1, 0), &pt(3, 0)) {
            SegIntersection::At { t, .. } => assert_eq!(t, rat(1)),
            other => panic!("expected touch, got {other:?}"),
        }
    }

    #[test]
    fn midpoints_are_exact() {
        let m = pt(1, 2).midpoint(&pt(2, 5));
        assert_eq!(m, Point::new(ratio(3, 2), ratio(7, 2)));
    }
}
