//! Point-in-polygon and point-to-point visibility, exact over rationals.
//!
//! Visibility is closed: a segment that runs along the boundary or grazes a
//! reflex corner is inside. The membership test is exact ray casting; when a
//! vertex lands on the ray's supporting line the ray is re-cast with the next
//! rational direction until none does, which always terminates because every
//! vertex rules out at most one direction.

use num_traits::Zero;

use super::{on_segment, proper_crossing, segment_intersection, Point, Polygon, SegIntersection};
use crate::rational::{rat, sign, Rat};

/// True when `p` lies in the closed interior of the polygon (boundary
/// included).
pub fn contains(poly: &Polygon, p: &Point) -> bool {
    for (a, b) in poly.edges() {
        if on_segment(p, a, b) {
            return true;
        }
    }
    // p is strictly off the boundary. Cast a ray in direction (1, m), m = 0,
    // 1, 2, ... until no vertex lies on the supporting line.
    let mut m: i64 = 0;
    'dirs: loop {
        let dir = Point::new(rat(1), rat(m));
        for v in poly.points() {
            let rel = Point::new(&v.x - &p.x, &v.y - &p.y);
            if (&dir.x * &rel.y - &dir.y * &rel.x).is_zero() {
                m += 1;
                continue 'dirs;
            }
        }
        let mut crossings = 0usize;
        for (a, b) in poly.edges() {
            let sa = sign(&(&dir.x * &(&a.y - &p.y) - &dir.y * &(&a.x - &p.x)));
            let sb = sign(&(&dir.x * &(&b.y - &p.y) - &dir.y * &(&b.x - &p.x)));
            // No vertex on the line, so both signs are nonzero.
            if sa * sb < 0 {
                // Edge straddles the line; count it when the crossing is on
                // the forward ray: solve p + s*dir = a + u*(b-a) for s.
                let ex = &b.x - &a.x;
                let ey = &b.y - &a.y;
                let denom = &dir.x * &ey - &dir.y * &ex;
                let s = (&(&a.x - &p.x) * &ey - &(&a.y - &p.y) * &ex) / denom;
                if s > Rat::zero() {
                    crossings += 1;
                }
            }
        }
        return crossings % 2 == 1;
    }
}

/// True when every point of the closed segment `pq` lies in the closed
/// interior of the polygon. Symmetric, and `sees(p, p)` holds for any `p`
/// within the polygon.
pub fn sees(poly: &Polygon, p: &Point, q: &Point) -> bool {
    if p == q {
        return contains(poly, p);
    }
    // Split pq at every edge intersection; between consecutive split points
    // the segment stays on one side of the boundary, so testing each
    // sub-midpoint decides membership for the whole segment.
    let mut params: Vec<Rat> = vec![Rat::zero(), rat(1)];
    for (a, b) in poly.edges() {
        if proper_crossing(p, q, a, b) {
            // The boundary is crossed transversally at an interior point of
            // an edge, so pq leaves the polygon.
            return false;
        }
        match segment_intersection(p, q, a, b) {
            SegIntersection::None => {}
            SegIntersection::At { t, .. } => params.push(t),
            SegIntersection::Overlap { t0, t1 } => {
                params.push(t0);
                params.push(t1);
            }
        }
    }
    params.sort();
    params.dedup();
    let two = rat(2);
    for w in params.windows(2) {
        let mid_t = (&w[0] + &w[1]) / &two;
        let m = Point::new(
            &p.x + &(&q.x - &p.x) * &mid_t,
            &p.y + &(&q.y - &p.y) * &mid_t,
        );
        if !contains(poly, &m) {
            return false;
        }
    }
    true
}

/// Symmetric visibility matrix over an arbitrary list of boundary points,
/// addressed 1-based to match vertex ids when the candidates are the
/// polygon's vertices.
#[derive(Debug, Clone)]
pub struct VisibilityTable {
    size: usize,
    bits: Vec<bool>,
}

impl VisibilityTable {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Visibility between candidates `i` and `j` (1-based).
    pub fn sees(&self, i: usize, j: usize) -> bool {
        self.bits[(i - 1) * self.size + (j - 1)]
    }

    /// Test hook: flip one (symmetric) entry. Used to exercise the
    /// diagnostics that detect inconsistent tables.
    pub fn corrupt(&mut self, i: usize, j: usize, value: bool) {
        self.bits[(i - 1) * self.size + (j - 1)] = value;
        self.bits[(j - 1) * self.size + (i - 1)] = value;
    }

    /// Test hook: an all-true table, for synthetic constraint-builder
    /// inputs that bypass real geometry.
    #[cfg(test)]
    pub(crate) fn all_true(size: usize) -> VisibilityTable {
        VisibilityTable {
            size,
            bits: vec![true; size * size],
        }
    }
}

/// Memoizes `sees` over all candidate pairs. Rows can be computed in any
/// order; the result is deterministic.
pub fn visibility_table(poly: &Polygon, candidates: &[Point]) -> VisibilityTable {
    let size = candidates.len();
    let mut bits = vec![false; size * size];
    for i in 0..size {
        bits[i * size + i] = true;
        for j in (i + 1)..size {
            let v = sees(poly, &candidates[i], &candidates[j]);
            bits[i * size + j] = v;
            bits[j * size + i] = v;
        }
    }
    VisibilityTable { size, bits }
}

/// Visibility table over the polygon's own vertices.
pub fn vertex_visibility(poly: &Polygon) -> VisibilityTable {
    visibility_table(poly, poly.points())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;
    use crate::rational::ratio;

    fn square() -> Polygon {
        Polygon::validate(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).unwrap()
    }

    fn l_shape() -> Polygon {
        Polygon::validate(vec![
            pt(0, 0),
            pt(2, 0),
            pt(2, 1),
            pt(1, 1),
            pt(1, 2),
            pt(0, 2),
        ])
        .unwrap()
    }

    fn deep_l() -> Polygon {
        Polygon::validate(vec![
            pt(0, 0),
            pt(3, 0),
            pt(3, 1),
            pt(1, 1),
            pt(1, 3),
            pt(0, 3),
        ])
        .unwrap()
    }

    /// Independent membership oracle for segments: sample many evenly spaced
    /// rational points and test each with `contains`. Decisive for the
    /// integer-coordinate fixtures used here.
    fn segment_inside_sampled(poly: &Polygon, p: &Point, q: &Point, steps: i64) -> bool {
        for i in 0..=steps {
            let t = ratio(i, steps);
            let m = Point::new(
                &p.x + &(&q.x - &p.x) * &t,
                &p.y + &(&q.y - &p.y) * &t,
            );
            if !contains(poly, &m) {
                return false;
            }
        }
        true
    }

    #[test]
    fn contains_classifies_square_points() {
        let s = square();
        assert!(contains(&s, &Point::new(ratio(1, 2), ratio(1, 2))));
        assert!(contains(&s, &pt(0, 0)));
        assert!(contains(&s, &Point::new(ratio(1, 2), rat(0))));
        assert!(!contains(&s, &pt(2, 0)));
        assert!(!contains(&s, &Point::new(ratio(1, 2), ratio(3, 2))));
        assert!(!contains(&s, &Point::new(ratio(-1, 2), ratio(1, 2))));
    }

    #[test]
    fn contains_handles_notch() {
        let l = l_shape();
        assert!(!contains(&l, &Point::new(ratio(3, 2), ratio(3, 2))));
        assert!(contains(&l, &Point::new(ratio(1, 2), ratio(3, 2))));
        assert!(contains(&l, &pt(1, 1)));
        assert!(contains(&l, &Point::new(ratio(3, 2), rat(1))));
    }

    #[test]
    fn square_corners_see_each_other() {
        let s = square();
        assert!(sees(&s, &pt(0, 0), &pt(1, 1)));
        assert!(sees(&s, &pt(1, 0), &pt(0, 1)));
        assert!(sees(&s, &pt(0, 0), &pt(0, 0)));
    }

    #[test]
    fn grazing_the_reflex_corner_is_visible() {
        let l = l_shape();
        // (2,0)-(0,2) passes exactly through the reflex corner (1,1) and
        // stays inside.
        assert!(sees(&l, &pt(2, 0), &pt(0, 2)));
        assert!(segment_inside_sampled(&l, &pt(2, 0), &pt(0, 2), 64));
    }

    #[test]
    fn deeper_notch_blocks_the_diagonal() {
        let d = deep_l();
        assert!(!sees(&d, &pt(3, 0), &pt(0, 3)));
        assert!(!segment_inside_sampled(&d, &pt(3, 0), &pt(0, 3), 64));
    }

    #[test]
    fn sees_agrees_with_sampling_on_l_vertex_pairs() {
        let l = l_shape();
        let pts = l.points().to_vec();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert_eq!(
                    sees(&l, &pts[i], &pts[j]),
                    segment_inside_sampled(&l, &pts[i], &pts[j], 60),
                    "vertices {} and {}",
                    i + 1,
                    j + 1
                );
            }
        }
    }

    #[test]
    fn sees_is_symmetric_and_scale_invariant() {
        let l = deep_l();
        let scaled: Vec<Point> = l
            .points()
            .iter()
            .map(|p| Point::new(&p.x * &ratio(7, 3) + &rat(11), &p.y * &ratio(7, 3) - &rat(5)))
            .collect();
        let l2 = Polygon::validate(scaled).unwrap();
        for i in 1..=l.n() {
            for j in 1..=l.n() {
                let a = sees(&l, l.point(i), l.point(j));
                assert_eq!(a, sees(&l, l.point(j), l.point(i)));
                assert_eq!(a, sees(&l2, l2.point(i), l2.point(j)));
            }
        }
    }

    #[test]
    fn square_table_is_all_true() {
        let s = square();
        let t = vertex_visibility(&s);
        for i in 1..=4 {
            for j in 1..=4 {
                assert!(t.sees(i, j));
            }
        }
    }

    #[test]
    fn l_table_reflex_row_is_all_true() {
        let l = l_shape();
        let t = vertex_visibility(&l);
        for j in 1..=6 {
            assert!(t.sees(1, j), "reflex vertex must see vertex {j}");
        }
        // Neighbors always see each other.
        for v in 1..=6 {
            assert!(t.sees(v, l.next_id(v)));
            assert!(t.sees(v, l.prev_id(v)));
        }
        // Across the notch: (1,2) does not see (2,0).
        let a = l.vertex_id_at(&pt(1, 2)).unwrap();
        let b = l.vertex_id_at(&pt(2, 0)).unwrap();
        assert!(!t.sees(a, b));
    }
}
