//! Shared polygon fixtures for tests.

use crate::geom::{pt, Point, Polygon};
use crate::rational::{rat, ratio};

pub fn square() -> Polygon {
    Polygon::validate(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).unwrap()
}

/// The standard L: one reflex vertex at (1,1), canonical id 1.
pub fn l_shape() -> Polygon {
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

/// 17-gon with reflex vertices at ids 1, 8, 10, 11, 12 after
/// canonicalization: a bowl with a dent on the left (vertex 1), a dent on
/// the upper right (8), and a hook-shaped channel carved into the top
/// (10-12). Decomposes into regions [2,7], [9], [13,17].
pub fn three_region_polygon() -> Polygon {
    Polygon::validate(vec![
        pt(1, 5),   // 1  reflex
        pt(0, 0),   // 2
        pt(4, -1),  // 3
        pt(8, -1),  // 4
        pt(12, 0),  // 5
        pt(12, 8),  // 6
        pt(11, 10), // 7
        pt(10, 8),  // 8  reflex
        pt(8, 10),  // 9
        pt(8, 4),   // 10 reflex
        pt(5, 4),   // 11 reflex
        pt(5, 7),   // 12 reflex
        pt(6, 7),   // 13
        pt(6, 10),  // 14
        pt(4, 11),  // 15
        pt(2, 11),  // 16
        pt(0, 10),  // 17
    ])
    .unwrap()
}

/// Star-shaped fan around the boundary vertex (0,-1): two reflex valleys at
/// (±1,1), so r = 2 while a single guard at the fan apex covers every
/// vertex.
pub fn fan_star() -> Polygon {
    Polygon::validate(vec![
        pt(0, -1),
        pt(5, 0),
        pt(1, 1),
        pt(0, 5),
        pt(-1, 1),
        pt(-5, 0),
    ])
    .unwrap()
}

/// Rectangle with three slit wedges carved from the top edge, their walls
/// lying on rays through the bottom apex (12,-1). The apex sees every
/// vertex (each ray is boundary or clear), while every reflex slit tip is
/// blinded by a neighboring wedge: k = 1 suffices although r = 6, and the
/// only single-guard witness is the convex apex.
pub fn slit_comb() -> Polygon {
    let p = |x: (i64, i64), y: i64| Point::new(ratio(x.0, x.1), rat(y));
    Polygon::validate(vec![
        pt(0, 0),
        pt(12, -1), // apex
        pt(24, 0),
        pt(24, 16),
        pt(19, 16),
        p((267, 17), 8), // slit 3 right tip (reflex)
        p((249, 17), 8), // slit 3 left tip (reflex)
        pt(17, 16),
        pt(13, 16),
        p((211, 17), 6), // slit 2 right tip (reflex)
        p((197, 17), 6), // slit 2 left tip (reflex)
        pt(11, 16),
        pt(7, 16),
        p((159, 17), 8), // slit 1 right tip (reflex)
        p((141, 17), 8), // slit 1 left tip (reflex)
        pt(5, 16),
        pt(0, 16),
    ])
    .unwrap()
}

/// A rational point helper for tests.
pub fn point(x: i64, y: i64) -> Point {
    Point::new(rat(x), rat(y))
}
