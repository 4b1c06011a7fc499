//! Convex-region decomposition and monotone view tables.
//!
//! A maximal convex region is a maximal run of consecutive convex vertices,
//! flanked cyclically by reflex vertices. For a vertex `v` and region `C`,
//! `first(v, C)` / `last(v, C)` are the smallest / largest vertices of `C`
//! visible from `v`. Two structural facts underpin the whole reduction and
//! are checked, never assumed: the vertices of `C` seen by `v` form a
//! contiguous interval, and the view sequences along any source element are
//! monotone.

use std::fmt;

use crate::geom::{Polygon, VisibilityTable};

/// Contiguous run `[lo..hi]` of convex vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexRegion {
    pub lo: usize,
    pub hi: usize,
}

impl ConvexRegion {
    pub fn contains(&self, id: usize) -> bool {
        self.lo <= id && id <= self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for ConvexRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A source element of the reduction: a maximal convex region (by index into
/// the decomposition) or a reflex vertex (by vertex id).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Region(usize),
    Reflex(usize),
}

/// Maximal convex regions plus the reflex vertex list, with the canonical
/// element order: regions by `lo` ascending, then reflex vertices ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionDecomposition {
    pub regions: Vec<ConvexRegion>,
    pub reflex: Vec<usize>,
}

/// Signal that a polygon has no reflex vertex; the solver handles this case
/// separately and never decomposes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexPolygon;

impl fmt::Display for ConvexPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "polygon is convex; no region decomposition")
    }
}

impl std::error::Error for ConvexPolygon {}

impl RegionDecomposition {
    pub fn element_count(&self) -> usize {
        self.regions.len() + self.reflex.len()
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.element_count());
        out.extend((0..self.regions.len()).map(Element::Region));
        out.extend(self.reflex.iter().copied().map(Element::Reflex));
        out
    }

    pub fn element(&self, ordinal: usize) -> Element {
        if ordinal < self.regions.len() {
            Element::Region(ordinal)
        } else {
            Element::Reflex(self.reflex[ordinal - self.regions.len()])
        }
    }

    /// Vertex ids housed by an element.
    pub fn element_ids(&self, e: Element) -> Vec<usize> {
        match e {
            Element::Region(r) => self.regions[r].ids().collect(),
            Element::Reflex(v) => vec![v],
        }
    }

    pub fn display_element(&self, e: Element) -> String {
        match e {
            Element::Region(r) => self.regions[r].to_string(),
            Element::Reflex(v) => format!("r{v}"),
        }
    }
}

/// Splits a canonical polygon into maximal convex regions. Because vertex 1
/// is reflex, regions never wrap around the index cycle.
pub fn decompose(poly: &Polygon) -> Result<RegionDecomposition, ConvexPolygon> {
    if poly.reflex_count() == 0 {
        return Err(ConvexPolygon);
    }
    debug_assert!(poly.is_reflex(1), "canonical polygon starts at a reflex vertex");
    let mut regions = Vec::new();
    let mut run_start: Option<usize> = None;
    for id in 2..=poly.n() {
        if poly.is_reflex(id) {
            if let Some(lo) = run_start.take() {
                regions.push(ConvexRegion { lo, hi: id - 1 });
            }
        } else if run_start.is_none() {
            run_start = Some(id);
        }
    }
    if let Some(lo) = run_start {
        regions.push(ConvexRegion { lo, hi: poly.n() });
    }
    let dec = RegionDecomposition {
        regions,
        reflex: poly.reflex_ids().to_vec(),
    };
    debug_assert!(dec.regions.len() <= dec.reflex.len());
    Ok(dec)
}

/// First/last visible vertex per (vertex, region) pair; `None` when the
/// vertex sees nothing in the region.
#[derive(Debug, Clone)]
pub struct ViewTable {
    /// Indexed `[vertex id - 1][region index]`.
    pub first: Vec<Vec<Option<usize>>>,
    pub last: Vec<Vec<Option<usize>>>,
}

impl ViewTable {
    pub fn first_of(&self, v: usize, region: usize) -> Option<usize> {
        self.first[v - 1][region]
    }

    pub fn last_of(&self, v: usize, region: usize) -> Option<usize> {
        self.last[v - 1][region]
    }
}

/// Builds the full view table: first/last over all vertices of each region.
pub fn view_table(poly: &Polygon, dec: &RegionDecomposition, vis: &VisibilityTable) -> ViewTable {
    let all: Vec<usize> = (1..=poly.n()).collect();
    view_table_over(poly, dec, vis, &all)
}

/// Builds a view table restricted to a vertex subset: `first(v, C)` becomes
/// the smallest vertex of `C ∩ subset` seen by `v`. The boundary-variant
/// solvers use this with the subset of coverage targets; with the full
/// vertex set it coincides with `view_table`.
pub fn view_table_over(
    poly: &Polygon,
    dec: &RegionDecomposition,
    vis: &VisibilityTable,
    subset: &[usize],
) -> ViewTable {
    let n = poly.n();
    let region_count = dec.regions.len();
    let mut first = vec![vec![None; region_count]; n];
    let mut last = vec![vec![None; region_count]; n];
    for v in 1..=n {
        for (r, region) in dec.regions.iter().enumerate() {
            let mut lo = None;
            let mut hi = None;
            for &t in subset {
                if region.contains(t) && vis.sees(v, t) {
                    if lo.is_none() {
                        lo = Some(t);
                    }
                    hi = Some(t);
                }
            }
            first[v - 1][r] = lo;
            last[v - 1][r] = hi;
        }
    }
    ViewTable { first, last }
}

/// Checks that every non-empty view is an unbroken interval: `v` sees every
/// vertex between `first(v, C)` and `last(v, C)`. True for any valid simple
/// polygon; a false return means the visibility table is inconsistent.
pub fn check_contiguity(vt: &ViewTable, vis: &VisibilityTable, dec: &RegionDecomposition) -> bool {
    for v in 1..=vt.first.len() {
        for r in 0..dec.regions.len() {
            if let (Some(f), Some(l)) = (vt.first_of(v, r), vt.last_of(v, r)) {
                if (f..=l).any(|t| !vis.sees(v, t)) {
                    return false;
                }
            } else if vt.first_of(v, r).is_some() != vt.last_of(v, r).is_some() {
                return false;
            }
        }
    }
    true
}

/// Direction of a monotone view sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    NonDecreasing,
    NonIncreasing,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::NonDecreasing => write!(f, "nondecreasing"),
            Orientation::NonIncreasing => write!(f, "nonincreasing"),
        }
    }
}

/// A view sequence that is neither non-decreasing nor non-increasing. This
/// cannot happen for view tables computed from a valid simple polygon, so it
/// signals a geometry bug.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotMonotone {
    pub source: String,
    pub region: usize,
}

impl fmt::Display for NotMonotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "view of region #{} from {} is not monotone",
            self.region, self.source
        )
    }
}

impl std::error::Error for NotMonotone {}

/// True when the sequence satisfies the monotone-view definition in the
/// given sense: the non-nil entries are sorted accordingly, and no nil
/// occurs between two equal non-nil values.
fn view_sequence_monotone(seq: &[Option<usize>], non_decreasing: bool) -> bool {
    let support: Vec<(usize, usize)> = seq
        .iter()
        .enumerate()
        .filter_map(|(pos, v)| v.map(|val| (pos, val)))
        .collect();
    for w in support.windows(2) {
        let ((p1, v1), (p2, v2)) = (w[0], w[1]);
        let ordered = if non_decreasing { v1 <= v2 } else { v1 >= v2 };
        if !ordered {
            return false;
        }
        if v1 == v2 && p2 > p1 + 1 {
            return false;
        }
    }
    true
}

/// Classifies how element `e` views region `target` in both the first and
/// the last sense. Reflex sources are non-decreasing in both senses by
/// convention; sequences satisfying both definitions report non-decreasing.
pub fn classify_view(
    vt: &ViewTable,
    dec: &RegionDecomposition,
    e: Element,
    target: usize,
) -> Result<(Orientation, Orientation), NotMonotone> {
    let source = match e {
        Element::Reflex(_) => {
            return Ok((Orientation::NonDecreasing, Orientation::NonDecreasing))
        }
        Element::Region(r) => dec.regions[r],
    };
    let first_seq: Vec<Option<usize>> =
        source.ids().map(|v| vt.first_of(v, target)).collect();
    let last_seq: Vec<Option<usize>> = source.ids().map(|v| vt.last_of(v, target)).collect();
    let classify = |seq: &[Option<usize>]| -> Option<Orientation> {
        if view_sequence_monotone(seq, true) {
            Some(Orientation::NonDecreasing)
        } else if view_sequence_monotone(seq, false) {
            Some(Orientation::NonIncreasing)
        } else {
            None
        }
    };
    let err = || NotMonotone {
        source: dec.display_element(e),
        region: target,
    };
    let f = classify(&first_seq).ok_or_else(err)?;
    let l = classify(&last_seq).ok_or_else(err)?;
    Ok((f, l))
}

/// View orientations for every (element, region) pair.
#[derive(Debug, Clone)]
pub struct Orientations {
    /// Indexed `[element ordinal][region index]`.
    pub first: Vec<Vec<Orientation>>,
    pub last: Vec<Vec<Orientation>>,
}

impl Orientations {
    pub fn first_of(&self, element_ordinal: usize, region: usize) -> Orientation {
        self.first[element_ordinal][region]
    }

    pub fn last_of(&self, element_ordinal: usize, region: usize) -> Orientation {
        self.last[element_ordinal][region]
    }
}

/// Classifies every (element, region) pair of the decomposition.
pub fn classify_all(
    vt: &ViewTable,
    dec: &RegionDecomposition,
) -> Result<Orientations, NotMonotone> {
    let elements = dec.elements();
    let mut first = Vec::with_capacity(elements.len());
    let mut last = Vec::with_capacity(elements.len());
    for &e in &elements {
        let mut fe = Vec::with_capacity(dec.regions.len());
        let mut le = Vec::with_capacity(dec.regions.len());
        for r in 0..dec.regions.len() {
            let (f, l) = classify_view(vt, dec, e, r)?;
            fe.push(f);
            le.push(l);
        }
        first.push(fe);
        last.push(le);
    }
    Ok(Orientations { first, last })
}

/// Debug dump: one line per (element, region) with both orientations.
pub fn dump_orientations(dec: &RegionDecomposition, orients: &Orientations) -> String {
    let mut out = String::new();
    for (ord, e) in dec.elements().into_iter().enumerate() {
        for r in 0..dec.regions.len() {
            out.push_str(&format!(
                "{} {} {} {}\n",
                dec.display_element(e),
                dec.regions[r],
                orients.first_of(ord, r),
                orients.last_of(ord, r),
            ));
        }
    }
    out
}

/// Debug dump of the full first/last tables.
pub fn dump_view_table(dec: &RegionDecomposition, vt: &ViewTable) -> String {
    let fmt_entry = |v: Option<usize>| match v {
        Some(id) => id.to_string(),
        None => "nil".to_string(),
    };
    let mut out = String::new();
    for v in 1..=vt.first.len() {
        for r in 0..dec.regions.len() {
            out.push_str(&format!(
                "{} {} {} {}\n",
                v,
                dec.regions[r],
                fmt_entry(vt.first_of(v, r)),
                fmt_entry(vt.last_of(v, r)),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, three_region_polygon};
    use crate::geom::vertex_visibility;

    #[test]
    fn l_shape_decomposes_into_one_region() {
        let l = l_shape();
        let dec = decompose(&l).unwrap();
        assert_eq!(dec.regions, vec![ConvexRegion { lo: 2, hi: 6 }]);
        assert_eq!(dec.reflex, vec![1]);
        assert_eq!(dec.elements().len(), 2);
    }

    #[test]
    fn three_region_fixture_decomposes_as_expected() {
        let p = three_region_polygon();
        assert_eq!(p.reflex_ids(), &[1, 8, 10, 11, 12]);
        let dec = decompose(&p).unwrap();
        assert_eq!(
            dec.regions,
            vec![
                ConvexRegion { lo: 2, hi: 7 },
                ConvexRegion { lo: 9, hi: 9 },
                ConvexRegion { lo: 13, hi: 17 },
            ]
        );
    }

    #[test]
    fn convex_polygon_signals_shortcut() {
        assert_eq!(decompose(&crate::fixtures::square()), Err(ConvexPolygon));
    }

    #[test]
    fn l_shape_view_table_matches_hand_computation() {
        let l = l_shape();
        let dec = decompose(&l).unwrap();
        let vis = vertex_visibility(&l);
        let vt = view_table(&l, &dec, &vis);
        // The reflex vertex sees the whole region.
        assert_eq!(vt.first_of(1, 0), Some(2));
        assert_eq!(vt.last_of(1, 0), Some(6));
        // Hand-derived views of [2,6] onto itself.
        let first: Vec<_> = (2..=6).map(|v| vt.first_of(v, 0).unwrap()).collect();
        let last: Vec<_> = (2..=6).map(|v| vt.last_of(v, 0).unwrap()).collect();
        assert_eq!(first, vec![2, 2, 2, 3, 4]);
        assert_eq!(last, vec![4, 5, 6, 6, 6]);
    }

    #[test]
    fn view_table_brackets_self() {
        let p = three_region_polygon();
        let dec = decompose(&p).unwrap();
        let vis = vertex_visibility(&p);
        let vt = view_table(&p, &dec, &vis);
        for (r, region) in dec.regions.iter().enumerate() {
            for v in region.ids() {
                assert!(vt.first_of(v, r).unwrap() <= v);
                assert!(vt.last_of(v, r).unwrap() >= v);
            }
        }
    }

    #[test]
    fn contiguity_holds_and_detects_corruption() {
        let l = l_shape();
        let dec = decompose(&l).unwrap();
        let mut vis = vertex_visibility(&l);
        let vt = view_table(&l, &dec, &vis);
        assert!(check_contiguity(&vt, &vis, &dec));
        // Clear a visibility bit strictly inside the reflex vertex's view.
        vis.corrupt(1, 4, false);
        assert!(!check_contiguity(&vt, &vis, &dec));
    }

    #[test]
    fn l_shape_views_classify_non_decreasing() {
        let l = l_shape();
        let dec = decompose(&l).unwrap();
        let vis = vertex_visibility(&l);
        let vt = view_table(&l, &dec, &vis);
        let (f, l_or) = classify_view(&vt, &dec, Element::Region(0), 0).unwrap();
        assert_eq!(f, Orientation::NonDecreasing);
        assert_eq!(l_or, Orientation::NonDecreasing);
        // Reflex convention.
        let (f, l_or) = classify_view(&vt, &dec, Element::Reflex(1), 0).unwrap();
        assert_eq!(f, Orientation::NonDecreasing);
        assert_eq!(l_or, Orientation::NonDecreasing);
    }

    #[test]
    fn every_pair_classifies_on_the_fixture() {
        let p = three_region_polygon();
        let dec = decompose(&p).unwrap();
        let vis = vertex_visibility(&p);
        let vt = view_table(&p, &dec, &vis);
        assert!(check_contiguity(&vt, &vis, &dec));
        let orients = classify_all(&vt, &dec).expect("views must be monotone");
        let dump = dump_orientations(&dec, &orients);
        // 8 elements (3 regions + 5 reflex) x 3 regions.
        assert_eq!(dump.lines().count(), 24);
    }

    #[test]
    fn single_vertex_region_ties_to_non_decreasing() {
        let p = three_region_polygon();
        let dec = decompose(&p).unwrap();
        let vis = vertex_visibility(&p);
        let vt = view_table(&p, &dec, &vis);
        // Region [9,9] is a single vertex: constant views, tie-broken.
        for r in 0..dec.regions.len() {
            let (f, l) = classify_view(&vt, &dec, Element::Region(1), r).unwrap();
            assert_eq!(f, Orientation::NonDecreasing);
            assert_eq!(l, Orientation::NonDecreasing);
        }
    }

    #[test]
    fn l_shape_view_table_dump_golden() {
        let l = l_shape();
        let dec = decompose(&l).unwrap();
        let vis = vertex_visibility(&l);
        let vt = view_table(&l, &dec, &vis);
        let golden = "\
1 [2,6] 2 6
2 [2,6] 2 4
3 [2,6] 2 5
4 [2,6] 2 6
5 [2,6] 3 6
6 [2,6] 4 6
";
        assert_eq!(dump_view_table(&dec, &vt), golden);
        let orients = classify_all(&vt, &dec).unwrap();
        let golden = "\
[2,6] [2,6] nondecreasing nondecreasing
r1 [2,6] nondecreasing nondecreasing
";
        assert_eq!(dump_orientations(&dec, &orients), golden);
    }

    #[test]
    fn monotone_sequence_rules() {
        // Nil between equal values violates the definition.
        let seq = vec![Some(3), None, Some(3)];
        assert!(!view_sequence_monotone(&seq, true));
        assert!(!view_sequence_monotone(&seq, false));
        // Nil between distinct values is fine.
        let seq = vec![Some(3), None, Some(5)];
        assert!(view_sequence_monotone(&seq, true));
        assert!(!view_sequence_monotone(&seq, false));
        // All-nil is vacuously monotone both ways.
        assert!(view_sequence_monotone(&[None, None], true));
        assert!(view_sequence_monotone(&[None, None], false));
    }

    #[test]
    fn restricted_views_subset_full_views() {
        let p = three_region_polygon();
        let dec = decompose(&p).unwrap();
        let vis = vertex_visibility(&p);
        let full = view_table(&p, &dec, &vis);
        let targets: Vec<usize> = (1..=p.n()).filter(|v| v % 2 == 1).collect();
        let restricted = view_table_over(&p, &dec, &vis, &targets);
        for v in 1..=p.n() {
            for r in 0..dec.regions.len() {
                if let Some(f) = restricted.first_of(v, r) {
                    assert!(f % 2 == 1);
                    assert!(full.first_of(v, r).unwrap() <= f);
                    assert!(f <= full.last_of(v, r).unwrap());
                }
            }
        }
        // Restricted views stay monotone.
        assert!(classify_all(&restricted, &dec).is_ok());
    }
}
