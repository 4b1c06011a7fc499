//! Independent brute-force machinery used to certify the solver: a
//! subset-enumeration oracle, a direct checker for the structured
//! conditions, and a seeded random polygon generator.
//!
//! Nothing here shares code with the reduction pipeline; that independence
//! is the point.

use std::fmt;
use std::str::FromStr;

use crate::geom::{pt, Point, Polygon, VisibilityTable};
use crate::regions::Element;
use crate::structured::{Guess, Problem, SolverTables, Variant};

/// SplitMix64: tiny deterministic PRNG, stable across platforms and
/// releases so seeded corpora never drift.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` by rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}

/// Request for a random polygon. `target_reflex` is best effort: the
/// generator retries and returns the closest reflex count it found.
#[derive(Debug, Clone)]
pub struct PolygonSpec {
    pub n: usize,
    pub target_reflex: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationFailed {
    pub n: usize,
    pub seed: u64,
}

impl fmt::Display for GenerationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "could not generate a simple polygon with n={} from seed {}",
            self.n, self.seed
        )
    }
}

impl std::error::Error for GenerationFailed {}

/// Generates a random simple polygon: random grid points untangled by
/// repeated 2-opt reversals of crossing edges. Deterministic per seed.
pub fn random_polygon(spec: &PolygonSpec) -> Result<Polygon, GenerationFailed> {
    assert!(spec.n >= 3);
    let mut rng = SplitMix64::new(spec.seed);
    let mut best: Option<(usize, Polygon)> = None;
    for _attempt in 0..64 {
        let Some(points) = draw_points(&mut rng, spec.n) else {
            continue;
        };
        let Some(points) = untangle(points) else {
            continue;
        };
        let Ok(poly) = Polygon::validate(points) else {
            continue;
        };
        let r = poly.reflex_count();
        match spec.target_reflex {
            None => return Ok(poly),
            Some(target) => {
                let gap = r.abs_diff(target);
                if gap == 0 {
                    return Ok(poly);
                }
                if best.as_ref().is_none_or(|(g, _)| gap < *g) {
                    best = Some((gap, poly));
                }
            }
        }
    }
    best.map(|(_, poly)| poly).ok_or(GenerationFailed {
        n: spec.n,
        seed: spec.seed,
    })
}

/// Distinct points on the odd-coordinate grid, which keeps axis-aligned
/// collinearity rare.
fn draw_points(rng: &mut SplitMix64, n: usize) -> Option<Vec<Point>> {
    let span = (2 * n) as u64;
    let mut points: Vec<(i64, i64)> = Vec::with_capacity(n);
    for _ in 0..4 * n {
        if points.len() == n {
            break;
        }
        let x = 2 * (rng.next_below(span) as i64) + 1;
        let y = 2 * (rng.next_below(span) as i64) + 1;
        if !points.contains(&(x, y)) {
            points.push((x, y));
        }
    }
    (points.len() == n).then(|| points.into_iter().map(|(x, y)| pt(x, y)).collect())
}

/// Repeatedly reverses the sub-path between properly crossing edges until
/// the closed tour is simple. Degenerate contacts (touching or collinear
/// overlaps) abandon the draw.
fn untangle(mut points: Vec<Point>) -> Option<Vec<Point>> {
    use crate::geom::{proper_crossing, segment_intersection, SegIntersection};
    let n = points.len();
    let budget = 16 * n * n;
    for _ in 0..budget {
        let mut crossing: Option<(usize, usize)> = None;
        'scan: for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a1, b1) = (&points[i], &points[(i + 1) % n]);
                let (a2, b2) = (&points[j], &points[(j + 1) % n]);
                if proper_crossing(a1, b1, a2, b2) {
                    crossing = Some((i, j));
                    break 'scan;
                }
                if segment_intersection(a1, b1, a2, b2) != SegIntersection::None {
                    // Touching contact; 2-opt cannot fix it.
                    return None;
                }
            }
        }
        match crossing {
            None => return Some(points),
            Some((i, j)) => points[i + 1..=j].reverse(),
        }
    }
    None
}

/// Result of a brute-force solve: the lexicographically first witness among
/// subsets enumerated by ascending size, and how many subsets were tested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub witness: Option<Vec<usize>>,
    pub explored: u64,
}

impl OracleResult {
    pub fn is_yes(&self) -> bool {
        self.witness.is_some()
    }
}

/// Hard limits keeping the oracle honest: exceeding them is an error, not a
/// truncated search.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    pub max_candidates: usize,
    pub max_k: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_candidates: 24,
            max_k: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooLarge {
    pub candidates: usize,
    pub k: usize,
}

impl fmt::Display for TooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance exceeds oracle caps: {} candidates, k={}",
            self.candidates, self.k
        )
    }
}

impl std::error::Error for TooLarge {}

/// Exhaustively tests all candidate subsets of size at most `k` against the
/// coverage targets.
pub fn brute_force(
    poly: &Polygon,
    k: usize,
    variant: Variant,
    caps: &OracleCaps,
) -> Result<OracleResult, TooLarge> {
    let problem = Problem::build(poly, variant).expect("valid polygon");
    let vis = crate::geom::vertex_visibility(&problem.work);
    brute_force_problem(&problem, &vis, k, caps)
}

/// Subset enumeration against a prebuilt problem and visibility table.
pub fn brute_force_problem(
    problem: &Problem,
    vis: &VisibilityTable,
    k: usize,
    caps: &OracleCaps,
) -> Result<OracleResult, TooLarge> {
    if problem.candidates.len() > caps.max_candidates || k > caps.max_k {
        return Err(TooLarge {
            candidates: problem.candidates.len(),
            k,
        });
    }
    let mut explored = 0u64;
    let mut subset: Vec<usize> = Vec::new();
    for size in 0..=k.min(problem.candidates.len()) {
        if let Some(witness) =
            search(problem, vis, &mut subset, 0, size, &mut explored)
        {
            return Ok(OracleResult {
                witness: Some(witness),
                explored,
            });
        }
    }
    Ok(OracleResult {
        witness: None,
        explored,
    })
}

fn search(
    problem: &Problem,
    vis: &VisibilityTable,
    subset: &mut Vec<usize>,
    from: usize,
    size: usize,
    explored: &mut u64,
) -> Option<Vec<usize>> {
    if subset.len() == size {
        *explored += 1;
        if problem.certify(vis, subset) {
            return Some(subset.clone());
        }
        return None;
    }
    for idx in from..problem.candidates.len() {
        subset.push(problem.candidates[idx]);
        let hit = search(problem, vis, subset, idx + 1, size, explored);
        subset.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Directly checks the structured conditions for a guard set against a
/// guess: placement counts per element, reflex targets seen by their
/// nominated guards, and per-region coverage (first target, gap-free
/// strictly advancing middle slots, last target). Shares no code with the
/// constraint builder.
pub fn check_structured_conditions(
    tables: &SolverTables,
    k: usize,
    guess: &Guess,
    guards: &[usize],
) -> bool {
    if guards.len() > k {
        return false;
    }
    if guards
        .iter()
        .any(|g| tables.cand.index_of(*g).is_none())
    {
        return false;
    }
    let elements = tables.dec.elements();

    // Condition 1: |S ∩ x| = ig(x); name the i-th smallest as s_(x,i).
    let mut housed: Vec<Vec<usize>> = Vec::with_capacity(elements.len());
    for &e in &elements {
        let ids = tables.dec.element_ids(e);
        let mut inside: Vec<usize> = guards
            .iter()
            .copied()
            .filter(|g| ids.contains(g))
            .collect();
        inside.sort_unstable();
        housed.push(inside);
    }
    for (ord, inside) in housed.iter().enumerate() {
        if inside.len() != guess.ig[ord] {
            return false;
        }
    }
    let resolve = |(ord, i): (usize, usize)| -> Option<usize> {
        housed.get(ord)?.get(i.checked_sub(1)?).copied()
    };

    // Condition 2: each reflex target's nominated guard sees it.
    for (ord, &e) in elements.iter().enumerate() {
        let y = match e {
            Element::Reflex(v) if tables.targets.is_target(v) => v,
            _ => continue,
        };
        if guess.og[ord] != 1 {
            return false;
        }
        match resolve(guess.how[ord][0]) {
            Some(s) => {
                if !tables.vis.sees(s, y) {
                    return false;
                }
            }
            None => return false,
        }
    }

    // Condition 3 per covered region.
    for (r, region) in tables.dec.regions.iter().enumerate() {
        let og = guess.og[r];
        let (lo, hi) = match (tables.targets.min_in(region), tables.targets.max_in(region)) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                if og != 0 {
                    return false;
                }
                continue;
            }
        };
        if og == 0 {
            return false;
        }
        let slots: Option<Vec<usize>> = guess.how[r].iter().map(|&p| resolve(p)).collect();
        let Some(slots) = slots else {
            return false;
        };
        // (a) the first slot sees the smallest target.
        if tables.tgt.first_of(slots[0], r) != Some(lo) {
            return false;
        }
        // (c) the last slot sees the largest target.
        if tables.tgt.last_of(slots[og - 1], r) != Some(hi) {
            return false;
        }
        // (b) middles: no target gap, strictly advancing coverage.
        for t in 1..og {
            let i = tables.tgt.last_of(slots[t - 1], r);
            let j = tables.tgt.first_of(slots[t], r);
            let q = tables.tgt.last_of(slots[t], r);
            let (Some(i), Some(j), Some(q)) = (i, j, q) else {
                return false;
            };
            // (i) the next target after i must not lie before j.
            if let Some(succ) = tables.targets.successor(i) {
                if j > succ {
                    return false;
                }
            }
            // (ii) coverage strictly advances.
            if i >= q {
                return false;
            }
        }
    }
    true
}

/// One corpus replay line: `seed n k variant yes|no`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCase {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub variant: Variant,
    pub expected_yes: bool,
}

impl fmt::Display for CorpusCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.seed,
            self.n,
            self.k,
            self.variant,
            if self.expected_yes { "yes" } else { "no" }
        )
    }
}

impl FromStr for CorpusCase {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut tok = line.split_whitespace();
        let mut next = || tok.next().ok_or_else(|| format!("short line `{line}`"));
        let seed = next()?.parse().map_err(|e| format!("{e}"))?;
        let n = next()?.parse().map_err(|e| format!("{e}"))?;
        let k = next()?.parse().map_err(|e| format!("{e}"))?;
        let variant: Variant = next()?.parse()?;
        let expected_yes = match next()? {
            "yes" => true,
            "no" => false,
            other => return Err(format!("bad answer `{other}`")),
        };
        Ok(CorpusCase {
            seed,
            n,
            k,
            variant,
            expected_yes,
        })
    }
}

pub fn write_manifest(cases: &[CorpusCase]) -> String {
    let mut out = String::new();
    for case in cases {
        out.push_str(&case.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<Vec<CorpusCase>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(CorpusCase::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, square};

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(43);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn three_points_make_a_triangle() {
        for seed in 0..10 {
            let poly = random_polygon(&PolygonSpec {
                n: 3,
                target_reflex: None,
                seed,
            })
            .unwrap();
            assert_eq!(poly.n(), 3);
            assert_eq!(poly.reflex_count(), 0);
        }
    }

    #[test]
    fn generated_polygons_validate() {
        for seed in 0..30 {
            let poly = random_polygon(&PolygonSpec {
                n: 10,
                target_reflex: None,
                seed,
            })
            .unwrap();
            assert_eq!(poly.n(), 10);
            // Re-validation from raw points succeeds.
            assert!(Polygon::validate(poly.points().to_vec()).is_ok());
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = PolygonSpec {
            n: 8,
            target_reflex: Some(2),
            seed: 7,
        };
        let a = random_polygon(&spec).unwrap();
        let b = random_polygon(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn square_single_guard_witness() {
        let res = brute_force(&square(), 1, Variant::VertexVertex, &OracleCaps::default())
            .unwrap();
        assert_eq!(res.witness, Some(vec![1]));
        // The empty subset was tried first.
        assert_eq!(res.explored, 2);
    }

    #[test]
    fn l_shape_answers() {
        let caps = OracleCaps::default();
        let l = l_shape();
        let yes = brute_force(&l, 1, Variant::VertexVertex, &caps).unwrap();
        assert_eq!(yes.witness, Some(vec![1]));
        let no = brute_force(&l, 0, Variant::VertexVertex, &caps).unwrap();
        assert_eq!(no.witness, None);
        // Boundary-Vertex: one boundary guard suffices.
        let bv = brute_force(&l, 1, Variant::BoundaryVertex, &caps).unwrap();
        assert!(bv.is_yes());
    }

    #[test]
    fn caps_are_hard_limits() {
        let err = brute_force(&square(), 6, Variant::VertexVertex, &OracleCaps::default());
        assert!(err.is_err());
    }

    #[test]
    fn structured_conditions_on_l_shape() {
        let problem = Problem::build(&l_shape(), Variant::VertexVertex).unwrap();
        let tables = SolverTables::build(&problem).unwrap();
        // Guard on the reflex vertex, covering everything.
        let guess = Guess {
            ig: vec![0, 1],
            og: vec![1, 1],
            how: vec![vec![(1, 1)], vec![(1, 1)]],
        };
        assert!(check_structured_conditions(&tables, 1, &guess, &[1]));
        // Wrong placement count.
        assert!(!check_structured_conditions(&tables, 1, &guess, &[2]));
        assert!(!check_structured_conditions(&tables, 2, &guess, &[1, 2]));
        // A guard that cannot see the region's first target: vertex 6
        // houses the guard but does not see vertex 2.
        let guess = Guess {
            ig: vec![1, 0],
            og: vec![1, 1],
            how: vec![vec![(0, 1)], vec![(0, 1)]],
        };
        assert!(!check_structured_conditions(&tables, 1, &guess, &[6]));
        // Vertex 4 sees the whole region and the reflex vertex.
        assert!(check_structured_conditions(&tables, 1, &guess, &[4]));
    }

    #[test]
    fn manifest_round_trip() {
        let cases = vec![
            CorpusCase {
                seed: 9,
                n: 8,
                k: 2,
                variant: Variant::VertexVertex,
                expected_yes: true,
            },
            CorpusCase {
                seed: 10,
                n: 6,
                k: 0,
                variant: Variant::BoundaryVertex,
                expected_yes: false,
            },
        ];
        let text = write_manifest(&cases);
        assert_eq!(parse_manifest(&text).unwrap(), cases);
        assert!(parse_manifest("1 2\n").is_err());
    }
}
