//! The solve driver: problem variants, the `k ≥ r` shortcut, enumeration of
//! structured guesses, dispatch to the constraint builder, and certification
//! of returned guard sets.
//!
//! A guess fixes, per element (maximal convex region or reflex vertex), how
//! many guards it houses (`ig`), how many guards cover it (`og`), and which
//! placed guard covers each stretch (`how`). The original instance is a Yes
//! iff some guess's monotone 2-CSP instance is satisfiable; guesses are
//! enumerated in a fixed lexicographic order so witnesses are deterministic
//! even under parallel evaluation.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use crate::csp::{solve_csp, CspInstance, CspOutcome};
use crate::geom::{
    essential_set, midpoint_refine, subdivide, vertex_visibility, GeomError, Polygon,
    VisibilityTable,
};
use crate::karp::{self, BuildOutcome};
use crate::regions::{
    classify_all, decompose, view_table, view_table_over, ConvexRegion, Element, NotMonotone,
    Orientation, Orientations, RegionDecomposition, ViewTable,
};

/// Which guard-location / coverage-target combination to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    VertexVertex,
    VertexBoundary,
    BoundaryVertex,
}

impl Variant {
    pub fn token(self) -> &'static str {
        match self {
            Variant::VertexVertex => "vv",
            Variant::VertexBoundary => "vb",
            Variant::BoundaryVertex => "bv",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vv" => Ok(Variant::VertexVertex),
            "vb" => Ok(Variant::VertexBoundary),
            "bv" => Ok(Variant::BoundaryVertex),
            other => Err(format!("unknown variant `{other}` (expected vv, vb or bv)")),
        }
    }
}

/// A variant instantiated on a concrete polygon: the working polygon (P
/// itself, or its subdivisions P1 / P2), the vertex ids where guards may be
/// placed, and the vertex ids that must be covered.
#[derive(Debug, Clone)]
pub struct Problem {
    pub variant: Variant,
    pub work: Polygon,
    /// Sorted work-vertex ids available for guard placement.
    pub candidates: Vec<usize>,
    /// Sorted work-vertex ids that must be seen.
    pub targets: Vec<usize>,
    /// For each work vertex, the original polygon vertex id it coincides
    /// with, if any.
    pub original_id: Vec<Option<usize>>,
}

impl Problem {
    pub fn build(poly: &Polygon, variant: Variant) -> Result<Problem, GeomError> {
        match variant {
            Variant::VertexVertex => {
                let all: Vec<usize> = (1..=poly.n()).collect();
                Ok(Problem {
                    variant,
                    work: poly.clone(),
                    candidates: all.clone(),
                    targets: all,
                    original_id: (1..=poly.n()).map(Some).collect(),
                })
            }
            Variant::BoundaryVertex => {
                // Guards anywhere on the boundary reduce to guards on P1's
                // vertices; only the original vertices need coverage.
                let p1 = subdivide(poly, &essential_set(poly))?;
                let targets = map_ids(poly, &p1);
                let original_id = originals(poly, &p1);
                Ok(Problem {
                    variant,
                    candidates: (1..=p1.n()).collect(),
                    targets,
                    original_id,
                    work: p1,
                })
            }
            Variant::VertexBoundary => {
                // Covering every vertex of P2 covers the whole boundary;
                // guards stay on the original vertices.
                let p1 = subdivide(poly, &essential_set(poly))?;
                let p2 = midpoint_refine(&p1)?;
                let candidates = map_ids(poly, &p2);
                let original_id = originals(poly, &p2);
                Ok(Problem {
                    variant,
                    candidates,
                    targets: (1..=p2.n()).collect(),
                    original_id,
                    work: p2,
                })
            }
        }
    }

    /// True iff every coverage target is seen by some guard. Independent of
    /// the CSP machinery: a direct scan of the visibility matrix.
    pub fn certify(&self, vis: &VisibilityTable, guards: &[usize]) -> bool {
        self.targets
            .iter()
            .all(|&t| guards.iter().any(|&g| vis.sees(g, t)))
    }

    /// The general annotated instance: guard candidates and coverage
    /// targets are arbitrary vertex subsets of the polygon itself.
    pub fn annotated(
        poly: &Polygon,
        candidates: Vec<usize>,
        targets: Vec<usize>,
    ) -> Result<Problem, GeomError> {
        let mut candidates = candidates;
        let mut targets = targets;
        candidates.sort_unstable();
        candidates.dedup();
        targets.sort_unstable();
        targets.dedup();
        for &id in candidates.iter().chain(&targets) {
            if id == 0 || id > poly.n() {
                return Err(GeomError::Parse(format!(
                    "vertex id {id} out of range 1..={}",
                    poly.n()
                )));
            }
        }
        Ok(Problem {
            variant: Variant::VertexVertex,
            work: poly.clone(),
            candidates,
            targets,
            original_id: (1..=poly.n()).map(Some).collect(),
        })
    }
}

/// Work-vertex ids of the original polygon's vertices, in id order.
fn map_ids(poly: &Polygon, refined: &Polygon) -> Vec<usize> {
    let mut ids: Vec<usize> = poly
        .points()
        .iter()
        .map(|p| {
            refined
                .vertex_id_at(p)
                .expect("refined polygon must contain every original vertex")
        })
        .collect();
    ids.sort_unstable();
    ids
}

fn originals(poly: &Polygon, refined: &Polygon) -> Vec<Option<usize>> {
    (1..=refined.n())
        .map(|id| poly.vertex_id_at(refined.point(id)))
        .collect()
}

/// Sorted candidate vertex ids with conversions between vertex ids and the
/// CSP domain `{0..N}`: domain value `t ∈ 1..=len` stands for the t-th
/// candidate, 0 and `N = len+1` are the impossible sentinels.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    pub ids: Vec<usize>,
}

impl CandidateIndex {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        CandidateIndex { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// CSP domain bound: candidates map to `1..=len`, so `N = len + 1`.
    pub fn n_bound(&self) -> usize {
        self.ids.len() + 1
    }

    /// Exact domain value of a candidate vertex.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.ids.binary_search(&v).ok().map(|i| i + 1)
    }

    /// Smallest domain value whose vertex is ≥ `v`; `N` when none is.
    pub fn ceil(&self, v: usize) -> usize {
        let i = self.ids.partition_point(|&x| x < v);
        if i == self.ids.len() {
            self.n_bound()
        } else {
            i + 1
        }
    }

    /// Largest domain value whose vertex is ≤ `v`; 0 when none is.
    pub fn floor(&self, v: usize) -> usize {
        self.ids.partition_point(|&x| x <= v)
    }

    pub fn vertex(&self, dom: usize) -> usize {
        self.ids[dom - 1]
    }

    /// Candidate vertex ids within an id interval.
    pub fn in_range(&self, lo: usize, hi: usize) -> &[usize] {
        let a = self.ids.partition_point(|&x| x < lo);
        let b = self.ids.partition_point(|&x| x <= hi);
        &self.ids[a..b]
    }
}

/// Sorted target vertex ids with successor and per-region queries.
#[derive(Debug, Clone)]
pub struct TargetIndex {
    pub ids: Vec<usize>,
}

impl TargetIndex {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        TargetIndex { ids }
    }

    pub fn is_target(&self, v: usize) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    /// Smallest target strictly greater than `a`.
    pub fn successor(&self, a: usize) -> Option<usize> {
        let i = self.ids.partition_point(|&x| x <= a);
        self.ids.get(i).copied()
    }

    pub fn min_in(&self, region: &ConvexRegion) -> Option<usize> {
        let i = self.ids.partition_point(|&x| x < region.lo);
        self.ids.get(i).copied().filter(|&t| t <= region.hi)
    }

    pub fn max_in(&self, region: &ConvexRegion) -> Option<usize> {
        let i = self.ids.partition_point(|&x| x <= region.hi);
        i.checked_sub(1)
            .map(|j| self.ids[j])
            .filter(|&t| t >= region.lo)
    }

    pub fn count_in(&self, region: &ConvexRegion) -> usize {
        let a = self.ids.partition_point(|&x| x < region.lo);
        let b = self.ids.partition_point(|&x| x <= region.hi);
        b - a
    }
}

/// One structured guess: guards placed per element, guards required to see
/// each element, and which placed guard covers each coverage slot.
///
/// Indices are element ordinals in the decomposition's canonical order.
/// Elements housing no target have `og = 0` and an empty slot list: they
/// need no coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guess {
    pub ig: Vec<usize>,
    pub og: Vec<usize>,
    /// `how[x][t-1] = (element ordinal, guard index)` covering slot `t`.
    pub how: Vec<Vec<(usize, usize)>>,
}

impl Guess {
    /// Total number of placed guards.
    pub fn guard_count(&self) -> usize {
        self.ig.iter().sum()
    }
}

/// How aggressively the enumerator skips guesses.
///
/// `Definition` applies only the problem definition's own constraints plus the basic
/// feasibility caps (placement counts bounded by available candidates,
/// coverage counts bounded by placed guards). `Full` additionally skips
/// guesses that provably admit no structured solution: repeated covering
/// guards within a region, slot orders inconsistent with the source's view
/// orientation, coverage counts above the region's target count, and
/// covering guards that cannot see what their slot requires. Both levels
/// preserve the Yes/No answer; `Full` is what the solver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneLevel {
    Definition,
    Full,
}

/// Precomputed tables shared by the enumerator and the constraint builder.
pub struct SolverTables {
    pub vis: VisibilityTable,
    pub dec: RegionDecomposition,
    /// Views with all vertices as potential sights.
    pub full: ViewTable,
    /// Views restricted to coverage targets.
    pub tgt: ViewTable,
    /// Orientations of the target-restricted views.
    pub orients: Orientations,
    pub cand: CandidateIndex,
    pub targets: TargetIndex,
}

impl SolverTables {
    pub fn build(problem: &Problem) -> Result<SolverTables, NotMonotone> {
        let vis = vertex_visibility(&problem.work);
        Self::build_with_vis(problem, vis)
    }

    pub fn build_with_vis(
        problem: &Problem,
        vis: VisibilityTable,
    ) -> Result<SolverTables, NotMonotone> {
        let dec = decompose(&problem.work).expect("tables are only built for r >= 1");
        let full = view_table(&problem.work, &dec, &vis);
        let tgt = view_table_over(&problem.work, &dec, &vis, &problem.targets);
        let orients = classify_all(&tgt, &dec)?;
        Ok(SolverTables {
            vis,
            dec,
            full,
            tgt,
            orients,
            cand: CandidateIndex::new(problem.candidates.clone()),
            targets: TargetIndex::new(problem.targets.clone()),
        })
    }
}

/// Per-(element, region/reflex-target) visibility feasibility used by the
/// `Full` prune level. Every entry mirrors an early-No check of the
/// constraint builder.
struct Feasibility {
    /// Can a guard housed in element `e` see reflex target `y`?
    cover_reflex: Vec<Vec<bool>>, // [reflex target ordinal][element ordinal]
    /// Can a guard housed in `e` see the smallest / largest / any target of
    /// region `r`?
    cover_lo: Vec<Vec<bool>>,  // [element ordinal][region]
    cover_hi: Vec<Vec<bool>>,  // [element ordinal][region]
    cover_any: Vec<Vec<bool>>, // [element ordinal][region]
}

impl Feasibility {
    fn build(t: &SolverTables) -> Feasibility {
        let elements = t.dec.elements();
        let reflex_targets: Vec<usize> = t
            .dec
            .reflex
            .iter()
            .copied()
            .filter(|&y| t.targets.is_target(y))
            .collect();
        // Can a guard housed in `e` see specific vertex `y`?
        let can_see = |e: Element, y: usize| -> bool {
            match e {
                Element::Reflex(v) => t.vis.sees(v, y),
                Element::Region(r) => match (t.full.first_of(y, r), t.full.last_of(y, r)) {
                    (Some(f), Some(l)) => t.cand.ceil(f) <= t.cand.floor(l),
                    _ => false,
                },
            }
        };
        let cover_reflex = reflex_targets
            .iter()
            .map(|&y| elements.iter().map(|&e| can_see(e, y)).collect())
            .collect();
        let mut cover_lo = Vec::with_capacity(elements.len());
        let mut cover_hi = Vec::with_capacity(elements.len());
        let mut cover_any = Vec::with_capacity(elements.len());
        for &e in &elements {
            let mut lo_row = Vec::with_capacity(t.dec.regions.len());
            let mut hi_row = Vec::with_capacity(t.dec.regions.len());
            let mut any_row = Vec::with_capacity(t.dec.regions.len());
            for (r, region) in t.dec.regions.iter().enumerate() {
                let lo = t.targets.min_in(region);
                let hi = t.targets.max_in(region);
                lo_row.push(lo.is_some_and(|y| can_see(e, y)));
                hi_row.push(hi.is_some_and(|y| can_see(e, y)));
                let any = match e {
                    Element::Reflex(v) => t.tgt.last_of(v, r).is_some(),
                    Element::Region(er) => t
                        .cand
                        .in_range(t.dec.regions[er].lo, t.dec.regions[er].hi)
                        .iter()
                        .any(|&j| t.tgt.last_of(j, r).is_some()),
                };
                any_row.push(any);
            }
            cover_lo.push(lo_row);
            cover_hi.push(hi_row);
            cover_any.push(any_row);
        }
        Feasibility {
            cover_reflex,
            cover_lo,
            cover_hi,
            cover_any,
        }
    }
}

/// Lazily enumerates structured guesses in canonical lexicographic order:
/// `ig` vectors first (elements in canonical order), then `og`, then the
/// covering slots.
pub struct GuessSpace<'a> {
    tables: &'a SolverTables,
    k: usize,
    prune: PruneLevel,
    elements: Vec<Element>,
    /// Candidate vertices available per element.
    cand_in: Vec<usize>,
    /// Whether each element houses any target.
    covered: Vec<bool>,
    feas: Option<Feasibility>,
}

impl<'a> GuessSpace<'a> {
    pub fn new(tables: &'a SolverTables, k: usize, prune: PruneLevel) -> GuessSpace<'a> {
        let elements = tables.dec.elements();
        let cand_in = elements
            .iter()
            .map(|&e| match e {
                Element::Region(r) => {
                    let region = tables.dec.regions[r];
                    tables.cand.in_range(region.lo, region.hi).len()
                }
                Element::Reflex(v) => usize::from(tables.cand.index_of(v).is_some()),
            })
            .collect();
        let covered = elements
            .iter()
            .map(|&e| match e {
                Element::Region(r) => tables.targets.min_in(&tables.dec.regions[r]).is_some(),
                Element::Reflex(v) => tables.targets.is_target(v),
            })
            .collect();
        let feas = match prune {
            PruneLevel::Definition => None,
            PruneLevel::Full => Some(Feasibility::build(tables)),
        };
        GuessSpace {
            tables,
            k,
            prune,
            elements,
            cand_in,
            covered,
            feas,
        }
    }

    /// Visits every guess in canonical order until the callback breaks.
    pub fn for_each(&self, visit: &mut dyn FnMut(Guess) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut ig = vec![0usize; self.elements.len()];
        self.walk_ig(0, self.k, &mut ig, visit)
    }

    /// Materializes the stream; test helper for small spaces.
    pub fn collect_all(&self) -> Vec<Guess> {
        let mut out = Vec::new();
        let _ = self.for_each(&mut |g| {
            out.push(g);
            ControlFlow::Continue(())
        });
        out
    }

    pub fn count(&self) -> u64 {
        let mut n = 0u64;
        let _ = self.for_each(&mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    fn walk_ig(
        &self,
        pos: usize,
        budget: usize,
        ig: &mut Vec<usize>,
        visit: &mut dyn FnMut(Guess) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if pos == self.elements.len() {
            return self.walk_og(ig, visit);
        }
        let cap = self.cand_in[pos].min(budget);
        for count in 0..=cap {
            ig[pos] = count;
            self.walk_ig(pos + 1, budget - count, ig, visit)?;
        }
        ig[pos] = 0;
        ControlFlow::Continue(())
    }

    fn walk_og(
        &self,
        ig: &Vec<usize>,
        visit: &mut dyn FnMut(Guess) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let guard_total: usize = ig.iter().sum();
        let any_covered = self.covered.iter().any(|&c| c);
        if any_covered && guard_total == 0 {
            // Covering slots must point at placed guards; none exist.
            return ControlFlow::Continue(());
        }
        // Placed guard pairs in canonical order.
        let pairs: Vec<(usize, usize)> = (0..self.elements.len())
            .flat_map(|ord| (1..=ig[ord]).map(move |i| (ord, i)))
            .collect();
        let mut og = vec![0usize; self.elements.len()];
        self.walk_og_pos(0, ig, &pairs, &mut og, visit)
    }

    fn og_cap(&self, ord: usize, guard_total: usize) -> usize {
        let mut cap = match self.elements[ord] {
            Element::Reflex(_) => 1,
            Element::Region(r) => {
                let mut c = self.k.min(guard_total);
                if self.prune == PruneLevel::Full {
                    c = c.min(self.tables.targets.count_in(&self.tables.dec.regions[r]));
                }
                c
            }
        };
        if !self.covered[ord] {
            cap = 0;
        }
        cap
    }

    fn walk_og_pos(
        &self,
        pos: usize,
        ig: &Vec<usize>,
        pairs: &[(usize, usize)],
        og: &mut Vec<usize>,
        visit: &mut dyn FnMut(Guess) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if pos == self.elements.len() {
            let mut how: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.elements.len()];
            return self.walk_how(0, ig, pairs, og, &mut how, visit);
        }
        if !self.covered[pos] {
            og[pos] = 0;
            return self.walk_og_pos(pos + 1, ig, pairs, og, visit);
        }
        let guard_total: usize = ig.iter().sum();
        let cap = self.og_cap(pos, guard_total);
        for value in 1..=cap {
            og[pos] = value;
            self.walk_og_pos(pos + 1, ig, pairs, og, visit)?;
        }
        og[pos] = 0;
        ControlFlow::Continue(())
    }

    /// Fills covering slots element by element, slot by slot.
    fn walk_how(
        &self,
        ord: usize,
        ig: &Vec<usize>,
        pairs: &[(usize, usize)],
        og: &Vec<usize>,
        how: &mut Vec<Vec<(usize, usize)>>,
        visit: &mut dyn FnMut(Guess) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if ord == self.elements.len() {
            return visit(Guess {
                ig: ig.clone(),
                og: og.clone(),
                how: how.clone(),
            });
        }
        if og[ord] == 0 {
            return self.walk_how(ord + 1, ig, pairs, og, how, visit);
        }
        self.walk_slot(ord, 1, ig, pairs, og, how, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk_slot(
        &self,
        ord: usize,
        slot: usize,
        ig: &Vec<usize>,
        pairs: &[(usize, usize)],
        og: &Vec<usize>,
        how: &mut Vec<Vec<(usize, usize)>>,
        visit: &mut dyn FnMut(Guess) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if slot > og[ord] {
            return self.walk_how(ord + 1, ig, pairs, og, how, visit);
        }
        for &pair in pairs {
            if !self.slot_allowed(ord, slot, og[ord], &how[ord], pair) {
                continue;
            }
            how[ord].push(pair);
            let flow = self.walk_slot(ord, slot + 1, ig, pairs, og, how, visit);
            how[ord].pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn slot_allowed(
        &self,
        ord: usize,
        slot: usize,
        og: usize,
        chosen: &[(usize, usize)],
        pair: (usize, usize),
    ) -> bool {
        let feas = match &self.feas {
            None => return true,
            Some(f) => f,
        };
        match self.elements[ord] {
            Element::Reflex(y) => {
                let y_ord = self
                    .tables
                    .dec
                    .reflex
                    .iter()
                    .filter(|&&v| self.tables.targets.is_target(v))
                    .position(|&v| v == y)
                    .expect("covered reflex element is a reflex target");
                feas.cover_reflex[y_ord][pair.0]
            }
            Element::Region(r) => {
                // The slot's guard must see what the slot requires.
                if slot == 1 && !feas.cover_lo[pair.0][r] {
                    return false;
                }
                if slot == og && !feas.cover_hi[pair.0][r] {
                    return false;
                }
                if !feas.cover_any[pair.0][r] {
                    return false;
                }
                // No guard covers two slots of one region: the last seen
                // target must strictly grow from slot to slot.
                if chosen.contains(&pair) {
                    return false;
                }
                // Slots drawn from the same source element must respect the
                // source's last-sense orientation.
                if let Some(&(prev_elem, prev_idx)) =
                    chosen.iter().rev().find(|(e, _)| *e == pair.0)
                {
                    debug_assert_eq!(prev_elem, pair.0);
                    let ascending =
                        self.tables.orients.last_of(pair.0, r) == Orientation::NonDecreasing;
                    if ascending && pair.1 <= prev_idx {
                        return false;
                    }
                    if !ascending && pair.1 >= prev_idx {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// A certified guard set with the guess and assignment that produced it.
#[derive(Debug, Clone)]
pub struct GuardSolution {
    /// Sorted work-polygon vertex ids.
    pub guards: Vec<usize>,
    /// The guess whose CSP was satisfiable; absent for shortcut answers.
    pub witness_guess: Option<Guess>,
    /// The satisfying CSP assignment, parallel to the guess's variables.
    pub assignment: Option<Vec<usize>>,
}

/// Outcome of a solve: the solution when one exists, plus how many guesses
/// were dispatched.
#[derive(Debug, Clone)]
pub struct SolveRun {
    pub solution: Option<GuardSolution>,
    pub guesses_tried: u64,
}

impl SolveRun {
    pub fn is_yes(&self) -> bool {
        self.solution.is_some()
    }
}

#[derive(Debug)]
pub enum SolveError {
    Geometry(GeomError),
    NotMonotone(NotMonotone),
    Internal(String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Geometry(e) => write!(f, "{e}"),
            SolveError::NotMonotone(e) => write!(f, "{e}"),
            SolveError::Internal(why) => write!(f, "internal solver error: {why}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<GeomError> for SolveError {
    fn from(e: GeomError) -> Self {
        SolveError::Geometry(e)
    }
}

impl From<NotMonotone> for SolveError {
    fn from(e: NotMonotone) -> Self {
        SolveError::NotMonotone(e)
    }
}

/// Solver knobs. `threads = 1` evaluates guesses sequentially; higher values
/// fan blocks of guesses out to worker threads. The answer and witness are
/// identical either way.
pub struct SolveOptions<'a> {
    pub threads: usize,
    /// Called with every constraint instance the builder emits, in guess
    /// order. Forces sequential evaluation.
    pub on_instance: Option<&'a mut dyn FnMut(u64, &CspInstance)>,
    /// Progress hook: called periodically with the number of guesses tried.
    pub progress: Option<&'a mut dyn FnMut(u64)>,
}

impl<'a> Default for SolveOptions<'a> {
    fn default() -> Self {
        SolveOptions {
            threads: 1,
            on_instance: None,
            progress: None,
        }
    }
}

/// Decides whether ≤ `k` guards placed on the problem's candidates can see
/// all of its targets, and returns a certified witness when they can.
pub fn solve(problem: &Problem, k: usize, opts: SolveOptions) -> Result<SolveRun, SolveError> {
    let vis = vertex_visibility(&problem.work);
    solve_with_vis(problem, k, vis, opts)
}

pub fn solve_with_vis(
    problem: &Problem,
    k: usize,
    vis: VisibilityTable,
    mut opts: SolveOptions,
) -> Result<SolveRun, SolveError> {
    if problem.targets.is_empty() {
        return Ok(SolveRun {
            solution: Some(GuardSolution {
                guards: Vec::new(),
                witness_guess: None,
                assignment: None,
            }),
            guesses_tried: 0,
        });
    }
    if k == 0 || problem.candidates.is_empty() {
        return Ok(SolveRun {
            solution: None,
            guesses_tried: 0,
        });
    }
    let r = problem.work.reflex_count();
    if r == 0 {
        // Convex working polygon: any single candidate sees everything.
        let witness = vec![problem.candidates[0]];
        debug_assert!(problem.certify(&vis, &witness));
        return Ok(SolveRun {
            solution: Some(GuardSolution {
                guards: witness,
                witness_guess: None,
                assignment: None,
            }),
            guesses_tried: 0,
        });
    }
    let reflex_all_candidates = problem
        .work
        .reflex_ids()
        .iter()
        .all(|&g| problem.candidates.binary_search(&g).is_ok());
    if k >= r && reflex_all_candidates {
        // The reflex vertices guard everything. In the three standard
        // variants they are always candidates (subdivision points are never
        // reflex); annotated instances may exclude them, in which case the
        // guess enumeration below decides the answer instead.
        let witness: Vec<usize> = problem.work.reflex_ids().to_vec();
        if !problem.certify(&vis, &witness) {
            return Err(SolveError::Internal(
                "reflex set failed to certify".into(),
            ));
        }
        return Ok(SolveRun {
            solution: Some(GuardSolution {
                guards: witness,
                witness_guess: None,
                assignment: None,
            }),
            guesses_tried: 0,
        });
    }
    // Guards beyond the candidate count never help.
    let k = k.min(problem.candidates.len());

    let tables = SolverTables::build_with_vis(problem, vis)?;
    let space = GuessSpace::new(&tables, k, PruneLevel::Full);
    let sequential = opts.on_instance.is_some() || opts.threads <= 1;
    let block_size = if sequential { 1 } else { 256 * opts.threads };

    let mut tried: u64 = 0;
    let mut found: Option<(u64, Guess, Vec<usize>)> = None;
    let mut block: Vec<(u64, Guess)> = Vec::with_capacity(block_size);
    let mut internal_error: Option<String> = None;

    {
        let evaluate_block =
            |block: &[(u64, Guess)], tables: &SolverTables, k: usize, threads: usize|
             -> Result<Option<(u64, Guess, Vec<usize>)>, String> {
                if block.is_empty() {
                    return Ok(None);
                }
                if threads <= 1 || block.len() == 1 {
                    for (ordinal, guess) in block {
                        if let Some(alpha) = evaluate_guess(tables, k, guess)? {
                            return Ok(Some((*ordinal, guess.clone(), alpha)));
                        }
                    }
                    return Ok(None);
                }
                let chunk = block.len().div_ceil(threads);
                std::thread::scope(|scope| {
                    let handles: Vec<_> = block
                        .chunks(chunk)
                        .map(|items| {
                            scope.spawn(move || -> Result<Option<(u64, Guess, Vec<usize>)>, String> {
                                for (ordinal, guess) in items {
                                    if let Some(alpha) = evaluate_guess(tables, k, guess)? {
                                        return Ok(Some((*ordinal, guess.clone(), alpha)));
                                    }
                                }
                                Ok(None)
                            })
                        })
                        .collect();
                    let mut best: Option<(u64, Guess, Vec<usize>)> = None;
                    for handle in handles {
                        let result = handle.join().expect("solver worker panicked")?;
                        if let Some(hit) = result {
                            if best.as_ref().is_none_or(|b| hit.0 < b.0) {
                                best = Some(hit);
                            }
                        }
                    }
                    Ok(best)
                })
            };

        let flow = space.for_each(&mut |guess| {
            let ordinal = tried;
            tried += 1;
            if let Some(progress) = opts.progress.as_deref_mut() {
                if tried % 4096 == 0 {
                    progress(tried);
                }
            }
            if let Some(on_instance) = opts.on_instance.as_deref_mut() {
                match karp::build(&karp_input(&tables, k), &guess) {
                    BuildOutcome::EarlyNo(_) => return ControlFlow::Continue(()),
                    BuildOutcome::Instance { csp, .. } => {
                        on_instance(ordinal, &csp);
                        match solve_csp(&csp) {
                            Ok(CspOutcome::Satisfiable(alpha)) => {
                                found = Some((ordinal, guess, alpha));
                                return ControlFlow::Break(());
                            }
                            Ok(CspOutcome::Unsatisfiable) => return ControlFlow::Continue(()),
                            Err(e) => {
                                internal_error = Some(e.to_string());
                                return ControlFlow::Break(());
                            }
                        }
                    }
                }
            }
            block.push((ordinal, guess));
            if block.len() >= block_size {
                match evaluate_block(&block, &tables, k, opts.threads) {
                    Ok(Some(hit)) => {
                        found = Some(hit);
                        block.clear();
                        return ControlFlow::Break(());
                    }
                    Ok(None) => {
                        block.clear();
                    }
                    Err(e) => {
                        internal_error = Some(e);
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        });
        if flow == ControlFlow::Continue(()) && found.is_none() && internal_error.is_none() {
            match evaluate_block(&block, &tables, k, opts.threads) {
                Ok(Some(hit)) => found = Some(hit),
                Ok(None) => {}
                Err(e) => internal_error = Some(e),
            }
        }
    }

    if let Some(why) = internal_error {
        return Err(SolveError::Internal(why));
    }

    match found {
        None => Ok(SolveRun {
            solution: None,
            guesses_tried: tried,
        }),
        // Report the winner's position in canonical order so the count is
        // independent of evaluation batching.
        Some((ordinal, guess, alpha)) => {
            let tried = ordinal + 1;
            let mut guards: Vec<usize> =
                alpha.iter().map(|&dom| tables.cand.vertex(dom)).collect();
            guards.sort_unstable();
            guards.dedup();
            if guards.len() != alpha.len() {
                return Err(SolveError::Internal(
                    "CSP assignment mapped two variables to one vertex".into(),
                ));
            }
            if !problem.certify(&tables.vis, &guards) {
                return Err(SolveError::Internal(
                    "satisfiable guess produced an uncertified guard set".into(),
                ));
            }
            Ok(SolveRun {
                solution: Some(GuardSolution {
                    guards,
                    witness_guess: Some(guess),
                    assignment: Some(alpha),
                }),
                guesses_tried: tried,
            })
        }
    }
}

fn karp_input<'a>(tables: &'a SolverTables, k: usize) -> karp::ReductionInput<'a> {
    karp::ReductionInput {
        dec: &tables.dec,
        vis: &tables.vis,
        full: &tables.full,
        tgt: &tables.tgt,
        orients: &tables.orients,
        cand: &tables.cand,
        targets: &tables.targets,
        k,
    }
}

/// Builds the guess's CSP and solves it. `Ok(Some(alpha))` on satisfiable.
fn evaluate_guess(
    tables: &SolverTables,
    k: usize,
    guess: &Guess,
) -> Result<Option<Vec<usize>>, String> {
    match karp::build(&karp_input(tables, k), guess) {
        BuildOutcome::EarlyNo(_) => Ok(None),
        BuildOutcome::Instance { csp, .. } => match solve_csp(&csp) {
            Ok(CspOutcome::Satisfiable(alpha)) => Ok(Some(alpha)),
            Ok(CspOutcome::Unsatisfiable) => Ok(None),
            Err(e) => Err(e.to_string()),
        },
    }
}

/// Vertex-Boundary solve: guards on the vertices of P, coverage of the whole
/// boundary via the P2 discretization.
pub fn solve_vb(poly: &Polygon, k: usize, opts: SolveOptions) -> Result<SolveRun, SolveError> {
    let problem = Problem::build(poly, Variant::VertexBoundary)?;
    solve(&problem, k, opts)
}

/// Boundary-Vertex solve: guards anywhere on the boundary via the P1
/// discretization, coverage of the vertices of P.
pub fn solve_bv(poly: &Polygon, k: usize, opts: SolveOptions) -> Result<SolveRun, SolveError> {
    let problem = Problem::build(poly, Variant::BoundaryVertex)?;
    solve(&problem, k, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fan_star, l_shape, slit_comb, square, three_region_polygon};
    use crate::oracle::{brute_force, check_structured_conditions, OracleCaps};

    fn vv(poly: &Polygon) -> Problem {
        Problem::build(poly, Variant::VertexVertex).unwrap()
    }

    /// Independent guess counter: plain nested loops straight from the
    /// definition, sharing nothing with GuessSpace.
    fn count_guesses_by_hand(tables: &SolverTables, k: usize) -> u64 {
        let elements = tables.dec.elements();
        let m = elements.len();
        let cand_in = |e: Element| -> usize {
            match e {
                Element::Region(r) => {
                    let region = tables.dec.regions[r];
                    tables.cand.in_range(region.lo, region.hi).len()
                }
                Element::Reflex(v) => usize::from(tables.cand.index_of(v).is_some()),
            }
        };
        let covered = |e: Element| -> bool {
            match e {
                Element::Region(r) => tables.targets.min_in(&tables.dec.regions[r]).is_some(),
                Element::Reflex(v) => tables.targets.is_target(v),
            }
        };
        // Enumerate ig vectors.
        let mut total = 0u64;
        let mut ig = vec![0usize; m];
        loop {
            let sum: usize = ig.iter().sum();
            let caps_ok = sum <= k && (0..m).all(|i| ig[i] <= cand_in(elements[i]));
            if caps_ok {
                let guard_total = sum;
                let pair_count: usize = ig.iter().sum();
                let covered_elements: Vec<usize> =
                    (0..m).filter(|&i| covered(elements[i])).collect();
                if covered_elements.is_empty() {
                    total += 1;
                } else if pair_count > 0 {
                    // Enumerate og per covered element, then count how maps
                    // as a product of per-slot choices.
                    let og_options: Vec<Vec<usize>> = covered_elements
                        .iter()
                        .map(|&i| match elements[i] {
                            Element::Reflex(_) => vec![1],
                            Element::Region(_) => (1..=k.min(guard_total)).collect(),
                        })
                        .collect();
                    let mut og_choice = vec![0usize; covered_elements.len()];
                    loop {
                        let slots: usize = og_choice
                            .iter()
                            .zip(&og_options)
                            .map(|(&c, opts)| opts[c])
                            .sum();
                        total += (pair_count as u64).pow(slots as u32);
                        // Odometer over og choices.
                        let mut pos = 0;
                        loop {
                            if pos == og_choice.len() {
                                break;
                            }
                            og_choice[pos] += 1;
                            if og_choice[pos] < og_options[pos].len() {
                                break;
                            }
                            og_choice[pos] = 0;
                            pos += 1;
                        }
                        if pos == og_choice.len() {
                            break;
                        }
                    }
                }
            }
            // Odometer over ig vectors, bounded by k per coordinate.
            let mut pos = 0;
            loop {
                if pos == m {
                    return total;
                }
                ig[pos] += 1;
                if ig[pos] <= k {
                    break;
                }
                ig[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn l_shape_guess_count_matches_hand_enumeration() {
        let problem = vv(&l_shape());
        let tables = SolverTables::build(&problem).unwrap();
        let space = GuessSpace::new(&tables, 1, PruneLevel::Definition);
        assert_eq!(space.count(), count_guesses_by_hand(&tables, 1));
        assert_eq!(space.count(), 2);
        // Canonical order: reflex placement first (ig is lexicographic).
        let all = space.collect_all();
        assert_eq!(all[0].ig, vec![0, 1]);
        assert_eq!(all[1].ig, vec![1, 0]);
    }

    #[test]
    fn fan_star_guess_count_matches_hand_enumeration() {
        let problem = vv(&fan_star());
        let tables = SolverTables::build(&problem).unwrap();
        for k in 1..=1 {
            let space = GuessSpace::new(&tables, k, PruneLevel::Definition);
            assert_eq!(space.count(), count_guesses_by_hand(&tables, k), "k={k}");
        }
    }

    #[test]
    fn zero_budget_yields_no_guesses() {
        let problem = vv(&l_shape());
        let tables = SolverTables::build(&problem).unwrap();
        let space = GuessSpace::new(&tables, 0, PruneLevel::Definition);
        assert_eq!(space.count(), 0);
    }

    #[test]
    fn full_prunes_never_lose_yes_guesses() {
        // Every pruned guess must be a No; verify by checking that the
        // structured-conditions checker accepts no guard set for a sample
        // of pruned guesses on the fan star.
        let problem = vv(&fan_star());
        let tables = SolverTables::build(&problem).unwrap();
        let definition_all = GuessSpace::new(&tables, 1, PruneLevel::Definition).collect_all();
        let full_all = GuessSpace::new(&tables, 1, PruneLevel::Full).collect_all();
        assert!(full_all.len() <= definition_all.len());
        for guess in definition_all {
            if full_all.contains(&guess) {
                continue;
            }
            // Pruned: no single-vertex guard set may satisfy the structured
            // conditions for it.
            for &g in &problem.candidates {
                assert!(
                    !check_structured_conditions(&tables, 1, &guess, &[g]),
                    "pruned guess {guess:?} admits guard {g}"
                );
            }
        }
    }

    #[test]
    fn l_shape_shortcut_returns_reflex_witness() {
        let problem = vv(&l_shape());
        let run = solve(&problem, 1, SolveOptions::default()).unwrap();
        let sol = run.solution.expect("L-shape with k=1 is a Yes");
        assert_eq!(sol.guards, vec![1]);
        assert!(sol.witness_guess.is_none());
    }

    #[test]
    fn square_answers() {
        let problem = vv(&square());
        assert!(!solve(&problem, 0, SolveOptions::default()).unwrap().is_yes());
        let run = solve(&problem, 1, SolveOptions::default()).unwrap();
        assert_eq!(run.solution.unwrap().guards, vec![1]);
    }

    #[test]
    fn fan_star_solves_through_the_pipeline() {
        // r = 2, k = 1: no shortcut, the guess pipeline must find the
        // reflex vertex (1,1) which sees the whole fan.
        let problem = vv(&fan_star());
        let run = solve(&problem, 1, SolveOptions::default()).unwrap();
        let sol = run.solution.expect("fan star with k=1 is a Yes");
        assert!(run.guesses_tried >= 1);
        assert_eq!(sol.guards, vec![5]);
        let guess = sol.witness_guess.expect("pipeline witness carries its guess");
        let tables = SolverTables::build(&problem).unwrap();
        assert!(check_structured_conditions(&tables, 1, &guess, &sol.guards));
        // Agreement with the oracle.
        let oracle = brute_force(&fan_star(), 1, Variant::VertexVertex, &OracleCaps::default())
            .unwrap();
        assert!(oracle.is_yes());
    }

    #[test]
    fn slit_comb_needs_a_convex_witness() {
        let poly = slit_comb();
        assert_eq!(poly.reflex_count(), 6);
        let problem = vv(&poly);
        let tables = SolverTables::build(&problem).unwrap();
        // No single reflex vertex certifies.
        for &v in poly.reflex_ids() {
            assert!(!problem.certify(&tables.vis, &[v]), "reflex {v} should not cover");
        }
        // The apex does.
        let apex = poly.vertex_id_at(&crate::fixtures::point(12, -1)).unwrap();
        assert!(problem.certify(&tables.vis, &[apex]));
        // k = 1 < r = 3 exercises the full pipeline and agrees with the
        // oracle.
        let run = solve(&problem, 1, SolveOptions::default()).unwrap();
        let sol = run.solution.expect("slit comb with k=1 is a Yes");
        assert!(!poly.is_reflex(sol.guards[0]));
        let oracle =
            brute_force(&poly, 1, Variant::VertexVertex, &OracleCaps::default()).unwrap();
        assert_eq!(oracle.witness.as_deref(), Some(&sol.guards[..]));
    }

    #[test]
    fn slit_comb_matches_oracle_for_small_k() {
        // r = 6, so k = 2 drives a sizable guess enumeration with ten
        // elements; answers must track the oracle.
        let poly = slit_comb();
        let problem = vv(&poly);
        let caps = OracleCaps::default();
        for k in 0..=2 {
            let want = brute_force(&poly, k, Variant::VertexVertex, &caps)
                .unwrap()
                .is_yes();
            let run = solve(&problem, k, SolveOptions::default()).unwrap();
            assert_eq!(run.is_yes(), want, "k={k}");
        }
    }

    #[test]
    fn annotated_instances_without_reflex_candidates_still_solve() {
        // Exclude every reflex vertex from the candidate set of the fan
        // star; the reflex shortcut cannot apply even at k >= r, and the
        // enumeration must still match brute force.
        let poly = fan_star();
        let candidates: Vec<usize> = poly.convex_ids().to_vec();
        let targets: Vec<usize> = (1..=poly.n()).collect();
        let problem = Problem::annotated(&poly, candidates, targets).unwrap();
        let vis = crate::geom::vertex_visibility(&problem.work);
        let caps = OracleCaps::default();
        for k in 0..=3 {
            let want = crate::oracle::brute_force_problem(&problem, &vis, k, &caps)
                .unwrap()
                .is_yes();
            let run = solve_with_vis(&problem, k, vis.clone(), SolveOptions::default()).unwrap();
            assert_eq!(run.is_yes(), want, "k={k}");
            if let Some(sol) = &run.solution {
                assert!(sol.guards.iter().all(|g| !poly.is_reflex(*g)));
            }
        }
        // Out-of-range ids are rejected.
        assert!(Problem::annotated(&poly, vec![0], vec![1]).is_err());
        assert!(Problem::annotated(&poly, vec![1], vec![99]).is_err());
    }

    #[test]
    fn three_region_polygon_matches_oracle_for_all_k() {
        let poly = three_region_polygon();
        let problem = vv(&poly);
        let caps = OracleCaps::default();
        let mut previous_yes = false;
        for k in 0..=5 {
            let want = brute_force(&poly, k, Variant::VertexVertex, &caps)
                .unwrap()
                .is_yes();
            let run = solve(&problem, k, SolveOptions::default()).unwrap();
            assert_eq!(run.is_yes(), want, "k={k}");
            // Monotone in k.
            assert!(!previous_yes || run.is_yes());
            previous_yes = run.is_yes();
            if let Some(sol) = run.solution {
                assert!(problem.certify(&SolverTables::build(&problem).unwrap().vis, &sol.guards));
                assert!(sol.guards.len() <= k);
            }
        }
    }

    #[test]
    fn parallel_evaluation_is_deterministic() {
        let poly = slit_comb();
        let problem = vv(&poly);
        let sequential = solve(&problem, 1, SolveOptions::default()).unwrap();
        let parallel = solve(
            &problem,
            1,
            SolveOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(sequential.guesses_tried, parallel.guesses_tried);
        assert_eq!(
            sequential.solution.as_ref().map(|s| s.guards.clone()),
            parallel.solution.as_ref().map(|s| s.guards.clone())
        );
        assert_eq!(
            sequential.solution.unwrap().witness_guess,
            parallel.solution.unwrap().witness_guess
        );
    }

    #[test]
    fn variant_problems_have_expected_shapes() {
        let l = l_shape();
        let bv = Problem::build(&l, Variant::BoundaryVertex).unwrap();
        assert_eq!(bv.work.n(), 10);
        assert_eq!(bv.candidates.len(), 10);
        assert_eq!(bv.targets.len(), 6);
        let vb = Problem::build(&l, Variant::VertexBoundary).unwrap();
        assert_eq!(vb.work.n(), 20);
        assert_eq!(vb.candidates.len(), 6);
        assert_eq!(vb.targets.len(), 20);
    }

    #[test]
    fn square_vertex_boundary_single_guard() {
        let run = solve_vb(&square(), 1, SolveOptions::default()).unwrap();
        assert!(run.is_yes());
        let run = solve_vb(&square(), 0, SolveOptions::default()).unwrap();
        assert!(!run.is_yes());
    }

    #[test]
    fn l_shape_boundary_vertex_answers() {
        assert!(solve_bv(&l_shape(), 1, SolveOptions::default()).unwrap().is_yes());
        assert!(!solve_bv(&l_shape(), 0, SolveOptions::default()).unwrap().is_yes());
    }

    #[test]
    fn l_shape_variants_match_oracle() {
        let l = l_shape();
        let caps = OracleCaps::default();
        for variant in [Variant::BoundaryVertex, Variant::VertexBoundary] {
            let problem = Problem::build(&l, variant).unwrap();
            for k in 0..=2 {
                let want = brute_force(&l, k, variant, &caps).unwrap().is_yes();
                let got = solve(&problem, k, SolveOptions::default()).unwrap().is_yes();
                assert_eq!(got, want, "{variant} k={k}");
            }
        }
    }

    #[test]
    fn certify_is_a_direct_visibility_scan() {
        let problem = vv(&l_shape());
        let tables = SolverTables::build(&problem).unwrap();
        assert!(problem.certify(&tables.vis, &[1]));
        assert!(!problem.certify(&tables.vis, &[]));
        assert!(!problem.certify(&tables.vis, &[2]));
    }

    #[test]
    fn candidate_index_conversions() {
        let idx = CandidateIndex::new(vec![3, 5, 9]);
        assert_eq!(idx.n_bound(), 4);
        assert_eq!(idx.index_of(5), Some(2));
        assert_eq!(idx.index_of(4), None);
        assert_eq!(idx.ceil(4), 2);
        assert_eq!(idx.ceil(10), 4);
        assert_eq!(idx.floor(4), 1);
        assert_eq!(idx.floor(2), 0);
        assert_eq!(idx.in_range(4, 9), &[5, 9]);
    }

    #[test]
    fn target_index_queries() {
        let t = TargetIndex::new(vec![2, 4, 7]);
        assert!(t.is_target(4));
        assert!(!t.is_target(5));
        assert_eq!(t.successor(2), Some(4));
        assert_eq!(t.successor(7), None);
        let region = ConvexRegion { lo: 3, hi: 6 };
        assert_eq!(t.min_in(&region), Some(4));
        assert_eq!(t.max_in(&region), Some(4));
        assert_eq!(t.count_in(&region), 1);
        let empty = ConvexRegion { lo: 5, hi: 6 };
        assert_eq!(t.min_in(&empty), None);
    }
}
