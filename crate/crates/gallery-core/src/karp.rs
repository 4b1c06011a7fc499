//! Translates one structured guess into a monotone 2-CSP instance.
//!
//! Variables stand for placed guards; their domain values are candidate
//! indices, with 0 and N as impossible sentinels. The constraint families:
//!
//! - association pins each variable into its housing element,
//! - order forces guards of one region into strictly increasing positions,
//! - reflex / first-vertex / last-vertex guarding pins the responsible
//!   variable into the interval of positions that see the required target,
//! - middle constraints chain consecutive covering slots of a region so
//!   that no target is skipped and coverage advances; each one materializes
//!   a function table whose shape depends on the view orientations of the
//!   two source elements, and every table is checked monotone before use.
//!
//! Early No outcomes are exactly the construction's explicit rejections: a
//! covering guard that cannot see its required target, or a source element
//! with no candidate seeing any target of the covered region.

use std::fmt;

use crate::csp::{Cmp, CspInstance, Direction, Monotonicity};
use crate::geom::VisibilityTable;
use crate::regions::{Element, Orientation, Orientations, RegionDecomposition, ViewTable};
use crate::structured::{CandidateIndex, Guess, TargetIndex};

pub use crate::csp::check_monotone;

/// Everything the builder needs besides the guess itself. All tables refer
/// to the working polygon of the problem variant.
pub struct ReductionInput<'a> {
    pub dec: &'a RegionDecomposition,
    pub vis: &'a VisibilityTable,
    /// Views over all vertices (used to locate guards that see a specific
    /// target vertex).
    pub full: &'a ViewTable,
    /// Views restricted to coverage targets (used to track coverage
    /// progress along a region).
    pub tgt: &'a ViewTable,
    /// Orientations of the target-restricted views.
    pub orients: &'a Orientations,
    pub cand: &'a CandidateIndex,
    pub targets: &'a TargetIndex,
    pub k: usize,
}

/// Bijection between CSP variables and (element ordinal, guard index)
/// pairs, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMap {
    pub pairs: Vec<(usize, usize)>,
}

impl VariableMap {
    pub fn from_guess(guess: &Guess) -> VariableMap {
        let pairs = (0..guess.ig.len())
            .flat_map(|ord| (1..=guess.ig[ord]).map(move |i| (ord, i)))
            .collect();
        VariableMap { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn var_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.iter().position(|&p| p == pair)
    }
}

/// Why the construction rejected a guess without emitting an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EarlyNoReason {
    /// The guard nominated to see reflex target `target` cannot.
    ReflexTargetUnseen { target: usize },
    /// The guard nominated to see the smallest target of region `region`
    /// cannot.
    FirstTargetUnseen { region: usize },
    /// The guard nominated to see the largest target of region `region`
    /// cannot.
    LastTargetUnseen { region: usize },
    /// No candidate in the element covering slot `slot` of `region` sees
    /// any target there.
    SlotSourceBlind { region: usize, slot: usize },
    /// Consecutive covering slots name the same placed guard; coverage
    /// cannot strictly advance.
    RepeatedConsecutiveGuard { region: usize, slot: usize },
}

impl fmt::Display for EarlyNoReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EarlyNoReason::ReflexTargetUnseen { target } => {
                write!(f, "nominated guard cannot see reflex target {target}")
            }
            EarlyNoReason::FirstTargetUnseen { region } => {
                write!(f, "nominated guard cannot see the first target of region #{region}")
            }
            EarlyNoReason::LastTargetUnseen { region } => {
                write!(f, "nominated guard cannot see the last target of region #{region}")
            }
            EarlyNoReason::SlotSourceBlind { region, slot } => write!(
                f,
                "no candidate in the source of slot {slot} sees region #{region}"
            ),
            EarlyNoReason::RepeatedConsecutiveGuard { region, slot } => write!(
                f,
                "slots {} and {slot} of region #{region} name the same guard",
                slot - 1
            ),
        }
    }
}

/// Result of building one guess.
#[derive(Debug)]
pub enum BuildOutcome {
    EarlyNo(EarlyNoReason),
    Instance { csp: CspInstance, vars: VariableMap },
}

/// A constructed table failed its monotonicity check. The per-case sweeps
/// make this impossible for tables built from a valid polygon, so it
/// signals a bug rather than a No answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableNotMonotone {
    pub region: usize,
    pub slot: usize,
}

impl fmt::Display for TableNotMonotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "constructed table for slot {} of region #{} is not monotone",
            self.slot, self.region
        )
    }
}

impl std::error::Error for TableNotMonotone {}

/// Builds the monotone 2-CSP instance for a guess, or reports an early No.
///
/// Panics only on broken invariants (a guess referencing unplaced guards or
/// elements without candidates), which the enumerator never produces.
pub fn build(input: &ReductionInput, guess: &Guess) -> BuildOutcome {
    match try_build(input, guess) {
        Ok(outcome) => outcome,
        Err(bug) => panic!("constructed function table must be monotone: {bug}"),
    }
}

/// Fallible variant of [`build`], surfacing the impossible-by-proof
/// monotonicity failure as an error instead of panicking.
pub fn try_build(
    input: &ReductionInput,
    guess: &Guess,
) -> Result<BuildOutcome, TableNotMonotone> {
    let vars = VariableMap::from_guess(guess);
    let n = input.cand.n_bound();
    let mut csp = CspInstance::new(vars.len(), n);
    let elements = input.dec.elements();

    // Association: each variable sits inside its housing element.
    for (x, &(ord, _)) in vars.pairs.iter().enumerate() {
        match elements[ord] {
            Element::Reflex(v) => {
                let dom = input
                    .cand
                    .index_of(v)
                    .expect("guards are only placed on candidate vertices");
                csp.push_const(x, Cmp::Ge, dom);
                csp.push_const(x, Cmp::Le, dom);
            }
            Element::Region(r) => {
                let region = input.dec.regions[r];
                csp.push_const(x, Cmp::Ge, input.cand.ceil(region.lo));
                csp.push_const(x, Cmp::Le, input.cand.floor(region.hi));
            }
        }
    }

    // Order within a region: the i-th placed guard precedes the j-th.
    let successor: Vec<usize> = (0..=n).map(|q| if q < n { q + 1 } else { n }).collect();
    for ord in 0..elements.len() {
        for i in 1..=guess.ig[ord] {
            for j in (i + 1)..=guess.ig[ord] {
                let xi = vars.var_of((ord, i)).unwrap();
                let xj = vars.var_of((ord, j)).unwrap();
                csp.push_fn(xj, Cmp::Ge, xi, successor.clone(), Direction::NonDecreasing);
            }
        }
    }

    // Guarding reflex targets.
    for (ord, &e) in elements.iter().enumerate() {
        let y = match e {
            Element::Reflex(v) if guess.og[ord] == 1 => v,
            _ => continue,
        };
        let (src, idx) = guess.how[ord][0];
        let x = vars.var_of((src, idx)).expect("slot names a placed guard");
        if let Some(reason) = pin_to_viewers(input, &mut csp, x, elements[src], y) {
            return Ok(BuildOutcome::EarlyNo(reason(y)));
        }
    }

    // Guarding the first and last target of each covered region, then the
    // middle chain.
    for (r, region) in input.dec.regions.iter().enumerate() {
        let og = guess.og[r];
        if og == 0 {
            continue;
        }
        let lo_target = input.targets.min_in(region).expect("covered region has targets");
        let hi_target = input.targets.max_in(region).expect("covered region has targets");

        let (src, idx) = guess.how[r][0];
        let x = vars.var_of((src, idx)).expect("slot names a placed guard");
        if pin_to_viewers(input, &mut csp, x, elements[src], lo_target).is_some() {
            return Ok(BuildOutcome::EarlyNo(EarlyNoReason::FirstTargetUnseen {
                region: r,
            }));
        }

        let (src, idx) = guess.how[r][og - 1];
        let x = vars.var_of((src, idx)).expect("slot names a placed guard");
        if pin_to_viewers(input, &mut csp, x, elements[src], hi_target).is_some() {
            return Ok(BuildOutcome::EarlyNo(EarlyNoReason::LastTargetUnseen {
                region: r,
            }));
        }

        for t in 2..=og {
            match middle_constraints(input, &mut csp, &vars, guess, r, t) {
                Ok(None) => {}
                Ok(Some(reason)) => return Ok(BuildOutcome::EarlyNo(reason)),
                Err(bug) => return Err(bug),
            }
        }
    }

    debug_assert!(vars.len() <= input.k);
    debug_assert!(csp.validate().is_ok(), "builder emitted an invalid instance");
    Ok(BuildOutcome::Instance { csp, vars })
}

/// Pins variable `x` (housed in `src`) into the set of positions that see
/// vertex `y`. Returns an early-No constructor when no such position
/// exists; for a reflex source that sees `y` no constraint is needed.
fn pin_to_viewers(
    input: &ReductionInput,
    csp: &mut CspInstance,
    x: usize,
    src: Element,
    y: usize,
) -> Option<fn(usize) -> EarlyNoReason> {
    match src {
        Element::Reflex(v) => {
            if input.vis.sees(v, y) {
                None
            } else {
                Some(|target| EarlyNoReason::ReflexTargetUnseen { target })
            }
        }
        Element::Region(r) => {
            match (input.full.first_of(y, r), input.full.last_of(y, r)) {
                (Some(f), Some(l)) => {
                    csp.push_const(x, Cmp::Ge, input.cand.ceil(f));
                    csp.push_const(x, Cmp::Le, input.cand.floor(l));
                    None
                }
                _ => Some(|target| EarlyNoReason::ReflexTargetUnseen { target }),
            }
        }
    }
}

/// Candidate vertices of an element, ascending.
fn element_candidates(input: &ReductionInput, e: Element) -> Vec<usize> {
    match e {
        Element::Reflex(v) => input.cand.index_of(v).map(|_| v).into_iter().collect(),
        Element::Region(r) => {
            let region = input.dec.regions[r];
            input.cand.in_range(region.lo, region.hi).to_vec()
        }
    }
}

/// Smallest and largest candidate vertices of `e` that see at least one
/// target of region `r`.
fn visible_candidate_bounds(
    input: &ReductionInput,
    e: Element,
    r: usize,
) -> Option<(usize, usize)> {
    let seers: Vec<usize> = element_candidates(input, e)
        .into_iter()
        .filter(|&v| input.tgt.last_of(v, r).is_some())
        .collect();
    match (seers.first(), seers.last()) {
        (Some(&lo), Some(&hi)) => Some((lo, hi)),
        _ => None,
    }
}

/// Which half of the case analysis a table serves.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    /// Condition `first(j, C) ≤ succ`: the next guard must start early
    /// enough to leave no gap.
    First,
    /// Condition `last(j, C) ≥ succ`: the next guard must reach past the
    /// previous guard's coverage.
    Last,
}

/// Emits the four middle constraints for slot `t` of region `r`: both tilde
/// bounds, one table from the first case set and one from the second.
fn middle_constraints(
    input: &ReductionInput,
    csp: &mut CspInstance,
    vars: &VariableMap,
    guess: &Guess,
    r: usize,
    t: usize,
) -> Result<Option<EarlyNoReason>, TableNotMonotone> {
    let cur = guess.how[r][t - 1];
    let prev = guess.how[r][t - 2];
    if cur == prev {
        // Coverage must strictly advance, which one guard cannot do twice.
        return Ok(Some(EarlyNoReason::RepeatedConsecutiveGuard { region: r, slot: t }));
    }
    let x = vars.var_of(cur).expect("slot names a placed guard");
    let x_prev = vars.var_of(prev).expect("slot names a placed guard");
    let e = input.dec.element(cur.0);
    let e_prev = input.dec.element(prev.0);

    let Some((lo, hi)) = visible_candidate_bounds(input, e, r) else {
        return Ok(Some(EarlyNoReason::SlotSourceBlind { region: r, slot: t }));
    };
    let Some((lo_prev, hi_prev)) = visible_candidate_bounds(input, e_prev, r) else {
        return Ok(Some(EarlyNoReason::SlotSourceBlind { region: r, slot: t - 1 }));
    };
    csp.push_const(x, Cmp::Ge, input.cand.index_of(lo).unwrap());
    csp.push_const(x, Cmp::Le, input.cand.index_of(hi).unwrap());

    let src_last = input.orients.last_of(prev.0, r);
    let tgt_first = input.orients.first_of(cur.0, r);
    let tgt_last = input.orients.last_of(cur.0, r);
    let sweep_lo = input.cand.index_of(lo_prev).unwrap();
    let sweep_hi = input.cand.index_of(hi_prev).unwrap();

    use Orientation::{NonDecreasing as Nd, NonIncreasing as Ni};
    // First case set: selected by how e' views C (last sense) and how e
    // views C (first sense).
    let (cmp, shape) = match (src_last, tgt_first) {
        (Nd, Nd) => (Cmp::Le, TableShape { ascending: true, fill_first: 0, fill_second: usize::MAX, pick_largest: true }),
        (Nd, Ni) => (Cmp::Ge, TableShape { ascending: true, fill_first: usize::MAX, fill_second: 0, pick_largest: false }),
        (Ni, Nd) => (Cmp::Le, TableShape { ascending: false, fill_first: 0, fill_second: usize::MAX, pick_largest: true }),
        (Ni, Ni) => (Cmp::Ge, TableShape { ascending: false, fill_first: usize::MAX, fill_second: 0, pick_largest: false }),
    };
    emit_table(
        input, csp, x, x_prev, e, r, t, sweep_lo, sweep_hi, cmp, shape, Sense::First,
    )?;

    // Second case set: selected by the last sense on both sides.
    let (cmp, shape) = match (src_last, tgt_last) {
        (Nd, Nd) => (Cmp::Ge, TableShape { ascending: false, fill_first: usize::MAX, fill_second: 0, pick_largest: false }),
        (Nd, Ni) => (Cmp::Le, TableShape { ascending: false, fill_first: 0, fill_second: usize::MAX, pick_largest: true }),
        (Ni, Nd) => (Cmp::Ge, TableShape { ascending: true, fill_first: usize::MAX, fill_second: 0, pick_largest: false }),
        (Ni, Ni) => (Cmp::Le, TableShape { ascending: true, fill_first: 0, fill_second: usize::MAX, pick_largest: true }),
    };
    emit_table(
        input, csp, x, x_prev, e, r, t, sweep_lo, sweep_hi, cmp, shape, Sense::Last,
    )?;
    Ok(None)
}

/// Sweep recipe for one case: direction, the fill value written on the side
/// swept first and on the other side (`usize::MAX` stands for N), and
/// whether the defined entries pick the largest or smallest witness.
#[derive(Clone, Copy)]
struct TableShape {
    ascending: bool,
    fill_first: usize,
    fill_second: usize,
    pick_largest: bool,
}

#[allow(clippy::too_many_arguments)]
fn emit_table(
    input: &ReductionInput,
    csp: &mut CspInstance,
    x: usize,
    x_prev: usize,
    e: Element,
    r: usize,
    slot: usize,
    sweep_lo: usize,
    sweep_hi: usize,
    cmp: Cmp,
    shape: TableShape,
    sense: Sense,
) -> Result<(), TableNotMonotone> {
    let n = input.cand.n_bound();
    let resolve = |v: usize| if v == usize::MAX { n } else { v };
    let fill_first = resolve(shape.fill_first);
    let fill_second = resolve(shape.fill_second);
    let region = &input.dec.regions[r];
    let e_cands = element_candidates(input, e);

    // The largest/smallest candidate of e whose view reaches `succ` in the
    // required sense.
    let witness = |succ: usize| -> Option<usize> {
        let ok = |&j: &usize| match sense {
            Sense::First => input.tgt.first_of(j, r).is_some_and(|f| f <= succ),
            Sense::Last => input.tgt.last_of(j, r).is_some_and(|l| l >= succ),
        };
        if shape.pick_largest {
            e_cands.iter().rev().find(|j| ok(j)).copied()
        } else {
            e_cands.iter().find(|j| ok(j)).copied()
        }
    };

    // Value at a defined sweep position, if its guard makes progress
    // definable: the previous guard at candidate position `dom` must see a
    // target whose successor is still inside the region and reachable in e.
    let defined = |dom: usize| -> Option<usize> {
        let a = input.tgt.last_of(input.cand.vertex(dom), r)?;
        let succ = input.targets.successor(a)?;
        if !region.contains(succ) {
            return None;
        }
        witness(succ).map(|j| input.cand.index_of(j).unwrap())
    };

    let mut table = vec![0usize; n + 1];
    if shape.ascending {
        for v in table.iter_mut().take(sweep_lo) {
            *v = fill_first;
        }
        let mut prev = fill_first;
        for dom in sweep_lo..=sweep_hi {
            prev = defined(dom).unwrap_or(prev);
            table[dom] = prev;
        }
        for v in table.iter_mut().skip(sweep_hi + 1) {
            *v = fill_second;
        }
    } else {
        for v in table.iter_mut().skip(sweep_hi + 1) {
            *v = fill_first;
        }
        let mut prev = fill_first;
        for dom in (sweep_lo..=sweep_hi).rev() {
            prev = defined(dom).unwrap_or(prev);
            table[dom] = prev;
        }
        for v in table.iter_mut().take(sweep_lo) {
            *v = fill_second;
        }
    }

    let direction = match check_monotone(&table) {
        Monotonicity::NonDecreasing => Direction::NonDecreasing,
        Monotonicity::NonIncreasing => Direction::NonIncreasing,
        Monotonicity::Neither => return Err(TableNotMonotone { region: r, slot }),
    };
    csp.push_fn(x, cmp, x_prev, table, direction);
    Ok(())
}
