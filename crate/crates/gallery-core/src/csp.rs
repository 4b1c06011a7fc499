//! Monotone 2-CSP: variables over `{0..N}` with constraints `x ⋈ f(x')` for
//! `⋈ ∈ {≤, ≥}` and monotone `f`, decided through a 2-CNF-SAT encoding.
//!
//! The encoding introduces a boolean `x[d]` per variable and level meaning
//! "x ≥ d". Levels 0 and N+1 are forced true and false, an implication chain
//! keeps the true levels a prefix, and each constraint contributes one clause
//! per level. Monotonicity of `f` is what makes every clause binary: without
//! it (or with higher constraint arity) the problem encodes clique-finding,
//! so neither is accepted here.

use std::fmt;

/// Comparison sense of a constraint's left-hand side against its right-hand
/// side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
}

impl Cmp {
    pub fn token(self) -> &'static str {
        match self {
            Cmp::Le => "le",
            Cmp::Ge => "ge",
        }
    }
}

/// Declared monotonicity direction of a function table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

/// Result of scanning a table for monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

/// Exact single-scan classification of a value table.
///
/// A constant table is reported `NonDecreasing`; the caller may also declare
/// it `NonIncreasing`, which `matches_direction` accepts.
pub fn check_monotone(table: &[usize]) -> Monotonicity {
    let non_dec = table.windows(2).all(|w| w[0] <= w[1]);
    let non_inc = table.windows(2).all(|w| w[0] >= w[1]);
    match (non_dec, non_inc) {
        (true, _) => Monotonicity::NonDecreasing,
        (false, true) => Monotonicity::NonIncreasing,
        (false, false) => Monotonicity::Neither,
    }
}

fn matches_direction(table: &[usize], dir: Direction) -> bool {
    match dir {
        Direction::NonDecreasing => table.windows(2).all(|w| w[0] <= w[1]),
        Direction::NonIncreasing => table.windows(2).all(|w| w[0] >= w[1]),
    }
}

/// Right-hand side of a constraint: a constant, or a monotone function of
/// another variable given as an explicit table over `{0..N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rhs {
    Const(usize),
    Fn {
        var: usize,
        table: Vec<usize>,
        direction: Direction,
    },
}

/// One constraint `lhs ⋈ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: usize,
    pub cmp: Cmp,
    pub rhs: Rhs,
}

/// A monotone 2-CSP instance: `var_count` variables over `{0..n_bound}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    pub var_count: usize,
    pub n_bound: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CspError {
    Invalid(String),
    /// A satisfying 2-SAT model whose true levels are not a prefix; cannot
    /// happen for models produced by the encoding.
    MalformedModel,
    Parse(String),
}

impl fmt::Display for CspError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CspError::Invalid(why) => write!(f, "invalid CSP instance: {why}"),
            CspError::MalformedModel => write!(f, "2-SAT model levels are not prefix-closed"),
            CspError::Parse(why) => write!(f, "CSP parse error: {why}"),
        }
    }
}

impl std::error::Error for CspError {}

/// Total assignment of domain values to variables.
pub type Assignment = Vec<usize>;

impl CspInstance {
    pub fn new(var_count: usize, n_bound: usize) -> Self {
        CspInstance {
            var_count,
            n_bound,
            constraints: Vec::new(),
        }
    }

    pub fn push_const(&mut self, lhs: usize, cmp: Cmp, beta: usize) {
        self.constraints.push(Constraint {
            lhs,
            cmp,
            rhs: Rhs::Const(beta),
        });
    }

    pub fn push_fn(&mut self, lhs: usize, cmp: Cmp, var: usize, table: Vec<usize>, direction: Direction) {
        self.constraints.push(Constraint {
            lhs,
            cmp,
            rhs: Rhs::Fn {
                var,
                table,
                direction,
            },
        });
    }

    /// Structural validation: index ranges, table shapes, declared
    /// directions, distinct variables in binary constraints.
    pub fn validate(&self) -> Result<(), CspError> {
        for (idx, c) in self.constraints.iter().enumerate() {
            let fail = |why: String| Err(CspError::Invalid(format!("constraint {idx}: {why}")));
            if c.lhs >= self.var_count {
                return fail(format!("lhs variable {} out of range", c.lhs));
            }
            match &c.rhs {
                Rhs::Const(beta) => {
                    if *beta > self.n_bound {
                        return fail(format!("constant {beta} exceeds N={}", self.n_bound));
                    }
                }
                Rhs::Fn {
                    var,
                    table,
                    direction,
                } => {
                    if *var >= self.var_count {
                        return fail(format!("rhs variable {var} out of range"));
                    }
                    if *var == c.lhs {
                        return fail("binary constraint on a single variable".into());
                    }
                    if table.len() != self.n_bound + 1 {
                        return fail(format!(
                            "table length {} != N+1 = {}",
                            table.len(),
                            self.n_bound + 1
                        ));
                    }
                    if let Some(v) = table.iter().find(|&&v| v > self.n_bound) {
                        return fail(format!("table value {v} exceeds N={}", self.n_bound));
                    }
                    if !matches_direction(table, *direction) {
                        return fail("table does not match its declared direction".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Direct evaluation of all constraints under an assignment.
    pub fn satisfied_by(&self, alpha: &Assignment) -> bool {
        if alpha.len() != self.var_count || alpha.iter().any(|&v| v > self.n_bound) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = alpha[c.lhs];
            let rhs = match &c.rhs {
                Rhs::Const(beta) => *beta,
                Rhs::Fn { var, table, .. } => table[alpha[*var]],
            };
            match c.cmp {
                Cmp::Le => lhs <= rhs,
                Cmp::Ge => lhs >= rhs,
            }
        })
    }
}

/// A 2-CNF-SAT instance. Variables are indexed densely; each clause has
/// exactly two literals (unit clauses repeat one literal).
#[derive(Debug, Clone, Default)]
pub struct TwoSatInstance {
    pub var_count: usize,
    pub clauses: Vec<(Lit, Lit)>,
}

/// A literal: variable index and polarity (`true` = positive).
pub type Lit = (usize, bool);

impl TwoSatInstance {
    pub fn new(var_count: usize) -> Self {
        TwoSatInstance {
            var_count,
            clauses: Vec::new(),
        }
    }

    pub fn clause(&mut self, a: Lit, b: Lit) {
        self.clauses.push((a, b));
    }

    pub fn unit(&mut self, a: Lit) {
        self.clauses.push((a, a));
    }

    /// Implication `a → b`, stored as `(¬a ∨ b)`.
    pub fn implies(&mut self, a: Lit, b: Lit) {
        self.clause((a.0, !a.1), b);
    }
}

/// Index of the boolean `x[d]` in the encoded instance.
fn level_var(n_bound: usize, var: usize, d: usize) -> usize {
    var * (n_bound + 2) + d
}

/// Encodes a CSP instance as 2-CNF-SAT, emitting exactly the five clause
/// families: level-0 / level-(N+1) units, the order chain, constant clauses,
/// and one clause per level for each function constraint.
pub fn encode(inst: &CspInstance) -> TwoSatInstance {
    let n = inst.n_bound;
    let mut ts = TwoSatInstance::new(inst.var_count * (n + 2));
    let lv = |var: usize, d: usize| (level_var(n, var, d), true);

    for x in 0..inst.var_count {
        ts.unit(lv(x, 0));
        ts.unit((level_var(n, x, n + 1), false));
        for d in 1..=n + 1 {
            ts.implies(lv(x, d), lv(x, d - 1));
        }
    }

    for c in &inst.constraints {
        match (&c.rhs, c.cmp) {
            (Rhs::Const(beta), Cmp::Le) => {
                if *beta < n + 1 {
                    ts.unit((level_var(n, c.lhs, beta + 1), false));
                }
                // x <= N+1 or larger is vacuous.
            }
            (Rhs::Const(beta), Cmp::Ge) => {
                if *beta <= n {
                    ts.unit(lv(c.lhs, *beta));
                } else {
                    // Out of range: no value satisfies it. Force a
                    // contradiction on x[0].
                    ts.unit((level_var(n, c.lhs, 0), false));
                }
            }
            (Rhs::Fn { var, table, direction }, cmp) => {
                let j = *var;
                let i = c.lhs;
                // The declared direction picks the clause family; validate()
                // guarantees it matches the table.
                let non_dec = *direction == Direction::NonDecreasing;
                for d in 0..=n {
                    let fd = table[d];
                    match (cmp, non_dec) {
                        // x_i >= f(x_j), f non-decreasing: x_j[d] -> x_i[f(d)]
                        (Cmp::Ge, true) => ts.implies(lv(j, d), lv(i, fd)),
                        // x_i >= f(x_j), f non-increasing: ¬x_j[d+1] -> x_i[f(d)]
                        (Cmp::Ge, false) => {
                            ts.implies((level_var(n, j, d + 1), false), lv(i, fd))
                        }
                        // x_i <= f(x_j), f non-decreasing: ¬x_j[d+1] -> ¬x_i[f(d)+1]
                        // (if x_j <= d then x_i <= f(d); binding at d = x_j).
                        (Cmp::Le, true) => ts.implies(
                            (level_var(n, j, d + 1), false),
                            (level_var(n, i, fd + 1), false),
                        ),
                        // x_i <= f(x_j), f non-increasing: x_j[d] -> ¬x_i[f(d)+1]
                        (Cmp::Le, false) => {
                            ts.implies(lv(j, d), (level_var(n, i, fd + 1), false))
                        }
                    }
                }
            }
        }
    }
    ts
}

/// Expected clause count of `encode` for an instance: the per-variable
/// families plus one clause per constant constraint and `N+1` per function
/// constraint. Out-of-range `>=` constants also emit one clause.
pub fn encoded_clause_count(inst: &CspInstance) -> usize {
    let n = inst.n_bound;
    let mut count = inst.var_count * (n + 3);
    for c in &inst.constraints {
        count += match &c.rhs {
            Rhs::Const(beta) => {
                if c.cmp == Cmp::Le && *beta > n {
                    0
                } else {
                    1
                }
            }
            Rhs::Fn { .. } => n + 1,
        };
    }
    count
}

/// Solves 2-SAT by strongly connected components of the implication graph.
/// Returns a model, or `None` when some variable shares a component with its
/// negation.
pub fn solve_2sat(ts: &TwoSatInstance) -> Option<Vec<bool>> {
    let node_count = 2 * ts.var_count;
    let node = |lit: Lit| -> usize { lit.0 * 2 + usize::from(lit.1) };
    let negate = |v: usize| v ^ 1;

    // Implication graph: (a ∨ b) gives ¬a → b and ¬b → a.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); node_count];
    for &(a, b) in &ts.clauses {
        adj[negate(node(a))].push(node(b) as u32);
        adj[negate(node(b))].push(node(a) as u32);
    }

    // Iterative Tarjan SCC.
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; node_count];
    let mut low = vec![0u32; node_count];
    let mut comp = vec![UNSET; node_count];
    let mut on_stack = vec![false; node_count];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut comp_count = 0u32;
    let mut call: Vec<(u32, u32)> = Vec::new();

    for start in 0..node_count {
        if index[start] != UNSET {
            continue;
        }
        call.push((start as u32, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let v = v as usize;
            if *edge == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v as u32);
                on_stack[v] = true;
            }
            if (*edge as usize) < adj[v].len() {
                let w = adj[v][*edge as usize] as usize;
                *edge += 1;
                if index[w] == UNSET {
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap() as usize;
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    let p = p as usize;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }

    let mut model = vec![false; ts.var_count];
    for x in 0..ts.var_count {
        let pos = comp[2 * x + 1];
        let neg = comp[2 * x];
        if pos == neg {
            return None;
        }
        // Tarjan numbers components in reverse topological order, so the
        // later component in topological order has the smaller index; assign
        // true to the literal whose component comes later.
        model[x] = pos < neg;
    }
    Some(model)
}

/// Reads the assignment out of a satisfying model: each variable takes the
/// largest level whose boolean is true. The order clauses make the true
/// levels a prefix, so this is well defined.
pub fn extract(inst: &CspInstance, model: &[bool]) -> Result<Assignment, CspError> {
    let n = inst.n_bound;
    let mut alpha = Vec::with_capacity(inst.var_count);
    for x in 0..inst.var_count {
        let levels: Vec<bool> = (0..=n + 1).map(|d| model[level_var(n, x, d)]).collect();
        let value = levels.iter().take_while(|&&b| b).count();
        if value == 0 || levels[value..].iter().any(|&b| b) {
            return Err(CspError::MalformedModel);
        }
        alpha.push(value - 1);
    }
    Ok(alpha)
}

/// Decision outcome of a CSP solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CspOutcome {
    Satisfiable(Assignment),
    Unsatisfiable,
}

/// Full pipeline: encode, solve the 2-SAT instance, extract the assignment.
pub fn solve_csp(inst: &CspInstance) -> Result<CspOutcome, CspError> {
    inst.validate()?;
    let ts = encode(inst);
    match solve_2sat(&ts) {
        None => Ok(CspOutcome::Unsatisfiable),
        Some(model) => {
            let alpha = extract(inst, &model)?;
            debug_assert!(inst.satisfied_by(&alpha));
            Ok(CspOutcome::Satisfiable(alpha))
        }
    }
}

/// Writes the instance text format: a `csp <varCount> <N>` header, then one
/// line per constraint.
pub fn write_csp(inst: &CspInstance) -> String {
    let mut out = format!("csp {} {}\n", inst.var_count, inst.n_bound);
    for c in &inst.constraints {
        match &c.rhs {
            Rhs::Const(beta) => {
                out.push_str(&format!("const {} {} {}\n", c.lhs, c.cmp.token(), beta));
            }
            Rhs::Fn { var, table, .. } => {
                out.push_str(&format!("fn {} {} {}", c.lhs, c.cmp.token(), var));
                for v in table {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Parses the instance text format. The declared direction of each function
/// constraint is recovered from its table.
pub fn parse_csp(text: &str) -> Result<CspInstance, CspError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| CspError::Parse("empty file".into()))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("csp") {
        return Err(CspError::Parse("header must start with `csp`".into()));
    }
    let var_count: usize = tok
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CspError::Parse("bad variable count".into()))?;
    let n_bound: usize = tok
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CspError::Parse("bad domain bound".into()))?;
    if tok.next().is_some() {
        return Err(CspError::Parse("trailing tokens in header".into()));
    }
    let mut inst = CspInstance::new(var_count, n_bound);
    for line in lines {
        let mut tok = line.split_whitespace();
        let kind = tok.next().unwrap();
        let parse_cmp = |t: Option<&str>| match t {
            Some("le") => Ok(Cmp::Le),
            Some("ge") => Ok(Cmp::Ge),
            other => Err(CspError::Parse(format!("bad comparison {other:?}"))),
        };
        let parse_idx = |t: Option<&str>| {
            t.and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| CspError::Parse(format!("bad index in `{line}`")))
        };
        match kind {
            "const" => {
                let lhs = parse_idx(tok.next())?;
                let cmp = parse_cmp(tok.next())?;
                let beta = parse_idx(tok.next())?;
                if tok.next().is_some() {
                    return Err(CspError::Parse(format!("trailing tokens in `{line}`")));
                }
                inst.push_const(lhs, cmp, beta);
            }
            "fn" => {
                let lhs = parse_idx(tok.next())?;
                let cmp = parse_cmp(tok.next())?;
                let var = parse_idx(tok.next())?;
                let table: Vec<usize> = tok
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| CspError::Parse(format!("bad table value in `{line}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let direction = match check_monotone(&table) {
                    Monotonicity::NonDecreasing => Direction::NonDecreasing,
                    Monotonicity::NonIncreasing => Direction::NonIncreasing,
                    Monotonicity::Neither => {
                        return Err(CspError::Parse(format!(
                            "non-monotone table in `{line}`"
                        )))
                    }
                };
                inst.push_fn(lhs, cmp, var, table, direction);
            }
            other => return Err(CspError::Parse(format!("unknown constraint kind `{other}`"))),
        }
    }
    inst.validate()?;
    Ok(inst)
}
