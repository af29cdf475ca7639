//! Depth-first branch-and-bound for binary maximization.
//!
//! Every node runs bound propagation over the rows (all normalized to `<=`),
//! including an objective cutoff row once a target or incumbent exists, then
//! bounds the subtree with the LP relaxation (warm-started from the previous
//! node) or, for models too large for the dense tableau, with the trivial
//! bound over unfixed variables.

use std::time::{Duration, Instant};

use super::simplex::{DualSimplex, LpStatus, SparseRow};
use super::{IlpError, IlpModel};

const FEAS_TOL: f64 = 1e-9;
const BOUND_TOL: f64 = 1e-6;

/// Above this many tableau entries the search falls back to the trivial bound.
pub const DEFAULT_LP_ENTRY_LIMIT: usize = 1_500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// LP relaxation when the tableau fits [`DEFAULT_LP_ENTRY_LIMIT`].
    Auto,
    Lp,
    /// Propagation plus the trivial bound only.
    Propagation,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub target: Option<f64>,
    pub time_limit: Option<Duration>,
    pub bound_mode: BoundMode,
    pub node_limit: Option<u64>,
    /// Record the global upper bound after every node.
    pub trace_bounds: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { target: None, time_limit: None, bound_mode: BoundMode::Auto, node_limit: None, trace_bounds: false }
    }
}

impl SolveOptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn target(mut self, t: f64) -> Self {
        self.target = Some(t);
        self
    }

    pub fn time_limit(mut self, d: Duration) -> Self {
        self.time_limit = Some(d);
        self
    }

    pub fn maybe_time_limit(mut self, d: Option<Duration>) -> Self {
        self.time_limit = d;
        self
    }

    pub fn bound_mode(mut self, b: BoundMode) -> Self {
        self.bound_mode = b;
        self
    }

    pub fn node_limit(mut self, n: u64) -> Self {
        self.node_limit = Some(n);
        self
    }

    pub fn trace_bounds(mut self, on: bool) -> Self {
        self.trace_bounds = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    ReachedTarget,
    Optimal,
    BoundBelowTarget,
    Infeasible,
    /// Time or node limit hit before the search finished.
    TimeLimit,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub max_depth: usize,
    pub wall_time: Duration,
    pub used_lp: bool,
    /// Global upper bound after each node, when requested.
    pub bound_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub incumbent: Option<Vec<bool>>,
    pub value: Option<f64>,
    /// Best proven upper bound on the optimum.
    pub bound: f64,
    pub stats: SolveStats,
}

/// Rows in `<=` form with per-row activity bookkeeping.
struct Rows {
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
    rhs: Vec<f64>,
    max_abs: Vec<f64>,
    /// Minimum activity given the current fixings.
    min_act: Vec<f64>,
    /// `(row, coefficient)` lists per variable.
    var_start: Vec<usize>,
    var_rows: Vec<(usize, f64)>,
}

impl Rows {
    fn row(&self, r: usize) -> std::ops::Range<usize> {
        self.start[r]..self.start[r + 1]
    }
}

fn normalized_rows(m: &IlpModel) -> Vec<SparseRow> {
    let n = m.num_vars();
    let mut dense = vec![0.0; n];
    let mut out = Vec::new();
    for c in m.constraints() {
        let mut touched = Vec::new();
        for &(v, a) in &c.terms {
            if dense[v.0] == 0.0 {
                touched.push(v.0);
            }
            dense[v.0] += a;
        }
        touched.sort_unstable();
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for &j in &touched {
            if dense[j] != 0.0 {
                idx.push(j);
                val.push(dense[j]);
            }
            dense[j] = 0.0;
        }
        let mut push = |sign: f64| {
            out.push(SparseRow { idx: idx.clone(), val: val.iter().map(|a| sign * a).collect(), rhs: sign * c.rhs });
        };
        match c.relation {
            super::Relation::Le => push(1.0),
            super::Relation::Ge => push(-1.0),
            super::Relation::Eq => {
                push(1.0);
                push(-1.0);
            }
        }
    }
    out
}

struct Engine<'a> {
    model: &'a IlpModel,
    n: usize,
    cost: Vec<f64>,
    integral: bool,
    rows: Rows,
    cutoff_row: usize,
    value: Vec<i8>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    lp: Option<DualSimplex>,
    lp_iter_cap: u64,

    target: Option<f64>,
    incumbent: Option<(Vec<bool>, f64)>,
    pruned_max: f64,
    pending: Vec<f64>,
    trace: Option<Vec<f64>>,
    last_global: f64,

    started: Instant,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    stopped_bound: Option<f64>,
    reached: bool,
    stats: SolveStats,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Engine<'a> {
    fn new(model: &'a IlpModel, opts: &SolveOptions) -> Self {
        let n = model.num_vars();
        let cost = model.objective_dense();
        let integral = cost.iter().all(|c| c.fract() == 0.0);
        let mut sparse = normalized_rows(model);
        // Rows that no 0-1 point can violate carry no information.
        sparse.retain(|r| {
            let max_act: f64 = r.val.iter().map(|&a| a.max(0.0)).sum();
            max_act > r.rhs + FEAS_TOL
        });

        let lp_entries = sparse.len().saturating_mul(n);
        let use_lp = match opts.bound_mode {
            BoundMode::Lp => true,
            BoundMode::Propagation => false,
            BoundMode::Auto => lp_entries <= DEFAULT_LP_ENTRY_LIMIT,
        } && n > 0;
        let lp = use_lp.then(|| DualSimplex::new(n, &cost, &sparse));

        // The cutoff row `-c.x <= -cutoff` sits last and starts inactive.
        let cutoff_row = sparse.len();
        let cut_idx: Vec<usize> = (0..n).filter(|&j| cost[j] != 0.0).collect();
        let cut_val: Vec<f64> = cut_idx.iter().map(|&j| -cost[j]).collect();
        sparse.push(SparseRow { idx: cut_idx, val: cut_val, rhs: f64::INFINITY });

        let mut start = vec![0];
        let mut idx = Vec::new();
        let mut val = Vec::new();
        let mut rhs = Vec::new();
        let mut max_abs = Vec::new();
        let mut min_act = Vec::new();
        let mut deg = vec![0usize; n + 1];
        for r in &sparse {
            idx.extend_from_slice(&r.idx);
            val.extend_from_slice(&r.val);
            start.push(idx.len());
            rhs.push(r.rhs);
            max_abs.push(r.val.iter().fold(0.0f64, |m, a| m.max(a.abs())));
            min_act.push(r.val.iter().map(|&a| a.min(0.0)).sum());
            for &j in &r.idx {
                deg[j + 1] += 1;
            }
        }
        for j in 0..n {
            deg[j + 1] += deg[j];
        }
        let mut fill = deg.clone();
        let mut var_rows = vec![(0, 0.0); idx.len()];
        for (r, w) in start.windows(2).enumerate() {
            for p in w[0]..w[1] {
                let j = idx[p];
                var_rows[fill[j]] = (r, val[p]);
                fill[j] += 1;
            }
        }
        let num_rows = rhs.len();
        let rows = Rows { start, idx, val, rhs, max_abs, min_act, var_start: deg, var_rows };

        let started = Instant::now();
        let lp_iter_cap = 10 * (num_rows + n) as u64 + 100;
        let mut e = Engine {
            model,
            n,
            cost,
            integral,
            rows,
            cutoff_row,
            value: vec![-1; n],
            trail: Vec::with_capacity(n),
            queue: (0..num_rows).collect(),
            queued: vec![true; num_rows],
            lp,
            lp_iter_cap,
            target: opts.target,
            incumbent: None,
            pruned_max: f64::NEG_INFINITY,
            pending: Vec::new(),
            trace: opts.trace_bounds.then(Vec::new),
            last_global: f64::INFINITY,
            started,
            deadline: opts.time_limit.and_then(|d| started.checked_add(d)),
            node_limit: opts.node_limit,
            stopped_bound: None,
            reached: false,
            stats: SolveStats { used_lp: use_lp, ..SolveStats::default() },
        };
        e.refresh_cutoff();
        e
    }

    fn delta(&self) -> f64 {
        if self.integral {
            1.0
        } else {
            1e-7
        }
    }

    fn cutoff(&self) -> f64 {
        let t = self.target.unwrap_or(f64::NEG_INFINITY);
        let inc = self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |(_, v)| v + self.delta());
        t.max(inc)
    }

    fn refresh_cutoff(&mut self) {
        let c = self.cutoff();
        let r = self.cutoff_row;
        let rhs = if c.is_finite() {
            if self.integral {
                -c.ceil()
            } else {
                -c + FEAS_TOL
            }
        } else {
            f64::INFINITY
        };
        if rhs != self.rows.rhs[r] {
            self.rows.rhs[r] = rhs;
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn assign(&mut self, j: usize, v: bool) {
        debug_assert_eq!(self.value[j], -1);
        self.value[j] = v as i8;
        self.trail.push(j);
        let x = v as i8 as f64;
        for p in self.rows.var_start[j]..self.rows.var_start[j + 1] {
            let (r, a) = self.rows.var_rows[p];
            self.rows.min_act[r] += a * x - a.min(0.0);
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let j = self.trail.pop().unwrap();
            let x = self.value[j] as f64;
            for p in self.rows.var_start[j]..self.rows.var_start[j + 1] {
                let (r, a) = self.rows.var_rows[p];
                self.rows.min_act[r] -= a * x - a.min(0.0);
            }
            self.value[j] = -1;
            if let Some(lp) = self.lp.as_mut() {
                if self.trail.len() < lp.synced {
                    lp.unfix(j);
                }
            }
        }
        if let Some(lp) = self.lp.as_mut() {
            lp.synced = lp.synced.min(mark);
        }
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    /// Returns false on a conflict.
    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let rhs = self.rows.rhs[r];
            let slack = rhs - self.rows.min_act[r];
            if slack < -FEAS_TOL {
                for q in self.queue.drain(..) {
                    self.queued[q] = false;
                }
                return false;
            }
            if slack >= self.rows.max_abs[r] - FEAS_TOL {
                continue;
            }
            for p in self.rows.row(r) {
                let j = self.rows.idx[p];
                if self.value[j] != -1 {
                    continue;
                }
                let a = self.rows.val[p];
                // Re-read the slack: earlier fixes in this loop may have moved it.
                let slack = self.rows.rhs[r] - self.rows.min_act[r];
                if a.abs() > slack + FEAS_TOL {
                    self.assign(j, a < 0.0);
                }
            }
        }
        true
    }

    fn global_bound(&self, current: f64) -> f64 {
        let inc = self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |(_, v)| *v);
        let pend = self.pending.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        inc.max(self.pruned_max).max(pend).max(current)
    }

    fn record_trace(&mut self, current: f64) {
        if self.trace.is_some() {
            let g = self.global_bound(current).min(self.last_global);
            self.last_global = g;
            self.trace.as_mut().unwrap().push(g);
        }
    }

    fn prune(&mut self, bound: f64) {
        self.pruned_max = self.pruned_max.max(bound);
        self.record_trace(f64::NEG_INFINITY);
    }

    /// Upper bound on any node pruned by a propagation conflict.
    fn conflict_bound(&self) -> f64 {
        let c = self.cutoff();
        if !c.is_finite() {
            f64::NEG_INFINITY
        } else if self.integral {
            c.ceil() - 1.0
        } else {
            c - FEAS_TOL * c.abs().max(1.0)
        }
    }

    fn offer(&mut self, x: Vec<bool>) -> bool {
        if !self.model.is_feasible(&x) {
            return false;
        }
        let v = self.model.objective_value(&x);
        if self.incumbent.as_ref().is_none_or(|(_, best)| v > *best) {
            self.incumbent = Some((x, v));
            self.refresh_cutoff();
            if self.target.is_some_and(|t| v >= t - FEAS_TOL) {
                self.reached = true;
            }
        }
        true
    }

    fn limits_hit(&self) -> bool {
        if self.node_limit.is_some_and(|l| self.stats.nodes > l) {
            return true;
        }
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn node(&mut self, parent_bound: f64, depth: usize) -> Flow {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if self.limits_hit() {
            self.stopped_bound = Some(self.global_bound(parent_bound));
            return Flow::Stop;
        }
        if !self.propagate() {
            self.prune(self.conflict_bound());
            return Flow::Continue;
        }

        let mut fixed_obj = 0.0;
        let mut free_obj = 0.0;
        for j in 0..self.n {
            match self.value[j] {
                -1 => free_obj += self.cost[j].max(0.0),
                1 => fixed_obj += self.cost[j],
                _ => {}
            }
        }
        let mut bound = parent_bound.min(fixed_obj + free_obj);
        let mut lp_point = false;
        if let Some(lp) = self.lp.as_mut() {
            for t in lp.synced..self.trail.len() {
                let j = self.trail[t];
                lp.fix(j, self.value[j] as f64);
            }
            lp.synced = self.trail.len();
            let before = lp.iterations;
            let status = lp.solve(self.lp_iter_cap, self.deadline);
            self.stats.lp_iterations += lp.iterations - before;
            match status {
                LpStatus::Infeasible => {
                    self.prune(f64::NEG_INFINITY);
                    return Flow::Continue;
                }
                LpStatus::Optimal => {
                    bound = bound.min(lp.objective());
                    lp_point = true;
                }
                LpStatus::Stalled => bound = bound.min(lp.objective()),
            }
        }
        if self.integral {
            bound = (bound + BOUND_TOL).floor();
        }
        let cutoff = self.cutoff();
        if bound < cutoff - BOUND_TOL {
            self.prune(bound);
            return Flow::Continue;
        }
        self.record_trace(bound);

        // Pick the branching variable; an integral LP point is a candidate.
        let mut branch_var = None;
        if lp_point {
            let lp = self.lp.as_ref().unwrap();
            let mut best = f64::INFINITY;
            for j in 0..self.n {
                if self.value[j] != -1 {
                    continue;
                }
                let x = lp.value(j);
                let frac = (x - x.round()).abs();
                if frac > 1e-7 {
                    let score = (x - 0.5).abs();
                    if score < best {
                        best = score;
                        branch_var = Some(j);
                    }
                }
            }
            if branch_var.is_none() {
                let x: Vec<bool> = (0..self.n)
                    .map(|j| if self.value[j] == -1 { lp.value(j) > 0.5 } else { self.value[j] == 1 })
                    .collect();
                let v = self.model.objective_value(&x);
                if self.offer(x) {
                    if self.reached {
                        self.stopped_bound = Some(self.global_bound(bound));
                        return Flow::Stop;
                    }
                    if v >= bound - BOUND_TOL {
                        self.prune(v);
                        return Flow::Continue;
                    }
                }
            }
        }
        if branch_var.is_none() {
            branch_var = (0..self.n).find(|&j| self.value[j] == -1);
        }
        let Some(j) = branch_var else {
            let x: Vec<bool> = self.value.iter().map(|&v| v == 1).collect();
            let v = self.model.objective_value(&x);
            if self.offer(x) {
                self.prune(v);
                if self.reached {
                    self.stopped_bound = Some(self.global_bound(v));
                    return Flow::Stop;
                }
            } else {
                self.prune(f64::NEG_INFINITY);
            }
            return Flow::Continue;
        };

        for (k, side) in [true, false].into_iter().enumerate() {
            let mark = self.trail.len();
            if k == 0 {
                self.pending.push(bound);
            }
            self.assign(j, side);
            let flow = self.node(bound, depth + 1);
            self.undo_to(mark);
            if k == 0 {
                self.pending.pop();
            }
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
            // A new incumbent may already close the node.
            if bound < self.cutoff() - BOUND_TOL {
                self.prune(bound);
                return Flow::Continue;
            }
        }
        Flow::Continue
    }
}

/// Solves `m` exactly, stopping early once an incumbent reaches `target`.
pub fn solve(m: &IlpModel, opts: &SolveOptions) -> Result<SolveOutcome, IlpError> {
    m.validate()?;
    // The recursion is as deep as the number of branchings on a path, so the
    // search gets its own thread with room to spare.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(s, || run(m, opts))
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

const SEARCH_STACK: usize = 256 << 20;

fn run(m: &IlpModel, opts: &SolveOptions) -> Result<SolveOutcome, IlpError> {
    let mut e = Engine::new(m, opts);
    let flow = e.node(f64::INFINITY, 0);
    let inc_value = e.incumbent.as_ref().map(|(_, v)| *v);
    let (status, bound) = match flow {
        Flow::Stop if e.reached => (SolveStatus::ReachedTarget, e.stopped_bound.unwrap_or(f64::INFINITY)),
        Flow::Stop => (SolveStatus::TimeLimit, e.stopped_bound.unwrap_or(f64::INFINITY)),
        Flow::Continue => {
            let bound = e.global_bound(f64::NEG_INFINITY);
            match (e.target, inc_value) {
                (Some(_), _) => (SolveStatus::BoundBelowTarget, bound),
                (None, Some(_)) => (SolveStatus::Optimal, bound),
                (None, None) => (SolveStatus::Infeasible, f64::NEG_INFINITY),
            }
        }
    };
    e.stats.wall_time = e.started.elapsed();
    if let Some(t) = e.trace.take() {
        e.stats.bound_trace = t;
    }
    let (incumbent, value) = match e.incumbent.take() {
        Some((x, v)) => (Some(x), Some(v)),
        None => (None, None),
    };
    Ok(SolveOutcome { status, incumbent, value, bound, stats: e.stats })
}

/// LP relaxation bound for the subproblem with the given variables fixed,
/// never weaker than the trivial bound over unfixed variables. Returns
/// `-inf` when the fixings are infeasible for the relaxation.
pub fn lp_relaxation_bound(m: &IlpModel, fixed: &[Option<bool>]) -> Result<f64, IlpError> {
    m.validate()?;
    let n = m.num_vars();
    if fixed.len() > n {
        return Err(IlpError::MalformedModel(format!("{} fixings for {n} variables", fixed.len())));
    }
    let cost = m.objective_dense();
    let val = |j: usize| fixed.get(j).copied().flatten();
    let trivial: f64 = (0..n)
        .map(|j| match val(j) {
            Some(true) => cost[j],
            Some(false) => 0.0,
            None => cost[j].max(0.0),
        })
        .sum();
    if n == 0 {
        return Ok(0.0);
    }
    let rows = normalized_rows(m);
    let mut lp = DualSimplex::new(n, &cost, &rows);
    for j in 0..n {
        if let Some(v) = val(j) {
            lp.fix(j, v as i8 as f64);
        }
    }
    let cap = 50 * (rows.len() + n) as u64 + 1000;
    Ok(match lp.solve(cap, None) {
        LpStatus::Infeasible => f64::NEG_INFINITY,
        _ => lp.objective().min(trivial),
    })
}
