//! ILP models for embedding a problem graph into the BTE and QTE templates,
//! and the expansion of a logical partition assignment into qubit chains.
//!
//! BTE variables, per vertex `i`: `y_i_1`, `y_i_2` (membership in `U1`,
//! `U2`) and `yp_i` (vertex assigned). QTE adds `y_i_3`, `y_i_4` and, per
//! edge `{i, j}` with `i < j`, labels `z_i_j_k` naming which template adjacency
//! realizes it: 1 = `U1(i)-U2(j)`, 2 = `U2(i)-U1(j)`, 3 = `U3(i)-U4(j)`,
//! 4 = `U4(i)-U3(j)`.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::ProblemGraph;
use crate::ilp::{solve, IlpModel, Relation, SolveOptions, SolveStats, SolveStatus, VarId};
use crate::templates::{Template, TemplateKind};
use crate::verify::Embedding;

mod qte_search;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("assignment needs {need} chains of partition U{part}, template has {have}")]
    CapacityMismatch { part: usize, need: usize, have: usize },
    #[error("a {assignment} assignment cannot be expanded on a {template:?} template")]
    KindMismatch { assignment: &'static str, template: TemplateKind },
}

fn y(i: usize, k: usize) -> String {
    format!("y_{i}_{k}")
}

fn yp(i: usize) -> String {
    format!("yp_{i}")
}

fn z(i: usize, j: usize, k: usize) -> String {
    format!("z_{i}_{j}_{k}")
}

fn add(m: &mut IlpModel, name: String) -> VarId {
    m.add_binary(name).expect("generated names are unique and valid")
}

fn row(m: &mut IlpModel, name: String, terms: Vec<(VarId, f64)>, rel: Relation, rhs: f64) {
    m.add_constraint(name, terms, rel, rhs).expect("generated rows reference declared variables");
}

/// `n` link rows, 2 capacity rows and 2 exclusion rows per edge.
pub fn build_bte_model(g: &ProblemGraph, cap1: usize, cap2: usize) -> IlpModel {
    let mut m = IlpModel::new();
    let mut v = Vec::with_capacity(g.n());
    for i in 0..g.n() {
        v.push([add(&mut m, y(i, 1)), add(&mut m, y(i, 2)), add(&mut m, yp(i))]);
    }
    m.set_objective(v.iter().map(|vi| (vi[2], 1.0)).collect()).unwrap();
    for (i, vi) in v.iter().enumerate() {
        row(&mut m, format!("link_{i}"), vec![(vi[2], 1.0), (vi[0], -1.0), (vi[1], -1.0)], Relation::Le, 0.0);
    }
    for (k, cap) in [(0, cap1), (1, cap2)] {
        row(&mut m, format!("cap_{}", k + 1), v.iter().map(|vi| (vi[k], 1.0)).collect(), Relation::Le, cap as f64);
    }
    for &(i, j) in g.edges() {
        let (a, b) = (v[i], v[j]);
        for (k, (s, t)) in [(0, 1), (1, 0)].into_iter().enumerate() {
            row(
                &mut m,
                format!("excl{}_{i}_{j}", k + 1),
                vec![(a[s], 1.0), (b[s], 1.0), (a[t], -1.0), (b[t], -1.0)],
                Relation::Le,
                1.0,
            );
        }
    }
    m
}

/// `n` link rows, 4 capacity rows, 4 contiguity rows per vertex, 8 pair rows
/// and one coverage row per edge.
pub fn build_qte_model(g: &ProblemGraph, sizes: [usize; 4]) -> IlpModel {
    let mut m = IlpModel::new();
    let mut v = Vec::with_capacity(g.n());
    for i in 0..g.n() {
        let ys = [1, 2, 3, 4].map(|k| add(&mut m, y(i, k)));
        let p = add(&mut m, yp(i));
        v.push((ys, p));
    }
    let mut zs = Vec::with_capacity(g.edge_count());
    for &(i, j) in g.edges() {
        zs.push([1, 2, 3, 4].map(|k| add(&mut m, z(i, j, k))));
    }
    m.set_objective(v.iter().map(|(_, p)| (*p, 1.0)).collect()).unwrap();
    for (i, (ys, p)) in v.iter().enumerate() {
        let mut t = vec![(*p, 1.0)];
        t.extend(ys.iter().map(|&x| (x, -1.0)));
        row(&mut m, format!("link_{i}"), t, Relation::Le, 0.0);
    }
    for (k, &size) in sizes.iter().enumerate() {
        row(&mut m, format!("cap_{}", k + 1), v.iter().map(|(ys, _)| (ys[k], 1.0)).collect(), Relation::Le, size as f64);
    }
    // a + b - mid <= 1 forbids a gap at `mid` between members `a` and `b`.
    const GAPS: [(usize, usize, usize); 4] = [(0, 2, 1), (0, 3, 1), (0, 3, 2), (1, 3, 2)];
    for (i, (ys, _)) in v.iter().enumerate() {
        for (c, &(a, b, mid)) in GAPS.iter().enumerate() {
            row(
                &mut m,
                format!("contig{}_{i}", c + 1),
                vec![(ys[a], 1.0), (ys[b], 1.0), (ys[mid], -1.0)],
                Relation::Le,
                1.0,
            );
        }
    }
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        for (k, &(pi, pj)) in QTE_PAIRS.iter().enumerate() {
            let zk = zs[e][k];
            row(&mut m, format!("pair{}a_{i}_{j}", k + 1), vec![(v[i].0[pi], 1.0), (zk, -1.0)], Relation::Ge, 0.0);
            row(&mut m, format!("pair{}b_{i}_{j}", k + 1), vec![(v[j].0[pj], 1.0), (zk, -1.0)], Relation::Ge, 0.0);
        }
        row(&mut m, format!("cover_{i}_{j}"), zs[e].iter().map(|&x| (x, 1.0)).collect(), Relation::Ge, 1.0);
    }
    m
}

/// Label `k` needs partition `QTE_PAIRS[k - 1].0` on `i` and `.1` on `j`.
const QTE_PAIRS: [(usize, usize); 4] = [(0, 1), (1, 0), (2, 3), (3, 2)];

fn value(m: &IlpModel, x: &[bool], name: &str) -> bool {
    m.var(name).is_some_and(|v| x[v.0])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BteAssignment {
    pub in_u1: Vec<bool>,
    pub in_u2: Vec<bool>,
    pub assigned: Vec<bool>,
}

impl BteAssignment {
    /// Reads an assignment out of a solution of [`build_bte_model`].
    pub fn from_solution(g: &ProblemGraph, m: &IlpModel, x: &[bool]) -> Self {
        let n = g.n();
        BteAssignment {
            in_u1: (0..n).map(|i| value(m, x, &y(i, 1))).collect(),
            in_u2: (0..n).map(|i| value(m, x, &y(i, 2))).collect(),
            assigned: (0..n).map(|i| value(m, x, &yp(i))).collect(),
        }
    }

    /// Vertices placed in both partitions.
    pub fn doubled(&self) -> Vec<usize> {
        (0..self.in_u1.len()).filter(|&i| self.in_u1[i] && self.in_u2[i]).collect()
    }

    /// Checks the assignment invariants, returning the first failure.
    pub fn check(&self, g: &ProblemGraph, cap1: usize, cap2: usize) -> Result<(), String> {
        for i in 0..g.n() {
            if self.assigned[i] && !self.in_u1[i] && !self.in_u2[i] {
                return Err(format!("vertex {i} assigned without a partition"));
            }
        }
        let c1 = self.in_u1.iter().filter(|&&b| b).count();
        let c2 = self.in_u2.iter().filter(|&&b| b).count();
        if c1 > cap1 || c2 > cap2 {
            return Err(format!("partition counts ({c1}, {c2}) exceed capacities ({cap1}, {cap2})"));
        }
        let only = |i: usize| (self.in_u1[i] && !self.in_u2[i], self.in_u2[i] && !self.in_u1[i]);
        for &(i, j) in g.edges() {
            let (a1, a2) = only(i);
            let (b1, b2) = only(j);
            if (a1 && b1) || (a2 && b2) {
                return Err(format!("edge {{{i}, {j}}} has both endpoints only in one partition"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QteAssignment {
    pub member: Vec<[bool; 4]>,
    pub assigned: Vec<bool>,
    /// Covering label (1..=4) for each edge, in `g.edges()` order.
    pub labels: Vec<u8>,
}

impl QteAssignment {
    pub fn from_solution(g: &ProblemGraph, m: &IlpModel, x: &[bool]) -> Self {
        let n = g.n();
        let member: Vec<[bool; 4]> = (0..n).map(|i| [1, 2, 3, 4].map(|k| value(m, x, &y(i, k)))).collect();
        let labels = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                (1..=4u8)
                    .find(|&k| {
                        let (pi, pj) = QTE_PAIRS[k as usize - 1];
                        value(m, x, &z(i, j, k as usize)) && member[i][pi] && member[j][pj]
                    })
                    .unwrap_or(0)
            })
            .collect();
        QteAssignment { member, assigned: (0..n).map(|i| value(m, x, &yp(i))).collect(), labels }
    }

    /// Builds the assignment from per-vertex partition bitmasks, labeling each
    /// edge with the first pair its endpoints support.
    fn from_types(g: &ProblemGraph, types: &[u8]) -> Self {
        let member: Vec<[bool; 4]> = types.iter().map(|&m| [0, 1, 2, 3].map(|k| m & (1 << k) != 0)).collect();
        let labels = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                (1..=4u8)
                    .find(|&k| {
                        let (pi, pj) = QTE_PAIRS[k as usize - 1];
                        member[i][pi] && member[j][pj]
                    })
                    .expect("search only returns covered edges")
            })
            .collect();
        QteAssignment { member, assigned: vec![true; g.n()], labels }
    }

    /// The model solution this assignment encodes.
    pub fn to_solution(&self, g: &ProblemGraph, m: &IlpModel) -> Vec<bool> {
        let mut x = vec![false; m.num_vars()];
        let mut set = |name: String| {
            if let Some(v) = m.var(&name) {
                x[v.0] = true;
            }
        };
        for (i, mem) in self.member.iter().enumerate() {
            for k in 0..4 {
                if mem[k] {
                    set(y(i, k + 1));
                }
            }
            if self.assigned[i] {
                set(yp(i));
            }
        }
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            if self.labels[e] > 0 {
                set(z(i, j, self.labels[e] as usize));
            }
        }
        x
    }

    pub fn check(&self, g: &ProblemGraph, sizes: [usize; 4]) -> Result<(), String> {
        for (i, mem) in self.member.iter().enumerate() {
            let set: Vec<usize> = (0..4).filter(|&k| mem[k]).collect();
            if self.assigned[i] && set.is_empty() {
                return Err(format!("vertex {i} assigned without a partition"));
            }
            if let (Some(&lo), Some(&hi)) = (set.first(), set.last()) {
                if hi - lo + 1 != set.len() {
                    return Err(format!("vertex {i} partitions {set:?} are not contiguous"));
                }
            }
        }
        for (k, &size) in sizes.iter().enumerate() {
            let c = self.member.iter().filter(|mem| mem[k]).count();
            if c > size {
                return Err(format!("partition U{} holds {c} vertices, capacity {size}", k + 1));
            }
        }
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            let k = self.labels[e];
            if k == 0 {
                return Err(format!("edge {{{i}, {j}}} has no covering label"));
            }
            let (pi, pj) = QTE_PAIRS[k as usize - 1];
            if !(self.member[i][pi] && self.member[j][pj]) {
                return Err(format!("edge {{{i}, {j}}} label {k} not supported by memberships"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BteOutcome {
    Embeddable(BteAssignment),
    NotEmbeddable,
    /// The time limit expired before the question was settled.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QteOutcome {
    Embeddable(QteAssignment),
    /// The formulation has no full assignment. This is not a proof that the
    /// graph has no QTE embedding.
    NoSolutionFound,
    Unknown,
}

/// An embedding outcome together with solver diagnostics.
#[derive(Debug, Clone)]
pub struct EmbedRun<O> {
    pub outcome: O,
    pub status: SolveStatus,
    pub bound: f64,
    pub stats: SolveStats,
}

/// Solves a BTE model (possibly with extra rows) at target `n`.
pub fn solve_bte_model(g: &ProblemGraph, m: &IlpModel, opts: &SolveOptions) -> EmbedRun<BteOutcome> {
    let opts = SolveOptions { target: Some(g.n() as f64), ..opts.clone() };
    let out = solve(m, &opts).expect("formulation models are well formed");
    let outcome = match out.status {
        SolveStatus::ReachedTarget | SolveStatus::Optimal if out.value >= Some(g.n() as f64) => {
            BteOutcome::Embeddable(BteAssignment::from_solution(g, m, out.incumbent.as_ref().unwrap()))
        }
        SolveStatus::TimeLimit => BteOutcome::Unknown,
        _ => BteOutcome::NotEmbeddable,
    };
    EmbedRun { outcome, status: out.status, bound: out.bound, stats: out.stats }
}

pub fn embed_bte(g: &ProblemGraph, cap1: usize, cap2: usize, time_limit: Option<Duration>) -> EmbedRun<BteOutcome> {
    let m = build_bte_model(g, cap1, cap2);
    solve_bte_model(g, &m, &SolveOptions::new().maybe_time_limit(time_limit))
}

pub fn solve_qte_model(g: &ProblemGraph, m: &IlpModel, opts: &SolveOptions) -> EmbedRun<QteOutcome> {
    let opts = SolveOptions { target: Some(g.n() as f64), ..opts.clone() };
    let out = solve(m, &opts).expect("formulation models are well formed");
    let outcome = match out.status {
        SolveStatus::ReachedTarget | SolveStatus::Optimal if out.value >= Some(g.n() as f64) => {
            QteOutcome::Embeddable(QteAssignment::from_solution(g, m, out.incumbent.as_ref().unwrap()))
        }
        SolveStatus::TimeLimit => QteOutcome::Unknown,
        _ => QteOutcome::NoSolutionFound,
    };
    EmbedRun { outcome, status: out.status, bound: out.bound, stats: out.stats }
}

/// Decides the QTE formulation at target `n`.
///
/// Two BTE problems are tried first, each settling the question exactly when
/// it applies. Projecting a QTE assignment onto `U1 ∪ U4` versus `U2 ∪ U3`
/// (or `U1 ∪ U3` versus `U2 ∪ U4`) gives a BTE assignment with the summed
/// capacities, so if either projection is infeasible, no full QTE assignment
/// exists. Conversely, a BTE embedding with capacities `(min(|U2|, |U3|),
/// |U1| + |U4|)` lifts to a QTE assignment, which is checked against the
/// QTE model itself. Anything else goes to an exact search over per-vertex
/// partition intervals, which decides the same model far faster than
/// branching on its LP relaxation. [`solve_qte_model`] runs the generic
/// solver on the model instead.
pub fn embed_qte(g: &ProblemGraph, sizes: [usize; 4], time_limit: Option<Duration>) -> EmbedRun<QteOutcome> {
    let started = Instant::now();
    let remaining = || time_limit.map(|t| t.saturating_sub(started.elapsed()));
    let mut stats = SolveStats::default();
    let absorb = |stats: &mut SolveStats, s: &SolveStats| {
        stats.nodes += s.nodes;
        stats.lp_iterations += s.lp_iterations;
        stats.max_depth = stats.max_depth.max(s.max_depth);
        stats.used_lp |= s.used_lp;
    };
    let finish = |outcome, status, bound, mut stats: SolveStats| {
        stats.wall_time = started.elapsed();
        EmbedRun { outcome, status, bound, stats }
    };
    let [s1, s2, s3, s4] = sizes;
    for (a, b) in [(s1 + s4, s2 + s3), (s1 + s3, s2 + s4)] {
        let run = embed_bte(g, a, b, remaining());
        absorb(&mut stats, &run.stats);
        match run.outcome {
            BteOutcome::NotEmbeddable => {
                return finish(QteOutcome::NoSolutionFound, SolveStatus::BoundBelowTarget, run.bound, stats);
            }
            BteOutcome::Unknown => return finish(QteOutcome::Unknown, SolveStatus::TimeLimit, run.bound, stats),
            BteOutcome::Embeddable(_) => {}
        }
    }
    let model = build_qte_model(g, sizes);
    let lift = embed_bte(g, s2.min(s3), s1 + s4, remaining());
    absorb(&mut stats, &lift.stats);
    if let BteOutcome::Embeddable(a) = &lift.outcome {
        if let Some(q) = lift_bte(g, a, sizes) {
            if model.is_feasible(&q.to_solution(g, &model)) {
                return finish(QteOutcome::Embeddable(q), SolveStatus::ReachedTarget, g.n() as f64, stats);
            }
        }
    }
    let deadline = remaining().and_then(|t| Instant::now().checked_add(t));
    let (found, nodes) = qte_search::search(g, sizes, deadline);
    stats.nodes += nodes;
    let n = g.n() as f64;
    match found {
        qte_search::Search::Found(types) => {
            let q = QteAssignment::from_types(g, &types);
            assert!(model.is_feasible(&q.to_solution(g, &model)));
            finish(QteOutcome::Embeddable(q), SolveStatus::ReachedTarget, n, stats)
        }
        qte_search::Search::Infeasible => finish(QteOutcome::NoSolutionFound, SolveStatus::BoundBelowTarget, n - 1.0, stats),
        qte_search::Search::TimedOut => finish(QteOutcome::Unknown, SolveStatus::TimeLimit, n, stats),
    }
}

/// Maps a BTE assignment into QTE slots. The first BTE side becomes matched
/// `U2`/`U3` pairs; the second fills `U1`, then `U4`.
fn lift_bte(g: &ProblemGraph, a: &BteAssignment, sizes: [usize; 4]) -> Option<QteAssignment> {
    let mut member = vec![[false; 4]; g.n()];
    let mut in_u1 = 0;
    for i in 0..g.n() {
        if !a.assigned[i] {
            continue;
        }
        if a.in_u1[i] {
            member[i][1] = true;
            member[i][2] = true;
        }
        if a.in_u2[i] {
            if in_u1 < sizes[0] {
                member[i][0] = true;
                in_u1 += 1;
            } else {
                member[i][3] = true;
            }
        }
    }
    let labels = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            (1..=4u8).find(|&k| {
                let (pi, pj) = QTE_PAIRS[k as usize - 1];
                member[i][pi] && member[j][pj]
            })
        })
        .collect::<Option<Vec<u8>>>()?;
    Some(QteAssignment { member, assigned: a.assigned.clone(), labels })
}

/// Either kind of logical assignment.
#[derive(Debug, Clone, Copy)]
pub enum Assignment<'a> {
    Bte(&'a BteAssignment),
    Qte(&'a QteAssignment),
}

/// Hands out chains of one partition in ascending index order.
struct Slots<'t> {
    chains: &'t [Vec<usize>],
    used: Vec<bool>,
    part: usize,
}

impl<'t> Slots<'t> {
    fn new(chains: &'t [Vec<usize>], part: usize) -> Self {
        Slots { chains, used: vec![false; chains.len()], part }
    }

    fn take(&mut self) -> Option<usize> {
        let k = self.used.iter().position(|u| !u)?;
        self.used[k] = true;
        Some(k)
    }

    fn overflow(&self, need: usize) -> EmbedError {
        EmbedError::CapacityMismatch { part: self.part, need, have: self.chains.len() }
    }
}

fn need(members: impl Iterator<Item = bool>) -> usize {
    members.filter(|&b| b).count()
}

/// Expands an assignment into chains on the template. Only assigned
/// vertices receive chains; a vertex in several partitions gets the union of
/// one chain from each.
pub fn assignment_to_physical(a: Assignment<'_>, t: &Template) -> Result<Embedding, EmbedError> {
    let mut e = Embedding::new();
    match a {
        Assignment::Bte(b) => {
            if t.kind != TemplateKind::Bte {
                return Err(EmbedError::KindMismatch { assignment: "BTE", template: t.kind });
            }
            let mut slots = [Slots::new(&t.partitions[0], 1), Slots::new(&t.partitions[1], 2)];
            let needs = [
                need((0..b.assigned.len()).map(|i| b.assigned[i] && b.in_u1[i])),
                need((0..b.assigned.len()).map(|i| b.assigned[i] && b.in_u2[i])),
            ];
            for i in (0..b.assigned.len()).filter(|&i| b.assigned[i]) {
                let mut chain = Vec::new();
                for (k, member) in [b.in_u1[i], b.in_u2[i]].into_iter().enumerate() {
                    if member {
                        let s = slots[k].take().ok_or_else(|| slots[k].overflow(needs[k]))?;
                        chain.extend_from_slice(&slots[k].chains[s]);
                    }
                }
                e.insert(i, chain);
            }
        }
        Assignment::Qte(q) => {
            if t.kind != TemplateKind::Qte {
                return Err(EmbedError::KindMismatch { assignment: "QTE", template: t.kind });
            }
            let mut slots: Vec<Slots> = t.partitions.iter().enumerate().map(|(k, c)| Slots::new(c, k + 1)).collect();
            let active: Vec<usize> = (0..q.assigned.len()).filter(|&i| q.assigned[i]).collect();
            let needs: Vec<usize> = (0..4).map(|k| need(active.iter().map(|&i| q.member[i][k]))).collect();
            let mut picked: Vec<[Option<usize>; 4]> = vec![[None; 4]; q.assigned.len()];
            // Vertices spanning U2 and U3 take matched pairs first.
            for &i in &active {
                if q.member[i][1] && q.member[i][2] {
                    let k = (0..slots[1].used.len()).find(|&k| !slots[1].used[k] && !slots[2].used[k]);
                    let k = k.ok_or_else(|| slots[1].overflow(needs[1]))?;
                    slots[1].used[k] = true;
                    slots[2].used[k] = true;
                    picked[i][1] = Some(k);
                    picked[i][2] = Some(k);
                }
            }
            for &i in &active {
                for k in 0..4 {
                    if q.member[i][k] && picked[i][k].is_none() {
                        let s = slots[k].take().ok_or_else(|| slots[k].overflow(needs[k]))?;
                        picked[i][k] = Some(s);
                    }
                }
            }
            for &i in &active {
                let mut chain = Vec::new();
                for (k, s) in picked[i].iter().enumerate() {
                    if let Some(s) = s {
                        chain.extend_from_slice(&t.partitions[k][*s]);
                    }
                }
                e.insert(i, chain);
            }
        }
    }
    Ok(e)
}
