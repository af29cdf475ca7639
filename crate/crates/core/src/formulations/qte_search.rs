//! Exact search over the QTE formulation in its combinatorial form.
//!
//! With every vertex linked, a feasible point of the QTE model is fully
//! described by the set of partitions each vertex belongs to. Contiguity
//! leaves ten such sets (intervals of `U1..U4`), an edge can be labeled iff
//! the two intervals contain one of the four label pairs, and capacity is a
//! per-partition count. The search assigns intervals depth first with
//! forward checking, a capacity bound over every partition subset, and
//! ordering constraints between twin vertices.

use std::time::Instant;

use crate::graph::ProblemGraph;

/// Interval memberships as partition bitmasks, cheapest first.
pub(super) const TYPES: [u8; 10] = [0b0010, 0b0100, 0b0001, 0b1000, 0b0110, 0b0011, 0b1100, 0b0111, 0b1110, 0b1111];

const ALL: u16 = (1 << TYPES.len()) - 1;

fn compatible(a: u8, b: u8) -> bool {
    let has = |m: u8, k: usize| m & (1 << k) != 0;
    super::QTE_PAIRS.iter().any(|&(p, q)| (has(a, p) && has(b, q)) || (has(b, p) && has(a, q)))
}

pub(super) enum Search {
    Found(Vec<u8>),
    Infeasible,
    TimedOut,
}

struct State<'g> {
    g: &'g ProblemGraph,
    caps: [usize; 4],
    compat: [u16; 10],
    /// `need[dom][s]`: fewest slots inside partition subset `s` any type of
    /// `dom` occupies.
    need: Vec<[u8; 16]>,
    dom: Vec<u16>,
    chosen: Vec<Option<u8>>,
    used: [usize; 4],
    trail: Vec<(usize, u16)>,
    /// Twin class of each vertex, listed in ascending vertex order.
    class: Vec<usize>,
    classes: Vec<Vec<usize>>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

pub(super) fn search(g: &ProblemGraph, caps: [usize; 4], deadline: Option<Instant>) -> (Search, u64) {
    let n = g.n();
    let mut compat = [0u16; 10];
    for (a, &ta) in TYPES.iter().enumerate() {
        for (b, &tb) in TYPES.iter().enumerate() {
            if compatible(ta, tb) {
                compat[a] |= 1 << b;
            }
        }
    }
    let need = (0..=ALL as usize)
        .map(|dom| {
            let mut row = [0u8; 16];
            for (s, slot) in row.iter_mut().enumerate() {
                *slot = (0..TYPES.len())
                    .filter(|t| dom & (1 << t) != 0)
                    .map(|t| (TYPES[t] & s as u8).count_ones() as u8)
                    .min()
                    .unwrap_or(u8::MAX);
            }
            row
        })
        .collect();
    let (class, classes) = twin_classes(g);
    let mut st = State {
        g,
        caps,
        compat,
        need,
        dom: vec![ALL; n],
        chosen: vec![None; n],
        used: [0; 4],
        trail: Vec::new(),
        class,
        classes,
        nodes: 0,
        deadline,
        timed_out: false,
    };
    let found = st.restrict_full() && st.bound_ok() && st.dfs();
    let outcome = if found {
        Search::Found(st.chosen.iter().map(|t| TYPES[t.expect("all vertices chosen") as usize]).collect())
    } else if st.timed_out {
        Search::TimedOut
    } else {
        Search::Infeasible
    };
    (outcome, st.nodes)
}

/// Groups vertices with equal open or equal closed neighborhoods.
fn twin_classes(g: &ProblemGraph) -> (Vec<usize>, Vec<Vec<usize>>) {
    use std::collections::BTreeMap;
    let n = g.n();
    let mut placed = vec![false; n];
    let mut classes = Vec::new();
    for closed in [false, true] {
        let mut by_key: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for v in (0..n).filter(|&v| !placed[v]) {
            let mut key = g.neighbors(v).to_vec();
            if closed {
                key.push(v);
            }
            key.sort_unstable();
            by_key.entry(key).or_default().push(v);
        }
        for members in by_key.into_values().filter(|m| m.len() > 1) {
            for &v in &members {
                placed[v] = true;
            }
            classes.push(members);
        }
    }
    classes.extend((0..n).filter(|&v| !placed[v]).map(|v| vec![v]));
    let mut class = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &v in members {
            class[v] = c;
        }
    }
    (class, classes)
}

impl State<'_> {
    fn set_dom(&mut self, v: usize, d: u16) -> bool {
        if d != self.dom[v] {
            self.trail.push((v, self.dom[v]));
            self.dom[v] = d;
        }
        d != 0
    }

    /// Drops types that would overflow a partition that is already full.
    fn restrict_full(&mut self) -> bool {
        let mut banned = 0u16;
        for (k, (&u, &c)) in self.used.iter().zip(&self.caps).enumerate() {
            if u >= c {
                for (t, &m) in TYPES.iter().enumerate() {
                    if m & (1 << k) != 0 {
                        banned |= 1 << t;
                    }
                }
            }
        }
        if banned == 0 {
            return true;
        }
        for v in 0..self.g.n() {
            if self.chosen[v].is_none() && !self.set_dom(v, self.dom[v] & !banned) {
                return false;
            }
        }
        true
    }

    fn bound_ok(&self) -> bool {
        let mut need = [0usize; 16];
        for v in 0..self.g.n() {
            if self.chosen[v].is_none() {
                let row = &self.need[self.dom[v] as usize];
                for s in 1..16 {
                    need[s] += row[s] as usize;
                }
            }
        }
        (1..16).all(|s| {
            let (used, cap) = (0..4)
                .filter(|k| s & (1 << k) != 0)
                .fold((0, 0), |(u, c), k| (u + self.used[k], c + self.caps[k]));
            used + need[s] <= cap
        })
    }

    fn assign(&mut self, v: usize, t: u8) -> bool {
        self.chosen[v] = Some(t);
        for k in 0..4 {
            if TYPES[t as usize] & (1 << k) != 0 {
                self.used[k] += 1;
            }
        }
        let g = self.g;
        for &w in g.neighbors(v) {
            if self.chosen[w].is_none() && !self.set_dom(w, self.dom[w] & self.compat[t as usize]) {
                return false;
            }
        }
        // Twins are interchangeable, so keep their types sorted by vertex.
        let members = &self.classes[self.class[v]];
        if members.len() > 1 {
            let at_least = ALL & !((1u16 << t) - 1);
            let at_most = (1u16 << (t + 1)) - 1;
            let (before, after): (Vec<usize>, Vec<usize>) =
                members.iter().copied().filter(|&w| w != v).partition(|&w| w < v);
            for w in before {
                if self.chosen[w].is_none() && !self.set_dom(w, self.dom[w] & at_most) {
                    return false;
                }
            }
            for w in after {
                if self.chosen[w].is_none() && !self.set_dom(w, self.dom[w] & at_least) {
                    return false;
                }
            }
        }
        self.restrict_full() && self.bound_ok()
    }

    fn unassign(&mut self, v: usize, t: u8, mark: usize) {
        while self.trail.len() > mark {
            let (w, d) = self.trail.pop().unwrap();
            self.dom[w] = d;
        }
        for k in 0..4 {
            if TYPES[t as usize] & (1 << k) != 0 {
                self.used[k] -= 1;
            }
        }
        self.chosen[v] = None;
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.chosen[v].is_none())
            .min_by_key(|&v| (self.dom[v].count_ones(), std::cmp::Reverse(self.g.degree(v)), v))
    }

    fn dfs(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return false;
        }
        let Some(v) = self.pick() else {
            return true;
        };
        let mut d = self.dom[v];
        while d != 0 {
            let t = d.trailing_zeros() as u8;
            d &= d - 1;
            let mark = self.trail.len();
            if self.assign(v, t) && self.dfs() {
                return true;
            }
            self.unassign(v, t, mark);
            if self.timed_out {
                return false;
            }
        }
        false
    }
}
