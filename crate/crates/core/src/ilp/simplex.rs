//! Dense bounded-variable dual simplex for the linear relaxations solved at
//! branch-and-bound nodes.
//!
//! The problem is `max c.x` subject to `A x <= b` and `lb <= x <= ub`, with
//! one slack per row. Every structural variable is boxed, so the starting
//! slack basis with each variable at its objective-preferred bound is dual
//! feasible and no phase one is needed. Fixing a variable only changes its
//! bounds, so a child node re-optimizes from its parent's tableau with a few
//! dual pivots, and backtracking just restores the bounds: every reduced
//! cost stays valid, so moving each released variable to the bound its
//! reduced cost prefers keeps the basis dual feasible.
//!
//! The tableau is stored condensed (`m` rows by `n` nonbasic columns): row
//! `r` reads `x_B[r] + sum_k t[r][k] * x_N[k] = const`.

use std::time::Instant;

const PRIMAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-12;

/// A `<=` row over structural variables.
#[derive(Debug, Clone)]
pub(crate) struct SparseRow {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    /// Iteration cap or deadline hit; the objective is still a valid upper bound.
    Stalled,
}

#[derive(Debug, Clone)]
pub(crate) struct DualSimplex {
    m: usize,
    n: usize,
    tab: Vec<f64>,
    /// Reduced cost of each nonbasic column.
    d: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Column `k` for nonbasic variables, `!r` for the one basic in row `r`.
    loc: Vec<isize>,
    /// For nonbasic variables: whether it sits at its upper bound.
    at_upper: Vec<bool>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    value: Vec<f64>,
    cost: Vec<f64>,
    /// Trail length of the search state this relaxation reflects.
    pub synced: usize,
    pub iterations: u64,
}

impl DualSimplex {
    /// `n` structural variables in `[0, 1]`, maximizing `cost . x`.
    pub fn new(n: usize, cost: &[f64], rows: &[SparseRow]) -> Self {
        let m = rows.len();
        let total = n + m;
        let mut tab = vec![0.0; m * n];
        for (r, row) in rows.iter().enumerate() {
            for (&j, &a) in row.idx.iter().zip(&row.val) {
                tab[r * n + j] += a;
            }
        }
        let mut lb = vec![0.0; total];
        let mut ub = vec![1.0; total];
        for s in n..total {
            lb[s] = 0.0;
            ub[s] = f64::INFINITY;
        }
        let mut full_cost = vec![0.0; total];
        full_cost[..n].copy_from_slice(cost);
        let mut value = vec![0.0; total];
        let mut at_upper = vec![false; total];
        for j in 0..n {
            if cost[j] > 0.0 {
                value[j] = 1.0;
                at_upper[j] = true;
            }
        }
        for (r, row) in rows.iter().enumerate() {
            let act: f64 = row.idx.iter().zip(&row.val).map(|(&j, &a)| a * value[j]).sum();
            value[n + r] = row.rhs - act;
        }
        DualSimplex {
            m,
            n,
            tab,
            d: cost.to_vec(),
            basis: (n..total).collect(),
            nonbasic: (0..n).collect(),
            loc: (0..n as isize).chain((0..m as isize).map(|r| !r)).collect(),
            at_upper,
            lb,
            ub,
            value,
            cost: full_cost,
            synced: 0,
            iterations: 0,
        }
    }

    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.value[j]).sum()
    }

    pub fn value(&self, j: usize) -> f64 {
        self.value[j]
    }

    /// Fixes structural variable `j` to `v`.
    pub fn fix(&mut self, j: usize, v: f64) {
        self.lb[j] = v;
        self.ub[j] = v;
        if self.loc[j] >= 0 {
            self.move_nonbasic(j, v);
        }
    }

    /// Releases structural variable `j` back to `[0, 1]`.
    pub fn unfix(&mut self, j: usize) {
        self.lb[j] = 0.0;
        self.ub[j] = 1.0;
        if self.loc[j] >= 0 {
            let d = self.d[self.loc[j] as usize];
            if d > DUAL_TOL {
                self.move_nonbasic(j, 1.0);
            } else if d < -DUAL_TOL {
                self.move_nonbasic(j, 0.0);
            } else {
                self.at_upper[j] = self.value[j] > 0.5;
            }
        }
    }

    fn move_nonbasic(&mut self, j: usize, v: f64) {
        let k = self.loc[j] as usize;
        let delta = v - self.value[j];
        if delta != 0.0 {
            self.value[j] = v;
            for r in 0..self.m {
                let t = self.tab[r * self.n + k];
                if t != 0.0 {
                    self.value[self.basis[r]] -= t * delta;
                }
            }
        }
        self.at_upper[j] = v > 0.5;
    }

    fn leaving_row(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let b = self.basis[r];
            let x = self.value[b];
            let viol = if x < self.lb[b] - PRIMAL_TOL {
                self.lb[b] - x
            } else if x > self.ub[b] + PRIMAL_TOL {
                x - self.ub[b]
            } else {
                continue;
            };
            if best.is_none_or(|(_, v)| viol > v) {
                best = Some((r, viol));
            }
        }
        best
    }

    /// Runs dual pivots until primal feasible, for at most `max_iter`
    /// pivots or until `deadline`.
    pub fn solve(&mut self, max_iter: u64, deadline: Option<Instant>) -> LpStatus {
        let n = self.n;
        let mut local = 0;
        while let Some((r, _)) = self.leaving_row() {
            if local >= max_iter || (local % 32 == 31 && deadline.is_some_and(|d| Instant::now() >= d)) {
                return LpStatus::Stalled;
            }
            local += 1;
            self.iterations += 1;
            let leaving = self.basis[r];
            let increase = self.value[leaving] < self.lb[leaving];
            let target = if increase { self.lb[leaving] } else { self.ub[leaving] };
            let row = &self.tab[r * n..(r + 1) * n];

            // Dual ratio test; ties go to the larger pivot magnitude.
            let mut enter: Option<(usize, f64, f64)> = None;
            for (k, &t) in row.iter().enumerate() {
                if t.abs() <= PIVOT_TOL {
                    continue;
                }
                let var = self.nonbasic[k];
                if self.lb[var] == self.ub[var] {
                    continue;
                }
                let up = self.at_upper[var];
                let eligible = if increase { (!up && t < 0.0) || (up && t > 0.0) } else { (!up && t > 0.0) || (up && t < 0.0) };
                if !eligible {
                    continue;
                }
                let ratio = (self.d[k] / t).abs();
                let better = match enter {
                    None => true,
                    Some((_, best_ratio, best_t)) => {
                        ratio < best_ratio - DUAL_TOL || (ratio <= best_ratio + DUAL_TOL && t.abs() > best_t.abs())
                    }
                };
                if better {
                    enter = Some((k, ratio, t));
                }
            }
            let Some((q, _, p)) = enter else {
                return LpStatus::Infeasible;
            };
            self.pivot(r, q, p, target);
        }
        LpStatus::Optimal
    }

    fn pivot(&mut self, r: usize, q: usize, p: f64, target: f64) {
        let n = self.n;
        let leaving = self.basis[r];
        let entering = self.nonbasic[q];

        let step = (self.value[leaving] - target) / p;
        for i in 0..self.m {
            let t = self.tab[i * n + q];
            if t != 0.0 {
                self.value[self.basis[i]] -= t * step;
            }
        }
        self.value[leaving] = target;
        self.value[entering] += step;

        let inv = 1.0 / p;
        {
            let row = &mut self.tab[r * n..(r + 1) * n];
            for (k, t) in row.iter_mut().enumerate() {
                if k != q {
                    *t *= inv;
                }
            }
            row[q] = inv;
        }
        let pivot_row: Vec<f64> = self.tab[r * n..(r + 1) * n].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * n + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * n..(i + 1) * n];
            for (k, (t, &pr)) in row.iter_mut().zip(&pivot_row).enumerate() {
                if k != q && pr != 0.0 {
                    *t -= f * pr;
                }
            }
            row[q] = -f * inv;
        }
        let dq = self.d[q];
        for (k, (dk, &pr)) in self.d.iter_mut().zip(&pivot_row).enumerate() {
            if k != q && pr != 0.0 {
                *dk -= dq * pr;
            }
        }
        self.d[q] = -dq * inv;

        self.basis[r] = entering;
        self.nonbasic[q] = leaving;
        self.loc[entering] = !(r as isize);
        self.loc[leaving] = q as isize;
        // Slacks only ever leave at zero. A structural fixed at 1 still counts
        // as sitting at its upper bound once released.
        self.at_upper[leaving] = leaving < n && target > 0.5;
    }
}
