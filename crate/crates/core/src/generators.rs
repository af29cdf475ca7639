//! Seeded random-graph families.
//!
//! All randomness comes from ChaCha8 seeded with the spec's seed. Each family
//! reads from its own numbered streams, so a stream used for vertex data
//! (percolation weights, the bipartite split) is independent of the one
//! used for edge decisions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ProblemGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Percolation,
    BarabasiAlbert,
    ErdosRenyi,
    Regular,
    NoisyBipartite,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Percolation, Family::BarabasiAlbert, Family::ErdosRenyi, Family::Regular, Family::NoisyBipartite];

    pub fn name(self) -> &'static str {
        match self {
            Family::Percolation => "Percolation",
            Family::BarabasiAlbert => "BarabasiAlbert",
            Family::ErdosRenyi => "ErdosRenyi",
            Family::Regular => "Regular",
            Family::NoisyBipartite => "NoisyBipartite",
        }
    }

    fn stream_base(self) -> u64 {
        (self as u64 + 1) << 8
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match key.as_str() {
            "percolation" | "perc" => Family::Percolation,
            "barabasialbert" | "ba" => Family::BarabasiAlbert,
            "erdosrenyi" | "er" | "gnp" => Family::ErdosRenyi,
            "regular" | "reg" => Family::Regular,
            "noisybipartite" | "nb" | "bipartite" => Family::NoisyBipartite,
            _ => return Err(GenError::UnknownFamily(s.to_string())),
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("degenerate spec: {0}")]
    DegenerateSpec(String),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, p: f64, seed: u64) -> Self {
        GenSpec { family, n, p, seed }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(GenError::InvalidSpec(format!("density {} is not in (0, 1)", self.p)));
        }
        if self.n < 2 {
            return Err(GenError::InvalidSpec(format!("need at least 2 vertices, got {}", self.n)));
        }
        if self.family == Family::Regular {
            regular_degree(self)?;
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.family.stream_base() + stream);
        rng
    }
}

/// Attachment count of the Barabasi-Albert family.
pub fn ba_attachment(n: usize, p: f64) -> usize {
    ((p * (n - 1) as f64 / 2.0).round() as usize).max(1)
}

/// Degree of the Regular family, or why the spec has no such graph.
pub fn regular_degree(spec: &GenSpec) -> Result<usize, GenError> {
    let d = (spec.p * (spec.n - 1) as f64).round() as usize;
    if d == 0 {
        return Err(GenError::DegenerateSpec(format!("p*(n-1) rounds to degree 0 for n = {}", spec.n)));
    }
    if d >= spec.n {
        return Err(GenError::DegenerateSpec(format!("degree {d} needs more than {} vertices", spec.n)));
    }
    if (spec.n * d) % 2 == 1 {
        return Err(GenError::DegenerateSpec(format!("no {d}-regular graph on {} vertices (odd degree sum)", spec.n)));
    }
    Ok(d)
}

pub fn generate(spec: &GenSpec) -> Result<ProblemGraph, GenError> {
    spec.validate()?;
    let edges = match spec.family {
        Family::ErdosRenyi => erdos_renyi(spec),
        Family::Percolation => percolation(spec),
        Family::BarabasiAlbert => barabasi_albert(spec),
        Family::Regular => regular(spec)?,
        Family::NoisyBipartite => noisy_bipartite(spec),
    };
    Ok(ProblemGraph::from_edges(spec.n, edges).expect("generated edges are simple"))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn erdos_renyi(spec: &GenSpec) -> Vec<(usize, usize)> {
    let mut rng = spec.rng(1);
    pairs(spec.n).filter(|_| rng.random::<f64>() < spec.p).collect()
}

/// The vertex weights `chi_i` drawn by the Percolation family.
pub fn percolation_weights(spec: &GenSpec) -> Vec<f64> {
    let mut rng = spec.rng(0);
    (0..spec.n).map(|_| rng.random::<f64>()).collect()
}

/// Inclusion probability of edge `{i, j}` given the weights.
pub fn percolation_probability(p: f64, chi_i: f64, chi_j: f64) -> f64 {
    let gap = (chi_i - chi_j).abs();
    if gap <= p {
        1.0
    } else {
        p / gap
    }
}

fn percolation(spec: &GenSpec) -> Vec<(usize, usize)> {
    let chi = percolation_weights(spec);
    let mut rng = spec.rng(1);
    pairs(spec.n)
        .filter(|&(i, j)| {
            let draw = rng.random::<f64>();
            draw < percolation_probability(spec.p, chi[i], chi[j])
        })
        .collect()
}

fn barabasi_albert(spec: &GenSpec) -> Vec<(usize, usize)> {
    let n = spec.n;
    let m = ba_attachment(n, spec.p);
    let mut rng = spec.rng(1);
    let mut edges: Vec<(usize, usize)> = pairs(m).collect();
    let mut degree = vec![0usize; n];
    for &(i, j) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    for v in m..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let candidates: Vec<usize> = (0..v).filter(|u| !chosen.contains(u)).collect();
            let total: usize = candidates.iter().map(|&u| degree[u]).sum();
            let pick = if total == 0 {
                candidates[rng.random_range(0..candidates.len())]
            } else {
                let mut r = rng.random_range(0..total);
                *candidates
                    .iter()
                    .find(|&&u| {
                        if r < degree[u] {
                            true
                        } else {
                            r -= degree[u];
                            false
                        }
                    })
                    .unwrap()
            };
            chosen.push(pick);
        }
        for &u in &chosen {
            degree[u] += 1;
            degree[v] += 1;
            edges.push((u, v));
        }
    }
    edges
}

const REGULAR_RESTARTS: usize = 1000;

fn regular(spec: &GenSpec) -> Result<Vec<(usize, usize)>, GenError> {
    let n = spec.n;
    let d = regular_degree(spec)?;
    let mut rng = spec.rng(1);
    if d == n - 1 {
        return Ok(pairs(n).collect());
    }
    // Dense degrees are built as the complement of a sparse regular graph.
    let complement = 2 * d > n - 1;
    let k = if complement { n - 1 - d } else { d };
    let sparse = if k == 0 {
        Some(BTreeSet::new())
    } else {
        (0..REGULAR_RESTARTS).find_map(|_| pair_stubs(n, k, &mut rng))
    };
    let Some(sparse) = sparse else {
        return Err(GenError::DegenerateSpec(format!(
            "no {d}-regular pairing found on {n} vertices after {REGULAR_RESTARTS} restarts"
        )));
    };
    Ok(if complement { pairs(n).filter(|e| !sparse.contains(e)).collect() } else { sparse.into_iter().collect() })
}

/// One attempt at pairing `k` stubs per vertex, only ever joining stubs of
/// distinct, not yet adjacent vertices. Returns `None` when stuck.
fn pair_stubs(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    let mut edges = BTreeSet::new();
    while !stubs.is_empty() {
        let mut placed = false;
        for _ in 0..64 {
            let a = rng.random_range(0..stubs.len());
            let b = rng.random_range(0..stubs.len());
            let (u, v) = (stubs[a], stubs[b]);
            if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                edges.insert((u.min(v), u.max(v)));
                let (hi, lo) = (a.max(b), a.min(b));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
        }
        if placed {
            continue;
        }
        // Random probing failed; choose among all suitable pairs, or give up.
        let mut suitable = Vec::new();
        for a in 0..stubs.len() {
            for b in a + 1..stubs.len() {
                let (u, v) = (stubs[a], stubs[b]);
                if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                    suitable.push((a, b));
                }
            }
        }
        if suitable.is_empty() {
            return None;
        }
        let (a, b) = suitable[rng.random_range(0..suitable.len())];
        let (u, v) = (stubs[a], stubs[b]);
        edges.insert((u.min(v), u.max(v)));
        stubs.swap_remove(b);
        stubs.swap_remove(a);
    }
    Some(edges)
}

/// The side split used by the NoisyBipartite family: `true` for the
/// second half of a random permutation.
pub fn noisy_bipartite_sides(spec: &GenSpec) -> Vec<bool> {
    let mut rng = spec.rng(0);
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let mut side = vec![false; spec.n];
    for &v in &order[spec.n / 2..] {
        side[v] = true;
    }
    side
}

/// Noise edges inside a side appear with this fraction of `p`.
pub const NOISE_FRACTION: f64 = 0.05;

fn noisy_bipartite(spec: &GenSpec) -> Vec<(usize, usize)> {
    let side = noisy_bipartite_sides(spec);
    let mut rng = spec.rng(1);
    pairs(spec.n)
        .filter(|&(i, j)| {
            let q = if side[i] != side[j] { spec.p } else { NOISE_FRACTION * spec.p };
            rng.random::<f64>() < q
        })
        .collect()
}
