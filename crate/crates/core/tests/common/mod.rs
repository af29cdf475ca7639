//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver; everything is plain enumeration.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tembed::{ChimeraGraph, ProblemGraph};

/// Adjacency bitmasks, one per vertex.
pub fn adjacency(g: &ProblemGraph) -> Vec<u64> {
    let mut adj = vec![0u64; g.n()];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

fn code_under(adj: &[u64], perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[perm[i]] & (1 << perm[j]) != 0 {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

/// Smallest edge code over all relabelings that list vertices by
/// nondecreasing degree. That set of relabelings is invariant under
/// isomorphism, so equal codes mean isomorphic graphs.
pub fn canonical_code(n: usize, adj: &[u64]) -> u64 {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| adj[v].count_ones());
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if adj[c[0]].count_ones() == adj[v].count_ones() => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(n);
    permute_classes(&classes, 0, &mut vec![false; n], &mut perm, &mut |p| {
        best = best.min(code_under(adj, p));
    });
    best
}

fn permute_classes(
    classes: &[Vec<usize>],
    c: usize,
    used: &mut Vec<bool>,
    perm: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if c == classes.len() {
        visit(perm);
        return;
    }
    let start = classes[..c].iter().map(Vec::len).sum::<usize>();
    if perm.len() == start + classes[c].len() {
        permute_classes(classes, c + 1, used, perm, visit);
        return;
    }
    for &v in &classes[c] {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            permute_classes(classes, c, used, perm, visit);
            perm.pop();
            used[v] = false;
        }
    }
}

fn graph_from_adj(n: usize, adj: &[u64]) -> ProblemGraph {
    let edges = (0..n).flat_map(|i| (i + 1..n).filter(move |&j| adj[i] & (1 << j) != 0).map(move |j| (i, j)));
    ProblemGraph::from_edges(n, edges).unwrap()
}

/// One representative of every isomorphism class of graphs on `n` vertices,
/// for each `n` in `1..=max_n`, grouped by `n`.
pub fn nonisomorphic_graphs(max_n: usize) -> Vec<Vec<ProblemGraph>> {
    let mut levels: Vec<Vec<Vec<u64>>> = vec![vec![vec![0]]];
    for n in 2..=max_n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for adj in levels.last().unwrap() {
            for s in 0u64..(1 << (n - 1)) {
                let mut a = adj.clone();
                for (v, row) in a.iter_mut().enumerate() {
                    if s & (1 << v) != 0 {
                        *row |= 1 << (n - 1);
                    }
                }
                a.push(s);
                if seen.insert(canonical_code(n, &a)) {
                    next.push(a);
                }
            }
        }
        levels.push(next);
    }
    levels
        .iter()
        .enumerate()
        .map(|(i, level)| level.iter().map(|a| graph_from_adj(i + 1, a)).collect())
        .collect()
}

/// `count` random graphs with `1..=max_n` vertices and per-graph density.
pub fn random_graphs(count: usize, max_n: usize, seed: u64) -> Vec<ProblemGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let p: f64 = rng.random_range(0.1..0.9);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
            ProblemGraph::from_edges(n, edges).unwrap()
        })
        .collect()
}

/// The small corpus: every graph up to isomorphism with at most 7 vertices,
/// then 200 seeded random graphs with at most 10.
pub fn small_corpus() -> Vec<ProblemGraph> {
    let mut all: Vec<ProblemGraph> = nonisomorphic_graphs(7).into_iter().flatten().collect();
    all.extend(random_graphs(200, 10, 2024));
    all
}

/// A BTE embedding as side masks `(a, b)`: every vertex lies in `a`, `b`
/// or both, `|a| <= c1`, `|b| <= c2`, and every edge joins a vertex of `a`
/// to a vertex of `b`. Searches all `4^n` pairs of masks.
pub fn bte_bruteforce_all(g: &ProblemGraph, c1: usize, c2: usize) -> Vec<(u64, u64)> {
    let n = g.n();
    assert!(n <= 12, "enumeration over 4^n masks");
    let adj = adjacency(g);
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    for a in 0..=full {
        if a.count_ones() as usize > c1 {
            continue;
        }
        for b in 0..=full {
            if b.count_ones() as usize > c2 || a | b != full {
                continue;
            }
            let (only_a, only_b) = (a & !b, b & !a);
            let ok = (0..n).all(|v| {
                let bit = 1u64 << v;
                !(only_a & bit != 0 && adj[v] & only_a != 0) && !(only_b & bit != 0 && adj[v] & only_b != 0)
            });
            if ok {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn bte_bruteforce(g: &ProblemGraph, c1: usize, c2: usize) -> bool {
    !bte_bruteforce_all(g, c1, c2).is_empty()
}

/// QTE formulation by enumeration: each vertex takes a nonempty set of
/// partitions `U1..U4` (listed as bits 0..3) with no gaps, partition `k`
/// holds at most `sizes[k]` vertices, and every edge needs `U1`/`U2` or
/// `U3`/`U4` across its endpoints.
pub fn qte_bruteforce(g: &ProblemGraph, sizes: [usize; 4]) -> bool {
    let n = g.n();
    assert!(n <= 6, "enumeration over 16^n memberships");
    let contiguous = |s: u32| {
        let bits: Vec<u32> = (0..4).filter(|k| s & (1 << k) != 0).collect();
        !bits.is_empty() && bits.windows(2).all(|w| w[1] == w[0] + 1)
    };
    let sets: Vec<u32> = (1..16).filter(|&s| contiguous(s)).collect();
    let realizes = |a: u32, b: u32| {
        let has = |m: u32, k: u32| m & (1 << k) != 0;
        (has(a, 0) && has(b, 1)) || (has(a, 1) && has(b, 0)) || (has(a, 2) && has(b, 3)) || (has(a, 3) && has(b, 2))
    };
    let mut choice = vec![0usize; n];
    loop {
        let member: Vec<u32> = choice.iter().map(|&c| sets[c]).collect();
        let fits = (0..4).all(|k| member.iter().filter(|&&m| m & (1 << k) != 0).count() <= sizes[k]);
        if fits && g.edges().iter().all(|&(u, v)| realizes(member[u], member[v])) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            choice[i] += 1;
            if choice[i] < sets.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Whether `qubits` induce a connected subgraph of `h`.
pub fn chain_connected(h: &ChimeraGraph, qubits: &[usize]) -> bool {
    let Some(&first) = qubits.first() else { return false };
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(q) = queue.pop_front() {
        for &r in qubits {
            if !seen.contains(&r) && h.has_edge(q, r) {
                seen.insert(r);
                queue.push_back(r);
            }
        }
    }
    seen.len() == qubits.len()
}

/// Whether some qubit of `a` is coupled to some qubit of `b`.
pub fn chains_touch(h: &ChimeraGraph, a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|&x| b.iter().any(|&y| h.has_edge(x, y)))
}

/// Whether `g` is a subgraph of `K_{cap+1}` or of `K_{cap,cap}`: at most
/// `cap + 1` vertices, or a two-coloring whose classes (after flipping
/// components freely) both have at most `cap` vertices.
pub fn fits_complete_or_bipartite(g: &ProblemGraph, cap: usize) -> bool {
    let n = g.n();
    if n <= cap + 1 {
        return true;
    }
    let mut color = vec![None; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut count = [1usize, 0];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let c = color[v].unwrap();
            for &w in g.neighbors(v) {
                match color[w] {
                    None => {
                        color[w] = Some(!c);
                        count[!c as usize] += 1;
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return false,
                    Some(_) => {}
                }
            }
        }
        sizes.push(count);
    }
    let mut reach = BTreeSet::from([0usize]);
    for [x, y] in sizes {
        reach = reach.iter().flat_map(|&s| [s + x, s + y]).collect();
    }
    reach.iter().any(|&s| s <= cap && n - s <= cap)
}
