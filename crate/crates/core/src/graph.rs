//! Simple undirected problem graphs and the structural predicates used by
//! the formulations and their oracles.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod io;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NonSquareMatrix { row: usize, len: usize, n: usize },
    #[error("graph has {n} vertices, brute force is capped at {max}")]
    TooLarge { n: usize, max: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Side of a two-coloring, also used for the two shores of a Chimera cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted; adjacency lists
/// are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl ProblemGraph {
    /// Builds a simple graph from a list of vertex pairs. Duplicate pairs in
    /// either orientation collapse to one edge.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::IndexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self::from_sorted_edges(n, set.into_iter().collect()))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        ProblemGraph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_sorted_edges(n, edges)
    }

    /// `K_{a,b}` with vertices `0..a` on one side and `a..a+b` on the other.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))).collect();
        Self::from_sorted_edges(a + b, edges)
    }

    /// Star `K_{1,m}` with center 0.
    pub fn star(m: usize) -> Self {
        Self::complete_bipartite(1, m)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    /// Maps an upper-triangular QUBO matrix to its interaction graph: edge
    /// `{i, j}` exists iff `Q[i][j] != 0` for `i < j`. Diagonal (linear) terms
    /// are ignored, and so is anything below the diagonal.
    pub fn from_qubo(q: &[Vec<f64>]) -> Result<Self, GraphError> {
        let n = q.len();
        let mut edges = Vec::new();
        for (i, row) in q.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::NonSquareMatrix { row: i, len: row.len(), n });
            }
            for (j, &value) in row.iter().enumerate().skip(i + 1) {
                if value != 0.0 {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self::from_sorted_edges(n, edges))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edge density `|E| / C(n, 2)`; zero for graphs with fewer than two vertices.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.edges.len() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::IndexOutOfRange { vertex: v, n: self.n })
        }
    }
}

/// Two-coloring of the vertices that survive removal of `removed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    /// `None` for removed vertices.
    pub side: Vec<Option<Side>>,
    pub removed: BTreeSet<usize>,
}

impl Bipartition {
    pub fn vertices_on(&self, side: Side) -> Vec<usize> {
        self.side
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Some(side))
            .map(|(v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BipartiteCheck {
    Bipartite(Bipartition),
    /// `odd_cycle` lists the cycle's vertices in order; it closes back to the first.
    NotBipartite { odd_cycle: Vec<usize> },
}

impl BipartiteCheck {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, BipartiteCheck::Bipartite(_))
    }
}

/// Breadth-first two-coloring of `g - removed`. Each component's lowest
/// vertex is colored `Left`.
pub fn bipartition_check(g: &ProblemGraph, removed: &[usize]) -> Result<BipartiteCheck, GraphError> {
    for &v in removed {
        g.check_vertex(v)?;
    }
    let removed: BTreeSet<usize> = removed.iter().copied().collect();
    let n = g.n();
    let mut side: Vec<Option<Side>> = vec![None; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut depth = vec![0usize; n];
    let mut queue = VecDeque::new();

    for root in 0..n {
        if removed.contains(&root) || side[root].is_some() {
            continue;
        }
        side[root] = Some(Side::Left);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let su = side[u].expect("queued vertices are colored");
            for &w in g.neighbors(u) {
                if removed.contains(&w) {
                    continue;
                }
                match side[w] {
                    None => {
                        side[w] = Some(su.other());
                        parent[w] = u;
                        depth[w] = depth[u] + 1;
                        queue.push_back(w);
                    }
                    Some(sw) if sw == su => {
                        return Ok(BipartiteCheck::NotBipartite {
                            odd_cycle: tree_cycle(&parent, &depth, u, w),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(BipartiteCheck::Bipartite(Bipartition { side, removed }))
}

/// Closes the BFS-tree paths from `u` and `w` to their common ancestor with
/// the non-tree edge `{u, w}`.
fn tree_cycle(parent: &[usize], depth: &[usize], u: usize, w: usize) -> Vec<usize> {
    let (mut a, mut b) = (u, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

pub const DEFAULT_OCT_BRUTEFORCE_MAX: usize = 20;

/// Minimum odd cycle transversal by enumeration of vertex subsets in order of
/// size, each size in lexicographic order, so ties resolve to the
/// lexicographically smallest set.
pub fn min_oct_bruteforce(g: &ProblemGraph, max_n: usize) -> Result<Vec<usize>, GraphError> {
    let n = g.n();
    if n > max_n {
        return Err(GraphError::TooLarge { n, max: max_n });
    }
    for k in 0..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            if bipartition_check(g, &combo)?.is_bipartite() {
                return Ok(combo);
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("removing every vertex leaves a bipartite graph")
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The 11-vertex graph where a minimum odd cycle transversal does not yield
/// a balanced bipartite embedding.
///
/// Labels are shifted to 0-based: `v1 = 0`, `v2 = 1`, `v3 = 2`,
/// `V_A = {3..=6}`, `V_B = {7..=10}`. `v1 ~ v2`, both are joined to all of
/// `V_A`, and `v3` is joined to all of `V_A ∪ V_B`.
pub fn fig4_graph() -> ProblemGraph {
    let side_a = 3..7;
    let side_b = 7..11;
    let mut edges = vec![(0, 1)];
    for a in side_a.clone() {
        edges.push((0, a));
        edges.push((1, a));
        edges.push((2, a));
    }
    for b in side_b {
        edges.push((2, b));
    }
    ProblemGraph::from_edges(11, edges).expect("fixed edge list is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_examples() {
        let tri = ProblemGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.edge_count(), 3);
        let single = ProblemGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(single.edge_count(), 1);
        assert!(matches!(
            ProblemGraph::from_edges(4, [(0, 0)]),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            ProblemGraph::from_edges(2, [(0, 2)]),
            Err(GraphError::IndexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn qubo_examples() {
        let g = ProblemGraph::from_qubo(&[vec![0.5, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let g = ProblemGraph::from_qubo(&vec![vec![0.0; 3]; 3]).unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 0));
        let q = vec![vec![1.0, 2.0, 0.0], vec![0.0, 3.0, -1.0], vec![0.0, 0.0, 0.0]];
        assert_eq!(ProblemGraph::from_qubo(&q).unwrap().edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(
            ProblemGraph::from_qubo(&[vec![0.0, 1.0], vec![0.0]]),
            Err(GraphError::NonSquareMatrix { row: 1, .. })
        ));
    }

    #[test]
    fn triangle_bipartiteness() {
        let tri = ProblemGraph::complete(3);
        match bipartition_check(&tri, &[]).unwrap() {
            BipartiteCheck::NotBipartite { odd_cycle } => assert_eq!(odd_cycle.len(), 3),
            other => panic!("expected odd cycle, got {other:?}"),
        }
        match bipartition_check(&tri, &[0]).unwrap() {
            BipartiteCheck::Bipartite(b) => {
                assert_eq!(b.side[0], None);
                assert_ne!(b.side[1], b.side[2]);
            }
            other => panic!("expected bipartition, got {other:?}"),
        }
        assert!(bipartition_check(&tri, &[3]).is_err());
    }

    #[test]
    fn fig4_structure() {
        let g = fig4_graph();
        assert_eq!(g.n(), 11);
        assert_eq!(g.edge_count(), 17);
        assert_eq!(g.degree(2), 8);
        assert_eq!(g.degree(0), 5);
        match bipartition_check(&g, &[0]).unwrap() {
            BipartiteCheck::Bipartite(b) => {
                let s = b.side[1].unwrap();
                assert_eq!(b.vertices_on(s), vec![1, 2]);
                assert_eq!(b.vertices_on(s.other()), (3..11).collect::<Vec<_>>());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oct_examples() {
        assert_eq!(min_oct_bruteforce(&ProblemGraph::complete(3), 20).unwrap(), vec![0]);
        assert_eq!(min_oct_bruteforce(&fig4_graph(), 20).unwrap(), vec![0]);
        assert_eq!(min_oct_bruteforce(&ProblemGraph::complete(5), 20).unwrap().len(), 3);
        assert!(min_oct_bruteforce(&ProblemGraph::cycle(6), 20).unwrap().is_empty());
        assert!(matches!(
            min_oct_bruteforce(&ProblemGraph::empty(21), 20),
            Err(GraphError::TooLarge { n: 21, max: 20 })
        ));
    }

    #[test]
    fn combinations_in_lex_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all.last().unwrap(), &vec![2, 3]);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }
}
