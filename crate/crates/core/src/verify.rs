//! Minor-embedding checker.
//!
//! An embedding of `G` in `H` maps every vertex of `G` to a nonempty set of
//! host vertices (its chain) such that chains are pairwise disjoint, each
//! chain induces a connected subgraph of `H`, and every edge of `G` is
//! realized by at least one host edge between the two chains.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::ChimeraGraph;
use crate::graph::ProblemGraph;

/// Anything an embedding can be checked against.
pub trait HostGraph {
    fn num_vertices(&self) -> usize;
    fn adjacent(&self, v: usize) -> &[usize];
}

impl HostGraph for ChimeraGraph {
    fn num_vertices(&self) -> usize {
        self.num_qubits()
    }
    fn adjacent(&self, v: usize) -> &[usize] {
        self.adjacency(v)
    }
}

impl HostGraph for ProblemGraph {
    fn num_vertices(&self) -> usize {
        self.n()
    }
    fn adjacent(&self, v: usize) -> &[usize] {
        self.neighbors(v)
    }
}

/// Map from logical vertex to its chain of host vertices. Chains are kept
/// sorted and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Embedding {
    chains: BTreeMap<usize, Vec<usize>>,
}

impl Embedding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, vertex: usize, mut qubits: Vec<usize>) {
        qubits.sort_unstable();
        qubits.dedup();
        self.chains.insert(vertex, qubits);
    }

    pub fn remove(&mut self, vertex: usize) -> Option<Vec<usize>> {
        self.chains.remove(&vertex)
    }

    pub fn chain(&self, vertex: usize) -> Option<&[usize]> {
        self.chains.get(&vertex).map(Vec::as_slice)
    }

    pub fn chains(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.chains.iter().map(|(&v, c)| (v, c.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Total chain size, counting a shared qubit once per chain.
    pub fn qubits_used(&self) -> usize {
        self.chains.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("chain of vertex {vertex} holds qubit {qubit}, host has {count} vertices")]
    OutOfRangeQubit { vertex: usize, qubit: usize, count: usize },
    #[error("embedding names vertex {vertex}, problem graph has {n} vertices")]
    UnknownVertex { vertex: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    EmptyChain { vertex: usize },
    Overlap { first: usize, second: usize, qubit: usize },
    Disconnected { vertex: usize },
    MissingEdge { u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyChain { vertex } => write!(f, "vertex {vertex} has an empty chain"),
            Violation::Overlap { first, second, qubit } => {
                write!(f, "vertices {first} and {second} share qubit {qubit}")
            }
            Violation::Disconnected { vertex } => write!(f, "chain of vertex {vertex} is disconnected"),
            Violation::MissingEdge { u, v } => write!(f, "no coupler realizes edge {{{u}, {v}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        if self.ok {
            return "embedding ok\n".to_string();
        }
        let mut out = format!("embedding invalid: {} violation(s)\n", self.violations.len());
        for v in &self.violations {
            out.push_str("  ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn has(&self, pred: impl Fn(&Violation) -> bool) -> bool {
        self.violations.iter().any(pred)
    }
}

/// Checks `e` as a minor embedding of `g` into `h`, collecting every violation.
pub fn verify<H: HostGraph>(g: &ProblemGraph, h: &H, e: &Embedding) -> Result<VerifyReport, VerifyError> {
    let count = h.num_vertices();
    for (v, chain) in e.chains() {
        if v >= g.n() {
            return Err(VerifyError::UnknownVertex { vertex: v, n: g.n() });
        }
        if let Some(&q) = chain.iter().find(|&&q| q >= count) {
            return Err(VerifyError::OutOfRangeQubit { vertex: v, qubit: q, count });
        }
    }

    let mut violations = Vec::new();
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); count];
    for v in 0..g.n() {
        match e.chain(v) {
            None | Some([]) => violations.push(Violation::EmptyChain { vertex: v }),
            Some(chain) => {
                for &q in chain {
                    if let Some(&first) = owners[q].first() {
                        violations.push(Violation::Overlap { first, second: v, qubit: q });
                    }
                    owners[q].push(v);
                }
            }
        }
    }

    let mut mark = vec![usize::MAX; count];
    let mut queue = VecDeque::new();
    for (v, chain) in e.chains() {
        if chain.is_empty() {
            continue;
        }
        for &q in chain {
            mark[q] = v;
        }
        // BFS inside the chain; visited qubits are re-marked with MAX - 1 - v.
        let seen = usize::MAX - 1 - v;
        let mut reached = 1;
        mark[chain[0]] = seen;
        queue.push_back(chain[0]);
        while let Some(q) = queue.pop_front() {
            for &r in h.adjacent(q) {
                if mark[r] == v {
                    mark[r] = seen;
                    reached += 1;
                    queue.push_back(r);
                }
            }
        }
        if reached != chain.len() {
            violations.push(Violation::Disconnected { vertex: v });
        }
        for &q in chain {
            mark[q] = usize::MAX;
        }
    }

    let mut touches: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (v, chain) in e.chains() {
        let list = &mut touches[v];
        for &q in chain {
            for &r in h.adjacent(q) {
                list.extend(owners[r].iter().copied().filter(|&w| w != v));
            }
        }
        list.sort_unstable();
        list.dedup();
    }
    for &(u, v) in g.edges() {
        if touches[u].binary_search(&v).is_err() {
            violations.push(Violation::MissingEdge { u, v });
        }
    }

    violations.sort();
    Ok(VerifyReport { ok: violations.is_empty(), violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ChimeraDims {
    pub M: usize,
    pub N: usize,
    pub L: usize,
}

impl ChimeraDims {
    pub fn of(h: &ChimeraGraph) -> Self {
        ChimeraDims { M: h.rows(), N: h.cols(), L: h.shore() }
    }
}

/// On-disk embedding: `{"graph_n": n, "chimera": {"M":..,"N":..,"L":..},
/// "chains": {"<vertex>": [qubit ids]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub graph_n: usize,
    pub chimera: ChimeraDims,
    pub chains: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum EmbeddingDocError {
    #[error("invalid embedding json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("chain key `{0}` is not a vertex index")]
    BadKey(String),
}

impl EmbeddingDoc {
    pub fn new(graph_n: usize, host: &ChimeraGraph, e: &Embedding) -> Self {
        EmbeddingDoc {
            graph_n,
            chimera: ChimeraDims::of(host),
            chains: e.chains().map(|(v, c)| (v.to_string(), c.to_vec())).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, EmbeddingDocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("embedding serializes")
    }

    pub fn embedding(&self) -> Result<Embedding, EmbeddingDocError> {
        let mut e = Embedding::new();
        for (k, chain) in &self.chains {
            let v = k.parse().map_err(|_| EmbeddingDocError::BadKey(k.clone()))?;
            e.insert(v, chain.clone());
        }
        Ok(e)
    }
}
