//! Template minors of a square Chimera graph, each given as ordered
//! partitions of vertex-disjoint qubit chains.
//!
//! * BTE: `K_{ML,ML}`. `U1` chain `(r, i)` is unit `i` of every right shore
//!   in row `r`; `U2` chain `(c, i)` is unit `i` of every left shore in
//!   column `c`. Chain index within a partition is `r * L + i` (resp. `c * L + i`).
//! * QTE: with `P = M / 2`, `U1` holds the top `P` row chains, `U2` the top
//!   halves of the column chains, `U3` the bottom halves, `U4` the bottom `P`
//!   row chains. `U2` chain `k` couples to `U3` chain `k` across the row
//!   `P - 1` / `P` boundary.
//! * TRIAD clique: chain `(g, i)` runs down column `g` on left shores from
//!   the diagonal cell `(g, g)` to the bottom row, and along row `g` on right
//!   shores from column 0 to the diagonal. Two chains of groups `g < h` meet
//!   in cell `(h, g)`; chains of one group meet in their diagonal cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::ChimeraGraph;
use crate::graph::{ProblemGraph, Side};
use crate::verify::{verify, Embedding};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("templates need a square grid, got {m} x {n}")]
    NonSquare { m: usize, n: usize },
    #[error("QTE needs an even grid side, got {0}")]
    OddM(usize),
    #[error("{0:?} templates have no complete-graph embedding; use the minor graph instead")]
    UnsupportedKind(TemplateKind),
    #[error("the extra clique chain does not fit in C_{{{m},{m},{l}}}")]
    ExtraChainUnsupported { m: usize, l: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateKind {
    #[serde(rename = "BTE")]
    Bte,
    #[serde(rename = "QTE")]
    Qte,
    TriadClique,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub kind: TemplateKind,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    /// Chains per partition; each chain is a sorted list of qubit ids.
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl Template {
    pub fn host(&self) -> ChimeraGraph {
        ChimeraGraph::square(self.m, self.l).expect("template dims are positive")
    }

    pub fn partition_sizes(&self) -> Vec<usize> {
        self.partitions.iter().map(Vec::len).collect()
    }

    pub fn chain_count(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }

    pub fn qubits_used(&self) -> usize {
        self.partitions.iter().flatten().map(Vec::len).sum()
    }

    /// Chains flattened in partition order; chain `k` becomes logical vertex `k`.
    pub fn chain_embedding(&self) -> Embedding {
        let mut e = Embedding::new();
        for (k, chain) in self.partitions.iter().flatten().enumerate() {
            e.insert(k, chain.clone());
        }
        e
    }

    /// The minor realized by the chains, on vertices numbered as in
    /// [`Template::chain_embedding`].
    pub fn minor_graph(&self) -> ProblemGraph {
        let sizes = self.partition_sizes();
        match self.kind {
            TemplateKind::Bte => ProblemGraph::complete_bipartite(sizes[0], sizes[1]),
            TemplateKind::TriadClique => ProblemGraph::complete(sizes[0]),
            TemplateKind::Qte => {
                let offsets: Vec<usize> = sizes
                    .iter()
                    .scan(0, |acc, &s| {
                        let start = *acc;
                        *acc += s;
                        Some(start)
                    })
                    .collect();
                let mut edges = Vec::new();
                for (a, b) in [(0, 1), (2, 3)] {
                    for i in 0..sizes[a] {
                        for j in 0..sizes[b] {
                            edges.push((offsets[a] + i, offsets[b] + j));
                        }
                    }
                }
                for k in 0..sizes[1] {
                    edges.push((offsets[1] + k, offsets[2] + k));
                }
                ProblemGraph::from_edges(sizes.iter().sum(), edges).expect("minor edges are valid")
            }
        }
    }

    /// QTE chain pairs `(U2 index, U3 index)` joined by a coupler.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        match self.kind {
            TemplateKind::Qte => (0..self.partitions[1].len()).map(|k| (k, k)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("template serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn square_side(g: &ChimeraGraph) -> Result<usize, TemplateError> {
    if g.rows() != g.cols() {
        return Err(TemplateError::NonSquare { m: g.rows(), n: g.cols() });
    }
    Ok(g.rows())
}

fn row_chain(g: &ChimeraGraph, row: usize, unit: usize) -> Vec<usize> {
    let mut c: Vec<usize> = (0..g.cols()).map(|col| g.qubit(row, col, Side::Right, unit)).collect();
    c.sort_unstable();
    c
}

fn column_chain(g: &ChimeraGraph, col: usize, rows: std::ops::Range<usize>, unit: usize) -> Vec<usize> {
    let mut c: Vec<usize> = rows.map(|row| g.qubit(row, col, Side::Left, unit)).collect();
    c.sort_unstable();
    c
}

pub fn bte_template(g: &ChimeraGraph) -> Result<Template, TemplateError> {
    let m = square_side(g)?;
    let l = g.shore();
    let u1 = (0..m).flat_map(|r| (0..l).map(move |i| (r, i))).map(|(r, i)| row_chain(g, r, i)).collect();
    let u2 = (0..m)
        .flat_map(|c| (0..l).map(move |i| (c, i)))
        .map(|(c, i)| column_chain(g, c, 0..m, i))
        .collect();
    Ok(Template { kind: TemplateKind::Bte, m, l, partitions: vec![u1, u2] })
}

pub fn qte_template(g: &ChimeraGraph) -> Result<Template, TemplateError> {
    let m = square_side(g)?;
    if m % 2 != 0 {
        return Err(TemplateError::OddM(m));
    }
    let p = m / 2;
    let l = g.shore();
    let rows = |range: std::ops::Range<usize>| -> Vec<Vec<usize>> {
        range.flat_map(|r| (0..l).map(move |i| (r, i))).map(|(r, i)| row_chain(g, r, i)).collect()
    };
    let cols = |range: std::ops::Range<usize>| -> Vec<Vec<usize>> {
        (0..m)
            .flat_map(|c| (0..l).map(move |i| (c, i)))
            .map(|(c, i)| column_chain(g, c, range.clone(), i))
            .collect()
    };
    let partitions = vec![rows(0..p), cols(0..p), cols(p..m), rows(p..m)];
    Ok(Template { kind: TemplateKind::Qte, m, l, partitions })
}

/// Merges each matched `U2`/`U3` pair of a QTE into one chain, giving a BTE
/// with partitions `[U1 ∪ U4, U2 ⋈ U3]`.
pub fn contract_qte(t: &Template) -> Result<Template, TemplateError> {
    if t.kind != TemplateKind::Qte {
        return Err(TemplateError::UnsupportedKind(t.kind));
    }
    let rows: Vec<Vec<usize>> = t.partitions[0].iter().chain(&t.partitions[3]).cloned().collect();
    let merged = t.partitions[1]
        .iter()
        .zip(&t.partitions[2])
        .map(|(a, b)| {
            let mut c: Vec<usize> = a.iter().chain(b).copied().collect();
            c.sort_unstable();
            c
        })
        .collect();
    Ok(Template { kind: TemplateKind::Bte, m: t.m, l: t.l, partitions: vec![rows, merged] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriadLayout {
    /// Every chain is the full L shape of `M + 1` qubits.
    Full,
    /// Drops the two qubits that no other chain depends on: the diagonal right
    /// qubit of chain `(0, 0)` and, for `M >= 2`, the diagonal left qubit of
    /// chain `(M - 1, 0)`. Every remaining qubit is essential.
    #[default]
    Minimal,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TriadOptions {
    pub layout: TriadLayout,
    /// Adds one more chain over the unused upper triangle, giving `K_{ML+1}`.
    /// The extra chain touches the diagonal qubits, so it forces the full layout.
    pub extra_vertex: bool,
}

pub fn triad_clique_template(g: &ChimeraGraph) -> Result<Template, TemplateError> {
    triad_clique_template_with(g, TriadOptions::default())
}

pub fn triad_clique_template_with(g: &ChimeraGraph, opts: TriadOptions) -> Result<Template, TemplateError> {
    let m = square_side(g)?;
    let l = g.shore();
    let layout = if opts.extra_vertex { TriadLayout::Full } else { opts.layout };
    let mut chains = Vec::with_capacity(m * l + 1);
    for grp in 0..m {
        for i in 0..l {
            let mut c: Vec<usize> = (grp..m).map(|r| g.qubit(r, grp, Side::Left, i)).collect();
            c.extend((0..=grp).map(|col| g.qubit(grp, col, Side::Right, i)));
            if layout == TriadLayout::Minimal && i == 0 {
                if grp == 0 {
                    c.retain(|&q| q != g.qubit(0, 0, Side::Right, 0));
                } else if grp == m - 1 {
                    c.retain(|&q| q != g.qubit(m - 1, m - 1, Side::Left, 0));
                }
            }
            c.sort_unstable();
            chains.push(c);
        }
    }
    if opts.extra_vertex {
        if m < 2 {
            return Err(TemplateError::ExtraChainUnsupported { m, l });
        }
        let mut extra = Vec::new();
        for grp in 0..m - 1 {
            for i in 0..l {
                extra.push(g.qubit(grp, grp + 1, Side::Left, i));
                extra.push(g.qubit(grp, grp + 1, Side::Right, i));
            }
            if grp + 2 < m {
                extra.push(g.qubit(grp, grp + 2, Side::Right, 0));
                extra.push(g.qubit(grp, grp + 2, Side::Left, 0));
            }
        }
        extra.sort_unstable();
        chains.push(extra);
    }
    let t = Template { kind: TemplateKind::TriadClique, m, l, partitions: vec![chains] };
    if opts.extra_vertex {
        let report = verify(&t.minor_graph(), g, &t.chain_embedding()).expect("chains are in range");
        if !report.ok {
            return Err(TemplateError::ExtraChainUnsupported { m, l });
        }
    }
    Ok(t)
}

/// The logical graph a BTE or TRIAD template realizes, with the chains as its
/// embedding. QTE templates are rejected: their minor is not a complete
/// (bipartite) graph, see [`Template::minor_graph`].
pub fn template_as_embedding(t: &Template) -> Result<(ProblemGraph, Embedding), TemplateError> {
    match t.kind {
        TemplateKind::Qte => Err(TemplateError::UnsupportedKind(t.kind)),
        _ => Ok((t.minor_graph(), t.chain_embedding())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verified(t: &Template) -> bool {
        let r = verify(&t.minor_graph(), &t.host(), &t.chain_embedding()).unwrap();
        r.ok
    }

    fn disjoint(t: &Template) -> bool {
        let mut all: Vec<usize> = t.partitions.iter().flatten().flatten().copied().collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == total
    }

    #[test]
    fn bte_shapes() {
        let t = bte_template(&ChimeraGraph::square(2, 4).unwrap()).unwrap();
        assert_eq!(t.partition_sizes(), vec![8, 8]);
        assert!(t.partitions.iter().flatten().all(|c| c.len() == 2));
        assert!(verified(&t) && disjoint(&t));
        let one = bte_template(&ChimeraGraph::square(1, 2).unwrap()).unwrap();
        let (g, e) = template_as_embedding(&one).unwrap();
        assert_eq!(g, ProblemGraph::complete_bipartite(2, 2));
        assert!(e.chains().all(|(_, c)| c.len() == 1));
        assert!(matches!(
            bte_template(&ChimeraGraph::new(2, 3, 4).unwrap()),
            Err(TemplateError::NonSquare { m: 2, n: 3 })
        ));
    }

    #[test]
    fn qte_shapes() {
        let h = ChimeraGraph::square(2, 4).unwrap();
        let t = qte_template(&h).unwrap();
        assert_eq!(t.partition_sizes(), vec![4, 8, 8, 4]);
        assert!(t.partitions[1].iter().chain(&t.partitions[2]).all(|c| c.len() == 1));
        assert!(verified(&t) && disjoint(&t));
        assert_eq!(t.qubits_used(), h.num_qubits());
        let bte = contract_qte(&t).unwrap();
        assert_eq!(bte.partition_sizes(), vec![8, 8]);
        assert!(verified(&bte));
        assert_eq!(template_as_embedding(&t), Err(TemplateError::UnsupportedKind(TemplateKind::Qte)));
        assert_eq!(qte_template(&ChimeraGraph::square(3, 2).unwrap()), Err(TemplateError::OddM(3)));
    }

    #[test]
    fn qte_c16_sizes() {
        let t = qte_template(&ChimeraGraph::square(16, 4).unwrap()).unwrap();
        assert_eq!(t.partition_sizes(), vec![32, 64, 64, 32]);
        assert!(verified(&t));
        assert!(verified(&contract_qte(&t).unwrap()));
    }

    #[test]
    fn triad_layouts() {
        for m in 1..=5 {
            for l in 1..=4 {
                let h = ChimeraGraph::square(m, l).unwrap();
                let full = triad_clique_template_with(&h, TriadOptions { layout: TriadLayout::Full, extra_vertex: false }).unwrap();
                assert!(full.partitions[0].iter().all(|c| c.len() == m + 1));
                assert_eq!(full.qubits_used(), m * l * (m + 1));
                assert!(verified(&full) && disjoint(&full), "full m={m} l={l}");
                let min = triad_clique_template(&h).unwrap();
                let dropped = if m >= 2 { 2 } else { 1 };
                assert_eq!(min.qubits_used(), m * l * (m + 1) - dropped);
                assert!(verified(&min), "minimal m={m} l={l}");
            }
        }
    }

    #[test]
    fn triad_extra_vertex() {
        for (m, l) in [(2, 2), (4, 4), (8, 4)] {
            let h = ChimeraGraph::square(m, l).unwrap();
            let t = triad_clique_template_with(&h, TriadOptions { extra_vertex: true, ..Default::default() }).unwrap();
            assert_eq!(t.chain_count(), m * l + 1);
            assert!(verified(&t) && disjoint(&t));
        }
        let h = ChimeraGraph::square(1, 3).unwrap();
        assert!(triad_clique_template_with(&h, TriadOptions { extra_vertex: true, ..Default::default() }).is_err());
    }

    #[test]
    fn json_schema() {
        let t = bte_template(&ChimeraGraph::square(1, 1).unwrap()).unwrap();
        let text = t.to_json();
        assert_eq!(text, r#"{"kind":"BTE","M":1,"L":1,"partitions":[[[1]],[[0]]]}"#);
        assert_eq!(Template::from_json(&text).unwrap(), t);
    }
}
