//! Graph text formats.
//!
//! DIMACS-like: an optional run of `c` comment lines, a header
//! `p edge <n> <m>`, then `m` lines `e <i> <j>` with 1-based endpoints.
//! JSON: `{"n": <int>, "edges": [[i, j], ...]}` with 0-based endpoints.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GraphError, ProblemGraph};

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

pub fn to_dimacs(g: &ProblemGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.n(), g.edge_count()).unwrap();
    for &(i, j) in g.edges() {
        writeln!(out, "e {} {}", i + 1, j + 1).unwrap();
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<ProblemGraph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let parse_err = |msg: &str| GraphError::Parse { line: line_no, msg: msg.to_string() };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err("duplicate problem line"));
                }
                if fields.len() != 4 || (fields[1] != "edge" && fields[1] != "col") {
                    return Err(parse_err("expected `p edge <n> <m>`"));
                }
                let n = fields[2].parse().map_err(|_| parse_err("bad vertex count"))?;
                let m = fields[3].parse().map_err(|_| parse_err("bad edge count"))?;
                header = Some((n, m));
            }
            "e" => {
                let (n, _) = header.ok_or_else(|| parse_err("edge before problem line"))?;
                if fields.len() != 3 {
                    return Err(parse_err("expected `e <i> <j>`"));
                }
                let mut ends = [0usize; 2];
                for (slot, f) in ends.iter_mut().zip(&fields[1..]) {
                    let v: usize = f.parse().map_err(|_| parse_err("bad endpoint"))?;
                    if v == 0 || v > n {
                        return Err(parse_err(&format!("endpoint {v} outside 1..={n}")));
                    }
                    *slot = v - 1;
                }
                if ends[0] == ends[1] {
                    return Err(parse_err("self-loop"));
                }
                pairs.push((ends[0], ends[1]));
            }
            other => return Err(parse_err(&format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(GraphError::Parse { line: 0, msg: "missing problem line".into() })?;
    if pairs.len() != m {
        return Err(GraphError::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", pairs.len()),
        });
    }
    ProblemGraph::from_edges(n, pairs)
}

pub fn to_json(g: &ProblemGraph) -> String {
    let doc = GraphJson { n: g.n(), edges: g.edges().iter().map(|&(i, j)| [i, j]).collect() };
    serde_json::to_string(&doc).expect("graph json serializes")
}

pub fn parse_json(text: &str) -> Result<ProblemGraph, GraphError> {
    let doc: GraphJson = serde_json::from_str(text)?;
    ProblemGraph::from_edges(doc.n, doc.edges.into_iter().map(|[i, j]| (i, j)))
}

/// Reads either format, choosing JSON when the first non-blank character is `{`.
pub fn read_graph(path: impl AsRef<Path>) -> Result<ProblemGraph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

pub fn parse_graph(text: &str) -> Result<ProblemGraph, GraphError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_dimacs(text)
    }
}
