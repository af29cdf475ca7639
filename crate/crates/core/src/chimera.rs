//! The Chimera hardware graph `C_{M,N,L}`.
//!
//! An `M x N` grid of `K_{L,L}` cells. Row 0 is the top of the grid. The
//! `i`-th left vertex of a cell couples to the `i`-th left vertex of the cells
//! directly above and below; the `i`-th right vertex couples to the `i`-th
//! right vertex of the cells to its left and right.
//!
//! Linear ids follow `((row * N + col) * 2 + side) * L + unit` with
//! `Left = 0`, `Right = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Side;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChimeraError {
    #[error("chimera dimensions must be positive, got ({m}, {n}, {l})")]
    ZeroDimension { m: usize, n: usize, l: usize },
    #[error("coordinate {0:?} out of range")]
    CoordOutOfRange(ChimeraCoord),
    #[error("qubit {id} out of range, graph has {count} qubits")]
    IdOutOfRange { id: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChimeraCoord {
    pub row: usize,
    pub col: usize,
    pub side: Side,
    pub unit: usize,
}

impl ChimeraCoord {
    pub fn new(row: usize, col: usize, side: Side, unit: usize) -> Self {
        ChimeraCoord { row, col, side, unit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraGraph {
    m: usize,
    n: usize,
    l: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl ChimeraGraph {
    pub fn new(m: usize, n: usize, l: usize) -> Result<Self, ChimeraError> {
        if m == 0 || n == 0 || l == 0 {
            return Err(ChimeraError::ZeroDimension { m, n, l });
        }
        let mut g = ChimeraGraph { m, n, l, adj: vec![Vec::new(); 2 * m * n * l], edges: Vec::new() };
        for row in 0..m {
            for col in 0..n {
                for a in 0..l {
                    let left = g.id(row, col, Side::Left, a);
                    for b in 0..l {
                        g.edges.push((left, g.id(row, col, Side::Right, b)));
                    }
                    if row + 1 < m {
                        g.edges.push((left, g.id(row + 1, col, Side::Left, a)));
                    }
                    if col + 1 < n {
                        let right = g.id(row, col, Side::Right, a);
                        g.edges.push((right, g.id(row, col + 1, Side::Right, a)));
                    }
                }
            }
        }
        g.edges.sort_unstable();
        for &(u, v) in &g.edges {
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// The square grid `C_{M,M,L}`.
    pub fn square(m: usize, l: usize) -> Result<Self, ChimeraError> {
        Self::new(m, m, l)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn shore(&self) -> usize {
        self.l
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.m * self.n * self.l
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `M N L^2 + L N (M - 1) + L M (N - 1)`.
    pub fn expected_edge_count(&self) -> usize {
        let (m, n, l) = (self.m, self.n, self.l);
        m * n * l * l + l * n * (m - 1) + l * m * (n - 1)
    }

    fn id(&self, row: usize, col: usize, side: Side, unit: usize) -> usize {
        let s = match side {
            Side::Left => 0,
            Side::Right => 1,
        };
        ((row * self.n + col) * 2 + s) * self.l + unit
    }

    /// Linear id of a coordinate; panics on out-of-range input. See
    /// [`ChimeraGraph::vertex_index`] for the checked form.
    pub fn qubit(&self, row: usize, col: usize, side: Side, unit: usize) -> usize {
        assert!(row < self.m && col < self.n && unit < self.l, "coordinate out of range");
        self.id(row, col, side, unit)
    }

    pub fn vertex_index(&self, c: ChimeraCoord) -> Result<usize, ChimeraError> {
        if c.row >= self.m || c.col >= self.n || c.unit >= self.l {
            return Err(ChimeraError::CoordOutOfRange(c));
        }
        Ok(self.id(c.row, c.col, c.side, c.unit))
    }

    pub fn coord_of(&self, id: usize) -> Result<ChimeraCoord, ChimeraError> {
        self.check(id)?;
        let unit = id % self.l;
        let rest = id / self.l;
        let side = if rest % 2 == 0 { Side::Left } else { Side::Right };
        let cell = rest / 2;
        Ok(ChimeraCoord { row: cell / self.n, col: cell % self.n, side, unit })
    }

    pub fn neighbors(&self, id: usize) -> Result<&[usize], ChimeraError> {
        self.check(id)?;
        Ok(&self.adj[id])
    }

    pub(crate) fn adjacency(&self, id: usize) -> &[usize] {
        &self.adj[id]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    fn check(&self, id: usize) -> Result<(), ChimeraError> {
        if id < self.num_qubits() {
            Ok(())
        } else {
            Err(ChimeraError::IdOutOfRange { id, count: self.num_qubits() })
        }
    }
}
