use crate::Scalar;

use super::{Cell, WorkspaceLayout};

/// Quotient of the partition: one node per cell, edges between 4-neighbours
/// and a self-loop on every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    nx: usize,
    ny: usize,
    // neighbour lists by dense cell index, sorted by (i, j), self included
    neighbors: Vec<Vec<usize>>,
}

impl QuotientGraph {
    pub fn from_layout<T: Scalar>(layout: &WorkspaceLayout<T>) -> Self {
        QuotientGraph::grid(layout.nx(), layout.ny())
    }

    pub fn grid(nx: usize, ny: usize) -> Self {
        let idx = |c: Cell| c.j * nx + c.i;
        let mut neighbors = vec![Vec::new(); nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                let mut ns: Vec<Cell> = vec![Cell::new(i, j)];
                if i > 0 {
                    ns.push(Cell::new(i - 1, j));
                }
                if i + 1 < nx {
                    ns.push(Cell::new(i + 1, j));
                }
                if j > 0 {
                    ns.push(Cell::new(i, j - 1));
                }
                if j + 1 < ny {
                    ns.push(Cell::new(i, j + 1));
                }
                ns.sort();
                neighbors[idx(Cell::new(i, j))] = ns.into_iter().map(idx).collect();
            }
        }
        QuotientGraph { nx, ny, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.nx, index / self.nx)
    }

    pub fn index(&self, c: Cell) -> usize {
        c.j * self.nx + c.i
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Neighbours of a node (self-loop included), lexicographic by cell.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.neighbors[index]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].contains(&b)
    }

    /// Undirected edges between distinct cells.
    pub fn adjacency_edge_count(&self) -> usize {
        self.neighbors.iter().map(|n| n.len() - 1).sum::<usize>() / 2
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.node_count()).filter(|&k| self.has_edge(k, k)).count()
    }
}
