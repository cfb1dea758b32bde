use super::{CountyNetwork, Edge, NodeAttrs, NodeId, WeightMode};
use crate::error::{Error, Result};

/// Triangular lattice with `rows × cols` nodes.
///
/// Every cell gets its horizontal, vertical and one diagonal edge. The
/// diagonal orientation alternates with the column parity, so adjacent
/// cell columns tile as an offset triangular grid. Node `(r, c)` has id
/// `r * cols + c`, zero-padded; edges are stored in both directions with
/// weight 1.
pub fn triangular_lattice(rows: usize, cols: usize) -> Result<CountyNetwork> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidArgument(format!(
            "lattice dimensions must be at least 2x2, got {rows}x{cols}"
        )));
    }
    let n = rows * cols;
    if n > 100_000 {
        return Err(Error::InvalidArgument(format!("lattice of {n} nodes exceeds 5-digit ids")));
    }
    let at = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(2 * (3 * n));
    let mut link = |a: usize, b: usize| {
        for (from, to) in [(a, b), (b, a)] {
            edges.push(Edge {
                from,
                to,
                mu: 1.0,
                commuters: None,
            });
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                link(at(r, c), at(r, c + 1));
            }
            if r + 1 < rows {
                link(at(r, c), at(r + 1, c));
            }
            if r + 1 < rows && c + 1 < cols {
                if c % 2 == 0 {
                    link(at(r, c), at(r + 1, c + 1));
                } else {
                    link(at(r, c + 1), at(r + 1, c));
                }
            }
        }
    }
    let nodes: Vec<NodeId> = (0..n)
        .map(|k| NodeId::new(format!("{k:05}")).expect("5-digit id"))
        .collect();
    let attrs = nodes.iter().map(NodeAttrs::for_id).collect();
    CountyNetwork::from_parts(nodes, attrs, edges, WeightMode::Binary)
}
