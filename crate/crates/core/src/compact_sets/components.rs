use super::{CrackSet, LatticeNode};
use crate::union_find::UnionFind;
use std::collections::{BTreeMap, HashMap};

/// Partition of crack edges into connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    /// Component id per edge, in the crack's lexicographic edge order.
    pub labels: Vec<usize>,
    pub count: usize,
}

/// Components of the union of closed edges.
///
/// Edges meet either at shared lattice nodes or, for the two diagonals of
/// one lattice cell, at the cell centre.
pub fn connected_components(k: &CrackSet) -> ComponentLabeling {
    let edges: Vec<_> = k.edges().copied().collect();
    let mut node_ids: BTreeMap<LatticeNode, usize> = BTreeMap::new();
    for e in &edges {
        let next = node_ids.len();
        node_ids.entry(e.a).or_insert(next);
        let next = node_ids.len();
        node_ids.entry(e.b).or_insert(next);
    }
    let mut uf = UnionFind::new(node_ids.len());
    let mut diagonal_in_cell: HashMap<(u32, u32), usize> = HashMap::new();
    for e in &edges {
        let (a, b) = (node_ids[&e.a], node_ids[&e.b]);
        uf.union(a, b);
        if let Some(cell) = e.diagonal_cell() {
            if let Some(&other) = diagonal_in_cell.get(&cell) {
                uf.union(a, other);
            } else {
                diagonal_in_cell.insert(cell, a);
            }
        }
    }
    let (node_labels, _) = uf.labels();
    // relabel densely in edge order so the labels depend only on the edge set
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let labels = edges
        .iter()
        .map(|e| {
            let root = node_labels[node_ids[&e.a]];
            let next = remap.len();
            *remap.entry(root).or_insert(next)
        })
        .collect();
    ComponentLabeling {
        labels,
        count: remap.len(),
    }
}
