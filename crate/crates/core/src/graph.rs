//! Immutable undirected graphs in compressed adjacency layout.

use crate::error::{invalid, Result, SscError};

/// An undirected simple graph with dense 0-based node ids.
///
/// Neighbor lists are stored back to back (`offsets[i]..offsets[i + 1]`
/// indexes into `neighbors`), each sorted ascending with no duplicates and
/// no self-loops. Adjacency is symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    n_edges: usize,
    dropped_self_loops: usize,
}

impl SparseGraph {
    /// Builds a graph from an unordered list of node pairs.
    ///
    /// Pairs may appear in either orientation and more than once; they
    /// collapse to a single undirected edge. Self-loops are dropped and
    /// counted (see [`SparseGraph::dropped_self_loops`]).
    pub fn from_edge_list(pairs: &[(usize, usize)], n_nodes: usize) -> Result<Self> {
        let mut degree = vec![0usize; n_nodes];
        let mut loops = 0;
        for &(u, v) in pairs {
            if u >= n_nodes || v >= n_nodes {
                return invalid(format!("edge ({u}, {v}) references a node outside [0, {n_nodes})"));
            }
            if u == v {
                loops += 1;
                continue;
            }
            degree[u] += 1;
            degree[v] += 1;
        }

        let mut offsets = Vec::with_capacity(n_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n_nodes].to_vec();
        let mut neighbors = vec![0usize; *offsets.last().unwrap()];
        for &(u, v) in pairs {
            if u == v {
                continue;
            }
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }

        // sort + dedup each list, then compact
        let mut compact_offsets = Vec::with_capacity(n_nodes + 1);
        compact_offsets.push(0);
        let mut write = 0;
        for i in 0..n_nodes {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            neighbors[lo..hi].sort_unstable();
            let mut last = usize::MAX;
            for r in lo..hi {
                let v = neighbors[r];
                if v != last {
                    neighbors[write] = v;
                    write += 1;
                    last = v;
                }
            }
            compact_offsets.push(write);
        }
        neighbors.truncate(write);
        neighbors.shrink_to_fit();

        Ok(Self {
            offsets: compact_offsets,
            n_edges: write / 2,
            neighbors,
            dropped_self_loops: loops,
        })
    }

    /// A graph with `n_nodes` isolated nodes.
    pub fn empty(n_nodes: usize) -> Self {
        Self {
            offsets: vec![0; n_nodes + 1],
            neighbors: Vec::new(),
            n_edges: 0,
            dropped_self_loops: 0,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges, each counted once.
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Self-loops discarded during construction.
    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn degrees(&self) -> DegreeVector {
        DegreeVector {
            values: (0..self.n_nodes()).map(|i| self.degree(i)).collect(),
        }
    }

    /// Iterates over undirected edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Edge density `|E| / C(N, 2)`.
    pub fn density(&self) -> Result<f64> {
        edge_density(self.n_nodes(), self.n_edges)
    }

    /// The N×n bi-adjacency matrix whose column `j` is adjacency column
    /// `sample[j]`.
    pub fn bi_adjacency(&self, sample: &[usize]) -> Result<BiAdjacency> {
        let n = self.n_nodes();
        let mut seen = vec![false; n];
        for &s in sample {
            if s >= n {
                return invalid(format!("sample id {s} outside [0, {n})"));
            }
            if std::mem::replace(&mut seen[s], true) {
                return invalid(format!("duplicate sample id {s}"));
            }
        }
        let mut col_offsets = Vec::with_capacity(sample.len() + 1);
        col_offsets.push(0);
        let total: usize = sample.iter().map(|&s| self.degree(s)).sum();
        let mut rows = Vec::with_capacity(total);
        for &s in sample {
            rows.extend_from_slice(self.neighbors(s));
            col_offsets.push(rows.len());
        }
        Ok(BiAdjacency {
            n_rows: n,
            sample: sample.to_vec(),
            col_offsets,
            rows,
        })
    }
}

/// Density of a graph given only its node and edge counts.
pub fn edge_density(n_nodes: usize, n_edges: usize) -> Result<f64> {
    if n_nodes < 2 {
        return invalid("density needs at least two nodes");
    }
    let pairs = n_nodes as f64 * (n_nodes as f64 - 1.0) / 2.0;
    Ok(n_edges as f64 / pairs)
}

/// Observed node degrees `d_i = Σ_j A_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector {
    pub values: Vec<usize>,
}

impl DegreeVector {
    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }
}

/// Connections from every node to an ordered set of sampled nodes.
///
/// Stored column-wise: column `j` lists the (sorted) rows `i` with
/// `A[i, sample[j]] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiAdjacency {
    n_rows: usize,
    sample: Vec<usize>,
    col_offsets: Vec<usize>,
    rows: Vec<usize>,
}

impl BiAdjacency {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.sample.len()
    }

    pub fn sample_ids(&self) -> &[usize] {
        &self.sample
    }

    /// Rows with a 1 in column `j`.
    pub fn column(&self, j: usize) -> &[usize] {
        &self.rows[self.col_offsets[j]..self.col_offsets[j + 1]]
    }

    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.column(j).binary_search(&i).is_ok()
    }

    /// Row sums: connections of each node into the sample.
    pub fn row_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_rows];
        for &r in &self.rows {
            d[r] += 1;
        }
        d
    }

    /// Column sums: degree of each sampled node.
    pub fn col_degrees(&self) -> Vec<usize> {
        self.col_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

impl TryFrom<&BiAdjacency> for SparseGraph {
    type Error = SscError;

    /// Recovers the graph spanned by a bi-adjacency whose sample is the full
    /// node set.
    fn try_from(b: &BiAdjacency) -> Result<Self> {
        if b.n_cols() != b.n_rows() {
            return invalid("bi-adjacency does not cover every node");
        }
        let pairs: Vec<(usize, usize)> = (0..b.n_cols())
            .flat_map(|j| b.column(j).iter().map(move |&i| (i, b.sample[j])))
            .collect();
        SparseGraph::from_edge_list(&pairs, b.n_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SparseGraph {
        SparseGraph::from_edge_list(&[(0, 1), (1, 2), (0, 2)], 3).unwrap()
    }

    fn star(leaves: usize) -> SparseGraph {
        let pairs: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        SparseGraph::from_edge_list(&pairs, leaves + 1).unwrap()
    }

    #[test]
    fn dedups_and_drops_loops() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 0), (1, 1), (1, 2)], 3).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[1]);
        assert_eq!(g.dropped_self_loops(), 1);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn empty_edge_list_gives_isolates() {
        let g = SparseGraph::from_edge_list(&[], 5).unwrap();
        assert_eq!(g.n_nodes(), 5);
        assert_eq!(g.n_edges(), 0);
        assert_eq!(g.degrees().values, vec![0; 5]);
        assert_eq!(g, SparseGraph::empty(5));
    }

    #[test]
    fn out_of_range_id_rejected() {
        let err = SparseGraph::from_edge_list(&[(0, 3)], 3).unwrap_err();
        assert!(matches!(err, SscError::InvalidInput(_)));
    }

    #[test]
    fn degrees_of_small_graphs() {
        assert_eq!(triangle().degrees().values, vec![2, 2, 2]);
        assert_eq!(star(4).degrees().values, vec![4, 1, 1, 1, 1]);
        let g = triangle();
        assert_eq!(g.degrees().total(), 2 * g.n_edges());
    }

    #[test]
    fn density_cases() {
        let k4 = SparseGraph::from_edge_list(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4).unwrap();
        assert_eq!(k4.density().unwrap(), 1.0);
        assert_eq!(SparseGraph::empty(10).density().unwrap(), 0.0);
        let d = edge_density(9_980, 1_325_604).unwrap();
        assert_eq!((d * 1000.0).round() / 1000.0, 0.027);
        assert!(SparseGraph::empty(1).density().is_err());
    }

    #[test]
    fn bi_adjacency_of_triangle() {
        let b = triangle().bi_adjacency(&[0]).unwrap();
        assert_eq!(b.n_rows(), 3);
        assert_eq!(b.n_cols(), 1);
        let col: Vec<bool> = (0..3).map(|i| b.get(i, 0)).collect();
        assert_eq!(col, vec![false, true, true]);
    }

    #[test]
    fn bi_adjacency_full_sample_is_adjacency() {
        let g = star(4);
        let all: Vec<usize> = (0..5).collect();
        let b = g.bi_adjacency(&all).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(b.get(i, j), g.has_edge(i, j));
            }
        }
        assert_eq!(SparseGraph::try_from(&b).unwrap(), g);
    }

    #[test]
    fn bi_adjacency_rejects_bad_samples() {
        let g = triangle();
        assert!(g.bi_adjacency(&[0, 0]).is_err());
        assert!(g.bi_adjacency(&[3]).is_err());
    }

    /// Ten nodes, two communities {0..4} and {5..9}, four sampled nodes.
    #[test]
    fn two_community_toy_graph_block_pattern() {
        let mut pairs = Vec::new();
        for c in [0usize, 5] {
            for a in c..c + 5 {
                for b in a + 1..c + 5 {
                    if (a + b) % 3 != 0 {
                        pairs.push((a, b));
                    }
                }
            }
        }
        pairs.push((4, 5));
        let g = SparseGraph::from_edge_list(&pairs, 10).unwrap();
        let sample = [1, 3, 6, 8];
        let b = g.bi_adjacency(&sample).unwrap();
        for i in 0..10 {
            for (j, &s) in sample.iter().enumerate() {
                assert_eq!(b.get(i, j), g.has_edge(i, s), "entry ({i}, {j})");
            }
        }
        // no edges cross the communities except 4-5, so sampled columns of
        // one community are empty on the other community's rows
        for i in 5..10 {
            assert!(!b.get(i, 0) && !b.get(i, 1));
        }
        for i in 0..5 {
            assert!(!b.get(i, 2) && !b.get(i, 3));
        }
    }
}
