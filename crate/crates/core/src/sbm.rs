//! Stochastic block model parameters and network generation.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{invalid, Result, SscError};
use crate::graph::SparseGraph;
use crate::rng::{derive_seed, rng_from_seed, SscRng};

/// Largest N for which dense population matrices are materialized.
pub const POPULATION_DENSE_GUARD: usize = 10_000;

/// Symmetric K×K matrix of edge probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl BlockMatrix {
    /// Builds a block matrix from rows, checking symmetry and that every
    /// entry is a probability.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return invalid("block matrix needs at least one community");
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return invalid("block matrix must be square");
            }
            entries.extend_from_slice(row);
        }
        for a in 0..k {
            for b in 0..k {
                let p = entries[a * k + b];
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("block entry ({a}, {b}) = {p} is not a probability"));
                }
                if p != entries[b * k + a] {
                    return invalid("block matrix must be symmetric");
                }
            }
        }
        Ok(Self { k, entries })
    }

    /// `β((1 − ζ) I + ζ 1 1ᵀ)`: within-block probability β, between-block βζ.
    pub fn planted(beta: f64, zeta: f64, k: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) || !(0.0..=1.0).contains(&zeta) {
            return invalid(format!("beta = {beta} and zeta = {zeta} must lie in [0, 1]"));
        }
        if k == 0 {
            return invalid("K must be at least 1");
        }
        let entries = (0..k * k)
            .map(|idx| if idx / k == idx % k { beta } else { beta * zeta })
            .collect();
        Ok(Self { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.k + b]
    }
}

/// Community assignment of every node, labels in `0..k`.
///
/// Labels are 0-based in memory; text files written by this crate use
/// 1-based labels (see [`crate::io`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("label vector needs K >= 1");
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return invalid(format!("label {l} of node {i} outside [0, {k})"));
        }
        Ok(Self { labels, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, node: usize) -> usize {
        self.labels[node]
    }

    /// Community sizes `N_1..N_K`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Node ids of each community, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            m[l].push(i);
        }
        m
    }

    /// Dense N×K 0/1 membership matrix `Z`.
    pub fn membership_matrix(&self) -> Array2<f64> {
        let mut z = Array2::zeros((self.len(), self.k));
        for (i, &l) in self.labels.iter().enumerate() {
            z[[i, l]] = 1.0;
        }
        z
    }
}

/// Draws i.i.d. labels from the multinomial distribution `pi`.
///
/// Draws are unconditional, so at small N a community can come out empty.
pub fn sample_memberships(pi: &[f64], n_nodes: usize, rng: &mut SscRng) -> Result<LabelVector> {
    validate_probability_vector(pi)?;
    if n_nodes == 0 {
        return invalid("need at least one node");
    }
    let mut cumulative = Vec::with_capacity(pi.len());
    let mut acc = 0.0;
    for &p in pi {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let labels = (0..n_nodes)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= u);
            // guard against u landing on the final boundary, and skip
            // zero-probability trailing entries
            let mut idx = idx.min(pi.len() - 1);
            while pi[idx] == 0.0 && idx > 0 {
                idx -= 1;
            }
            idx
        })
        .collect();
    LabelVector::new(labels, pi.len())
}

pub(crate) fn validate_probability_vector(pi: &[f64]) -> Result<()> {
    if pi.is_empty() {
        return invalid("probability vector is empty");
    }
    if pi.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return invalid(format!("probability vector {pi:?} has a negative or non-finite entry"));
    }
    let sum: f64 = pi.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return invalid(format!("probability vector sums to {sum}, not 1"));
    }
    Ok(())
}

/// Samples an SBM adjacency matrix for labels `z` and block matrix `b`.
///
/// Each block of node pairs gets its edge count from a binomial draw and
/// the edges are then placed uniformly without replacement inside the
/// block, which is distributed exactly like independent Bernoulli draws per
/// pair but runs in expected O(|E|) time. Every block uses its own derived
/// seed so blocks are generated in parallel without affecting the result.
pub fn generate_adjacency(z: &LabelVector, b: &BlockMatrix, rng: &mut SscRng) -> Result<SparseGraph> {
    if z.k() != b.k() {
        return invalid(format!("labels use K = {} but block matrix has K = {}", z.k(), b.k()));
    }
    let base_seed: u64 = rng.random();
    let members = z.members();
    let k = b.k();
    let blocks: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |c| (a, c))).collect();

    let per_block: Vec<Vec<(usize, usize)>> = blocks
        .par_iter()
        .map(|&(a, c)| {
            let mut block_rng = rng_from_seed(derive_seed(base_seed, &[a as u64, c as u64]));
            sample_block(&members[a], &members[c], a == c, b.get(a, c), &mut block_rng)
        })
        .collect();

    let pairs: Vec<(usize, usize)> = per_block.into_iter().flatten().collect();
    SparseGraph::from_edge_list(&pairs, z.len())
}

fn sample_block(rows: &[usize], cols: &[usize], diagonal: bool, p: f64, rng: &mut SscRng) -> Vec<(usize, usize)> {
    let total: u64 = if diagonal {
        let m = rows.len() as u64;
        m * m.saturating_sub(1) / 2
    } else {
        rows.len() as u64 * cols.len() as u64
    };
    if total == 0 || p <= 0.0 {
        return Vec::new();
    }
    let count = if p >= 1.0 {
        total
    } else {
        Binomial::new(total, p).expect("p checked to lie in (0, 1)").sample(rng)
    };
    let picks = rand::seq::index::sample(rng, total as usize, count as usize);
    let mut out = Vec::with_capacity(count as usize);
    for t in picks.iter() {
        let t = t as u64;
        let (a, c) = if diagonal {
            let (lo, hi) = triangle_index(t);
            (rows[lo as usize], rows[hi as usize])
        } else {
            let w = cols.len() as u64;
            (rows[(t / w) as usize], cols[(t % w) as usize])
        };
        out.push((a, c));
    }
    out
}

/// Maps `t` to the pair `(lo, hi)`, `lo < hi`, in the enumeration
/// (0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...
fn triangle_index(t: u64) -> (u64, u64) {
    let mut hi = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0).floor() as u64;
    while hi * (hi - 1) / 2 > t {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= t {
        hi += 1;
    }
    (t - hi * (hi - 1) / 2, hi)
}

/// Expected adjacency `Z B Zᵀ`, diagonal included.
pub fn population_adjacency(z: &LabelVector, b: &BlockMatrix) -> Result<Array2<f64>> {
    let sample: Vec<usize> = (0..z.len()).collect();
    population_bi_adjacency(z, b, &sample)
}

/// Columns `sample` of the expected adjacency `Z B Zᵀ`.
pub fn population_bi_adjacency(z: &LabelVector, b: &BlockMatrix, sample: &[usize]) -> Result<Array2<f64>> {
    if z.k() != b.k() {
        return invalid("label vector and block matrix disagree on K");
    }
    if z.len() > POPULATION_DENSE_GUARD {
        return Err(SscError::Resource(format!(
            "dense population matrix for N = {} exceeds the N <= {POPULATION_DENSE_GUARD} guard",
            z.len()
        )));
    }
    if let Some(&s) = sample.iter().find(|&&s| s >= z.len()) {
        return invalid(format!("sample id {s} out of range"));
    }
    Ok(Array2::from_shape_fn((z.len(), sample.len()), |(i, j)| {
        b.get(z.get(i), z.get(sample[j]))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_block_matrix_entries() {
        let b = BlockMatrix::planted(0.1, 0.05, 3).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                let want = if a == c { 0.1 } else { 0.005 };
                assert!((b.get(a, c) - want).abs() < 1e-15);
            }
        }
        let flat = BlockMatrix::planted(0.4, 1.0, 3).unwrap();
        assert!((0..9).all(|i| flat.get(i / 3, i % 3) == 0.4));
        let zero = BlockMatrix::planted(0.0, 0.3, 2).unwrap();
        assert!((0..4).all(|i| zero.get(i / 2, i % 2) == 0.0));
        assert!(BlockMatrix::planted(1.2, 0.1, 2).is_err());
        assert!(BlockMatrix::planted(0.5, -0.1, 2).is_err());
    }

    #[test]
    fn block_matrix_validation() {
        assert!(BlockMatrix::new(vec![vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        assert!(BlockMatrix::new(vec![vec![0.1, 2.0], vec![2.0, 0.1]]).is_err());
        assert!(BlockMatrix::new(vec![vec![0.1, 0.2], vec![0.2, 0.1]]).is_ok());
    }

    #[test]
    fn triangle_index_enumerates_pairs() {
        let mut t = 0;
        for hi in 1..60u64 {
            for lo in 0..hi {
                assert_eq!(triangle_index(t), (lo, hi));
                t += 1;
            }
        }
    }

    #[test]
    fn degenerate_pi_gives_single_label() {
        let mut rng = rng_from_seed(1);
        let z = sample_memberships(&[1.0, 0.0, 0.0], 500, &mut rng).unwrap();
        assert!(z.as_slice().iter().all(|&l| l == 0));
        let z = sample_memberships(&[0.0, 0.0, 1.0], 500, &mut rng).unwrap();
        assert!(z.as_slice().iter().all(|&l| l == 2));
    }

    #[test]
    fn invalid_pi_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(sample_memberships(&[0.5, 0.6], 10, &mut rng).is_err());
        assert!(sample_memberships(&[1.5, -0.5], 10, &mut rng).is_err());
        assert!(sample_memberships(&[], 10, &mut rng).is_err());
    }

    #[test]
    fn balanced_frequencies() {
        let mut rng = rng_from_seed(2024);
        let z = sample_memberships(&[1.0 / 3.0; 3], 30_000, &mut rng).unwrap();
        for s in z.sizes() {
            assert!((s as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn imbalanced_frequencies() {
        let d = 0.3;
        let pi = [1.0 / 3.0 - d, 1.0 / 3.0, 1.0 / 3.0 + d];
        let mut rng = rng_from_seed(99);
        let z = sample_memberships(&pi, 30_000, &mut rng).unwrap();
        let freq: Vec<f64> = z.sizes().iter().map(|&s| s as f64 / 30_000.0).collect();
        for (f, want) in freq.iter().zip([0.0333, 0.3333, 0.6333]) {
            assert!((f - want).abs() < 0.01, "{freq:?}");
        }
    }

    #[test]
    fn zero_and_one_probabilities() {
        let mut rng = rng_from_seed(5);
        let z = sample_memberships(&[0.5, 0.5], 40, &mut rng).unwrap();
        let none = BlockMatrix::planted(0.0, 0.0, 2).unwrap();
        assert_eq!(generate_adjacency(&z, &none, &mut rng).unwrap().n_edges(), 0);
        let all = BlockMatrix::planted(1.0, 1.0, 2).unwrap();
        let g = generate_adjacency(&z, &all, &mut rng).unwrap();
        assert_eq!(g.n_edges(), 40 * 39 / 2);
    }

    #[test]
    fn generation_is_deterministic() {
        let b = BlockMatrix::planted(0.2, 0.1, 3).unwrap();
        let make = |seed| {
            let mut rng = rng_from_seed(seed);
            let z = sample_memberships(&[1.0 / 3.0; 3], 300, &mut rng).unwrap();
            generate_adjacency(&z, &b, &mut rng).unwrap()
        };
        assert_eq!(make(11), make(11));
        assert_ne!(make(11), make(12));
    }

    #[test]
    fn mismatched_k_rejected() {
        let z = LabelVector::new(vec![0, 1, 2], 3).unwrap();
        let b = BlockMatrix::planted(0.5, 0.5, 2).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(generate_adjacency(&z, &b, &mut rng).is_err());
    }

    #[test]
    fn population_small_cases() {
        let z = LabelVector::new(vec![0; 4], 1).unwrap();
        let b = BlockMatrix::new(vec![vec![0.3]]).unwrap();
        let p = population_adjacency(&z, &b).unwrap();
        assert!(p.iter().all(|&x| x == 0.3));

        let z = LabelVector::new(vec![0, 0, 1, 1], 2).unwrap();
        let b = BlockMatrix::new(vec![vec![0.7, 0.2], vec![0.2, 0.7]]).unwrap();
        let p = population_adjacency(&z, &b).unwrap();
        let want = [
            [0.7, 0.7, 0.2, 0.2],
            [0.7, 0.7, 0.2, 0.2],
            [0.2, 0.2, 0.7, 0.7],
            [0.2, 0.2, 0.7, 0.7],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p[[i, j]], want[i][j]);
            }
        }
    }

    #[test]
    fn population_guard() {
        let z = LabelVector::new(vec![0; POPULATION_DENSE_GUARD + 1], 1).unwrap();
        let b = BlockMatrix::new(vec![vec![0.3]]).unwrap();
        assert!(matches!(population_adjacency(&z, &b), Err(SscError::Resource(_))));
    }
}
