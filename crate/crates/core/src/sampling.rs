//! Node subsampling: simple random (SRS) and degree-corrected (DCS).

use std::fmt;

use rand::seq::index;

use crate::error::{invalid, Result};
use crate::graph::SparseGraph;
use crate::kmeans::kmeans_1d;
use crate::rng::SscRng;
use crate::sbm::LabelVector;

/// Slack applied before taking a ceiling so that values a few ulps above an
/// integer (from `ln`) do not round up.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMethod {
    Srs,
    Dcs,
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMethod::Srs => "srs",
            SamplingMethod::Dcs => "dcs",
        })
    }
}

/// An ordered set of distinct sampled node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    ids: Vec<usize>,
    method: SamplingMethod,
}

impl SampleSet {
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

fn check_sample_size(n_nodes: usize, n: usize) -> Result<()> {
    if n == 0 || n > n_nodes {
        return invalid(format!("sample size {n} must lie in [1, {n_nodes}]"));
    }
    Ok(())
}

/// Uniform sample of `n` distinct nodes out of `n_nodes`, without replacement.
pub fn srs(n_nodes: usize, n: usize, rng: &mut SscRng) -> Result<SampleSet> {
    check_sample_size(n_nodes, n)?;
    Ok(SampleSet {
        ids: index::sample(rng, n_nodes, n).into_vec(),
        method: SamplingMethod::Srs,
    })
}

/// `f_i = d_i / N`.
pub fn regularized_degrees(g: &SparseGraph) -> Vec<f64> {
    let n = g.n_nodes() as f64;
    (0..g.n_nodes()).map(|i| g.degree(i) as f64 / n).collect()
}

/// Initial degree-based partition used by DCS.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialPartition {
    /// Node ids of each cluster, in ascending-mean-degree order.
    pub clusters: Vec<Vec<usize>>,
    pub regularized_degrees: Vec<f64>,
    /// Set when the 1-D k-means could not fill all K clusters.
    pub degenerate: bool,
}

pub fn initial_partition(g: &SparseGraph, k: usize) -> Result<InitialPartition> {
    let f = regularized_degrees(g);
    let p = kmeans_1d(&f, k)?;
    let mut clusters = vec![Vec::new(); p.n_clusters];
    for (i, &l) in p.labels.iter().enumerate() {
        clusters[l].push(i);
    }
    Ok(InitialPartition {
        clusters,
        regularized_degrees: f,
        degenerate: p.degenerate,
    })
}

/// Per-cluster quotas proportional to cluster size that sum to exactly `n`.
///
/// Each cluster gets `floor(n * size / total)`; the leftover draws go one
/// each to the largest fractional parts, ties going to the larger cluster
/// and then to the lower index.
pub fn dcs_quotas(sizes: &[usize], n: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let mut quotas: Vec<usize> = sizes.iter().map(|&s| n * s / total).collect();
    let assigned: usize = quotas.iter().sum();
    // remainders as exact integers: (n * s) mod total
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = n * sizes[a] % total;
        let rb = n * sizes[b] % total;
        rb.cmp(&ra).then(sizes[b].cmp(&sizes[a])).then(a.cmp(&b))
    });
    let mut left = n - assigned;
    for &c in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if quotas[c] < sizes[c] {
            quotas[c] += 1;
            left -= 1;
        }
    }
    quotas
}

/// Degree-corrected subsampling.
///
/// 1. regularized degrees `f_i = d_i / N`;
/// 2. 1-D k-means of `f` into `k` clusters (quantile initialization, so
///    deterministic and `rng` is not consumed);
/// 3. each cluster sorted by degree, descending, ties by ascending id;
/// 4. the top `quota_c` nodes of cluster `c`, quotas from [`dcs_quotas`].
///
/// Empty k-means clusters are dropped before computing quotas.
pub fn dcs(g: &SparseGraph, n: usize, k: usize, _rng: &mut SscRng) -> Result<SampleSet> {
    let n_nodes = g.n_nodes();
    check_sample_size(n_nodes, n)?;
    if k == 0 || k > n_nodes {
        return invalid(format!("K = {k} must lie in [1, {n_nodes}]"));
    }
    let part = initial_partition(g, k)?;
    let sizes: Vec<usize> = part.clusters.iter().map(Vec::len).collect();
    let quotas = dcs_quotas(&sizes, n);

    let mut ids = Vec::with_capacity(n);
    for (cluster, &q) in part.clusters.iter().zip(&quotas) {
        let mut sorted = cluster.clone();
        sorted.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
        ids.extend_from_slice(&sorted[..q]);
    }
    Ok(SampleSet {
        ids,
        method: SamplingMethod::Dcs,
    })
}

/// Draws a sample with the given method.
pub fn draw_sample(method: SamplingMethod, g: &SparseGraph, n: usize, k: usize, rng: &mut SscRng) -> Result<SampleSet> {
    match method {
        SamplingMethod::Srs => srs(g.n_nodes(), n, rng),
        SamplingMethod::Dcs => dcs(g, n, k, rng),
    }
}

/// Smallest `n` with `n >= log(K/ε) / log(1/(1−α))`, at least 1.
///
/// `alpha` is the smallest community's share of the nodes. Below this size a
/// with-replacement uniform sample can miss a community with probability
/// above `eps`.
pub fn srs_min_size(k: usize, alpha: f64, eps: f64) -> Result<usize> {
    if k == 0 {
        return invalid("K must be at least 1");
    }
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps = {eps} must lie in (0, 1)"));
    }
    if !(alpha > 0.0) || alpha > 1.0 / k as f64 + 1e-12 {
        return invalid(format!("alpha = {alpha} must lie in (0, 1/K]"));
    }
    if k == 1 || alpha >= 1.0 {
        return Ok(1);
    }
    let bound = (k as f64 / eps).ln() / (1.0 / (1.0 - alpha)).ln();
    Ok(((bound - CEIL_SLACK).ceil() as usize).max(1))
}

/// `⌈64 log(2N/ε)⌉`, the DCS coverage sample size.
pub fn dcs_min_size(n_nodes: usize, eps: f64) -> Result<usize> {
    if n_nodes == 0 {
        return invalid("N must be at least 1");
    }
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps = {eps} must lie in (0, 1)"));
    }
    let bound = 64.0 * (2.0 * n_nodes as f64 / eps).ln();
    Ok((bound - CEIL_SLACK).ceil() as usize)
}

/// True iff every community of `z` has at least one node among `ids`.
///
/// `ids` may contain repeats, as produced by with-replacement draws.
pub fn coverage_event(ids: &[usize], z: &LabelVector) -> bool {
    let mut hit = vec![false; z.k()];
    let mut remaining = z.k();
    for &i in ids {
        let l = z.get(i);
        if !hit[l] {
            hit[l] = true;
            remaining -= 1;
            if remaining == 0 {
                return true;
            }
        }
    }
    remaining == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn srs_full_and_trivial() {
        let mut rng = rng_from_seed(3);
        let mut s = srs(20, 20, &mut rng).unwrap().ids().to_vec();
        s.sort();
        assert_eq!(s, (0..20).collect::<Vec<_>>());
        assert_eq!(srs(1, 1, &mut rng).unwrap().ids(), &[0]);
        assert!(srs(5, 6, &mut rng).is_err());
        assert!(srs(5, 0, &mut rng).is_err());
    }

    #[test]
    fn srs_inclusion_is_uniform() {
        let mut rng = rng_from_seed(17);
        let mut hits = [0usize; 100];
        let trials = 50_000;
        for _ in 0..trials {
            for &i in srs(100, 10, &mut rng).unwrap().ids() {
                hits[i] += 1;
            }
        }
        for h in hits {
            assert!((h as f64 / trials as f64 - 0.1).abs() < 0.01);
        }
    }

    #[test]
    fn regularized_degree_cases() {
        let mut pairs = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                pairs.push((a, b));
            }
        }
        let k5 = SparseGraph::from_edge_list(&pairs, 5).unwrap();
        assert!(regularized_degrees(&k5).iter().all(|&f| (f - 0.8).abs() < 1e-15));
        assert!(regularized_degrees(&SparseGraph::empty(4)).iter().all(|&f| f == 0.0));
        let star = SparseGraph::from_edge_list(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5).unwrap();
        assert_eq!(regularized_degrees(&star), vec![0.8, 0.2, 0.2, 0.2, 0.2]);
    }

    #[test]
    fn quota_arithmetic() {
        assert_eq!(dcs_quotas(&[50, 30, 20], 10), vec![5, 3, 2]);
        assert_eq!(dcs_quotas(&[1, 1, 1], 2), vec![1, 1, 0]);
        // fractional parts 0.5, 0.5: larger cluster wins the tie
        assert_eq!(dcs_quotas(&[3, 5], 4), vec![1, 3]);
        assert_eq!(dcs_quotas(&[3, 5], 8), vec![3, 5]);
    }

    /// Community 1 is an 11-clique (degree 10), community 2 an 11-cycle
    /// (degree 2); quotas are (2, 2) and ties fall to the lowest ids.
    #[test]
    fn dcs_takes_top_degrees_per_cluster() {
        let mut pairs = Vec::new();
        for a in 0..11 {
            for b in a + 1..11 {
                pairs.push((a, b));
            }
        }
        for i in 0..11 {
            pairs.push((11 + i, 11 + (i + 1) % 11));
        }
        let g = SparseGraph::from_edge_list(&pairs, 22).unwrap();
        let part = initial_partition(&g, 2).unwrap();
        assert_eq!(part.clusters[0], (11..22).collect::<Vec<_>>());
        assert_eq!(part.clusters[1], (0..11).collect::<Vec<_>>());
        let mut rng = rng_from_seed(0);
        let s = dcs(&g, 4, 2, &mut rng).unwrap();
        assert_eq!(s.ids(), &[11, 12, 0, 1]);
        assert_eq!(s.method(), SamplingMethod::Dcs);
    }

    #[test]
    fn dcs_prefers_high_degree_within_cluster() {
        // path 0-1-2-3-4 plus a hub 5 joined to 1 and 3
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 4), (5, 1), (5, 3)], 6).unwrap();
        let mut rng = rng_from_seed(0);
        let s = dcs(&g, 2, 1, &mut rng).unwrap();
        assert_eq!(s.ids(), &[1, 3]);
    }

    #[test]
    fn dcs_full_sample_is_everything() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)], 6).unwrap();
        let mut rng = rng_from_seed(0);
        let mut ids = dcs(&g, 6, 3, &mut rng).unwrap().ids().to_vec();
        ids.sort();
        assert_eq!(ids, (0..6).collect::<Vec<_>>());
        assert!(dcs(&g, 7, 2, &mut rng).is_err());
        assert!(dcs(&g, 3, 7, &mut rng).is_err());
    }

    #[test]
    fn srs_bound_values() {
        assert_eq!(srs_min_size(3, 1.0 / 3.0, 0.05).unwrap(), 11);
        assert_eq!(srs_min_size(1, 1.0, 0.05).unwrap(), 1);
        assert_eq!(srs_min_size(1, 1.0, 0.999_999).unwrap(), 1);
        assert!(srs_min_size(3, 0.0, 0.05).is_err());
        assert!(srs_min_size(3, 0.5, 0.05).is_err());
        assert!(srs_min_size(3, 0.2, 1.0).is_err());
    }

    #[test]
    fn dcs_bound_values() {
        assert_eq!(dcs_min_size(10_000, 0.05).unwrap(), 826);
        assert_eq!(dcs_min_size(1, 2.0 / std::f64::consts::E).unwrap(), 64);
        for n in [1usize, 10, 1000, 123_456] {
            assert!(dcs_min_size(2 * n, 0.05).unwrap() > dcs_min_size(n, 0.05).unwrap());
        }
    }

    #[test]
    fn coverage_cases() {
        let z = LabelVector::new(vec![0, 0, 1, 1, 2], 3).unwrap();
        assert!(coverage_event(&[0, 1, 2, 3, 4], &z));
        assert!(!coverage_event(&[0], &LabelVector::new(vec![0, 1], 2).unwrap()));
        assert!(coverage_event(&[4, 4, 0, 2], &z));
        assert!(!coverage_event(&[0, 1, 2, 3], &z));
    }
}
