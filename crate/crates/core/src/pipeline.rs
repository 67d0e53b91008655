//! End-to-end subsampling spectral clustering and the full-network
//! baseline, with per-stage wall-clock timings.

use std::time::Instant;

use crate::error::{invalid, Result};
use crate::graph::SparseGraph;
use crate::kmeans::{kmeans, DEFAULT_RESTARTS};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampling::{draw_sample, SampleSet, SamplingMethod};
use crate::sbm::LabelVector;
use crate::spectral::{
    default_k_max, embed_with_eigen, full_embed, full_laplacian, gram_eigen, select_k, Embedding, FullSolver,
    SubsampledLaplacian, DEFAULT_PINV_TOL,
};

const SAMPLE_STREAM: u64 = 1;
const KMEANS_STREAM: u64 = 2;
const PILOT_STREAM: u64 = 3;
const LANCZOS_STREAM: u64 = 4;

/// Number of clusters: fixed, or chosen by the eigengap heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    /// Eigengap search over `1..=k_max`; `None` uses `min(len − 1, 50)`.
    Auto {
        k_max: Option<usize>,
    },
}

impl KChoice {
    pub const AUTO: KChoice = KChoice::Auto { k_max: None };
}

/// Wall-clock seconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub sampling: f64,
    pub laplacian: f64,
    pub eig: f64,
    pub kmeans: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.sampling + self.laplacian + self.eig + self.kmeans
    }
}

#[derive(Debug, Clone)]
pub struct SscConfig {
    pub method: SamplingMethod,
    /// Sample size n.
    pub n: usize,
    pub k: KChoice,
    pub restarts: usize,
    /// Relative pseudo-inverse threshold for the Gram eigenvalues.
    pub pinv_tol: f64,
    pub seed: u64,
}

impl SscConfig {
    pub fn new(method: SamplingMethod, n: usize, k: usize, seed: u64) -> Self {
        Self {
            method,
            n,
            k: KChoice::Fixed(k),
            restarts: DEFAULT_RESTARTS,
            pinv_tol: DEFAULT_PINV_TOL,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SscOutput {
    pub labels: LabelVector,
    pub sample: SampleSet,
    pub embedding: Embedding,
    /// Number of clusters used (the eigengap choice under [`KChoice::Auto`]).
    pub k: usize,
    pub timings: StageTimings,
}

/// Subsampling spectral clustering: sample `n` nodes, embed every node
/// through the subsampled Laplacian, and run k-means on the embedding rows.
///
/// With [`KChoice::Auto`] and degree-corrected sampling, K is first chosen
/// from an SRS pilot sample of the same size, because the degree partition
/// itself needs K.
///
/// Fails with [`crate::SscError::Degenerate`] when no node connects to the
/// sample.
pub fn ssc(g: &SparseGraph, cfg: &SscConfig) -> Result<SscOutput> {
    let t = Instant::now();
    let mut rng = rng_from_seed(derive_seed(cfg.seed, &[SAMPLE_STREAM]));
    let sampling_k = match (cfg.k, cfg.method) {
        (KChoice::Fixed(k), _) => k,
        (KChoice::Auto { .. }, SamplingMethod::Srs) => 1,
        (KChoice::Auto { k_max }, SamplingMethod::Dcs) => {
            let pilot = SscConfig {
                method: SamplingMethod::Srs,
                k: KChoice::Auto { k_max },
                seed: derive_seed(cfg.seed, &[PILOT_STREAM]),
                ..cfg.clone()
            };
            let chosen = ssc(g, &pilot)?.k;
            log::info!("degree-corrected sampling uses K = {chosen} from an SRS pilot");
            chosen
        }
    };
    let sample = draw_sample(cfg.method, g, cfg.n, sampling_k, &mut rng)?;
    let sampling = t.elapsed().as_secs_f64();

    let mut out = ssc_on_sample(g, sample, cfg.k, cfg.restarts, cfg.pinv_tol, cfg.seed)?;
    out.timings.sampling = sampling;
    Ok(out)
}

/// The SSC steps after sampling, for a caller-chosen sample.
pub fn ssc_on_sample(
    g: &SparseGraph,
    sample: SampleSet,
    k: KChoice,
    restarts: usize,
    pinv_tol: f64,
    seed: u64,
) -> Result<SscOutput> {
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let bi = g.bi_adjacency(sample.ids())?;
    let ls = SubsampledLaplacian::from_bi_adjacency(&bi)?;
    timings.laplacian = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let n = ls.n_cols();
    let (eig, k) = match k {
        KChoice::Fixed(k) => {
            if k == 0 || k > n {
                return invalid(format!("K = {k} must lie in [1, n = {n}]"));
            }
            (gram_eigen(&ls, k)?, k)
        }
        KChoice::Auto { k_max } => {
            if n < 2 {
                return invalid("automatic K needs a sample of at least two nodes");
            }
            let k_max = k_max.unwrap_or_else(|| default_k_max(n));
            let eig = gram_eigen(&ls, k_max.min(n))?;
            // gaps between singular values of L^s
            let sv: Vec<f64> = eig.values.iter().map(|v| v.sqrt()).collect();
            let k = select_k(&sv, k_max)?;
            (eig, k)
        }
    };
    let embedding = embed_with_eigen(&ls, &eig, k, pinv_tol)?;
    timings.eig = t.elapsed().as_secs_f64();
    if embedding.zero_degree_rows > 0 {
        log::info!(
            "{} nodes have no edge into the sample and embed at the origin",
            embedding.zero_degree_rows
        );
    }

    let t = Instant::now();
    let km = kmeans(
        embedding.coords.view(),
        k,
        restarts,
        derive_seed(seed, &[KMEANS_STREAM]),
    )?;
    timings.kmeans = t.elapsed().as_secs_f64();

    Ok(SscOutput {
        labels: LabelVector::new(km.labels, k)?,
        sample,
        embedding,
        k,
        timings,
    })
}

#[derive(Debug, Clone)]
pub struct FullScOutput {
    pub labels: LabelVector,
    pub embedding: Embedding,
    pub k: usize,
    /// `sampling` is always zero.
    pub timings: StageTimings,
}

/// Eigensolver choice for [`full_sc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullMethod {
    #[default]
    Dense,
    Lanczos,
}

/// Spectral clustering on the whole network: top-K eigenvectors of
/// `D^{-1/2} A D^{-1/2}` followed by k-means.
pub fn full_sc(g: &SparseGraph, k: KChoice, method: FullMethod, restarts: usize, seed: u64) -> Result<FullScOutput> {
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let l = full_laplacian(g);
    timings.laplacian = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let solver = match method {
        FullMethod::Dense => FullSolver::Dense,
        FullMethod::Lanczos => FullSolver::Lanczos {
            seed: derive_seed(seed, &[LANCZOS_STREAM]),
        },
    };
    let (embedding, k) = match k {
        KChoice::Fixed(k) => (full_embed(&l, k, solver)?, k),
        KChoice::Auto { k_max } => {
            let n = g.n_nodes();
            let k_max = k_max.unwrap_or_else(|| default_k_max(n));
            if k_max + 1 > n {
                return invalid("automatic K needs k_max < N");
            }
            let wide = full_embed(&l, k_max + 1, solver)?;
            let k = select_k(&wide.spectrum, k_max)?;
            let mut e = wide;
            e.coords = e.coords.slice(ndarray::s![.., ..k]).to_owned();
            e.values.truncate(k);
            e.rank = k;
            (e, k)
        }
    };
    timings.eig = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let km = kmeans(
        embedding.coords.view(),
        k,
        restarts,
        derive_seed(seed, &[KMEANS_STREAM]),
    )?;
    timings.kmeans = t.elapsed().as_secs_f64();
    Ok(FullScOutput {
        labels: LabelVector::new(km.labels, k)?,
        embedding,
        k,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::misclustered_rate;
    use crate::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

    fn planted(n: usize, k: usize, beta: f64, seed: u64) -> (SparseGraph, LabelVector) {
        let mut rng = rng_from_seed(seed);
        let z = sample_memberships(&vec![1.0 / k as f64; k], n, &mut rng).unwrap();
        let b = BlockMatrix::planted(beta, 0.05, k).unwrap();
        (generate_adjacency(&z, &b, &mut rng).unwrap(), z)
    }

    #[test]
    fn recovers_strong_communities() {
        let (g, z) = planted(600, 3, 0.3, 5);
        for method in [SamplingMethod::Srs, SamplingMethod::Dcs] {
            let out = ssc(&g, &SscConfig::new(method, 60, 3, 9)).unwrap();
            assert_eq!(out.sample.len(), 60);
            assert!(misclustered_rate(&out.labels, &z).unwrap() <= 0.01, "{method}");
            assert!(out.timings.total() >= 0.0);
        }
    }

    #[test]
    fn auto_k_finds_planted_count() {
        let (g, _) = planted(600, 3, 0.4, 6);
        for method in [SamplingMethod::Srs, SamplingMethod::Dcs] {
            let mut cfg = SscConfig::new(method, 100, 0, 2);
            cfg.k = KChoice::AUTO;
            assert_eq!(ssc(&g, &cfg).unwrap().k, 3);
        }
        assert_eq!(full_sc(&g, KChoice::AUTO, FullMethod::Dense, 5, 1).unwrap().k, 3);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (g, _) = planted(300, 2, 0.2, 1);
        let cfg = SscConfig::new(SamplingMethod::Srs, 40, 2, 77);
        let a = ssc(&g, &cfg).unwrap();
        let b = ssc(&g, &cfg).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.sample, b.sample);
        assert_eq!(a.embedding.coords, b.embedding.coords);
    }

    #[test]
    fn empty_graph_is_degenerate() {
        let g = SparseGraph::empty(20);
        let err = ssc(&g, &SscConfig::new(SamplingMethod::Srs, 5, 2, 0)).unwrap_err();
        assert!(matches!(err, crate::SscError::Degenerate(_)));
    }

    #[test]
    fn full_methods_agree() {
        let (g, z) = planted(300, 3, 0.35, 3);
        let dense = full_sc(&g, KChoice::Fixed(3), FullMethod::Dense, 5, 1).unwrap();
        let lanczos = full_sc(&g, KChoice::Fixed(3), FullMethod::Lanczos, 5, 1).unwrap();
        assert_eq!(misclustered_rate(&dense.labels, &z).unwrap(), 0.0);
        assert_eq!(misclustered_rate(&dense.labels, &lanczos.labels).unwrap(), 0.0);
    }
}
