//! Clustering a network read from an edge-list file.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::eval::misclustered_rate;
use crate::io::{read_edge_list, write_id_map, write_labels, write_sample, EdgeListGraph};
use crate::kmeans::DEFAULT_RESTARTS;
use crate::pipeline::{full_sc, ssc, FullMethod, KChoice, SscConfig, StageTimings};
use crate::sampling::SamplingMethod;
use crate::sbm::LabelVector;
use crate::spectral::{DEFAULT_PINV_TOL, FULL_DENSE_GUARD};

/// When to also run full spectral clustering for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Baseline {
    /// Dense solver when N fits the dense guard, otherwise none.
    #[default]
    IfFeasible,
    /// Lanczos solver at any N.
    Iterative,
    Never,
}

#[derive(Debug, Clone)]
pub struct RealConfig {
    pub input: PathBuf,
    /// `None` clusters the whole network without sampling.
    pub method: Option<SamplingMethod>,
    pub n: usize,
    pub k: KChoice,
    pub seed: u64,
    pub restarts: usize,
    pub baseline: Baseline,
    pub labels_out: Option<PathBuf>,
    pub sample_out: Option<PathBuf>,
    /// `external_id internal_id` map of the relabeling.
    pub id_map_out: Option<PathBuf>,
}

impl RealConfig {
    pub fn new(input: impl AsRef<Path>, method: Option<SamplingMethod>, n: usize, k: KChoice, seed: u64) -> Self {
        Self {
            input: input.as_ref().to_path_buf(),
            method,
            n,
            k,
            seed,
            restarts: DEFAULT_RESTARTS,
            baseline: Baseline::IfFeasible,
            labels_out: None,
            sample_out: None,
            id_map_out: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RealSummary {
    pub nodes: usize,
    pub edges: usize,
    pub k: usize,
    pub labels: LabelVector,
    pub timings: StageTimings,
    /// Nodes with no edge into the sample.
    pub unreached: usize,
    /// Disagreement with full spectral clustering, when it was run.
    pub full_rate: Option<f64>,
    pub full_timings: Option<StageTimings>,
}

impl std::fmt::Display for RealSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "nodes           {}", self.nodes)?;
        writeln!(f, "edges           {}", self.edges)?;
        writeln!(f, "clusters        {}", self.k)?;
        writeln!(f, "cluster sizes   {:?}", self.labels.sizes())?;
        writeln!(f, "unreached nodes {}", self.unreached)?;
        writeln!(f, "time (s)        {:.4}", self.timings.total())?;
        if let (Some(rate), Some(t)) = (self.full_rate, self.full_timings) {
            writeln!(f, "vs full SC      {rate:.4}")?;
            writeln!(f, "full SC time    {:.4}", t.total())?;
        }
        Ok(())
    }
}

/// Reads the edge list, clusters it and writes the requested files.
pub fn run_real(cfg: &RealConfig) -> Result<RealSummary> {
    let EdgeListGraph {
        graph,
        node_ids,
        dense_ids,
    } = read_edge_list(&cfg.input)?;
    let ids = (!dense_ids).then_some(node_ids.as_slice());
    if let Some(path) = &cfg.id_map_out {
        write_id_map(&node_ids, path)?;
    }
    if graph.dropped_self_loops() > 0 {
        log::info!("dropped {} self-loops", graph.dropped_self_loops());
    }
    let full_method = match cfg.baseline {
        Baseline::Iterative => Some(FullMethod::Lanczos),
        Baseline::IfFeasible if graph.n_nodes() <= FULL_DENSE_GUARD => Some(FullMethod::Dense),
        _ => None,
    };

    let summary = match cfg.method {
        Some(method) => {
            let ssc_cfg = SscConfig {
                k: cfg.k,
                restarts: cfg.restarts,
                pinv_tol: DEFAULT_PINV_TOL,
                ..SscConfig::new(method, cfg.n, 0, cfg.seed)
            };
            let out = ssc(&graph, &ssc_cfg)?;
            if out.embedding.zero_degree_rows > 0 {
                log::warn!(
                    "{} nodes have no edge into the sample; their labels are arbitrary",
                    out.embedding.zero_degree_rows
                );
            }
            if let Some(path) = &cfg.sample_out {
                write_sample(out.sample.ids(), ids, path)?;
            }
            let (full_rate, full_timings) = match full_method {
                Some(fm) => {
                    let full = full_sc(&graph, KChoice::Fixed(out.k), fm, cfg.restarts, cfg.seed)?;
                    (Some(misclustered_rate(&out.labels, &full.labels)?), Some(full.timings))
                }
                None => (None, None),
            };
            RealSummary {
                nodes: graph.n_nodes(),
                edges: graph.n_edges(),
                k: out.k,
                labels: out.labels,
                timings: out.timings,
                unreached: out.embedding.zero_degree_rows,
                full_rate,
                full_timings,
            }
        }
        None => {
            let fm = full_method.unwrap_or(FullMethod::Lanczos);
            let full = full_sc(&graph, cfg.k, fm, cfg.restarts, cfg.seed)?;
            RealSummary {
                nodes: graph.n_nodes(),
                edges: graph.n_edges(),
                k: full.k,
                labels: full.labels,
                timings: full.timings,
                unreached: full.embedding.zero_degree_rows,
                full_rate: None,
                full_timings: None,
            }
        }
    };
    if let Some(path) = &cfg.labels_out {
        write_labels(&summary.labels, ids, path)?;
    }
    Ok(summary)
}
