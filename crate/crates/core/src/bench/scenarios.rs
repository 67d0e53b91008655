//! Seeded replications of the simulation scenarios.
//!
//! Each trial draws memberships and a graph from
//! `derive_seed(master, [scenario, cell, trial])`, then clusters the same
//! graph with every configured method. Trials of a cell run in parallel;
//! rows come back in (cell, trial, method) order whatever the thread count.

use rayon::prelude::*;

use super::config::{imbalanced_pi, s1_sample_size, Method, Scenario, ScenarioConfig};
use super::records::{median, summarize, Record, RowKind, Status, Trend};
use crate::error::{invalid, Result, SscError};
use crate::eval::misclustered_rate;
use crate::pipeline::{full_sc, ssc, FullMethod, KChoice, SscConfig, StageTimings};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampling::{coverage_event, SamplingMethod};
use crate::sbm::{generate_adjacency, sample_memberships, BlockMatrix, LabelVector};

/// One parameter combination of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub nodes: usize,
    pub n: usize,
    pub beta: f64,
    pub zeta: f64,
    pub delta: f64,
    pub pi: Vec<f64>,
}

/// Expands the sweep of `cfg` into cells, in output order.
pub fn cells(cfg: &ScenarioConfig) -> Vec<Cell> {
    let base = Cell {
        index: 0,
        nodes: cfg.nodes,
        n: cfg.n,
        beta: cfg.beta,
        zeta: cfg.zeta,
        delta: 0.0,
        pi: cfg.pi.clone(),
    };
    let mut out: Vec<Cell> = match cfg.scenario {
        Scenario::S1 => cfg
            .nodes_grid
            .iter()
            .map(|&nodes| Cell {
                nodes,
                n: s1_sample_size(nodes),
                ..base.clone()
            })
            .collect(),
        Scenario::Timing => cfg
            .nodes_grid
            .iter()
            .map(|&nodes| Cell { nodes, ..base.clone() })
            .collect(),
        Scenario::S2 => cfg.sample_grid.iter().map(|&n| Cell { n, ..base.clone() }).collect(),
        Scenario::S3 => cfg
            .beta_grid
            .iter()
            .flat_map(|&beta| {
                let base = &base;
                cfg.zeta_grid.iter().map(move |&zeta| Cell {
                    beta,
                    zeta,
                    ..base.clone()
                })
            })
            .collect(),
        Scenario::S4 => cfg
            .delta_grid
            .iter()
            .map(|&delta| Cell {
                delta,
                pi: imbalanced_pi(delta),
                ..base.clone()
            })
            .collect(),
    };
    for (i, c) in out.iter_mut().enumerate() {
        c.index = i;
    }
    out
}

fn method_id(m: Method) -> u64 {
    match m {
        Method::Srs => 1,
        Method::Dcs => 2,
        Method::Full => 3,
    }
}

/// Rate of a constant labeling: what an estimator without signal scores.
fn chance_rate(z: &LabelVector) -> Result<f64> {
    let constant = LabelVector::new(vec![0; z.len()], z.k())?;
    misclustered_rate(&constant, z)
}

fn trial_rows(cfg: &ScenarioConfig, cell: &Cell, trial: usize) -> Result<Vec<Record>> {
    let seed = derive_seed(cfg.seed, &[cfg.scenario.id(), cell.index as u64, trial as u64]);
    let mut rng = rng_from_seed(seed);
    let z = sample_memberships(&cell.pi, cell.nodes, &mut rng)?;
    let b = BlockMatrix::planted(cell.beta, cell.zeta, cfg.k)?;
    let g = generate_adjacency(&z, &b, &mut rng)?;

    let row = |method: Method, n: usize| Record {
        kind: RowKind::Trial,
        scenario: cfg.scenario,
        cell: cell.index,
        nodes: cell.nodes,
        n,
        k: cfg.k,
        beta: cell.beta,
        zeta: cell.zeta,
        delta: cell.delta,
        pi: cell.pi.clone(),
        method,
        trial: Some(trial),
        seed: Some(seed),
        rate: None,
        se: None,
        median: None,
        timings: None,
        coverage: None,
        degenerate: 0,
        status: Status::Ok,
        trend: None,
    };

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let mseed = derive_seed(seed, &[method_id(method)]);
        match method {
            Method::Srs | Method::Dcs => {
                let sampling = if method == Method::Srs {
                    SamplingMethod::Srs
                } else {
                    SamplingMethod::Dcs
                };
                let ssc_cfg = SscConfig {
                    restarts: cfg.restarts,
                    pinv_tol: cfg.pinv_tol,
                    ..SscConfig::new(sampling, cell.n, cfg.k, mseed)
                };
                let mut r = row(method, cell.n);
                match ssc(&g, &ssc_cfg) {
                    Ok(out) => {
                        r.rate = Some(misclustered_rate(&out.labels, &z)?);
                        r.timings = Some(out.timings);
                        r.coverage = Some(coverage_event(out.sample.ids(), &z) as u8 as f64);
                    }
                    Err(SscError::Degenerate(msg)) => {
                        log::debug!("cell {} trial {trial} {method}: {msg}", cell.index);
                        r.rate = Some(chance_rate(&z)?);
                        r.timings = Some(StageTimings::default());
                        r.degenerate = 1;
                    }
                    Err(e) => return Err(e),
                }
                rows.push(r);
            }
            Method::Full => {
                if cell.nodes > cfg.full_max_nodes {
                    if trial == 0 {
                        let mut r = row(method, cell.nodes);
                        r.status = Status::Skipped;
                        rows.push(r);
                    }
                    continue;
                }
                if trial >= cfg.full_trials {
                    continue;
                }
                let out = full_sc(&g, KChoice::Fixed(cfg.k), FullMethod::Dense, cfg.restarts, mseed)?;
                let mut r = row(method, cell.nodes);
                if g.n_edges() == 0 {
                    r.rate = Some(chance_rate(&z)?);
                    r.degenerate = 1;
                } else {
                    r.rate = Some(misclustered_rate(&out.labels, &z)?);
                }
                r.timings = Some(out.timings);
                rows.push(r);
            }
        }
    }
    Ok(rows)
}

fn aggregate(cell_rows: &[Record], method: Method) -> Option<Record> {
    let rows: Vec<&Record> = cell_rows
        .iter()
        .filter(|r| r.method == method && r.status == Status::Ok)
        .collect();
    let first = rows.first()?;
    let rates: Vec<f64> = rows.iter().filter_map(|r| r.rate).collect();
    let (mean, se, med) = summarize(&rates)?;
    let timings: Vec<StageTimings> = rows.iter().filter_map(|r| r.timings).collect();
    let mean_of = |f: fn(&StageTimings) -> f64| timings.iter().map(f).sum::<f64>() / timings.len().max(1) as f64;
    let covered: Vec<f64> = rows.iter().filter_map(|r| r.coverage).collect();
    Some(Record {
        kind: RowKind::Agg,
        trial: None,
        seed: None,
        rate: Some(mean),
        se: Some(se),
        median: Some(med),
        timings: Some(StageTimings {
            sampling: mean_of(|t| t.sampling),
            laplacian: mean_of(|t| t.laplacian),
            eig: mean_of(|t| t.eig),
            kmeans: mean_of(|t| t.kmeans),
        }),
        coverage: (!covered.is_empty()).then(|| covered.iter().sum::<f64>() / covered.len() as f64),
        degenerate: rows.iter().map(|r| r.degenerate).sum(),
        status: Status::Ok,
        trend: None,
        ..(*first).clone()
    })
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SscError::Resource(format!("cannot start worker threads: {e}")))
}

/// Runs every cell and trial of `cfg` and returns TRIAL and AGG rows.
///
/// The configuration is validated first; an invalid one produces no rows.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let pool = thread_pool(cfg.jobs)?;
    let sweep_has_order = matches!(
        cfg.scenario,
        Scenario::S1 | Scenario::S2 | Scenario::S4 | Scenario::Timing
    );
    let mut out = Vec::new();
    let mut previous: Vec<(Method, f64)> = Vec::new();
    for cell in cells(cfg) {
        log::info!(
            "{} cell {}: N = {}, n = {}, beta = {}, zeta = {}, delta = {}",
            cfg.scenario,
            cell.index,
            cell.nodes,
            cell.n,
            cell.beta,
            cell.zeta,
            cell.delta
        );
        let per_trial: Vec<Vec<Record>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| trial_rows(cfg, &cell, t))
                .collect::<Result<_>>()
        })?;
        let rows: Vec<Record> = per_trial.into_iter().flatten().collect();
        let mut aggs = Vec::new();
        for &m in &cfg.methods {
            if let Some(mut a) = aggregate(&rows, m) {
                if sweep_has_order {
                    let mean = a.rate.unwrap_or(0.0);
                    if let Some(&(_, prev)) = previous.iter().find(|(pm, _)| *pm == m) {
                        a.trend = Some(if mean <= prev {
                            Trend::Nonincreasing
                        } else {
                            Trend::Increasing
                        });
                    }
                    previous.retain(|(pm, _)| *pm != m);
                    previous.push((m, mean));
                }
                aggs.push(a);
            }
        }
        out.extend(rows);
        out.extend(aggs);
    }
    Ok(out)
}

fn run_as(cfg: &ScenarioConfig, expected: Scenario) -> Result<Vec<Record>> {
    if cfg.scenario != expected {
        return invalid(format!(
            "configuration is for scenario {}, not {expected}",
            cfg.scenario
        ));
    }
    run_scenario(cfg)
}

/// Growing network size with `n = ⌈2 (ln N)²⌉`, plus full-SC rows.
pub fn run_scenario1(cfg: &ScenarioConfig) -> Result<Vec<Record>> {
    run_as(cfg, Scenario::S1)
}

/// Growing sample size at fixed N.
pub fn run_scenario2(cfg: &ScenarioConfig) -> Result<Vec<Record>> {
    run_as(cfg, Scenario::S2)
}

/// Signal-strength grid over β and ζ.
pub fn run_scenario3(cfg: &ScenarioConfig) -> Result<Vec<Record>> {
    run_as(cfg, Scenario::S3)
}

/// Community-size imbalance sweep over Δ.
pub fn run_scenario4(cfg: &ScenarioConfig) -> Result<Vec<Record>> {
    run_as(cfg, Scenario::S4)
}

/// Header comment describing the run, for [`super::records::write_records`].
pub fn describe(cfg: &ScenarioConfig) -> String {
    format!(
        "scenario={} seed={} trials={} k={} restarts={} methods={}",
        cfg.scenario,
        cfg.seed,
        cfg.trials,
        cfg.k,
        cfg.restarts,
        cfg.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";")
    )
}

/// β × ζ grid of `mean(se)` per method, one line per (β, method).
pub fn rate_table(records: &[Record]) -> String {
    let aggs: Vec<&Record> = records.iter().filter(|r| r.kind == RowKind::Agg).collect();
    let mut betas: Vec<f64> = aggs.iter().map(|r| r.beta).collect();
    let mut zetas: Vec<f64> = aggs.iter().map(|r| r.zeta).collect();
    let mut methods: Vec<Method> = aggs.iter().map(|r| r.method).collect();
    for v in [&mut betas, &mut zetas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    methods.sort();
    methods.dedup();

    let fmt3 = |x: f64| {
        let s = format!("{x:.3}");
        s.strip_prefix('0').map(str::to_string).unwrap_or(s)
    };
    let mut out = format!("{:<8}{:<8}", "beta", "method");
    for z in &zetas {
        out.push_str(&format!("{:<14}", format!("zeta={z}")));
    }
    out.push('\n');
    for &b in &betas {
        for (mi, &m) in methods.iter().enumerate() {
            let label = if mi == 0 { b.to_string() } else { String::new() };
            out.push_str(&format!(
                "{:<8}{:<8}",
                label,
                format!("{}-SC", m.to_string().to_uppercase())
            ));
            for &z in &zetas {
                let cell = aggs
                    .iter()
                    .find(|r| r.beta == b && r.zeta == z && r.method == m)
                    .and_then(|r| Some(format!("{}({})", fmt3(r.rate?), fmt3(r.se?))))
                    .unwrap_or_else(|| "-".into());
                out.push_str(&format!("{cell:<14}"));
            }
            out.push('\n');
        }
    }
    out
}

/// Median rate per (cell, method) over TRIAL rows, in cell order.
pub fn median_rates(records: &[Record], method: Method) -> Vec<(usize, f64)> {
    let mut cells: Vec<usize> = records.iter().map(|r| r.cell).collect();
    cells.sort_unstable();
    cells.dedup();
    cells
        .into_iter()
        .filter_map(|c| {
            let rates: Vec<f64> = records
                .iter()
                .filter(|r| r.kind == RowKind::Trial && r.cell == c && r.method == method)
                .filter_map(|r| r.rate)
                .collect();
            (!rates.is_empty()).then(|| (c, median(&rates)))
        })
        .collect()
}
