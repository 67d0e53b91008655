//! Scenario configuration: defaults per scenario, `key = value` files and
//! command-line overrides, validated before any trial runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{invalid, Result, SscError};
use crate::sbm::validate_probability_vector;

/// Clustering route compared in a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Srs,
    Dcs,
    Full,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Srs => "srs",
            Method::Dcs => "dcs",
            Method::Full => "full",
        })
    }
}

impl FromStr for Method {
    type Err = SscError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "srs" => Ok(Method::Srs),
            "dcs" => Ok(Method::Dcs),
            "full" => Ok(Method::Full),
            other => invalid(format!("unknown method {other:?}; expected srs, dcs or full")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Growing N with `n = ⌈2 (ln N)²⌉`.
    S1,
    /// Growing sample size at fixed N.
    S2,
    /// Grid over connection intensity β and out-in ratio ζ.
    S3,
    /// Community-size imbalance `π = (1/3 − Δ, 1/3, 1/3 + Δ)`.
    S4,
    /// Growing N at fixed n, for the complexity check.
    Timing,
}

impl Scenario {
    pub fn id(self) -> u64 {
        match self {
            Scenario::S1 => 1,
            Scenario::S2 => 2,
            Scenario::S3 => 3,
            Scenario::S4 => 4,
            Scenario::Timing => 5,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
            Scenario::S4 => "s4",
            Scenario::Timing => "timing",
        })
    }
}

impl FromStr for Scenario {
    type Err = SscError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "s1" => Ok(Scenario::S1),
            "s2" => Ok(Scenario::S2),
            "s3" => Ok(Scenario::S3),
            "s4" => Ok(Scenario::S4),
            "timing" => Ok(Scenario::Timing),
            other => invalid(format!("unknown scenario {other:?}")),
        }
    }
}

/// Every parameter of a benchmark run.
///
/// Which grid is swept depends on the scenario: `nodes_grid` for S1 and
/// timing, `sample_grid` for S2, `beta_grid` × `zeta_grid` for S3 and
/// `delta_grid` for S4. The other fields are held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: usize,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub k: usize,
    pub nodes: usize,
    pub n: usize,
    pub beta: f64,
    pub zeta: f64,
    pub pi: Vec<f64>,
    pub nodes_grid: Vec<usize>,
    pub sample_grid: Vec<usize>,
    pub beta_grid: Vec<f64>,
    pub zeta_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub restarts: usize,
    pub pinv_tol: f64,
    /// Full spectral clustering runs on the first `full_trials` trials of a
    /// cell only.
    pub full_trials: usize,
    /// Cells with more nodes than this get a `skipped` full-SC row.
    pub full_max_nodes: usize,
}

fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

impl ScenarioConfig {
    /// Desk-scale defaults for each scenario.
    pub fn defaults(scenario: Scenario) -> Self {
        let base = ScenarioConfig {
            scenario,
            seed: 2024,
            trials: 20,
            jobs: 0,
            out: None,
            methods: vec![Method::Srs, Method::Dcs],
            k: 3,
            nodes: 12_000,
            n: 100,
            beta: 0.1,
            zeta: 0.05,
            pi: uniform(3),
            nodes_grid: Vec::new(),
            sample_grid: Vec::new(),
            beta_grid: Vec::new(),
            zeta_grid: Vec::new(),
            delta_grid: Vec::new(),
            restarts: crate::kmeans::DEFAULT_RESTARTS,
            pinv_tol: crate::spectral::DEFAULT_PINV_TOL,
            full_trials: 3,
            full_max_nodes: crate::spectral::FULL_DENSE_GUARD,
        };
        match scenario {
            Scenario::S1 => ScenarioConfig {
                methods: vec![Method::Srs, Method::Dcs, Method::Full],
                nodes_grid: vec![1_000, 2_000, 4_000, 8_000],
                ..base
            },
            Scenario::S2 => ScenarioConfig {
                beta: 0.03,
                sample_grid: vec![100, 300, 500, 700, 900, 1_100],
                ..base
            },
            Scenario::S3 => ScenarioConfig {
                nodes: 2_000,
                beta_grid: vec![0.05, 0.35, 0.65, 0.95],
                zeta_grid: vec![0.05, 0.35, 0.65, 0.95],
                ..base
            },
            Scenario::S4 => ScenarioConfig {
                delta_grid: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
                ..base
            },
            Scenario::Timing => ScenarioConfig {
                beta: 0.02,
                trials: 5,
                jobs: 1,
                methods: vec![Method::Srs, Method::Full],
                nodes_grid: vec![2_000, 4_000, 8_000],
                full_trials: 1,
                ..base
            },
        }
    }

    /// Applies `key = value` settings; unknown keys are errors.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        for (key, value) in settings {
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Sets one parameter from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = parse(key, v)?,
            "trials" => self.trials = parse(key, v)?,
            "jobs" => self.jobs = parse(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "methods" | "method" => self.methods = parse_list(key, v)?,
            "k" => {
                self.k = parse(key, v)?;
                if self.pi.len() != self.k && self.k > 0 {
                    self.pi = uniform(self.k);
                }
            }
            "nodes" => self.nodes = parse(key, v)?,
            "n" => self.n = parse(key, v)?,
            "beta" => self.beta = parse(key, v)?,
            "zeta" => self.zeta = parse(key, v)?,
            "pi" => {
                self.pi = parse_list(key, v)?;
                self.k = self.pi.len();
            }
            "nodes_grid" => self.nodes_grid = parse_list(key, v)?,
            "sample_grid" => self.sample_grid = parse_list(key, v)?,
            "beta_grid" => self.beta_grid = parse_list(key, v)?,
            "zeta_grid" => self.zeta_grid = parse_list(key, v)?,
            "delta_grid" => self.delta_grid = parse_list(key, v)?,
            "restarts" => self.restarts = parse(key, v)?,
            "pinv_tol" => self.pinv_tol = parse(key, v)?,
            "full_trials" => self.full_trials = parse(key, v)?,
            "full_max_nodes" => self.full_max_nodes = parse(key, v)?,
            _ => return invalid(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    /// Checks every precondition the trials rely on.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.methods.is_empty() {
            return invalid("at least one method is required");
        }
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if self.k == 0 || self.pi.len() != self.k {
            return invalid(format!("pi has {} entries but K = {}", self.pi.len(), self.k));
        }
        validate_probability_vector(&self.pi)?;
        if !(self.pinv_tol >= 0.0 && self.pinv_tol < 1.0) {
            return invalid("pinv_tol must lie in [0, 1)");
        }
        check_unit("beta", self.beta)?;
        check_unit("zeta", self.zeta)?;
        let k = self.k;
        let check_size = |nodes: usize, n: usize| -> Result<()> {
            if nodes < k {
                return invalid(format!("N = {nodes} is smaller than K = {k}"));
            }
            if n == 0 || n > nodes {
                return invalid(format!("sample size {n} must lie in [1, N = {nodes}]"));
            }
            if n < k && self.methods.contains(&Method::Dcs) {
                return invalid(format!("sample size {n} is smaller than K = {k}"));
            }
            Ok(())
        };
        match self.scenario {
            Scenario::S1 | Scenario::Timing => {
                nonempty("nodes_grid", &self.nodes_grid)?;
                if self.nodes_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("nodes_grid must be strictly ascending");
                }
                for &nodes in &self.nodes_grid {
                    let n = match self.scenario {
                        Scenario::S1 => s1_sample_size(nodes),
                        _ => self.n,
                    };
                    check_size(nodes, n)?;
                }
            }
            Scenario::S2 => {
                nonempty("sample_grid", &self.sample_grid)?;
                for &n in &self.sample_grid {
                    check_size(self.nodes, n)?;
                }
            }
            Scenario::S3 => {
                nonempty("beta_grid", &self.beta_grid)?;
                nonempty("zeta_grid", &self.zeta_grid)?;
                for &b in &self.beta_grid {
                    check_unit("beta_grid", b)?;
                }
                for &z in &self.zeta_grid {
                    check_unit("zeta_grid", z)?;
                }
                check_size(self.nodes, self.n)?;
            }
            Scenario::S4 => {
                nonempty("delta_grid", &self.delta_grid)?;
                if self.k != 3 {
                    return invalid("scenario s4 uses three communities");
                }
                for &d in &self.delta_grid {
                    if !(0.0..=1.0 / 3.0 + 1e-12).contains(&d) {
                        return invalid(format!("delta = {d} must lie in [0, 1/3]"));
                    }
                }
                check_size(self.nodes, self.n)?;
            }
        }
        Ok(())
    }
}

/// `⌈2 (ln N)²⌉`.
pub fn s1_sample_size(nodes: usize) -> usize {
    let l = (nodes as f64).ln();
    (2.0 * l * l).ceil() as usize
}

/// `π = (1/3 − Δ, 1/3, 1/3 + Δ)`, clamped at zero against roundoff.
pub fn imbalanced_pi(delta: f64) -> Vec<f64> {
    let third = 1.0 / 3.0;
    vec![(third - delta).max(0.0), third, third + delta]
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("{name} = {x} must lie in [0, 1]"));
    }
    Ok(())
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return invalid(format!("{name} must not be empty"));
    }
    Ok(())
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().or_else(|_| invalid(format!("cannot parse {key} = {v:?}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(SscError::Parse {
                line: idx + 1,
                msg: "expected 'key = value'".into(),
            });
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    parse_config_text(&std::fs::read_to_string(path)?)
}
