use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ssc::bench::config::{read_config_file, Scenario, ScenarioConfig};
use ssc::bench::records::{read_records, write_records, write_records_to};
use ssc::bench::scenarios::{describe, rate_table, run_scenario};
use ssc::bench::{run_real, timing_report, Baseline, RealConfig};
use ssc::io::{read_labels, write_edge_list, write_labels};
use ssc::pipeline::KChoice;
use ssc::rng::rng_from_seed;
use ssc::sampling::SamplingMethod;
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};
use ssc::Result;

#[derive(Parser)]
#[command(
    name = "ssc",
    version,
    about = "Subsampling spectral clustering for stochastic block models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a stochastic block model graph; writes an edge list and labels.
    Generate(GenerateArgs),
    /// Cluster an edge-list file.
    Cluster(ClusterArgs),
    /// Run a simulation scenario and write per-trial CSV records.
    Bench {
        #[arg(value_enum)]
        scenario: BenchScenario,
        #[command(flatten)]
        opts: SweepArgs,
    },
    /// Misclustered rate between two label files.
    Eval {
        /// Estimated labels.
        #[arg(long)]
        pred: PathBuf,
        /// Reference labels.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Per-stage timing medians and log-log slopes; runs a timing sweep
    /// unless --input names an existing benchmark CSV.
    Timing {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        opts: SweepArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchScenario {
    S1,
    S2,
    S3,
    S4,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Srs,
    Dcs,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    IfFeasible,
    Lanczos,
    Never,
}

fn parse_k(s: &str) -> std::result::Result<KChoice, String> {
    if s == "auto" {
        return Ok(KChoice::AUTO);
    }
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(KChoice::Fixed(k)),
        _ => Err(format!("expected a positive integer or 'auto', got {s:?}")),
    }
}

fn parse_pi(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad probability {p:?}")))
        .collect()
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of nodes N.
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0.05)]
    zeta: f64,
    /// Comma-separated community probabilities; uniform by default.
    #[arg(long, value_parser = parse_pi)]
    pi: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    out: PathBuf,
    /// Label output path; defaults to the edge-list path with `.labels`.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Edge-list file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "srs")]
    method: MethodArg,
    /// Sample size n.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Number of clusters, or `auto` for the eigengap choice.
    #[arg(long, default_value = "auto", value_parser = parse_k)]
    k: KChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Label output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampled node ids output path.
    #[arg(long)]
    sample_out: Option<PathBuf>,
    /// Map from external to internal node ids.
    #[arg(long)]
    id_map: Option<PathBuf>,
    /// Full spectral clustering comparison.
    #[arg(long, value_enum, default_value = "if-feasible")]
    baseline: BaselineArg,
    /// Reference labels to score against.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated methods among srs, dcs, full.
    #[arg(long)]
    method: Option<String>,
    /// Sample size n.
    #[arg(long)]
    n: Option<usize>,
    /// Number of nodes N.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Comma-separated community probabilities.
    #[arg(long)]
    pi: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Any other configuration key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl SweepArgs {
    fn config(&self, scenario: Scenario) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::defaults(scenario);
        if let Some(path) = &self.config {
            cfg.apply(&read_config_file(path)?)?;
        }
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                return Err(ssc::SscError::InvalidInput(format!(
                    "--set expects key=value, got {kv:?}"
                )));
            };
            cfg.set(k.trim(), v)?;
        }
        let flags: [(&str, Option<String>); 11] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("jobs", self.jobs.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("methods", self.method.clone()),
            ("n", self.n.map(|v| v.to_string())),
            ("nodes", self.nodes.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("beta", self.beta.map(|v| v.to_string())),
            ("zeta", self.zeta.map(|v| v.to_string())),
            ("pi", self.pi.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let pi = a.pi.clone().unwrap_or_else(|| vec![1.0 / a.k as f64; a.k]);
    let mut rng = rng_from_seed(a.seed);
    let z = sample_memberships(&pi, a.nodes, &mut rng)?;
    let b = BlockMatrix::planted(a.beta, a.zeta, pi.len())?;
    let g = generate_adjacency(&z, &b, &mut rng)?;
    write_edge_list(&g, &a.out)?;
    let labels = a.labels.clone().unwrap_or_else(|| a.out.with_extension("labels"));
    write_labels(&z, None, &labels)?;
    println!(
        "wrote {} nodes, {} edges to {}; labels to {}",
        g.n_nodes(),
        g.n_edges(),
        a.out.display(),
        labels.display()
    );
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<()> {
    let method = match a.method {
        MethodArg::Srs => Some(SamplingMethod::Srs),
        MethodArg::Dcs => Some(SamplingMethod::Dcs),
        MethodArg::Full => None,
    };
    let mut cfg = RealConfig::new(&a.input, method, a.n, a.k, a.seed);
    cfg.baseline = match a.baseline {
        BaselineArg::IfFeasible => Baseline::IfFeasible,
        BaselineArg::Lanczos => Baseline::Iterative,
        BaselineArg::Never => Baseline::Never,
    };
    cfg.labels_out = a.out.clone();
    cfg.sample_out = a.sample_out.clone();
    cfg.id_map_out = a.id_map.clone();
    let summary = run_real(&cfg)?;
    print!("{summary}");
    if let Some(truth) = &a.truth {
        let z = read_labels(truth)?;
        println!(
            "vs truth        {:.4}",
            ssc::eval::misclustered_rate(&summary.labels, &z)?
        );
    }
    Ok(())
}

fn emit(cfg: &ScenarioConfig, records: &[ssc::bench::Record]) -> Result<()> {
    match &cfg.out {
        Some(path) => write_records(path, &describe(cfg), records),
        None => write_records_to(std::io::stdout().lock(), &describe(cfg), records),
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(&a),
        Command::Cluster(a) => cluster(&a),
        Command::Bench { scenario, opts } => {
            let scenario = match scenario {
                BenchScenario::S1 => Scenario::S1,
                BenchScenario::S2 => Scenario::S2,
                BenchScenario::S3 => Scenario::S3,
                BenchScenario::S4 => Scenario::S4,
            };
            let cfg = opts.config(scenario)?;
            let records = run_scenario(&cfg)?;
            emit(&cfg, &records)?;
            if scenario == Scenario::S3 {
                eprint!("{}", rate_table(&records));
            }
            Ok(())
        }
        Command::Eval { pred, truth } => {
            let rate = ssc::eval::misclustered_rate(&read_labels(pred)?, &read_labels(truth)?)?;
            println!("{rate}");
            Ok(())
        }
        Command::Timing { input, opts } => {
            let records = match input {
                Some(path) => read_records(path)?,
                None => {
                    let cfg = opts.config(Scenario::Timing)?;
                    let records = run_scenario(&cfg)?;
                    if cfg.out.is_some() {
                        emit(&cfg, &records)?;
                    }
                    records
                }
            };
            let mut out = std::io::stdout().lock();
            timing_report(&records).write_csv(&mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
