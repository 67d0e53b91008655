//! Stage timings and their growth with network size at a fixed sample size.

use ssc::bench::{run_scenario, timing_report, Scenario, ScenarioConfig};

fn main() -> ssc::Result<()> {
    let mut cfg = ScenarioConfig::defaults(Scenario::Timing);
    cfg.set("methods", "srs,dcs")?;
    cfg.set("nodes_grid", "1000,2000,4000,8000")?;
    cfg.set("trials", "3")?;
    let report = timing_report(&run_scenario(&cfg)?);
    for m in &report.medians {
        println!(
            "{:<4} N = {:>5}: laplacian {:.4}s  eig {:.4}s  kmeans {:.4}s  total {:.4}s",
            m.method, m.nodes, m.laplacian, m.eig, m.kmeans, m.total
        );
    }
    for s in &report.slopes {
        println!("{} log-log slope in N: {:.2}", s.method, s.slope);
    }
    Ok(())
}
