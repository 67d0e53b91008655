//! A small signal-strength sweep printed as a mean (se) table.

use ssc::bench::scenarios::rate_table;
use ssc::bench::{run_scenario, Scenario, ScenarioConfig};

fn main() -> ssc::Result<()> {
    let mut cfg = ScenarioConfig::defaults(Scenario::S3);
    cfg.set("nodes", "1000")?;
    cfg.set("trials", "5")?;
    cfg.set("beta_grid", "0.05, 0.35")?;
    cfg.set("zeta_grid", "0.05, 0.95")?;
    cfg.set("methods", "srs,dcs")?;
    let records = run_scenario(&cfg)?;
    print!("{}", rate_table(&records));
    Ok(())
}
