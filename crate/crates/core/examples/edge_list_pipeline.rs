//! Cluster a network stored as an edge list with arbitrary node ids.

use std::io::Write;

use ssc::bench::{run_real, Baseline, RealConfig};
use ssc::pipeline::KChoice;
use ssc::sampling::SamplingMethod;

fn main() -> ssc::Result<()> {
    // two dense groups with ids 1000.. and 5000.., joined by a bridge
    let dir = std::env::temp_dir().join("ssc_edge_list_example");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("network.txt");
    let mut f = std::fs::File::create(&input)?;
    writeln!(f, "# two groups")?;
    for base in [1000u64, 5000] {
        for i in 0..40 {
            for j in i + 1..40 {
                if (i * 7 + j * 3) % 4 != 0 {
                    writeln!(f, "{} {}", base + i, base + j)?;
                }
            }
        }
    }
    writeln!(f, "1000 5000")?;
    drop(f);

    let mut cfg = RealConfig::new(&input, Some(SamplingMethod::Dcs), 30, KChoice::AUTO, 1);
    cfg.baseline = Baseline::IfFeasible;
    cfg.labels_out = Some(dir.join("labels.txt"));
    cfg.id_map_out = Some(dir.join("ids.txt"));
    let summary = run_real(&cfg)?;
    print!("{summary}");
    println!("labels in {}", dir.join("labels.txt").display());
    Ok(())
}
