//! Draw a three-community network and recover it from a 100-node sample.

use ssc::eval::misclustered_rate;
use ssc::pipeline::{ssc, SscConfig};
use ssc::rng::rng_from_seed;
use ssc::sampling::SamplingMethod;
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

fn main() -> ssc::Result<()> {
    let mut rng = rng_from_seed(2024);
    let z = sample_memberships(&[1.0 / 3.0; 3], 5000, &mut rng)?;
    let g = generate_adjacency(&z, &BlockMatrix::planted(0.1, 0.05, 3)?, &mut rng)?;
    println!("{} nodes, {} edges", g.n_nodes(), g.n_edges());

    for method in [SamplingMethod::Srs, SamplingMethod::Dcs] {
        let out = ssc(&g, &SscConfig::new(method, 100, 3, 7))?;
        println!(
            "{method}: misclustered rate {:.4} in {:.3}s",
            misclustered_rate(&out.labels, &z)?,
            out.timings.total()
        );
    }
    Ok(())
}
