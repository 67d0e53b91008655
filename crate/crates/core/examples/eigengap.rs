//! Choosing the number of communities from the subsampled spectrum.

use ssc::pipeline::{ssc, KChoice, SscConfig};
use ssc::rng::rng_from_seed;
use ssc::sampling::SamplingMethod;
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

fn main() -> ssc::Result<()> {
    for k in [2, 3, 5] {
        let mut rng = rng_from_seed(k as u64);
        let z = sample_memberships(&vec![1.0 / k as f64; k], 3000, &mut rng)?;
        let g = generate_adjacency(&z, &BlockMatrix::planted(0.3, 0.05, k)?, &mut rng)?;
        let cfg = SscConfig {
            k: KChoice::AUTO,
            ..SscConfig::new(SamplingMethod::Srs, 150, 0, 11)
        };
        let out = ssc(&g, &cfg)?;
        let sv: Vec<String> = out.embedding.singular_values()[..k + 2]
            .iter()
            .map(|s| format!("{s:.3}"))
            .collect();
        println!(
            "planted K = {k}: chose {}; leading singular values {}",
            out.k,
            sv.join(" ")
        );
    }
    Ok(())
}
