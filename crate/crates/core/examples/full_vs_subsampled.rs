//! Subsampled clustering against full spectral clustering.

use ssc::eval::misclustered_rate;
use ssc::pipeline::{full_sc, ssc, FullMethod, KChoice, SscConfig};
use ssc::rng::rng_from_seed;
use ssc::sampling::SamplingMethod;
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

fn main() -> ssc::Result<()> {
    let mut rng = rng_from_seed(5);
    let z = sample_memberships(&[1.0 / 3.0; 3], 2000, &mut rng)?;
    let g = generate_adjacency(&z, &BlockMatrix::planted(0.1, 0.05, 3)?, &mut rng)?;

    for method in [FullMethod::Dense, FullMethod::Lanczos] {
        let full = full_sc(&g, KChoice::Fixed(3), method, 10, 5)?;
        println!(
            "full ({method:?}): rate {:.4}, eigensolver {:.3}s",
            misclustered_rate(&full.labels, &z)?,
            full.timings.eig
        );
    }
    let full = full_sc(&g, KChoice::Fixed(3), FullMethod::Lanczos, 10, 5)?;
    for n in [50, 100, 200, 400] {
        let out = ssc(&g, &SscConfig::new(SamplingMethod::Dcs, n, 3, 5))?;
        println!(
            "dcs n = {n:>3}: rate {:.4}, agreement with full {:.4}, {:.3}s",
            misclustered_rate(&out.labels, &z)?,
            1.0 - misclustered_rate(&out.labels, &full.labels)?,
            out.timings.total()
        );
    }
    Ok(())
}
