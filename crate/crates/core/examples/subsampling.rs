//! Uniform and degree-corrected node samples, with the coverage bounds.

use ssc::rng::rng_from_seed;
use ssc::sampling::{coverage_event, dcs, dcs_min_size, initial_partition, srs, srs_min_size};
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

fn main() -> ssc::Result<()> {
    let mut rng = rng_from_seed(3);
    let z = sample_memberships(&[1.0 / 3.0 - 0.25, 1.0 / 3.0, 1.0 / 3.0 + 0.25], 4000, &mut rng)?;
    let g = generate_adjacency(&z, &BlockMatrix::planted(0.1, 0.05, 3)?, &mut rng)?;

    let part = initial_partition(&g, 3)?;
    let sizes: Vec<usize> = part.clusters.iter().map(Vec::len).collect();
    println!("degree clusters {sizes:?}");

    for n in [10, 40, 160] {
        let s = srs(g.n_nodes(), n, &mut rng)?;
        let d = dcs(&g, n, 3, &mut rng)?;
        let mean_degree = |ids: &[usize]| ids.iter().map(|&i| g.degree(i)).sum::<usize>() as f64 / n as f64;
        println!(
            "n = {n:>3}: srs mean degree {:.1}, covers all {}; dcs mean degree {:.1}, covers all {}",
            mean_degree(s.ids()),
            coverage_event(s.ids(), &z),
            mean_degree(d.ids()),
            coverage_event(d.ids(), &z),
        );
    }

    let alpha = z.sizes().into_iter().min().unwrap_or(0) as f64 / g.n_nodes() as f64;
    println!(
        "uniform sample size for 95% coverage: {}",
        srs_min_size(3, alpha, 0.05)?
    );
    println!(
        "degree-corrected sample size bound: {}",
        dcs_min_size(g.n_nodes(), 0.05)?
    );
    Ok(())
}
