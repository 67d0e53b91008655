//! The population embedding has one point per community, and sampled
//! embeddings approach it as the sample grows.

use ssc::rng::{derive_seed, rng_from_seed};
use ssc::sampling::srs;
use ssc::sbm::{generate_adjacency, population_bi_adjacency, sample_memberships, BlockMatrix};
use ssc::spectral::{embed, procrustes_distance, SubsampledLaplacian, DEFAULT_PINV_TOL};

fn main() -> ssc::Result<()> {
    let b = BlockMatrix::planted(0.3, 0.05, 3)?;
    let mut rng = rng_from_seed(9);
    let z = sample_memberships(&[0.2, 0.3, 0.5], 1500, &mut rng)?;
    let g = generate_adjacency(&z, &b, &mut rng)?;

    let all: Vec<usize> = (0..z.len()).step_by(10).collect();
    let pop = SubsampledLaplacian::from_dense(population_bi_adjacency(&z, &b, &all)?.view())?;
    let u = embed(&pop, 3, DEFAULT_PINV_TOL)?.coords;
    for members in z.members() {
        println!("community row {:.4}", u.row(members[0]));
    }

    for n in [25, 50, 100, 200, 400] {
        let s = srs(z.len(), n, &mut rng_from_seed(derive_seed(9, &[n as u64])))?;
        let emp = SubsampledLaplacian::from_bi_adjacency(&g.bi_adjacency(s.ids())?)?;
        let pop = SubsampledLaplacian::from_dense(population_bi_adjacency(&z, &b, s.ids())?.view())?;
        let d = procrustes_distance(
            embed(&emp, 3, DEFAULT_PINV_TOL)?.coords.view(),
            embed(&pop, 3, DEFAULT_PINV_TOL)?.coords.view(),
        )?;
        println!("n = {n:>3}: aligned distance to the population embedding {d:.4}");
    }
    Ok(())
}
