//! Stochastic block model draws: block densities and file output.

use ssc::io::{write_edge_list, write_labels};
use ssc::rng::rng_from_seed;
use ssc::sbm::{generate_adjacency, sample_memberships, BlockMatrix};

fn main() -> ssc::Result<()> {
    let pi = [0.2, 0.3, 0.5];
    let b = BlockMatrix::planted(0.2, 0.1, 3)?;
    let mut rng = rng_from_seed(1);
    let z = sample_memberships(&pi, 3000, &mut rng)?;
    let g = generate_adjacency(&z, &b, &mut rng)?;

    let sizes = z.sizes();
    let mut counts = [[0usize; 3]; 3];
    for (u, v) in g.edges() {
        let (a, c) = (z.get(u).min(z.get(v)), z.get(u).max(z.get(v)));
        counts[a][c] += 1;
    }
    println!("community sizes {sizes:?}, density {:.4}", g.density()?);
    for a in 0..3 {
        for c in a..3 {
            let pairs = if a == c {
                sizes[a] * (sizes[a] - 1) / 2
            } else {
                sizes[a] * sizes[c]
            };
            println!(
                "block ({a},{c}): observed {:.4}, B = {:.4}",
                counts[a][c] as f64 / pairs as f64,
                b.get(a, c)
            );
        }
    }

    let dir = std::env::temp_dir();
    write_edge_list(&g, dir.join("sbm.edges"))?;
    write_labels(&z, None, dir.join("sbm.labels"))?;
    println!("wrote {}", dir.join("sbm.edges").display());
    Ok(())
}
