//! Label disagreement up to relabeling, for equal and unequal cluster counts.

use ssc::eval::{confusion_raw, max_trace_assignment, max_trace_brute_force, misclustered_rate_raw};

fn main() -> ssc::Result<()> {
    let z = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let relabeled = [2, 2, 2, 0, 0, 0, 1, 1, 1];
    let one_off = [2, 2, 0, 0, 0, 0, 1, 1, 1];
    let merged = [0, 0, 0, 0, 0, 0, 1, 1, 1];
    for (name, zhat) in [
        ("relabeled", relabeled),
        ("one node moved", one_off),
        ("two merged", merged),
    ] {
        println!("{name:>15}: {:.4}", misclustered_rate_raw(&zhat, &z, 3)?);
    }

    let m = confusion_raw(&one_off, &z, 3)?;
    println!("confusion {:?}", m.rows());
    println!(
        "best matching: brute force {}, assignment {}",
        max_trace_brute_force(&m),
        max_trace_assignment(&m)
    );
    Ok(())
}
