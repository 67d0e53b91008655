//! k-means for embedding rows and for scalar degree sequences.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Lloyd stops once no centroid moves farther than this.
pub const MOVEMENT_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 100;
pub const DEFAULT_RESTARTS: usize = 10;
/// Lloyd iterations for the scalar degree partition.
pub const MAX_ITERATIONS_1D: usize = 20;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// Cluster of each point, in `0..k`.
    pub labels: Vec<usize>,
    /// k×d centroid matrix.
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// wcss after each assignment step of the winning restart.
    pub wcss_history: Vec<f64>,
}

/// Best-of-`restarts` k-means with k-means++ seeding and Lloyd iterations.
///
/// Restart `r` draws from a generator seeded with `derive_seed(seed, [r])`,
/// so restarts run in parallel and the winner (lowest wcss, then lowest
/// restart index) does not depend on thread count.
pub fn kmeans(points: ArrayView2<'_, f64>, k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let (n, d) = points.dim();
    if k == 0 || k > n {
        return invalid(format!("k-means needs 1 <= K <= N, got K = {k}, N = {n}"));
    }
    if d == 0 {
        return invalid("points must have at least one coordinate");
    }
    if restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    let points = points.as_standard_layout();
    let data = points.as_slice().expect("standard layout");

    let runs: Vec<KMeansResult> = (0..restarts)
        .into_par_iter()
        .map(|r| single_run(data, n, d, k, derive_seed(seed, &[r as u64])))
        .collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.wcss.total_cmp(&b.wcss).then(ia.cmp(ib)))
        .map(|(_, r)| r)
        .unwrap();
    Ok(best)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn single_run(data: &[f64], n: usize, d: usize, k: usize, seed: u64) -> KMeansResult {
    let mut rng = rng_from_seed(seed);
    let point = |i: usize| &data[i * d..(i + 1) * d];

    // k-means++ seeding
    let mut centroids = vec![0.0; k * d];
    let first = rng.random_range(0..n);
    centroids[..d].copy_from_slice(point(first));
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(point(i), point(first))).collect();
    for c in 1..k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in closest.iter().enumerate() {
                acc += w;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids[c * d..(c + 1) * d].copy_from_slice(point(pick));
        for (i, slot) in closest.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(point(i), point(pick)));
        }
    }

    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut wcss;
    loop {
        wcss = assign(data, n, d, k, &centroids, &mut labels);
        // assignment can only lower the objective relative to the previous
        // update step
        history.push(wcss);
        if converged || iterations == MAX_ITERATIONS {
            break;
        }
        iterations += 1;

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, x) in sums[l * d..(l + 1) * d].iter_mut().zip(point(i)) {
                *s += x;
            }
        }
        let mut new_centroids = centroids.clone();
        for c in 0..k {
            if counts[c] > 0 {
                for t in 0..d {
                    new_centroids[c * d + t] = sums[c * d + t] / counts[c] as f64;
                }
            }
        }
        repair_empty(data, n, d, k, &mut new_centroids, &labels, &mut counts);

        let movement = (0..k)
            .map(|c| sq_dist(&centroids[c * d..(c + 1) * d], &new_centroids[c * d..(c + 1) * d]).sqrt())
            .fold(0.0, f64::max);
        centroids = new_centroids;
        converged = movement < MOVEMENT_TOL;
    }

    KMeansResult {
        labels,
        centroids: Array2::from_shape_vec((k, d), centroids).expect("k*d centroids"),
        wcss,
        iterations,
        converged,
        wcss_history: history,
    }
}

fn assign(data: &[f64], n: usize, d: usize, k: usize, centroids: &[f64], labels: &mut [usize]) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        let p = &data[i * d..(i + 1) * d];
        let (best, dist) = (0..k)
            .map(|c| (c, sq_dist(p, &centroids[c * d..(c + 1) * d])))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        labels[i] = best;
        total += dist;
    }
    total
}

/// Reseeds each empty cluster at the point farthest from its own centroid.
fn repair_empty(
    data: &[f64],
    n: usize,
    d: usize,
    k: usize,
    centroids: &mut [f64],
    labels: &[usize],
    counts: &mut [usize],
) {
    let mut taken = vec![false; n];
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let far = (0..n)
            .filter(|&i| !taken[i] && counts[labels[i]] > 1)
            .map(|i| {
                let l = labels[i];
                (i, sq_dist(&data[i * d..(i + 1) * d], &centroids[l * d..(l + 1) * d]))
            })
            .fold(None, |acc: Option<(usize, f64)>, x| match acc {
                Some(a) if a.1 >= x.1 => Some(a),
                _ => Some(x),
            });
        if let Some((i, _)) = far {
            taken[i] = true;
            counts[labels[i]] -= 1;
            counts[c] = 1;
            centroids[c * d..(c + 1) * d].copy_from_slice(&data[i * d..(i + 1) * d]);
        }
    }
}

/// Scalar k-means with deterministic quantile initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition1d {
    /// Cluster of each value, in `0..n_clusters`, ordered by ascending mean.
    pub labels: Vec<usize>,
    /// Cluster means, ascending.
    pub means: Vec<f64>,
    /// Nonempty clusters actually produced; less than the requested K when
    /// the values cannot support K clusters.
    pub n_clusters: usize,
    /// Set when some requested cluster ended up empty.
    pub degenerate: bool,
}

/// Partitions scalar `values` into at most `k` clusters.
///
/// Centroids start at the `(c + 1/2)/k` quantiles of the sorted values and
/// Lloyd runs for at most [`MAX_ITERATIONS_1D`] rounds. Empty clusters are
/// dropped and the survivors relabeled by ascending mean.
pub fn kmeans_1d(values: &[f64], k: usize) -> Result<Partition1d> {
    let n = values.len();
    if k == 0 || k > n {
        return invalid(format!("1-D k-means needs 1 <= K <= N, got K = {k}, N = {n}"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut centers: Vec<f64> = (0..k)
        .map(|c| sorted[(((2 * c + 1) * n) / (2 * k)).min(n - 1)])
        .collect();

    let mut labels = vec![0usize; n];
    for _ in 0..MAX_ITERATIONS_1D {
        for (i, &v) in values.iter().enumerate() {
            labels[i] = nearest_center(&centers, v);
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            sums[l] += values[i];
            counts[l] += 1;
        }
        let mut moved = 0.0f64;
        for c in 0..k {
            if counts[c] > 0 {
                let m = sums[c] / counts[c] as f64;
                moved = moved.max((m - centers[c]).abs());
                centers[c] = m;
            }
        }
        if moved == 0.0 {
            break;
        }
    }
    for (i, &v) in values.iter().enumerate() {
        labels[i] = nearest_center(&centers, v);
    }

    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        sums[l] += values[i];
    }
    let mut live: Vec<(usize, f64)> = (0..k)
        .filter(|&c| counts[c] > 0)
        .map(|c| (c, sums[c] / counts[c] as f64))
        .collect();
    live.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut remap = vec![usize::MAX; k];
    for (new, &(old, _)) in live.iter().enumerate() {
        remap[old] = new;
    }
    let degenerate = live.len() < k;
    if degenerate {
        log::warn!("1-D k-means produced {} nonempty clusters out of {k}", live.len());
    }
    Ok(Partition1d {
        labels: labels.iter().map(|&l| remap[l]).collect(),
        means: live.iter().map(|&(_, m)| m).collect(),
        n_clusters: live.len(),
        degenerate,
    })
}

fn nearest_center(centers: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut dist = f64::INFINITY;
    for (c, &m) in centers.iter().enumerate() {
        let dd = (v - m).abs();
        if dd < dist {
            dist = dd;
            best = c;
        }
    }
    best
}
