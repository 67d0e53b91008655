//! Confusion matrices and the permutation-minimized misclustered rate.

use crate::error::{invalid, Result};
use crate::sbm::LabelVector;

/// Largest K for which the rate is computed by enumerating permutations.
pub const BRUTE_FORCE_MAX_K: usize = 8;

/// `counts[a][b] = |{i : zhat_i = a, z_i = b}|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.counts[a][b]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn transpose(&self) -> Self {
        let k = self.k();
        Self {
            counts: (0..k).map(|b| (0..k).map(|a| self.counts[a][b]).collect()).collect(),
        }
    }

    /// Largest `Σ_a counts[a][π(a)]` over permutations π.
    pub fn max_matching(&self) -> u64 {
        if self.k() <= BRUTE_FORCE_MAX_K {
            max_trace_brute_force(self)
        } else {
            max_trace_assignment(self)
        }
    }
}

/// Builds the K×K confusion matrix, where K is the larger of the two label
/// counts; the smaller labeling is padded with empty labels.
pub fn confusion(zhat: &LabelVector, z: &LabelVector) -> Result<ConfusionMatrix> {
    confusion_raw(zhat.as_slice(), z.as_slice(), zhat.k().max(z.k()))
}

/// [`confusion`] on raw 0-based label slices.
pub fn confusion_raw(zhat: &[usize], z: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if zhat.len() != z.len() {
        return invalid(format!("label vectors differ in length: {} vs {}", zhat.len(), z.len()));
    }
    let mut counts = vec![vec![0u64; k]; k];
    for (&a, &b) in zhat.iter().zip(z) {
        if a >= k || b >= k {
            return invalid(format!("label {} out of range for K = {k}", a.max(b)));
        }
        counts[a][b] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// `min over relabelings π of |{i : π(zhat_i) ≠ z_i}| / N`.
///
/// Labelings with different numbers of clusters are compared after padding
/// the confusion matrix with empty rows or columns.
pub fn misclustered_rate(zhat: &LabelVector, z: &LabelVector) -> Result<f64> {
    misclustered_rate_raw(zhat.as_slice(), z.as_slice(), zhat.k().max(z.k()))
}

/// [`misclustered_rate`] on raw 0-based label slices.
pub fn misclustered_rate_raw(zhat: &[usize], z: &[usize], k: usize) -> Result<f64> {
    let m = confusion_raw(zhat, z, k)?;
    let n = m.total();
    if n == 0 {
        return invalid("cannot score an empty labeling");
    }
    Ok((n - m.max_matching()) as f64 / n as f64)
}

/// Best permutation trace by enumerating all `K!` permutations (Heap's
/// algorithm).
pub fn max_trace_brute_force(m: &ConfusionMatrix) -> u64 {
    let k = m.k();
    if k == 0 {
        return 0;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let trace = |p: &[usize]| -> u64 { p.iter().enumerate().map(|(a, &b)| m.counts[a][b]).sum() };
    let mut best = trace(&perm);
    let mut c = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(trace(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Best permutation trace by the Hungarian method with potentials,
/// `O(K³)`, in exact integer arithmetic.
pub fn max_trace_assignment(m: &ConfusionMatrix) -> u64 {
    let k = m.k();
    if k == 0 {
        return 0;
    }
    let cost = |a: usize, b: usize| -> i64 { -(m.counts[a][b] as i64) };
    // 1-based arrays; index 0 is the virtual start column
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| m.counts[owner[j] - 1][j - 1]).sum()
}
