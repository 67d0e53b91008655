//! Top-K eigenpairs of a sparse symmetric matrix by Lanczos iteration with
//! full reorthogonalization.

use ndarray::Array2;
use rand::Rng;

use super::csr::CsrMatrix;
use super::eig::tridiagonal_eig;
use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;

/// Ritz pairs are accepted once `|β_m s_mi| <= tol · max|θ|`.
pub const LANCZOS_TOL: f64 = 1e-10;
const CHECK_EVERY: usize = 8;

#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// Largest `k` eigenvalues, descending.
    pub values: Vec<f64>,
    /// n×k matrix of the matching unit eigenvectors.
    pub vectors: Array2<f64>,
    /// Krylov dimension used.
    pub steps: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

fn random_unit(n: usize, basis: &[Vec<f64>], rng: &mut impl Rng) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut w, basis);
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-8 {
            w.iter_mut().for_each(|x| *x /= norm);
            return Some(w);
        }
    }
    None
}

/// Computes the `k` algebraically largest eigenpairs of the symmetric
/// matrix `a`.
pub fn lanczos_top_k(a: &CsrMatrix, k: usize, seed: u64) -> Result<LanczosResult> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return invalid("Lanczos needs a square matrix");
    }
    if k == 0 || k > n {
        return invalid(format!("need 1 <= K <= N, got K = {k}, N = {n}"));
    }
    let mut rng = rng_from_seed(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut q = random_unit(n, &basis, &mut rng).expect("fresh random vector");
    let mut w = vec![0.0; n];
    loop {
        a.mul_vec(&q, &mut w);
        let al = dot(&w, &q);
        basis.push(q);
        alpha.push(al);
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        let m = basis.len();

        let exhausted = m == n;
        let breakdown = b <= 1e-12;
        let should_check = exhausted || (breakdown && m >= k) || (m >= k + 2 && (m - k).is_multiple_of(CHECK_EVERY));
        if should_check {
            let eig = tridiagonal_eig(&alpha, &beta)?;
            let scale = eig.values.iter().fold(0.0f64, |s, &v| s.max(v.abs())).max(1e-300);
            // watch two pairs past k so a late-arriving near-duplicate of
            // the k-th eigenvalue is less likely to be missed
            let watched = (k + 2).min(m);
            let converged = (0..watched).all(|i| (b * eig.vectors[[m - 1, i]]).abs() <= LANCZOS_TOL * scale);
            if exhausted || (converged && m >= k) {
                let mut vectors = Array2::zeros((n, k));
                for i in 0..k {
                    for (j, qj) in basis.iter().enumerate() {
                        let s = eig.vectors[[j, i]];
                        for (r, &x) in qj.iter().enumerate() {
                            vectors[[r, i]] += s * x;
                        }
                    }
                }
                return Ok(LanczosResult {
                    values: eig.values.iter().take(k).copied().collect(),
                    vectors,
                    steps: m,
                });
            }
        }

        if breakdown {
            // invariant subspace found; continue from a fresh direction
            match random_unit(n, &basis, &mut rng) {
                Some(next) => {
                    beta.push(0.0);
                    q = next;
                }
                None => return invalid("Lanczos could not extend the Krylov basis"),
            }
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
}
