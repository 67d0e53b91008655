//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by implicit QL with
//! Wilkinson shifts (the EISPACK `tred2`/`tql2` pair). O(n³) time, all
//! eigenpairs, deterministic for a given input.

use ndarray::{Array1, Array2, ArrayView2};

use rand::Rng;

use crate::error::{invalid, Result};

/// Relative asymmetry tolerated on input.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Array1<f64>,
    /// Column `a` is the unit eigenvector for `values[a]`.
    pub vectors: Array2<f64>,
}

/// Checks shape and symmetry and returns an exactly symmetric row-major
/// copy.
fn symmetrized(m: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return invalid(format!("matrix is {rows}x{cols}, not square"));
    }
    let n = rows;
    let scale = m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (m[[i, j]] - m[[j, i]]).abs() > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
                return invalid(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = 0.5 * (m[[i, j]] + m[[j, i]]);
        }
    }
    Ok(out)
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Fails if `|m_ij − m_ji|` exceeds `1e-8 · max|m|` anywhere.
pub fn symmetric_eig(m: ArrayView2<'_, f64>) -> Result<SymmetricEigen> {
    let mut vt = symmetrized(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut vt, &mut d, &mut e);
    tql2(n, Some(&mut vt), &mut d, &mut e)?;
    Ok(sorted_descending(n, &d, &vt))
}

/// Every eigenvalue of a symmetric matrix, but eigenvectors for the `k`
/// largest only.
///
/// Eigenvalues come from QL on the tridiagonal form without accumulating
/// rotations; the `k` vectors come from inverse iteration on the
/// tridiagonal matrix, reorthogonalized within clusters of close
/// eigenvalues, and are mapped back through the Householder basis. Far
/// cheaper than [`symmetric_eig`] when `k` is much smaller than `n`.
pub fn symmetric_eig_top(m: ArrayView2<'_, f64>, k: usize) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if k > n {
        return invalid(format!("asked for {k} eigenvectors of a {n}x{n} matrix"));
    }
    let mut q = symmetrized(m)?;
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut q, &mut d, &mut e);
    let diag = d.clone();
    let off = e[1..].to_vec();
    tql2(n, None, &mut d, &mut e)?;
    let mut values = d;
    values.sort_by(|a, b| b.total_cmp(a));

    let y = tridiagonal_vectors(&diag, &off, &values[..k]);
    // row i of q is the i-th Householder basis vector
    let mut vectors = Array2::zeros((n, k));
    {
        let out = vectors.as_slice_mut().expect("standard layout");
        for i in 0..n {
            let basis = &q[i * n..(i + 1) * n];
            let coeffs = &y[i * k..(i + 1) * k];
            for (r, &b) in basis.iter().enumerate() {
                if b != 0.0 {
                    let row = &mut out[r * k..(r + 1) * k];
                    for (o, &c) in row.iter_mut().zip(coeffs) {
                        *o += b * c;
                    }
                }
            }
        }
    }
    Ok(SymmetricEigen {
        values: Array1::from(values),
        vectors,
    })
}

/// Eigenvectors of the tridiagonal matrix `(diag, off)` for the given
/// descending eigenvalues, as a row-major n×k matrix.
fn tridiagonal_vectors(diag: &[f64], off: &[f64], lambdas: &[f64]) -> Vec<f64> {
    const ITERATIONS: usize = 3;
    let n = diag.len();
    let k = lambdas.len();
    let norm = (0..n)
        .map(|i| {
            diag[i].abs() + if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-3 * norm;
    let sep = 10.0 * f64::EPSILON * norm;

    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut cluster_start = 0;
    let mut shifted_prev = f64::INFINITY;
    let mut rng = crate::rng::rng_from_seed(0x5eed);
    for (a, &lambda) in lambdas.iter().enumerate() {
        if a > 0 && lambdas[a - 1] - lambda > cluster_tol {
            cluster_start = a;
        }
        // keep shifts of coincident eigenvalues apart
        let shift = if shifted_prev - lambda < sep {
            shifted_prev - sep
        } else {
            lambda
        };
        shifted_prev = shift;
        let lu = TridiagonalLu::new(diag, off, shift, sep);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for _ in 0..ITERATIONS {
            lu.solve(&mut x);
            for prev in &vecs[cluster_start..a] {
                let c: f64 = x.iter().zip(prev).map(|(u, v)| u * v).sum();
                for (u, v) in x.iter_mut().zip(prev) {
                    *u -= c * v;
                }
            }
            let nrm = x.iter().map(|u| u * u).sum::<f64>().sqrt();
            if nrm == 0.0 || !nrm.is_finite() {
                x = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                continue;
            }
            x.iter_mut().for_each(|u| *u /= nrm);
        }
        vecs.push(x);
    }
    let mut out = vec![0.0; n * k];
    for (a, v) in vecs.iter().enumerate() {
        for (i, &x) in v.iter().enumerate() {
            out[i * k + a] = x;
        }
    }
    out
}

/// LU factorization with partial pivoting of `T − σI` for tridiagonal `T`;
/// zero pivots are replaced by `tiny` so near-singular shifts stay usable.
struct TridiagonalLu {
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn new(diag: &[f64], off: &[f64], sigma: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut dd: Vec<f64> = diag.iter().map(|x| x - sigma).collect();
        let mut du = off.to_vec();
        let mut dl = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i] == 0.0 {
                    dd[i] = tiny;
                }
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if dd[n - 1] == 0.0 {
            dd[n - 1] = tiny;
        }
        Self {
            dd,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        x[n - 1] /= self.dd[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.dd[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.dd[i];
        }
    }
}

/// Eigendecomposition of a symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal (`off[i]` couples `i` and `i + 1`).
pub fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> Result<SymmetricEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }
    if off.len() + 1 != n {
        return invalid("off-diagonal must have length n - 1");
    }
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let mut d = diag.to_vec();
    // tql2 expects e[i] to couple i-1 and i
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(off);
    tql2(n, Some(&mut vt), &mut d, &mut e)?;
    Ok(sorted_descending(n, &d, &vt))
}

/// Orders eigenpairs by descending eigenvalue; row `a` of `vt` is the
/// eigenvector for `d[a]`.
fn sorted_descending(n: usize, d: &[f64], vt: &[f64]) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    SymmetricEigen {
        values: Array1::from_iter(order.iter().map(|&a| d[a])),
        vectors: Array2::from_shape_fn((n, n), |(i, c)| vt[order[c] * n + i]),
    }
}

/// Dot product with four independent accumulators, so the compiler can
/// keep the loop in vector registers.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Householder tridiagonalization. `w` holds the transformation matrix
/// transposed (row `i` is its column `i`), so the inner loops run over
/// contiguous memory; on entry it is the symmetric input.
fn tred2(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = w[j * n + n - 1];
    }

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + i - 1];
                w[i * n + j] = 0.0;
                w[j * n + i] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                let row = &w[j * n + j..j * n + i];
                g = e[j] + row[0] * f + dot(&row[1..], &d[j + 1..i]);
                for (ek, &r) in e[j + 1..i].iter_mut().zip(&row[1..]) {
                    *ek += r * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let row = &mut w[j * n..j * n + i];
                for k in j..i {
                    row[k] -= f * e[k] + g * d[k];
                }
                d[j] = row[i - 1];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        w[i * n + n - 1] = w[i * n + i];
        w[i * n + i] = 1.0;
        let h = d[i + 1];
        let (lo, hi) = w.split_at_mut((i + 1) * n);
        let next = &mut hi[..=i];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = next[k] / h;
            }
            for j in 0..=i {
                let row = &mut lo[j * n..j * n + i + 1];
                let g = dot(next, row);
                for (r, dk) in row.iter_mut().zip(&d[..=i]) {
                    *r -= g * dk;
                }
            }
        }
        next.fill(0.0);
    }
    for j in 0..n {
        d[j] = w[j * n + n - 1];
        w[j * n + n - 1] = 0.0;
    }
    w[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// `vt` holds the accumulated transformation transposed: row `i` is the
/// current `i`-th basis vector.
fn tql2(n: usize, mut vt: Option<&mut [f64]>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so m < n always
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return invalid("tridiagonal QL iteration did not converge");
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(vt) = vt.as_deref_mut() {
                        let (head, tail) = vt.split_at_mut((i + 1) * n);
                        let row_i = &mut head[i * n..];
                        let row_next = &mut tail[..n];
                        for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
