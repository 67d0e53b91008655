//! Subsampled Laplacian, spectral embedding and the full-network baseline.
//!
//! For a bi-adjacency `A^s` (N×n) the subsampled Laplacian is
//! `L^s = D_r^{-1/2} A^s D_c^{-1/2}` with row sums `D_r` and column sums
//! `D_c`; a zero degree contributes a zero row or column. The embedding of
//! all N nodes comes from the n×n Gram matrix `(L^s)ᵀ L^s = V Λ Vᵀ` as
//! `Û_K = L^s V_K Λ_K^{-1/2}`, so the only dense eigenproblem is n×n.

mod csr;
pub mod eig;
pub mod lanczos;

use ndarray::{Array2, ArrayView2};

pub use csr::CsrMatrix;
pub use eig::{symmetric_eig, symmetric_eig_top, tridiagonal_eig, SymmetricEigen};
pub use lanczos::{lanczos_top_k, LanczosResult};

use crate::error::{invalid, Result, SscError};
use crate::graph::{BiAdjacency, SparseGraph};

/// Default relative threshold below which Gram eigenvalues count as zero.
pub const DEFAULT_PINV_TOL: f64 = 1e-10;
/// Largest Gram dimension n materialized densely.
pub const GRAM_DENSE_GUARD: usize = 20_000;
/// Largest N for the dense full-network baseline.
pub const FULL_DENSE_GUARD: usize = 5_000;
/// Default cap on the eigengap search range.
pub const DEFAULT_K_MAX: usize = 50;

/// `D_r^{-1/2} A^s D_c^{-1/2}` together with the degrees used to build it.
#[derive(Debug, Clone)]
pub struct SubsampledLaplacian {
    matrix: CsrMatrix,
    row_degrees: Vec<f64>,
    col_degrees: Vec<f64>,
    zero_rows: usize,
    zero_cols: usize,
}

impl SubsampledLaplacian {
    pub fn from_bi_adjacency(b: &BiAdjacency) -> Result<Self> {
        if b.nnz() == 0 {
            return Err(SscError::Degenerate(
                "bi-adjacency has no edges; no node connects to the sample".into(),
            ));
        }
        let dr: Vec<f64> = b.row_degrees().into_iter().map(|d| d as f64).collect();
        let dc: Vec<f64> = b.col_degrees().into_iter().map(|d| d as f64).collect();

        // transpose the column lists into rows; columns come out ascending
        let n_rows = b.n_rows();
        let mut row_ptr = vec![0usize; n_rows + 1];
        for j in 0..b.n_cols() {
            for &i in b.column(j) {
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut cursor = row_ptr[..n_rows].to_vec();
        let mut col_idx = vec![0usize; b.nnz()];
        let mut values = vec![0.0; b.nnz()];
        for j in 0..b.n_cols() {
            let sc = dc[j].sqrt();
            for &i in b.column(j) {
                col_idx[cursor[i]] = j;
                values[cursor[i]] = 1.0 / (dr[i].sqrt() * sc);
                cursor[i] += 1;
            }
        }
        let matrix = CsrMatrix::from_parts(n_rows, b.n_cols(), row_ptr, col_idx, values);
        Ok(Self::assemble(matrix, dr, dc))
    }

    /// Builds the Laplacian of a dense nonnegative weighted bi-adjacency,
    /// such as the expected bi-adjacency of a block model.
    pub fn from_dense(a: ArrayView2<'_, f64>) -> Result<Self> {
        if a.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return invalid("weighted bi-adjacency must be finite and nonnegative");
        }
        let dr: Vec<f64> = a.rows().into_iter().map(|r| r.sum()).collect();
        let dc: Vec<f64> = a.columns().into_iter().map(|c| c.sum()).collect();
        if dr.iter().all(|&d| d == 0.0) {
            return Err(SscError::Degenerate("weighted bi-adjacency is all zero".into()));
        }
        let rows = (0..a.nrows())
            .map(|i| {
                (0..a.ncols())
                    .filter(|&j| a[[i, j]] != 0.0)
                    .map(|j| (j, a[[i, j]] / (dr[i] * dc[j]).sqrt()))
                    .collect()
            })
            .collect();
        Ok(Self::assemble(CsrMatrix::from_rows(a.ncols(), rows), dr, dc))
    }

    fn assemble(matrix: CsrMatrix, row_degrees: Vec<f64>, col_degrees: Vec<f64>) -> Self {
        let zero_rows = row_degrees.iter().filter(|&&d| d == 0.0).count();
        let zero_cols = col_degrees.iter().filter(|&&d| d == 0.0).count();
        Self {
            matrix,
            row_degrees,
            col_degrees,
            zero_rows,
            zero_cols,
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn row_degrees(&self) -> &[f64] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[f64] {
        &self.col_degrees
    }

    /// Nodes with no connection into the sample.
    pub fn zero_degree_rows(&self) -> usize {
        self.zero_rows
    }

    /// Sampled nodes with no connections at all.
    pub fn zero_degree_cols(&self) -> usize {
        self.zero_cols
    }
}

/// `(L^s)ᵀ L^s` as a dense n×n matrix.
///
/// Accumulated as a sum of outer products of the sparse rows, in row
/// order, so the cost is `Σ_i nnz(row_i)²` and the result is bit-identical
/// from run to run.
pub fn gram(ls: &SubsampledLaplacian) -> Result<Array2<f64>> {
    let n = ls.n_cols();
    if n > GRAM_DENSE_GUARD {
        return Err(SscError::Resource(format!(
            "Gram matrix of size {n} exceeds the n <= {GRAM_DENSE_GUARD} guard"
        )));
    }
    let mut g = vec![0.0; n * n];
    let m = ls.matrix();
    for i in 0..m.n_rows() {
        let (cols, vals) = m.row(i);
        for (p, (&a, &va)) in cols.iter().zip(vals).enumerate() {
            let row = &mut g[a * n..(a + 1) * n];
            for (&b, &vb) in cols[p..].iter().zip(&vals[p..]) {
                row[b] += va * vb;
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            g[a * n + b] = g[b * n + a];
        }
    }
    Ok(Array2::from_shape_vec((n, n), g).expect("n*n entries"))
}

/// Spectral coordinates of every node.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// N×K coordinates, one row per node.
    pub coords: Array2<f64>,
    /// Eigenvalues matching the K columns, descending.
    pub values: Vec<f64>,
    /// Full descending spectrum the columns were taken from: Gram
    /// eigenvalues for the subsampled route, Laplacian eigenvalues for the
    /// baseline.
    pub spectrum: Vec<f64>,
    /// Columns backed by an eigenvalue above the pseudo-inverse threshold.
    pub rank: usize,
    /// Nodes whose embedding row is identically zero for lack of edges.
    pub zero_degree_rows: usize,
}

impl Embedding {
    pub fn k(&self) -> usize {
        self.coords.ncols()
    }

    /// True when fewer than K columns carry signal; trailing columns are zero.
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.k()
    }

    /// Singular values of `L^s`, i.e. square roots of the Gram spectrum.
    pub fn singular_values(&self) -> Vec<f64> {
        self.spectrum.iter().map(|&l| l.max(0.0).sqrt()).collect()
    }
}

/// Full spectrum of the Gram matrix, with roundoff negatives clipped to
/// zero, and its top `vectors` eigenvectors.
pub fn gram_eigen(ls: &SubsampledLaplacian, vectors: usize) -> Result<SymmetricEigen> {
    let g = gram(ls)?;
    let mut eig = symmetric_eig_top(g.view(), vectors)?;
    eig.values = clip_spectrum(eig.values.iter().copied()).into();
    Ok(eig)
}

/// `Û_K = L^s V_K (Λ_K^{1/2})^†`.
///
/// Eigenvalues at or below `tol · λ_1` are treated as zero, giving zero
/// columns; the embedding then reports `rank < K`.
pub fn embed(ls: &SubsampledLaplacian, k: usize, tol: f64) -> Result<Embedding> {
    check_embed_k(ls, k)?;
    embed_with_eigen(ls, &gram_eigen(ls, k)?, k, tol)
}

fn check_embed_k(ls: &SubsampledLaplacian, k: usize) -> Result<()> {
    let n = ls.n_cols();
    if k == 0 || k > n {
        return invalid(format!("embedding dimension K = {k} must lie in [1, n = {n}]"));
    }
    Ok(())
}

/// [`embed`] reusing a Gram decomposition from [`gram_eigen`].
pub fn embed_with_eigen(ls: &SubsampledLaplacian, eig: &SymmetricEigen, k: usize, tol: f64) -> Result<Embedding> {
    check_embed_k(ls, k)?;
    if eig.values.len() != ls.n_cols() || eig.vectors.ncols() < k {
        return invalid("Gram decomposition does not match the Laplacian");
    }
    let spectrum = eig.values.to_vec();
    let top = spectrum[0];

    let mut scaled = eig.vectors.slice(ndarray::s![.., ..k]).to_owned();
    let mut rank = 0;
    for a in 0..k {
        let lam = spectrum[a];
        let s = if top > 0.0 && lam > tol * top {
            rank += 1;
            1.0 / lam.sqrt()
        } else {
            0.0
        };
        scaled.column_mut(a).mapv_inplace(|x| x * s);
    }
    if rank < k {
        log::warn!("subsampled Laplacian has rank {rank} < K = {k}; trailing embedding columns are zero");
    }
    let coords = ls.matrix().mul_dense(scaled.view());
    Ok(Embedding {
        coords,
        values: spectrum[..k].to_vec(),
        spectrum,
        rank,
        zero_degree_rows: ls.zero_degree_rows(),
    })
}

// the Gram matrix is positive semidefinite, so negatives are roundoff
fn clip_spectrum(values: impl Iterator<Item = f64>) -> Vec<f64> {
    values.map(|v| v.max(0.0)).collect()
}

/// `D^{-1/2} A D^{-1/2}`; isolated nodes get zero rows and columns.
pub fn full_laplacian(g: &SparseGraph) -> CsrMatrix {
    let inv_sqrt: Vec<f64> = (0..g.n_nodes())
        .map(|i| match g.degree(i) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let rows = (0..g.n_nodes())
        .map(|i| g.neighbors(i).iter().map(|&j| (j, inv_sqrt[i] * inv_sqrt[j])).collect())
        .collect();
    CsrMatrix::from_rows(g.n_nodes(), rows)
}

/// Eigensolver for the full-network baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullSolver {
    /// Dense tridiagonalization, all eigenvalues; limited to
    /// N <= [`FULL_DENSE_GUARD`].
    #[default]
    Dense,
    /// Lanczos for the top K eigenpairs only.
    Lanczos { seed: u64 },
}

/// Top-K eigenvectors (by algebraic eigenvalue) of a symmetric sparse
/// matrix, as an embedding.
pub fn full_embed(l: &CsrMatrix, k: usize, solver: FullSolver) -> Result<Embedding> {
    let n = l.n_rows();
    if l.n_cols() != n {
        return invalid("full embedding needs a square matrix");
    }
    if k == 0 || k > n {
        return invalid(format!("K = {k} must lie in [1, N = {n}]"));
    }
    let zero_rows = (0..n).filter(|&i| l.row(i).0.is_empty()).count();
    match solver {
        FullSolver::Dense => {
            if n > FULL_DENSE_GUARD {
                return Err(SscError::Resource(format!(
                    "dense full eigendecomposition for N = {n} exceeds the N <= {FULL_DENSE_GUARD} guard"
                )));
            }
            let eig = symmetric_eig_top(l.to_dense().view(), k)?;
            let values: Vec<f64> = eig.values.to_vec();
            Ok(Embedding {
                coords: eig.vectors,
                values: values[..k].to_vec(),
                spectrum: values,
                rank: k,
                zero_degree_rows: zero_rows,
            })
        }
        FullSolver::Lanczos { seed } => {
            let r = lanczos_top_k(l, k, seed)?;
            Ok(Embedding {
                coords: r.vectors,
                spectrum: r.values.clone(),
                values: r.values,
                rank: k,
                zero_degree_rows: zero_rows,
            })
        }
    }
}

/// Eigengap choice of K: the `k` in `1..=k_max` maximizing
/// `spectrum[k-1] − spectrum[k]`, smallest `k` on ties.
///
/// The search starts at `k = 1`, so a dominant leading eigenvalue can win.
pub fn select_k(spectrum: &[f64], k_max: usize) -> Result<usize> {
    if spectrum.len() < 2 {
        return invalid("eigengap selection needs at least two eigenvalues");
    }
    if k_max == 0 || k_max >= spectrum.len() {
        return invalid(format!("k_max = {k_max} must lie in [1, {}]", spectrum.len() - 1));
    }
    let mut best = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let gap = spectrum[k - 1] - spectrum[k];
        if gap > best_gap {
            best_gap = gap;
            best = k;
        }
    }
    Ok(best)
}

/// Default search range `min(len − 1, 50)`.
pub fn default_k_max(spectrum_len: usize) -> usize {
    spectrum_len.saturating_sub(1).min(DEFAULT_K_MAX)
}

fn frob_sq(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

/// `‖A Aᵀ − B Bᵀ‖_F`, computed from K×K products only.
pub fn projection_distance(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    let aa = a.t().dot(&a);
    let bb = b.t().dot(&b);
    let ab = a.t().dot(&b);
    (frob_sq(&aa) + frob_sq(&bb) - 2.0 * frob_sq(&ab)).max(0.0).sqrt()
}

/// `min over orthogonal O of ‖A − B O‖_F`.
///
/// The minimum equals `sqrt(‖A‖² + ‖B‖² − 2 ‖Bᵀ A‖_*)`, where `‖·‖_*` is
/// the nuclear norm, so no rotation has to be formed.
pub fn procrustes_distance(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return invalid("Procrustes alignment needs equal shapes");
    }
    let m = b.t().dot(&a);
    let mtm = m.t().dot(&m);
    let eig = symmetric_eig(mtm.view())?;
    let nuclear: f64 = eig.values.iter().map(|&v| v.max(0.0).sqrt()).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    Ok((na + nb - 2.0 * nuclear).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn path4() -> SparseGraph {
        SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3)], 4).unwrap()
    }

    #[test]
    fn path_laplacian_by_hand() {
        let b = path4().bi_adjacency(&[1, 2]).unwrap();
        let ls = SubsampledLaplacian::from_bi_adjacency(&b).unwrap();
        assert_eq!(ls.row_degrees(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(ls.col_degrees(), &[2.0, 2.0]);
        let h = 1.0 / 2f64.sqrt();
        let want = array![[h, 0.0], [0.0, h], [h, 0.0], [0.0, h]];
        let got = ls.matrix().to_dense();
        for (x, y) in got.iter().zip(want.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        // columns are orthogonal with unit norm, so the Gram is the identity
        let g = gram(&ls).unwrap();
        let brute = got.t().dot(&got);
        for (x, y) in g.iter().zip(brute.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((g[[0, 0]] - 1.0).abs() < 1e-15 && g[[0, 1]].abs() < 1e-15);
    }

    #[test]
    fn full_sample_matches_normalized_adjacency() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 5).unwrap();
        let all: Vec<usize> = (0..5).collect();
        let ls = SubsampledLaplacian::from_bi_adjacency(&g.bi_adjacency(&all).unwrap()).unwrap();
        let l = full_laplacian(&g);
        for i in 0..5 {
            for j in 0..5 {
                assert!((ls.matrix().get(i, j) - l.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn isolate_gives_zero_row() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2)], 4).unwrap();
        let ls = SubsampledLaplacian::from_bi_adjacency(&g.bi_adjacency(&[1]).unwrap()).unwrap();
        assert_eq!(ls.matrix().row(3).0.len(), 0);
        assert!(ls.zero_degree_rows() >= 1);
        let e = embed(&ls, 1, DEFAULT_PINV_TOL).unwrap();
        assert_eq!(e.coords[[3, 0]], 0.0);
        assert_eq!(e.zero_degree_rows, ls.zero_degree_rows());
    }

    #[test]
    fn empty_bi_adjacency_is_degenerate() {
        let g = SparseGraph::empty(4);
        let b = g.bi_adjacency(&[0, 1]).unwrap();
        assert!(matches!(
            SubsampledLaplacian::from_bi_adjacency(&b),
            Err(SscError::Degenerate(_))
        ));
    }

    #[test]
    fn zero_gram_for_zero_matrix() {
        let ls = SubsampledLaplacian::assemble(CsrMatrix::zeros(3, 2), vec![0.0; 3], vec![0.0; 2]);
        assert!(gram(&ls).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn duplicate_columns_zero_trailing_embedding() {
        // leaves of a star share one neighbor, so their columns coincide
        let g = SparseGraph::from_edge_list(&[(0, 1), (0, 2), (0, 3)], 4).unwrap();
        let ls = SubsampledLaplacian::from_bi_adjacency(&g.bi_adjacency(&[1, 2]).unwrap()).unwrap();
        let e = embed(&ls, 2, DEFAULT_PINV_TOL).unwrap();
        assert_eq!(e.rank, 1);
        assert!(e.rank_deficient());
        assert!(e.coords.column(1).iter().all(|&x| x == 0.0));
        let norm: f64 = e.coords.column(0).iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(embed(&ls, 3, DEFAULT_PINV_TOL).is_err());
    }

    #[test]
    fn full_laplacian_small_graphs() {
        let k2 = SparseGraph::from_edge_list(&[(0, 1)], 2).unwrap();
        let l = full_laplacian(&k2).to_dense();
        assert_eq!(l, array![[0.0, 1.0], [1.0, 0.0]]);

        let n = 6;
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        let l = full_laplacian(&SparseGraph::from_edge_list(&pairs, n).unwrap());
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 0.0 } else { 1.0 / (n as f64 - 1.0) };
                assert!((l.get(i, j) - want).abs() < 1e-15);
            }
        }
        assert_eq!(full_laplacian(&SparseGraph::empty(3)).nnz(), 0);
    }

    #[test]
    fn full_embed_identity_and_diagonal() {
        let id = CsrMatrix::from_rows(4, (0..4).map(|i| vec![(i, 1.0)]).collect());
        let e = full_embed(&id, 2, FullSolver::Dense).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let diag = CsrMatrix::from_rows(3, vec![vec![(0, 3.0)], vec![(1, 1.0)], vec![(2, 2.0)]]);
        for solver in [FullSolver::Dense, FullSolver::Lanczos { seed: 1 }] {
            let e = full_embed(&diag, 2, solver).unwrap();
            assert!((e.values[0] - 3.0).abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);
            assert!((e.coords[[0, 0]].abs() - 1.0).abs() < 1e-9);
            assert!((e.coords[[2, 1]].abs() - 1.0).abs() < 1e-9);
        }
        assert!(full_embed(&diag, 4, FullSolver::Dense).is_err());
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(&[0.9, 0.8, 0.75, 0.2, 0.1], 4).unwrap(), 3);
        assert_eq!(select_k(&[1.0, 0.2, 0.19, 0.18], 3).unwrap(), 1);
        // tie -> smallest k
        assert_eq!(select_k(&[1.0, 0.5, 0.0], 2).unwrap(), 1);
        assert!(select_k(&[1.0], 1).is_err());
        assert!(select_k(&[1.0, 0.5], 2).is_err());
        assert_eq!(default_k_max(200), 50);
        assert_eq!(default_k_max(4), 3);
    }

    #[test]
    fn alignment_distances() {
        let a = array![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        // rotate by 90 degrees and flip a sign: same subspace
        let b = array![[0.0, -1.0], [1.0, 0.0], [0.0, 0.0]];
        assert!(projection_distance(a.view(), b.view()) < 1e-12);
        assert!(procrustes_distance(a.view(), b.view()).unwrap() < 1e-7);
        let c = array![[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]];
        assert!((projection_distance(a.view(), c.view()) - 2f64.sqrt()).abs() < 1e-12);
        assert!((procrustes_distance(a.view(), c.view()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }
}
