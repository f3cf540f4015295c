//! Similarity-matrix construction, graph Laplacians, connectivity, and
//! Ky Fan values (sums of smallest Laplacian eigenvalues).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Edges below this averaged weight are treated as absent when counting
/// connected components. Solver rows are simplex-projected, so true zeros
/// are exact; the threshold only has to absorb eigen-step dust.
pub const DEFAULT_EDGE_EPS: f64 = 1e-8;

/// Default neighbor count for [`build_knn_similarity`].
pub const DEFAULT_KNN: usize = 20;

/// A square nonnegative affinity matrix over `n` samples.
///
/// `row_stochastic` is detected at construction: every row sums to 1
/// within `1e-8`.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    data: DMatrix<f64>,
    row_stochastic: bool,
}

impl SimilarityMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (n, m) = data.shape();
        if n != m {
            return Err(Error::invalid(format!(
                "similarity matrix is not square: {n}x{m}"
            )));
        }
        if n == 0 {
            return Err(Error::invalid("similarity matrix must be nonempty"));
        }
        if data.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid(
                "similarity entries must be finite and nonnegative",
            ));
        }
        let row_stochastic = (0..n).all(|i| (data.row(i).sum() - 1.0).abs() <= 1e-8);
        Ok(Self {
            data,
            row_stochastic,
        })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.data
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.row_stochastic
    }

    /// `L = D - (S + S^T)/2` with `D` the diagonal of symmetrized degrees.
    pub fn laplacian(&self) -> LaplacianMatrix {
        LaplacianMatrix::from_affinity(&self.data)
    }
}

/// Symmetric positive-semidefinite graph Laplacian with zero row sums.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    data: DMatrix<f64>,
}

impl LaplacianMatrix {
    fn from_affinity(s: &DMatrix<f64>) -> Self {
        let n = s.nrows();
        let w = (s + s.transpose()) * 0.5;
        let mut l = -&w;
        for i in 0..n {
            // D_ii - w_ii: the self-loop cancels, rows sum to zero.
            let off_degree: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
            l[(i, i)] = off_degree;
        }
        Self { data: l }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }
}

/// Laplacian of an arbitrary nonnegative square affinity matrix.
pub fn laplacian(s: &DMatrix<f64>) -> Result<LaplacianMatrix> {
    let (n, m) = s.shape();
    if n != m {
        return Err(Error::invalid(format!("affinity is not square: {n}x{m}")));
    }
    if s.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid(
            "affinity entries must be finite and nonnegative",
        ));
    }
    Ok(LaplacianMatrix::from_affinity(s))
}

/// Row-stochastic k-nearest-neighbor similarity graph from features.
///
/// For sample `i` with squared Euclidean distances `d_ij` sorted
/// ascending over the other samples, the k nearest receive
///
/// ```text
/// s_ij = (d_next - d_ij) / (k * d_next - Σ_{j' in kNN} d_ij')
/// ```
///
/// where `d_next` is the distance to the (k+1)-th neighbor; everything
/// else (including the diagonal) is zero, and each row sums to 1. When
/// duplicates make the denominator vanish, the row falls back to uniform
/// `1/k` weights on the k nearest.
pub fn build_knn_similarity(x: &DMatrix<f64>, k: usize) -> Result<SimilarityMatrix> {
    let n = x.nrows();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("features must be finite"));
    }
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "neighbor count k={k} must satisfy 1 <= k < n={n}"
        )));
    }

    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dists.clear();
        let xi = x.row(i);
        for j in 0..n {
            if j == i {
                continue;
            }
            let d: f64 = xi
                .iter()
                .zip(x.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dists.push((d, j));
        }
        dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));

        // With k = n-1 there is no (k+1)-th neighbor; the farthest of the
        // k nearest stands in (its own weight becomes zero).
        let d_next = dists[k.min(n - 2)].0;
        let near_sum: f64 = dists[..k].iter().map(|(d, _)| d).sum();
        let denom = k as f64 * d_next - near_sum;
        if denom > 1e-12 * d_next.max(1.0) {
            for &(d, j) in &dists[..k] {
                s[(i, j)] = (d_next - d) / denom;
            }
        } else {
            for &(_, j) in &dists[..k] {
                s[(i, j)] = 1.0 / k as f64;
            }
        }
    }
    SimilarityMatrix::new(s)
}

/// Connected components of the undirected graph with an edge `(i, j)`
/// whenever `(s_ij + s_ji)/2 > edge_eps`.
///
/// Returns the component count and per-sample component ids, numbered
/// `0..count` in order of first appearance.
pub fn connected_components(s: &SimilarityMatrix, edge_eps: f64) -> (usize, Vec<usize>) {
    let n = s.n();
    let data = s.data();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if (data[(i, j)] + data[(j, i)]) * 0.5 > edge_eps {
                uf.union(i, j);
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut labels = vec![0usize; n];
    let mut count = 0;
    for i in 0..n {
        let root = uf.find(i);
        if ids[root] == usize::MAX {
            ids[root] = count;
            count += 1;
        }
        labels[i] = ids[root];
    }
    (count, labels)
}

/// Sum of the `c` smallest eigenvalues of a Laplacian; equals
/// `min Tr(F^T L F)` over column-orthonormal `F` with `c` columns.
pub fn kyfan_value(l: &LaplacianMatrix, c: usize) -> Result<f64> {
    let (vals, _) = linalg::smallest_eigenpairs(l.data(), c)?;
    Ok(vals.iter().sum::<f64>().max(0.0))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn laplacian_of_zero_matrix_is_zero() {
        let l = laplacian(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(l.data().norm(), 0.0);
    }

    #[test]
    fn laplacian_of_single_edge() {
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let l = laplacian(&s).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!((l.data() - expected).norm() < 1e-12);
    }

    #[test]
    fn laplacian_symmetrizes_asymmetric_input() {
        // Hand evaluation: W = (S + S^T)/2 = [[0, 0.5], [0.5, 0]].
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let l = laplacian(&s).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((l.data() - expected).norm() < 1e-12);
    }

    #[test]
    fn laplacian_rejects_negative_entries() {
        let s = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(laplacian(&s).is_err());
    }

    #[test]
    fn laplacian_rows_sum_to_zero_and_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = DMatrix::from_fn(8, 8, |_, _| rng.random::<f64>());
        let l = laplacian(&s).unwrap();
        for i in 0..8 {
            assert_close(l.data().row(i).sum(), 0.0, 1e-8);
        }
        let asym = (l.data() - l.data().transpose()).norm();
        assert!(asym < 1e-10);
        let vals = crate::linalg::symmetric_eigenvalues(l.data()).unwrap();
        assert!(vals[0] >= -1e-8);
    }

    #[test]
    fn knn_three_equidistant_points() {
        // Equilateral triangle: symmetry forces uniform weights.
        let x = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.5, 0.75f64.sqrt()]);
        let s = build_knn_similarity(&x, 2).unwrap();
        for i in 0..3 {
            assert_eq!(s.data()[(i, i)], 0.0);
            for j in 0..3 {
                if i != j {
                    assert_close(s.data()[(i, j)], 0.5, 1e-12);
                }
            }
        }
    }

    #[test]
    fn knn_two_far_pairs() {
        let x = DMatrix::from_row_slice(4, 1, &[0.0, 0.1, 100.0, 100.1]);
        let s = build_knn_similarity(&x, 1).unwrap();
        assert_close(s.data()[(0, 1)], 1.0, 1e-12);
        assert_close(s.data()[(1, 0)], 1.0, 1e-12);
        assert_close(s.data()[(2, 3)], 1.0, 1e-12);
        assert_close(s.data()[(3, 2)], 1.0, 1e-12);
    }

    #[test]
    fn knn_matches_closed_form_on_random_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = DMatrix::from_fn(10, 3, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let k = 3;
        let s = build_knn_similarity(&x, k).unwrap();
        assert!(s.is_row_stochastic());
        for i in 0..10 {
            // Direct evaluation of the closed form for row i.
            let mut d: Vec<(f64, usize)> = (0..10)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = x.row(i) - x.row(j);
                    (diff.norm_squared(), j)
                })
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let d_next = d[k].0;
            let near_sum: f64 = d[..k].iter().map(|(v, _)| v).sum();
            let denom = k as f64 * d_next - near_sum;
            let row = s.data().row(i);
            assert_eq!(row.iter().filter(|v| **v > 0.0).count(), k);
            assert_close(row.sum(), 1.0, 1e-9);
            let mut prev_weight = f64::INFINITY;
            for &(dist, j) in &d[..k] {
                let expected = (d_next - dist) / denom;
                assert_close(row[j], expected, 1e-12);
                // Weights decrease with distance.
                assert!(row[j] <= prev_weight + 1e-12);
                prev_weight = row[j];
            }
        }
    }

    #[test]
    fn knn_duplicate_points_fall_back_to_uniform() {
        let x = DMatrix::from_row_slice(4, 1, &[0.0, 0.0, 0.0, 0.0]);
        let s = build_knn_similarity(&x, 2).unwrap();
        for i in 0..4 {
            assert_close(s.data().row(i).sum(), 1.0, 1e-12);
            assert_eq!(s.data().row(i).iter().filter(|v| **v > 0.0).count(), 2);
            for j in 0..4 {
                if s.data()[(i, j)] > 0.0 {
                    assert_close(s.data()[(i, j)], 0.5, 1e-12);
                }
            }
        }
    }

    #[test]
    fn knn_rejects_bad_k() {
        let x = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        assert!(build_knn_similarity(&x, 3).is_err());
        assert!(build_knn_similarity(&x, 0).is_err());
    }

    fn block_diagonal(sizes: &[usize]) -> SimilarityMatrix {
        let n: usize = sizes.iter().sum();
        let mut s = DMatrix::zeros(n, n);
        let mut start = 0;
        for &size in sizes {
            for i in start..start + size {
                for j in start..start + size {
                    s[(i, j)] = 1.0 / size as f64;
                }
            }
            start += size;
        }
        SimilarityMatrix::new(s).unwrap()
    }

    #[test]
    fn components_of_block_diagonal() {
        let s = block_diagonal(&[3, 2, 4]);
        let (count, labels) = connected_components(&s, DEFAULT_EDGE_EPS);
        assert_eq!(count, 3);
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn components_of_complete_graph() {
        let n = 5;
        let s = SimilarityMatrix::new(DMatrix::from_element(n, n, 1.0 / n as f64)).unwrap();
        let (count, _) = connected_components(&s, DEFAULT_EDGE_EPS);
        assert_eq!(count, 1);
    }

    #[test]
    fn kyfan_zero_for_c_components() {
        let s = block_diagonal(&[4, 3, 5]);
        let l = s.laplacian();
        assert!(kyfan_value(&l, 3).unwrap() < 1e-7);
    }

    #[test]
    fn kyfan_positive_for_connected_path() {
        let mut s = DMatrix::zeros(4, 4);
        for i in 0..3 {
            s[(i, i + 1)] = 1.0;
            s[(i + 1, i)] = 1.0;
        }
        let l = laplacian(&s).unwrap();
        assert!(kyfan_value(&l, 2).unwrap() > 1e-6);
    }

    #[test]
    fn kyfan_equals_trace_at_eigenvector_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let raw = DMatrix::from_fn(12, 12, |_, _| rng.random::<f64>());
            let s = SimilarityMatrix::new(raw).unwrap();
            let l = s.laplacian();
            let c = 2 + (rng.random::<f64>() * 3.0) as usize;
            let ky = kyfan_value(&l, c).unwrap();
            let (vals, f) = crate::linalg::smallest_eigenpairs(l.data(), c).unwrap();
            let tr = (f.transpose() * l.data() * &f).trace();
            assert_close(ky, tr, 1e-8);
            assert_close(ky, vals.iter().sum::<f64>().max(0.0), 1e-10);
            // Random orthonormal F can only do worse (Ky Fan lower bound).
            let raw = DMatrix::from_fn(12, c, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let qr = raw.qr();
            let q = qr.q();
            let tr_rand = (q.transpose() * l.data() * &q).trace();
            assert!(ky <= tr_rand + 1e-8);
        }
    }

    #[test]
    fn component_count_matches_near_zero_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sizes = [4usize, 5, 3];
        let n: usize = sizes.iter().sum();
        let mut raw = DMatrix::zeros(n, n);
        let mut start = 0;
        for &size in &sizes {
            for i in start..start + size {
                for j in start..start + size {
                    if i != j {
                        raw[(i, j)] = 0.5 + 0.5 * rng.random::<f64>();
                    }
                }
            }
            start += size;
        }
        let s = SimilarityMatrix::new(raw).unwrap();
        let (count, _) = connected_components(&s, DEFAULT_EDGE_EPS);
        let vals = crate::linalg::symmetric_eigenvalues(s.laplacian().data()).unwrap();
        let near_zero = vals.iter().filter(|v| **v < 1e-7).count();
        assert_eq!(count, near_zero);
        assert_eq!(count, 3);
    }
}
