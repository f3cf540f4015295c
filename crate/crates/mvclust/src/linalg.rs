//! Shared numerical kernels: Euclidean projection onto the probability
//! simplex, symmetric eigensolves, and minimum-cost assignment.
//!
//! All functions are pure and safe to call from multiple threads.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` for a vector to count as a simplex point.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// Iteration cap handed to the dense symmetric eigensolver.
const EIGEN_MAX_ITER: usize = 100_000;

/// A point on the probability simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    values: Vec<f64>,
}

impl SimplexPoint {
    /// Validates the simplex invariants (`min >= 0`, `|sum - 1| <= 1e-9`).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("simplex point must have dimension >= 1"));
        }
        if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid(
                "simplex point entries must be finite and nonnegative",
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::invalid(format!(
                "simplex point entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { values })
    }

    /// The uniform point `1/d` in each coordinate.
    pub fn uniform(d: usize) -> Self {
        assert!(d > 0, "uniform simplex point needs d > 0");
        Self {
            values: vec![1.0 / d as f64; d],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Euclidean projection of `v` onto the probability simplex.
///
/// Sort-based threshold rule: the result is `x_i = max(v_i - theta, 0)`
/// with `theta` chosen so the positive part sums to one. Runs in
/// `O(d log d)`.
pub fn project_to_simplex(v: &[f64]) -> Result<SimplexPoint> {
    if v.is_empty() {
        return Err(Error::invalid("cannot project an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("cannot project a non-finite vector"));
    }
    let theta = simplex_threshold(v);
    let x: Vec<f64> = v.iter().map(|&u| (u - theta).max(0.0)).collect();
    SimplexPoint::new(x)
}

/// The threshold `theta` of the simplex projection of `v`.
fn simplex_threshold(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    theta
}

/// The `c` algebraically smallest eigenvalues (ascending) and matching
/// eigenvectors of a symmetric matrix.
///
/// The input is symmetrized as `(A + A^T)/2` before the solve, so mild
/// asymmetry from accumulated round-off is tolerated. Eigenvectors are
/// returned as the columns of an `n x c` matrix and are orthonormal.
/// Ordering among equal eigenvalues follows solver order; callers must
/// only rely on the spanned subspace within a degenerate eigenspace.
pub fn smallest_eigenpairs(a: &DMatrix<f64>, c: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = check_square(a)?;
    if c == 0 || c > n {
        return Err(Error::invalid(format!(
            "requested {c} eigenpairs from a {n}x{n} matrix"
        )));
    }
    let (values, vectors) = symmetric_eigen_all(a)?;
    Ok((
        DVector::from_fn(c, |k, _| values[k]),
        DMatrix::from_fn(n, c, |r, k| vectors[(r, k)]),
    ))
}

/// Full symmetric eigendecomposition, eigenvalues ascending, eigenvectors
/// as matching orthonormal columns.
pub fn symmetric_eigen_all(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = check_square(a)?;
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenConvergence {
            size: n,
            iterations: EIGEN_MAX_ITER,
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });

    let values = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
    let vectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

/// All eigenvalues of a symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = check_square(a)?;
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenConvergence {
            size: n,
            iterations: EIGEN_MAX_ITER,
        })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(DVector::from_vec(vals))
}

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns the permutation `perm` (row `i` matched to column `perm[i]`)
/// minimizing `Σ_i cost[i, perm[i]]`. Hungarian algorithm with potentials,
/// `O(n^3)`.
pub fn optimal_assignment(cost: &DMatrix<f64>) -> Result<Vec<usize>> {
    let n = check_square(cost)?;
    if n == 0 {
        return Ok(Vec::new());
    }

    // 1-indexed potentials; column 0 is the virtual start column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1]; // row matched to each column, 0 = free
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path.
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    Ok(perm)
}

fn check_square(a: &DMatrix<f64>) -> Result<usize> {
    let (n, m) = a.shape();
    if n != m {
        return Err(Error::invalid(format!("matrix is not square: {n}x{m}")));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(n)
}
