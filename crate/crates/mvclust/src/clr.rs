//! Constrained-Laplacian-rank graph learning: fit a row-stochastic
//! similarity matrix `S` to one or more input affinity matrices subject
//! to `rank(L_S) = N - C`, which forces `S` to have exactly `C` connected
//! components. The components are the clusters; no rounding step is
//! needed.
//!
//! The rank constraint is handled through a penalty `2λ Σ_{k<=C} ρ_k(L_S)`
//! on the `C` smallest Laplacian eigenvalues. By the Ky Fan theorem that
//! sum equals `min_F Tr(F^T L_S F)` over column-orthonormal `F`, so the
//! per-λ subproblem alternates
//!
//! 1. `F` <- the `C` smallest eigenvectors of `L_S`,
//! 2. each row `s_i` <- the simplex projection of
//!    `(Σ_v α_v a_i^{(v)} - (λ/2) v_i) / Σ_v α_v`, where
//!    `v_ij = ||f_i - f_j||²`, restricted to the `t` best-supported
//!    entries.
//!
//! λ itself is adapted by doubling/halving until exactly `C` Laplacian
//! eigenvalues vanish and union-find agrees on the component count.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{self, SimilarityMatrix};
use crate::linalg;
use crate::weights::{
    run_alternating, AlternatingConfig, WeightScheme, WeightVector, WeightedLearner,
};

/// Solver knobs. `t` is the per-row support size; the eigenvalue-zero
/// test is relative to the largest Laplacian eigenvalue.
#[derive(Debug, Clone)]
pub struct ClrConfig {
    pub clusters: usize,
    /// Initial rank penalty; defaults to `mean_v ||A_v||_F² / N`.
    pub lambda0: Option<f64>,
    pub t: usize,
    pub max_inner: usize,
    pub inner_tol: f64,
    pub zero_eig_rel_tol: f64,
    pub adapt_budget: usize,
    pub edge_eps: f64,
    /// Keep the learned graph hollow (`s_ii = 0`). Self-loops never enter
    /// the Laplacian, so allowing them only diverts row mass from real
    /// neighbors.
    pub exclude_diagonal: bool,
}

impl ClrConfig {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            lambda0: None,
            t: 10,
            max_inner: 100,
            inner_tol: 1e-6,
            zero_eig_rel_tol: 1e-8,
            adapt_budget: 30,
            edge_eps: graph::DEFAULT_EDGE_EPS,
            exclude_diagonal: false,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.clusters < 2 || self.clusters > n {
            return Err(Error::invalid(format!(
                "cluster count {} not in [2, {n}]",
                self.clusters
            )));
        }
        if self.t == 0 {
            return Err(Error::invalid("row support size t must be >= 1"));
        }
        if self.max_inner == 0 {
            return Err(Error::invalid("max_inner must be >= 1"));
        }
        if let Some(l) = self.lambda0 {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("lambda0={l} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Converged solver state: the learned graph, the spectral embedding it
/// was solved against, the final rank penalty, and the component count.
#[derive(Debug, Clone)]
pub struct ClrState {
    pub s: SimilarityMatrix,
    pub embedding: DMatrix<f64>,
    pub lambda: f64,
    pub components: usize,
}

/// Dual witness that the rank constraint holds: the spectral side
/// (exactly `C` near-zero Laplacian eigenvalues) and the combinatorial
/// side (union-find component count) must agree.
#[derive(Debug, Clone)]
pub struct RankCertificate {
    pub zero_eigenvalues: usize,
    pub cth_eigenvalue: f64,
    /// The (C+1)-th smallest eigenvalue; infinite when `C = N`.
    pub next_eigenvalue: f64,
    pub eigenvalue_tol: f64,
    pub components: usize,
}

impl RankCertificate {
    pub fn satisfied(&self, clusters: usize) -> bool {
        self.zero_eigenvalues == clusters && self.components == clusters
    }
}

/// Evaluates the rank certificate for a learned graph.
pub fn rank_certificate(
    s: &SimilarityMatrix,
    clusters: usize,
    zero_eig_rel_tol: f64,
    edge_eps: f64,
) -> Result<RankCertificate> {
    let n = s.n();
    if clusters == 0 || clusters > n {
        return Err(Error::invalid(format!(
            "cluster count {clusters} not in [1, {n}]"
        )));
    }
    let vals = linalg::symmetric_eigenvalues(s.laplacian().data())?;
    let lambda_max = vals[n - 1].max(0.0);
    let tol = zero_eig_rel_tol * lambda_max.max(f64::MIN_POSITIVE);
    let zero_eigenvalues = vals.iter().filter(|v| **v < tol).count();
    let (components, _) = graph::connected_components(s, edge_eps);
    Ok(RankCertificate {
        zero_eigenvalues,
        cth_eigenvalue: vals[clusters - 1],
        next_eigenvalue: if clusters < n {
            vals[clusters]
        } else {
            f64::INFINITY
        },
        eigenvalue_tol: tol,
        components,
    })
}

/// One row update of the graph-fitting subproblem: the simplex projection
/// of `(Σ_v α_v a_i^{(v)} - (λ/2) v_i) / Σ_v α_v` restricted to `support`;
/// entries off the support are zero.
pub fn update_row(
    a_rows: &[&[f64]],
    alpha: &[f64],
    v_row: &[f64],
    lambda: f64,
    support: &[usize],
) -> Result<Vec<f64>> {
    let n = v_row.len();
    if a_rows.len() != alpha.len() || a_rows.is_empty() {
        return Err(Error::invalid("need one input row per weight"));
    }
    if a_rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("row length mismatch"));
    }
    if support.is_empty() || support.iter().any(|&j| j >= n) {
        return Err(Error::invalid("support must be nonempty and in range"));
    }
    let total: f64 = alpha.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("weights must sum to a positive value"));
    }

    let restricted: Vec<f64> = support
        .iter()
        .map(|&j| {
            let combined: f64 = a_rows.iter().zip(alpha).map(|(row, a)| a * row[j]).sum();
            (combined - 0.5 * lambda * v_row[j]) / total
        })
        .collect();
    let projected = linalg::project_to_simplex(&restricted)?;

    let mut out = vec![0.0; n];
    for (&j, &value) in support.iter().zip(projected.values()) {
        out[j] = value;
    }
    Ok(out)
}

/// Indices of the `t` largest entries (unordered), optionally skipping
/// one index.
fn top_t_indices(values: &[f64], t: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len())
        .filter(|&j| Some(j) != exclude)
        .collect();
    let t = t.min(idx.len());
    if t < idx.len() {
        idx.select_nth_unstable_by(t - 1, |&a, &b| {
            values[b].partial_cmp(&values[a]).expect("finite targets")
        });
        idx.truncate(t);
    }
    idx
}

fn laplacian_data(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let w = (s + s.transpose()) * 0.5;
    let mut l = -&w;
    for i in 0..n {
        let off_degree: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        l[(i, i)] = off_degree;
    }
    l
}

fn weighted_frobenius(views: &[SimilarityMatrix], alpha: &[f64], s: &DMatrix<f64>) -> f64 {
    views
        .iter()
        .zip(alpha)
        .map(|(a, w)| w * (s - a.data()).norm_squared())
        .sum()
}

/// One pass of row updates at fixed `F` (given as its `n x n` Gram
/// matrix) and `λ`.
fn s_step(
    s: &mut DMatrix<f64>,
    abar: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    lambda: f64,
    t: usize,
    exclude_diagonal: bool,
    target: &mut [f64],
) -> Result<()> {
    let n = s.nrows();
    for i in 0..n {
        let g_ii = gram[(i, i)];
        for j in 0..n {
            // v_ij = ||f_i - f_j||² through the Gram matrix.
            let v_ij = (g_ii + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0);
            target[j] = abar[(i, j)] - 0.5 * lambda * v_ij;
        }
        let exclude = (exclude_diagonal && n > 1).then_some(i);
        let support = top_t_indices(target, t, exclude);
        let restricted: Vec<f64> = support.iter().map(|&j| target[j]).collect();
        let projected = linalg::project_to_simplex(&restricted)?;
        for j in 0..n {
            s[(i, j)] = 0.0;
        }
        for (&j, &value) in support.iter().zip(projected.values()) {
            s[(i, j)] = value;
        }
    }
    Ok(())
}

/// Solves the weighted graph-fitting subproblem
/// `min_S Σ_v α_v ||S - A^{(v)}||_F²` under the exact-`C`-components
/// constraint, warm-starting from `warm` when given.
///
/// Weights are normalized internally, so the solution is invariant to
/// positive rescaling of `alpha`. The rank penalty λ co-evolves with the
/// iterates: after every (F-step, S-step) pass it is doubled while fewer
/// than `C` Laplacian eigenvalues vanish and halved while more do, so the
/// collapse to `C` components happens at the smallest effective penalty
/// instead of hardening early structure at a fully converged small λ.
pub fn clr_weighted_subproblem(
    views: &[SimilarityMatrix],
    alpha: &[f64],
    cfg: &ClrConfig,
    warm: Option<&ClrState>,
) -> Result<ClrState> {
    let n = check_views(views)?;
    cfg.validate(n)?;
    if alpha.len() != views.len() {
        return Err(Error::invalid("need one weight per view"));
    }
    if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = alpha.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("weights must not all be zero"));
    }
    let alpha: Vec<f64> = alpha.iter().map(|a| a / total).collect();

    let mut abar = DMatrix::<f64>::zeros(n, n);
    for (view, w) in views.iter().zip(&alpha) {
        abar += view.data() * *w;
    }

    let mut s = match warm {
        Some(state) => state.s.data().clone(),
        None => abar.clone(),
    };
    // λ restarts low on every solve, even from a warm state: at a small
    // penalty the collapsed graph re-expands toward the re-weighted
    // combination, so the partition can renegotiate under the new weights
    // instead of staying frozen at the first collapse.
    let mut lambda = cfg.lambda0.unwrap_or_else(|| {
        views.iter().map(|a| a.data().norm_squared()).sum::<f64>()
            / (views.len() as f64 * n as f64)
    });

    let c = cfg.clusters;
    let t = cfg.t.min(n);
    let mut target = vec![0.0; n];
    let mut adaptations = 0usize;
    let mut last_components = 0usize;

    for iteration in 0..cfg.max_inner {
        let lap = laplacian_data(&s);
        let (vals, vecs) = linalg::symmetric_eigen_all(&lap)?;
        let tol = cfg.zero_eig_rel_tol * vals[n - 1].max(f64::MIN_POSITIVE);
        let zeros = vals.iter().filter(|v| **v < tol).count();

        // Certify / adapt only once the row updates have reacted to the
        // current weights at least once.
        if iteration > 0 {
            if zeros == c {
                let learned = SimilarityMatrix::new(s.clone())?;
                let (components, _) = graph::connected_components(&learned, cfg.edge_eps);
                last_components = components;
                if components == c {
                    let embedding = DMatrix::from_fn(n, c, |r, k| vecs[(r, k)]);
                    let solved = ClrState {
                        s: learned,
                        embedding,
                        lambda,
                        components,
                    };
                    // Renegotiating the partition from a low λ can land in
                    // a worse basin for the current weights; the warm
                    // state stays feasible, so returning the better of
                    // the two keeps the outer objective monotone.
                    if let Some(prev) = warm {
                        if weighted_frobenius(views, &alpha, prev.s.data())
                            < weighted_frobenius(views, &alpha, solved.s.data())
                        {
                            return Ok(prev.clone());
                        }
                    }
                    return Ok(solved);
                }
                // Spectral and combinatorial certificates disagree; nudge
                // λ toward the combinatorial count.
                if components < c {
                    lambda *= 2.0;
                } else {
                    lambda /= 2.0;
                }
                adaptations += 1;
            } else {
                last_components = zeros;
                if zeros < c {
                    lambda *= 2.0;
                } else {
                    lambda /= 2.0;
                }
                adaptations += 1;
            }
            if adaptations > cfg.adapt_budget {
                break;
            }
        }

        let f = DMatrix::from_fn(n, c, |r, k| vecs[(r, k)]);
        let gram = &f * f.transpose();
        s_step(
            &mut s,
            &abar,
            &gram,
            lambda,
            t,
            cfg.exclude_diagonal,
            &mut target,
        )?;
    }
    Err(Error::RankConstraint {
        found: last_components,
        target: c,
        adaptations,
    })
}

fn check_views(views: &[SimilarityMatrix]) -> Result<usize> {
    let first = views
        .first()
        .ok_or_else(|| Error::invalid("need at least one view"))?;
    let n = first.n();
    if views.iter().any(|v| v.n() != n) {
        return Err(Error::invalid("views must share the same sample count"));
    }
    Ok(n)
}

/// Single-view result: the learned graph plus component labels.
#[derive(Debug, Clone)]
pub struct ClrResult {
    pub state: ClrState,
    pub labels: Vec<usize>,
    pub certificate: RankCertificate,
}

/// Fits one input affinity matrix under the exact-`C`-components
/// constraint and reads the clustering off the components.
pub fn clr_single(a: &SimilarityMatrix, cfg: &ClrConfig) -> Result<ClrResult> {
    let state = clr_weighted_subproblem(std::slice::from_ref(a), &[1.0], cfg, None)?;
    let certificate = rank_certificate(&state.s, cfg.clusters, cfg.zero_eig_rel_tol, cfg.edge_eps)?;
    let (_, labels) = graph::connected_components(&state.s, cfg.edge_eps);
    Ok(ClrResult {
        state,
        labels,
        certificate,
    })
}

/// The multi-view graph learner driven by [`run_alternating`]: per-view
/// loss `Φ_v(S) = ||S - A^{(v)}||_F²`, weighted solve =
/// [`clr_weighted_subproblem`] warm-started from the previous outer
/// iteration.
pub struct ClrLearner<'a> {
    views: &'a [SimilarityMatrix],
    cfg: &'a ClrConfig,
}

impl<'a> ClrLearner<'a> {
    pub fn new(views: &'a [SimilarityMatrix], cfg: &'a ClrConfig) -> Self {
        Self { views, cfg }
    }
}

impl WeightedLearner for ClrLearner<'_> {
    type State = ClrState;

    fn view_count(&self) -> usize {
        self.views.len()
    }

    fn solve_weighted(&mut self, alpha: &[f64], warm: Option<&ClrState>) -> Result<ClrState> {
        clr_weighted_subproblem(self.views, alpha, self.cfg, warm)
    }

    fn per_view_losses(&self, state: &ClrState) -> Vec<f64> {
        self.views
            .iter()
            .map(|a| (state.s.data() - a.data()).norm_squared())
            .collect()
    }
}

/// Multi-view result: learned graph, labels, reporting weights, and the
/// outer objective trace.
#[derive(Debug, Clone)]
pub struct ClrMultiviewResult {
    pub state: ClrState,
    pub labels: Vec<usize>,
    /// Final weights normalized onto the simplex.
    pub weights: WeightVector,
    pub trace: Vec<f64>,
    pub weight_history: Vec<Vec<f64>>,
    pub iterations: usize,
    pub degenerate: bool,
    pub descent_warning: bool,
    pub certificate: RankCertificate,
}

/// Joint multi-view clustering under any weight scheme: alternates the
/// weighted graph fit with the scheme's weight update until the scheme
/// objective stalls.
pub fn clr_multiview(
    views: &[SimilarityMatrix],
    scheme: &WeightScheme,
    cfg: &ClrConfig,
    alt_cfg: &AlternatingConfig,
) -> Result<ClrMultiviewResult> {
    check_views(views)?;
    let mut learner = ClrLearner::new(views, cfg);
    let outcome = run_alternating(&mut learner, scheme, alt_cfg)?;
    let state = outcome.state;
    let certificate = rank_certificate(&state.s, cfg.clusters, cfg.zero_eig_rel_tol, cfg.edge_eps)?;
    let (_, labels) = graph::connected_components(&state.s, cfg.edge_eps);
    Ok(ClrMultiviewResult {
        state,
        labels,
        weights: outcome.weights.normalized(),
        trace: outcome.trace,
        weight_history: outcome.weight_history,
        iterations: outcome.iterations,
        degenerate: outcome.degenerate,
        descent_warning: outcome.descent_warning,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Row-stochastic matrix with `sizes.len()` noisy diagonal blocks.
    fn noisy_block_graph(sizes: &[usize], noise: f64, rng: &mut ChaCha8Rng) -> SimilarityMatrix {
        let n: usize = sizes.iter().sum();
        let mut block_of = vec![0usize; n];
        let mut start = 0;
        for (b, &size) in sizes.iter().enumerate() {
            for i in start..start + size {
                block_of[i] = b;
            }
            start += size;
        }
        let mut data = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let upper = if block_of[i] == block_of[j] { 1.0 } else { noise };
                data[(i, j)] = rng.random::<f64>() * upper;
            }
        }
        for i in 0..n {
            let sum = data.row(i).sum();
            for j in 0..n {
                data[(i, j)] /= sum;
            }
        }
        SimilarityMatrix::new(data).unwrap()
    }

    fn random_row_stochastic(n: usize, rng: &mut ChaCha8Rng) -> SimilarityMatrix {
        let mut data = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random::<f64>());
        for i in 0..n {
            let sum = data.row(i).sum();
            for j in 0..n {
                data[(i, j)] /= sum;
            }
        }
        SimilarityMatrix::new(data).unwrap()
    }

    #[test]
    fn update_row_identity_when_penalty_free() {
        // One view, λ = 0, input row already on the simplex, full support:
        // projecting a simplex point is the identity.
        let a_row = [0.2, 0.5, 0.3, 0.0];
        let v_row = [0.0, 1.0, 2.0, 3.0];
        let support = [0usize, 1, 2, 3];
        let out = update_row(&[&a_row], &[1.0], &v_row, 0.0, &support).unwrap();
        for (got, want) in out.iter().zip(a_row) {
            assert_close(*got, want, 1e-12);
        }
    }

    #[test]
    fn update_row_large_lambda_concentrates_on_smallest_distance() {
        let a_row = [0.25, 0.25, 0.25, 0.25];
        let v_row = [3.0, 0.5, 2.0, 4.0];
        let support = [0usize, 1, 2, 3];
        let out = update_row(&[&a_row], &[1.0], &v_row, 1e6, &support).unwrap();
        assert_close(out[1], 1.0, 1e-9);
        assert_close(out[0] + out[2] + out[3], 0.0, 1e-9);
    }

    #[test]
    fn update_row_zeroes_off_support() {
        let a_row = [0.4, 0.3, 0.2, 0.1];
        let v_row = [0.0; 4];
        let out = update_row(&[&a_row], &[2.0], &v_row, 0.1, &[1, 3]).unwrap();
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 0.0);
        assert_close(out[1] + out[3], 1.0, 1e-12);
    }

    #[test]
    fn update_row_matches_grid_oracle() {
        // Brute-force minimization of
        //   Σ_j Σ_v α_v (s_j - a_j^{(v)})² + λ Σ_j v_j s_j
        // over a fine simplex grid on a 4-entry support.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let k = 60usize;
        for _ in 0..20 {
            let m = 1 + (rng.random::<f64>() * 2.0) as usize;
            let n = 6;
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
                .collect();
            let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let alpha: Vec<f64> = (0..m).map(|_| 0.2 + rng.random::<f64>()).collect();
            let v_row: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
            let lambda = rng.random::<f64>() * 2.0;
            let support = [0usize, 2, 3, 5];

            let got = update_row(&row_refs, &alpha, &v_row, lambda, &support).unwrap();

            let objective = |s: &[f64; 4]| -> f64 {
                let mut total = 0.0;
                for (si, &j) in s.iter().zip(&support) {
                    for (row, a) in rows.iter().zip(&alpha) {
                        total += a * (si - row[j]) * (si - row[j]);
                    }
                    total += lambda * v_row[j] * si;
                }
                total
            };
            let mut best = ([0.0f64; 4], f64::INFINITY);
            for i in 0..=k {
                for j in 0..=(k - i) {
                    for l in 0..=(k - i - j) {
                        let s = [
                            i as f64 / k as f64,
                            j as f64 / k as f64,
                            l as f64 / k as f64,
                            (k - i - j - l) as f64 / k as f64,
                        ];
                        let val = objective(&s);
                        if val < best.1 {
                            best = (s, val);
                        }
                    }
                }
            }
            for (idx, &j) in support.iter().enumerate() {
                assert_close(got[j], best.0[idx], 1.0 / k as f64);
            }
        }
    }

    #[test]
    fn inner_objective_is_non_increasing_at_fixed_lambda() {
        // The penalized objective Σ_v α_v||S - A_v||² + 2λ Tr(F^T L_S F)
        // must not rise across any (F-step, S-step) pair.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..8 {
            let n = 16;
            let views: Vec<SimilarityMatrix> = (0..2)
                .map(|_| random_row_stochastic(n, &mut rng))
                .collect();
            let alpha = [0.6, 0.4];
            let mut abar = DMatrix::<f64>::zeros(n, n);
            for (v, w) in views.iter().zip(&alpha) {
                abar += v.data() * *w;
            }
            let mut s = abar.clone();
            let lambda = 0.05 * (trial as f64 + 1.0);
            let (t, c) = (6, 3);
            let mut target = vec![0.0; n];
            let mut prev = f64::INFINITY;
            for _ in 0..15 {
                let lap = laplacian_data(&s);
                let (_, f) = crate::linalg::smallest_eigenpairs(&lap, c).unwrap();
                let gram = &f * f.transpose();
                s_step(&mut s, &abar, &gram, lambda, t, false, &mut target).unwrap();
                let penalty = (f.transpose() * laplacian_data(&s) * &f).trace();
                let obj = weighted_frobenius(&views, &alpha, &s) + 2.0 * lambda * penalty;
                assert!(
                    obj <= prev + 1e-8 * prev.abs().max(1.0),
                    "inner objective rose: {prev} -> {obj}"
                );
                prev = obj;
            }
        }
    }

    #[test]
    fn clr_single_keeps_already_feasible_input() {
        // Block-diagonal row-stochastic input with exactly C components is
        // the global optimum: the solver must return it unchanged.
        let mut data = DMatrix::<f64>::zeros(6, 6);
        for b in 0..3 {
            for i in (2 * b)..(2 * b + 2) {
                for j in (2 * b)..(2 * b + 2) {
                    data[(i, j)] = 0.5;
                }
            }
        }
        let a = SimilarityMatrix::new(data.clone()).unwrap();
        let mut cfg = ClrConfig::new(3);
        cfg.t = 6;
        let result = clr_single(&a, &cfg).unwrap();
        assert!((result.state.s.data() - &data).norm() < 1e-9);
        assert_eq!(result.state.components, 3);
        assert_eq!(result.labels, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn clr_single_separates_two_clean_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = noisy_block_graph(&[8, 8], 0.05, &mut rng);
        let cfg = ClrConfig::new(2);
        let result = clr_single(&a, &cfg).unwrap();
        assert_eq!(result.state.components, 2);
        let expected: Vec<usize> = (0..16).map(|i| i / 8).collect();
        assert_eq!(result.labels, expected);
        assert!(result.certificate.satisfied(2));
        assert!(result.certificate.cth_eigenvalue < result.certificate.eigenvalue_tol);
        assert!(result.certificate.next_eigenvalue >= result.certificate.eigenvalue_tol);
    }

    #[test]
    fn weighted_subproblem_single_view_matches_clr_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = noisy_block_graph(&[7, 7], 0.1, &mut rng);
        let cfg = ClrConfig::new(2);
        let single = clr_single(&a, &cfg).unwrap();
        let sub = clr_weighted_subproblem(std::slice::from_ref(&a), &[1.0], &cfg, None).unwrap();
        assert!((single.state.s.data() - sub.s.data()).norm() < 1e-12);
    }

    #[test]
    fn weighted_subproblem_collapses_identical_views() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = noisy_block_graph(&[6, 6], 0.1, &mut rng);
        let views = vec![a.clone(), a.clone()];
        let cfg = ClrConfig::new(2);
        let single = clr_single(&a, &cfg).unwrap();
        let sub = clr_weighted_subproblem(&views, &[0.3, 0.7], &cfg, None).unwrap();
        assert!((single.state.s.data() - sub.s.data()).norm() < 1e-9);
    }

    #[test]
    fn weighted_subproblem_invariant_to_weight_rescaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let views: Vec<SimilarityMatrix> = vec![
            noisy_block_graph(&[6, 6], 0.15, &mut rng),
            noisy_block_graph(&[6, 6], 0.3, &mut rng),
        ];
        let cfg = ClrConfig::new(2);
        let alpha = [0.7, 0.3];
        let base = clr_weighted_subproblem(&views, &alpha, &cfg, None).unwrap();
        // Power-of-two rescaling is exact in floating point.
        let doubled: Vec<f64> = alpha.iter().map(|a| a * 4.0).collect();
        let scaled = clr_weighted_subproblem(&views, &doubled, &cfg, None).unwrap();
        assert!((base.s.data() - scaled.s.data()).norm() == 0.0);
        let tripled: Vec<f64> = alpha.iter().map(|a| a * 3.0).collect();
        let scaled = clr_weighted_subproblem(&views, &tripled, &cfg, None).unwrap();
        assert!((base.s.data() - scaled.s.data()).norm() < 1e-9);
    }

    #[test]
    fn multiview_intrinsic_recovers_blocks_and_descends() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let views = vec![
            noisy_block_graph(&[10, 10, 10], 0.25, &mut rng),
            noisy_block_graph(&[10, 10, 10], 0.35, &mut rng),
        ];
        let cfg = ClrConfig::new(3);
        let result = clr_multiview(
            &views,
            &WeightScheme::Intrinsic { p: 1.0 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        assert_eq!(result.state.components, 3);
        assert!(result.certificate.satisfied(3));
        assert!(!result.descent_warning);
        for w in result.trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
        }
        let expected: Vec<usize> = (0..30).map(|i| i / 10).collect();
        assert_eq!(result.labels, expected);
        let sum: f64 = result.weights.values().iter().sum();
        assert_close(sum, 1.0, 1e-9);
    }

    #[test]
    fn multiview_identical_views_get_equal_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = noisy_block_graph(&[8, 8], 0.2, &mut rng);
        let views = vec![a.clone(), a];
        let cfg = ClrConfig::new(2);
        let result = clr_multiview(
            &views,
            &WeightScheme::Intrinsic { p: 0.7 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        for history in &result.weight_history {
            assert_close(history[0], 0.5, 1e-12);
            assert_close(history[1], 0.5, 1e-12);
        }
    }

    #[test]
    fn exhausted_budget_reports_rank_constraint_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = random_row_stochastic(12, &mut rng);
        let mut cfg = ClrConfig::new(3);
        // A couple of passes cannot possibly collapse a dense random graph.
        cfg.max_inner = 2;
        cfg.adapt_budget = 1;
        match clr_single(&a, &cfg) {
            Err(crate::Error::RankConstraint { target, .. }) => assert_eq!(target, 3),
            other => panic!("expected rank-constraint failure, got {other:?}"),
        }
    }

    #[test]
    fn multiview_single_view_matches_clr_single_for_any_scheme() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let a = noisy_block_graph(&[6, 6], 0.1, &mut rng);
        let cfg = ClrConfig::new(2);
        let single = clr_single(&a, &cfg).unwrap();
        for scheme in [
            WeightScheme::Intrinsic { p: 0.4 },
            WeightScheme::NormReg { gamma: 10.0 },
            WeightScheme::EntropyReg { gamma: 5.0 },
            WeightScheme::ExponentFlat { gamma: 2.0 },
            WeightScheme::Equal,
        ] {
            let result = clr_multiview(
                std::slice::from_ref(&a),
                &scheme,
                &cfg,
                &AlternatingConfig::default(),
            )
            .unwrap();
            assert_eq!(result.labels, single.labels);
            assert_eq!(result.weights.values(), &[1.0]);
        }
    }
}
