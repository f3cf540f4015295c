//! Spectral-cut and matrix-factorization base learners plugged into the
//! alternating weight driver.
//!
//! - [`sc_multiview`]: the weighted solve takes the `C` smallest
//!   eigenvectors of the combined Laplacian `Σ_v α_v L_v` (ratio cut,
//!   `G^T G = I`) or of its degree-normalized form (normalized cut,
//!   `G^T D G = I`); the per-view loss is `Tr(G^T L_v G)`. The whole
//!   alternation runs on the continuous relaxation; a k-means rounding of
//!   the embedding rows happens once after convergence.
//! - [`nmf_multiview`]: orthogonal nonnegative factorization with a hard
//!   1-of-C indicator `G`. The weighted solve alternates the closed-form
//!   centroid step `F^{(v)} = X^{(v)} G (G^T G)^{-1}` with an exhaustive
//!   per-row search over the `C` one-hot codes; per-view loss
//!   `||X^{(v)T} - G F^{(v)T}||_F²`. Non-convex, so the best of several
//!   random restarts is returned.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{self, SimilarityMatrix};
use crate::linalg;
use crate::weights::{
    run_alternating, AlternatingConfig, WeightScheme, WeightVector, WeightedLearner,
};

/// Orthogonality constraint for the spectral relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    /// `G^T G = I` (ratio cut).
    Ratio,
    /// `G^T D G = I` with `D` the degree matrix of the weighted graph
    /// (normalized cut).
    Normalized,
}

#[derive(Debug, Clone)]
pub struct ScConfig {
    pub clusters: usize,
    pub cut: CutKind,
    pub kmeans_restarts: usize,
    pub seed: u64,
}

impl ScConfig {
    pub fn new(clusters: usize, cut: CutKind) -> Self {
        Self {
            clusters,
            cut,
            kmeans_restarts: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScResult {
    pub labels: Vec<usize>,
    /// Continuous relaxation `G` the losses were evaluated on.
    pub embedding: DMatrix<f64>,
    pub weights: WeightVector,
    pub trace: Vec<f64>,
    pub weight_history: Vec<Vec<f64>>,
    pub iterations: usize,
    pub degenerate: bool,
    pub descent_warning: bool,
    /// Component count of the final weighted graph when it exceeds the
    /// requested cluster count (the embedding is then rank-deficient).
    pub component_warning: Option<usize>,
}

struct ScState {
    embedding: DMatrix<f64>,
}

struct ScLearner<'a> {
    views: &'a [SimilarityMatrix],
    laplacians: Vec<DMatrix<f64>>,
    clusters: usize,
    cut: CutKind,
}

impl<'a> ScLearner<'a> {
    fn new(views: &'a [SimilarityMatrix], clusters: usize, cut: CutKind) -> Self {
        let laplacians = views
            .iter()
            .map(|v| v.laplacian().data().clone())
            .collect();
        Self {
            views,
            laplacians,
            clusters,
            cut,
        }
    }
}

impl WeightedLearner for ScLearner<'_> {
    type State = ScState;

    fn view_count(&self) -> usize {
        self.views.len()
    }

    fn solve_weighted(&mut self, alpha: &[f64], _warm: Option<&ScState>) -> Result<ScState> {
        let total: f64 = alpha.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("weights must not all be zero"));
        }
        let n = self.views[0].n();
        let mut combined = DMatrix::<f64>::zeros(n, n);
        for (lap, a) in self.laplacians.iter().zip(alpha) {
            combined += lap * (a / total);
        }

        let embedding = match self.cut {
            CutKind::Ratio => {
                let (_, g) = linalg::smallest_eigenpairs(&combined, self.clusters)?;
                g
            }
            CutKind::Normalized => {
                let mut inv_sqrt_degree = vec![0.0; n];
                for i in 0..n {
                    let mut degree = 0.0;
                    for (view, a) in self.views.iter().zip(alpha) {
                        let data = view.data();
                        for j in 0..n {
                            degree += (a / total) * 0.5 * (data[(i, j)] + data[(j, i)]);
                        }
                    }
                    if !(degree > 0.0) {
                        return Err(Error::invalid(format!(
                            "normalized cut needs positive degrees; sample {i} is isolated"
                        )));
                    }
                    inv_sqrt_degree[i] = 1.0 / degree.sqrt();
                }
                let normalized = DMatrix::from_fn(n, n, |i, j| {
                    combined[(i, j)] * inv_sqrt_degree[i] * inv_sqrt_degree[j]
                });
                let (_, u) = linalg::smallest_eigenpairs(&normalized, self.clusters)?;
                DMatrix::from_fn(n, self.clusters, |i, k| u[(i, k)] * inv_sqrt_degree[i])
            }
        };
        Ok(ScState { embedding })
    }

    fn per_view_losses(&self, state: &ScState) -> Vec<f64> {
        self.laplacians
            .iter()
            .map(|lap| {
                (state.embedding.transpose() * lap * &state.embedding)
                    .trace()
                    .max(0.0)
            })
            .collect()
    }
}

/// Multi-view spectral clustering under any weight scheme.
pub fn sc_multiview(
    views: &[SimilarityMatrix],
    scheme: &WeightScheme,
    cfg: &ScConfig,
    alt_cfg: &AlternatingConfig,
) -> Result<ScResult> {
    let n = check_graph_views(views)?;
    if cfg.clusters < 2 || cfg.clusters > n {
        return Err(Error::invalid(format!(
            "cluster count {} not in [2, {n}]",
            cfg.clusters
        )));
    }

    let mut learner = ScLearner::new(views, cfg.clusters, cfg.cut);
    let outcome = run_alternating(&mut learner, scheme, alt_cfg)?;

    // Rank-deficiency check on the final weighted graph: more components
    // than clusters leaves the eigenbasis underdetermined.
    let alpha = outcome.weights.normalized();
    let mut union = DMatrix::<f64>::zeros(n, n);
    for (view, a) in views.iter().zip(alpha.values()) {
        union += view.data() * *a;
    }
    let union = SimilarityMatrix::new(union)?;
    let (components, _) = graph::connected_components(&union, 0.0);
    let component_warning = (components > cfg.clusters).then_some(components);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let labels = kmeans_rows(
        &outcome.state.embedding,
        cfg.clusters,
        cfg.kmeans_restarts,
        100,
        &mut rng,
    );

    Ok(ScResult {
        labels,
        embedding: outcome.state.embedding,
        weights: outcome.weights.normalized(),
        trace: outcome.trace,
        weight_history: outcome.weight_history,
        iterations: outcome.iterations,
        degenerate: outcome.degenerate,
        descent_warning: outcome.descent_warning,
        component_warning,
    })
}

fn check_graph_views(views: &[SimilarityMatrix]) -> Result<usize> {
    let first = views
        .first()
        .ok_or_else(|| Error::invalid("need at least one view"))?;
    let n = first.n();
    if views.iter().any(|v| v.n() != n) {
        return Err(Error::invalid("views must share the same sample count"));
    }
    Ok(n)
}

/// A hard 1-of-C assignment stored as labels; rows of the dense form are
/// one-hot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorMatrix {
    labels: Vec<usize>,
    clusters: usize,
}

impl IndicatorMatrix {
    pub fn new(labels: Vec<usize>, clusters: usize) -> Result<Self> {
        if clusters == 0 || labels.is_empty() {
            return Err(Error::invalid("indicator needs samples and clusters"));
        }
        if labels.iter().any(|&l| l >= clusters) {
            return Err(Error::invalid(format!(
                "labels must lie in [0, {clusters})"
            )));
        }
        Ok(Self { labels, clusters })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.labels.len(), self.clusters, |i, c| {
            if self.labels[i] == c {
                1.0
            } else {
                0.0
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct NmfConfig {
    pub clusters: usize,
    pub restarts: usize,
    pub max_inner: usize,
    pub seed: u64,
}

impl NmfConfig {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            restarts: 10,
            max_inner: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NmfResult {
    pub assignment: IndicatorMatrix,
    /// Per-view centroid matrices, `d_v x C`.
    pub centroids: Vec<DMatrix<f64>>,
    pub weights: WeightVector,
    pub trace: Vec<f64>,
    pub weight_history: Vec<Vec<f64>>,
    pub iterations: usize,
    pub degenerate: bool,
    pub descent_warning: bool,
}

#[derive(Debug, Clone)]
struct NmfState {
    labels: Vec<usize>,
    centroids: Vec<DMatrix<f64>>,
}

struct NmfLearner<'a> {
    /// One `d_v x N` matrix per view (samples are columns).
    views: &'a [DMatrix<f64>],
    clusters: usize,
    max_inner: usize,
    rng: ChaCha8Rng,
}

impl WeightedLearner for NmfLearner<'_> {
    type State = NmfState;

    fn view_count(&self) -> usize {
        self.views.len()
    }

    fn solve_weighted(&mut self, alpha: &[f64], warm: Option<&NmfState>) -> Result<NmfState> {
        let total: f64 = alpha.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("weights must not all be zero"));
        }
        let alpha: Vec<f64> = alpha.iter().map(|a| a / total).collect();
        let n = self.views[0].ncols();

        let mut labels = match warm {
            Some(state) => state.labels.clone(),
            None => (0..n)
                .map(|_| self.rng.random_range(0..self.clusters))
                .collect(),
        };

        for _ in 0..self.max_inner {
            let centroids = fit_centroids(self.views, &mut labels, self.clusters, &alpha);
            let changed = assign_labels(self.views, &centroids, &alpha, &mut labels);
            if !changed {
                break;
            }
        }
        // Centroids must stay optimal for the final labels.
        let centroids = fit_centroids(self.views, &mut labels, self.clusters, &alpha);
        Ok(NmfState { labels, centroids })
    }

    fn per_view_losses(&self, state: &NmfState) -> Vec<f64> {
        self.views
            .iter()
            .zip(&state.centroids)
            .map(|(x, f)| {
                let mut total = 0.0;
                for (i, &label) in state.labels.iter().enumerate() {
                    total += column_dist2(x, i, f, label);
                }
                total
            })
            .collect()
    }
}

fn column_dist2(x: &DMatrix<f64>, col: usize, centroids: &DMatrix<f64>, cluster: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..x.nrows() {
        let diff = x[(r, col)] - centroids[(r, cluster)];
        total += diff * diff;
    }
    total
}

/// Per-cluster column means for every view. Empty clusters are repaired
/// first: the point of the largest cluster farthest (in weighted distance)
/// from its centroid is moved into the empty cluster, repeatedly.
fn fit_centroids(
    views: &[DMatrix<f64>],
    labels: &mut [usize],
    clusters: usize,
    alpha: &[f64],
) -> Vec<DMatrix<f64>> {
    loop {
        let mut counts = vec![0usize; clusters];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            break;
        };
        let largest = counts
            .iter()
            .enumerate()
            .max_by_key(|(_, &c)| c)
            .map(|(c, _)| c)
            .expect("nonempty counts");
        // Weighted distance of each member of `largest` to its centroid.
        let members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == largest)
            .map(|(i, _)| i)
            .collect();
        let mut farthest = (members[0], f64::NEG_INFINITY);
        for &i in &members {
            let mut dist = 0.0;
            for (view, a) in views.iter().zip(alpha) {
                let mut within = 0.0;
                for r in 0..view.nrows() {
                    let mean: f64 =
                        members.iter().map(|&m| view[(r, m)]).sum::<f64>() / members.len() as f64;
                    let diff = view[(r, i)] - mean;
                    within += diff * diff;
                }
                dist += a * within;
            }
            if dist > farthest.1 {
                farthest = (i, dist);
            }
        }
        labels[farthest.0] = empty;
    }

    let mut counts = vec![0usize; clusters];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    views
        .iter()
        .map(|x| {
            let mut f = DMatrix::<f64>::zeros(x.nrows(), clusters);
            for (i, &label) in labels.iter().enumerate() {
                for r in 0..x.nrows() {
                    f[(r, label)] += x[(r, i)];
                }
            }
            for c in 0..clusters {
                if counts[c] > 0 {
                    for r in 0..x.nrows() {
                        f[(r, c)] /= counts[c] as f64;
                    }
                }
            }
            f
        })
        .collect()
}

/// Exhaustive 1-of-C row update: each sample moves to the code with the
/// smallest weighted squared distance, keeping its current code on ties.
fn assign_labels(
    views: &[DMatrix<f64>],
    centroids: &[DMatrix<f64>],
    alpha: &[f64],
    labels: &mut [usize],
) -> bool {
    let clusters = centroids[0].ncols();
    let mut changed = false;
    for i in 0..labels.len() {
        let cost = |c: usize| -> f64 {
            views
                .iter()
                .zip(centroids)
                .zip(alpha)
                .map(|((x, f), a)| a * column_dist2(x, i, f, c))
                .sum()
        };
        let mut best = labels[i];
        let mut best_cost = cost(best);
        for c in 0..clusters {
            let candidate = cost(c);
            if candidate < best_cost {
                best = c;
                best_cost = candidate;
            }
        }
        if best != labels[i] {
            labels[i] = best;
            changed = true;
        }
    }
    changed
}

/// Multi-view indicator factorization under any weight scheme; returns
/// the best of `cfg.restarts` random initializations by final scheme
/// objective.
pub fn nmf_multiview(
    views: &[DMatrix<f64>],
    scheme: &WeightScheme,
    cfg: &NmfConfig,
    alt_cfg: &AlternatingConfig,
) -> Result<NmfResult> {
    let first = views
        .first()
        .ok_or_else(|| Error::invalid("need at least one view"))?;
    let n = first.ncols();
    if views.iter().any(|x| x.ncols() != n) {
        return Err(Error::invalid("views must share the same sample count"));
    }
    if views.iter().any(|x| x.nrows() == 0) {
        return Err(Error::invalid("views must have at least one feature"));
    }
    if views.iter().any(|x| x.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("features must be finite"));
    }
    if cfg.clusters < 2 || cfg.clusters > n {
        return Err(Error::invalid(format!(
            "cluster count {} not in [2, {n}]",
            cfg.clusters
        )));
    }

    let mut best: Option<(f64, NmfResult)> = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut learner = NmfLearner {
            views,
            clusters: cfg.clusters,
            max_inner: cfg.max_inner,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64)),
        };
        let outcome = run_alternating(&mut learner, scheme, alt_cfg)?;
        let score = *outcome.trace.last().expect("at least one iteration");
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            let result = NmfResult {
                assignment: IndicatorMatrix::new(outcome.state.labels, cfg.clusters)?,
                centroids: outcome.state.centroids,
                weights: outcome.weights.normalized(),
                trace: outcome.trace,
                weight_history: outcome.weight_history,
                iterations: outcome.iterations,
                degenerate: outcome.degenerate,
                descent_warning: outcome.descent_warning,
            };
            best = Some((score, result));
        }
    }
    Ok(best.expect("at least one restart").1)
}

/// Lloyd's algorithm with greedy (k-means++-style) seeding on the rows of
/// `points`, best inertia over `restarts` runs.
fn kmeans_rows(
    points: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    max_iter: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = points.nrows();
    let d = points.ncols();
    let row = |i: usize| -> Vec<f64> { (0..d).map(|j| points[(i, j)]).collect() };
    let dist2 = |i: usize, center: &[f64]| -> f64 {
        (0..d)
            .map(|j| {
                let diff = points[(i, j)] - center[j];
                diff * diff
            })
            .sum()
    };

    let mut best: (f64, Vec<usize>) = (f64::INFINITY, vec![0; n]);
    for _ in 0..restarts.max(1) {
        let mut centers: Vec<Vec<f64>> = vec![row(rng.random_range(0..n))];
        let mut nearest: Vec<f64> = (0..n).map(|i| dist2(i, &centers[0])).collect();
        while centers.len() < k {
            let total: f64 = nearest.iter().sum();
            let pick = if total > 0.0 {
                let mut target = rng.random::<f64>() * total;
                let mut chosen = n - 1;
                for (i, &w) in nearest.iter().enumerate() {
                    target -= w;
                    if target <= 0.0 {
                        chosen = i;
                        break;
                    }
                }
                chosen
            } else {
                rng.random_range(0..n)
            };
            centers.push(row(pick));
            for i in 0..n {
                let candidate = dist2(i, centers.last().expect("nonempty"));
                if candidate < nearest[i] {
                    nearest[i] = candidate;
                }
            }
        }

        let mut labels = vec![0usize; n];
        for _ in 0..max_iter {
            let mut changed = false;
            for i in 0..n {
                let mut best_c = 0;
                let mut best_d = f64::INFINITY;
                for (c, center) in centers.iter().enumerate() {
                    let dd = dist2(i, center);
                    if dd < best_d {
                        best_d = dd;
                        best_c = c;
                    }
                }
                if labels[i] != best_c {
                    labels[i] = best_c;
                    changed = true;
                }
            }
            let mut counts = vec![0usize; k];
            let mut sums = vec![vec![0.0; d]; k];
            for i in 0..n {
                counts[labels[i]] += 1;
                for j in 0..d {
                    sums[labels[i]][j] += points[(i, j)];
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    for j in 0..d {
                        centers[c][j] = sums[c][j] / counts[c] as f64;
                    }
                }
            }
            // Re-seed empty clusters at the worst-fitted point.
            for c in 0..k {
                if counts[c] == 0 {
                    let far = (0..n)
                        .max_by(|&a, &b| {
                            dist2(a, &centers[labels[a]])
                                .partial_cmp(&dist2(b, &centers[labels[b]]))
                                .expect("finite")
                        })
                        .expect("nonempty points");
                    centers[c] = row(far);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let inertia: f64 = (0..n).map(|i| dist2(i, &centers[labels[i]])).sum();
        if inertia < best.0 {
            best = (inertia, labels);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_two_view_gaussian, TwoViewGaussianConfig};
    use crate::graph::build_knn_similarity;
    use crate::metrics::{acc, ClusterAssignment};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn blob_graph_views(seed: u64, seps: [f64; 2]) -> (Vec<SimilarityMatrix>, ClusterAssignment) {
        let cfg = TwoViewGaussianConfig {
            n_per_cluster: 20,
            clusters: 2,
            separations: seps,
            noise_scales: [1.0, 1.0],
            view_seed_offsets: [0, 1],
        };
        let ds = gen_two_view_gaussian(&cfg, seed).unwrap();
        let views = ds
            .views
            .iter()
            .map(|x| build_knn_similarity(x, 5).unwrap())
            .collect();
        (views, ds.truth.unwrap())
    }

    #[test]
    fn sc_single_view_recovers_separated_blobs() {
        let (views, truth) = blob_graph_views(3, [6.0, 6.0]);
        let cfg = ScConfig::new(2, CutKind::Ratio);
        let result = sc_multiview(
            &views[..1],
            &WeightScheme::Intrinsic { p: 2.0 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        let pred = ClusterAssignment::new(result.labels.clone(), 2).unwrap();
        assert_close(acc(&pred, &truth).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn sc_identical_views_keep_uniform_weights() {
        let (views, _) = blob_graph_views(5, [4.0, 4.0]);
        let pair = vec![views[0].clone(), views[0].clone()];
        for cut in [CutKind::Ratio, CutKind::Normalized] {
            let cfg = ScConfig::new(2, cut);
            let result = sc_multiview(
                &pair,
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
    }

    #[test]
    fn sc_clean_view_outweighs_noisy_view() {
        // Both views carry the same cluster structure; the second is only
        // weakly separated. Judged across seeds since the rounding is
        // randomized.
        let mut weight_ok = 0;
        let mut fusion_ok = 0;
        let seeds = [11u64, 12, 13, 14];
        for &seed in &seeds {
            let (views, truth) = blob_graph_views(seed, [3.0, 1.2]);
            let cfg = ScConfig::new(2, CutKind::Ratio);
            let combined = sc_multiview(
                &views,
                &WeightScheme::Intrinsic { p: 1.0 },
                &cfg,
                &AlternatingConfig::default(),
            )
            .unwrap();
            if combined.weights.values()[0] > combined.weights.values()[1] {
                weight_ok += 1;
            }
            let mut single_best = 0.0f64;
            for view in &views {
                let r = sc_multiview(
                    std::slice::from_ref(view),
                    &WeightScheme::Equal,
                    &cfg,
                    &AlternatingConfig::default(),
                )
                .unwrap();
                let pred = ClusterAssignment::new(r.labels, 2).unwrap();
                single_best = single_best.max(acc(&pred, &truth).unwrap());
            }
            let pred = ClusterAssignment::new(combined.labels.clone(), 2).unwrap();
            if acc(&pred, &truth).unwrap() >= single_best - 0.02 {
                fusion_ok += 1;
            }
        }
        assert!(weight_ok >= 3, "clean view outweighed noisy on {weight_ok}/4 seeds");
        assert!(fusion_ok >= 3, "fusion held up on {fusion_ok}/4 seeds");
    }

    #[test]
    fn sc_trace_descends_and_beats_random_subspaces() {
        use rand::{Rng, SeedableRng};
        let (views, _) = blob_graph_views(7, [3.0, 1.5]);
        let cfg = ScConfig::new(2, CutKind::Ratio);
        let result = sc_multiview(
            &views,
            &WeightScheme::Intrinsic { p: 1.3 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        assert!(!result.descent_warning);
        for w in result.trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
        }
        // Continuous optimality: the eigenvector solution beats random
        // orthonormal bases on the final weighted Laplacian.
        let alpha = result.weights.values();
        let n = views[0].n();
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for (v, a) in views.iter().zip(alpha) {
            lap += v.laplacian().data() * *a;
        }
        let at_solution = (result.embedding.transpose() * &lap * &result.embedding).trace();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let raw = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let q = raw.qr().q();
            let value = (q.transpose() * &lap * &q).trace();
            assert!(at_solution <= value + 1e-8);
        }
    }

    #[test]
    fn sc_rejects_isolated_node_for_normalized_cut() {
        let mut data = DMatrix::<f64>::zeros(4, 4);
        data[(0, 1)] = 1.0;
        data[(1, 0)] = 1.0;
        data[(2, 3)] = 1.0;
        data[(3, 2)] = 1.0;
        // Node 0..3 are fine; add an isolated fifth node.
        let mut padded = DMatrix::<f64>::zeros(5, 5);
        padded.view_mut((0, 0), (4, 4)).copy_from(&data);
        let views = vec![SimilarityMatrix::new(padded).unwrap()];
        let cfg = ScConfig::new(2, CutKind::Normalized);
        let err = sc_multiview(
            &views,
            &WeightScheme::Equal,
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("isolated"));
    }

    fn blob_features(seed: u64, noise: [f64; 2]) -> (Vec<DMatrix<f64>>, ClusterAssignment) {
        let cfg = TwoViewGaussianConfig {
            n_per_cluster: 25,
            clusters: 2,
            separations: [5.0, 5.0],
            noise_scales: noise,
            view_seed_offsets: [0, 1],
        };
        let ds = gen_two_view_gaussian(&cfg, seed).unwrap();
        // The factorization expects samples as columns.
        let views = ds.views.iter().map(|x| x.transpose()).collect();
        (views, ds.truth.unwrap())
    }

    #[test]
    fn nmf_single_view_blobs_reach_full_accuracy() {
        let (views, truth) = blob_features(2, [1.0, 1.0]);
        let cfg = NmfConfig::new(2);
        let result = nmf_multiview(
            &views[..1],
            &WeightScheme::Intrinsic { p: 2.0 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        let pred = ClusterAssignment::new(result.assignment.labels().to_vec(), 2).unwrap();
        assert_close(acc(&pred, &truth).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn centroid_step_computes_cluster_means() {
        let x = DMatrix::from_row_slice(2, 4, &[0.0, 2.0, 10.0, 14.0, 1.0, 3.0, 20.0, 24.0]);
        let mut labels = vec![0usize, 0, 1, 1];
        let centroids = fit_centroids(&[x], &mut labels, 2, &[1.0]);
        let f = &centroids[0];
        assert_close(f[(0, 0)], 1.0, 1e-12);
        assert_close(f[(1, 0)], 2.0, 1e-12);
        assert_close(f[(0, 1)], 12.0, 1e-12);
        assert_close(f[(1, 1)], 22.0, 1e-12);
    }

    #[test]
    fn centroid_step_repairs_empty_cluster() {
        let x = DMatrix::from_row_slice(1, 4, &[0.0, 0.1, 0.2, 9.0]);
        let mut labels = vec![0usize, 0, 0, 0];
        let centroids = fit_centroids(&[x], &mut labels, 2, &[1.0]);
        // The outlier at 9.0 is farthest from the mean and moves out.
        assert_eq!(labels, vec![0, 0, 0, 1]);
        assert_close(centroids[0][(0, 1)], 9.0, 1e-12);
    }

    #[test]
    fn nmf_row_codes_are_exhaustively_optimal() {
        let (views, _) = blob_features(9, [1.0, 2.0]);
        let cfg = NmfConfig::new(2);
        let result = nmf_multiview(
            &views,
            &WeightScheme::Intrinsic { p: 1.0 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        let alpha = result.weights.values();
        let labels = result.assignment.labels();
        for i in 0..labels.len() {
            let cost = |c: usize| -> f64 {
                views
                    .iter()
                    .zip(&result.centroids)
                    .zip(alpha)
                    .map(|((x, f), a)| a * column_dist2(x, i, f, c))
                    .sum()
            };
            let chosen = cost(labels[i]);
            for c in 0..2 {
                assert!(chosen <= cost(c) + 1e-12);
            }
        }
    }

    #[test]
    fn nmf_inner_objective_is_non_increasing() {
        let (views, _) = blob_features(4, [1.0, 3.0]);
        let alpha = [0.7, 0.3];
        let mut labels: Vec<usize> = (0..views[0].ncols()).map(|i| i % 2).collect();
        let mut prev = f64::INFINITY;
        for _ in 0..20 {
            let centroids = fit_centroids(&views, &mut labels, 2, &alpha);
            let obj_after_f: f64 = views
                .iter()
                .zip(&centroids)
                .zip(&alpha)
                .map(|((x, f), a)| {
                    a * labels
                        .iter()
                        .enumerate()
                        .map(|(i, &l)| column_dist2(x, i, f, l))
                        .sum::<f64>()
                })
                .sum();
            assert!(obj_after_f <= prev + 1e-9 * prev.abs().max(1.0));
            let changed = assign_labels(&views, &centroids, &alpha, &mut labels);
            let obj_after_g: f64 = views
                .iter()
                .zip(&centroids)
                .zip(&alpha)
                .map(|((x, f), a)| {
                    a * labels
                        .iter()
                        .enumerate()
                        .map(|(i, &l)| column_dist2(x, i, f, l))
                        .sum::<f64>()
                })
                .sum();
            assert!(obj_after_g <= obj_after_f + 1e-9 * obj_after_f.abs().max(1.0));
            prev = obj_after_g;
            if !changed {
                break;
            }
        }
    }

    #[test]
    fn nmf_noisy_view_gets_less_weight_and_fusion_holds_up() {
        let (views, truth) = blob_features(13, [1.0, 5.0]);
        let cfg = NmfConfig::new(2);
        let combined = nmf_multiview(
            &views,
            &WeightScheme::Intrinsic { p: 1.0 },
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        let mut single_best = 0.0f64;
        for view in &views {
            let r = nmf_multiview(
                std::slice::from_ref(view),
                &WeightScheme::Equal,
                &cfg,
                &AlternatingConfig::default(),
            )
            .unwrap();
            let pred = ClusterAssignment::new(r.assignment.labels().to_vec(), 2).unwrap();
            single_best = single_best.max(acc(&pred, &truth).unwrap());
        }
        let pred = ClusterAssignment::new(combined.assignment.labels().to_vec(), 2).unwrap();
        let combined_acc = acc(&pred, &truth).unwrap();
        assert!(combined_acc >= single_best - 0.02);
        assert!(combined.weights.values()[0] > combined.weights.values()[1]);
    }

    #[test]
    fn sc_warns_when_graph_has_more_components_than_clusters() {
        // Three disconnected pairs, two requested clusters.
        let mut data = DMatrix::<f64>::zeros(6, 6);
        for b in 0..3 {
            data[(2 * b, 2 * b + 1)] = 1.0;
            data[(2 * b + 1, 2 * b)] = 1.0;
        }
        let views = vec![SimilarityMatrix::new(data).unwrap()];
        let cfg = ScConfig::new(2, CutKind::Ratio);
        let result = sc_multiview(
            &views,
            &WeightScheme::Equal,
            &cfg,
            &AlternatingConfig::default(),
        )
        .unwrap();
        assert_eq!(result.component_warning, Some(3));
        assert_eq!(result.labels.len(), 6);
    }

    #[test]
    fn nmf_rejects_empty_feature_views() {
        let views = vec![DMatrix::<f64>::zeros(0, 10)];
        let cfg = NmfConfig::new(2);
        assert!(nmf_multiview(
            &views,
            &WeightScheme::Equal,
            &cfg,
            &AlternatingConfig::default()
        )
        .is_err());
    }

    #[test]
    fn indicator_matrix_rows_are_one_hot() {
        let g = IndicatorMatrix::new(vec![0, 2, 1], 3).unwrap();
        let m = g.to_matrix();
        for i in 0..3 {
            assert_close(m.row(i).sum(), 1.0, 0.0);
            assert_eq!(m.row(i).iter().filter(|v| **v == 1.0).count(), 1);
        }
        assert!(IndicatorMatrix::new(vec![3], 3).is_err());
    }
}
