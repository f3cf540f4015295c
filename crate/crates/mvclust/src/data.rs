//! Synthetic multi-view generators and plain-text dataset I/O.
//!
//! A dataset on disk is a directory holding a `manifest.txt` with
//! `key=value` lines (`kind=`, `clusters=`, one `view=` line per view in
//! order, optional `truth=`), one text matrix file per view (one row per
//! line, space-separated), and an optional label file (one integer per
//! line). Paths in the manifest are relative to the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::ClusterAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// `N x d_v` feature matrices, one row per sample.
    Features,
    /// `N x N` affinity matrices.
    Graphs,
}

impl DatasetKind {
    fn as_str(&self) -> &'static str {
        match self {
            DatasetKind::Features => "features",
            DatasetKind::Graphs => "graphs",
        }
    }
}

/// An ordered collection of views over the same samples, with optional
/// ground truth.
#[derive(Debug, Clone)]
pub struct MultiViewDataset {
    pub name: String,
    pub kind: DatasetKind,
    pub views: Vec<DMatrix<f64>>,
    pub clusters: usize,
    pub truth: Option<ClusterAssignment>,
}

impl MultiViewDataset {
    pub fn n_samples(&self) -> usize {
        self.views.first().map_or(0, |v| v.nrows())
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Ground truth, or a descriptive error when the dataset has none.
    pub fn require_truth(&self) -> Result<&ClusterAssignment> {
        self.truth.as_ref().ok_or(Error::MissingTruth)
    }
}

/// Per-view noise description for [`gen_block_toy`]: affinities inside a
/// block are uniform on `(0, 1)`, affinities between blocks `a` and `b`
/// are uniform on `(0, e)` with `e = base_noise` unless an override for
/// the (unordered) pair is given.
#[derive(Debug, Clone)]
pub struct BlockToyView {
    pub base_noise: f64,
    pub overrides: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct BlockToyConfig {
    pub block_sizes: Vec<usize>,
    pub views: Vec<BlockToyView>,
}

impl Default for BlockToyConfig {
    /// Two complementary 90-sample views over three 30-sample blocks.
    /// Each view drowns a different block boundary: view 0 (base noise
    /// 0.6) is degraded between blocks 0 and 1, view 1 (base noise 0.7)
    /// between blocks 1 and 2, so only their combination separates all
    /// three blocks.
    fn default() -> Self {
        Self {
            block_sizes: vec![30, 30, 30],
            views: vec![
                BlockToyView {
                    base_noise: 0.6,
                    overrides: vec![(0, 1, 0.8)],
                },
                BlockToyView {
                    base_noise: 0.7,
                    overrides: vec![(1, 2, 0.95)],
                },
            ],
        }
    }
}

/// Block-diagonal graph views with controllable cross-block noise and
/// rows normalized to sum 1. Deterministic per seed.
pub fn gen_block_toy(cfg: &BlockToyConfig, seed: u64) -> Result<MultiViewDataset> {
    if cfg.block_sizes.is_empty() || cfg.block_sizes.iter().any(|&s| s == 0) {
        return Err(Error::invalid("block sizes must be positive"));
    }
    if cfg.views.is_empty() {
        return Err(Error::invalid("need at least one view"));
    }
    let blocks = cfg.block_sizes.len();
    for view in &cfg.views {
        if !(view.base_noise >= 0.0 && view.base_noise.is_finite()) {
            return Err(Error::invalid("noise levels must be nonnegative"));
        }
        for &(a, b, e) in &view.overrides {
            if a >= blocks || b >= blocks || a == b || !(e >= 0.0) {
                return Err(Error::invalid(format!(
                    "bad noise override ({a}, {b}, {e})"
                )));
            }
        }
    }

    let n: usize = cfg.block_sizes.iter().sum();
    let mut block_of = Vec::with_capacity(n);
    for (b, &size) in cfg.block_sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, size));
    }

    let mut views = Vec::with_capacity(cfg.views.len());
    for (v, view_cfg) in cfg.views.iter().enumerate() {
        let mut noise = vec![vec![view_cfg.base_noise; blocks]; blocks];
        for &(a, b, e) in &view_cfg.overrides {
            noise[a][b] = e;
            noise[b][a] = e;
        }
        let mut rng = view_rng(seed, v as u64);
        let mut data = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let upper = if block_of[i] == block_of[j] {
                    1.0
                } else {
                    noise[block_of[i]][block_of[j]]
                };
                data[(i, j)] = rng.random::<f64>() * upper;
            }
        }
        for i in 0..n {
            let sum = data.row(i).sum();
            if sum > 0.0 {
                for j in 0..n {
                    data[(i, j)] /= sum;
                }
            }
        }
        views.push(data);
    }

    let truth = ClusterAssignment::new(block_of, blocks)?;
    Ok(MultiViewDataset {
        name: "block-toy".to_string(),
        kind: DatasetKind::Graphs,
        views,
        clusters: blocks,
        truth: Some(truth),
    })
}

/// Two-view Gaussian blob features with per-view separation and noise,
/// for strong-view/weak-view experiments. Cluster centers sit on a circle
/// of radius `separation * noise_scale`; samples add isotropic Gaussian
/// noise of scale `noise_scale`. Views with equal parameters and equal
/// seed offsets are identical.
#[derive(Debug, Clone)]
pub struct TwoViewGaussianConfig {
    pub n_per_cluster: usize,
    pub clusters: usize,
    pub separations: [f64; 2],
    pub noise_scales: [f64; 2],
    pub view_seed_offsets: [u64; 2],
}

impl Default for TwoViewGaussianConfig {
    fn default() -> Self {
        Self {
            n_per_cluster: 50,
            clusters: 2,
            separations: [4.0, 1.5],
            noise_scales: [1.0, 1.0],
            view_seed_offsets: [0, 1],
        }
    }
}

pub fn gen_two_view_gaussian(cfg: &TwoViewGaussianConfig, seed: u64) -> Result<MultiViewDataset> {
    if cfg.n_per_cluster == 0 || cfg.clusters < 2 {
        return Err(Error::invalid(
            "need n_per_cluster >= 1 and at least two clusters",
        ));
    }
    if cfg
        .separations
        .iter()
        .chain(&cfg.noise_scales)
        .any(|x| !x.is_finite() || *x < 0.0)
    {
        return Err(Error::invalid(
            "separations and noise scales must be finite and nonnegative",
        ));
    }

    let n = cfg.n_per_cluster * cfg.clusters;
    let mut views = Vec::with_capacity(2);
    for v in 0..2 {
        let mut rng = view_rng(seed, cfg.view_seed_offsets[v]);
        let radius = cfg.separations[v] * cfg.noise_scales[v];
        let mut data = DMatrix::<f64>::zeros(n, 2);
        let mut row = 0;
        for cluster in 0..cfg.clusters {
            let angle = 2.0 * std::f64::consts::PI * cluster as f64 / cfg.clusters as f64;
            let center = (radius * angle.cos(), radius * angle.sin());
            for _ in 0..cfg.n_per_cluster {
                let (gx, gy) = gaussian_pair(&mut rng);
                data[(row, 0)] = center.0 + cfg.noise_scales[v] * gx;
                data[(row, 1)] = center.1 + cfg.noise_scales[v] * gy;
                row += 1;
            }
        }
        views.push(data);
    }

    let labels: Vec<usize> = (0..n).map(|i| i / cfg.n_per_cluster).collect();
    let truth = ClusterAssignment::new(labels, cfg.clusters)?;
    Ok(MultiViewDataset {
        name: "gaussian".to_string(),
        kind: DatasetKind::Features,
        views,
        clusters: cfg.clusters,
        truth: Some(truth),
    })
}

fn view_rng(seed: u64, offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ offset.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Standard normal pair via Box-Muller.
fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Writes the dataset into `dir` and returns the manifest path.
pub fn save_dataset(ds: &MultiViewDataset, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;

    let mut manifest = String::new();
    manifest.push_str(&format!("kind={}\n", ds.kind.as_str()));
    manifest.push_str(&format!("clusters={}\n", ds.clusters));
    for (v, view) in ds.views.iter().enumerate() {
        let file = format!("view_{v}.txt");
        write_matrix(&dir.join(&file), view)?;
        manifest.push_str(&format!("view={file}\n"));
    }
    if let Some(truth) = &ds.truth {
        let file = "truth.txt";
        let body: String = truth
            .labels()
            .iter()
            .map(|l| format!("{l}\n"))
            .collect();
        write_file(&dir.join(file), &body)?;
        manifest.push_str(&format!("truth={file}\n"));
    }

    let manifest_path = dir.join("manifest.txt");
    write_file(&manifest_path, &manifest)?;
    Ok(manifest_path)
}

/// Loads a dataset from its manifest, validating view-shape consistency.
pub fn load_dataset(manifest_path: &Path) -> Result<MultiViewDataset> {
    let text = fs::read_to_string(manifest_path).map_err(|source| Error::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut kind: Option<DatasetKind> = None;
    let mut clusters: Option<usize> = None;
    let mut view_paths: Vec<PathBuf> = Vec::new();
    let mut truth_path: Option<PathBuf> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: manifest_path.to_path_buf(),
            line: lineno + 1,
            token: line.to_string(),
        })?;
        match key {
            "kind" => {
                kind = Some(match value {
                    "features" => DatasetKind::Features,
                    "graphs" => DatasetKind::Graphs,
                    other => {
                        return Err(Error::Parse {
                            path: manifest_path.to_path_buf(),
                            line: lineno + 1,
                            token: other.to_string(),
                        })
                    }
                });
            }
            "clusters" => {
                clusters = Some(value.parse().map_err(|_| Error::Parse {
                    path: manifest_path.to_path_buf(),
                    line: lineno + 1,
                    token: value.to_string(),
                })?);
            }
            "view" => view_paths.push(base.join(value)),
            "truth" => truth_path = Some(base.join(value)),
            other => {
                return Err(Error::Parse {
                    path: manifest_path.to_path_buf(),
                    line: lineno + 1,
                    token: other.to_string(),
                })
            }
        }
    }

    let kind = kind.ok_or(Error::ManifestKey {
        path: manifest_path.to_path_buf(),
        key: "kind",
    })?;
    let clusters = clusters.ok_or(Error::ManifestKey {
        path: manifest_path.to_path_buf(),
        key: "clusters",
    })?;
    if view_paths.is_empty() {
        return Err(Error::ManifestKey {
            path: manifest_path.to_path_buf(),
            key: "view",
        });
    }

    let mut views = Vec::with_capacity(view_paths.len());
    let mut expected_n: Option<usize> = None;
    for path in &view_paths {
        let matrix = read_matrix(path)?;
        if kind == DatasetKind::Graphs && matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid(format!(
                "graph view {} is not square: {}x{}",
                path.display(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        match expected_n {
            None => expected_n = Some(matrix.nrows()),
            Some(n) if matrix.nrows() != n => {
                return Err(Error::ViewSizeMismatch {
                    path: path.clone(),
                    found: matrix.nrows(),
                    expected: n,
                });
            }
            Some(_) => {}
        }
        views.push(matrix);
    }
    let n = expected_n.expect("nonempty views");

    let truth = match truth_path {
        Some(path) => {
            let labels = read_labels(&path)?;
            if labels.len() != n {
                return Err(Error::ViewSizeMismatch {
                    path,
                    found: labels.len(),
                    expected: n,
                });
            }
            Some(ClusterAssignment::new(labels, clusters)?)
        }
        None => None,
    };

    let name = manifest_path
        .parent()
        .and_then(|p| p.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    Ok(MultiViewDataset {
        name,
        kind,
        views,
        clusters,
        truth,
    })
}

fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut body = String::with_capacity(m.nrows() * m.ncols() * 24);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                body.push(' ');
            }
            // 17 significant digits: round-trips f64 exactly.
            body.push_str(&format!("{:.16e}", m[(i, j)]));
        }
        body.push('\n');
    }
    write_file(path, &body)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                token: token.to_string(),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    token: format!("{} values, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            token: "empty matrix".to_string(),
        });
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: usize = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            token: line.to_string(),
        })?;
        labels.push(value);
    }
    Ok(labels)
}
