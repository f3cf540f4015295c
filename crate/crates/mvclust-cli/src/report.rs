//! Run reports: machine-readable `key=value` files plus aligned tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: String,
    pub scheme: String,
    pub hyper: f64,
    pub seed: u64,
    pub clusters: usize,
    pub knn: usize,
    pub t: usize,
    pub iterations: usize,
    pub trace: Vec<f64>,
    /// Normalized view weights.
    pub weights: Vec<f64>,
    /// (ACC, NMI, Purity) when ground truth was available.
    pub metrics: Option<(f64, f64, f64)>,
    pub wall_ms: u128,
    pub labels: Vec<usize>,
}

impl RunReport {
    pub fn weight_std(&self) -> f64 {
        let m = self.weights.len() as f64;
        let mean: f64 = self.weights.iter().sum::<f64>() / m;
        (self.weights.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / m).sqrt()
    }

    fn stem(&self) -> String {
        format!(
            "{}_{}_{}_{}",
            self.method, self.scheme, self.hyper, self.seed
        )
    }

    /// `key=value` serialization; every run writes the same keys in the
    /// same order so reruns are byte-comparable (modulo `wall_ms`).
    pub fn to_key_values(&self) -> String {
        let join = |values: &[f64]| {
            values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let _ = writeln!(out, "method={}", self.method);
        let _ = writeln!(out, "scheme={}", self.scheme);
        let _ = writeln!(out, "hyper={}", self.hyper);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "clusters={}", self.clusters);
        let _ = writeln!(out, "knn={}", self.knn);
        let _ = writeln!(out, "t={}", self.t);
        let _ = writeln!(out, "iters={}", self.iterations);
        let _ = writeln!(out, "objective_trace={}", join(&self.trace));
        let _ = writeln!(out, "weights={}", join(&self.weights));
        if let Some((acc, nmi, purity)) = self.metrics {
            let _ = writeln!(out, "acc={acc}");
            let _ = writeln!(out, "nmi={nmi}");
            let _ = writeln!(out, "purity={purity}");
        }
        let _ = writeln!(out, "wall_ms={}", self.wall_ms);
        out
    }

    /// Writes `report_<stem>.txt` and `labels_<stem>.txt`; returns the
    /// report path.
    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let report_path = dir.join(format!("report_{}.txt", self.stem()));
        fs::write(&report_path, self.to_key_values())?;
        let labels: String = self.labels.iter().map(|l| format!("{l}\n")).collect();
        fs::write(dir.join(format!("labels_{}.txt", self.stem())), labels)?;
        Ok(report_path)
    }

    pub fn table_header() -> String {
        format!(
            "{:<6} {:<6} {:>8} {:>6} {:>6} {:>8} {:>8} {:>8}  {}",
            "method", "scheme", "hyper", "seed", "iters", "acc", "nmi", "purity", "weights"
        )
    }

    pub fn table_row(&self) -> String {
        let fmt_metric = |v: Option<f64>| match v {
            Some(v) => format!("{v:.4}"),
            None => "na".to_string(),
        };
        let weights = self
            .weights
            .iter()
            .map(|w| format!("{w:.4}"))
            .collect::<Vec<_>>()
            .join("/");
        format!(
            "{:<6} {:<6} {:>8} {:>6} {:>6} {:>8} {:>8} {:>8}  {}",
            self.method,
            self.scheme,
            self.hyper,
            self.seed,
            self.iterations,
            fmt_metric(self.metrics.map(|m| m.0)),
            fmt_metric(self.metrics.map(|m| m.1)),
            fmt_metric(self.metrics.map(|m| m.2)),
            weights
        )
    }
}

/// Per-grid-point aggregate over seeds.
#[derive(Debug, Clone)]
pub struct GridPointSummary {
    pub hyper: f64,
    pub mean_acc: Option<f64>,
    pub mean_nmi: Option<f64>,
    pub mean_purity: Option<f64>,
    pub mean_weight_std: f64,
}

impl GridPointSummary {
    pub fn aggregate(hyper: f64, runs: &[&RunReport]) -> Self {
        let n = runs.len() as f64;
        let mean_of = |f: &dyn Fn(&RunReport) -> Option<f64>| -> Option<f64> {
            let values: Vec<f64> = runs.iter().filter_map(|r| f(r)).collect();
            if values.len() == runs.len() && !values.is_empty() {
                Some(values.iter().sum::<f64>() / n)
            } else {
                None
            }
        };
        GridPointSummary {
            hyper,
            mean_acc: mean_of(&|r| r.metrics.map(|m| m.0)),
            mean_nmi: mean_of(&|r| r.metrics.map(|m| m.1)),
            mean_purity: mean_of(&|r| r.metrics.map(|m| m.2)),
            mean_weight_std: runs.iter().map(|r| r.weight_std()).sum::<f64>() / n,
        }
    }

    pub fn metric_sum(&self) -> Option<f64> {
        Some(self.mean_acc? + self.mean_nmi? + self.mean_purity?)
    }
}

/// Plot-ready two-column series: one `x y` line per grid point.
pub fn write_series(dir: &Path, name: &str, points: &[(f64, f64)]) -> std::io::Result<PathBuf> {
    let path = dir.join(format!("series_{name}.txt"));
    let mut body = String::new();
    for (x, y) in points {
        let _ = writeln!(body, "{x} {y}");
    }
    fs::write(&path, body)?;
    Ok(path)
}
