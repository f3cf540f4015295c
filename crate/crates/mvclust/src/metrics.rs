//! External clustering indices: accuracy under optimal label matching
//! (ACC), normalized mutual information (NMI), and purity.
//!
//! All three are invariant to permutations of the label ids on either
//! side and return values in `[0, 1]`. NMI is normalized by the
//! arithmetic mean of the two partition entropies; that choice is fixed
//! here so comparisons across runs stay consistent.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::optimal_assignment;

/// A hard clustering of `n` samples into ids `0..num_clusters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, num_clusters: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("assignment must cover at least one sample"));
        }
        if labels.iter().any(|&l| l >= num_clusters) {
            return Err(Error::invalid(format!(
                "labels must lie in [0, {num_clusters})"
            )));
        }
        Ok(Self {
            labels,
            num_clusters,
        })
    }

    /// Infers the cluster count as `max(labels) + 1`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let max = labels
            .iter()
            .max()
            .copied()
            .ok_or_else(|| Error::invalid("assignment must cover at least one sample"))?;
        Self::new(labels, max + 1)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }
}

/// Joint count table, padded square so cluster counts may differ.
fn contingency(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<Vec<Vec<usize>>> {
    if pred.len() != truth.len() {
        return Err(Error::invalid(format!(
            "label vectors differ in length: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    let k = pred.num_clusters().max(truth.num_clusters());
    let mut table = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        table[p][t] += 1;
    }
    Ok(table)
}

/// Clustering accuracy: the fraction of samples matched under the best
/// one-to-one relabeling, found by minimum-cost assignment on the negated
/// contingency table.
pub fn acc(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let k = table.len();
    let cost = DMatrix::from_fn(k, k, |i, j| -(table[i][j] as f64));
    let perm = optimal_assignment(&cost)?;
    let matched: usize = perm.iter().enumerate().map(|(i, &j)| table[i][j]).sum();
    Ok(matched as f64 / pred.len() as f64)
}

/// Normalized mutual information with arithmetic-mean normalization:
/// `NMI = I(P; T) / ((H(P) + H(T)) / 2)`.
///
/// When both partitions are single-cluster (both entropies zero) the
/// ratio is 0/0 and defined as 1; a single degenerate side yields 0.
pub fn nmi(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let n = pred.len() as f64;
    let k = table.len();

    let row_sums: Vec<f64> = (0..k)
        .map(|i| table[i].iter().sum::<usize>() as f64)
        .collect();
    let col_sums: Vec<f64> = (0..k)
        .map(|j| (0..k).map(|i| table[i][j]).sum::<usize>() as f64)
        .collect();

    let entropy = |sums: &[f64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| {
                let p = s / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_pred = entropy(&row_sums);
    let h_truth = entropy(&col_sums);
    let denom = 0.5 * (h_pred + h_truth);
    if denom <= 0.0 {
        return Ok(1.0);
    }

    let mut mi = 0.0;
    for i in 0..k {
        for j in 0..k {
            let nij = table[i][j] as f64;
            if nij > 0.0 {
                mi += (nij / n) * ((n * nij) / (row_sums[i] * col_sums[j])).ln();
            }
        }
    }
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Purity: each predicted cluster is credited with its majority true
/// class; `(1/n) Σ_clusters max_class overlap`.
pub fn purity(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let matched: usize = table
        .iter()
        .map(|row| row.iter().max().copied().unwrap_or(0))
        .sum();
    Ok(matched as f64 / pred.len() as f64)
}
