//! Multi-view clustering built around re-weighted view-weight learning.
//!
//! Given `M` views of the same `N` samples (feature matrices or similarity
//! graphs), the crate learns a single clustering together with a per-view
//! weight vector that reflects how useful each view was. Four weight-learning
//! strategies share one alternating driver:
//!
//! | Scheme | Objective shape | Weight subproblem |
//! |--------|-----------------|-------------------|
//! | intrinsic (IW) | `Σ_v Φ_v^{p/2}` | implicit, `α_v = (p/2) Φ_v^{(p-2)/2}` |
//! | norm-regularized (NR) | `Σ_v α_v Φ_v + γ‖α‖²` | simplex projection |
//! | entropy-regularized (ER) | `Σ_v α_v Φ_v + γ α_v log α_v` | Gibbs distribution |
//! | exponent-flattened (EF) | `Σ_v α_v^γ Φ_v` | closed-form ratio sum |
//!
//! Base learners plugged into the driver:
//!
//! - [`clr`]: constrained-Laplacian-rank graph learning — the target
//!   similarity matrix is forced to have exactly `C` connected components,
//!   so its components *are* the clusters.
//! - [`extensions::sc_multiview`]: spectral clustering (ratio or normalized
//!   cut) on a weighted combination of view graphs.
//! - [`extensions::nmf_multiview`]: orthogonal nonnegative matrix
//!   factorization with a hard cluster-indicator factor.
//!
//! Supporting modules: [`linalg`] (simplex projection, symmetric
//! eigensolves, assignment), [`graph`] (kNN graphs, Laplacians,
//! connectivity), [`metrics`] (ACC/NMI/Purity), [`data`] (synthetic
//! generators and dataset I/O).
//!
//! ```
//! use mvclust::clr::{clr_multiview, ClrConfig};
//! use mvclust::data::{gen_block_toy, BlockToyConfig, BlockToyView};
//! use mvclust::graph::SimilarityMatrix;
//! use mvclust::weights::{AlternatingConfig, WeightScheme};
//!
//! let config = BlockToyConfig {
//!     block_sizes: vec![8, 8],
//!     views: vec![
//!         BlockToyView { base_noise: 0.2, overrides: vec![] },
//!         BlockToyView { base_noise: 0.4, overrides: vec![] },
//!     ],
//! };
//! let dataset = gen_block_toy(&config, 7)?;
//! let views: Vec<SimilarityMatrix> = dataset
//!     .views
//!     .iter()
//!     .map(|v| SimilarityMatrix::new(v.clone()))
//!     .collect::<mvclust::Result<_>>()?;
//!
//! let result = clr_multiview(
//!     &views,
//!     &WeightScheme::Intrinsic { p: 1.0 },
//!     &ClrConfig::new(2),
//!     &AlternatingConfig::default(),
//! )?;
//! assert_eq!(result.state.components, 2);
//! assert_eq!(result.labels, dataset.truth.unwrap().labels());
//! # Ok::<(), mvclust::Error>(())
//! ```

pub mod clr;
pub mod data;
pub mod error;
pub mod extensions;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod weights;

pub use error::{Error, Result};
