//! Two complementary graph views, fused against each single view.
//!
//! ```text
//! cargo run --release --example block_toy
//! ```

use mvclust::clr::{clr_multiview, clr_single, ClrConfig};
use mvclust::data::{gen_block_toy, BlockToyConfig};
use mvclust::graph::SimilarityMatrix;
use mvclust::metrics::{acc, nmi, purity, ClusterAssignment};
use mvclust::weights::{AlternatingConfig, WeightScheme};

fn main() -> mvclust::Result<()> {
    let dataset = gen_block_toy(&BlockToyConfig::default(), 0)?;
    let truth = dataset.truth.clone().expect("generator attaches truth");
    let views: Vec<SimilarityMatrix> = dataset
        .views
        .iter()
        .map(|v| SimilarityMatrix::new(v.clone()))
        .collect::<mvclust::Result<_>>()?;

    let mut cfg = ClrConfig::new(3);
    cfg.t = 20;

    for (i, view) in views.iter().enumerate() {
        let single = clr_single(view, &cfg)?;
        let pred = ClusterAssignment::new(single.labels, single.state.components)?;
        println!(
            "view {i} alone:  acc {:.3}  nmi {:.3}  purity {:.3}",
            acc(&pred, &truth)?,
            nmi(&pred, &truth)?,
            purity(&pred, &truth)?
        );
    }

    let fused = clr_multiview(
        &views,
        &WeightScheme::Intrinsic { p: 1.0 },
        &cfg,
        &AlternatingConfig::default(),
    )?;
    let pred = ClusterAssignment::new(fused.labels, fused.state.components)?;
    println!(
        "fused ({} iterations): acc {:.3}  nmi {:.3}  purity {:.3}  weights {:.3}/{:.3}",
        fused.iterations,
        acc(&pred, &truth)?,
        nmi(&pred, &truth)?,
        purity(&pred, &truth)?,
        fused.weights.values()[0],
        fused.weights.values()[1],
    );
    Ok(())
}
