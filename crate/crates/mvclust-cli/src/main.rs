//! Experiment harness for the mvclust library: generate synthetic
//! datasets, run any method/scheme pair, sweep hyperparameter grids, and
//! score label files.
//!
//! Exit codes: 0 success, 1 solver/runtime failure, 2 usage error.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvclust::clr::{clr_multiview, ClrConfig};
use mvclust::data::{
    gen_block_toy, gen_two_view_gaussian, load_dataset, save_dataset, BlockToyConfig,
    BlockToyView, DatasetKind, MultiViewDataset, TwoViewGaussianConfig,
};
use mvclust::extensions::{nmf_multiview, sc_multiview, CutKind, NmfConfig, ScConfig};
use mvclust::graph::{build_knn_similarity, SimilarityMatrix};
use mvclust::metrics::{acc, nmi, purity, ClusterAssignment};
use mvclust::weights::{AlternatingConfig, WeightScheme};

use report::{write_series, GridPointSummary, RunReport};

#[derive(Parser)]
#[command(name = "mvclust", version, about = "Multi-view clustering experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-view dataset
    Generate(GenerateArgs),
    /// Run one method/scheme pair on a dataset
    Cluster(ClusterArgs),
    /// Sweep a hyperparameter grid over one or more seeds
    Grid(GridArgs),
    /// Score a predicted label file against ground truth
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    /// Two complementary block-diagonal graph views
    BlockToy,
    /// Two Gaussian-blob feature views with different separations
    Gaussian,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Output directory for the dataset files
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Block sizes (block-toy)
    #[arg(long, value_delimiter = ',', default_values_t = [30usize, 30, 30])]
    blocks: Vec<usize>,
    /// Per-view cluster separations (gaussian)
    #[arg(long, value_delimiter = ',', default_values_t = [2.2f64, 1.2])]
    sep: Vec<f64>,
    /// Per-view noise scales (gaussian)
    #[arg(long, value_delimiter = ',', default_values_t = [1.0f64, 1.0])]
    noise: Vec<f64>,
    /// Samples per cluster (gaussian)
    #[arg(long, default_value_t = 50)]
    per_cluster: usize,
    /// Cluster count (gaussian)
    #[arg(long, default_value_t = 2)]
    clusters: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Constrained-Laplacian-rank graph learning
    Clr,
    /// Spectral clustering, ratio cut
    ScRc,
    /// Spectral clustering, normalized cut
    ScNc,
    /// Indicator-constrained matrix factorization
    Nmf,
}

impl Method {
    fn name(&self) -> &'static str {
        match self {
            Method::Clr => "clr",
            Method::ScRc => "sc-rc",
            Method::ScNc => "sc-nc",
            Method::Nmf => "nmf",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    /// Intrinsic re-weighting, hyperparameter p in (0, 2]
    Iw,
    /// Squared-norm regularization, gamma >= 0
    Nr,
    /// Entropy regularization, gamma > 0
    Er,
    /// Flattened exponent, gamma > 1
    Ef,
    /// Fixed equal weights
    Equal,
}

impl Scheme {
    fn name(&self) -> &'static str {
        match self {
            Scheme::Iw => "iw",
            Scheme::Nr => "nr",
            Scheme::Er => "er",
            Scheme::Ef => "ef",
            Scheme::Equal => "equal",
        }
    }

    fn to_weight_scheme(self, hyper: f64) -> WeightScheme {
        match self {
            Scheme::Iw => WeightScheme::Intrinsic { p: hyper },
            Scheme::Nr => WeightScheme::NormReg { gamma: hyper },
            Scheme::Er => WeightScheme::EntropyReg { gamma: hyper },
            Scheme::Ef => WeightScheme::ExponentFlat { gamma: hyper },
            Scheme::Equal => WeightScheme::Equal,
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Clr)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Scheme::Iw)]
    scheme: Scheme,
    /// Scheme hyperparameter (p or gamma); defaults to 1.0 for iw,
    /// required for nr/er/ef
    #[arg(long)]
    hyper: Option<f64>,
    /// Cluster count; defaults to the manifest's value
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Neighbor count when feature views are converted to graphs
    #[arg(long, default_value_t = 20)]
    knn: usize,
    /// Row support size of the graph learner
    #[arg(long, default_value_t = 10)]
    t: usize,
    /// Directory for report and label files
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Clr)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Scheme::Iw)]
    scheme: Scheme,
    /// Comma-separated hyperparameter values, or "default" for the
    /// scheme's built-in grid
    #[arg(long, default_value = "default")]
    grid: String,
    #[arg(long)]
    clusters: Option<usize>,
    /// Comma-separated seeds
    #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    knn: usize,
    #[arg(long, default_value_t = 10)]
    t: usize,
    /// Parallel runs
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    pred: PathBuf,
    truth: PathBuf,
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<mvclust::Error> for CliError {
    fn from(e: mvclust::Error) -> Self {
        // Bad parameter values are the caller's problem; everything else
        // (solver failures, unreadable data) is a runtime failure.
        match e {
            mvclust::Error::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Grid(args) => cmd_grid(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let dataset = match args.kind {
        GenKind::BlockToy => {
            let mut cfg = BlockToyConfig::default();
            if args.blocks.is_empty() {
                return Err(CliError::Usage("--blocks must be nonempty".into()));
            }
            if args.blocks.len() != 3 {
                // The default noise overrides address boundaries 0-1 and
                // 1-2; with a different block count fall back to flat
                // per-view noise.
                cfg.views = vec![
                    BlockToyView {
                        base_noise: 0.6,
                        overrides: Vec::new(),
                    },
                    BlockToyView {
                        base_noise: 0.7,
                        overrides: Vec::new(),
                    },
                ];
            }
            cfg.block_sizes = args.blocks.clone();
            gen_block_toy(&cfg, args.seed)?
        }
        GenKind::Gaussian => {
            if args.sep.len() != 2 || args.noise.len() != 2 {
                return Err(CliError::Usage(
                    "--sep and --noise take exactly two comma-separated values".into(),
                ));
            }
            let cfg = TwoViewGaussianConfig {
                n_per_cluster: args.per_cluster,
                clusters: args.clusters,
                separations: [args.sep[0], args.sep[1]],
                noise_scales: [args.noise[0], args.noise[1]],
                view_seed_offsets: [0, 1],
            };
            gen_two_view_gaussian(&cfg, args.seed)?
        }
    };
    let manifest = save_dataset(&dataset, &args.out)?;
    println!("{}", manifest.display());
    Ok(())
}

fn resolve_hyper(scheme: Scheme, hyper: Option<f64>) -> Result<f64, CliError> {
    match (scheme, hyper) {
        (_, Some(h)) => Ok(h),
        (Scheme::Iw, None) => Ok(1.0),
        (Scheme::Equal, None) => Ok(0.0),
        (s, None) => Err(CliError::Usage(format!(
            "--hyper is required for scheme {}",
            s.name()
        ))),
    }
}

/// Graph views for the graph-based methods: graphs pass through, feature
/// views go through the kNN construction.
fn graph_views(ds: &MultiViewDataset, knn: usize) -> Result<Vec<SimilarityMatrix>, CliError> {
    ds.views
        .iter()
        .map(|view| match ds.kind {
            DatasetKind::Graphs => Ok(SimilarityMatrix::new(view.clone())?),
            DatasetKind::Features => Ok(build_knn_similarity(view, knn)?),
        })
        .collect()
}

fn run_single(
    ds: &MultiViewDataset,
    method: Method,
    scheme: Scheme,
    hyper: f64,
    clusters: usize,
    seed: u64,
    knn: usize,
    t: usize,
) -> Result<RunReport, CliError> {
    let weight_scheme = scheme.to_weight_scheme(hyper);
    let alt = AlternatingConfig::default();
    let start = Instant::now();

    let (labels, weights, trace, iterations) = match method {
        Method::Clr => {
            let views = graph_views(ds, knn)?;
            let mut cfg = ClrConfig::new(clusters);
            cfg.t = t;
            let r = clr_multiview(&views, &weight_scheme, &cfg, &alt)?;
            (
                r.labels,
                r.weights.values().to_vec(),
                r.trace,
                r.iterations,
            )
        }
        Method::ScRc | Method::ScNc => {
            let views = graph_views(ds, knn)?;
            let cut = if method == Method::ScRc {
                CutKind::Ratio
            } else {
                CutKind::Normalized
            };
            let mut cfg = ScConfig::new(clusters, cut);
            cfg.seed = seed;
            let r = sc_multiview(&views, &weight_scheme, &cfg, &alt)?;
            (
                r.labels,
                r.weights.values().to_vec(),
                r.trace,
                r.iterations,
            )
        }
        Method::Nmf => {
            if ds.kind != DatasetKind::Features {
                return Err(CliError::Usage(
                    "method nmf needs feature views, but the dataset holds graphs".into(),
                ));
            }
            let views: Vec<_> = ds.views.iter().map(|x| x.transpose()).collect();
            let mut cfg = NmfConfig::new(clusters);
            cfg.seed = seed;
            let r = nmf_multiview(&views, &weight_scheme, &cfg, &alt)?;
            (
                r.assignment.labels().to_vec(),
                r.weights.values().to_vec(),
                r.trace,
                r.iterations,
            )
        }
    };
    let wall_ms = start.elapsed().as_millis();

    let metrics = match &ds.truth {
        Some(truth) => {
            let observed = labels.iter().max().copied().unwrap_or(0) + 1;
            let pred = ClusterAssignment::new(labels.clone(), observed.max(clusters))?;
            Some((
                acc(&pred, truth)?,
                nmi(&pred, truth)?,
                purity(&pred, truth)?,
            ))
        }
        None => None,
    };

    Ok(RunReport {
        method: method.name().to_string(),
        scheme: scheme.name().to_string(),
        hyper,
        seed,
        clusters,
        knn,
        t,
        iterations,
        trace,
        weights,
        metrics,
        wall_ms,
        labels,
    })
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), CliError> {
    let ds = load_dataset(&args.manifest)?;
    let clusters = args.clusters.unwrap_or(ds.clusters);
    let hyper = resolve_hyper(args.scheme, args.hyper)?;
    let report = run_single(
        &ds,
        args.method,
        args.scheme,
        hyper,
        clusters,
        args.seed,
        args.knn,
        args.t,
    )?;
    let path = report.write(&args.out)?;
    println!("{}", RunReport::table_header());
    println!("{}", report.table_row());
    println!("report: {}", path.display());
    Ok(())
}

fn cmd_grid(args: GridArgs) -> Result<(), CliError> {
    let ds = load_dataset(&args.manifest)?;
    let clusters = args.clusters.unwrap_or(ds.clusters);
    let grid: Vec<f64> = if args.grid == "default" {
        args.scheme.to_weight_scheme(1.5).default_grid()
    } else {
        args.grid
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad grid value {tok:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(CliError::Usage("grid must be nonempty".into()));
    }
    if args.seeds.is_empty() {
        return Err(CliError::Usage("--seeds must be nonempty".into()));
    }
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }

    let combos: Vec<(f64, u64)> = grid
        .iter()
        .flat_map(|&h| args.seeds.iter().map(move |&s| (h, s)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let results: Vec<Result<RunReport, String>> = pool.install(|| {
        use rayon::prelude::*;
        combos
            .par_iter()
            .map(|&(hyper, seed)| {
                run_single(
                    &ds,
                    args.method,
                    args.scheme,
                    hyper,
                    clusters,
                    seed,
                    args.knn,
                    args.t,
                )
                .map_err(|e| match e {
                    CliError::Usage(m) | CliError::Failure(m) => m,
                })
            })
            .collect()
    });

    let mut reports = Vec::with_capacity(results.len());
    for ((hyper, seed), result) in combos.iter().zip(results) {
        match result {
            Ok(report) => reports.push(report),
            Err(msg) => {
                return Err(CliError::Failure(format!(
                    "run hyper={hyper} seed={seed} failed: {msg}"
                )))
            }
        }
    }
    for report in &reports {
        report.write(&args.out)?;
    }

    let summaries: Vec<GridPointSummary> = grid
        .iter()
        .map(|&h| {
            let runs: Vec<&RunReport> = reports.iter().filter(|r| r.hyper == h).collect();
            GridPointSummary::aggregate(h, &runs)
        })
        .collect();

    let best = summaries
        .iter()
        .filter_map(|s| s.metric_sum().map(|v| (s.hyper, v)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let fmt = |v: Option<f64>| match v {
        Some(v) => format!("{v:.4}"),
        None => "na".to_string(),
    };
    let mut summary_text = format!(
        "{:<10} {:>8} {:>8} {:>8} {:>8} {:>12}\n",
        "hyper", "acc", "nmi", "purity", "sum", "weight_std"
    );
    for s in &summaries {
        summary_text.push_str(&format!(
            "{:<10} {:>8} {:>8} {:>8} {:>8} {:>12.6}{}\n",
            s.hyper,
            fmt(s.mean_acc),
            fmt(s.mean_nmi),
            fmt(s.mean_purity),
            fmt(s.metric_sum()),
            s.mean_weight_std,
            match best {
                Some((h, _)) if h == s.hyper => "  <- best",
                _ => "",
            }
        ));
    }
    print!("{summary_text}");
    if let Some((h, v)) = best {
        println!("best hyper by acc+nmi+purity: {h} (sum {v:.4})");
    }
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("summary.txt"), &summary_text)?;

    write_series(
        &args.out,
        "weight_std",
        &summaries
            .iter()
            .map(|s| (s.hyper, s.mean_weight_std))
            .collect::<Vec<_>>(),
    )?;
    for (name, pick) in [
        ("acc", &(|s: &GridPointSummary| s.mean_acc) as &dyn Fn(&GridPointSummary) -> Option<f64>),
        ("nmi", &|s: &GridPointSummary| s.mean_nmi),
        ("purity", &|s: &GridPointSummary| s.mean_purity),
    ] {
        let points: Vec<(f64, f64)> = summaries
            .iter()
            .filter_map(|s| pick(s).map(|v| (s.hyper, v)))
            .collect();
        if !points.is_empty() {
            write_series(&args.out, name, &points)?;
        }
    }
    Ok(())
}

fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        labels.push(line.parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{}, line {}: not a label: {line:?}",
                path.display(),
                lineno + 1
            ))
        })?);
    }
    if labels.is_empty() {
        return Err(CliError::Usage(format!("{}: empty label file", path.display())));
    }
    Ok(labels)
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let pred_labels = read_labels(&args.pred)?;
    let truth_labels = read_labels(&args.truth)?;
    if pred_labels.len() != truth_labels.len() {
        return Err(CliError::Usage(format!(
            "label files differ in length: {} vs {}",
            pred_labels.len(),
            truth_labels.len()
        )));
    }
    let pred = ClusterAssignment::from_labels(pred_labels)?;
    let truth = ClusterAssignment::from_labels(truth_labels)?;
    println!(
        "{:.6} {:.6} {:.6}",
        acc(&pred, &truth)?,
        nmi(&pred, &truth)?,
        purity(&pred, &truth)?
    );
    Ok(())
}
