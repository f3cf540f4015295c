//! View-weight learning schemes and the generic alternating driver.
//!
//! Every scheme alternates two steps until its objective stalls:
//!
//! 1. solve the weighted combination `min_x Σ_v α_v Φ_v(x)` with a base
//!    learner (the [`WeightedLearner`] implementation),
//! 2. refresh the weights from the per-view losses `Φ_v(x)`.
//!
//! The intrinsic scheme never writes weights into its objective
//! `Σ_v Φ_v(x)^{p/2}`; the re-weighting rule `α_v = (p/2) Φ_v^{(p-2)/2}`
//! falls out of its stationarity condition, and the alternation provably
//! decreases the objective for `0 < p <= 2`. The other three schemes
//! (norm-regularized, entropy-regularized, exponent-flattened) optimize
//! explicit weight variables with closed-form subproblem solutions.

use crate::error::{Error, Result};
use crate::linalg::{project_to_simplex, SIMPLEX_SUM_TOL};

/// Floor applied to per-view losses before exponentiation; the intrinsic
/// and exponent-flattened rules diverge at zero loss.
pub const EPS_PHI: f64 = 1e-12;

/// Per-view losses `Φ_v(x) >= 0`, one entry per view.
#[derive(Debug, Clone)]
pub struct ObjectiveVector {
    values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("objective vector must be nonempty"));
        }
        if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid(
                "per-view losses must be finite and nonnegative",
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-view weights, raw or normalized to the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    normalized: bool,
    clamped: bool,
}

impl WeightVector {
    fn raw(values: Vec<f64>, clamped: bool) -> Self {
        Self {
            values,
            normalized: false,
            clamped,
        }
    }

    fn simplex(values: Vec<f64>, clamped: bool) -> Self {
        debug_assert!({
            let sum: f64 = values.iter().sum();
            (sum - 1.0).abs() <= SIMPLEX_SUM_TOL
        });
        Self {
            values,
            normalized: true,
            clamped,
        }
    }

    pub fn uniform(m: usize) -> Self {
        Self::simplex(vec![1.0 / m as f64; m], false)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// True when a zero loss had to be floored at [`EPS_PHI`] during the
    /// update that produced these weights (the raw weight would diverge).
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    /// Rescaled copy summing to one.
    pub fn normalized(&self) -> WeightVector {
        let sum: f64 = self.values.iter().sum();
        let values = self.values.iter().map(|v| v / sum).collect();
        WeightVector {
            values,
            normalized: true,
            clamped: self.clamped,
        }
    }

    /// Population standard deviation of the entries; the usual spread
    /// summary for comparing weight distributions.
    pub fn std_dev(&self) -> f64 {
        let m = self.values.len() as f64;
        let mean: f64 = self.values.iter().sum::<f64>() / m;
        let var: f64 = self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        var.sqrt()
    }
}

/// One of the four weight-learning strategies, plus fixed equal weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    /// Re-weighted scheme with objective `Σ Φ_v^{p/2}`, `0 < p <= 2`.
    Intrinsic { p: f64 },
    /// Squared-norm regularization `Σ α_v Φ_v + γ ||α||²`, `γ >= 0`.
    NormReg { gamma: f64 },
    /// Entropy regularization `Σ (α_v Φ_v + γ α_v log α_v)`, `γ > 0`.
    EntropyReg { gamma: f64 },
    /// Flattened exponent `Σ α_v^γ Φ_v`, `γ > 1`.
    ExponentFlat { gamma: f64 },
    /// Fixed uniform weights.
    Equal,
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Intrinsic { p } => {
                if !(p > 0.0 && p <= 2.0) {
                    return Err(Error::invalid(format!("intrinsic power p={p} not in (0, 2]")));
                }
            }
            WeightScheme::NormReg { gamma } => {
                if !(gamma >= 0.0 && gamma.is_finite()) {
                    return Err(Error::invalid(format!("norm-reg gamma={gamma} must be >= 0")));
                }
            }
            WeightScheme::EntropyReg { gamma } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::invalid(format!("entropy gamma={gamma} must be > 0")));
                }
            }
            WeightScheme::ExponentFlat { gamma } => {
                if !(gamma > 1.0 && gamma.is_finite()) {
                    return Err(Error::invalid(format!("exponent gamma={gamma} must be > 1")));
                }
            }
            WeightScheme::Equal => {}
        }
        Ok(())
    }

    /// Weights for the next solve, given the current per-view losses.
    /// Raw (unnormalized) for the intrinsic scheme, simplex for the rest.
    pub fn update(&self, phi: &ObjectiveVector) -> Result<WeightVector> {
        match *self {
            WeightScheme::Intrinsic { p } => iw_update(phi, p),
            WeightScheme::NormReg { gamma } => nr_update(phi, gamma),
            WeightScheme::EntropyReg { gamma } => er_update(phi, gamma),
            WeightScheme::ExponentFlat { gamma } => ef_update(phi, gamma),
            WeightScheme::Equal => Ok(WeightVector::uniform(phi.len())),
        }
    }

    /// The scheme's full objective at losses `phi` and weights `alpha`.
    /// The intrinsic objective does not involve the weights.
    pub fn objective(&self, phi: &[f64], alpha: &[f64]) -> f64 {
        match *self {
            WeightScheme::Intrinsic { p } => phi.iter().map(|f| f.powf(p / 2.0)).sum(),
            WeightScheme::NormReg { gamma } => {
                let linear: f64 = alpha.iter().zip(phi).map(|(a, f)| a * f).sum();
                let norm: f64 = alpha.iter().map(|a| a * a).sum();
                linear + gamma * norm
            }
            WeightScheme::EntropyReg { gamma } => alpha
                .iter()
                .zip(phi)
                .map(|(&a, &f)| a * f + gamma * if a > 0.0 { a * a.ln() } else { 0.0 })
                .sum(),
            WeightScheme::ExponentFlat { gamma } => {
                alpha.iter().zip(phi).map(|(a, f)| a.powf(gamma) * f).sum()
            }
            WeightScheme::Equal => {
                phi.iter().sum::<f64>() / phi.len() as f64
            }
        }
    }

    /// The hyperparameter grid used for comparisons: seven decades-style
    /// values for the regularized schemes, six points each for the
    /// flattened-exponent and intrinsic schemes.
    pub fn default_grid(&self) -> Vec<f64> {
        match self {
            WeightScheme::NormReg { .. } | WeightScheme::EntropyReg { .. } => {
                vec![1.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0]
            }
            WeightScheme::ExponentFlat { .. } => vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            WeightScheme::Intrinsic { .. } => vec![0.1, 0.4, 0.7, 1.0, 1.3, 1.7],
            WeightScheme::Equal => vec![0.0],
        }
    }

    pub fn with_hyper(&self, value: f64) -> WeightScheme {
        match self {
            WeightScheme::Intrinsic { .. } => WeightScheme::Intrinsic { p: value },
            WeightScheme::NormReg { .. } => WeightScheme::NormReg { gamma: value },
            WeightScheme::EntropyReg { .. } => WeightScheme::EntropyReg { gamma: value },
            WeightScheme::ExponentFlat { .. } => WeightScheme::ExponentFlat { gamma: value },
            WeightScheme::Equal => WeightScheme::Equal,
        }
    }
}

/// Floors near-zero losses at [`EPS_PHI`]; reports whether any was hit.
fn clamp_losses(phi: &[f64]) -> (Vec<f64>, bool) {
    let mut clamped = false;
    let values = phi
        .iter()
        .map(|&f| {
            if f <= EPS_PHI {
                clamped = true;
                EPS_PHI
            } else {
                f
            }
        })
        .collect();
    (values, clamped)
}

/// Raw intrinsic weights `α_v = (p/2) Φ_v^{(p-2)/2}`.
///
/// At `p = 2` every view gets weight 1 (equal weighting). Zero losses are
/// floored at [`EPS_PHI`] and flagged, since the weight diverges there for
/// `p < 2`.
pub fn iw_update(phi: &ObjectiveVector, p: f64) -> Result<WeightVector> {
    WeightScheme::Intrinsic { p }.validate()?;
    if p == 2.0 {
        return Ok(WeightVector::raw(vec![1.0; phi.len()], false));
    }
    let (phi_c, clamped) = clamp_losses(phi.values());
    let exponent = (p - 2.0) / 2.0;
    let values = phi_c.iter().map(|f| (p / 2.0) * f.powf(exponent)).collect();
    Ok(WeightVector::raw(values, clamped))
}

/// Normalized intrinsic weights: `iw_update` rescaled onto the simplex,
/// computed directly as `α_v = 1 / Σ_u (Φ_v / Φ_u)^{(2-p)/2}`.
///
/// `p = 2` is the uniform limit. Shares its ratio-power kernel with
/// [`ef_update`]: the two families coincide under `(2-p)/2 = 1/(γ-1)`.
pub fn iw_normalized(phi: &ObjectiveVector, p: f64) -> Result<WeightVector> {
    WeightScheme::Intrinsic { p }.validate()?;
    if p == 2.0 {
        return Ok(WeightVector::uniform(phi.len()));
    }
    let (phi_c, clamped) = clamp_losses(phi.values());
    let values = inv_ratio_power_sum(&phi_c, (2.0 - p) / 2.0);
    Ok(WeightVector::simplex(values, clamped))
}

/// Norm-regularized weights: simplex projection of `-φ/(2γ)`.
///
/// At `γ = 0` the regularizer vanishes and the linear program's one-hot
/// solution is returned: all weight on the smallest loss (lowest index on
/// ties).
pub fn nr_update(phi: &ObjectiveVector, gamma: f64) -> Result<WeightVector> {
    WeightScheme::NormReg { gamma }.validate()?;
    let m = phi.len();
    if gamma == 0.0 {
        let mut best = 0;
        for (v, &f) in phi.values().iter().enumerate() {
            if f < phi.values()[best] {
                best = v;
            }
        }
        let mut values = vec![0.0; m];
        values[best] = 1.0;
        return Ok(WeightVector::simplex(values, false));
    }
    let target: Vec<f64> = phi.values().iter().map(|f| -f / (2.0 * gamma)).collect();
    let point = project_to_simplex(&target)?;
    Ok(WeightVector::simplex(point.into_vec(), false))
}

/// Entropy-regularized weights: the Gibbs distribution
/// `α_v ∝ exp(-Φ_v/γ)`, computed with a max-shift so large losses cannot
/// overflow.
pub fn er_update(phi: &ObjectiveVector, gamma: f64) -> Result<WeightVector> {
    WeightScheme::EntropyReg { gamma }.validate()?;
    let min = phi
        .values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let exp: Vec<f64> = phi
        .values()
        .iter()
        .map(|f| ((min - f) / gamma).exp())
        .collect();
    let sum: f64 = exp.iter().sum();
    Ok(WeightVector::simplex(
        exp.into_iter().map(|e| e / sum).collect(),
        false,
    ))
}

/// Exponent-flattened weights `α_v = 1 / Σ_u (Φ_v / Φ_u)^{1/(γ-1)}`.
pub fn ef_update(phi: &ObjectiveVector, gamma: f64) -> Result<WeightVector> {
    WeightScheme::ExponentFlat { gamma }.validate()?;
    let (phi_c, clamped) = clamp_losses(phi.values());
    let values = inv_ratio_power_sum(&phi_c, 1.0 / (gamma - 1.0));
    Ok(WeightVector::simplex(values, clamped))
}

/// `α_v = 1 / Σ_u (φ_v/φ_u)^e` for strictly positive losses and `e > 0`.
fn inv_ratio_power_sum(phi: &[f64], exponent: f64) -> Vec<f64> {
    phi.iter()
        .map(|&fv| {
            let denom: f64 = phi.iter().map(|&fu| (fv / fu).powf(exponent)).sum();
            1.0 / denom
        })
        .collect()
}

/// The power that approximately maximizes the spread of a single intrinsic
/// weight update when losses are normalized so the worst view sits at 1:
/// `p = -2 / ln(φ_min)`, clipped to `(0, 2]`.
///
/// Only the open interval `0 < φ_min < 1` admits a finite maximizer.
pub fn sharpest_p(phi_min: f64) -> Result<f64> {
    if !(phi_min > 0.0 && phi_min < 1.0) {
        return Err(Error::invalid(format!(
            "phi_min={phi_min} must lie strictly between 0 and 1"
        )));
    }
    Ok((-2.0 / phi_min.ln()).min(2.0))
}

/// A base learner that can solve the weighted multi-view subproblem.
///
/// `solve_weighted` receives the raw weights from the active scheme plus
/// the previous state as a warm start (absent on the first outer
/// iteration); `per_view_losses` evaluates `Φ_v` at a state. Learners must
/// be invariant to positive rescaling of the weights.
pub trait WeightedLearner {
    type State;

    fn view_count(&self) -> usize;

    fn solve_weighted(&mut self, alpha: &[f64], warm: Option<&Self::State>)
        -> Result<Self::State>;

    fn per_view_losses(&self, state: &Self::State) -> Vec<f64>;
}

/// Knobs for [`run_alternating`]. The defaults stop on a relative
/// objective change below `1e-6` or after 50 outer iterations, starting
/// from uniform weights.
#[derive(Debug, Clone)]
pub struct AlternatingConfig {
    pub max_outer: usize,
    pub tol: f64,
    pub init_weights: Option<Vec<f64>>,
    /// Divide losses by their maximum before each weight update. Off by
    /// default: the raw losses feed the update rules directly.
    pub normalize_losses: bool,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        Self {
            max_outer: 50,
            tol: 1e-6,
            init_weights: None,
            normalize_losses: false,
        }
    }
}

/// Result of the alternating optimization.
#[derive(Debug, Clone)]
pub struct AlternatingOutcome<S> {
    pub state: S,
    /// Final weights exactly as fed to the solver (raw for the intrinsic
    /// scheme); call `.normalized()` for reporting.
    pub weights: WeightVector,
    /// Scheme objective after each outer iteration.
    pub trace: Vec<f64>,
    /// Normalized weights after each outer iteration.
    pub weight_history: Vec<Vec<f64>>,
    pub iterations: usize,
    /// A zero per-view loss was floored during some weight update.
    pub degenerate: bool,
    /// The objective increased beyond `10 * machine epsilon` relative
    /// slack at some iteration.
    pub descent_warning: bool,
}

/// Alternates `solve_weighted` and the scheme's weight update until the
/// scheme objective changes by less than `cfg.tol` relatively, or
/// `cfg.max_outer` is hit. Weights start uniform unless overridden.
pub fn run_alternating<L: WeightedLearner>(
    learner: &mut L,
    scheme: &WeightScheme,
    cfg: &AlternatingConfig,
) -> Result<AlternatingOutcome<L::State>> {
    scheme.validate()?;
    if cfg.max_outer == 0 {
        return Err(Error::invalid("max_outer must be at least 1"));
    }
    let m = learner.view_count();
    if m == 0 {
        return Err(Error::invalid("learner exposes zero views"));
    }
    let mut alpha: Vec<f64> = match &cfg.init_weights {
        Some(w) => {
            if w.len() != m || w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::invalid("init_weights must be nonnegative, one per view"));
            }
            w.clone()
        }
        None => vec![1.0 / m as f64; m],
    };

    let mut state: Option<L::State> = None;
    let mut weights = WeightVector::raw(alpha.clone(), false);
    let mut trace: Vec<f64> = Vec::new();
    let mut weight_history = Vec::new();
    let mut degenerate = false;
    let mut descent_warning = false;

    for iteration in 0..cfg.max_outer {
        let new_state =
            learner
                .solve_weighted(&alpha, state.as_ref())
                .map_err(|e| Error::Alternating {
                    iteration,
                    source: Box::new(e),
                })?;
        let mut losses = learner.per_view_losses(&new_state);
        if cfg.normalize_losses {
            let max = losses.iter().copied().fold(0.0f64, f64::max).max(EPS_PHI);
            losses.iter_mut().for_each(|f| *f /= max);
        }
        let phi = ObjectiveVector::new(losses)?;

        weights = scheme.update(&phi)?;
        degenerate |= weights.was_clamped();
        let objective = scheme.objective(phi.values(), weights.values());

        if let Some(&prev) = trace.last() {
            if objective > prev + 10.0 * f64::EPSILON * prev.abs().max(1.0) {
                descent_warning = true;
            }
        }
        let converged = trace
            .last()
            .is_some_and(|&prev: &f64| (prev - objective).abs() <= cfg.tol * prev.abs().max(1.0));

        trace.push(objective);
        weight_history.push(weights.normalized().values().to_vec());
        alpha = weights.values().to_vec();
        state = Some(new_state);

        if converged {
            break;
        }
    }

    let iterations = trace.len();
    Ok(AlternatingOutcome {
        state: state.expect("max_outer >= 1"),
        weights,
        trace,
        weight_history,
        iterations,
        degenerate,
        descent_warning,
    })
}
