//! Monte Carlo experiment harness.
//!
//! Reproduces the synthetic studies: the two-optimizer comparison over a
//! grid of true probabilities and repeat counts, the adaptive-controller
//! relative-error distributions, and the chunked empirical-vs-beta check.
//! Trials are embarrassingly parallel; every trial draws from its own
//! derived stream so results do not depend on worker count.

use crate::ci::{self, TrialTally};
use crate::error::Error;
use crate::metrics;
use crate::planner::{self, PlanConfig, SuccessOracle};
use crate::rng::RngSpec;
use crate::special::{self, BetaParams, Quantile};
use crate::Result;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default comparison grid: the probability pairs and repeat counts the
/// reference benchmark table uses.
pub const DEFAULT_PAIRS: [(f64, f64); 4] = [(0.25, 0.2), (0.5, 0.45), (0.75, 0.7), (0.99, 0.94)];
pub const DEFAULT_N_GRID: [u64; 3] = [100, 1000, 10_000];
pub const DEFAULT_TRIALS: u64 = 1000;

/// One cell of the two-optimizer comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub p1: f64,
    pub p2: f64,
    pub n: u64,
    pub trials: u64,
    /// Fraction of trials with the estimated R_c correctly ordered.
    pub frac_correct_order: f64,
    /// Fraction with the R_c intervals disjoint in the correct direction.
    pub frac_no_overlap: f64,
}

/// Relative-error distribution of the adaptive controller at one p_true.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelErrStats {
    pub p_true: f64,
    pub trials: u64,
    pub rel_errors: Vec<f64>,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Chunked empirical band versus the Jeffreys beta band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkedBetaReport {
    pub chunk_size: u64,
    pub num_chunks: u64,
    pub alpha: f64,
    pub pooled_p_hat: f64,
    pub chunk_estimates: Vec<f64>,
    pub empirical_lower: f64,
    pub empirical_upper: f64,
    pub beta_lower: f64,
    pub beta_upper: f64,
    /// Set when fewer than 20 chunks make the empirical quantiles unstable.
    pub few_chunks_warning: bool,
}

/// Count successes among `n` i.i.d. Bernoulli(p) draws from the stream.
pub fn bernoulli_batch(p: f64, n: u64, rng: RngSpec) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "probability must be in [0,1], got {p}"
        )));
    }
    let mut generator = rng.rng();
    Ok(draw_batch(&mut generator, p, n))
}

fn draw_batch(rng: &mut ChaCha8Rng, p: f64, n: u64) -> u64 {
    (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64
}

/// The individual outcomes of `n` i.i.d. Bernoulli(p) draws.
pub fn bernoulli_sample(p: f64, n: u64, rng: RngSpec) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "probability must be in [0,1], got {p}"
        )));
    }
    let mut generator = rng.rng();
    Ok((0..n).map(|_| generator.gen::<f64>() < p).collect())
}

/// Bernoulli success oracle over a dedicated stream.
pub struct BernoulliOracle {
    p: f64,
    rng: ChaCha8Rng,
}

impl BernoulliOracle {
    pub fn new(p: f64, rng: RngSpec) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "probability must be in [0,1], got {p}"
            )));
        }
        Ok(BernoulliOracle { p, rng: rng.rng() })
    }
}

impl SuccessOracle for BernoulliOracle {
    fn draw(&mut self, batch: u64) -> u64 {
        draw_batch(&mut self.rng, self.p, batch)
    }
}

// Trials use streams carved below the caller's stream id so that repeated
// cells (distinct ids) and trials never collide.
fn trial_stream(base: RngSpec, trial: u64, arm: u64) -> RngSpec {
    base.with_stream((base.stream_id << 32) | (trial << 1) | arm)
}

/// Simulate the two-optimizer comparison.
///
/// Each trial draws one tally per optimizer, builds the ratio-margin
/// interval, and maps it through R_c. A trial counts toward
/// `frac_correct_order` when R̂¹ < R̂² strictly (ties give no evidence and
/// count as incorrect) and toward `frac_no_overlap` when, in addition, the
/// intervals are disjoint with optimizer 1's entirely below optimizer 2's
/// (touching endpoints count as overlap).
pub fn compare_optimizers(
    p1: f64,
    p2: f64,
    n: u64,
    trials: u64,
    c: f64,
    alpha: f64,
    rng: RngSpec,
) -> Result<ComparisonRow> {
    if !(p1 > p2) {
        return Err(Error::Domain(format!(
            "comparison requires p1 > p2, got ({p1}, {p2})"
        )));
    }
    if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(Error::Domain("probabilities must be in [0,1]".into()));
    }
    if n == 0 || trials == 0 {
        return Err(Error::Domain("n and trials must be >= 1".into()));
    }

    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(bool, bool)> {
            let k1 = bernoulli_batch(p1, n, trial_stream(rng, trial, 0))?;
            let k2 = bernoulli_batch(p2, n, trial_stream(rng, trial, 1))?;
            let est1 = ci::ratio_margin_interval(TrialTally::new(n, k1)?, alpha)?;
            let est2 = ci::ratio_margin_interval(TrialTally::new(n, k2)?, alpha)?;
            let r1 = metrics::repeats_to_confidence(est1.point, c)?;
            let r2 = metrics::repeats_to_confidence(est2.point, c)?;
            let correct = r1 < r2;
            // On the probability scale, "R_c interval of 1 strictly below
            // that of 2" is exactly "p interval of 1 strictly above 2".
            let disjoint = correct && est1.lower > est2.upper;
            Ok((correct, disjoint))
        })
        .collect::<Result<_>>()?;

    let correct = outcomes.iter().filter(|(c, _)| *c).count() as f64;
    let disjoint = outcomes.iter().filter(|(_, d)| *d).count() as f64;
    Ok(ComparisonRow {
        p1,
        p2,
        n,
        trials,
        frac_correct_order: correct / trials as f64,
        frac_no_overlap: disjoint / trials as f64,
    })
}

/// Distribution of the true relative error of R̂_c when the repeat count is
/// chosen by the adaptive controller.
pub fn adaptive_relerr_experiment(
    p_true: f64,
    cfg: &PlanConfig,
    c: f64,
    trials: u64,
    rng: RngSpec,
) -> Result<RelErrStats> {
    if !(p_true > 0.0 && p_true < 1.0) {
        return Err(Error::Domain(format!(
            "p_true must be in (0,1), got {p_true}"
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let true_r = metrics::repeats_to_confidence(p_true, c)?;

    let rel_errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let mut oracle = BernoulliOracle::new(p_true, trial_stream(rng, trial, 0))?;
            let plan = planner::adaptive_repeats(&mut oracle, cfg)?;
            let estimated = metrics::repeats_to_confidence(plan.final_estimate.point, c)?;
            Ok((estimated - true_r).abs() / true_r)
        })
        .collect::<Result<_>>()?;

    Ok(RelErrStats {
        p_true,
        trials,
        median: quantile(&rel_errors, 0.5),
        q25: quantile(&rel_errors, 0.25),
        q75: quantile(&rel_errors, 0.75),
        rel_errors,
    })
}

/// Linear-interpolation quantile; q in [0, 1].
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile level {q} outside [0,1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Split a binary sample into chunks and compare the empirical band of the
/// per-chunk estimates against the Jeffreys beta band at the pooled ratio.
pub fn chunked_beta_check(
    sample: &[bool],
    chunk_size: u64,
    alpha: f64,
) -> Result<ChunkedBetaReport> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    if chunk_size == 0 {
        return Err(Error::Domain("chunk_size must be >= 1".into()));
    }
    if !(sample.len() as u64).is_multiple_of(chunk_size) {
        return Err(Error::Domain(format!(
            "sample length {} is not divisible by chunk size {chunk_size}",
            sample.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }

    let num_chunks = sample.len() as u64 / chunk_size;
    let chunk_estimates: Vec<f64> = sample
        .chunks(chunk_size as usize)
        .map(|chunk| chunk.iter().filter(|&&b| b).count() as f64 / chunk_size as f64)
        .collect();
    let pooled = sample.iter().filter(|&&b| b).count() as f64 / sample.len() as f64;

    let params = BetaParams::new(
        pooled * chunk_size as f64 + 0.5,
        (1.0 - pooled) * chunk_size as f64 + 0.5,
    )?;
    let beta_lower = special::beta_quantile(Quantile::new(alpha / 2.0)?, params)?;
    let beta_upper = special::beta_quantile(Quantile::new(1.0 - alpha / 2.0)?, params)?;

    Ok(ChunkedBetaReport {
        chunk_size,
        num_chunks,
        alpha,
        pooled_p_hat: pooled,
        empirical_lower: quantile(&chunk_estimates, alpha / 2.0),
        empirical_upper: quantile(&chunk_estimates, 1.0 - alpha / 2.0),
        beta_lower,
        beta_upper,
        few_chunks_warning: num_chunks < 20,
        chunk_estimates,
    })
}
