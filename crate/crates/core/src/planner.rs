//! Sample-size determination for success-probability experiments.
//!
//! Worst-case repeat counts for a target absolute error, the relative-error
//! lower bound L(p̂) with its optional piecewise scaling correction, an
//! exact root-finding alternative, and the adaptive controller that grows
//! the repeat count until the bound is met.

use crate::ci::{self, CiMethod, SuccessEstimate, TrialTally};
use crate::error::Error;
use crate::metrics;
use crate::special;
use crate::Result;

use serde::{Deserialize, Serialize};

/// Default hard ceiling on repeats for adaptive runs and root finding.
pub const DEFAULT_N_CAP: u64 = 1_000_000;

/// Configuration for the relative-error bound and the adaptive controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    /// Significance level of the underlying interval.
    pub alpha: f64,
    /// Target maximum relative error of the R_c estimate.
    pub e_target: f64,
    /// Repeats drawn before the first bound evaluation.
    pub n_init: u64,
    /// Apply the piecewise scaling correction to the bound.
    pub use_scaling: bool,
    /// Hard maximum on total repeats.
    pub n_cap: u64,
}

impl PlanConfig {
    pub fn new(e_target: f64) -> Self {
        PlanConfig {
            alpha: 0.05,
            e_target,
            n_init: 100,
            use_scaling: false,
            n_cap: DEFAULT_N_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.e_target.is_finite() && self.e_target > 0.0) {
            return Err(Error::Domain(format!(
                "e_target must be > 0, got {}",
                self.e_target
            )));
        }
        if self.n_init == 0 {
            return Err(Error::Domain("n_init must be >= 1".into()));
        }
        if self.n_cap < self.n_init {
            return Err(Error::Domain(format!(
                "n_cap ({}) must be >= n_init ({})",
                self.n_cap, self.n_init
            )));
        }
        special::z_critical(self.alpha)?;
        Ok(())
    }
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig::new(0.1)
    }
}

/// One controller round, also the JSON-lines trace record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanRound {
    pub round: u32,
    pub n_total: u64,
    pub n_success: u64,
    /// Agresti–Coull point estimate after this round's draws.
    pub p_hat: f64,
    /// Bound L(p̂); absent while no success has been observed.
    pub bound: Option<u64>,
    pub stop: bool,
}

/// Outcome of an adaptive run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub final_n: u64,
    /// Ratio-margin estimate from the final tally.
    pub final_estimate: SuccessEstimate,
    /// L(p̂) at termination; absent if the run capped with zero successes.
    pub bound_value: Option<u64>,
    pub trace: Vec<PlanRound>,
    /// True when the run stopped at n_cap without satisfying the bound.
    pub capped: bool,
}

/// Source of Bernoulli outcomes: one batch request, one success count.
///
/// Implementations must return at most `batch` successes and draw
/// independent outcomes across calls for a fixed configuration.
pub trait SuccessOracle {
    fn draw(&mut self, batch: u64) -> u64;
}

impl<F: FnMut(u64) -> u64> SuccessOracle for F {
    fn draw(&mut self, batch: u64) -> u64 {
        self(batch)
    }
}

/// Worst-case repeats guaranteeing absolute error at most `epsilon`:
/// ceil((z/2ε)² − z²). Vacuous targets (ε ≥ 0.5) need a single repeat.
pub fn worst_case_n(epsilon: f64, alpha: f64) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if epsilon >= 0.5 {
        return Ok(1);
    }
    let z = special::z_critical(alpha)?;
    let bound = (z / (2.0 * epsilon)).powi(2) - z * z;
    Ok((bound.ceil() as u64).max(1))
}

/// The z ≈ 2 simplification of [`worst_case_n`]: ceil(1/ε² − 4).
pub fn worst_case_n_simplified(epsilon: f64) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if epsilon >= 0.5 {
        return Ok(1);
    }
    let bound = 1.0 / (epsilon * epsilon) - 4.0;
    Ok((bound.ceil().max(1.0)) as u64)
}

/// Repeats for a target absolute error at an anticipated p̂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetN {
    pub n: u64,
    /// True when p̂ sat on a boundary and the formula degenerates.
    pub degenerate: bool,
}

/// Raw repeats for error `epsilon` at anticipated ratio `p_hat`:
/// max(1, ceil(z²·p̂(1−p̂)/ε²) − ceil(z²)).
pub fn n_for_target(p_hat: f64, epsilon: f64, alpha: f64) -> Result<TargetN> {
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::Domain(format!(
            "p_hat must be in [0,1], got {p_hat}"
        )));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if p_hat == 0.0 || p_hat == 1.0 {
        return Ok(TargetN {
            n: 1,
            degenerate: true,
        });
    }
    let z = special::z_critical(alpha)?;
    let adjusted = (z * z * p_hat * (1.0 - p_hat) / (epsilon * epsilon)).ceil();
    let n = (adjusted - (z * z).ceil()).max(1.0) as u64;
    Ok(TargetN {
        n,
        degenerate: false,
    })
}

/// Piecewise scaling factor compensating the first-order bound's looseness
/// at high success probabilities. Buckets are inclusive on the left edge.
pub fn scaling_function(p_hat: f64) -> f64 {
    if p_hat <= 0.5 {
        1.0
    } else if p_hat <= 0.7 {
        1.5
    } else if p_hat <= 0.8 {
        2.0
    } else if p_hat <= 0.9 {
        2.5
    } else {
        7.0
    }
}

/// Lower bound L(p̂) on repeats for relative error target e_T:
/// ceil( s(p̂)·([z(1+e_T)/e_T]²·(1−p̂)/p̂ − z²) ), floored at 1, with
/// s ≡ 1 when scaling is disabled.
pub fn relative_error_bound(p_hat: f64, cfg: &PlanConfig) -> Result<u64> {
    cfg.validate()?;
    if !(p_hat > 0.0 && p_hat < 1.0) {
        return Err(Error::Domain(format!(
            "relative-error bound is undefined at degenerate p_hat = {p_hat}"
        )));
    }
    let z = special::z_critical(cfg.alpha)?;
    let factor = (z * (1.0 + cfg.e_target) / cfg.e_target).powi(2);
    let base = factor * (1.0 - p_hat) / p_hat - z * z;
    let s = if cfg.use_scaling {
        scaling_function(p_hat)
    } else {
        1.0
    };
    Ok(((s * base).ceil().max(1.0)) as u64)
}

/// Result of the exact repeat-count search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootFindN {
    pub n: u64,
    /// True when the search hit the cap before satisfying the target.
    pub capped: bool,
}

/// Relative error of R_c at a hypothetical experiment: p̂ held fixed,
/// n repeats, ratio-margin interval.
pub fn rel_error_at(p_hat: f64, n: f64, alpha: f64, c: f64) -> Result<f64> {
    let margin = ci::epsilon_margin(p_hat, n, alpha)?;
    let est = SuccessEstimate::from_bounds(
        p_hat,
        (p_hat - margin).clamp(0.0, 1.0),
        (p_hat + margin).clamp(0.0, 1.0),
        alpha,
    )?;
    Ok(metrics::r_c_interval(&est, c)?.rel_error)
}

/// Smallest n such that holding p̂ fixed, the interval at n repeats gives
/// e(R_c) ≤ e_target. Doubling search bracketed, then bisection.
pub fn exact_n_root_find(p_hat: f64, e_target: f64, alpha: f64, c: f64) -> Result<RootFindN> {
    if !(p_hat > 0.0 && p_hat < 1.0) {
        return Err(Error::Domain(format!(
            "p_hat must be in (0,1), got {p_hat}"
        )));
    }
    if !(e_target.is_finite() && e_target > 0.0) {
        return Err(Error::Domain(format!(
            "e_target must be > 0, got {e_target}"
        )));
    }
    let satisfied =
        |n: u64| -> Result<bool> { Ok(rel_error_at(p_hat, n as f64, alpha, c)? <= e_target) };

    if satisfied(1)? {
        return Ok(RootFindN {
            n: 1,
            capped: false,
        });
    }
    let mut lo = 1u64; // known to fail
    let mut hi = 2u64;
    while !satisfied(hi)? {
        lo = hi;
        if hi >= DEFAULT_N_CAP {
            return Ok(RootFindN {
                n: DEFAULT_N_CAP,
                capped: true,
            });
        }
        hi = (hi * 2).min(DEFAULT_N_CAP);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if satisfied(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RootFindN {
        n: hi,
        capped: false,
    })
}

/// Adaptive repeat controller.
///
/// Draws `n_init` outcomes, then loops: estimate p̂ (Agresti–Coull point),
/// compute L(p̂), stop once the total draw count reaches the bound, else
/// top up to it. While no success has been seen the bound is undefined and
/// the draw count doubles instead. Stops unconditionally at `n_cap`.
pub fn adaptive_repeats(oracle: &mut dyn SuccessOracle, cfg: &PlanConfig) -> Result<PlanResult> {
    adaptive_repeats_with(oracle, cfg, |_| {})
}

/// [`adaptive_repeats`] with a per-round callback (e.g. trace streaming).
pub fn adaptive_repeats_with(
    oracle: &mut dyn SuccessOracle,
    cfg: &PlanConfig,
    mut on_round: impl FnMut(&PlanRound),
) -> Result<PlanResult> {
    cfg.validate()?;

    let mut n = cfg.n_init.min(cfg.n_cap);
    let mut successes = checked_draw(oracle, n);
    let mut trace = Vec::new();
    let mut round = 0u32;

    loop {
        round += 1;
        let tally = TrialTally::new(n, successes)?;
        let p_hat = ci::point_estimate(tally, CiMethod::AgrestiCoull, cfg.alpha)?;
        let at_cap = n >= cfg.n_cap;

        let (bound, target) = if successes == 0 {
            (None, (n.saturating_mul(2)).min(cfg.n_cap))
        } else {
            let bound = relative_error_bound(p_hat, cfg)?;
            (Some(bound), bound.min(cfg.n_cap))
        };
        let satisfied = bound.is_some_and(|b| n >= b);
        let stop = satisfied || at_cap;

        let entry = PlanRound {
            round,
            n_total: n,
            n_success: successes,
            p_hat,
            bound,
            stop,
        };
        on_round(&entry);
        trace.push(entry);

        if stop {
            let final_tally = TrialTally::new(n, successes)?;
            return Ok(PlanResult {
                final_n: n,
                final_estimate: ci::ratio_margin_interval(final_tally, cfg.alpha)?,
                bound_value: bound,
                trace,
                capped: !satisfied,
            });
        }

        let extra = target - n;
        successes += checked_draw(oracle, extra);
        n = target;
    }
}

fn checked_draw(oracle: &mut dyn SuccessOracle, batch: u64) -> u64 {
    let got = oracle.draw(batch);
    assert!(
        got <= batch,
        "oracle returned {got} successes from a batch of {batch}"
    );
    got
}
