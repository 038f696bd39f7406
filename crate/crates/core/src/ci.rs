//! Binomial proportion estimation.
//!
//! The four interval methods (Wald, Wilson, Agresti–Coull, Jeffreys),
//! interval width and relative width, and exact coverage computation.
//! A fifth construction, [`ratio_margin_interval`], centers the
//! Agresti–Coull-width margin at the raw success ratio; the metric
//! propagation layer uses it because the estimator degenerates to zero
//! width at all-success / all-failure tallies, which is the behaviour the
//! downstream R_c error analysis is built on.

use crate::error::Error;
use crate::special::{self, BetaParams, Quantile};
use crate::Result;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Observed repeats: `n` trials with `n_s` successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialTally {
    n: u64,
    n_s: u64,
}

impl TrialTally {
    pub fn new(n: u64, n_s: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("tally requires at least one trial".into()));
        }
        if n_s > n {
            return Err(Error::Domain(format!(
                "tally has more successes ({n_s}) than trials ({n})"
            )));
        }
        Ok(TrialTally { n, n_s })
    }

    pub fn trials(&self) -> u64 {
        self.n
    }

    pub fn successes(&self) -> u64 {
        self.n_s
    }

    pub fn failures(&self) -> u64 {
        self.n - self.n_s
    }

    /// Raw success ratio n_s / n.
    pub fn ratio(&self) -> f64 {
        self.n_s as f64 / self.n as f64
    }

    fn is_boundary(&self) -> bool {
        self.n_s == 0 || self.n_s == self.n
    }
}

/// Interval method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Wald,
    Wilson,
    AgrestiCoull,
    Jeffreys,
}

impl CiMethod {
    pub const ALL: [CiMethod; 4] = [
        CiMethod::Wald,
        CiMethod::Wilson,
        CiMethod::AgrestiCoull,
        CiMethod::Jeffreys,
    ];
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CiMethod::Wald => "wald",
            CiMethod::Wilson => "wilson",
            CiMethod::AgrestiCoull => "agresti-coull",
            CiMethod::Jeffreys => "jeffreys",
        };
        f.write_str(s)
    }
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wald" => Ok(CiMethod::Wald),
            "wilson" => Ok(CiMethod::Wilson),
            "agresti-coull" | "agresti_coull" | "ac" => Ok(CiMethod::AgrestiCoull),
            "jeffreys" => Ok(CiMethod::Jeffreys),
            other => Err(Error::Domain(format!("unknown CI method '{other}'"))),
        }
    }
}

/// How a [`SuccessEstimate`]'s bounds were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalSource {
    /// One of the four textbook methods.
    Method(CiMethod),
    /// Symmetric margin z*sqrt(p(1-p)/(n+z^2)) around the raw ratio.
    RatioMargin,
    /// Bounds supplied directly by the caller.
    Given,
}

/// A binomial proportion point estimate with its confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub source: IntervalSource,
    pub tally: Option<TrialTally>,
    /// True when the interval collapsed to a single point (boundary tally).
    pub degenerate: bool,
}

impl SuccessEstimate {
    /// Wrap externally supplied bounds (e.g. values quoted from a table).
    pub fn from_bounds(point: f64, lower: f64, upper: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lower)
            || !(0.0..=1.0).contains(&upper)
            || !(0.0..=1.0).contains(&point)
            || lower > point
            || point > upper
        {
            return Err(Error::Domain(format!(
                "bounds must satisfy 0 <= lower <= point <= upper <= 1, got ({lower}, {point}, {upper})"
            )));
        }
        validate_alpha(alpha)?;
        Ok(SuccessEstimate {
            point,
            lower,
            upper,
            alpha,
            source: IntervalSource::Given,
            tally: None,
            degenerate: lower == upper,
        })
    }
}

fn validate_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::Domain(format!(
            "alpha must be in (0,1), got {alpha}"
        )))
    }
}

/// Point estimate of the success probability for the given method.
///
/// Wald, Wilson, and Jeffreys report the raw ratio n_s/n; Agresti–Coull
/// reports the adjusted (n_s + z²/2)/(n + z²).
pub fn point_estimate(tally: TrialTally, method: CiMethod, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    match method {
        CiMethod::Wald | CiMethod::Wilson | CiMethod::Jeffreys => Ok(tally.ratio()),
        CiMethod::AgrestiCoull => {
            let z = special::z_critical(alpha)?;
            let z2 = z * z;
            Ok((tally.successes() as f64 + z2 / 2.0) / (tally.trials() as f64 + z2))
        }
    }
}

/// Confidence interval for the success probability, clipped to [0, 1].
///
/// ```
/// use repeatstat::ci::{confidence_interval, CiMethod, TrialTally};
/// let tally = TrialTally::new(100, 50).unwrap();
/// let est = confidence_interval(tally, CiMethod::AgrestiCoull, 0.05).unwrap();
/// assert!((est.lower - 0.4038).abs() < 0.001);
/// assert!((est.upper - 0.5962).abs() < 0.001);
/// ```
pub fn confidence_interval(
    tally: TrialTally,
    method: CiMethod,
    alpha: f64,
) -> Result<SuccessEstimate> {
    validate_alpha(alpha)?;
    let n = tally.trials() as f64;
    let p_hat = tally.ratio();
    let point = point_estimate(tally, method, alpha)?;

    let (lower, upper, degenerate) = match method {
        CiMethod::Wald => {
            let z = special::z_critical(alpha)?;
            let hw = z * (p_hat * (1.0 - p_hat) / n).sqrt();
            (p_hat - hw, p_hat + hw, tally.is_boundary())
        }
        CiMethod::Wilson => {
            let z = special::z_critical(alpha)?;
            let z2 = z * z;
            let denom = 1.0 + z2 / n;
            let center = p_hat + z2 / (2.0 * n);
            let rad = z / (2.0 * n) * (4.0 * n * p_hat * (1.0 - p_hat) + z2).sqrt();
            ((center - rad) / denom, (center + rad) / denom, false)
        }
        CiMethod::AgrestiCoull => {
            let z = special::z_critical(alpha)?;
            let n_adj = n + z * z;
            let hw = z * (point * (1.0 - point) / n_adj).sqrt();
            (point - hw, point + hw, false)
        }
        CiMethod::Jeffreys => {
            let params = BetaParams::new(
                tally.successes() as f64 + 0.5,
                tally.failures() as f64 + 0.5,
            )?;
            // Standard boundary modification: the interval reaches the
            // boundary exactly when no failure (or no success) was seen.
            let lower = if tally.successes() == 0 {
                0.0
            } else {
                special::beta_quantile(Quantile::new(alpha / 2.0)?, params)?
            };
            let upper = if tally.successes() == tally.trials() {
                1.0
            } else {
                special::beta_quantile(Quantile::new(1.0 - alpha / 2.0)?, params)?
            };
            (lower, upper, false)
        }
    };

    Ok(SuccessEstimate {
        point,
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        alpha,
        source: IntervalSource::Method(method),
        tally: Some(tally),
        degenerate,
    })
}

/// Symmetric interval p̂ ± z·sqrt(p̂(1−p̂)/(n+z²)) around the raw ratio.
///
/// This is the margin form the R_c error analysis assumes: the half-width
/// is the Agresti–Coull width but the center is n_s/n, so the interval
/// collapses to a point at all-success or all-failure tallies.
pub fn ratio_margin_interval(tally: TrialTally, alpha: f64) -> Result<SuccessEstimate> {
    validate_alpha(alpha)?;
    let p_hat = tally.ratio();
    let hw = epsilon_margin(p_hat, tally.trials() as f64, alpha)?;
    Ok(SuccessEstimate {
        point: p_hat,
        lower: (p_hat - hw).clamp(0.0, 1.0),
        upper: (p_hat + hw).clamp(0.0, 1.0),
        alpha,
        source: IntervalSource::RatioMargin,
        tally: Some(tally),
        degenerate: tally.is_boundary(),
    })
}

/// Half-width ε_p = z·sqrt(p̂(1−p̂)/(n+z²)); `n` may be fractional.
pub fn epsilon_margin(p_hat: f64, n: f64, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::Domain(format!(
            "p_hat must be in [0,1], got {p_hat}"
        )));
    }
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::Domain(format!("n must be >= 1, got {n}")));
    }
    let z = special::z_critical(alpha)?;
    Ok(z * (p_hat * (1.0 - p_hat) / (n + z * z)).sqrt())
}

/// Interval width: upper − lower.
pub fn interval_width(est: &SuccessEstimate) -> f64 {
    est.upper - est.lower
}

/// Width relative to the point estimate; infinite when the point is 0.
pub fn relative_width(est: &SuccessEstimate) -> f64 {
    if est.point == 0.0 {
        f64::INFINITY
    } else {
        interval_width(est) / est.point
    }
}

/// Exact coverage C(p, n): the probability that the method's interval
/// contains the true p, summed over all possible tallies.
///
/// The exhaustive sum over k with exact binomial weights is itself the
/// brute-force definition; Monte Carlo checks live in the test suites.
pub fn exact_coverage(method: CiMethod, p: f64, n: u64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "coverage requires p in [0,1], got {p}"
        )));
    }
    validate_alpha(alpha)?;
    if n == 0 {
        return Err(Error::Domain("coverage requires n >= 1".into()));
    }
    let mut total = 0.0;
    for k in 0..=n {
        let w = special::binomial_pmf(k, n, p)?;
        if w == 0.0 {
            continue;
        }
        let est = confidence_interval(TrialTally::new(n, k)?, method, alpha)?;
        if est.lower <= p && p <= est.upper {
            total += w;
        }
    }
    Ok(total)
}
