//! The adaptive-alpha engine.
//!
//! For nested designs with n observations, j columns in the larger model,
//! q extra columns and information ratio b, the adaptive level is
//!
//! ```text
//! α(b, n) = [g + log b + C]^{q/2−1} / (b^{rate} · (1/rate)^{q/2−1} · Γ(q/2)) · C_α,
//! rate    = (n − j) / (2(n − 1)),
//! ```
//!
//! with g the upper-α₀ point of the statistic's Gamma null law. Everything
//! is evaluated in log space.

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, CalibrationConstant, CalibrationStrategy, StrategyDescriptor};
use crate::distcore::special::ln_gamma;
use crate::distcore::{gamma_quantile_upper, null_law, GammaLaw};
use crate::error::{Error, Result};
use crate::linmod::{anova_log_b, DesignPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    /// Unclamped adaptive level.
    pub alpha_adaptive: f64,
    /// `alpha_adaptive` clamped to [0, 1] for display.
    pub alpha_display: f64,
    pub g: f64,
    pub adaptive_quantile: f64,
    pub log_b: f64,
    #[serde(rename = "C")]
    pub c_prior: f64,
    #[serde(rename = "C_alpha")]
    pub c_alpha: f64,
    pub n: usize,
    pub j: usize,
    pub q: usize,
    pub strategy: StrategyDescriptor,
}

/// g + log b + C: the adaptive threshold on the scale of the statistic.
pub fn adaptive_quantile(g: f64, log_b: f64, c_prior: f64) -> f64 {
    g + log_b + c_prior
}

/// The adaptive alpha without its C_α factor.
pub fn alpha_kernel(log_b: f64, n: usize, j: usize, q: usize, c_prior: f64, g: f64) -> Result<f64> {
    if n <= j {
        return Err(Error::DegenerateDesign { n, j });
    }
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    if !(log_b.is_finite() && c_prior.is_finite() && g.is_finite()) {
        return Err(Error::domain("log b, C and g must be finite"));
    }
    let bracket = adaptive_quantile(g, log_b, c_prior);
    if bracket <= 0.0 {
        return Err(Error::NonpositiveBracket {
            g,
            log_b,
            c_prior,
            sum: bracket,
        });
    }
    let rate = (n - j) as f64 / (2.0 * (n - 1) as f64);
    let half_q = q as f64 / 2.0;
    Ok(
        ((half_q - 1.0) * bracket.ln() - rate * log_b + (half_q - 1.0) * rate.ln()
            - ln_gamma(half_q))
        .exp(),
    )
}

/// Adaptive alpha for a design with the given `log_b`, calibrated by `cal`.
pub fn adaptive_alpha(
    log_b: f64,
    n: usize,
    j: usize,
    q: usize,
    cal: &CalibrationConstant,
) -> Result<AlphaResult> {
    let g = gamma_quantile_upper(&null_law(n, j, q)?, cal.alpha0)?;
    let alpha = alpha_kernel(log_b, n, j, q, cal.c_prior, g)? * cal.c_alpha;
    Ok(AlphaResult {
        alpha_adaptive: alpha,
        alpha_display: alpha.clamp(0.0, 1.0),
        g,
        adaptive_quantile: adaptive_quantile(g, log_b, cal.c_prior),
        log_b,
        c_prior: cal.c_prior,
        c_alpha: cal.c_alpha,
        n,
        j,
        q,
        strategy: cal.strategy.clone(),
    })
}

/// Calibrate and evaluate in one step. `anchor_log_b` gives the design's
/// log b at another total sample size (only consulted when anchored).
pub fn adaptive_alpha_for(
    point: &DesignPoint,
    strategy: &CalibrationStrategy,
    anchor_log_b: &dyn Fn(usize) -> Result<f64>,
) -> Result<AlphaResult> {
    let cal = calibrate(strategy, point, anchor_log_b)?;
    adaptive_alpha(point.log_b, point.n, point.j, point.q, &cal)
}

/// The BIC-based adaptive alpha for i.i.d. models with simple calibration:
/// [χ² + q log n]^{q/2−1} / (2^{q/2−1} n^{q/2} Γ(q/2)) · e^{−χ²/2}.
pub fn bic_adaptive_alpha(n: usize, q: usize, alpha0: f64) -> Result<AlphaResult> {
    if n < 2 {
        return Err(Error::domain(format!("need n >= 2, got {n}")));
    }
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(Error::domain(format!(
            "alpha0 must lie in (0, 1), got {alpha0}"
        )));
    }
    let chi2 = gamma_quantile_upper(&GammaLaw::chi_squared(q)?, alpha0)?;
    let alpha = bic_kernel(n, q, chi2) * (-chi2 / 2.0).exp();
    let qf = q as f64;
    let log_n = (n as f64).ln();
    Ok(AlphaResult {
        alpha_adaptive: alpha,
        alpha_display: alpha.clamp(0.0, 1.0),
        g: chi2,
        adaptive_quantile: chi2 + qf * log_n,
        log_b: qf * log_n,
        c_prior: 0.0,
        c_alpha: (-chi2 / 2.0).exp(),
        n,
        j: q,
        q,
        strategy: StrategyDescriptor {
            name: "bic".into(),
            alpha0,
            anchor_n: None,
            pbic: None,
        },
    })
}

/// The BIC-based alpha without its C_α factor.
pub fn bic_kernel(n: usize, q: usize, chi2: f64) -> f64 {
    let half_q = q as f64 / 2.0;
    let log_n = (n as f64).ln();
    ((half_q - 1.0) * (chi2 + q as f64 * log_n).ln()
        - (half_q - 1.0) * std::f64::consts::LN_2
        - half_q * log_n
        - ln_gamma(half_q))
    .exp()
}

/// BIC-based alpha anchored so that it equals α₀ at sample size `anchor_n`.
pub fn bic_adaptive_alpha_anchored(
    n: usize,
    q: usize,
    alpha0: f64,
    anchor_n: usize,
) -> Result<f64> {
    let base = bic_adaptive_alpha(n, q, alpha0)?;
    let chi2 = base.g;
    Ok(alpha0 * bic_kernel(n, q, chi2) / bic_kernel(anchor_n.max(2), q, chi2))
}

/// Balanced one-way ANOVA with k groups of r: n = k·r, j = k, q = k − 1,
/// b = r^{k−1}/k. Anchored strategies take `anchor_n` as the total size k·r₀.
pub fn anova_adaptive_alpha(
    k: usize,
    r: usize,
    strategy: &CalibrationStrategy,
) -> Result<AlphaResult> {
    if k < 2 || r < 2 {
        return Err(Error::domain(format!(
            "need k >= 2 and r >= 2, got k {k}, r {r}"
        )));
    }
    let point = DesignPoint {
        n: k * r,
        j: k,
        q: k - 1,
        log_b: anova_log_b(k, r),
    };
    let anchor = |n0: usize| -> Result<f64> {
        if !n0.is_multiple_of(k) || n0 / k < 2 {
            return Err(Error::domain(format!(
                "anchor size {n0} is not a balanced layout of {k} groups with r0 >= 2"
            )));
        }
        Ok(anova_log_b(k, n0 / k))
    };
    adaptive_alpha_for(&point, strategy, &anchor)
}
