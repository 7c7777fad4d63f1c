//! One-way ANOVA power via the noncentral F distribution, and the
//! replicate-count solver used to pick designed-experiment anchors.

use serde::{Deserialize, Serialize};

use super::special::{beta_inc, ln_gamma};
use crate::error::{Error, Result};

/// Poisson mass left unsummed in the noncentral F mixture.
pub const POISSON_TAIL_TOL: f64 = 1e-12;
const MAX_REPLICATES: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerDesign {
    /// Number of groups.
    pub k: usize,
    /// Effect size in σ units (Cohen's f).
    pub f: f64,
    pub alpha: f64,
    pub power: f64,
}

impl PowerDesign {
    pub fn new(k: usize, f: f64, alpha: f64, power: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("need at least 2 groups, got {k}")));
        }
        if !(f.is_finite() && f >= 0.0) {
            return Err(Error::domain(format!(
                "effect size must be finite and >= 0, got {f}"
            )));
        }
        if !(alpha > 0.0 && alpha < power && power < 1.0) {
            return Err(Error::domain(format!(
                "need 0 < alpha < power < 1, got alpha {alpha}, power {power}"
            )));
        }
        Ok(Self { k, f, alpha, power })
    }
}

/// Upper-`alpha` critical value of the central F(d1, d2).
pub fn central_f_critical(d1: f64, d2: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    // Solve I_x(d1/2, d2/2) = 1 - alpha for x, then map x -> F.
    let (a, b) = (d1 / 2.0, d2 / 2.0);
    let target = 1.0 - alpha;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_inc(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(d2 * x / (d1 * (1.0 - x)))
}

/// P(F' > f) for F' ~ noncentral F(d1, d2, λ), summed as a Poisson(λ/2)
/// mixture of central incomplete-beta terms outward from the Poisson mode.
pub fn noncentral_f_upper_tail(f: f64, d1: f64, d2: f64, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!(
            "noncentrality must be finite and >= 0, got {lambda}"
        )));
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    let x = d1 * f / (d1 * f + d2);
    let half = lambda / 2.0;
    let weight = |k: f64| {
        if half == 0.0 {
            if k == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (k * half.ln() - half - ln_gamma(k + 1.0)).exp()
        }
    };
    let term = |k: f64| beta_inc(d1 / 2.0 + k, d2 / 2.0, x);

    let mode = half.floor();
    let mut mass = weight(mode);
    let mut cdf = mass * term(mode);
    let (mut up, mut down) = (mode + 1.0, mode - 1.0);
    while 1.0 - mass > POISSON_TAIL_TOL {
        let wu = weight(up);
        let wd = if down >= 0.0 { weight(down) } else { 0.0 };
        if wu == 0.0 && wd == 0.0 {
            break;
        }
        cdf += wu * term(up);
        mass += wu;
        up += 1.0;
        if down >= 0.0 {
            cdf += wd * term(down);
            mass += wd;
            down -= 1.0;
        }
    }
    Ok((1.0 - cdf).clamp(0.0, 1.0))
}

/// Power of the level-`alpha` one-way ANOVA F test with `k` groups of `r`
/// replicates and effect size `f`; noncentrality λ = k·r·f².
pub fn anova_power(k: usize, r: usize, f: f64, alpha: f64) -> Result<f64> {
    if k < 2 || r < 2 {
        return Err(Error::domain(format!(
            "need k >= 2 and r >= 2, got k {k}, r {r}"
        )));
    }
    let d1 = (k - 1) as f64;
    let d2 = (k * r - k) as f64;
    let crit = central_f_critical(d1, d2, alpha)?;
    noncentral_f_upper_tail(crit, d1, d2, (k * r) as f64 * f * f)
}

/// Smallest per-group replicate count reaching the design's power target.
pub fn solve_replicates(design: &PowerDesign) -> Result<usize> {
    if design.f == 0.0 {
        return Err(Error::NoSolution(
            "effect size 0: power never exceeds alpha".to_string(),
        ));
    }
    let reaches = |r: usize| -> Result<bool> {
        Ok(anova_power(design.k, r, design.f, design.alpha)? >= design.power)
    };
    if reaches(2)? {
        return Ok(2);
    }
    let mut lo = 2;
    let mut hi = 4;
    while !reaches(hi)? {
        lo = hi;
        hi *= 2;
        if hi > MAX_REPLICATES {
            return Err(Error::NoSolution(format!(
                "power {} not reached with {MAX_REPLICATES} replicates per group",
                design.power
            )));
        }
    }
    // invariant: !reaches(lo), reaches(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
