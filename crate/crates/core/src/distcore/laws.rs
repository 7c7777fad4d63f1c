use serde::{Deserialize, Serialize};

use super::special::{beta_inc, gamma_q, ln_gamma, ln_gamma_q};
use crate::error::{Error, Result};

/// Absolute tolerance on the probability scale for quantile inversion.
pub const QUANTILE_PROB_TOL: f64 = 1e-12;
const QUANTILE_MAX_ITER: usize = 400;

/// Gamma law with shape/rate parameterisation: density ∝ z^{shape-1} e^{-rate z}.
///
/// The null law of the likelihood-ratio statistic for nested models with
/// `q` extra columns is `GammaLaw { shape: q/2, rate: (n-j)/(2(n-1)) }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    shape: f64,
    rate: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::domain(format!(
                "gamma shape must be positive, got {shape}"
            )));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::domain(format!(
                "gamma rate must be positive, got {rate}"
            )));
        }
        Ok(Self { shape, rate })
    }

    /// χ²(q), the large-sample limit of the null law.
    pub fn chi_squared(q: usize) -> Result<Self> {
        Self::new(q as f64 / 2.0, 0.5)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn cdf(&self, z: f64) -> f64 {
        1.0 - gamma_q(self.shape, self.rate * z.max(0.0))
    }
}

/// Null law of the statistic for `n` observations, `j` columns in the larger
/// model and `q` extra columns.
pub fn null_law(n: usize, j: usize, q: usize) -> Result<GammaLaw> {
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    if j == 0 {
        return Err(Error::domain("j must be at least 1"));
    }
    if n <= j {
        return Err(Error::DegenerateDesign { n, j });
    }
    GammaLaw::new(q as f64 / 2.0, (n - j) as f64 / (2.0 * (n - 1) as f64))
}

fn check_point(z: f64) -> Result<()> {
    if z.is_nan() || z.is_infinite() || z < 0.0 {
        return Err(Error::domain(format!(
            "evaluation point must be finite and >= 0, got {z}"
        )));
    }
    Ok(())
}

/// P(Z > z) for Z ~ `law`.
pub fn gamma_upper_tail(law: &GammaLaw, z: f64) -> Result<f64> {
    check_point(z)?;
    Ok(gamma_q(law.shape, law.rate * z))
}

/// The value g with P(Z > g) = alpha.
///
/// Solves on the standardised scale x = rate·z with a bracketed Newton
/// iteration on log Q; steps leaving the bracket fall back to bisection.
pub fn gamma_quantile_upper(law: &GammaLaw, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let s = law.shape;
    let target = alpha.ln();

    let mut lo = 0.0_f64;
    let mut hi = s.max(1.0);
    while ln_gamma_q(s, hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Convergence {
                what: "gamma quantile bracket",
                iterations: 0,
                estimate: hi,
                residual: f64::NAN,
            });
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..QUANTILE_MAX_ITER {
        let lq = ln_gamma_q(s, x);
        let resid = lq - target;
        if resid > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx log Q = -x^{s-1} e^{-x} / (Γ(s) Q)
        let ln_density = (s - 1.0) * x.ln() - x - ln_gamma(s);
        let slope = -(ln_density - lq).exp();
        let mut next = x - resid / slope;
        if !(next.is_finite() && next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let settled =
            (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * hi;
        x = next;
        if settled {
            let gap = ln_gamma_q(s, x).exp() - alpha;
            if gap.abs() <= QUANTILE_PROB_TOL {
                return Ok(x / law.rate);
            }
            break;
        }
    }
    Err(Error::Convergence {
        what: "gamma quantile",
        iterations: QUANTILE_MAX_ITER,
        estimate: x / law.rate,
        residual: ln_gamma_q(s, x).exp() - alpha,
    })
}

/// Leading term of the asymptotic expansion of the upper tail,
/// g^{s-1} e^{-rate g} / ((1/rate)^{s-1} Γ(s)).
///
/// Not clamped: for small `g` and shape < 1 the value can exceed 1.
pub fn asymptotic_upper_tail(law: &GammaLaw, g: f64) -> Result<f64> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::domain(format!(
            "tail point must be finite and positive, got {g}"
        )));
    }
    let s = law.shape;
    let x = law.rate * g;
    Ok(((s - 1.0) * x.ln() - x - ln_gamma(s)).exp())
}

/// Exact finite-sample null law: T = -scale · log Y with Y ~ Beta(a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaNullLaw {
    a: f64,
    b: f64,
    scale: f64,
}

impl BetaNullLaw {
    pub fn new(a: f64, b: f64, scale: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!(
                "beta parameters must be positive, got ({a}, {b})"
            )));
        }
        if !(scale.is_finite() && scale >= 1.0) {
            return Err(Error::domain(format!("scale must be >= 1, got {scale}")));
        }
        Ok(Self { a, b, scale })
    }

    /// Beta((n-j)/2, q/2) with log-transform multiplier n-1.
    pub fn from_dims(n: usize, j: usize, q: usize) -> Result<Self> {
        if n <= j {
            return Err(Error::DegenerateDesign { n, j });
        }
        if q == 0 {
            return Err(Error::domain("q must be at least 1"));
        }
        Self::new((n - j) as f64 / 2.0, q as f64 / 2.0, (n - 1) as f64)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// P(Y ≤ y) for the residual ratio itself.
    pub fn ratio_cdf(&self, y: f64) -> f64 {
        beta_inc(self.a, self.b, y)
    }
}

/// P(T > z) = P(Y < e^{-z/scale}).
pub fn exact_null_tail(law: &BetaNullLaw, z: f64) -> Result<f64> {
    check_point(z)?;
    Ok(law.ratio_cdf((-z / law.scale).exp()))
}
