//! Calibration constants C_α for the adaptive alpha, the PBIC prior constant
//! C, and effective sample sizes for the worked designs.

use serde::{Deserialize, Serialize};

use crate::alpha::alpha_kernel;
use crate::distcore::{gamma_quantile_upper, null_law, GammaLaw};
use crate::error::{Error, Result};
use crate::linmod::{harmonic, DesignPoint};

/// One PBIC term: the effect estimate ξ̂, its scale d and effective sample size nᵉ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PbicTerm {
    pub xi_hat: f64,
    pub d: f64,
    pub n_eff: f64,
}

impl PbicTerm {
    pub fn new(xi_hat: f64, d: f64, n_eff: f64) -> Result<Self> {
        let t = Self { xi_hat, d, n_eff };
        t.v()?;
        Ok(t)
    }

    /// v = ξ̂ / (d (1 + nᵉ)).
    pub fn v(&self) -> Result<f64> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::domain(format!(
                "PBIC scale d must be positive, got {}",
                self.d
            )));
        }
        if !(self.n_eff > 0.0 && self.n_eff.is_finite()) {
            return Err(Error::domain(format!(
                "PBIC effective sample size must be positive, got {}",
                self.n_eff
            )));
        }
        let v = self.xi_hat / (self.d * (1.0 + self.n_eff));
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::domain(format!(
                "PBIC v must be finite and >= 0, got {v}"
            )));
        }
        Ok(v)
    }
}

/// PBIC terms of the null model (`terms_i`) and the larger model (`terms_j`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PbicInputs {
    pub terms_i: Vec<PbicTerm>,
    pub terms_j: Vec<PbicTerm>,
}

impl PbicInputs {
    /// A single PBIC term on the larger model, as in the one-parameter tests.
    pub fn single(xi_hat: f64, d: f64, n_eff: f64) -> Result<Self> {
        Ok(Self {
            terms_i: Vec::new(),
            terms_j: vec![PbicTerm::new(xi_hat, d, n_eff)?],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    Simple,
    MinimalBalanced,
    /// C_α fixed so the adaptive alpha equals α₀ at total sample size `anchor_n`.
    Anchored {
        anchor_n: usize,
    },
    Pbic {
        inputs: PbicInputs,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStrategy {
    #[serde(flatten)]
    pub kind: StrategyKind,
    pub alpha0: f64,
}

/// Compact, serialisable record of how an alpha was calibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyDescriptor {
    pub name: String,
    pub alpha0: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pbic: Option<PbicInputs>,
}

impl CalibrationStrategy {
    pub fn new(kind: StrategyKind, alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 < 1.0) {
            return Err(Error::domain(format!(
                "alpha0 must lie in (0, 1), got {alpha0}"
            )));
        }
        if let StrategyKind::Pbic { inputs } = &kind {
            for t in inputs.terms_i.iter().chain(&inputs.terms_j) {
                t.v()?;
            }
        }
        Ok(Self { kind, alpha0 })
    }

    pub fn simple(alpha0: f64) -> Result<Self> {
        Self::new(StrategyKind::Simple, alpha0)
    }

    pub fn minimal_balanced(alpha0: f64) -> Result<Self> {
        Self::new(StrategyKind::MinimalBalanced, alpha0)
    }

    pub fn anchored(anchor_n: usize, alpha0: f64) -> Result<Self> {
        Self::new(StrategyKind::Anchored { anchor_n }, alpha0)
    }

    pub fn pbic(inputs: PbicInputs, alpha0: f64) -> Result<Self> {
        Self::new(StrategyKind::Pbic { inputs }, alpha0)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::Simple => "simple",
            StrategyKind::MinimalBalanced => "minimal",
            StrategyKind::Anchored { .. } => "anchored",
            StrategyKind::Pbic { .. } => "pbic",
        }
    }

    pub fn descriptor(&self) -> StrategyDescriptor {
        StrategyDescriptor {
            name: self.name().to_string(),
            alpha0: self.alpha0,
            anchor_n: match self.kind {
                StrategyKind::Anchored { anchor_n } => Some(anchor_n),
                _ => None,
            },
            pbic: match &self.kind {
                StrategyKind::Pbic { inputs } => Some(inputs.clone()),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConstant {
    pub c_alpha: f64,
    /// The prior constant C (0 unless PBIC).
    pub c_prior: f64,
    pub alpha0: f64,
    pub strategy: StrategyDescriptor,
}

fn check_alpha0(alpha0: f64) -> Result<()> {
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(Error::domain(format!(
            "alpha0 must lie in (0, 1), got {alpha0}"
        )));
    }
    Ok(())
}

/// Checks that `law` is the null law at (n, j) and returns its rate.
fn checked_rate(n: usize, j: usize, law: &GammaLaw) -> Result<f64> {
    if n <= j {
        return Err(Error::DegenerateDesign { n, j });
    }
    let rate = (n - j) as f64 / (2.0 * (n - 1) as f64);
    if (law.rate() - rate).abs() > 1e-12 * rate {
        return Err(Error::domain(format!(
            "law rate {} does not match (n-j)/(2(n-1)) = {rate}",
            law.rate()
        )));
    }
    Ok(rate)
}

fn constant(
    c_alpha: f64,
    c_prior: f64,
    strategy: &CalibrationStrategy,
) -> Result<CalibrationConstant> {
    if !(c_alpha > 0.0 && c_alpha.is_finite()) {
        return Err(Error::domain(format!(
            "calibration constant must be positive, got {c_alpha}"
        )));
    }
    Ok(CalibrationConstant {
        c_alpha,
        c_prior,
        alpha0: strategy.alpha0,
        strategy: strategy.descriptor(),
    })
}

/// C_α = exp(−rate · g), with g the upper-α₀ point of `law`.
pub fn c_alpha_simple(
    n: usize,
    j: usize,
    law: &GammaLaw,
    alpha0: f64,
) -> Result<CalibrationConstant> {
    check_alpha0(alpha0)?;
    let rate = checked_rate(n, j, law)?;
    let g = gamma_quantile_upper(law, alpha0)?;
    constant(
        (-rate * g).exp(),
        0.0,
        &CalibrationStrategy::simple(alpha0)?,
    )
}

/// C_α from the minimal balanced one-way layout: q+1 groups of two
/// observations, so n = 2(q+1), j = q+1 and b = 2^q/(q+1).
pub fn c_alpha_minimal_balanced(q: usize, alpha0: f64) -> Result<CalibrationConstant> {
    check_alpha0(alpha0)?;
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    let (n, j) = (2 * (q + 1), q + 1);
    let g = gamma_quantile_upper(&null_law(n, j, q)?, alpha0)?;
    let qf = q as f64;
    let log_b_min = qf * std::f64::consts::LN_2 - (qf + 1.0).ln();
    let exponent = (qf + 1.0) / (2.0 * (2.0 * qf + 1.0));
    let ln_c = alpha0.ln() + exponent * log_b_min + crate::distcore::special::ln_gamma(qf / 2.0)
        - (qf / 2.0 - 1.0) * (g + log_b_min).ln();
    constant(
        ln_c.exp(),
        0.0,
        &CalibrationStrategy::minimal_balanced(alpha0)?,
    )
}

/// The reduced one-way-layout alpha with group sizes `n_k`, q = m − 1:
/// [g + log(Πn_k/n)]^{q/2−1} / ((Πn_k/n)^{(q+1)/(2(2q+1))} Γ(q/2)) · C_α.
///
/// This reduced form omits the (2(n−1)/(n−j))^{q/2−1} factor of the general
/// formula; with the minimal-balanced C_α it returns α₀ at n_k = 2.
pub fn one_way_reduced_alpha(group_sizes: &[usize], alpha0: f64, c_alpha: f64) -> Result<f64> {
    check_alpha0(alpha0)?;
    let m = group_sizes.len();
    if m < 2 || group_sizes.iter().any(|&s| s < 1) {
        return Err(Error::domain("need at least two non-empty groups"));
    }
    let n: usize = group_sizes.iter().sum();
    let q = m - 1;
    let qf = q as f64;
    let g = gamma_quantile_upper(&null_law(n, m, q)?, alpha0)?;
    let log_b = group_sizes.iter().map(|&s| (s as f64).ln()).sum::<f64>() - (n as f64).ln();
    let bracket = g + log_b;
    if bracket <= 0.0 {
        return Err(Error::NonpositiveBracket {
            g,
            log_b,
            c_prior: 0.0,
            sum: bracket,
        });
    }
    let exponent = (qf + 1.0) / (2.0 * (2.0 * qf + 1.0));
    Ok(((qf / 2.0 - 1.0) * bracket.ln()
        - exponent * log_b
        - crate::distcore::special::ln_gamma(qf / 2.0))
    .exp()
        * c_alpha)
}

/// Design at which an anchored calibration is pinned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPoint {
    pub n0: usize,
    pub j: usize,
    pub q: usize,
    pub log_b0: f64,
}

/// C_α such that the adaptive alpha equals α₀ at the anchor.
pub fn c_alpha_anchored(
    anchor: &AnchorPoint,
    alpha0: f64,
    c_prior: f64,
) -> Result<CalibrationConstant> {
    check_alpha0(alpha0)?;
    if anchor.n0 <= anchor.j {
        return Err(Error::DegenerateDesign {
            n: anchor.n0,
            j: anchor.j,
        });
    }
    let g = gamma_quantile_upper(&null_law(anchor.n0, anchor.j, anchor.q)?, alpha0)?;
    let kernel = alpha_kernel(anchor.log_b0, anchor.n0, anchor.j, anchor.q, c_prior, g)?;
    if !(kernel > 0.0 && kernel.is_finite()) {
        return Err(Error::DegenerateAnchor(format!(
            "kernel at n0 = {} evaluates to {kernel}",
            anchor.n0
        )));
    }
    let strategy = CalibrationStrategy::anchored(anchor.n0, alpha0)?;
    constant(alpha0 / kernel, c_prior, &strategy)
}

/// ln((1 − e^{−v}) / (√2 v)), continuous at v = 0 where it equals −ln √2.
fn pbic_term_log(v: f64) -> f64 {
    if v == 0.0 {
        return -0.5 * std::f64::consts::LN_2;
    }
    // (1 − e^{−v})/v, accurate for small v
    let ratio = -(-v).exp_m1() / v;
    ratio.ln() - 0.5 * std::f64::consts::LN_2
}

/// C = 2 Σ_i ln((1−e^{−v})/(√2 v)) − 2 Σ_j ln((1−e^{−v})/(√2 v)).
pub fn pbic_constant(inputs: &PbicInputs) -> Result<f64> {
    let mut c = 0.0;
    for t in &inputs.terms_i {
        c += 2.0 * pbic_term_log(t.v()?);
    }
    for t in &inputs.terms_j {
        c -= 2.0 * pbic_term_log(t.v()?);
    }
    Ok(c)
}

/// C_α = exp(−rate · (g + C)).
pub fn c_alpha_pbic(
    n: usize,
    j: usize,
    law: &GammaLaw,
    alpha0: f64,
    inputs: &PbicInputs,
) -> Result<CalibrationConstant> {
    check_alpha0(alpha0)?;
    let rate = checked_rate(n, j, law)?;
    let c = pbic_constant(inputs)?;
    c_alpha_pbic_with_constant(
        rate,
        law,
        alpha0,
        c,
        CalibrationStrategy::pbic(inputs.clone(), alpha0)?,
    )
}

/// As [`c_alpha_pbic`], from an already evaluated prior constant C.
pub fn c_alpha_pbic_from_constant(
    n: usize,
    j: usize,
    law: &GammaLaw,
    alpha0: f64,
    c: f64,
) -> Result<CalibrationConstant> {
    check_alpha0(alpha0)?;
    let rate = checked_rate(n, j, law)?;
    c_alpha_pbic_with_constant(
        rate,
        law,
        alpha0,
        c,
        CalibrationStrategy::pbic(PbicInputs::default(), alpha0)?,
    )
}

fn c_alpha_pbic_with_constant(
    rate: f64,
    law: &GammaLaw,
    alpha0: f64,
    c: f64,
    strategy: CalibrationStrategy,
) -> Result<CalibrationConstant> {
    if !c.is_finite() {
        return Err(Error::domain(format!(
            "prior constant must be finite, got {c}"
        )));
    }
    let g = gamma_quantile_upper(law, alpha0)?;
    constant((-rate * (g + c)).exp(), c, &strategy)
}

/// Calibrate `strategy` at a design point. `anchor_log_b` maps a total
/// sample size to the design's log b at that size (used only when anchored).
pub fn calibrate(
    strategy: &CalibrationStrategy,
    point: &DesignPoint,
    anchor_log_b: &dyn Fn(usize) -> Result<f64>,
) -> Result<CalibrationConstant> {
    let law = null_law(point.n, point.j, point.q)?;
    let alpha0 = strategy.alpha0;
    match &strategy.kind {
        StrategyKind::Simple => c_alpha_simple(point.n, point.j, &law, alpha0),
        StrategyKind::MinimalBalanced => c_alpha_minimal_balanced(point.q, alpha0),
        StrategyKind::Anchored { anchor_n } => {
            if *anchor_n <= point.j {
                return Err(Error::domain(format!(
                    "anchor sample size {anchor_n} must exceed j = {}",
                    point.j
                )));
            }
            let anchor = AnchorPoint {
                n0: *anchor_n,
                j: point.j,
                q: point.q,
                log_b0: anchor_log_b(*anchor_n)?,
            };
            c_alpha_anchored(&anchor, alpha0, 0.0)
        }
        StrategyKind::Pbic { inputs } => {
            if inputs.terms_i.is_empty() && inputs.terms_j.is_empty() {
                return Err(Error::MissingInput(
                    "PBIC calibration needs per-parameter (xi_hat, d, n_eff) inputs".into(),
                ));
            }
            c_alpha_pbic(point.n, point.j, &law, alpha0, inputs)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TessDesign {
    BalancedAnova {
        k: usize,
        r: usize,
    },
    Findley {
        n: usize,
    },
    TwoMeans {
        n1: usize,
        n2: usize,
        var1: f64,
        var2: f64,
    },
}

/// Effective sample size nᵉ and PBIC scale d. The balanced one-way layout
/// has nᵉ = r and no canonical d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tess {
    pub n_eff: f64,
    pub d: Option<f64>,
}

pub fn tess(design: TessDesign) -> Result<Tess> {
    match design {
        TessDesign::BalancedAnova { k, r } => {
            if k < 2 || r < 1 {
                return Err(Error::domain(format!("need k >= 2, r >= 1, got {k}, {r}")));
            }
            Ok(Tess {
                n_eff: r as f64,
                d: None,
            })
        }
        TessDesign::Findley { n } => {
            if n < 1 {
                return Err(Error::domain("need n >= 1"));
            }
            let h = harmonic(n);
            Ok(Tess {
                n_eff: h,
                d: Some(1.0 / h),
            })
        }
        TessDesign::TwoMeans { n1, n2, var1, var2 } => {
            if n1 < 1 || n2 < 1 || !(var1 > 0.0) || !(var2 > 0.0) {
                return Err(Error::domain(
                    "two-means TESS needs positive sizes and variances",
                ));
            }
            let (n1, n2) = (n1 as f64, n2 as f64);
            let d = var1 / n1 + var2 / n2;
            let n_eff = (n1 * n1 / var1).max(n2 * n2 / var2) * d;
            Ok(Tess { n_eff, d: Some(d) })
        }
    }
}
