//! End-to-end nested-model tests: statistic, p-values, adaptive threshold
//! and the two decisions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::alpha::{adaptive_alpha, AlphaResult};
use crate::calibration::{calibrate, CalibrationStrategy, StrategyDescriptor};
use crate::dataset::Dataset;
use crate::distcore::{exact_null_tail, gamma_upper_tail, null_law, BetaNullLaw};
use crate::error::{Error, Result};
use crate::linmod::{
    log_b_correlation, log_b_direct, lr_statistic, DesignPoint, NestedPair, PredictorStats,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub g: f64,
    #[serde(rename = "C")]
    pub c_prior: f64,
    #[serde(rename = "C_alpha")]
    pub c_alpha: f64,
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub q: usize,
    pub strategy: StrategyDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    #[serde(rename = "T")]
    pub t: f64,
    /// Tail of the exact Beta law of the residual ratio.
    pub p_exact: f64,
    /// Tail of the Gamma null law; the headline p-value.
    pub p_gamma: f64,
    pub alpha_adaptive: f64,
    pub alpha_display: f64,
    pub classical_alpha: f64,
    pub reject_adaptive: bool,
    pub reject_classical: bool,
    pub log_b: f64,
    pub adaptive_quantile: f64,
    pub diagnostics: Diagnostics,
}

/// log b at another total sample size for a general design: scaling every
/// entering direction's information by (n₀−1)/(n−1).
pub fn rescaled_log_b(log_b: f64, n: usize, q: usize, n0: usize) -> Result<f64> {
    if n0 < 2 {
        return Err(Error::domain(format!(
            "anchor size must be at least 2, got {n0}"
        )));
    }
    Ok(log_b + q as f64 * (((n0 - 1) as f64).ln() - ((n - 1) as f64).ln()))
}

/// The threshold a report is judged against, for a design point.
pub fn threshold(point: &DesignPoint, strategy: &CalibrationStrategy) -> Result<AlphaResult> {
    let anchor = |n0: usize| rescaled_log_b(point.log_b, point.n, point.q, n0);
    let cal = calibrate(strategy, point, &anchor)?;
    adaptive_alpha(point.log_b, point.n, point.j, point.q, &cal)
}

/// Assemble a report from a statistic and a computed threshold.
pub fn report_from(t: f64, i: usize, alpha: &AlphaResult) -> Result<TestReport> {
    let (n, j, q) = (alpha.n, alpha.j, alpha.q);
    let p_gamma = gamma_upper_tail(&null_law(n, j, q)?, t)?;
    let p_exact = exact_null_tail(&BetaNullLaw::from_dims(n, j, q)?, t)?;
    let classical = alpha.strategy.alpha0;
    Ok(TestReport {
        t,
        p_exact,
        p_gamma,
        alpha_adaptive: alpha.alpha_adaptive,
        alpha_display: alpha.alpha_display,
        classical_alpha: classical,
        reject_adaptive: p_gamma < alpha.alpha_adaptive,
        reject_classical: p_gamma < classical,
        log_b: alpha.log_b,
        adaptive_quantile: alpha.adaptive_quantile,
        diagnostics: Diagnostics {
            g: alpha.g,
            c_prior: alpha.c_prior,
            c_alpha: alpha.c_alpha,
            n,
            i,
            j,
            q,
            strategy: alpha.strategy.clone(),
        },
    })
}

pub fn run_nested_test(
    pair: &NestedPair,
    y: &DVector<f64>,
    strategy: &CalibrationStrategy,
) -> Result<TestReport> {
    let lr = lr_statistic(pair, y)?;
    let point = DesignPoint::from_pair(pair)?;
    report_from(lr.t, pair.i(), &threshold(&point, strategy)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDiagnostics {
    pub response: String,
    pub retained: Vec<String>,
    pub entering: Vec<String>,
    /// Sample variances (divisor n−1) of the entering predictors.
    pub entering_variances: Vec<f64>,
    /// Correlations, rows = retained predictors, columns = entering ones.
    pub cross_correlations: Vec<Vec<f64>>,
    pub log_b_direct: f64,
    pub log_b_correlation: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub report: TestReport,
    pub regression: RegressionDiagnostics,
}

fn design(data: &Dataset, names: &[&str]) -> Result<DMatrix<f64>> {
    let n = data.n_rows();
    let mut x = DMatrix::from_element(n, names.len() + 1, 1.0);
    for (k, name) in names.iter().enumerate() {
        x.set_column(k + 1, &DVector::from_column_slice(data.column(name)?));
    }
    Ok(x)
}

fn check_unique(names: &[&str], what: &str) -> Result<()> {
    for (k, name) in names.iter().enumerate() {
        if names[..k].contains(name) {
            return Err(Error::domain(format!(
                "{what} predictor {name:?} listed twice"
            )));
        }
    }
    Ok(())
}

/// Regression of `response` on an intercept plus `null_predictors` against
/// an intercept plus `alt_predictors`. The intercept is implicit in both.
pub fn run_regression_test(
    data: &Dataset,
    response: &str,
    null_predictors: &[&str],
    alt_predictors: &[&str],
    strategy: &CalibrationStrategy,
) -> Result<RegressionReport> {
    check_unique(null_predictors, "null")?;
    check_unique(alt_predictors, "alternative")?;
    if let Some(missing) = null_predictors.iter().find(|p| !alt_predictors.contains(p)) {
        return Err(Error::domain(format!(
            "null predictor {missing:?} is not among the alternative predictors"
        )));
    }
    if null_predictors.contains(&response) || alt_predictors.contains(&response) {
        return Err(Error::domain(format!(
            "response {response:?} is also a predictor"
        )));
    }
    let entering: Vec<&str> = alt_predictors
        .iter()
        .copied()
        .filter(|p| !null_predictors.contains(p))
        .collect();
    if entering.is_empty() {
        return Err(Error::domain("the alternative adds no predictors"));
    }
    let n = data.n_rows();
    if n <= alt_predictors.len() + 1 {
        return Err(Error::DegenerateDesign {
            n,
            j: alt_predictors.len() + 1,
        });
    }

    let y = DVector::from_column_slice(data.column(response)?);
    // Retained columns first so the larger design extends the smaller one.
    let ordered: Vec<&str> = null_predictors.iter().chain(&entering).copied().collect();
    let pair = NestedPair::new(design(data, null_predictors)?, design(data, &ordered)?)?;

    let retained_cols = null_predictors
        .iter()
        .map(|p| data.column(p))
        .collect::<Result<Vec<_>>>()?;
    let entering_cols = entering
        .iter()
        .map(|p| data.column(p))
        .collect::<Result<Vec<_>>>()?;
    let stats = PredictorStats::from_columns(&retained_cols, &entering_cols)?;
    let via_correlation = log_b_correlation(&stats, entering.len())?;
    let via_direct = log_b_direct(&pair)?;

    let report = run_nested_test(&pair, &y, strategy)?;
    let cross_correlations = (0..stats.r_ij.nrows())
        .map(|a| stats.r_ij.row(a).iter().copied().collect())
        .collect();
    Ok(RegressionReport {
        report,
        regression: RegressionDiagnostics {
            response: response.to_string(),
            retained: null_predictors.iter().map(|s| s.to_string()).collect(),
            entering: entering.iter().map(|s| s.to_string()).collect(),
            entering_variances: stats.variances.clone(),
            cross_correlations,
            log_b_direct: via_direct,
            log_b_correlation: via_correlation,
            b: via_direct.exp(),
        },
    })
}
