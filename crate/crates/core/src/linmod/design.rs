use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::fit::{Factored, NestedPair};
use crate::error::{Error, Result};

fn log_det_gram(x: &DMatrix<f64>) -> Result<f64> {
    if x.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(Factored::new(x)?.log_det_gram())
}

/// log b = log |X_jᵗX_j| − log |X_iᵗX_i|, from the R factors of both designs.
pub fn log_b_direct(pair: &NestedPair) -> Result<f64> {
    Ok(log_det_gram(pair.xj())? - log_det_gram(pair.xi())?)
}

/// Sample moments of the predictors of a regression with intercept:
/// variances of the entering predictors and the blocks of the predictor
/// correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorStats {
    pub n: usize,
    /// s_l² (divisor n−1) of each entering predictor.
    pub variances: Vec<f64>,
    /// Correlations among retained (non-intercept) predictors.
    pub r_i: DMatrix<f64>,
    /// Retained × entering cross-correlations.
    pub r_ij: DMatrix<f64>,
    /// Correlations among entering predictors.
    pub r_jmi: DMatrix<f64>,
}

fn centered(col: &[f64]) -> (Vec<f64>, f64) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let c: Vec<f64> = col.iter().map(|v| v - mean).collect();
    let ss = c.iter().map(|v| v * v).sum::<f64>();
    (c, ss)
}

impl PredictorStats {
    pub fn from_columns(retained: &[&[f64]], entering: &[&[f64]]) -> Result<Self> {
        let n = retained
            .iter()
            .chain(entering)
            .map(|c| c.len())
            .next()
            .ok_or_else(|| Error::domain("no predictors given"))?;
        if entering.is_empty() {
            return Err(Error::domain("at least one entering predictor is required"));
        }
        if retained.iter().chain(entering).any(|c| c.len() != n) {
            return Err(Error::domain("predictor columns differ in length"));
        }
        if n < 3 {
            return Err(Error::domain(format!(
                "need at least 3 observations, got {n}"
            )));
        }
        let cols: Vec<(Vec<f64>, f64)> = retained
            .iter()
            .chain(entering)
            .map(|c| centered(c))
            .collect();
        if let Some(k) = cols.iter().position(|(_, ss)| !(*ss > 0.0)) {
            return Err(Error::SingularDesign(format!("predictor {k} is constant")));
        }
        let corr = |a: usize, b: usize| -> f64 {
            let (ca, sa) = &cols[a];
            let (cb, sb) = &cols[b];
            let cross: f64 = ca.iter().zip(cb).map(|(x, y)| x * y).sum();
            (cross / (sa * sb).sqrt()).clamp(-1.0, 1.0)
        };
        let ni = retained.len();
        let q = entering.len();
        let r_i = DMatrix::from_fn(ni, ni, |a, b| if a == b { 1.0 } else { corr(a, b) });
        let r_ij = DMatrix::from_fn(ni, q, |a, b| corr(a, ni + b));
        let r_jmi = DMatrix::from_fn(q, q, |a, b| if a == b { 1.0 } else { corr(ni + a, ni + b) });
        let variances = cols[ni..]
            .iter()
            .map(|(_, ss)| ss / (n - 1) as f64)
            .collect();
        Ok(Self {
            n,
            variances,
            r_i,
            r_ij,
            r_jmi,
        })
    }

    pub fn q(&self) -> usize {
        self.variances.len()
    }
}

/// log b = q·log(n−1) + Σ log s_l² + log |R_{j−i} − R_ijᵗ R_i⁻¹ R_ij|.
pub fn log_b_correlation(stats: &PredictorStats, q: usize) -> Result<f64> {
    if q != stats.q() || stats.r_jmi.shape() != (q, q) || stats.r_ij.ncols() != q {
        return Err(Error::domain(format!(
            "correlation blocks inconsistent with {q} entering predictors"
        )));
    }
    let ni = stats.r_i.nrows();
    if stats.r_i.ncols() != ni || stats.r_ij.nrows() != ni {
        return Err(Error::domain(
            "retained correlation blocks have inconsistent shapes",
        ));
    }
    if stats.variances.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::domain("predictor variances must be positive"));
    }
    let schur = if ni == 0 {
        stats.r_jmi.clone()
    } else {
        let chol =
            stats.r_i.clone().cholesky().ok_or_else(|| {
                Error::domain("retained correlation matrix is not positive definite")
            })?;
        &stats.r_jmi - stats.r_ij.transpose() * chol.solve(&stats.r_ij)
    };
    let schur = schur.cholesky().ok_or_else(|| {
        Error::SingularDesign("entering predictors are collinear with retained ones".into())
    })?;
    let log_det = 2.0 * schur.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let log_var: f64 = stats.variances.iter().map(|v| v.ln()).sum();
    Ok(q as f64 * ((stats.n - 1) as f64).ln() + log_var + log_det)
}

/// Closed form of log b for the balanced one-way layout: log(k⁻¹ r^{k−1}).
pub fn anova_log_b(k: usize, r: usize) -> f64 {
    (k - 1) as f64 * (r as f64).ln() - (k as f64).ln()
}

/// Closed form of log b for the two-means design: log(n1·n2 / (n1 + n2)).
pub fn two_means_log_b(n1: usize, n2: usize) -> f64 {
    ((n1 * n2) as f64 / (n1 + n2) as f64).ln()
}

/// Σ_{i=1..n} 1/i, the Gram "matrix" of the Findley design.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Balanced one-way layout: ones column against k group indicators, n = k·r.
pub fn make_anova_design(k: usize, r: usize) -> Result<NestedPair> {
    if k < 2 || r < 2 {
        return Err(Error::domain(format!(
            "need k >= 2 and r >= 2, got k {k}, r {r}"
        )));
    }
    let n = k * r;
    let xi = DMatrix::from_element(n, 1, 1.0);
    let xj = DMatrix::from_fn(n, k, |row, col| if row / r == col { 1.0 } else { 0.0 });
    NestedPair::new(xi, xj)
}

/// Two groups coded by B = [1, ±1/2]; the null model drops the contrast column.
pub fn make_two_means_design(n1: usize, n2: usize) -> Result<NestedPair> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::domain(format!("need n1, n2 >= 2, got {n1}, {n2}")));
    }
    let n = n1 + n2;
    let xi = DMatrix::from_element(n, 1, 1.0);
    let xj = DMatrix::from_fn(n, 2, |row, col| match (col, row < n1) {
        (0, _) => 1.0,
        (_, true) => 0.5,
        (_, false) => -0.5,
    });
    NestedPair::new(xi, xj)
}

/// Single regressor x_i = 1/√i against the empty model.
pub fn make_findley_design(n: usize) -> Result<NestedPair> {
    if n < 2 {
        return Err(Error::domain(format!("need n >= 2, got {n}")));
    }
    let x = DVector::from_fn(n, |i, _| 1.0 / ((i + 1) as f64).sqrt());
    NestedPair::against_empty(DMatrix::from_column_slice(n, 1, x.as_slice()))
}

/// Summary of a design family member, used by reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub n: usize,
    pub j: usize,
    pub q: usize,
    pub log_b: f64,
}

impl DesignPoint {
    pub fn from_pair(pair: &NestedPair) -> Result<Self> {
        Ok(Self {
            n: pair.n(),
            j: pair.j(),
            q: pair.q(),
            log_b: log_b_direct(pair)?,
        })
    }
}
