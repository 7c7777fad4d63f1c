use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivots of R below this fraction of the largest pivot mark a rank-deficient design.
pub const RANK_TOL: f64 = 1e-10;
/// Relative projection residual allowed when checking that span(X_i) ⊂ span(X_j).
pub const NESTING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub coefficients: Vec<f64>,
    /// Residual sum of squares yᵗ(I−H)y.
    pub rss: f64,
    /// Maximum-likelihood variance, rss / n.
    pub s2: f64,
    pub n: usize,
}

/// Thin QR of a full-column-rank design.
pub(crate) struct Factored {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl Factored {
    pub(crate) fn new(x: &DMatrix<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if p == 0 {
            return Err(Error::SingularDesign("design has no columns".into()));
        }
        if n < p {
            return Err(Error::SingularDesign(format!(
                "{n} rows cannot support {p} columns"
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("design contains non-finite entries"));
        }
        let qr = x.clone().qr();
        let r = qr.r();
        let pivots: Vec<f64> = r.diagonal().iter().map(|d| d.abs()).collect();
        let largest = pivots.iter().cloned().fold(0.0, f64::max);
        if let Some(col) = pivots
            .iter()
            .position(|&d| d <= RANK_TOL * largest || d == 0.0)
        {
            return Err(Error::SingularDesign(format!(
                "column {col} is (numerically) a linear combination of earlier columns"
            )));
        }
        Ok(Self { q: qr.q(), r })
    }

    /// log |XᵗX| = 2 Σ log |R_kk|.
    pub(crate) fn log_det_gram(&self) -> f64 {
        2.0 * self.r.diagonal().iter().map(|d| d.abs().ln()).sum::<f64>()
    }

    pub(crate) fn residual(&self, y: &DVector<f64>) -> DVector<f64> {
        let qty = self.q.tr_mul(y);
        y - &self.q * qty
    }

    fn coefficients(&self, y: &DVector<f64>) -> DVector<f64> {
        let qty = self.q.tr_mul(y);
        self.r
            .solve_upper_triangular(&qty)
            .expect("pivots checked nonzero at construction")
    }
}

/// Least-squares fit through a QR factorization of `x`.
pub fn ols_fit(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitSummary> {
    if x.nrows() != y.len() {
        return Err(Error::domain(format!(
            "design has {} rows but response has length {}",
            x.nrows(),
            y.len()
        )));
    }
    let f = Factored::new(x)?;
    let resid = f.residual(y);
    let rss = resid.norm_squared();
    let n = y.len();
    Ok(FitSummary {
        coefficients: f.coefficients(y).iter().cloned().collect(),
        rss,
        s2: rss / n as f64,
        n,
    })
}

/// Two designs with span(X_i) ⊂ span(X_j).
///
/// `X_i` may have zero columns: the empty null model, whose residual sum
/// of squares is yᵗy and whose Gram determinant is taken as 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedPair {
    xi: DMatrix<f64>,
    xj: DMatrix<f64>,
}

impl NestedPair {
    pub fn new(xi: DMatrix<f64>, xj: DMatrix<f64>) -> Result<Self> {
        if xi.ncols() == 0 {
            return Err(Error::domain(
                "null design has no columns; use NestedPair::against_empty",
            ));
        }
        Self::build(xi, xj)
    }

    /// Compare `xj` against the empty model (i = 0).
    pub fn against_empty(xj: DMatrix<f64>) -> Result<Self> {
        let n = xj.nrows();
        Self::build(DMatrix::zeros(n, 0), xj)
    }

    fn build(xi: DMatrix<f64>, xj: DMatrix<f64>) -> Result<Self> {
        let n = xj.nrows();
        if xi.nrows() != n {
            return Err(Error::domain(format!(
                "designs disagree on row count: {} vs {n}",
                xi.nrows()
            )));
        }
        let (i, j) = (xi.ncols(), xj.ncols());
        if j <= i {
            return Err(Error::domain(format!(
                "larger model must have more columns: i = {i}, j = {j}"
            )));
        }
        if n <= j {
            return Err(Error::DegenerateDesign { n, j });
        }
        let fj = Factored::new(&xj)?;
        if i > 0 {
            Factored::new(&xi)?;
            for (c, col) in xi.column_iter().enumerate() {
                let col = col.into_owned();
                let norm = col.norm();
                if fj.residual(&col).norm() > NESTING_TOL * norm.max(f64::MIN_POSITIVE) {
                    return Err(Error::domain(format!(
                        "column {c} of the null design is not in the span of the larger design"
                    )));
                }
            }
        }
        Ok(Self { xi, xj })
    }

    pub fn xi(&self) -> &DMatrix<f64> {
        &self.xi
    }

    pub fn xj(&self) -> &DMatrix<f64> {
        &self.xj
    }

    pub fn n(&self) -> usize {
        self.xj.nrows()
    }

    pub fn i(&self) -> usize {
        self.xi.ncols()
    }

    pub fn j(&self) -> usize {
        self.xj.ncols()
    }

    pub fn q(&self) -> usize {
        self.j() - self.i()
    }

    /// Residual sums of squares (rss_i, rss_j) for response `y`.
    pub fn residual_sums(&self, y: &DVector<f64>) -> Result<(f64, f64)> {
        let rss_i = if self.i() == 0 {
            if y.len() != self.n() {
                return Err(Error::domain(format!(
                    "response has length {} but the design has {} rows",
                    y.len(),
                    self.n()
                )));
            }
            y.norm_squared()
        } else {
            ols_fit(&self.xi, y)?.rss
        };
        let rss_j = ols_fit(&self.xj, y)?.rss;
        Ok((rss_i, rss_j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrStatistic {
    /// rss_j / rss_i, in (0, 1].
    pub ratio: f64,
    /// −(n−1)·log(ratio).
    #[serde(rename = "T")]
    pub t: f64,
    pub rss_i: f64,
    pub rss_j: f64,
}

pub fn lr_statistic(pair: &NestedPair, y: &DVector<f64>) -> Result<LrStatistic> {
    let (rss_i, rss_j) = pair.residual_sums(y)?;
    let scale = y.norm_squared();
    if !(rss_i > 1e-24 * scale) {
        return Err(Error::DegenerateData(
            "the null model fits the response exactly (rss_i = 0)".into(),
        ));
    }
    let ratio = (rss_j / rss_i).min(1.0);
    let n = pair.n();
    Ok(LrStatistic {
        ratio,
        t: -((n - 1) as f64) * ratio.ln(),
        rss_i,
        rss_j,
    })
}
