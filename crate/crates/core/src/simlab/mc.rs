use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ks_distance, replicate_rng, with_workers};
use crate::distcore::{exact_null_tail, null_law, BetaNullLaw};
use crate::error::{Error, Result};

/// Distance of the simulated null statistic from both null laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub n: usize,
    pub j: usize,
    pub q: usize,
    pub draws: usize,
    pub seed: u64,
    /// KS distance to the Gamma law.
    pub ks_gamma: f64,
    /// KS distance to the exact Beta law.
    pub ks_exact: f64,
}

/// Intercept plus smooth trigonometric covariates; full rank for n > j.
fn test_design(n: usize, j: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, j, |row, col| {
        if col == 0 {
            return 1.0;
        }
        let t = (row as f64 + 0.5) / n as f64;
        let m = col.div_ceil(2) as f64;
        let w = 2.0 * std::f64::consts::PI * m * t;
        if col % 2 == 1 {
            w.cos()
        } else {
            w.sin()
        }
    })
}

fn basis(x: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    (x.ncols() > 0).then(|| x.clone().qr().q())
}

fn residual_ss(q: &Option<DMatrix<f64>>, y: &DVector<f64>) -> f64 {
    match q {
        None => y.norm_squared(),
        Some(q) => (y - q * q.tr_mul(y)).norm_squared(),
    }
}

/// Simulate `draws` Gaussian responses under the smaller of two nested
/// designs (n rows, j and j − q columns) and compare the statistic's
/// empirical law with the Gamma and exact Beta null laws.
pub fn null_law_mc_check(
    n: usize,
    j: usize,
    q: usize,
    draws: usize,
    seed: u64,
    workers: usize,
) -> Result<McCheck> {
    if draws < 1000 {
        return Err(Error::domain(format!(
            "need at least 1000 draws, got {draws}"
        )));
    }
    if q == 0 || q > j {
        return Err(Error::domain(format!("need 1 <= q <= j, got q {q}, j {j}")));
    }
    if n <= j {
        return Err(Error::DegenerateDesign { n, j });
    }
    let gamma = null_law(n, j, q)?;
    let exact = BetaNullLaw::from_dims(n, j, q)?;
    let xj = test_design(n, j);
    let xi = xj.columns(0, j - q).into_owned();
    let (qi, qj) = (basis(&xi), basis(&xj));
    let scale = (n - 1) as f64;

    let mut t: Vec<f64> = with_workers(workers, || {
        (0..draws)
            .into_par_iter()
            .map(|k| {
                let mut rng = replicate_rng(seed, k as u64);
                let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                let ratio = (residual_ss(&qj, &y) / residual_ss(&qi, &y)).min(1.0);
                -scale * ratio.ln()
            })
            .collect()
    })?;
    let ks_gamma = ks_distance(&mut t, |z| gamma.cdf(z));
    let ks_exact = ks_distance(&mut t, |z| {
        1.0 - exact_null_tail(&exact, z.max(0.0)).unwrap_or(1.0)
    });
    Ok(McCheck {
        n,
        j,
        q,
        draws,
        seed,
        ks_gamma,
        ks_exact,
    })
}
