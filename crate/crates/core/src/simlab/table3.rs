//! How many "just significant" p-values come from true nulls.
//!
//! Each outer replicate draws K two-group samples with equal means and K
//! with means f·σ apart, tests equality of means as a nested linear model
//! and records which of the counted p-values came from the null half.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replicate_rng, with_workers};
use crate::alpha::alpha_kernel;
use crate::calibration::{pbic_constant, PbicInputs};
use crate::distcore::special::beta_inc;
use crate::distcore::{gamma_quantile_upper, gamma_upper_tail, null_law, GammaLaw};
use crate::error::{Error, Result};
use crate::linmod::two_means_log_b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PValueKind {
    /// Beta tail of the residual ratio; identical to the pooled t-test.
    #[default]
    Exact,
    /// Gamma-law tail of the statistic.
    Gamma,
}

/// Threshold applied on top of the p-value window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Adjustment {
    #[default]
    None,
    /// Simple calibration: one threshold per sample size.
    Simple { alpha0: f64 },
    /// PBIC calibration with plug-in ξ̂ = β̂², d = 2σ̂²/r, nᵉ = 2r per sample.
    Pbic { alpha0: f64 },
}

/// Which adjusted p-values are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CountRule {
    /// p < adaptive alpha and p below the window's upper end.
    #[default]
    BelowAlpha,
    /// p inside the window and below the adaptive alpha.
    WindowAndAlpha,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table3Config {
    /// Observations per group.
    pub r: usize,
    /// Samples per hypothesis state in each outer replicate.
    #[serde(rename = "K")]
    pub k: usize,
    /// Mean difference under the alternative, in units of sigma.
    pub f: f64,
    pub sigma: f64,
    pub p_window: (f64, f64),
    pub outer_reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub adjustment: Adjustment,
    #[serde(default)]
    pub count_rule: CountRule,
    #[serde(default)]
    pub p_value: PValueKind,
}

impl Table3Config {
    /// Desk-scale defaults: K = 1000, 20 outer replicates, f = 0.25, σ = 1.
    pub fn desk(r: usize, seed: u64) -> Self {
        Self {
            r,
            k: 1000,
            f: 0.25,
            sigma: 1.0,
            p_window: (0.01, 0.05),
            outer_reps: 20,
            seed,
            adjustment: Adjustment::None,
            count_rule: CountRule::BelowAlpha,
            p_value: PValueKind::Exact,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::domain(format!("need r >= 2, got {}", self.r)));
        }
        if self.k < 1 || self.outer_reps < 1 {
            return Err(Error::domain("K and outer_reps must be at least 1"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite() && self.f.is_finite()) {
            return Err(Error::domain("sigma must be positive and f finite"));
        }
        let (lo, hi) = self.p_window;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::domain(format!("invalid p window ({lo}, {hi})")));
        }
        match self.adjustment {
            Adjustment::None => Ok(()),
            Adjustment::Simple { alpha0 } | Adjustment::Pbic { alpha0 }
                if alpha0 > 0.0 && alpha0 < 1.0 =>
            {
                Ok(())
            }
            _ => Err(Error::domain("adjustment alpha0 must lie in (0, 1)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCounts {
    pub null_events: u64,
    pub alt_events: u64,
    /// (null, alternative) counted events per outer replicate.
    pub per_rep: Vec<(u64, u64)>,
    pub reps_without_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Median over outer replicates of the percentage of counted p-values
    /// that came from null samples. Replicates without events are skipped.
    pub pct_from_null: f64,
    /// Standard error of the median, √(π/2)·sd/√m; absent with fewer
    /// than two informative replicates.
    pub mc_stderr: Option<f64>,
    pub counts: SimCounts,
    pub low_confidence: bool,
}

/// Below this many counted events in total a result is flagged.
const MIN_EVENTS: u64 = 30;

struct Evaluator {
    r: usize,
    n: usize,
    law: GammaLaw,
    g: f64,
    log_b: f64,
}

impl Evaluator {
    fn new(r: usize, alpha0: f64) -> Result<Self> {
        let n = 2 * r;
        let law = null_law(n, 2, 1)?;
        let g = gamma_quantile_upper(&law, alpha0)?;
        Ok(Self {
            r,
            n,
            law,
            g,
            log_b: two_means_log_b(r, r),
        })
    }

    fn rate(&self) -> f64 {
        self.law.rate()
    }

    fn simple(&self) -> Result<f64> {
        Ok(alpha_kernel(self.log_b, self.n, 2, 1, 0.0, self.g)? * (-self.rate() * self.g).exp())
    }

    fn pbic(&self, diff: f64, ssw: f64) -> Result<f64> {
        let r = self.r as f64;
        let beta = diff / 2.0;
        let s2 = ssw / (self.n - 2) as f64;
        let inputs = PbicInputs::single(beta * beta, 2.0 * s2 / r, 2.0 * r)?;
        let c = pbic_constant(&inputs)?;
        Ok(
            alpha_kernel(self.log_b, self.n, 2, 1, c, self.g)?
                * (-self.rate() * (self.g + c)).exp(),
        )
    }
}

fn mean_and_ss(x: &[f64]) -> (f64, f64) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (m, x.iter().map(|v| (v - m) * (v - m)).sum())
}

pub fn table3_experiment(cfg: &Table3Config, workers: usize) -> Result<SimResult> {
    cfg.validate()?;
    let r = cfg.r;
    let n = 2 * r;
    let (lo, hi) = cfg.p_window;
    let alpha0 = match cfg.adjustment {
        Adjustment::None => 0.05,
        Adjustment::Simple { alpha0 } | Adjustment::Pbic { alpha0 } => alpha0,
    };
    let eval = Evaluator::new(r, alpha0)?;
    let fixed_alpha = match cfg.adjustment {
        Adjustment::Simple { .. } => Some(eval.simple()?),
        _ => None,
    };
    let law = eval.law;
    let shift = cfg.f * cfg.sigma;
    let k = cfg.k;
    let total = cfg.outer_reps * 2 * k;

    let counted = |idx: usize, buf: &mut Vec<f64>| -> Result<Option<(usize, bool)>> {
        let rep = idx / (2 * k);
        let is_null = (idx / k).is_multiple_of(2);
        let mut rng = replicate_rng(cfg.seed, idx as u64);
        buf.clear();
        buf.extend((0..n).map(|_| cfg.sigma * rng.sample::<f64, _>(StandardNormal)));
        let (m1, ss1) = mean_and_ss(&buf[..r]);
        let (m2, ss2) = mean_and_ss(&buf[r..]);
        let diff = m1 - m2 + if is_null { 0.0 } else { shift };
        let ssw = ss1 + ss2;
        let sst = ssw + r as f64 / 2.0 * diff * diff;
        let ratio = (ssw / sst).min(1.0);
        let p = match cfg.p_value {
            PValueKind::Exact => beta_inc((n - 2) as f64 / 2.0, 0.5, ratio),
            PValueKind::Gamma => gamma_upper_tail(&law, -((n - 1) as f64) * ratio.ln())?,
        };
        let in_window = lo < p && p < hi;
        let hit = match cfg.adjustment {
            Adjustment::None => in_window,
            _ => {
                let alpha = match fixed_alpha {
                    Some(a) => a,
                    None => eval.pbic(diff, ssw)?,
                };
                match cfg.count_rule {
                    CountRule::BelowAlpha => p < alpha && p < hi,
                    CountRule::WindowAndAlpha => in_window && p < alpha,
                }
            }
        };
        Ok(hit.then_some((rep, is_null)))
    };

    let reps = cfg.outer_reps;
    let tallies: Result<Vec<(u64, u64)>> = with_workers(workers, || {
        (0..total)
            .into_par_iter()
            .map_init(|| Vec::with_capacity(n), |buf, idx| counted(idx, buf))
            .try_fold(
                || vec![(0u64, 0u64); reps],
                |mut acc, hit| {
                    if let Some((rep, is_null)) = hit? {
                        if is_null {
                            acc[rep].0 += 1;
                        } else {
                            acc[rep].1 += 1;
                        }
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![(0u64, 0u64); reps],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.0 += y.0;
                        x.1 += y.1;
                    }
                    Ok(a)
                },
            )
    })?;
    let per_rep = tallies?;
    Ok(summarize(per_rep))
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
    }
}

fn summarize(per_rep: Vec<(u64, u64)>) -> SimResult {
    let mut pcts: Vec<f64> = per_rep
        .iter()
        .filter(|(a, b)| a + b > 0)
        .map(|&(a, b)| 100.0 * a as f64 / (a + b) as f64)
        .collect();
    pcts.sort_by(f64::total_cmp);
    let null_events = per_rep.iter().map(|p| p.0).sum::<u64>();
    let alt_events = per_rep.iter().map(|p| p.1).sum::<u64>();
    let reps_without_events = per_rep.len() - pcts.len();
    let (pct, stderr) = match pcts.len() {
        0 => (0.0, None),
        1 => (pcts[0], None),
        m => {
            let mean = pcts.iter().sum::<f64>() / m as f64;
            let var = pcts.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (
                median(&pcts),
                Some((std::f64::consts::FRAC_PI_2 * var / m as f64).sqrt()),
            )
        }
    };
    SimResult {
        pct_from_null: pct,
        mc_stderr: stderr,
        low_confidence: reps_without_events > 0 || null_events + alt_events < MIN_EVENTS,
        counts: SimCounts {
            null_events,
            alt_events,
            per_rep,
            reps_without_events,
        },
    }
}
