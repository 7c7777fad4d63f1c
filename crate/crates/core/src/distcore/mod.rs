//! Special functions and the sampling laws of the likelihood-ratio statistic.

mod laws;
mod power;
pub mod special;

pub use laws::{
    asymptotic_upper_tail, exact_null_tail, gamma_quantile_upper, gamma_upper_tail, null_law,
    BetaNullLaw, GammaLaw, QUANTILE_PROB_TOL,
};
pub use power::{
    anova_power, central_f_critical, noncentral_f_upper_tail, solve_replicates, PowerDesign,
    POISSON_TAIL_TOL,
};
