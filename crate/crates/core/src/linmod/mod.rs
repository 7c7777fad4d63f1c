//! Least-squares fits, the likelihood-ratio statistic of two nested
//! designs, and the design-information ratio b = |X_jᵗX_j| / |X_iᵗX_i|.

mod design;
mod fit;

pub use design::{
    anova_log_b, harmonic, log_b_correlation, log_b_direct, make_anova_design, make_findley_design,
    make_two_means_design, two_means_log_b, DesignPoint, PredictorStats,
};
pub use fit::{lr_statistic, ols_fit, FitSummary, LrStatistic, NestedPair, NESTING_TOL, RANK_TOL};
