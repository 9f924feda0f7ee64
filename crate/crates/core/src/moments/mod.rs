//! Threshold, annealed free entropies φ₁/φ₂ and exact/asymptotic moments of
//! the solution count for the 2-in-k occupation problem.

mod asymptotic;
mod exact;
mod overlap;
mod report;
mod threshold;

pub use asymptotic::{second_moment_asymptotic, variance_explained, SecondMomentAsymptotic, VarianceExplained};
pub use exact::{
    first_moment_exact, joint_moment_exact, joint_moment_ratio, second_moment_exact_ratio, LogMoment,
};
pub use overlap::{
    hessian_phi2, hessian_det_formula, p_main, p_star, phi2, q_main, q_star, Hessian2, OverlapPoint,
    Parametrization,
};
pub use report::{moment_report, MomentReport};
pub use threshold::{lemma_f, phi1, threshold_dstar, ThresholdReport};
