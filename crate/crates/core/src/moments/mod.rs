//! First and second moments of `T_n = per(Y)`.
//!
//! Closed forms live in [`closed_form`]; [`oracle`] holds the brute-force
//! routes (sum over permutation pairs, enumeration of the constrained class)
//! that the closed forms are checked against.

pub mod closed_form;
pub mod oracle;
mod subfactorial;

pub use closed_form::{
    alpha_beta, condition_check, exact_second_moment_homogeneous, moment_report, mu_n,
    pre_approximation_bounds, second_moment_bounds, series_sum, vdw_bound, AlphaBeta,
    ConditionDiagnostics, MomentReport, SecondMomentBounds,
};
pub use oracle::{
    brute_second_moment_pairs, exact_moments_enumerate, pair_moment, EnumeratedMoments, PairSum,
};
pub use subfactorial::{
    derangements, subfactorial_b, weighted_subfactorial_sum, SUBFACTORIAL_TABLE_MAX,
};
