//! Shared domain types.

mod dist;
mod fmt;
mod matrix;
mod scaled;
mod spec;

pub use dist::Distribution;
pub use fmt::{format_exactish, format_general, ln_factorial, rational_approximation};
pub use matrix::{parse_matrix, DenseMatrix};
pub use scaled::ScaledValue;
pub use spec::ModelSpec;
