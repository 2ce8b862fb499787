//! Cross-oracle suite behind `permlab verify`: closed forms against the
//! enumeration and permutation-pair oracles for every spec with `n ≤ 5`.

use itertools::Itertools;
use rayon::prelude::*;

use crate::domain::{format_exactish, Distribution, ModelSpec, ScaledValue};
use crate::error::Result;
use crate::moments::{
    brute_second_moment_pairs, exact_moments_enumerate, exact_second_moment_homogeneous,
};

pub const VERIFY_MAX_N: usize = 5;
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: String,
    pub passed: bool,
    pub line: String,
}

/// Nondecreasing row-count vectors for `n = 1..=max_n` under `const:1` and
/// `exp:1`. Permuting the rows of a spec permutes the rows of every sample,
/// which leaves the permanent unchanged, so sorted vectors cover all specs.
pub fn verification_specs(max_n: usize) -> Vec<ModelSpec> {
    let dists = [
        Distribution::constant(1.0).unwrap(),
        Distribution::exponential(1.0).unwrap(),
    ];
    let mut specs = Vec::new();
    for dist in dists {
        for n in 1..=max_n {
            for r in (1..=n).combinations_with_replacement(n) {
                specs.push(ModelSpec::new(n, r, dist).expect("counts within 1..=n"));
            }
        }
    }
    specs
}

/// `err < tolerance`, false for NaN.
fn within_tolerance(err: f64) -> bool {
    err < VERIFY_TOLERANCE
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn check_spec(
    spec: &ModelSpec,
    mu_fn: &(dyn Fn(&ModelSpec) -> ScaledValue + Sync),
) -> Result<CheckOutcome> {
    let label = spec.label();
    let enumerated = exact_moments_enumerate(spec)?;
    let pairs = brute_second_moment_pairs(spec)?;
    let mu = mu_fn(spec).to_f64();
    let mut failures = Vec::new();
    let mean_err = rel(enumerated.mean, mu);
    if !within_tolerance(mean_err) {
        failures.push(format!(
            "E T enumerated={} closed={} rel={mean_err:.2e}",
            enumerated.mean, mu
        ));
    }
    let pair_err = rel(pairs.second_moment, enumerated.second_moment);
    if !within_tolerance(pair_err) {
        failures.push(format!(
            "E T² pairs={} enumerated={} rel={pair_err:.2e}",
            pairs.second_moment, enumerated.second_moment
        ));
    }
    if let Some(r) = spec.homogeneous_r().filter(|&r| r >= 2) {
        let closed = exact_second_moment_homogeneous(spec.n(), r, *spec.dist())? * mu * mu;
        let err = rel(closed, pairs.second_moment);
        if !within_tolerance(err) {
            failures.push(format!(
                "E T² closed={closed} pairs={} rel={err:.2e}",
                pairs.second_moment
            ));
        }
    }
    let passed = failures.is_empty();
    let line = if passed {
        format!(
            "{label}: ET={} ET²={} ✓",
            format_exactish(enumerated.mean),
            format_exactish(enumerated.second_moment)
        )
    } else {
        format!("{label}: ✗ {}", failures.join("; "))
    };
    Ok(CheckOutcome {
        label,
        passed,
        line,
    })
}

/// Runs every check, using `mu_fn` wherever `μ_n` is needed.
pub fn run_suite_with(
    mu_fn: &(dyn Fn(&ModelSpec) -> ScaledValue + Sync),
    max_n: usize,
) -> Result<Vec<CheckOutcome>> {
    verification_specs(max_n)
        .par_iter()
        .map(|spec| check_spec(spec, mu_fn))
        .collect()
}

pub fn run_suite() -> Result<Vec<CheckOutcome>> {
    run_suite_with(&crate::moments::mu_n, VERIFY_MAX_N)
}
