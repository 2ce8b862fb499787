use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::subfactorial::weighted_subfactorial_sum;
use crate::domain::{ln_factorial, Distribution, ModelSpec, ScaledValue};
use crate::error::{Error, Result};

/// `μ_n = ∏ r_i · ν^n · n!/n^n`, the mean of `T_n`, built in log space.
pub fn mu_n(spec: &ModelSpec) -> ScaledValue {
    let n = spec.n() as f64;
    let log_mu =
        log_row_product(spec) + n * spec.dist().nu().ln() + ln_factorial(spec.n()) - n * n.ln();
    ScaledValue::from_ln(log_mu)
}

pub(crate) fn log_row_product(spec: &ModelSpec) -> f64 {
    spec.r().iter().map(|&r| (r as f64).ln()).sum()
}

/// `r^n · n!/n^n`: the van der Waerden lower bound for matrices with `r`
/// ones in every row and column.
pub fn vdw_bound(n: usize, r: usize) -> Result<ScaledValue> {
    if r == 0 || r > n {
        return Err(Error::Argument(format!("r = {r} outside 1..={n}")));
    }
    let nf = n as f64;
    Ok(ScaledValue::from_ln(
        nf * (r as f64).ln() + ln_factorial(n) - nf * nf.ln(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha_up: f64,
    pub beta_up: f64,
    pub alpha_low: f64,
    pub beta_low: f64,
}

fn alpha(n: usize, r: usize) -> f64 {
    let inner = (n * (r - 1)) as f64 / (r * (n - 1)) as f64;
    (n as f64 * inner.ln()).exp()
}

/// ```text
/// α_up  = (n(r_up − 1) / (r_up(n − 1)))^n     β_up  = δ r_up (n−1) / (ν² r_low (r_up − 1))
/// α_low = (n(r_low − 1) / (r_low(n − 1)))^n   β_low = δ r_low (n−1) / (ν² r_up (r_low − 1))
/// ```
///
/// Requires `n ≥ 2` and `r_low ≥ 2`.
pub fn alpha_beta(spec: &ModelSpec) -> Result<AlphaBeta> {
    let (n, r_low, r_up) = (spec.n(), spec.r_low(), spec.r_up());
    if n < 2 {
        return Err(Error::Domain(format!(
            "alpha/beta need n >= 2, got n = {n}"
        )));
    }
    if r_low < 2 {
        return Err(Error::Domain(format!(
            "alpha/beta need r_low >= 2, got r_low = {r_low}"
        )));
    }
    let kappa = spec.moment_ratio();
    let beta = |num: usize, den: usize, den_minus: usize| {
        kappa * (num * (n - 1)) as f64 / (den * (den_minus - 1)) as f64
    };
    Ok(AlphaBeta {
        alpha_up: alpha(n, r_up),
        beta_up: beta(r_up, r_low, r_up),
        alpha_low: alpha(n, r_low),
        beta_low: beta(r_low, r_up, r_low),
    })
}

/// Bounds on `E T_n² / μ_n²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentBounds {
    pub lower: f64,
    pub upper: f64,
}

/// ```text
/// α_low e^{β_low − 1} (1 − 2e/n²)  ≤  E T_n²/μ_n²  ≤  α_up e^{β_up − 1} (1 + 2e/n²)
/// ```
///
/// Stated under `r_low ≥ 6δ/ν²` and only for `n` large enough, with no
/// explicit threshold. The expressions are always evaluated when the
/// hypothesis holds; whether they bracket the true ratio at a given small
/// `n` is for the caller to check.
pub fn second_moment_bounds(spec: &ModelSpec) -> Result<SecondMomentBounds> {
    let kappa = spec.moment_ratio();
    let r_low = spec.r_low();
    if (r_low as f64) < 6.0 * kappa {
        return Err(Error::Domain(format!(
            "hypothesis r_low ≥ 6δ/ν² not met: r_low = {r_low}, 6δ/ν² = {}",
            6.0 * kappa
        )));
    }
    let ab = alpha_beta(spec)?;
    let n2 = (spec.n() * spec.n()) as f64;
    let slack = 2.0 * std::f64::consts::E / n2;
    Ok(SecondMomentBounds {
        lower: (ab.alpha_low.ln() + ab.beta_low - 1.0).exp() * (1.0 - slack),
        upper: (ab.alpha_up.ln() + ab.beta_up - 1.0).exp() * (1.0 + slack),
    })
}

fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `Σ_{k=0}^{n} β^k/k! · b_{n−k}`, accumulated in exact rationals from the
/// binary value of `β` and rounded once.
pub fn series_sum(n: usize, beta: f64) -> f64 {
    rational_to_f64(&weighted_subfactorial_sum(n, &exact_rational(beta)))
}

fn scaled_series(n: usize, alpha: f64, beta: f64) -> f64 {
    let total = exact_rational(alpha) * weighted_subfactorial_sum(n, &exact_rational(beta));
    rational_to_f64(&total)
}

/// Exact `E T_n² / μ_n²` for the homogeneous model `r_i = r`:
/// `α Σ_k β^k/k! · b_{n−k}` with `α`, `β` from [`alpha_beta`]. All rows
/// sharing `r` makes every pair moment equal its upper estimate, so the
/// series is an identity rather than a bound.
pub fn exact_second_moment_homogeneous(n: usize, r: usize, dist: Distribution) -> Result<f64> {
    if r < 2 {
        return Err(Error::Domain(format!(
            "exact homogeneous second moment needs r >= 2, got r = {r}"
        )));
    }
    let spec = ModelSpec::homogeneous(n, r, dist)?;
    let ab = alpha_beta(&spec)?;
    Ok(scaled_series(n, ab.alpha_up, ab.beta_up))
}

/// `(α_low Σ(β_low), α_up Σ(β_up))`: bounds on `E T_n²/μ_n²` valid at every
/// `n`, before the series is replaced by `e^{β−1}`.
pub fn pre_approximation_bounds(spec: &ModelSpec) -> Result<(f64, f64)> {
    let ab = alpha_beta(spec)?;
    let n = spec.n();
    Ok((
        scaled_series(n, ab.alpha_low, ab.beta_low),
        scaled_series(n, ab.alpha_up, ab.beta_up),
    ))
}

/// Finite-`n` values of the two growth conditions.
///
/// `a_n = √n · δ/(ν² r_low)` and `c_n = n · (δ/(ν² r_low) − 1/r_up)`; the
/// law of large numbers is guaranteed along a sequence on which both tend to
/// zero. `c_n` is signed: it can be negative when `1/r_up` dominates, and
/// whether the condition should be read with an absolute value is left to
/// the reader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionDiagnostics {
    pub a_n: f64,
    pub c_n: f64,
    /// `(1 − 1/r)·e^{1/(r−1)}`, homogeneous specs with `r ≥ 2` only.
    pub theta: Option<f64>,
}

pub fn condition_check(spec: &ModelSpec) -> ConditionDiagnostics {
    let n = spec.n() as f64;
    let x = spec.moment_ratio() / spec.r_low() as f64;
    let theta = spec.homogeneous_r().filter(|&r| r >= 2).map(|r| {
        let r = r as f64;
        (1.0 - 1.0 / r) * (1.0 / (r - 1.0)).exp()
    });
    ConditionDiagnostics {
        a_n: n.sqrt() * x,
        c_n: n * (x - 1.0 / spec.r_up() as f64),
        theta,
    }
}

/// Every closed-form quantity for one spec.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub spec: ModelSpec,
    pub mu_n: ScaledValue,
    /// Homogeneous specs only.
    pub vdw: Option<ScaledValue>,
    pub alpha_beta: Result<AlphaBeta>,
    pub bounds: Result<SecondMomentBounds>,
    /// Exact `E T_n²/μ_n²`, homogeneous specs with `r ≥ 2` only.
    pub exact_ratio: Option<f64>,
    pub diagnostics: ConditionDiagnostics,
}

pub fn moment_report(spec: &ModelSpec) -> MomentReport {
    let homogeneous = spec.homogeneous_r();
    MomentReport {
        spec: spec.clone(),
        mu_n: mu_n(spec),
        vdw: homogeneous.map(|r| vdw_bound(spec.n(), r).expect("validated r")),
        alpha_beta: alpha_beta(spec),
        bounds: second_moment_bounds(spec),
        exact_ratio: homogeneous
            .filter(|&r| r >= 2)
            .and_then(|r| exact_second_moment_homogeneous(spec.n(), r, *spec.dist()).ok()),
        diagnostics: condition_check(spec),
    }
}
