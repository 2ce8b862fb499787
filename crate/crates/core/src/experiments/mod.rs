//! Seeded Monte Carlo estimates of `T_n / μ_n` and concentration sweeps.

mod csv_out;
mod stats;
mod sweep;

pub use csv_out::{write_csv, write_csv_to, CSV_HEADER};
pub use stats::{deviation_probability, Summary};
pub use sweep::{
    concentration_sweep, concentration_sweep_with, derive_row_seed, RRule, SweepPlan, SweepRow,
    DEFAULT_EPSILON,
};

use rayon::prelude::*;

use crate::domain::{ln_factorial, ModelSpec};
use crate::error::{Error, Result};
use crate::model::{sample_trial, TrialSeed};
use crate::moments::closed_form::log_row_product;
use crate::permanent::per_scaled;

/// Per-trial ratios are kept in memory up to this many trials.
pub const MAX_TRIALS: usize = 1_000_000;

/// `T_n / μ_n` for one trial.
///
/// The permanent is taken of `X ⊙ (Z/ν)` with row `i` scaled by `r_i`; the
/// `ν^n` factor of `T_n` and of `μ_n` cancels before any rounding, so the
/// ratio does not depend on the scale of the weight law at all.
pub fn run_trial(spec: &ModelSpec, seed: TrialSeed) -> Result<f64> {
    let sample = sample_trial(spec, seed);
    let scales: Vec<f64> = spec.r().iter().map(|&r| r as f64).collect();
    let per = per_scaled(&sample.y_unit, &scales)?;
    let Some(log_per) = per.log_mag() else {
        return Ok(0.0);
    };
    if per.sign() < 0 {
        // rounding residue of a vanishing permanent
        return Ok(0.0);
    }
    Ok((log_per - log_unit_mu(spec)).exp())
}

/// `ln(μ_n / ν^n) = Σ ln r_i + ln n! − n ln n`.
fn log_unit_mu(spec: &ModelSpec) -> f64 {
    let n = spec.n() as f64;
    log_row_product(spec) + ln_factorial(spec.n()) - n * n.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch {
    pub spec: ModelSpec,
    pub master_seed: u64,
    /// Ratio of trial `k` at index `k`.
    pub ratios: Vec<f64>,
    pub summary: Summary,
}

impl TrialBatch {
    pub fn deviation_probability(&self, epsilon: f64) -> f64 {
        deviation_probability(&self.ratios, epsilon)
    }
}

/// Runs trials `0..trials` on the global rayon pool.
pub fn estimate_moments(spec: &ModelSpec, trials: usize, master_seed: u64) -> Result<TrialBatch> {
    estimate_moments_with(spec, trials, master_seed, None)
}

/// As [`estimate_moments`], on a dedicated pool of `workers` threads when
/// given (`Some(1)` runs on the calling thread). Ratios are stored by trial
/// index, so the batch is the same for every worker count.
pub fn estimate_moments_with(
    spec: &ModelSpec,
    trials: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<TrialBatch> {
    if trials < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 trials, got {trials}"
        )));
    }
    if trials > MAX_TRIALS {
        return Err(Error::size_limit(
            "trial count",
            trials as u64,
            MAX_TRIALS as u64,
        ));
    }
    let run = |k: usize| run_trial(spec, TrialSeed::new(master_seed, k as u64));
    let ratios: Vec<f64> = match workers {
        Some(1) => (0..trials).map(run).collect::<Result<_>>()?,
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Argument(format!("cannot start {w} workers: {e}")))?;
            pool.install(|| (0..trials).into_par_iter().map(run).collect::<Result<_>>())?
        }
        None => (0..trials)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?,
    };
    let summary = Summary::from_values(&ratios);
    Ok(TrialBatch {
        spec: spec.clone(),
        master_seed,
        ratios,
        summary,
    })
}
