use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{estimate_moments_with, Summary, TrialBatch};
use crate::domain::{Distribution, ModelSpec};
use crate::error::{Error, Result};
use crate::moments::{condition_check, exact_second_moment_homogeneous, second_moment_bounds};
use crate::permanent::RYSER_MAX_N;

pub const DEFAULT_EPSILON: f64 = 0.1;

/// How the row counts are chosen for each `n` of a sweep.
///
/// String forms: `const:k`, `sqrt-log` (`r = ⌈√n · ln n⌉`, at least 1),
/// `power:p` (`r = ⌈n^p⌉`), `explicit:N=r1,..,rN;M=...`.
#[derive(Debug, Clone, PartialEq)]
pub enum RRule {
    Const(usize),
    SqrtLog,
    Power(f64),
    Explicit(BTreeMap<usize, Vec<usize>>),
}

impl RRule {
    pub fn row_counts(&self, n: usize) -> Result<Vec<usize>> {
        let homogeneous = |r: usize| -> Result<Vec<usize>> {
            if r == 0 || r > n {
                return Err(Error::Argument(format!(
                    "r-rule {self} gives r = {r} at n = {n}"
                )));
            }
            Ok(vec![r; n])
        };
        match self {
            RRule::Const(k) => homogeneous(*k),
            RRule::SqrtLog => {
                let nf = n as f64;
                homogeneous(((nf.sqrt() * nf.ln()).ceil() as usize).max(1))
            }
            RRule::Power(p) => homogeneous((n as f64).powf(*p).ceil() as usize),
            RRule::Explicit(table) => table.get(&n).cloned().ok_or_else(|| {
                Error::Argument(format!("explicit r-rule has no entry for n = {n}"))
            }),
        }
    }
}

impl FromStr for RRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "sqrt-log" {
            return Ok(RRule::SqrtLog);
        }
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown r-rule {s:?}")))?;
        let bad = || Error::Parse(format!("malformed r-rule {s:?}"));
        match kind {
            "const" => Ok(RRule::Const(body.trim().parse().map_err(|_| bad())?)),
            "power" => {
                let p: f64 = body.trim().parse().map_err(|_| bad())?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::Parse(format!(
                        "power exponent must lie in (0, 1], got {p}"
                    )));
                }
                Ok(RRule::Power(p))
            }
            "explicit" => {
                let mut table = BTreeMap::new();
                for entry in body.split(';').filter(|e| !e.trim().is_empty()) {
                    let (n, rs) = entry.split_once('=').ok_or_else(bad)?;
                    let n: usize = n.trim().parse().map_err(|_| bad())?;
                    let rs: Vec<usize> = rs
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad()))
                        .collect::<Result<_>>()?;
                    table.insert(n, rs);
                }
                Ok(RRule::Explicit(table))
            }
            _ => Err(Error::Parse(format!("unknown r-rule {s:?}"))),
        }
    }
}

impl fmt::Display for RRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RRule::Const(k) => write!(f, "const:{k}"),
            RRule::SqrtLog => f.write_str("sqrt-log"),
            RRule::Power(p) => write!(f, "power:{p}"),
            RRule::Explicit(table) => {
                let parts: Vec<String> = table
                    .iter()
                    .map(|(n, rs)| {
                        let rs: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
                        format!("{n}={}", rs.join(","))
                    })
                    .collect();
                write!(f, "explicit:{}", parts.join(";"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub ns: Vec<usize>,
    pub r_rule: RRule,
    pub dist: Distribution,
    pub trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
}

impl SweepPlan {
    /// Model spec for every `n`, checking the plan on the way.
    pub fn specs(&self) -> Result<Vec<ModelSpec>> {
        if self.trials < 2 {
            return Err(Error::Argument(format!(
                "need at least 2 trials, got {}",
                self.trials
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Argument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        self.ns
            .iter()
            .map(|&n| {
                if n == 0 || n > RYSER_MAX_N {
                    return Err(Error::size_limit(
                        "sweep dimension",
                        n as u64,
                        RYSER_MAX_N as u64,
                    ));
                }
                ModelSpec::new(n, self.r_rule.row_counts(n)?, self.dist)
            })
            .collect()
    }
}

/// Master seed of the sweep row for dimension `n`: a splitmix64 finaliser
/// applied to `master_seed` mixed with `n`.
pub fn derive_row_seed(master_seed: u64, n: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(master_seed ^ splitmix(n as u64))
}

/// One CSV row: a batch summary plus closed-form references.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub r_low: usize,
    pub r_up: usize,
    pub dist: Distribution,
    pub trials: usize,
    pub seed: u64,
    pub summary: Summary,
    pub p_dev: f64,
    pub epsilon: f64,
    pub a_n: f64,
    pub c_n: f64,
    /// Exact `E T_n²/μ_n²`, homogeneous rows with `r ≥ 2`.
    pub exact_ratio: Option<f64>,
    /// Second-moment bounds, when their hypothesis `r_low ≥ 6δ/ν²` holds.
    pub bounds: Option<(f64, f64)>,
}

impl SweepRow {
    pub fn from_batch(batch: &TrialBatch, epsilon: f64) -> Self {
        let spec = &batch.spec;
        let diag = condition_check(spec);
        let exact_ratio = spec
            .homogeneous_r()
            .filter(|&r| r >= 2)
            .and_then(|r| exact_second_moment_homogeneous(spec.n(), r, *spec.dist()).ok());
        let bounds = second_moment_bounds(spec).ok().map(|b| (b.lower, b.upper));
        SweepRow {
            n: spec.n(),
            r_low: spec.r_low(),
            r_up: spec.r_up(),
            dist: *spec.dist(),
            trials: batch.ratios.len(),
            seed: batch.master_seed,
            summary: batch.summary,
            p_dev: batch.deviation_probability(epsilon),
            epsilon,
            a_n: diag.a_n,
            c_n: diag.c_n,
            exact_ratio,
            bounds,
        }
    }
}

/// One row per `n` of the plan, each on its own seed from [`derive_row_seed`].
pub fn concentration_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    concentration_sweep_with(plan, None, |_| {})
}

/// As [`concentration_sweep`] with an explicit worker count and a callback
/// after each finished row.
pub fn concentration_sweep_with(
    plan: &SweepPlan,
    workers: Option<usize>,
    mut on_row: impl FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    let specs = plan.specs()?;
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let seed = derive_row_seed(plan.master_seed, spec.n());
        let batch = estimate_moments_with(&spec, plan.trials, seed, workers)?;
        let row = SweepRow::from_batch(&batch, plan.epsilon);
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}
