//! Sampling `X` uniformly from the constrained class, the weights `Z` and the
//! product `Y = X ⊙ Z`, plus exhaustive enumeration of the class for small
//! specs.
//!
//! Generator: every trial owns a `ChaCha8Rng` keyed by
//! `seed_from_u64(master_seed)` on stream `trial_index`. The stream is a
//! pure function of the pair, so trials can run in any order or thread.
//! Within a trial, rows are processed top to bottom: first the row support
//! (partial Fisher–Yates), then all `n` weights of that row left to right.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{DenseMatrix, ModelSpec};
use crate::error::{Error, Result};

pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        TrialSeed {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Uniform `r`-subset of `0..n`, sorted: partial Fisher–Yates over the
/// identity arrangement, keeping the first `r` slots.
pub fn sample_row_support<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Vec<usize>> {
    if r == 0 || r > n {
        return Err(Error::Argument(format!(
            "row count r = {r} outside 1..={n}"
        )));
    }
    let mut cols: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = rng.random_range(i..n);
        cols.swap(i, j);
    }
    cols.truncate(r);
    cols.sort_unstable();
    Ok(cols)
}

/// One realisation of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSample {
    /// 0–1 support matrix.
    pub x: DenseMatrix,
    /// `X ⊙ Z`.
    pub y: DenseMatrix,
    /// `X ⊙ (Z / ν)`, built from the scale-free part of each draw.
    pub y_unit: DenseMatrix,
}

pub fn sample_trial(spec: &ModelSpec, seed: TrialSeed) -> ConstrainedSample {
    let n = spec.n();
    let mut rng = seed.rng();
    let mut x = vec![0.0; n * n];
    let mut y = vec![0.0; n * n];
    let mut y_unit = vec![0.0; n * n];
    for (i, &ri) in spec.r().iter().enumerate() {
        let support = sample_row_support(n, ri, &mut rng).expect("spec validated row counts");
        for &j in &support {
            x[i * n + j] = 1.0;
        }
        for j in 0..n {
            let w = spec.dist().draw(&mut rng);
            if x[i * n + j] != 0.0 {
                y[i * n + j] = w.value;
                y_unit[i * n + j] = w.unit;
            }
        }
    }
    let build = |v| DenseMatrix::new(n, v).expect("sampled entries are finite and nonnegative");
    ConstrainedSample {
        x: build(x),
        y: build(y),
        y_unit: build(y_unit),
    }
}

/// `(X, Y)` for one trial.
pub fn sample_constrained_matrix(spec: &ModelSpec, seed: TrialSeed) -> (DenseMatrix, DenseMatrix) {
    let s = sample_trial(spec, seed);
    (s.x, s.y)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `∏ C(n, r_i)`, saturating.
pub fn constraint_class_size(spec: &ModelSpec) -> u128 {
    spec.r()
        .iter()
        .fold(1u128, |acc, &ri| acc.saturating_mul(binomial(spec.n(), ri)))
}

/// Every matrix of the constrained class, once each: the lexicographic
/// product of the per-row lexicographic `r_i`-subsets, last row fastest.
pub fn enumerate_constraint_matrices(spec: &ModelSpec) -> Result<ConstraintMatrices> {
    let size = constraint_class_size(spec);
    if size > ENUMERATION_LIMIT {
        return Err(Error::size_limit(
            "constrained class size",
            size,
            ENUMERATION_LIMIT,
        ));
    }
    let n = spec.n();
    let row_choices: Vec<Vec<Vec<usize>>> = spec
        .r()
        .iter()
        .map(|&ri| (0..n).combinations(ri).collect())
        .collect();
    Ok(ConstraintMatrices {
        n,
        row_choices,
        odometer: vec![0; n],
        done: false,
    })
}

#[derive(Debug, Clone)]
pub struct ConstraintMatrices {
    n: usize,
    row_choices: Vec<Vec<Vec<usize>>>,
    odometer: Vec<usize>,
    done: bool,
}

impl ConstraintMatrices {
    /// Current row supports, before advancing.
    fn current(&self) -> DenseMatrix {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for (i, &k) in self.odometer.iter().enumerate() {
            for &j in &self.row_choices[i][k] {
                entries[i * n + j] = 1.0;
            }
        }
        DenseMatrix::new(n, entries).expect("0-1 entries")
    }

    fn advance(&mut self) {
        for i in (0..self.n).rev() {
            self.odometer[i] += 1;
            if self.odometer[i] < self.row_choices[i].len() {
                return;
            }
            self.odometer[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for ConstraintMatrices {
    type Item = DenseMatrix;

    fn next(&mut self) -> Option<DenseMatrix> {
        if self.done {
            return None;
        }
        let m = self.current();
        self.advance();
        Some(m)
    }
}
