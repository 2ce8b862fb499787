//! Brute-force ground truth for the moment formulas.

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;

use super::closed_form::mu_n;
use crate::domain::ModelSpec;
use crate::error::{Error, Result};
use crate::model::enumerate_constraint_matrices;
use crate::permanent::per_naive;

pub const PAIR_MAX_N: usize = 7;
pub const ENUMERATE_MAX_N: usize = 6;

/// Per-row factors of `E R_σ1 R_σ2`: rows where the permutations agree
/// contribute `δ p_i`, the others `(ν p_i)² (1 − 1/r_i) n/(n − 1)`, with
/// `p_i = r_i / n`.
struct PairFactors {
    agree: Vec<f64>,
    differ: Vec<f64>,
}

impl PairFactors {
    fn new(spec: &ModelSpec) -> Self {
        let n = spec.n() as f64;
        let (nu, delta) = spec.dist().moments();
        let p = |r: usize| r as f64 / n;
        let agree = spec.r().iter().map(|&r| delta * p(r)).collect();
        let differ = spec
            .r()
            .iter()
            .map(|&r| {
                if spec.n() < 2 {
                    // no two permutations of one element differ
                    0.0
                } else {
                    (nu * p(r)).powi(2) * (1.0 - 1.0 / r as f64) * (n / (n - 1.0))
                }
            })
            .collect();
        PairFactors { agree, differ }
    }

    fn moment(&self, s1: &[usize], s2: &[usize]) -> f64 {
        s1.iter()
            .zip(s2)
            .enumerate()
            .map(|(i, (a, b))| {
                if a == b {
                    self.agree[i]
                } else {
                    self.differ[i]
                }
            })
            .product()
    }
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::Argument(format!(
            "permutation has length {}, expected {n}",
            sigma.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in sigma {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Argument(format!(
                "{sigma:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

/// `E R_σ1 R_σ2` where `R_σ = ∏_i Y_{i,σ(i)}`.
pub fn pair_moment(sigma1: &[usize], sigma2: &[usize], spec: &ModelSpec) -> Result<f64> {
    check_permutation(sigma1, spec.n())?;
    check_permutation(sigma2, spec.n())?;
    Ok(PairFactors::new(spec).moment(sigma1, sigma2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSum {
    /// `E T_n²`.
    pub second_moment: f64,
    /// `E T_n² / μ_n²`.
    pub ratio: f64,
}

/// `E T_n² = Σ_{σ1,σ2} E R_σ1 R_σ2` over all `(n!)²` pairs, `n ≤ 7`.
///
/// Outer permutations are spread over the rayon pool; their partial sums are
/// collected in lexicographic order and added sequentially.
pub fn brute_second_moment_pairs(spec: &ModelSpec) -> Result<PairSum> {
    let n = spec.n();
    if n > PAIR_MAX_N {
        return Err(Error::size_limit(
            "pair enumeration dimension",
            n as u64,
            PAIR_MAX_N as u64,
        ));
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let factors = PairFactors::new(spec);
    let partials: Vec<f64> = perms
        .par_iter()
        .map(|s1| perms.iter().map(|s2| factors.moment(s1, s2)).sum::<f64>())
        .collect();
    let second_moment: f64 = partials.iter().sum();
    let mu = mu_n(spec).to_f64();
    Ok(PairSum {
        second_moment,
        ratio: second_moment / (mu * mu),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumeratedMoments {
    /// `E T_n`.
    pub mean: f64,
    /// `E T_n²`.
    pub second_moment: f64,
}

/// `E_Z per(X ⊙ Z)²` for a fixed 0–1 support:
/// `Σ_{σ1,σ2 ⊆ x} δ^{|σ1∩σ2|} ν^{2(n − |σ1∩σ2|)}`.
///
/// Dynamic programme over rows with state (columns used by σ1, columns used
/// by σ2); row `i` extends both permutations by one supported column each.
/// The two state tables are kept between calls.
struct SupportDp {
    n: usize,
    nu2: f64,
    delta: f64,
    cur: Vec<f64>,
    next: Vec<f64>,
    active: Vec<usize>,
    touched: Vec<usize>,
}

impl SupportDp {
    fn new(n: usize, nu: f64, delta: f64) -> Self {
        SupportDp {
            n,
            nu2: nu * nu,
            delta,
            cur: vec![0.0; 1 << (2 * n)],
            next: vec![0.0; 1 << (2 * n)],
            active: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn second_moment(&mut self, supports: &[&[usize]]) -> f64 {
        let n = self.n;
        let full = (1usize << n) - 1;
        self.active.clear();
        self.active.push(0);
        self.cur[0] = 1.0;
        for support in supports {
            self.touched.clear();
            for &state in &self.active {
                let w = self.cur[state];
                self.cur[state] = 0.0;
                let (m1, m2) = (state >> n, state & full);
                for &a in support.iter().filter(|&&a| m1 & (1 << a) == 0) {
                    for &b in support.iter().filter(|&&b| m2 & (1 << b) == 0) {
                        let idx = ((m1 | 1 << a) << n) | (m2 | 1 << b);
                        if self.next[idx] == 0.0 {
                            self.touched.push(idx);
                        }
                        self.next[idx] += w * if a == b { self.delta } else { self.nu2 };
                    }
                }
            }
            std::mem::swap(&mut self.cur, &mut self.next);
            std::mem::swap(&mut self.active, &mut self.touched);
        }
        let last = (full << n) | full;
        let result = self.cur[last];
        for &state in &self.active {
            self.cur[state] = 0.0;
        }
        result
    }
}

/// `(E T_n, E T_n²)` averaged over every `X` of the constrained class, with
/// the weights integrated analytically: for fixed `X` the expectation over
/// `Z` only involves `ν` and `δ`. Needs `n ≤ 6` and a class of at most
/// `10^7` matrices.
///
/// Both permanents are invariant under row reordering, so each matrix is
/// keyed by its sorted row supports and every distinct multiset of rows is
/// evaluated once.
pub fn exact_moments_enumerate(spec: &ModelSpec) -> Result<EnumeratedMoments> {
    let n = spec.n();
    if n > ENUMERATE_MAX_N {
        return Err(Error::size_limit(
            "enumeration oracle dimension",
            n as u64,
            ENUMERATE_MAX_N as u64,
        ));
    }
    let (nu, delta) = spec.dist().moments();
    let nu_n = nu.powi(n as i32);
    let mut dp = SupportDp::new(n, nu, delta);
    let mut cache: HashMap<u64, (f64, f64)> = HashMap::new();
    let mut masks = vec![0u64; n];
    let mut count = 0u64;
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for x in enumerate_constraint_matrices(spec)? {
        count += 1;
        for (i, mask) in masks.iter_mut().enumerate() {
            *mask = (0..n)
                .filter(|&j| x.get(i, j) != 0.0)
                .map(|j| 1u64 << j)
                .sum();
        }
        masks.sort_unstable();
        let key = masks.iter().fold(0u64, |acc, &m| acc << n | m);
        let (per, per_sq) = match cache.get(&key) {
            Some(&hit) => hit,
            None => {
                let per = per_naive(&x)?.to_f64().round();
                let per_sq = if per == 0.0 {
                    0.0
                } else {
                    let supports: Vec<Vec<usize>> = (0..n)
                        .map(|i| (0..n).filter(|&j| x.get(i, j) != 0.0).collect())
                        .collect();
                    let rows: Vec<&[usize]> = supports.iter().map(Vec::as_slice).collect();
                    dp.second_moment(&rows)
                };
                cache.insert(key, (per, per_sq));
                (per, per_sq)
            }
        };
        first += nu_n * per;
        second += per_sq;
    }
    Ok(EnumeratedMoments {
        mean: first / count as f64,
        second_moment: second / count as f64,
    })
}
