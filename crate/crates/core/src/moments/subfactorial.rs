use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Largest `j` kept in the cached table of `b_j`.
pub const SUBFACTORIAL_TABLE_MAX: usize = 170;

/// Number of fixed-point-free permutations of `j` elements.
pub fn derangements(j: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
    if j == 0 {
        return prev;
    }
    for k in 2..=j {
        let next = (&prev + &cur) * BigUint::from(k - 1);
        prev = cur;
        cur = next;
    }
    cur
}

fn table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(SUBFACTORIAL_TABLE_MAX + 1);
        let mut term = BigRational::one();
        let mut acc = BigRational::one();
        out.push(acc.clone());
        for l in 1..=SUBFACTORIAL_TABLE_MAX {
            term = -term / BigRational::from_integer(BigInt::from(l));
            acc += &term;
            out.push(acc.clone());
        }
        out
    })
}

/// `b_j = Σ_{l=0}^{j} (−1)^l / l!` as an exact rational; `j!·b_j` is the
/// derangement count.
pub fn subfactorial_b(j: usize) -> BigRational {
    if j <= SUBFACTORIAL_TABLE_MAX {
        return table()[j].clone();
    }
    let mut factorial = BigInt::one();
    for k in 2..=j {
        factorial *= BigInt::from(k);
    }
    BigRational::new(BigInt::from(derangements(j)), factorial)
}

/// `Σ_{k=0}^{n} β^k / k! · b_{n−k}`, exactly.
pub fn weighted_subfactorial_sum(n: usize, beta: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    // β^k / k!
    let mut weight = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            weight = weight * beta / BigRational::from_integer(BigInt::from(k));
        }
        let b = subfactorial_b(n - k);
        if !b.is_zero() {
            total += &weight * b;
        }
    }
    total
}
