/// Summary of per-trial ratios `T_n / μ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub se_mean: f64,
    /// Jackknife standard error of `variance`; needs at least 3 trials.
    pub se_variance: Option<f64>,
}

impl Summary {
    /// Summarises `values` in index order.
    ///
    /// # Panics
    /// With fewer than two values.
    pub fn from_values(values: &[f64]) -> Self {
        let len = values.len();
        assert!(len >= 2, "variance needs at least two trials, got {len}");
        let n = len as f64;
        let mean = values.iter().sum::<f64>() / n;
        let all_equal = values.iter().all(|&v| v == values[0]);
        let (sum_sq, variance) = if all_equal {
            (0.0, 0.0)
        } else {
            // Corrected two-pass.
            let (s1, s2) = values.iter().fold((0.0, 0.0), |(s1, s2), &v| {
                let d = v - mean;
                (s1 + d, s2 + d * d)
            });
            let ss = (s2 - s1 * s1 / n).max(0.0);
            (ss, ss / (n - 1.0))
        };
        Summary {
            trials: len,
            mean,
            variance,
            se_mean: (variance / n).sqrt(),
            se_variance: jackknife_variance_se(values, mean, sum_sq),
        }
    }
}

/// Delete-one jackknife over the unbiased variance. Leave-one-out sums of
/// squares come from `SS_(i) = SS − (x_i − m)² · N/(N − 1)`.
fn jackknife_variance_se(values: &[f64], mean: f64, sum_sq: f64) -> Option<f64> {
    let len = values.len();
    if len < 3 {
        return None;
    }
    if sum_sq == 0.0 {
        return Some(0.0);
    }
    let n = len as f64;
    let loo: Vec<f64> = values
        .iter()
        .map(|&v| {
            let d = v - mean;
            (sum_sq - d * d * n / (n - 1.0)).max(0.0) / (n - 2.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / n;
    let spread: f64 = loo.iter().map(|v| (v - loo_mean).powi(2)).sum();
    Some(((n - 1.0) / n * spread).sqrt())
}

/// Fraction of values with `|v − 1| > epsilon`.
pub fn deviation_probability(values: &[f64], epsilon: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values
        .iter()
        .filter(|&&v| (v - 1.0).abs() > epsilon)
        .count() as f64
        / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force jackknife: recompute the variance with each point removed.
    fn jackknife_oracle(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
        };
        let loo: Vec<f64> = (0..values.len())
            .map(|i| {
                let rest: Vec<f64> = values
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, v)| *v)
                    .collect();
                var(&rest)
            })
            .collect();
        let m = loo.iter().sum::<f64>() / n;
        ((n - 1.0) / n * loo.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sqrt()
    }

    #[test]
    fn basic_summary() {
        let s = Summary::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.se_mean - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_values_have_zero_variance() {
        let vals = vec![0.1 + 0.2; 7];
        let s = Summary::from_values(&vals);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.se_variance, Some(0.0));
        assert_eq!(Summary::from_values(&[1.0, 1.0]).se_variance, None);
    }

    #[test]
    fn deviation_counts() {
        assert_eq!(deviation_probability(&[1.0, 1.05, 1.2, 0.8, 0.0], 0.1), 0.6);
        assert_eq!(deviation_probability(&[], 0.1), 0.0);
    }

    proptest! {
        #[test]
        fn jackknife_matches_brute_force(values in proptest::collection::vec(0.0f64..3.0, 3..40)) {
            let s = Summary::from_values(&values);
            let oracle = jackknife_oracle(&values);
            let got = s.se_variance.unwrap();
            prop_assert!((got - oracle).abs() <= 1e-9 * oracle.max(1e-12), "{got} vs {oracle}");
        }
    }
}
