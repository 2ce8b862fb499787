use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use super::fmt::format_general;

/// A real number held as sign and natural-log magnitude, with zero as a
/// separate flag. Permanents and `μ_n` outgrow `f64` long before the Ryser
/// guard is reached, so they travel in this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    is_zero: bool,
    log_mag: f64,
    sign: i8,
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        is_zero: true,
        log_mag: 0.0,
        sign: 1,
    };

    pub const ONE: ScaledValue = ScaledValue {
        is_zero: false,
        log_mag: 0.0,
        sign: 1,
    };

    /// Positive value `e^{log_mag}`.
    ///
    /// # Panics
    /// If `log_mag` is not finite.
    pub fn from_ln(log_mag: f64) -> Self {
        assert!(
            log_mag.is_finite(),
            "log magnitude must be finite, got {log_mag}"
        );
        ScaledValue {
            is_zero: false,
            log_mag,
            sign: 1,
        }
    }

    /// # Panics
    /// If `x` is NaN or infinite.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot scale non-finite value {x}");
        if x == 0.0 {
            return Self::ZERO;
        }
        ScaledValue {
            is_zero: false,
            log_mag: x.abs().ln(),
            sign: if x < 0.0 { -1 } else { 1 },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// Natural log of the magnitude, `None` for zero.
    pub fn log_mag(&self) -> Option<f64> {
        (!self.is_zero).then_some(self.log_mag)
    }

    /// `+1` or `-1`; zero reports `+1`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Plain float, overflowing to `±inf` or underflowing to `0` as `exp` does.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            f64::from(self.sign) * self.log_mag.exp()
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero {
            return Self::ZERO;
        }
        ScaledValue {
            is_zero: false,
            log_mag: self.log_mag * f64::from(k),
            sign: if self.sign < 0 && k % 2 == 1 { -1 } else { 1 },
        }
    }

    /// `self / other`, `None` when `other` is zero.
    pub fn checked_div(&self, other: &ScaledValue) -> Option<Self> {
        if other.is_zero {
            return None;
        }
        if self.is_zero {
            return Some(Self::ZERO);
        }
        Some(ScaledValue {
            is_zero: false,
            log_mag: self.log_mag - other.log_mag,
            sign: self.sign * other.sign,
        })
    }

    /// `|self − other| / |other|`, evaluated without leaving log space when
    /// both are nonzero and share a sign.
    pub fn rel_diff(&self, other: &ScaledValue) -> f64 {
        match (self.is_zero, other.is_zero) {
            (true, true) => 0.0,
            (_, true) | (true, _) => 1.0,
            _ if self.sign != other.sign => 1.0 + (self.log_mag - other.log_mag).exp(),
            _ => (self.log_mag - other.log_mag).exp_m1().abs(),
        }
    }

    /// Decimal rendering with `sig` significant digits. Values beyond `f64`
    /// range are rendered from the base-10 logarithm.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        if self.is_zero {
            return "0".into();
        }
        let x = self.to_f64();
        if x.is_finite() && x != 0.0 {
            return format_general(x, sig);
        }
        let log10 = self.log_mag / std::f64::consts::LN_10;
        let mut exp = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exp);
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exp += 1.0;
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        let exp_sign = if exp < 0.0 { '-' } else { '+' };
        format!(
            "{sign}{}e{exp_sign}{:02}",
            format_general(mantissa, sig),
            exp.abs() as i64
        )
    }
}

impl Mul for ScaledValue {
    type Output = ScaledValue;

    fn mul(self, rhs: ScaledValue) -> ScaledValue {
        if self.is_zero || rhs.is_zero {
            return Self::ZERO;
        }
        ScaledValue {
            is_zero: false,
            log_mag: self.log_mag + rhs.log_mag,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for ScaledValue {
    type Output = ScaledValue;

    /// # Panics
    /// On division by zero; use [`ScaledValue::checked_div`] otherwise.
    fn div(self, rhs: ScaledValue) -> ScaledValue {
        self.checked_div(&rhs)
            .expect("division by a zero ScaledValue")
    }
}

impl PartialOrd for ScaledValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let key = |v: &ScaledValue| -> i8 {
            if v.is_zero {
                0
            } else {
                v.sign
            }
        };
        match key(self).cmp(&key(other)) {
            Ordering::Equal => match key(self) {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for ScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(17))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_a_flag() {
        let z = ScaledValue::from_f64(0.0);
        assert!(z.is_zero());
        assert_eq!(z.log_mag(), None);
        assert_eq!(z.to_f64(), 0.0);
        assert_eq!((z * ScaledValue::from_f64(5.0)).to_f64(), 0.0);
        assert!(ScaledValue::ONE.checked_div(&z).is_none());
        assert_eq!(z.checked_div(&ScaledValue::ONE), Some(ScaledValue::ZERO));
    }

    #[test]
    fn signs_multiply() {
        let a = ScaledValue::from_f64(-2.0);
        let b = ScaledValue::from_f64(3.0);
        assert!(((a * b).to_f64() + 6.0).abs() < 1e-12);
        assert!(((a / b).to_f64() + 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(a.powi(2).sign(), 1);
        assert_eq!(a.powi(3).sign(), -1);
    }

    #[test]
    fn huge_values_render_from_logs() {
        // 200! ≈ 7.8865786736479050e+374
        let v = ScaledValue::from_ln(crate::domain::ln_factorial(200));
        assert!(v.to_f64().is_infinite());
        let s = v.to_decimal_string(6);
        assert_eq!(s, "7.88658e+374");
    }

    #[test]
    fn ordering() {
        let vals = [-3.0, -0.5, 0.0, 0.25, 4.0].map(ScaledValue::from_f64);
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    proptest! {
        #[test]
        fn repeated_product_adds_logs(v in 1e-3f64..1e3, k in 1u32..200) {
            let sv = ScaledValue::from_f64(v);
            let prod = (0..k).fold(ScaledValue::ONE, |acc, _| acc * sv);
            let expected = f64::from(k) * v.ln();
            prop_assert!((prod.log_mag().unwrap() - expected).abs() <= 1e-12 * f64::from(k));
        }

        #[test]
        fn ratio_is_exact_in_log_space(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let (sa, sb) = (ScaledValue::from_f64(a), ScaledValue::from_f64(b));
            let q = sa / sb;
            prop_assert_eq!(q.log_mag().unwrap(), sa.log_mag().unwrap() - sb.log_mag().unwrap());
        }
    }
}
