//! Floating-point numbers with an out-of-band binary exponent.
//!
//! Kummer series at large argument grow like `e^z`, far past the `f64`
//! range, while the quantities of interest are ratios of such series.
//! [`ScaledReal`] keeps a normalized mantissa and an `i64` exponent so
//! those ratios can be formed without overflow.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

const LN_2: f64 = std::f64::consts::LN_2;
// Cody-Waite split of ln 2; the high part has trailing zero bits so that
// k * LN2_HI is exact for |k| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// Splits a finite, non-zero `x` into `(m, e)` with `|m|` in `[1, 2)` and
/// `x = m * 2^e`. Zero and non-finite values come back unchanged with `e = 0`.
pub fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal: lift into the normal range first (exact)
        let (m, e) = frexp(x * f64::from_bits(((54 + 1023) as u64) << 52));
        return (m, e - 54);
    }
    let m = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1023_u64 << 52));
    (m, biased - 1023)
}

/// `m * 2^e`, saturating to zero or infinity outside the `f64` range.
pub fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let mut x = m;
    let mut e = e;
    while e > 1023 {
        x *= pow2(1023);
        e -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1022 {
        x *= pow2(-600);
        e += 600;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e)
}

#[inline]
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// A real number stored as `mantissa * 2^exponent`.
///
/// The mantissa carries the sign and satisfies `1 <= |mantissa| < 2` unless
/// the value is zero, in which case both fields are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: i64,
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: ScaledReal = ScaledReal {
        mantissa: 1.0,
        exponent: 0,
    };

    /// Builds a normalized value from an arbitrary finite mantissa and exponent.
    pub fn new(mantissa: f64, exponent: i64) -> Self {
        assert!(mantissa.is_finite(), "ScaledReal mantissa must be finite");
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mantissa);
        ScaledReal {
            mantissa: m,
            exponent: exponent + e,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0)
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// `e^x` without overflow for any finite `x`.
    pub fn exp(x: f64) -> Self {
        let k = (x / LN_2).floor();
        let r = (x - k * LN2_HI) - k * LN2_LO;
        Self::new(r.exp(), k as i64)
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn abs(self) -> Self {
        ScaledReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// Natural logarithm of a positive value; `NaN` otherwise.
    pub fn ln(self) -> f64 {
        if self.mantissa <= 0.0 {
            return f64::NAN;
        }
        self.mantissa.ln() + self.exponent as f64 * LN_2
    }

    /// Scales by an integer power of two (exact).
    pub fn mul_pow2(self, k: i64) -> Self {
        if self.is_zero() {
            return self;
        }
        ScaledReal {
            mantissa: self.mantissa,
            exponent: self.exponent + k,
        }
    }

    pub fn mul_f64(self, x: f64) -> Self {
        Self::new(self.mantissa * x, self.exponent)
    }

    /// Quotient as a plain `f64`. Use for ratios of comparably sized values.
    pub fn ratio(self, other: ScaledReal) -> f64 {
        (self / other).to_f64()
    }
}

impl Default for ScaledReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for ScaledReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> Self {
        ScaledReal {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledReal {
    type Output = ScaledReal;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "ScaledReal division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = big.exponent - small.exponent;
        if shift > 1100 {
            return big;
        }
        Self::new(
            big.mantissa + ldexp(small.mantissa, -shift),
            big.exponent,
        )
    }
}

impl Sub for ScaledReal {
    type Output = ScaledReal;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Sum for ScaledReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        d.mantissa.partial_cmp(&0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_mantissa() {
        let x = ScaledReal::from_f64(12.0);
        assert_eq!(x.mantissa(), 1.5);
        assert_eq!(x.exponent(), 3);
        let y = ScaledReal::from_f64(-0.375);
        assert_eq!(y.mantissa(), -1.5);
        assert_eq!(y.exponent(), -2);
        assert!(ScaledReal::from_f64(0.0).is_zero());
    }

    #[test]
    fn subnormals_round_trip() {
        for x in [f64::MIN_POSITIVE / 3.0, 5e-324, -7.5e-310] {
            assert_eq!(ScaledReal::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn exp_beyond_double_range() {
        let big = ScaledReal::exp(1000.0);
        assert!((big.ln() - 1000.0).abs() < 1e-12);
        let ratio = ScaledReal::exp(5000.0) / ScaledReal::exp(4990.0);
        assert!((ratio.to_f64() / 10f64.exp() - 1.0).abs() < 1e-12);
        assert_eq!(ScaledReal::exp(2.0).to_f64(), 2f64.exp());
    }

    #[test]
    fn to_f64_saturates() {
        assert_eq!(ScaledReal::exp(800.0).to_f64(), f64::INFINITY);
        assert_eq!(ScaledReal::exp(-800.0).to_f64(), 0.0);
    }

    #[test]
    fn cancellation_to_zero() {
        let x = ScaledReal::exp(300.0);
        assert!((x - x).is_zero());
        assert!(ScaledReal::from_f64(2.0) > ScaledReal::from_f64(1.5));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(ScaledReal::from_f64(x).to_f64(), x);
        }

        #[test]
        fn mantissa_stays_normalized(a in -1e300f64..1e300, b in -1e300f64..1e300) {
            let s = ScaledReal::from_f64(a) * ScaledReal::from_f64(b) + ScaledReal::from_f64(a);
            let m = s.mantissa().abs();
            prop_assert!(s.is_zero() || (1.0..2.0).contains(&m));
        }

        #[test]
        fn positive_sums_ignore_grouping(
            terms in proptest::collection::vec((0.5f64..2.0, -2000i64..2000), 1..60),
            split in 0usize..60,
        ) {
            let xs: Vec<ScaledReal> = terms.iter().map(|&(m, e)| ScaledReal::new(m, e)).collect();
            let forward: ScaledReal = xs.iter().copied().sum();
            let backward: ScaledReal = xs.iter().rev().copied().sum();
            let k = split.min(xs.len());
            let grouped = xs[..k].iter().copied().sum::<ScaledReal>()
                + xs[k..].iter().copied().sum::<ScaledReal>();
            let n = xs.len() as f64;
            let bound = 2.0 * n * f64::EPSILON;
            prop_assert!(((forward - backward) / forward).to_f64().abs() <= bound);
            prop_assert!(((forward - grouped) / forward).to_f64().abs() <= bound);
        }
    }
}
