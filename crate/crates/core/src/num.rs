//! Scalar types for quality measures and exact thresholds.
//!
//! Measures are produced from integer counts, so every scalar only needs to
//! know how to build itself from a `numerator / denominator` pair. The floating
//! point instantiations are what the command line uses; [`Exact`] keeps the
//! measures as reduced fractions so two pipelines can be compared without any
//! tolerance.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Exact rational measure. Sums of a handful of per-course ratios fit
/// comfortably; it is meant for small instances and verification.
pub type Exact = Ratio<i128>;

/// A number that a quality measure can be expressed in.
pub trait Scalar: Num + Copy + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// `num / den`; callers guarantee `den > 0`.
    fn ratio(num: u64, den: u64) -> Self;

    fn from_count(n: usize) -> Self;

    fn to_f64(self) -> f64;
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn ratio(num: u64, den: u64) -> Self {
                // divide in f64 first so f32 gets a correctly rounded quotient
                (num as f64 / den as f64) as $t
            }

            #[inline]
            fn from_count(n: usize) -> Self {
                n as $t
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

macro_rules! impl_ratio_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn ratio(num: u64, den: u64) -> Self {
                Ratio::new(num as $t, den as $t)
            }

            fn from_count(n: usize) -> Self {
                Ratio::from_integer(n as $t)
            }

            fn to_f64(self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*};
}

impl_ratio_scalar!(i64, i128);

/// Arithmetic mean of a non-empty sequence; zero for an empty one.
pub fn mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut n = 0usize;
    let mut sum = T::zero();
    for v in values {
        sum = sum + v;
        n += 1;
    }
    if n == 0 {
        T::zero()
    } else {
        sum / T::from_count(n)
    }
}

/// A threshold in `[0, 1]` held as an exact fraction.
///
/// Comparisons against count ratios are done in integer arithmetic, so a
/// configured `0.8` admits a confidence of exactly `4/5` no matter which
/// scalar type the measures are later reported in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold {
    num: u64,
    den: u64,
}

impl Threshold {
    pub const ZERO: Threshold = Threshold { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 || num > den {
            return Err(Error::Config(format!("threshold {num}/{den} is not in [0, 1]")));
        }
        let g = gcd(num, den);
        Ok(Threshold { num: num / g, den: den / g })
    }

    /// Rounds to nine decimal places before converting, so decimal literals
    /// such as `0.8` become the fraction they denote.
    pub fn from_f64(value: f64) -> Result<Self, Error> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!("threshold {value} is not in [0, 1]")));
        }
        const SCALE: u64 = 1_000_000_000;
        Threshold::new((value * SCALE as f64).round() as u64, SCALE)
    }

    /// `num / den >= self`, evaluated exactly. A zero denominator is never admitted.
    #[inline]
    pub fn admits(&self, num: u64, den: u64) -> bool {
        den > 0 && num as u128 * self.den as u128 >= self.num as u128 * den as u128
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::ZERO
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self, Error> {
        Threshold::from_f64(value)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.value()
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Parses a decimal (`0.8`, `1`, `.25`) or a fraction (`4/5`) without going
/// through binary floating point.
impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse threshold {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse::<u64>().map_err(|_| bad())?;
            let d = d.trim().parse::<u64>().map_err(|_| bad())?;
            return Threshold::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        Threshold::new(num, den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_threshold_is_exact() {
        let t: Threshold = "0.8".parse().unwrap();
        assert_eq!((t.numer(), t.denom()), (4, 5));
        assert!(t.admits(4, 5));
        assert!(t.admits(8, 10));
        assert!(!t.admits(79, 100));
        assert_eq!(Threshold::from_f64(0.8).unwrap(), t);
    }

    #[test]
    fn threshold_rejects_out_of_range() {
        assert!("1.5".parse::<Threshold>().is_err());
        assert!(Threshold::from_f64(-0.1).is_err());
        assert!(Threshold::from_f64(f64::NAN).is_err());
        assert!("abc".parse::<Threshold>().is_err());
        assert_eq!("3/4".parse::<Threshold>().unwrap().value(), 0.75);
    }

    #[test]
    fn zero_threshold_admits_zero_counts() {
        assert!(Threshold::ZERO.admits(0, 7));
        assert!(!Threshold::ZERO.admits(0, 0));
    }

    #[test]
    fn mean_in_each_scalar() {
        assert_eq!(mean([0.9f64, 1.0]), 0.95);
        assert_eq!(mean([Exact::ratio(9, 10), Exact::ratio(1, 1)]), Exact::new(19, 20));
        assert!((mean([0.5f32, 1.0]) - 0.75).abs() < 1e-7);
        assert_eq!(mean(Vec::<f64>::new()), 0.0);
    }
}
