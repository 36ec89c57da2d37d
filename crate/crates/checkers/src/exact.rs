//! Exact amplitude representation for rational mass parameters.
//!
//! For mu = p/q in lowest terms every time-t amplitude equals
//! base^{-(t-1)/2} * (d1, d2) with integers d1, d2 and base = p^2 + q^2.
//! The integer pair evolves without the per-step normalization factor, so
//! identities between amplitudes can be checked exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest numerator/denominator accepted for a rational mass, chosen so
/// that base = p^2 + q^2 cannot overflow u64.
pub const MAX_MU_PART: u64 = (1 << 31) - 1;

/// Rational mass parameter mu = p/q, stored in lowest terms with q >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMu {
    p: u64,
    q: u64,
    base: u64,
}

impl ExactMu {
    /// Builds mu = p/q, reducing to lowest terms.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter(
                "mu denominator must be nonzero".into(),
            ));
        }
        if p > MAX_MU_PART || q > MAX_MU_PART {
            return Err(Error::InvalidParameter(format!(
                "mu numerator and denominator must be <= {MAX_MU_PART}"
            )));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        Ok(ExactMu {
            p,
            q,
            base: p * p + q * q,
        })
    }

    /// Numerator of mu in lowest terms.
    pub fn numer(&self) -> u64 {
        self.p
    }

    /// Denominator of mu in lowest terms.
    pub fn denom(&self) -> u64 {
        self.q
    }

    /// p^2 + q^2; amplitudes at time t carry the scale base^{-(t-1)/2}.
    pub fn base(&self) -> u64 {
        self.base
    }

    /// r with r^2 = base, when base is a perfect square.
    pub fn sqrt_base(&self) -> Option<u64> {
        exact_sqrt(self.base)
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Amplitude stored exactly: the value is base^{-half_exp/2} * (d1, d2).
///
/// half_exp equals t - 1 for a value read from the time-t slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactAmplitude {
    pub d1: BigInt,
    pub d2: BigInt,
    pub base: u64,
    pub half_exp: u32,
}

impl ExactAmplitude {
    pub fn zero(base: u64, half_exp: u32) -> Self {
        ExactAmplitude {
            d1: BigInt::zero(),
            d2: BigInt::zero(),
            base,
            half_exp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero()
    }

    /// Both components as f64, accurate to a few ulp.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            scaled_to_f64(&self.d1, self.base, self.half_exp),
            scaled_to_f64(&self.d2, self.base, self.half_exp),
        )
    }

    /// d1^2 + d2^2 over base^half_exp; always rational.
    pub fn probability(&self) -> BigRational {
        let num = &self.d1 * &self.d1 + &self.d2 * &self.d2;
        BigRational::new(num, pow_big(self.base, self.half_exp))
    }

    pub fn probability_f64(&self) -> f64 {
        let num = &self.d1 * &self.d1 + &self.d2 * &self.d2;
        big_ratio_to_f64(&num, &pow_big(self.base, self.half_exp))
    }

    /// Exact value equality, aligning scale exponents where possible.
    ///
    /// Values at scales differing by an odd power of base^{1/2} are equal
    /// only when both are zero, unless base is a perfect square.
    pub fn value_eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let (lo, hi) = if self.half_exp <= other.half_exp {
            (self, other)
        } else {
            (other, self)
        };
        let diff = hi.half_exp - lo.half_exp;
        if diff % 2 == 0 {
            let f = pow_big(lo.base, diff / 2);
            &lo.d1 * &f == hi.d1 && &lo.d2 * &f == hi.d2
        } else if let Some(r) = exact_sqrt(lo.base) {
            let f = pow_big(r, diff);
            &lo.d1 * &f == hi.d1 && &lo.d2 * &f == hi.d2
        } else {
            lo.is_zero() && hi.is_zero()
        }
    }

    /// Components as exact rationals, when the scale factor is rational.
    pub fn rational_pair(&self) -> Option<(BigRational, BigRational)> {
        let den = if self.half_exp.is_multiple_of(2) {
            pow_big(self.base, self.half_exp / 2)
        } else {
            pow_big(exact_sqrt(self.base)?, self.half_exp)
        };
        Some((
            BigRational::new(self.d1.clone(), den.clone()),
            BigRational::new(self.d2.clone(), den),
        ))
    }
}

pub(crate) fn pow_big(base: u64, exp: u32) -> BigInt {
    BigInt::from(base).pow(exp)
}

/// f64 value of base^{-half_exp/2} * d, computed without overflowing
/// intermediate conversions.
pub(crate) fn scaled_to_f64(d: &BigInt, base: u64, half_exp: u32) -> f64 {
    if d.is_zero() {
        return 0.0;
    }
    if half_exp.is_multiple_of(2) {
        big_ratio_to_f64(d, &pow_big(base, half_exp / 2))
    } else {
        let mag = big_ratio_to_f64(&(d * d), &pow_big(base, half_exp)).sqrt();
        if d.is_negative() {
            -mag
        } else {
            mag
        }
    }
}

/// f64 value of num/den, accurate to ~1 ulp, usable when either operand is
/// far outside f64 range as long as the quotient is representable.
pub(crate) fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    debug_assert!(!den.is_zero());
    let negative = num.is_negative() != den.is_negative();
    let (num, den) = (num.abs(), den.abs());
    // Shift so the integer quotient carries ~64 significant bits.
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let q = if shift >= 0 {
        (&num >> shift as u64) / &den
    } else {
        (&num << (-shift) as u64) / &den
    };
    let value = q.to_f64().unwrap_or(f64::INFINITY) * (shift as f64).exp2();
    if negative {
        -value
    } else {
        value
    }
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let guess = (n as f64).sqrt().round() as u64;
    (guess.saturating_sub(1)..=guess.saturating_add(1)).find(|&r| r.checked_mul(r) == Some(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_reduces_to_lowest_terms() {
        let mu = ExactMu::new(2, 4).unwrap();
        assert_eq!((mu.numer(), mu.denom(), mu.base()), (1, 2, 5));
        let mu = ExactMu::new(0, 7).unwrap();
        assert_eq!((mu.numer(), mu.denom(), mu.base()), (0, 1, 1));
    }

    #[test]
    fn mu_rejects_zero_denominator() {
        assert!(ExactMu::new(1, 0).is_err());
    }

    #[test]
    fn perfect_square_base() {
        // 3/4 gives base 25 = 5^2.
        let mu = ExactMu::new(3, 4).unwrap();
        assert_eq!(mu.sqrt_base(), Some(5));
        let mu = ExactMu::new(1, 2).unwrap();
        assert_eq!(mu.sqrt_base(), None);
    }

    #[test]
    fn ratio_to_f64_handles_huge_operands() {
        let num = BigInt::from(3) * BigInt::from(2).pow(400);
        let den = BigInt::from(2).pow(401);
        assert_eq!(big_ratio_to_f64(&num, &den), 1.5);
        assert_eq!(big_ratio_to_f64(&-num, &den), -1.5);
    }

    #[test]
    fn scaled_readout_matches_hand_values() {
        // 2^{-2/2} * (1, -1) = (1/2, -1/2).
        let a = ExactAmplitude {
            d1: BigInt::from(1),
            d2: BigInt::from(-1),
            base: 2,
            half_exp: 2,
        };
        assert_eq!(a.to_f64_pair(), (0.5, -0.5));
        // Odd half exponent: 2^{-1/2} * 1.
        let b = ExactAmplitude {
            d1: BigInt::from(1),
            d2: BigInt::zero(),
            base: 2,
            half_exp: 1,
        };
        let (b1, _) = b.to_f64_pair();
        assert!((b1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn value_eq_aligns_even_scale_differences() {
        let small = ExactAmplitude {
            d1: BigInt::from(3),
            d2: BigInt::from(-2),
            base: 5,
            half_exp: 3,
        };
        let big = ExactAmplitude {
            d1: BigInt::from(75),
            d2: BigInt::from(-50),
            base: 5,
            half_exp: 7,
        };
        assert!(small.value_eq(&big));
        assert!(big.value_eq(&small));
    }

    #[test]
    fn value_eq_odd_difference_needs_square_base() {
        let small = ExactAmplitude {
            d1: BigInt::from(1),
            d2: BigInt::zero(),
            base: 25,
            half_exp: 0,
        };
        let big = ExactAmplitude {
            d1: BigInt::from(5),
            d2: BigInt::zero(),
            base: 25,
            half_exp: 1,
        };
        assert!(small.value_eq(&big));

        let small = ExactAmplitude { base: 2, ..small };
        let big = ExactAmplitude { base: 2, ..big };
        assert!(!small.value_eq(&big));
        assert!(ExactAmplitude::zero(2, 0).value_eq(&ExactAmplitude::zero(2, 3)));
    }

    #[test]
    fn probability_is_rational() {
        let a = ExactAmplitude {
            d1: BigInt::from(3),
            d2: BigInt::from(-2),
            base: 5,
            half_exp: 3,
        };
        assert_eq!(a.probability(), BigRational::new(13.into(), 125.into()));
    }
}
