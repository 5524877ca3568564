//! Scalar abstraction and exact-to-real conversions.
//!
//! Every real-valued quantity in the crate is computed in a generic `F: Real`.
//! Exact integers and rationals are reduced to reals only through the helpers
//! here, which scale by powers of two so that counts with thousands of bits
//! never overflow and never lose more than one rounding step of precision.

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};

/// Floating point scalar used for every logarithmic quantity.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; exact for `f64` itself.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("every f64 is representable in a Real")
    }

    fn of_usize(x: usize) -> Self {
        Self::of(x as f64)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Bits of precision retained when reducing big integers.
const KEEP_BITS: u64 = 64;

/// Splits `x > 0` into `(mantissa, exponent)` with `x ≈ mantissa · 2^exponent`
/// and `mantissa` in `[1, 2)`.
fn split(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    let (top, top_bits) = if bits <= KEEP_BITS {
        (x.to_f64().unwrap_or(f64::INFINITY), bits)
    } else {
        (
            (x >> (bits - KEEP_BITS)).to_f64().unwrap_or(f64::INFINITY),
            KEEP_BITS,
        )
    };
    (top / 2f64.powi(top_bits as i32 - 1), bits as i64 - 1)
}

/// Natural logarithm of a positive big integer. Returns `-inf` for zero.
pub fn ln_big<F: Real>(x: &BigUint) -> F {
    if x.is_zero() {
        return F::neg_infinity();
    }
    let (mantissa, exponent) = split(x);
    F::of(mantissa).ln() + F::of(exponent as f64) * F::LN_2()
}

/// `ln(num / den)` for positive integers, computed without forming the quotient as a float.
pub fn ln_ratio<F: Real>(num: &BigUint, den: &BigUint) -> F {
    if num.is_zero() {
        return F::neg_infinity();
    }
    // Scale the numerator so the integer quotient carries ~64 significant bits.
    let scale = KEEP_BITS as i64 + den.bits() as i64 - num.bits() as i64;
    let quotient = if scale >= 0 {
        (num << scale as u64) / den
    } else {
        (num >> (-scale) as u64) / den
    };
    let (mantissa, exponent) = split(&quotient);
    F::of(mantissa).ln() + F::of((exponent - scale) as f64) * F::LN_2()
}

/// `num / den` as a real. Underflows to zero only below the scalar's range.
pub fn ratio<F: Real>(num: &BigUint, den: &BigUint) -> F {
    if num.is_zero() {
        return F::zero();
    }
    ln_ratio::<F>(num, den).exp()
}

/// `-ln(1 - num/den)` for `0 < num < den`, accurate whether the ratio is tiny or close to one.
pub fn neg_ln_complement<F: Real>(num: &BigUint, den: &BigUint) -> F {
    debug_assert!(num < den);
    let p: F = ratio(num, den);
    if p <= F::of(0.5) {
        -(-p).ln_1p()
    } else {
        let rest = den - num;
        -ln_ratio::<F>(&rest, den)
    }
}

/// `⌊e^x⌋` as a big integer. Below `2^52`, values within `1e−9` (relative) of an
/// integer snap to it; beyond that the leading 53 bits are those of the floating
/// point value and the rest are zero.
pub fn floor_exp<F: Real>(x: F) -> BigUint {
    let x = x.to_f64().unwrap_or(f64::NAN);
    if x.is_nan() {
        return BigUint::zero();
    }
    let bits = x / std::f64::consts::LN_2;
    if bits < 52.0 {
        let v = x.exp();
        let nearest = v.round();
        let snapped = if (v - nearest).abs() <= 1e-9 * v.max(1.0) {
            nearest
        } else {
            v.floor()
        };
        return BigUint::from(snapped as u64);
    }
    let shift = bits.floor() as u64 - 52;
    let mantissa = (x - shift as f64 * std::f64::consts::LN_2).exp().floor();
    BigUint::from(mantissa as u64) << shift
}

/// `log(Σ exp(terms))`, stable for terms of any magnitude.
pub fn log_sum_exp<F: Real>(terms: impl IntoIterator<Item = F> + Clone) -> F {
    let max = terms
        .clone()
        .into_iter()
        .fold(F::neg_infinity(), |acc, t| acc.max(t));
    if max == F::neg_infinity() || max == F::infinity() {
        return max;
    }
    let sum = terms
        .into_iter()
        .fold(F::zero(), |acc, t| acc + (t - max).exp());
    max + sum.ln()
}
