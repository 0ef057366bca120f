//! Exact rational scalars.
//!
//! Every coefficient, sample point and interval endpoint in this crate is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Floating point never enters the pipeline.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Sign as -1, 0, 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// `n!` over `k!(n-k)!` as an exact rational.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(acc, den)
}

/// Renders `p/q` without a denominator when `q == 1`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), rat(6));
        assert_eq!(binomial(5, 0), rat(1));
        assert_eq!(binomial(3, 5), rat(0));
    }

    #[test]
    fn rendering() {
        assert_eq!(rational_to_string(&ratio(-6, 4)), "-3/2");
        assert_eq!(rational_to_string(&rat(7)), "7");
    }
}
