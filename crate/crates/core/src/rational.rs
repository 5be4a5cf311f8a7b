//! Exact scalar arithmetic. Every coefficient in the engine is a
//! `Rational`: arbitrary-precision, always in lowest terms, positive
//! denominator. Floating point never appears.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Canonical text form: integers render bare, proper fractions as `p/q`.
pub fn render(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p`, or `p/q`. Rejects anything with a fractional point.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: BigInt = text.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Sign-aware rendering used when joining terms with `+`/`-`.
pub fn render_signed(q: &Rational) -> (char, String) {
    if q.is_negative() {
        ('-', render(&-q))
    } else {
        ('+', render(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_render() {
        let q = ratio(4, -6);
        assert_eq!(render(&q), "-2/3");
        assert_eq!(render(&rat(5)), "5");
        assert_eq!(parse("-7/21"), Some(ratio(-1, 3)));
        assert_eq!(parse("3"), Some(rat(3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("0.5"), None);
    }
}
