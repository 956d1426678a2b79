//! Exact rational kernels: Pochhammer symbols, harmonic numbers and
//! generalized binomial coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in reduced form with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rising factorial `x (x+1) ... (x+n-1)`; the empty product is 1.
pub fn pochhammer(x: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// `n!` as an exact integer-valued rational.
pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// `n! / (n-m)!`.
pub fn falling_factorial(n: usize, m: usize) -> Rational {
    debug_assert!(m <= n);
    ((n - m + 1)..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// Ordinary binomial coefficient.
pub fn binomial(n: usize, m: usize) -> Rational {
    if m > n {
        return Rational::zero();
    }
    falling_factorial(n, m) / factorial(m)
}

/// Generalized harmonic number `sum_{k=1}^{n} 1/(theta + k - 1)`.
pub fn gen_harmonic(theta: &Rational, n: usize) -> Result<Rational> {
    if !theta.is_positive() {
        return Err(Error::Parameter(format!(
            "harmonic numbers need theta > 0, got {}",
            fmt_rational(theta)
        )));
    }
    let mut acc = Rational::zero();
    let mut denom = theta.clone();
    for _ in 0..n {
        acc += denom.recip();
        denom += Rational::one();
    }
    Ok(acc)
}

/// Generalized binomial coefficient `x (x-1) ... (x-m+1) / m!`.
pub fn gen_binomial(x: &Rational, m: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..m {
        acc *= &term;
        term -= Rational::one();
    }
    acc / factorial(m)
}

/// Canonical `p/q` rendering; integers are written with denominator 1.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` or `1e-6`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{whole}{frac}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&ratio(7, 3), 0), int(1));
        assert_eq!(pochhammer(&int(1), 3), int(6));
        assert_eq!(pochhammer(&ratio(1, 2), 2), ratio(3, 4));
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(gen_harmonic(&int(3), 0).unwrap(), int(0));
        assert_eq!(gen_harmonic(&int(1), 3).unwrap(), ratio(11, 6));
        assert_eq!(gen_harmonic(&int(2), 2).unwrap(), ratio(5, 6));
        assert!(matches!(gen_harmonic(&int(0), 2), Err(Error::Parameter(_))));
        assert!(gen_harmonic(&ratio(-1, 2), 2).is_err());
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(gen_binomial(&ratio(5, 7), 0), int(1));
        assert_eq!(gen_binomial(&ratio(1, 2), 2), ratio(-1, 8));
        assert_eq!(gen_binomial(&ratio(-1, 2), 2), ratio(3, 8));
        assert_eq!(gen_binomial(&ratio(-1, 2), 3), ratio(-5, 16));
        assert_eq!(gen_binomial(&int(6), 2), binomial(6, 2));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("1e-6").unwrap(), ratio(1, 1_000_000));
        assert_eq!(parse_rational("-2.25").unwrap(), ratio(-9, 4));
        assert_eq!(parse_rational(".1").unwrap(), ratio(1, 10));
        for bad in ["", "abc", "1/0", "1.2.3", "e5", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(fmt_rational(&int(1)), "1/1");
        assert_eq!(fmt_rational(&ratio(-2, 4)), "-1/2");
    }

    proptest! {
        #[test]
        fn pochhammer_splits(num in -40i64..40, den in 1i64..12, a in 0usize..=10, b in 0usize..=10) {
            let x = ratio(num, den);
            let shifted = &x + int(a as i64);
            prop_assert_eq!(pochhammer(&x, a + b), pochhammer(&x, a) * pochhammer(&shifted, b));
        }
    }
}
