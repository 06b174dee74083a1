//! Exact rational scalars and the small amount of integer arithmetic around them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; every exact formula evaluates to one of these.
pub type Exact = BigRational;

pub fn int(v: i64) -> Exact {
    Exact::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Exact {
    Exact::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(v: impl Into<BigInt>) -> Exact {
    Exact::from_integer(v.into())
}

/// `base^exp` for a possibly negative exponent. `0^negative` is a domain error.
pub fn pow_signed(base: &Exact, exp: i64) -> Result<Exact> {
    if exp >= 0 {
        return Ok(num_traits::pow(base.clone(), exp as usize));
    }
    if base.is_zero() {
        return Err(Error::Domain("zero raised to a negative power".into()));
    }
    Ok(num_traits::pow(base.recip(), (-exp) as usize))
}

/// Always renders as `num/den`, including integers (`3/1`).
pub fn to_fraction_string(x: &Exact) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `7`, `-3/4` or a finite decimal such as `0.125`, exactly.
pub fn parse_exact(s: &str) -> Result<Exact> {
    let t = s.trim();
    let bad = || Error::Invalid(format!("cannot parse '{s}' as an exact rational"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Invalid(format!("zero denominator in '{s}'")));
        }
        return Ok(Exact::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Exact::new(n, d));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Exact::from_integer(n))
}

pub fn to_f64(x: &Exact) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerators/denominators: scale through the integer part
            let int_part = x.trunc();
            let frac = x - &int_part;
            int_part.numer().to_f64().unwrap_or(f64::NAN)
                + frac.numer().to_f64().unwrap_or(0.0) / frac.denom().to_f64().unwrap_or(1.0)
        }
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

pub fn binomial_usize(n: usize, k: usize) -> usize {
    binomial(n as i64, k as i64)
        .to_usize()
        .expect("binomial coefficient overflows usize")
}

/// Exact square root of a nonnegative perfect square, `None` otherwise.
pub fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}
