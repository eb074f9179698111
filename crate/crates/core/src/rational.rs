//! Exact rational helpers: decimal literal parsing and rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always stored in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an unsigned decimal literal such as `12`, `0.05`, `.5` or `1.2e-08` into an exact rational.
pub fn parse_decimal(src: &str) -> Option<Rational> {
    let (mantissa, exponent) = match src.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = src[pos + 1..].parse().ok()?;
            (&src[..pos], exp)
        }
        None => (src, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Number of fractional decimal digits needed to print `r` exactly, if it terminates.
fn terminating_digits(r: &Rational) -> Option<usize> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den.is_one() {
        Some(twos.max(fives))
    } else {
        None
    }
}

/// Renders `r` as an exact decimal when its expansion terminates.
pub fn to_exact_decimal(r: &Rational) -> Option<String> {
    let digits = terminating_digits(r)?;
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits - s.len() + 1), s);
        }
        s.insert(s.len() - digits, '.');
    }
    Some(if neg { format!("-{s}") } else { s })
}

/// Human-readable rendering: exact decimal when possible, otherwise `n/d`.
pub fn render(r: &Rational) -> String {
    to_exact_decimal(r).unwrap_or_else(|| format!("{}/{}", r.numer(), r.denom()))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale down through the bit lengths
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Rounds `r` to `digits` places after the decimal point and renders it.
pub fn to_fixed(r: &Rational, digits: usize) -> String {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let rounded = (r * &scale).round() / scale;
    let mut s = to_exact_decimal(&rounded).expect("power-of-ten denominator");
    if digits > 0 {
        let have = s.split_once('.').map_or(0, |(_, f)| f.len());
        if have == 0 {
            s.push('.');
        }
        s.push_str(&"0".repeat(digits - have));
    }
    s
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Floor of log2 bounds are computed in f64; this keeps huge values finite.
pub fn log2(r: &Rational) -> f64 {
    let bits_n = r.numer().bits() as i64;
    let bits_d = r.denom().bits() as i64;
    if bits_n < 1000 && bits_d < 1000 {
        return to_f64(r).log2();
    }
    let shift = (bits_n - 60).max(0) - (bits_d - 60).max(0);
    let n = (r.numer().abs() >> (bits_n - 60).max(0) as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> (bits_d - 60).max(0) as usize).to_f64().unwrap_or(f64::NAN);
    (n / d).log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.05"), Some(ratio(1, 20)));
        assert_eq!(parse_decimal("0.3465"), Some(ratio(693, 2000)));
        assert_eq!(parse_decimal("12"), Some(int(12)));
        assert_eq!(parse_decimal(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_decimal("1.2e-08"), Some(ratio(12, 1_000_000_000)));
        assert_eq!(parse_decimal("2E3"), Some(int(2000)));
        assert_eq!(parse_decimal("."), None);
        assert_eq!(parse_decimal("1.x"), None);
    }

    #[test]
    fn rendering() {
        assert_eq!(render(&ratio(1, 20)), "0.05");
        assert_eq!(render(&ratio(-61, 200)), "-0.305");
        assert_eq!(render(&ratio(1, 3)), "1/3");
        assert_eq!(render(&int(7)), "7");
        assert_eq!(to_fixed(&ratio(2, 3), 4), "0.6667");
        assert_eq!(to_fixed(&int(1), 3), "1.000");
    }

    #[test]
    fn log2_of_large_values() {
        assert!((log2(&ratio(1, 1024)) + 10.0).abs() < 1e-12);
        let huge = Rational::new(num_traits::pow(BigInt::from(2), 3000), BigInt::from(3));
        assert!((log2(&huge) - (3000.0 - 3f64.log2())).abs() < 1e-9);
    }
}
