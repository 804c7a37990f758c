//! Exact rational scalars and their text forms.
//!
//! Every belief, payoff and mixture weight in the crate is a [`Rational`].
//! Literals are accepted as integers, `p/q` fractions or terminating decimals
//! (`-0.125`), and are printed back as integers or reduced `p/q` strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `2^-k` as an exact rational.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Largest `2^-k` (k >= 0) not exceeding `r`, for `0 < r`; `r >= 1` gives 1.
pub fn floor_dyadic(r: &Rational) -> Rational {
    let mut k = 0;
    while &dyadic(k) > r {
        k += 1;
    }
    dyadic(k)
}

pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let numer: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{text}`"))?;
        let denom: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{text}`"))?;
        if denom.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole
            .strip_prefix('-')
            .or_else(|| whole.strip_prefix('+'))
            .unwrap_or(whole);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal `{text}`"));
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal `{text}`"));
        }
        let whole: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| format!("bad decimal `{text}`"))?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| format!("bad decimal `{text}`"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::new(whole * &scale + frac_val, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    s.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| format!("bad rational literal `{text}`"))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed-point decimal rendering with `digits` fractional digits, rounding
/// half away from zero. Used for byte-stable SVG coordinates.
pub fn format_fixed(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let half = rat(1, 2);
    let rounded = if scaled.is_negative() {
        -((-scaled + half).floor())
    } else {
        (scaled + half).floor()
    };
    let n = rounded.to_integer();
    let negative = n.is_negative();
    let (q, rem) = n.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0>width$}", rem.to_string(), width = digits)
    }
}

pub fn to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(format_rational(r))
}

pub fn from_json(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|m| Error::schema(path, m)),
        Value::String(s) => parse_rational(s).map_err(|m| Error::schema(path, m)),
        other => Err(Error::schema(
            path,
            format!("expected a rational (integer, \"p/q\" or decimal string), got {other}"),
        )),
    }
}

pub fn vec_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(to_json).collect())
}

pub fn vec_from_json(v: &Value, path: &str) -> Result<Vec<Rational>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of rationals"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_norm(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(zero)
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(c: &Rational, a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| c * x).collect()
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { one() } else { zero() }).collect()
}

pub(crate) fn get<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    let map = obj
        .as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))?;
    map.get(key)
        .ok_or_else(|| Error::schema(join(path, key), "missing field"))
}

pub(crate) fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub(crate) fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-1/3").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn floor_dyadic_brackets() {
        assert_eq!(floor_dyadic(&rat(3, 8)), rat(1, 4));
        assert_eq!(floor_dyadic(&rat(1, 4)), rat(1, 4));
        assert_eq!(floor_dyadic(&int(5)), int(1));
    }

    #[test]
    fn rejects_bad_literals() {
        for bad in ["", "1/0", "a", "1.", "1.2.3", "1/x", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_numbers_keep_exact_decimals() {
        let v: Value = serde_json::from_str("[0.1, 3, \"2/6\"]").unwrap();
        let xs = vec_from_json(&v, "x").unwrap();
        assert_eq!(xs, vec![rat(1, 10), int(3), rat(1, 3)]);
    }

    #[test]
    fn fixed_formatting_rounds_half_away() {
        assert_eq!(format_fixed(&rat(1, 3), 3), "0.333");
        assert_eq!(format_fixed(&rat(2, 3), 2), "0.67");
        assert_eq!(format_fixed(&rat(-1, 8), 2), "-0.13");
        assert_eq!(format_fixed(&int(12), 1), "12.0");
        assert_eq!(format_fixed(&rat(1, 2), 0), "1");
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_rational(&rat(4, 8)), "1/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(to_json(&int(5)), Value::from(5));
    }
}
