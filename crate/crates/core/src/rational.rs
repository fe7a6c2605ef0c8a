//! Exact rationals and certified bounds on natural logarithms.
//!
//! Every inequality in the crate is decided in exact arithmetic. The only
//! irrational quantity is `ln n`, which is bracketed by dyadic rationals
//! whose width comfortably exceeds the error of the platform `ln`.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

const LN_SCALE: f64 = 4_294_967_296.0; // 2^32
const LN_SLACK: f64 = 1e-9;

pub fn int(n: impl Into<i128>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn frac(num: impl Into<i128>, den: impl Into<i128>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Rational bracket `lo <= ln n <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LnBounds {
    pub lo: Rational,
    pub hi: Rational,
}

pub fn ln_bounds(n: u64) -> LnBounds {
    assert!(n >= 1, "ln of zero");
    if n == 1 {
        return LnBounds {
            lo: Rational::zero(),
            hi: Rational::zero(),
        };
    }
    let x = (n as f64).ln();
    let den = LN_SCALE as i128;
    let lo = ((x - LN_SLACK) * LN_SCALE).floor() as i128;
    let hi = ((x + LN_SLACK) * LN_SCALE).ceil() as i128;
    LnBounds {
        lo: Rational::new(lo.max(0), den),
        hi: Rational::new(hi, den),
    }
}

/// Is `lhs < c * card / ln(card)` certain?
///
/// Decided as `lhs * hi < c * card`, which implies the real inequality.
/// For `card <= 1` the right-hand side is undefined and the answer is no.
pub fn certainly_below_c_ratio(lhs: u64, c: Rational, card: usize) -> bool {
    if card <= 1 {
        return false;
    }
    let ln = ln_bounds(card as u64);
    int(lhs as i128) * ln.hi < c * int(card as i128)
}

/// Largest `m` for which `m < c * card / ln(card)` is certain (0 if none).
pub fn max_certain_below_c_ratio(c: Rational, card: usize) -> u64 {
    if card <= 1 || !c.is_positive() {
        return 0;
    }
    let ln = ln_bounds(card as u64);
    // m * hi < c * card  <=>  m < c * card / hi
    let bound = c * int(card as i128) / ln.hi;
    let floor = bound.floor();
    let m = floor.to_integer();
    let m = if floor == bound { m - 1 } else { m };
    m.max(0) as u64
}

/// Upper bound on `m * ln(card) / card`: the smallest `c` that would have
/// gated in an instance of size `m` against a set of size `card`.
pub fn c_threshold_upper(m: u64, card: usize) -> Rational {
    let ln = ln_bounds(card as u64);
    int(m as i128) * ln.hi / int(card as i128)
}

/// Renders `n` or `n/d`.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<i128>().ok().map(Rational::from_integer),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// serde adapter storing a rational as its `n/d` rendering.
pub mod serde_str {
    use super::{parse, render, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&render(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let s: Option<String> = Option::deserialize(d)?;
            s.map(|s| parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_brackets_contain_the_float_value() {
        for n in [2u64, 3, 9, 100, 10007, 1 << 30] {
            let b = ln_bounds(n);
            let x = (n as f64).ln();
            assert!(to_f64(&b.lo) < x && x < to_f64(&b.hi), "n = {n}");
            assert!(to_f64(&(b.hi - b.lo)) < 1e-8);
        }
        assert_eq!(ln_bounds(1).hi, Rational::zero());
    }

    #[test]
    fn certified_gate() {
        // 2 * 9 / ln 9 = 8.19...
        assert!(certainly_below_c_ratio(8, int(2), 9));
        assert!(!certainly_below_c_ratio(9, int(2), 9));
        assert_eq!(max_certain_below_c_ratio(int(2), 9), 8);
        // c|A|/ln|A| with |A| = 1 is undefined
        assert!(!certainly_below_c_ratio(0, int(1), 1));
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(render(&frac(6, 4)), "3/2");
        assert_eq!(render(&int(-5)), "-5");
        assert_eq!(parse(" 1/2 "), Some(frac(1, 2)));
        assert_eq!(parse("3"), Some(int(3)));
        assert_eq!(parse("1/0"), None);
    }
}
