//! Half-integer angular momenta and the Wigner 6-j symbol.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {0:?} as a half-integer (expected e.g. \"3/2\", \"1\", \"-1/2\")")]
pub struct HalfIntParseError(pub String);

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = HalfIntParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || HalfIntParseError(s.to_string());
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| err())?;
            match den.trim() {
                "1" => Ok(HalfInt(2 * num)),
                "2" => Ok(HalfInt(num)),
                _ => Err(err()),
            }
        } else if let Ok(n) = t.parse::<i32>() {
            Ok(HalfInt(2 * n))
        } else {
            let x: f64 = t.parse().map_err(|_| err())?;
            let twice = 2.0 * x;
            if twice.fract() == 0.0 && twice.abs() < f64::from(i32::MAX) {
                Ok(HalfInt(twice as i32))
            } else {
                Err(err())
            }
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct HalfIntVisitor;

        impl<'de> Visitor<'de> for HalfIntVisitor {
            type Value = HalfInt;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string like \"3/2\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<HalfInt, E> {
                i32::try_from(v)
                    .map(HalfInt::from_int)
                    .map_err(|_| E::custom(format!("{v} out of range")))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<HalfInt, E> {
                i32::try_from(v)
                    .map(HalfInt::from_int)
                    .map_err(|_| E::custom(format!("{v} out of range")))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<HalfInt, E> {
                v.to_string().parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<HalfInt, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(HalfIntVisitor)
    }
}

fn factorial(n: i32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Triangle rule plus integer perimeter; arguments are doubled values.
fn triad_ok(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

/// Δ(abc)² = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!, doubled arguments.
fn triangle_coefficient(a: i32, b: i32, c: i32) -> BigRational {
    let num = factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2);
    let den = factorial((a + b + c) / 2 + 1);
    BigRational::new(num, den)
}

/// The 6-j symbol {j1 j2 j3; j4 j5 j6}.
///
/// Racah's single-sum formula, evaluated in exact rational arithmetic. The
/// square root of the triangle coefficients is taken once, on the final
/// rational, so no cancellation happens in floating point. Arguments that
/// violate a triangle or parity rule give 0.
pub fn wigner6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> f64 {
    let [a, b, c, d, e, f] = [j1.0, j2.0, j3.0, j4.0, j5.0, j6.0];
    if !(triad_ok(a, b, c) && triad_ok(a, e, f) && triad_ok(d, b, f) && triad_ok(d, e, c)) {
        return 0.0;
    }

    let alpha = [
        (a + b + c) / 2,
        (a + e + f) / 2,
        (d + b + f) / 2,
        (d + e + c) / 2,
    ];
    let beta = [
        (a + b + d + e) / 2,
        (a + c + d + f) / 2,
        (b + c + e + f) / 2,
    ];
    let t_min = *alpha.iter().max().expect("non-empty");
    let t_max = *beta.iter().min().expect("non-empty");

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let mut den = BigInt::one();
        for al in alpha {
            den *= factorial(t - al);
        }
        for be in beta {
            den *= factorial(be - t);
        }
        let mut term = BigRational::new(factorial(t + 1), den);
        if t % 2 != 0 {
            term = -term;
        }
        sum += term;
    }
    if sum.is_zero() {
        return 0.0;
    }

    let prefactor = triangle_coefficient(a, b, c)
        * triangle_coefficient(a, e, f)
        * triangle_coefficient(d, b, f)
        * triangle_coefficient(d, e, c);
    let magnitude = (prefactor * &sum * &sum)
        .to_f64()
        .expect("finite rational")
        .sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Convenience wrapper taking textual arguments such as `"3/2"`.
pub fn wigner6j_str(args: [&str; 6]) -> Result<f64, HalfIntParseError> {
    let mut js = [HalfInt::ZERO; 6];
    for (slot, s) in js.iter_mut().zip(args) {
        *slot = s.parse()?;
    }
    Ok(wigner6j(js[0], js[1], js[2], js[3], js[4], js[5]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), h(3));
        assert_eq!("1".parse::<HalfInt>().unwrap(), h(2));
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), h(-1));
        assert_eq!("2.5".parse::<HalfInt>().unwrap(), h(5));
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), h(4));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("abc".parse::<HalfInt>().is_err());
        assert!("0.3".parse::<HalfInt>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for twice in -7..8 {
            let x = h(twice);
            assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        }
    }

    #[test]
    fn triangle_violation_is_zero() {
        // (1, 1, 3) is not a triangle
        assert_eq!(wigner6j(h(2), h(2), h(6), h(1), h(1), h(1)), 0.0);
        // parity violation: 1/2 + 1/2 + 1/2 is not an integer
        assert_eq!(wigner6j(h(1), h(1), h(1), h(1), h(1), h(1)), 0.0);
    }

    #[test]
    fn known_closed_forms() {
        // {a b c; 0 c b} = (−1)^{a+b+c}/√((2b+1)(2c+1))
        let v = wigner6j(h(2), h(3), h(1), h(0), h(1), h(3));
        let expected = -1.0 / (4.0f64 * 2.0).sqrt();
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(wigner6j_str(["1", "1", "x", "1/2", "1/2", "1/2"]).is_err());
    }

    #[test]
    fn serde_accepts_string_and_integer() {
        #[derive(Deserialize)]
        struct Doc {
            a: HalfInt,
            b: HalfInt,
        }
        let doc: Doc = toml::from_str("a = \"3/2\"\nb = 2").unwrap();
        assert_eq!(doc.a, h(3));
        assert_eq!(doc.b, h(4));
    }
}
