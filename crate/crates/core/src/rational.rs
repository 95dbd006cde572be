//! Exact rational scalars and points with a canonical `"num/den"` wire form.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Parse a rational from `"num/den"` or a bare integer string.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
    let den: BigInt = d.parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(num, den))
}

/// Format a rational as `"num/den"` (always with an explicit denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serde adapter serializing `BigRational` as a `"num/den"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `base^exp` for a rational base and unsigned integer exponent.
pub fn pow_rational(base: &BigRational, exp: u32) -> BigRational {
    BigRational::new(base.numer().pow(exp), base.denom().pow(exp))
}

/// `floor(r)` as a `BigInt`.
pub fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// `ceil(r)` as a `BigInt`.
pub fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Sup-norm distance between two points of equal dimension.
pub fn sup_dist(a: &[BigRational], b: &[BigRational]) -> Result<BigRational> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let mut best = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs();
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Sup-norm distance from a point to a closed axis-aligned box given by
/// per-axis `[lo, hi]` intervals (zero when the point is inside).
pub fn sup_dist_point_box(p: &[BigRational], lo: &[BigRational], hi: &[BigRational]) -> BigRational {
    let mut best = BigRational::zero();
    for i in 0..p.len() {
        let d = if p[i] < lo[i] {
            &lo[i] - &p[i]
        } else if p[i] > hi[i] {
            &p[i] - &hi[i]
        } else {
            BigRational::zero()
        };
        if d > best {
            best = d;
        }
    }
    best
}

/// Sup-norm distance between two closed axis-aligned boxes (zero on overlap).
pub fn sup_dist_box_box(
    alo: &[BigRational],
    ahi: &[BigRational],
    blo: &[BigRational],
    bhi: &[BigRational],
) -> BigRational {
    let mut best = BigRational::zero();
    for i in 0..alo.len() {
        let d = if ahi[i] < blo[i] {
            &blo[i] - &ahi[i]
        } else if bhi[i] < alo[i] {
            &alo[i] - &bhi[i]
        } else {
            BigRational::zero()
        };
        if d > best {
            best = d;
        }
    }
    best
}

/// A rational point `(p_1/q, ..., p_d/q)` stored with a shared positive
/// denominator, canonicalized so that `gcd(p_1, ..., p_d, q) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    /// Per-coordinate numerators.
    pub numerators: Vec<BigInt>,
    /// Shared denominator, strictly positive.
    pub denominator: BigUint,
}

impl RationalPoint {
    /// Build and canonicalize; `denominator` must be nonzero.
    pub fn new(numerators: Vec<BigInt>, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidParams("rational point with zero denominator".into()));
        }
        let mut g: BigUint = denominator.clone();
        for n in &numerators {
            g = g.gcd(&n.magnitude());
            if g.is_one() {
                break;
            }
        }
        if g.is_one() {
            return Ok(Self { numerators, denominator });
        }
        let gi = BigInt::from(g.clone());
        Ok(Self {
            numerators: numerators.into_iter().map(|n| n / &gi).collect(),
            denominator: denominator / &g,
        })
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    /// Coordinates as exact rationals.
    pub fn coords(&self) -> Vec<BigRational> {
        let den = BigInt::from(self.denominator.clone());
        self.numerators
            .iter()
            .map(|n| BigRational::new(n.clone(), den.clone()))
            .collect()
    }

    /// True when canonical denominator lies in `[lo, hi)`.
    pub fn denominator_in_band(&self, lo: &BigUint, hi: &BigUint) -> bool {
        &self.denominator >= lo && &self.denominator < hi
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .numerators
            .iter()
            .map(|n| format!("{}/{}", n, self.denominator))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        let r = parse_rational("-3/6").unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(format_rational(&r), "-1/2");
        assert_eq!(parse_rational("7").unwrap(), BigRational::from(BigInt::from(7)));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn point_canonicalizes_shared_gcd() {
        let p = RationalPoint::new(
            vec![BigInt::from(2), BigInt::from(4)],
            BigUint::from(6u32),
        )
        .unwrap();
        assert_eq!(p.numerators, vec![BigInt::from(1), BigInt::from(2)]);
        assert_eq!(p.denominator, BigUint::from(3u32));
        // (1/2, 1/3) has no shared representation shrink: lcm form 3/6, 2/6.
        let q = RationalPoint::new(
            vec![BigInt::from(3), BigInt::from(2)],
            BigUint::from(6u32),
        )
        .unwrap();
        assert_eq!(q.denominator, BigUint::from(6u32));
    }

    #[test]
    fn sup_dist_box_cases() {
        let one = BigRational::one();
        let zero = BigRational::zero();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        // point inside box
        assert_eq!(
            sup_dist_point_box(&[half.clone()], &[zero.clone()], &[one.clone()]),
            zero
        );
        // disjoint boxes gap 1/2
        let d = sup_dist_box_box(
            &[zero.clone()],
            &[half.clone()],
            &[one.clone()],
            &[one.clone() + one.clone()],
        );
        assert_eq!(d, half);
    }
}
