//! Exact comparison of positive quantities of the form `coeff * base^exp`
//! with a rational exponent, without floating-point rounding.
//!
//! All such values occurring here have integer bases, so any finite product
//! raised to the lcm of the exponent denominators becomes an exact rational;
//! monotonicity of `x -> x^L` on positives makes the comparison exact. A bit
//! budget guards against pathological exponent sizes.

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::sync::OnceLock;

/// Environment variable overriding the exact-comparison bit budget.
pub const BUDGET_ENV: &str = "BADAPPROX_BUDGET_BITS";
const DEFAULT_BUDGET_BITS: u64 = 8_000_000;

pub fn comparison_budget_bits() -> u64 {
    static BUDGET: OnceLock<u64> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_BUDGET_BITS)
    })
}

/// A positive value `coeff * base^exp` with rational `coeff > 0`, integer
/// `base >= 2`, and rational `exp`. Radii and volume-like quantities in the
/// construction all take this shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerRadius {
    /// Positive rational coefficient, serialized as `"num/den"`.
    #[serde(with = "crate::rational::serde_rational")]
    pub coeff: BigRational,
    /// Integer base, at least 2 after normalization.
    pub base: BigUint,
    /// Rational exponent, serialized as `"num/den"`.
    #[serde(with = "crate::rational::serde_rational")]
    pub exp: BigRational,
}

impl PowerRadius {
    /// Build a normalized value; `coeff` must be positive and `base` nonzero.
    /// A base of 1 is rewritten as base 2 with exponent 0.
    pub fn new(coeff: BigRational, base: BigUint, exp: BigRational) -> Result<Self> {
        if !coeff.is_positive() {
            return Err(Error::InvalidParams("PowerRadius coefficient must be positive".into()));
        }
        if base.is_zero() {
            return Err(Error::InvalidParams("PowerRadius base must be nonzero".into()));
        }
        if base.is_one() {
            return Ok(Self { coeff, base: BigUint::from(2u32), exp: BigRational::zero() });
        }
        Ok(Self { coeff, base, exp })
    }

    /// A plain positive rational viewed as a power value.
    pub fn from_rational(r: BigRational) -> Result<Self> {
        Self::new(r, BigUint::from(2u32), BigRational::zero())
    }

    /// Exact rational value when the exponent is an integer (within budget).
    pub fn exact_value(&self) -> Option<BigRational> {
        if !self.exp.is_integer() {
            return None;
        }
        let e = self.exp.to_integer();
        let mag = e.magnitude().to_u32()?;
        let p = BigInt::from(self.base.pow(mag));
        let v = if e.is_negative() {
            BigRational::new(BigInt::one(), p)
        } else {
            BigRational::from(p)
        };
        Some(&self.coeff * v)
    }

    pub fn scale(&self, r: &BigRational) -> Result<Self> {
        Self::new(&self.coeff * r, self.base.clone(), self.exp.clone())
    }

    /// View as a factor list for product comparisons.
    pub fn product(&self) -> PowerProduct {
        let mut p = PowerProduct::one();
        p.mul_rational(&self.coeff);
        p.mul_power(&self.base, &self.exp);
        p
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        self.product().cmp_exact(&other.product())
    }

    /// Compare against a nonnegative rational (every `PowerRadius` is > 0).
    pub fn cmp_rational(&self, r: &BigRational) -> Result<Ordering> {
        if !r.is_positive() {
            return Ok(Ordering::Greater);
        }
        let mut p = PowerProduct::one();
        p.mul_rational(r);
        self.product().cmp_exact(&p)
    }

    /// Floating-point approximation (diagnostics only, never for decisions).
    pub fn approx_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        let b = nbits(&self.base) as f64; // log2 within 1; refine below
        let _ = b;
        let base_log2 = big_log2(&self.base);
        let e = self.exp.to_f64().unwrap_or(f64::NAN);
        c * (e * base_log2).exp2()
    }

    /// A rational upper bound within a factor of 2 of the true value:
    /// returns `2^(k+1)` where `2^k <= value < 2^(k+1)`.
    pub fn upper_bound_rational(&self) -> Result<BigRational> {
        let k = self.dyadic_floor()?;
        Ok(pow2(k + 1))
    }

    /// A rational lower bound within a factor of 2: `2^k <= value`.
    pub fn lower_bound_rational(&self) -> Result<BigRational> {
        Ok(pow2(self.dyadic_floor()?))
    }

    /// A rational bracket `[lo, hi]` around the value with
    /// `hi - lo = 2^(k - bits)` where `2^k <= value < 2^(k+1)`, produced by
    /// exact bisection of the dyadic bracket.
    pub fn bounds_with_precision(&self, bits: u32) -> Result<(BigRational, BigRational)> {
        let k = self.dyadic_floor()?;
        let mut lo = pow2(k);
        let mut hi = pow2(k + 1);
        let two = BigRational::from(BigInt::from(2));
        for _ in 0..bits {
            let mid = (&lo + &hi) / &two;
            if self.cmp_rational(&mid)? == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi))
    }

    /// The integer `k` with `2^k <= value < 2^(k+1)`.
    pub fn dyadic_floor(&self) -> Result<i64> {
        let log2 = self.coeff.to_f64().map(|c| c.log2()).unwrap_or(0.0)
            + self.exp.to_f64().unwrap_or(0.0) * big_log2(&self.base);
        let mut k = if log2.is_finite() { log2.floor() as i64 } else { 0 };
        // Exact adjustment around the float estimate.
        loop {
            let lo = self.cmp_rational(&pow2(k))?;
            if lo == Ordering::Less {
                k -= 1;
                continue;
            }
            let hi = self.cmp_rational(&pow2(k + 1))?;
            if hi != Ordering::Less {
                k += 1;
                continue;
            }
            return Ok(k);
        }
    }
}

/// Compare `a + b` against the rational `x` exactly. Rational-valued radii
/// (integer exponents) and same-form radii collapse to exact arithmetic;
/// otherwise the sum is bracketed by bisection until it separates from `x`,
/// which terminates because a genuinely irrational sum never equals `x`.
pub fn cmp_sum_to_rational(a: &PowerRadius, b: &PowerRadius, x: &BigRational) -> Result<Ordering> {
    if let (Some(va), Some(vb)) = (a.exact_value(), b.exact_value()) {
        return Ok((va + vb).cmp(x));
    }
    if a.base == b.base && a.exp == b.exp {
        let joined = PowerRadius::new(&a.coeff + &b.coeff, a.base.clone(), a.exp.clone())?;
        return joined.cmp_rational(x);
    }
    let mut bits = 8u32;
    while bits <= 4096 {
        let (alo, ahi) = a.bounds_with_precision(bits)?;
        let (blo, bhi) = b.bounds_with_precision(bits)?;
        if &(ahi + bhi) < x {
            return Ok(Ordering::Less);
        }
        if &(alo + blo) > x {
            return Ok(Ordering::Greater);
        }
        bits *= 2;
    }
    Err(Error::BudgetExceeded { bits: 4096, budget: 4096, var: "radius-sum bisection depth" })
}

fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from(BigInt::from(1u8) << (k as usize))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(1u8) << ((-k) as usize))
    }
}

fn nbits(b: &BigUint) -> u64 {
    b.bits()
}

fn big_log2(b: &BigUint) -> f64 {
    // log2 via leading 53 bits; exact enough for bracketing estimates.
    let bits = b.bits();
    if bits <= 53 {
        return b.to_f64().unwrap_or(1.0).log2();
    }
    let shift = bits - 53;
    let top = (b >> shift).to_f64().unwrap_or(1.0);
    top.log2() + shift as f64
}

/// A positive product `prod_i base_i^{exp_i}` of integer bases with rational
/// exponents. Rational coefficients enter as base factors of their numerator
/// and denominator, so raising the whole product to an integer power is just
/// exponent scaling.
#[derive(Debug, Clone, Default)]
pub struct PowerProduct {
    factors: Vec<(BigUint, BigRational)>,
}

impl PowerProduct {
    pub fn one() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn mul_power(&mut self, base: &BigUint, exp: &BigRational) {
        if base.is_one() || exp.is_zero() || base.is_zero() {
            return;
        }
        for (b, e) in &mut self.factors {
            if b == base {
                *e += exp;
                return;
            }
        }
        self.factors.push((base.clone(), exp.clone()));
    }

    /// Multiply by a positive rational.
    pub fn mul_rational(&mut self, r: &BigRational) {
        debug_assert!(r.is_positive());
        self.mul_power(&r.numer().magnitude(), &BigRational::one());
        self.mul_power(&r.denom().magnitude(), &-BigRational::one());
    }

    /// Multiply by `r^e` for a positive rational base `r`.
    pub fn mul_rational_pow(&mut self, r: &BigRational, e: &BigRational) {
        debug_assert!(r.is_positive());
        self.mul_power(&r.numer().magnitude(), e);
        self.mul_power(&r.denom().magnitude(), &-e.clone());
    }

    pub fn mul(&mut self, other: &PowerProduct) {
        for (b, e) in &other.factors {
            self.mul_power(b, e);
        }
    }

    /// Raise the product to a rational power.
    pub fn pow(&mut self, p: &BigRational) {
        for (_, e) in &mut self.factors {
            *e *= p;
        }
    }

    /// Exact three-way comparison with another positive product.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        // Compare self/other against 1.
        let mut ratio = self.clone();
        for (b, e) in &other.factors {
            ratio.mul_power(b, &-e.clone());
        }
        ratio.cmp_one()
    }

    fn cmp_one(&self) -> Result<Ordering> {
        // lcm of exponent denominators
        let mut l = BigInt::one();
        for (_, e) in &self.factors {
            l = l.lcm(e.denom());
        }
        // budget check: sum |e*l| * bits(base)
        let budget = comparison_budget_bits();
        let mut total_bits: u64 = 0;
        let mut int_exps: Vec<(&BigUint, BigInt)> = Vec::new();
        for (b, e) in &self.factors {
            let ei = (e * BigRational::from(l.clone())).to_integer();
            if ei.is_zero() {
                continue;
            }
            let mag = ei.magnitude().to_u64().unwrap_or(u64::MAX);
            total_bits = total_bits.saturating_add(mag.saturating_mul(nbits(b)));
            int_exps.push((b, ei));
        }
        if total_bits > budget {
            return Err(Error::BudgetExceeded { bits: total_bits, budget, var: BUDGET_ENV });
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (b, ei) in int_exps {
            let mag = ei.magnitude().to_u32().ok_or(Error::BudgetExceeded {
                bits: total_bits,
                budget,
                var: BUDGET_ENV,
            })?;
            let p = b.pow(mag);
            if ei.is_negative() {
                den *= p;
            } else {
                num *= p;
            }
        }
        Ok(num.cmp(&den))
    }
}

/// `floor(x^(1/n))` for nonnegative `x` given as a rational; used when a
/// minimal integer threshold against a power inequality is wanted.
pub fn floor_nth_root(x: &BigRational, n: u32) -> BigUint {
    if !x.is_positive() {
        return BigUint::zero();
    }
    // floor((a/b)^(1/n)) = floor(floor(a*b^(n-1))^(1/n) / b) computed via
    // integer roots: r = floor( (a * b^{n-1})^{1/n} ) / b  -- verify locally.
    let a = x.numer().magnitude().clone();
    let b = x.denom().magnitude().clone();
    let scaled = &a * b.pow(n - 1);
    let root = scaled.nth_root(n);
    let mut r = &root / &b;
    // adjust: want largest r with r^n <= x, i.e. r^n * b_den <= ...
    let check = |r: &BigUint| -> bool {
        let v = BigRational::new(BigInt::from(r.pow(n)), BigInt::one());
        v <= *x
    };
    while !check(&r) {
        r -= BigUint::one();
    }
    loop {
        let next = &r + BigUint::one();
        if check(&next) {
            r = next;
        } else {
            break;
        }
    }
    r
}

impl std::fmt::Display for PowerRadius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} * {}^({})", format_rational(&self.coeff), self.base, format_rational(&self.exp))
    }
}

/// Parse `"coeff*base^exp"` or a plain rational.
pub fn parse_power(s: &str) -> std::result::Result<PowerRadius, String> {
    let s = s.trim();
    if let Some((c, rest)) = s.split_once('*') {
        let coeff = parse_rational(c)?;
        let (b, e) = rest.split_once('^').ok_or("expected base^exp after '*'")?;
        let base: BigUint = b.trim().trim_matches(['(', ')']).parse().map_err(|e| format!("bad base: {e}"))?;
        let exp = parse_rational(e.trim().trim_matches(['(', ')']))?;
        PowerRadius::new(coeff, base, exp).map_err(|e| e.to_string())
    } else {
        PowerRadius::from_rational(parse_rational(s)?).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn integer_exponent_collapses_to_rational() {
        // 1/2 * 2^-12 = 2^-13
        let p = PowerRadius::new(rat("1/2"), BigUint::from(2u32), rat("-12")).unwrap();
        assert_eq!(p.exact_value().unwrap(), rat("1/8192"));
    }

    #[test]
    fn fractional_exponent_comparison() {
        // 2 * 9^(-3/2) = 2/27 exactly; compare against 2/27 and neighbors.
        let p = PowerRadius::new(rat("2"), BigUint::from(9u32), rat("-3/2")).unwrap();
        assert_eq!(p.cmp_rational(&rat("2/27")).unwrap(), Ordering::Equal);
        assert_eq!(p.cmp_rational(&rat("3/27")).unwrap(), Ordering::Less);
        assert_eq!(p.cmp_rational(&rat("1/27")).unwrap(), Ordering::Greater);
        // 5^(1/2) vs 9/4: 5 vs 81/16 -> less
        let a = PowerRadius::new(rat("1"), BigUint::from(5u32), rat("1/2")).unwrap();
        assert_eq!(a.cmp_rational(&rat("9/4")).unwrap(), Ordering::Less);
        assert_eq!(a.cmp_rational(&rat("11/5")).unwrap(), Ordering::Greater);
    }

    #[test]
    fn cross_base_comparison() {
        // 2^(3/2) vs 3^(1/1): 2^3 = 8 vs 3^2 = 9 -> less
        let a = PowerRadius::new(rat("1"), BigUint::from(2u32), rat("3/2")).unwrap();
        let b = PowerRadius::new(rat("1"), BigUint::from(3u32), rat("1")).unwrap();
        assert_eq!(a.cmp_exact(&b).unwrap(), Ordering::Less);
    }

    #[test]
    fn dyadic_bracketing() {
        let p = PowerRadius::new(rat("1"), BigUint::from(10u32), rat("-3/2")).unwrap();
        // 10^-1.5 ~ 0.0316: bracket [2^-5, 2^-4]
        assert_eq!(p.dyadic_floor().unwrap(), -5);
        assert_eq!(p.upper_bound_rational().unwrap(), rat("1/16"));
    }

    #[test]
    fn product_with_mixed_bases() {
        // (1/2) * 4^(-1/2) * 6^1 vs 3/2 : (1/2)*(1/2)*6 = 3/2 -> equal
        let mut p = PowerProduct::one();
        p.mul_rational(&rat("1/2"));
        p.mul_power(&BigUint::from(4u32), &rat("-1/2"));
        p.mul_power(&BigUint::from(6u32), &rat("1"));
        let mut q = PowerProduct::one();
        q.mul_rational(&rat("3/2"));
        assert_eq!(p.cmp_exact(&q).unwrap(), Ordering::Equal);
    }

    #[test]
    fn nth_root_floor() {
        assert_eq!(floor_nth_root(&rat("27"), 3), BigUint::from(3u32));
        assert_eq!(floor_nth_root(&rat("26"), 3), BigUint::from(2u32));
        assert_eq!(floor_nth_root(&rat("1/2"), 2), BigUint::zero());
        assert_eq!(floor_nth_root(&rat("50/2"), 2), BigUint::from(5u32));
    }

    #[test]
    fn parse_power_forms() {
        let p = parse_power("2*7^(-3/2)").unwrap();
        assert_eq!(p.base, BigUint::from(7u32));
        assert_eq!(p.exp, rat("-3/2"));
        let q = parse_power("5/8").unwrap();
        assert_eq!(q.exact_value().unwrap(), rat("5/8"));
    }
}
