//! Enumeration of canonical rational points inside boxes of `[0,1]^d`.
//!
//! A point is canonical when written as `(p_1/q, ..., p_d/q)` with
//! `gcd(p_1, ..., p_d, q) = 1`; its denominator is then unique. Two routes
//! are provided: a generic denominator sweep, and for `d = 1` an
//! output-sensitive Farey walk (Stern-Brocot descent to seed, mediant
//! successor recurrence to advance) that handles very large denominator
//! bounds in tiny intervals.

use crate::cube::{Grid, GridCube};
use crate::error::{Error, Result};
use crate::rational::RationalPoint;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Maximum denominator sweep length for the generic route.
const BRUTE_Q_LIMIT: u64 = 4_000_000;

/// A rational axis-aligned box with per-axis endpoint inclusivity.
#[derive(Debug, Clone)]
pub struct RatBox {
    pub lo: Vec<BigRational>,
    pub hi: Vec<BigRational>,
    pub lo_closed: Vec<bool>,
    pub hi_closed: Vec<bool>,
}

impl RatBox {
    /// Fully closed box.
    pub fn closed(lo: Vec<BigRational>, hi: Vec<BigRational>) -> Self {
        let d = lo.len();
        Self { lo, hi, lo_closed: vec![true; d], hi_closed: vec![true; d] }
    }

    /// The half-open box of a grid cube (`[lo, hi)`, closed where the top
    /// face lies on the boundary of `[0,1]^d`).
    pub fn of_cube(grid: &Grid, cube: &GridCube) -> Self {
        let (lo, hi) = grid.bounds(cube);
        let one = BigRational::one();
        let hi_closed = hi.iter().map(|h| *h == one).collect();
        let d = lo.len();
        Self { lo, hi, lo_closed: vec![true; d], hi_closed }
    }

    /// Grow by `r` on every side (keeps inclusivity; clamping to `[0,1]` is
    /// applied during enumeration).
    pub fn expanded(&self, r: &BigRational) -> Self {
        Self {
            lo: self.lo.iter().map(|x| x - r).collect(),
            hi: self.hi.iter().map(|x| x + r).collect(),
            lo_closed: self.lo_closed.clone(),
            hi_closed: self.hi_closed.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains_value(&self, axis: usize, v: &BigRational) -> bool {
        (v > &self.lo[axis] || (self.lo_closed[axis] && v == &self.lo[axis]))
            && (v < &self.hi[axis] || (self.hi_closed[axis] && v == &self.hi[axis]))
    }
}

/// All canonical rational points in `bx` (intersected with `[0,1]^d`) whose
/// canonical denominator lies in `[q_lo, q_hi)`, ordered by denominator and
/// then lexicographically by numerators.
pub fn enumerate_rationals(bx: &RatBox, q_lo: &BigUint, q_hi: &BigUint) -> Result<Vec<RationalPoint>> {
    if q_lo >= q_hi || q_hi.is_one() {
        return Ok(Vec::new());
    }
    if bx.dim() == 1 {
        return farey_in_box(bx, q_lo, q_hi);
    }
    let span = q_hi - q_lo;
    if span.bits() > 64 || span.to_u64_digits().first().copied().unwrap_or(0) > BRUTE_Q_LIMIT {
        return Err(Error::EnumerationBudget { count: span.to_string(), budget: BRUTE_Q_LIMIT });
    }
    let mut out = Vec::new();
    let mut q = if q_lo.is_zero() { BigUint::one() } else { q_lo.clone() };
    while &q < q_hi {
        let qi = BigInt::from(q.clone());
        // per-axis numerator ranges clamped to [0, q]
        let mut ranges: Vec<(BigInt, BigInt)> = Vec::with_capacity(bx.dim());
        let mut empty = false;
        for a in 0..bx.dim() {
            let lo_scaled = &bx.lo[a] * BigRational::from(qi.clone());
            let hi_scaled = &bx.hi[a] * BigRational::from(qi.clone());
            let mut pmin = lo_scaled.ceil().to_integer();
            if lo_scaled.is_integer() && !bx.lo_closed[a] {
                pmin += 1;
            }
            let mut pmax = hi_scaled.floor().to_integer();
            if hi_scaled.is_integer() && !bx.hi_closed[a] {
                pmax -= 1;
            }
            if pmin.is_negative() {
                pmin = BigInt::zero();
            }
            if pmax > qi {
                pmax = qi.clone();
            }
            if pmin > pmax {
                empty = true;
                break;
            }
            ranges.push((pmin, pmax));
        }
        if !empty {
            let mut nums: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
            'tuples: loop {
                // canonical iff gcd of all numerators with q equals 1
                let mut g = q.clone();
                for n in &nums {
                    g = g.gcd(&n.magnitude());
                    if g.is_one() {
                        break;
                    }
                }
                if g.is_one() {
                    out.push(RationalPoint { numerators: nums.clone(), denominator: q.clone() });
                }
                // lexicographic odometer (last axis fastest)
                let mut a = bx.dim();
                loop {
                    if a == 0 {
                        break 'tuples;
                    }
                    a -= 1;
                    if nums[a] < ranges[a].1 {
                        nums[a] += 1;
                        for b in a + 1..bx.dim() {
                            nums[b] = ranges[b].0.clone();
                        }
                        break;
                    }
                    nums[a] = ranges[a].0.clone();
                }
            }
        }
        q += BigUint::one();
    }
    Ok(out)
}

/// d = 1 route: walk the Farey sequence of order `q_hi - 1` across the
/// interval and filter by the denominator band.
fn farey_in_box(bx: &RatBox, q_lo: &BigUint, q_hi: &BigUint) -> Result<Vec<RationalPoint>> {
    let order = BigInt::from(q_hi - BigUint::one());
    let zero = BigRational::zero();
    let one = BigRational::one();
    let lo = if bx.lo[0] < zero { zero.clone() } else { bx.lo[0].clone() };
    let hi = if bx.hi[0] > one { one.clone() } else { bx.hi[0].clone() };
    if lo > hi {
        return Ok(Vec::new());
    }
    // Stern-Brocot descent for the consecutive Farey pair a/b <= lo < c/d
    // (or a/b = lo). Start from (0/1, 1/1) which brackets [0,1]. Each
    // direction change takes the whole continued-fraction quotient in one
    // bulk step, so the descent is logarithmic in the order even when `lo`
    // sits exponentially close to a low-denominator rational.
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let (mut c, mut d) = (BigInt::one(), BigInt::one());
    let (ln, ld) = (lo.numer().clone(), lo.denom().clone());
    loop {
        if &b + &d > order {
            break;
        }
        let med_le_lo = (&a + &c) * &ld <= &ln * (&b + &d);
        if med_le_lo {
            // advance a/b -> (a + k c)/(b + k d), staying <= lo and <= order
            let aa = &c * &ld - &d * &ln; // >= 0 since c/d >= lo
            let bb = &ln * &b - &ld * &a; // >= 0 since a/b <= lo
            let k_ord = (&order - &b).div_floor(&d);
            let k = if aa.is_zero() { k_ord } else { bb.div_floor(&aa).min(k_ord) };
            a += &k * &c;
            b += &k * &d;
            if k.is_zero() {
                break;
            }
        } else {
            // advance c/d -> (k a + c)/(k b + d), staying > lo and <= order
            let aa = &c * &ld - &d * &ln;
            let bb = &ln * &b - &ld * &a;
            let k_ord = (&order - &d).div_floor(&b);
            let k = if bb.is_zero() {
                k_ord
            } else {
                ((&aa - BigInt::one()).div_floor(&bb)).min(k_ord)
            };
            c += &k * &a;
            d += &k * &b;
            if k.is_zero() {
                break;
            }
        }
    }
    // Walk successors: next after consecutive (a/b, c/d) in F_order is
    // (k*c - a)/(k*d - b) with k = floor((order + b) / d).
    let mut out = Vec::new();
    let mut emit = |p: &BigInt, q: &BigInt| {
        let qm = q.magnitude();
        if qm >= q_lo && qm < q_hi {
            let v = BigRational::new(p.clone(), q.clone());
            if bx.contains_value(0, &v) && v >= zero && v <= one {
                out.push(RationalPoint { numerators: vec![p.clone()], denominator: qm.clone() });
            }
        }
    };
    if BigRational::new(a.clone(), b.clone()) >= lo {
        emit(&a, &b);
    }
    loop {
        let v = BigRational::new(c.clone(), d.clone());
        if v > hi {
            break;
        }
        emit(&c, &d);
        if v >= one {
            break;
        }
        let k = (&order + &b).div_floor(&d);
        let (nc, nd) = (&k * &c - &a, &k * &d - &b);
        a = c;
        b = d;
        c = nc;
        d = nd;
    }
    out.sort_by(|x, y| {
        (&x.denominator, &x.numerators[0]).cmp(&(&y.denominator, &y.numerators[0]))
    });
    Ok(out)
}
