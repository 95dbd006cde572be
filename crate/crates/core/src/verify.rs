//! Independent verification oracles and empirical analysis: truncated
//! membership checks, best rational approximations, property testing of the
//! one-flat-per-small-box bound, witness searches for the approximation
//! lemma, and a box-counting dimension diagnostic.
//!
//! Everything except the box-count slope is exact rational arithmetic; the
//! slope is an explicitly diagnostic floating-point fit.

use crate::enumerate::{enumerate_rationals, RatBox};
use crate::error::{Error, Result};
use crate::flat::affine_hull;
use crate::params::ConstructionParams;
use crate::power::PowerRadius;
use crate::pruning::PruningState;
use crate::rational::{format_rational, sup_dist, RationalPoint};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Truncated membership verdict: what the scan up to `q_cap` supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// >= 3 approximation witnesses and no lower-band violation.
    ConfirmedPattern,
    /// Some large `q` approximates strictly better than the lower band.
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub point: String,
    /// Rational witnesses of `sup_dist < q^{-(1+tau)}` with their distances.
    pub witnesses: Vec<(RationalPoint, String)>,
    pub q_cap: String,
    /// Denominators below this cutoff are exempt from the lower band (the
    /// band constraint only concerns sufficiently large q).
    pub cutoff: String,
    pub verdict: Verdict,
    /// The violating denominator when refuted.
    pub violation: Option<String>,
}

/// For each `q <= q_cap`, the exactly minimal sup-norm distance from `x` to
/// a rational point with denominator `q` (per-coordinate nearest integers).
pub fn best_approx(x: &[BigRational], q_cap: &BigUint) -> Vec<(BigUint, BigRational)> {
    let mut out = Vec::new();
    let mut q = BigUint::one();
    while &q <= q_cap {
        let qr = BigRational::from(BigInt::from(q.clone()));
        let mut dist = BigRational::zero();
        for xi in x {
            let scaled = xi * &qr;
            let nearest = (&scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
            let di = (scaled - nearest).abs() / &qr;
            if di > dist {
                dist = di;
            }
        }
        out.push((q.clone(), dist));
        q += BigUint::one();
    }
    out
}

/// The rational point with denominator `q` nearest to `x` (per-coordinate
/// nearest integer numerators; not reduced to canonical form on purpose --
/// the approximation statements quantify over all pairs (p, q)).
fn nearest_point(x: &[BigRational], q: &BigUint) -> Vec<BigInt> {
    let qr = BigRational::from(BigInt::from(q.clone()));
    x.iter()
        .map(|xi| (xi * &qr + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer())
        .collect()
}

/// Scan denominators up to `q_cap`: collect witnesses of
/// `sup_dist(x, p/q) < q^{-(1+tau)}` and flag any `q > cutoff` with
/// `sup_dist < c_low * q^{-(1+tau)}`. Truncated semantics only.
pub fn check_membership_band(
    params: &ConstructionParams,
    x: &[BigRational],
    c_low: &PowerRadius,
    q_cap: &BigUint,
    cutoff: &BigUint,
) -> Result<MembershipVerdict> {
    // integer exponent and exactly rational band coefficient: pure-integer
    // comparisons, roughly an order of magnitude faster per denominator
    let ope = params.one_plus_tau();
    if ope.is_integer() {
        if let (Some(e), Some(cn)) = (ope.to_integer().to_u32(), c_low.exact_value()) {
            return membership_band_integer(x, &cn, e, q_cap, cutoff);
        }
    }
    membership_band_generic(params, x, c_low, q_cap, cutoff)
}

/// All comparisons cleared of denominators: with `x_i = a_i/b_i`, the
/// nearest numerator for q is `p_i = round(a_i q / b_i)` with residual
/// `m_i = min(r, b_i - r)`, and `m_i/(b_i q) < c q^{-e}` iff
/// `m_i c_den q^{e-1} < b_i c_num`.
fn membership_band_integer(
    x: &[BigRational],
    c_low: &BigRational,
    e: u32,
    q_cap: &BigUint,
    cutoff: &BigUint,
) -> Result<MembershipVerdict> {
    use num_integer::Integer;
    let coords: Vec<(BigInt, BigInt)> =
        x.iter().map(|xi| (xi.numer().clone(), xi.denom().clone())).collect();
    let (c_num, c_den) = (c_low.numer().clone(), c_low.denom().clone());
    let mut witnesses = Vec::new();
    let mut violation = None;
    let mut q = BigUint::one();
    while &q <= q_cap {
        let qi = BigInt::from(q.clone());
        let q_pow = if e > 1 { qi.pow(e - 1) } else { BigInt::one() };
        let mut nums = Vec::with_capacity(coords.len());
        let mut residuals = Vec::with_capacity(coords.len());
        let mut is_witness = true;
        let mut is_violation = true;
        for (a, b) in &coords {
            let aq = a * &qi;
            let mut r = aq.mod_floor(b);
            let mut p = (&aq - &r) / b;
            if &r * 2 >= *b {
                p += 1;
                r = b - &r;
            }
            let scaled = &r * &q_pow;
            if &scaled >= b {
                is_witness = false;
                break;
            }
            if &scaled * &c_den >= b * &c_num {
                is_violation = false;
            }
            nums.push(p);
            residuals.push(r);
        }
        if is_witness {
            let point = RationalPoint::new(nums, q.clone())?;
            let dist = coords
                .iter()
                .zip(&residuals)
                .map(|((_, b), r)| BigRational::new(r.clone(), b * &qi))
                .max()
                .unwrap_or_else(BigRational::zero);
            witnesses.push((point, format_rational(&dist)));
            if is_violation && &q > cutoff && violation.is_none() {
                violation = Some(q.to_string());
            }
        }
        q += BigUint::one();
    }
    let verdict = if violation.is_some() {
        Verdict::Refuted
    } else if witnesses.len() >= 3 {
        Verdict::ConfirmedPattern
    } else {
        Verdict::Inconclusive
    };
    Ok(MembershipVerdict {
        point: x.iter().map(format_rational).collect::<Vec<_>>().join(","),
        witnesses,
        q_cap: q_cap.to_string(),
        cutoff: cutoff.to_string(),
        verdict,
        violation,
    })
}

fn membership_band_generic(
    params: &ConstructionParams,
    x: &[BigRational],
    c_low: &PowerRadius,
    q_cap: &BigUint,
    cutoff: &BigUint,
) -> Result<MembershipVerdict> {
    let mut witnesses = Vec::new();
    let mut violation = None;
    let mut q = BigUint::one();
    while &q <= q_cap {
        let nums = nearest_point(x, &q);
        let point = RationalPoint::new(nums.clone(), q.clone())?;
        let qr = BigRational::from(BigInt::from(q.clone()));
        let dist = {
            let coords: Vec<BigRational> =
                nums.iter().map(|n| BigRational::new(n.clone(), qr.numer().clone())).collect();
            sup_dist(x, &coords)?
        };
        // upper threshold q^{-(1+tau)}
        let upper = params.shrunk_radius(&q);
        if upper.cmp_rational(&dist)? == Ordering::Greater {
            witnesses.push((point, format_rational(&dist)));
            // lower band c_low * q^{-(1+tau)} binds beyond the cutoff
            if &q > cutoff {
                let bound = band_lower(params, c_low, &q)?;
                let hit = if dist.is_zero() {
                    true
                } else {
                    bound.cmp_exact(&rational_product(&dist))? == Ordering::Greater
                };
                if hit && violation.is_none() {
                    violation = Some(q.to_string());
                }
            }
        }
        q += BigUint::one();
    }
    let verdict = if violation.is_some() {
        Verdict::Refuted
    } else if witnesses.len() >= 3 {
        Verdict::ConfirmedPattern
    } else {
        Verdict::Inconclusive
    };
    Ok(MembershipVerdict {
        point: x.iter().map(format_rational).collect::<Vec<_>>().join(","),
        witnesses,
        q_cap: q_cap.to_string(),
        cutoff: cutoff.to_string(),
        verdict,
        violation,
    })
}

fn band_lower(
    params: &ConstructionParams,
    c_low: &PowerRadius,
    q: &BigUint,
) -> Result<crate::power::PowerProduct> {
    let mut p = crate::power::PowerProduct::one();
    p.mul_rational(&c_low.coeff);
    p.mul_power(&c_low.base, &c_low.exp);
    p.mul_power(q, &-params.one_plus_tau());
    Ok(p)
}

fn rational_product(r: &BigRational) -> crate::power::PowerProduct {
    let mut p = crate::power::PowerProduct::one();
    p.mul_rational(r);
    p
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexSuiteReport {
    pub d: usize,
    pub q_max: u32,
    pub trials: usize,
    pub violations: usize,
    /// Box corner of the first violating trial, if any.
    pub first_violation: Option<String>,
}

/// Largest box side `1/n` whose volume respects the one-flat bound
/// `(d!)^{-1} Q^{-(d+1)}`.
pub fn compliant_side(d: usize, q_max: u32) -> BigRational {
    let fact: u64 = (1..=d as u64).product();
    let denom = BigRational::from(BigInt::from(fact) * BigInt::from(q_max).pow(d as u32 + 1));
    // smallest n with (1/n)^d <= 1/(d! Q^{d+1})
    let root = crate::power::floor_nth_root(&denom, d as u32);
    let mut n = root.clone();
    // ensure n^d >= d! Q^{d+1}
    while BigRational::from(BigInt::from(n.clone())).pow(d as i32) < denom {
        n += BigUint::one();
    }
    BigRational::new(BigInt::one(), BigInt::from(n))
}

/// Property test: random boxes of the given side must never contain rationals
/// of denominator <= q_max spanning the full ambient dimension.
pub fn simplex_property_suite(
    d: usize,
    q_max: u32,
    trials: usize,
    seed: u64,
    side: &BigRational,
) -> Result<SimplexSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut first_violation = None;
    let one = BigRational::one();
    let span = &one - side;
    let q_hi = BigUint::from(q_max) + BigUint::one();
    for _ in 0..trials {
        let lo: Vec<BigRational> = (0..d)
            .map(|_| {
                let u = BigRational::new(BigInt::from(rng.gen::<u32>()), BigInt::from(1u64 << 32));
                &span * u
            })
            .collect();
        let hi: Vec<BigRational> = lo.iter().map(|l| l + side).collect();
        let bx = RatBox::closed(lo.clone(), hi);
        let pts = enumerate_rationals(&bx, &BigUint::one(), &q_hi)?;
        if pts.is_empty() {
            continue;
        }
        let flat = affine_hull(&pts)?;
        if flat.dim() >= d {
            violations += 1;
            if first_violation.is_none() {
                first_violation =
                    Some(lo.iter().map(format_rational).collect::<Vec<_>>().join(","));
            }
        }
    }
    Ok(SimplexSuiteReport { d, q_max, trials, violations, first_violation })
}

#[derive(Debug, Clone, Serialize)]
pub struct QApproxReport {
    pub stage: u32,
    pub samples: usize,
    pub passes: usize,
    /// For each sample: cube center and the witness (p/q, distance), if any.
    pub details: Vec<(String, Option<(RationalPoint, String)>)>,
}

/// Sample surviving stage-`n` cubes and search, stage by stage, for a leading
/// rational approximating the cube center within `3 q^{-(1+1/d)}`.
pub fn check_q_approx(
    state: &PruningState,
    stage: u32,
    samples: usize,
    seed: u64,
) -> Result<QApproxReport> {
    let params = state.params();
    let grid = params.grid();
    let lvl = params.prune_level(stage);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::new();
    let mut passes = 0usize;
    let mut drawn = 0usize;
    let mut attempts = 0usize;
    while drawn < samples && attempts < samples * 64 {
        attempts += 1;
        let x: Vec<BigRational> = (0..params.d)
            .map(|_| BigRational::new(BigInt::from(rng.gen::<u32>()), BigInt::from(1u64 << 32)))
            .collect();
        let cube = grid.cube_containing(&x, lvl)?;
        if !state.survives(&cube, stage)? {
            continue;
        }
        drawn += 1;
        let (clo, chi) = grid.bounds(&cube);
        let center: Vec<BigRational> = clo
            .iter()
            .zip(&chi)
            .map(|(l, h)| (l + h) / BigRational::from(BigInt::from(2)))
            .collect();
        let mut witness = None;
        'stages: for k in 1..=stage {
            let sched = params.schedule_value(k)?;
            // radius bound for the whole band: 3 band_lo^{-(1+1/d)}
            let exp = -BigRational::new(
                BigInt::from(params.d as u32 + 1),
                BigInt::from(params.d as u32),
            );
            let rad = PowerRadius::new(
                BigRational::from(BigInt::from(3)),
                if sched.band_lo.is_one() { BigUint::from(2u32) } else { sched.band_lo.clone() },
                if sched.band_lo.is_one() { BigRational::zero() } else { exp.clone() },
            )?;
            let r = if sched.band_lo.is_one() {
                BigRational::from(BigInt::from(3))
            } else {
                rad.upper_bound_rational()?
            };
            let lo: Vec<BigRational> = center.iter().map(|c| c - &r).collect();
            let hi: Vec<BigRational> = center.iter().map(|c| c + &r).collect();
            let bx = RatBox::closed(lo, hi);
            for lead in state.leading_rationals_in_box(&bx, k)? {
                let dist = sup_dist(&center, &lead.point.coords())?;
                let bound = PowerRadius::new(
                    BigRational::from(BigInt::from(3)),
                    lead.point.denominator.clone(),
                    exp.clone(),
                )?;
                if bound.cmp_rational(&dist)? == Ordering::Greater {
                    witness = Some((lead.point.clone(), format_rational(&dist)));
                    break 'stages;
                }
            }
        }
        if witness.is_some() {
            passes += 1;
        }
        details.push((
            center.iter().map(format_rational).collect::<Vec<_>>().join(","),
            witness,
        ));
    }
    Ok(QApproxReport { stage, samples: drawn, passes, details })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxCountSeries {
    /// Scales as exact rationals, strictly decreasing.
    pub scales: Vec<String>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log N against log(1/scale); diagnostic only.
    pub slope: f64,
    pub degenerate: bool,
}

/// Count grid boxes of each scale meeting the point set; exact counting via
/// rational floors, with a floating-point slope fit on top.
pub fn box_count(points: &[Vec<BigRational>], scales: &[BigRational]) -> Result<BoxCountSeries> {
    if points.is_empty() || scales.len() < 2 {
        return Err(Error::InvalidParams(
            "box counting needs at least one point and two scales".into(),
        ));
    }
    for w in scales.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidParams("scales must be strictly decreasing".into()));
        }
    }
    let mut counts = Vec::with_capacity(scales.len());
    for s in scales {
        if !s.is_positive() {
            return Err(Error::InexactScale);
        }
        let mut boxes: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for p in points {
            let idx: Vec<BigInt> = p.iter().map(|x| (x / s).floor().to_integer()).collect();
            boxes.insert(idx);
        }
        counts.push(boxes.len() as u64);
    }
    let degenerate = counts.iter().all(|&c| c == counts[0]);
    let slope = if degenerate {
        0.0
    } else {
        let xs: Vec<f64> = scales.iter().map(|s| -(s.to_f64().unwrap()).ln()).collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    };
    Ok(BoxCountSeries {
        scales: scales.iter().map(format_rational).collect(),
        counts,
        slope,
        degenerate,
    })
}
