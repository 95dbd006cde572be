//! Construction parameters and the pruning schedule.

use crate::cube::Grid;
use crate::error::{Error, Result};
use crate::power::PowerRadius;
use crate::rational::pow_rational;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Parameters of the Cantor-type construction.
///
/// The ambient dimension is `d`; the approximation exponent is the rational
/// `tau = tau_num/tau_den` with `tau * d > 1`. The coarse grid parameter is
/// `n_base = m^d` with integer `m >= 2`, so every refinement step subdivides
/// each axis by `m^(d+1)`. `t` controls grid density (`t^d > d!` so the
/// one-rational-per-cube volume bound applies), and `u >= 4` is the schedule
/// offset. `max_stage` bounds how deep pruning stages may be resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub d: usize,
    pub tau_num: u32,
    pub tau_den: u32,
    pub m: u32,
    pub t: u32,
    pub u: u32,
    pub max_stage: u32,
}

/// Exact schedule data for one stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleValue {
    pub stage: u32,
    /// Pruning level `l(stage)` of the fine grid.
    pub prune_level: u32,
    /// Thickening / dangerous-ball radius `delta(stage)`.
    pub delta: PowerRadius,
    /// Lower edge `n_base^(stage-1)` of the stage's denominator band.
    pub band_lo: BigUint,
    /// Upper edge `n_base^stage` (exclusive).
    pub band_hi: BigUint,
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 8 {
            return Err(Error::InvalidParams(format!("d = {} unsupported", self.d)));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams("m must be at least 2".into()));
        }
        if self.tau_den == 0 {
            return Err(Error::InvalidParams("tau denominator must be nonzero".into()));
        }
        // tau > 1/d  <=>  tau_num * d > tau_den
        if (self.tau_num as u64) * (self.d as u64) <= self.tau_den as u64 {
            return Err(Error::InvalidParams(format!(
                "tau = {}/{} must exceed 1/d = 1/{}",
                self.tau_num, self.tau_den, self.d
            )));
        }
        // t^d > d!
        let fact: u64 = (1..=self.d as u64).product();
        let td = (self.t as u64).checked_pow(self.d as u32).unwrap_or(u64::MAX);
        if td <= fact {
            return Err(Error::InvalidParams(format!(
                "t^d = {td} must exceed d! = {fact}"
            )));
        }
        if self.u < 4 {
            return Err(Error::InvalidParams("u must be at least 4".into()));
        }
        if self.max_stage == 0 {
            return Err(Error::InvalidParams("max_stage must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid { d: self.d, t: self.t, m: self.m }
    }

    pub fn tau(&self) -> BigRational {
        BigRational::new(BigInt::from(self.tau_num), BigInt::from(self.tau_den))
    }

    /// `1 + tau` as a rational.
    pub fn one_plus_tau(&self) -> BigRational {
        self.tau() + BigRational::one()
    }

    /// Coarse base `n_base = m^d`.
    pub fn n_base(&self) -> BigUint {
        BigUint::from(self.m).pow(self.d as u32)
    }

    /// Dimension target `s = (d+1)/(1+tau)`.
    pub fn dim_target(&self) -> BigRational {
        BigRational::from(BigInt::from(self.d as u32 + 1)) / self.one_plus_tau()
    }

    /// Pruning level `l(n) = floor((n-1+u)(1+tau) d / (d+1))`; also defined
    /// for stage 0, whose level carries the unpruned base family.
    pub fn prune_level(&self, stage: u32) -> u32 {
        let v = BigRational::from(BigInt::from(stage + self.u - 1))
            * self.one_plus_tau()
            * BigRational::new(BigInt::from(self.d as u32), BigInt::from(self.d as u32 + 1));
        let f = v.floor().to_integer();
        u32::try_from(&f).expect("prune level fits u32")
    }

    /// Thickening radius `delta(n) = t^{-1} n_base^{-(n-1+u)(1+tau)}`.
    pub fn delta(&self, stage: u32) -> PowerRadius {
        let coeff = BigRational::new(BigInt::one(), BigInt::from(self.t));
        let exp = -BigRational::from(BigInt::from(stage + self.u - 1)) * self.one_plus_tau();
        PowerRadius::new(coeff, self.n_base(), exp).expect("valid delta")
    }

    /// Dangerous-ball coefficient `c = delta(1) = t^{-1} n_base^{-u(1+tau)}`.
    pub fn dangerous_coeff(&self) -> PowerRadius {
        self.delta(1)
    }

    /// Radius of the dangerous ball of a rational with denominator `q`:
    /// `c * q^{-(1+tau)} = t^{-1} (n_base^u * q)^{-(1+tau)}`.
    pub fn dangerous_radius(&self, q: &BigUint) -> PowerRadius {
        let coeff = BigRational::new(BigInt::one(), BigInt::from(self.t));
        let base = self.n_base().pow(self.u) * q;
        PowerRadius::new(coeff, base, -self.one_plus_tau()).expect("valid radius")
    }

    /// Fat-ball radius `2 q^{-(d+1)/d}` of an approximating rational.
    pub fn fat_radius(&self, q: &BigUint) -> PowerRadius {
        let exp = -BigRational::new(BigInt::from(self.d as u32 + 1), BigInt::from(self.d as u32));
        PowerRadius::new(BigRational::from(BigInt::from(2)), q.clone(), exp).expect("valid radius")
    }

    /// Volume of the fat ball, exactly rational: `4^d q^{-(d+1)}`.
    pub fn fat_volume(&self, q: &BigUint) -> BigRational {
        let four_d = BigInt::from(4u32).pow(self.d as u32);
        let qd = BigInt::from(q.pow(self.d as u32 + 1));
        BigRational::new(four_d, qd)
    }

    /// Shrunk-ball radius `q^{-(1+tau)}`.
    pub fn shrunk_radius(&self, q: &BigUint) -> PowerRadius {
        PowerRadius::new(BigRational::one(), q.clone(), -self.one_plus_tau()).expect("valid radius")
    }

    /// The stage whose denominator band `[n_base^{n-1}, n_base^n)` contains `q`.
    pub fn stage_of_denominator(&self, q: &BigUint) -> u32 {
        let nb = self.n_base();
        let mut edge = nb.clone();
        let mut stage = 1u32;
        while q >= &edge {
            edge *= &nb;
            stage += 1;
        }
        stage
    }

    /// Schedule entry for one stage (1-based).
    pub fn schedule_value(&self, stage: u32) -> Result<ScheduleValue> {
        if stage == 0 || stage > self.max_stage {
            return Err(Error::StageOutOfRange { stage, max: self.max_stage });
        }
        let nb = self.n_base();
        Ok(ScheduleValue {
            stage,
            prune_level: self.prune_level(stage),
            delta: self.delta(stage),
            band_lo: nb.pow(stage - 1),
            band_hi: nb.pow(stage),
        })
    }

    /// Partial sum, through `stages`, of the removed-measure majorant
    /// `3 t^{-d} sum_n n_base^{(d+1)(n - l(n))/d}`; exactly rational because
    /// `n_base^{(d+1)/d} = m^{d+1}`.
    pub fn removed_measure_majorant(&self, stages: u32) -> BigRational {
        let m_pow = BigUint::from(self.m).pow(self.d as u32 + 1);
        let mut sum = BigRational::from(BigInt::from(0));
        for n in 1..=stages {
            let l = self.prune_level(n);
            // exponent n - l(n) is negative for all valid parameters
            debug_assert!(l >= n);
            let term = BigRational::new(BigInt::one(), BigInt::from(m_pow.pow(l - n)));
            sum += term;
        }
        let three_td = BigRational::new(BigInt::from(3), BigInt::from(BigUint::from(self.t).pow(self.d as u32)));
        three_td * sum
    }

    /// Per-cube retention lower bound for a surviving cube of stage `m_stage`
    /// examined after pruning through stage `n_stage`:
    /// `1 - 3 (sum_{k=m+1}^{l(m)} n_base^{(l(m)-l(k))(d+1)/d}
    ///        + sum_{k=l(m)+1}^{n} n_base^{(k-l(k))(d+1)/d})`.
    pub fn retention_bound(&self, m_stage: u32, n_stage: u32) -> BigRational {
        let m_pow = BigRational::from(BigInt::from(BigUint::from(self.m).pow(self.d as u32 + 1)));
        let lm = self.prune_level(m_stage);
        let mut sum = BigRational::from(BigInt::from(0));
        for k in m_stage + 1..=lm {
            let lk = self.prune_level(k);
            // exponent l(m) - l(k), usually negative
            sum += signed_pow(&m_pow, lm as i64 - lk as i64);
        }
        for k in lm + 1..=n_stage {
            let lk = self.prune_level(k);
            sum += signed_pow(&m_pow, k as i64 - lk as i64);
        }
        BigRational::one() - BigRational::from(BigInt::from(3)) * sum
    }

    /// Nesting constant `C = 2^d t^d n_base^{(u-1)(1+tau) d}` bounding the
    /// volume ratio between a shrunk ball and its nested surviving cube.
    /// Exactly rational whenever `tau_den | (u-1) d (tau_num + tau_den)`;
    /// returned as a power value for exact comparisons in general.
    pub fn nesting_constant(&self) -> PowerRadius {
        let coeff = BigRational::from(BigInt::from(2u32).pow(self.d as u32) * BigInt::from(self.t).pow(self.d as u32));
        let exp = BigRational::from(BigInt::from((self.u - 1) * self.d as u32)) * self.one_plus_tau();
        PowerRadius::new(coeff, self.n_base(), exp).expect("valid constant")
    }
}

/// `base^e` for rational base and signed integer exponent.
fn signed_pow(base: &BigRational, e: i64) -> BigRational {
    let p = pow_rational(base, e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::ConstructionParams;

    /// d=1, tau=2, m=2 (n_base=2), t=2, u=4: the workhorse fixture.
    pub fn fixture_d1() -> ConstructionParams {
        ConstructionParams { d: 1, tau_num: 2, tau_den: 1, m: 2, t: 2, u: 4, max_stage: 48 }
    }

    /// d=2, tau=1, m=2 (n_base=4), t=2, u=4.
    pub fn fixture_d2() -> ConstructionParams {
        ConstructionParams { d: 2, tau_num: 1, tau_den: 1, m: 2, t: 2, u: 4, max_stage: 6 }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{fixture_d1, fixture_d2};
    use super::*;
    use crate::rational::parse_rational;

    #[test]
    fn validation_catches_bad_params() {
        let mut p = fixture_d1();
        p.validate().unwrap();
        p.u = 3;
        assert!(p.validate().is_err());
        let mut p = fixture_d1();
        p.tau_num = 1;
        p.tau_den = 2; // tau = 1/2 <= 1/d = 1
        assert!(p.validate().is_err());
        let mut p = fixture_d2();
        p.t = 1; // t^2 = 1 <= 2! = 2
        assert!(p.validate().is_err());
    }

    #[test]
    fn schedule_d1() {
        // l(n) = floor(3(n+3)/2): 6, 7, 9, 10, 12
        let p = fixture_d1();
        let ls: Vec<u32> = (1..=5).map(|n| p.prune_level(n)).collect();
        assert_eq!(ls, vec![6, 7, 9, 10, 12]);
        // delta(1) = 2^-13 = c
        let d1 = p.delta(1).exact_value().unwrap();
        assert_eq!(d1, parse_rational("1/8192").unwrap());
        let sv = p.schedule_value(2).unwrap();
        assert_eq!(sv.band_lo, BigUint::from(2u32));
        assert_eq!(sv.band_hi, BigUint::from(4u32));
    }

    #[test]
    fn schedule_d2() {
        // d=2, tau=1: l(n) = floor((n+3)*4/3): 5, 6, 8, 9, 10
        let p = fixture_d2();
        let ls: Vec<u32> = (1..=5).map(|n| p.prune_level(n)).collect();
        assert_eq!(ls, vec![5, 6, 8, 9, 10]);
        // c = t^-1 N^{-u(1+tau)} = 1/2 * 4^-8 = 2^-17
        let c = p.dangerous_coeff().exact_value().unwrap();
        assert_eq!(c, parse_rational("1/131072").unwrap());
    }

    #[test]
    fn dangerous_radius_single_base_form() {
        let p = fixture_d1();
        // q = 3: radius = 1/2 * (16*3)^-3 = 1/(2 * 48^3) = 1/221184
        let r = p.dangerous_radius(&BigUint::from(3u32));
        assert_eq!(r.exact_value().unwrap(), parse_rational("1/221184").unwrap());
    }

    #[test]
    fn majorant_d1_closed_form() {
        // full series: 3/2 * (2^-10 + 2^-10 + 2^-12 + ...) -> 2^-8;
        // through 6 stages the partial sum is already within 2^-11 of it
        let p = fixture_d1();
        let partial = p.removed_measure_majorant(12);
        let full = parse_rational("1/256").unwrap();
        assert!(partial < full);
        assert!(partial > parse_rational("3/1024").unwrap());
    }

    #[test]
    fn retention_bound_m1_n2() {
        // 1 - 3*(2^-2 + 2^-6 + 2^-8 + 2^-12 + 2^-14) with second sum empty
        let p = fixture_d1();
        let b = p.retention_bound(1, 2);
        let expect = BigRational::one()
            - BigRational::from(BigInt::from(3))
                * (parse_rational("1/4").unwrap()
                    + parse_rational("1/64").unwrap()
                    + parse_rational("1/256").unwrap()
                    + parse_rational("1/4096").unwrap()
                    + parse_rational("1/16384").unwrap());
        assert_eq!(b, expect);
    }

    #[test]
    fn stage_of_denominator_bands() {
        let p = fixture_d1();
        assert_eq!(p.stage_of_denominator(&BigUint::from(1u32)), 1);
        assert_eq!(p.stage_of_denominator(&BigUint::from(2u32)), 2);
        assert_eq!(p.stage_of_denominator(&BigUint::from(3u32)), 2);
        assert_eq!(p.stage_of_denominator(&BigUint::from(4u32)), 3);
        assert_eq!(p.stage_of_denominator(&BigUint::from(7u32)), 3);
    }
}
