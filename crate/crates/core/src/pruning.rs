//! The lazy pruning oracle.
//!
//! Stage `n` removes, from the surviving cubes of level `l(n)`, every cube
//! lying within `delta(n)` of a *starred* removal flat. The removal flat of a
//! host cube (a cube of the coarse level-`n` grid) is the affine hull of all
//! canonical rationals with denominator below `n_base^n` inside it, clipped
//! to the host. A flat is starred when some rational of the stage's
//! denominator band lies on it and its open `delta(n)`-ball meets the union
//! surviving the previous stage.
//!
//! Removal is not confined to the flat's own host: a cube is removed whenever
//! any nearby starred flat comes within `delta(n)` of it. Because `delta(n)`
//! is far smaller than the host side, only the host containing the cube and
//! its immediate neighbors can ever matter, which keeps membership queries
//! local and lets the whole construction be resolved lazily, cube by cube.
//!
//! All geometry is exact: distances are rational-valued Chebyshev distances,
//! and comparisons against the power-form radii go through the exact
//! comparison kernel.

use crate::cube::{range_count, GridCube, RangeIter};
use crate::enumerate::{enumerate_rationals, RatBox};
use crate::error::{Error, Result};
use crate::flat::{affine_hull, AffineFlat};
use crate::lp::dist_box_to_clipped_flat;
use crate::params::{ConstructionParams, ScheduleValue};
use crate::power::PowerRadius;
use crate::rational::{sup_dist_box_box, sup_dist_point_box, RationalPoint};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Cap on cubes visited by a single exhaustive sweep or ball scan.
pub const SWEEP_BUDGET: u64 = 8_000_000;

type CubeKey = (u32, Vec<BigUint>);

/// Removal data of one host cube: the rationals below the stage's denominator
/// ceiling it contains and their affine hull (`None` when there are none).
#[derive(Debug, Clone)]
pub struct HostRecord {
    pub host: GridCube,
    pub stage: u32,
    pub points: Vec<RationalPoint>,
    pub flat: Option<AffineFlat>,
}

/// A band rational that actively removes cubes at its stage: it lies on its
/// host's removal flat and its open `delta`-ball meets the previous
/// surviving union.
#[derive(Debug, Clone, Serialize)]
pub struct LeadingRational {
    pub point: RationalPoint,
    pub stage: u32,
    pub host: GridCube,
}

/// Outcome of an exhaustive dangerous-ball avoidance check.
#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceReport {
    pub stage: u32,
    pub q_cap: String,
    pub rationals_checked: usize,
    /// Rationals whose open dangerous ball still meets the surviving union.
    pub violations: Vec<RationalPoint>,
}

/// Outcome of a per-cube retention check between two stages.
#[derive(Debug, Clone, Serialize)]
pub struct RetentionReport {
    pub from_stage: u32,
    pub to_stage: u32,
    pub cubes_checked: usize,
    /// Guaranteed lower bound on the retained volume fraction.
    #[serde(with = "crate::rational::serde_rational")]
    pub bound: BigRational,
    /// Smallest retained fraction observed over all checked cubes.
    #[serde(with = "crate::rational::serde_rational")]
    pub min_ratio: BigRational,
    /// Cubes whose retained fraction fell below the bound.
    pub failures: Vec<GridCube>,
}

/// Memoized lazy membership oracle for the pruned cube families.
pub struct PruningState {
    params: ConstructionParams,
    records: RwLock<HashMap<CubeKey, Arc<HostRecord>>>,
    starred: RwLock<HashMap<CubeKey, bool>>,
    survives_memo: RwLock<HashMap<CubeKey, bool>>,
}

impl PruningState {
    pub fn new(params: ConstructionParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            records: RwLock::new(HashMap::new()),
            starred: RwLock::new(HashMap::new()),
            survives_memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn schedule(&self, stage: u32) -> Result<ScheduleValue> {
        self.params.schedule_value(stage)
    }

    /// Number of `(survival, starredness, host-record)` memo entries resolved
    /// so far.
    pub fn memo_sizes(&self) -> (usize, usize, usize) {
        (
            self.survives_memo.read().unwrap().len(),
            self.starred.read().unwrap().len(),
            self.records.read().unwrap().len(),
        )
    }

    /// Deterministic snapshot of the survival memo, sorted by stage then
    /// cube index.
    pub fn export_memo(&self) -> Vec<(u32, Vec<String>, bool)> {
        let memo = self.survives_memo.read().unwrap();
        let mut keys: Vec<(u32, Vec<BigUint>, bool)> =
            memo.iter().map(|((s, idx), v)| (*s, idx.clone(), *v)).collect();
        keys.sort();
        keys.into_iter()
            .map(|(s, idx, v)| (s, idx.iter().map(|i| i.to_string()).collect(), v))
            .collect()
    }

    /// Preload the survival memo from an exported snapshot.
    pub fn import_memo(&self, entries: &[(u32, Vec<String>, bool)]) -> Result<()> {
        let mut memo = self.survives_memo.write().unwrap();
        for (stage, idx, v) in entries {
            let index: Vec<BigUint> = idx
                .iter()
                .map(|s| {
                    s.parse::<BigUint>()
                        .map_err(|_| Error::InvalidParams(format!("bad cube index {s:?}")))
                })
                .collect::<Result<_>>()?;
            memo.insert((*stage, index), *v);
        }
        Ok(())
    }

    /// Removal data for a host cube; `host.level` is the stage it serves.
    pub fn host_record(&self, host: &GridCube) -> Result<Arc<HostRecord>> {
        let stage = host.level;
        let key = (stage, host.index.clone());
        if let Some(r) = self.records.read().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let sched = self.schedule(stage)?;
        let grid = self.params.grid();
        let bx = RatBox::of_cube(&grid, host);
        let points = enumerate_rationals(&bx, &BigUint::one(), &sched.band_hi)?;
        let flat = if points.is_empty() {
            None
        } else {
            let f = affine_hull(&points)?;
            if f.dim() >= self.params.d {
                return Err(Error::SimplexViolation {
                    level: stage,
                    count: points.len(),
                    dim: f.dim(),
                    ambient: self.params.d,
                });
            }
            Some(f)
        };
        let rec = Arc::new(HostRecord { host: host.clone(), stage, points, flat });
        self.records.write().unwrap().insert(key, rec.clone());
        Ok(rec)
    }

    /// Whether a host's removal flat is starred at its stage.
    pub fn is_starred(&self, host: &GridCube) -> Result<bool> {
        let stage = host.level;
        let key = (stage, host.index.clone());
        if let Some(&v) = self.starred.read().unwrap().get(&key) {
            return Ok(v);
        }
        let rec = self.host_record(host)?;
        let v = match &rec.flat {
            None => false,
            // stage 1: every rational below the ceiling is in the band, and
            // the previous union is the whole unit cube
            Some(_) if stage == 1 => true,
            Some(flat) => {
                let sched = self.schedule(stage)?;
                let grid = self.params.grid();
                let (hlo, hhi) = grid.bounds(host);
                // band rationals on the flat, searched over the host closure
                let bx = RatBox::closed(hlo, hhi);
                let cands = enumerate_rationals(&bx, &sched.band_lo, &sched.band_hi)?;
                let mut starred = false;
                for c in cands {
                    if !flat.contains(&c.coords())? {
                        continue;
                    }
                    if self.ball_meets_surviving(&c.coords(), &sched.delta, stage - 1)? {
                        starred = true;
                        break;
                    }
                }
                starred
            }
        };
        self.starred.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// Whether the open sup-norm ball meets the union of cubes surviving the
    /// given stage.
    pub fn ball_meets_surviving(
        &self,
        center: &[BigRational],
        radius: &PowerRadius,
        stage: u32,
    ) -> Result<bool> {
        let grid = self.params.grid();
        let lvl = self.params.prune_level(stage);
        let r = radius.upper_bound_rational()?;
        let lo: Vec<BigRational> = center.iter().map(|x| x - &r).collect();
        let hi: Vec<BigRational> = center.iter().map(|x| x + &r).collect();
        let ranges = match grid.ranges_touching_box(&lo, &hi, lvl) {
            Some(r) => r,
            None => return Ok(false),
        };
        let count = range_count(&ranges);
        if count.bits() > 63 || count.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
            return Err(Error::EnumerationBudget { count: count.to_string(), budget: SWEEP_BUDGET });
        }
        for index in RangeIter::new(ranges) {
            let cube = GridCube { level: lvl, index };
            let (clo, chi) = grid.bounds(&cube);
            let dist = sup_dist_point_box(center, &clo, &chi);
            // open ball: strict inequality
            if radius.cmp_rational(&dist)? != Ordering::Greater {
                continue;
            }
            if self.survives(&cube, stage)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether stage `stage` removes this cube of level `l(stage)` outright,
    /// ignoring whether its ancestors survived earlier stages.
    pub fn removed_at_stage(&self, cube: &GridCube, stage: u32) -> Result<bool> {
        let grid = self.params.grid();
        let sched = self.schedule(stage)?;
        let host = grid.ancestor(cube, stage);
        let (clo, chi) = grid.bounds(cube);
        // delta is far below the host side, so only the host and its
        // immediate neighbors can carry a flat within reach
        let mut hosts = vec![host.clone()];
        for nb in grid.neighbors(&host) {
            let (nlo, nhi) = grid.bounds(&nb);
            let d = sup_dist_box_box(&clo, &chi, &nlo, &nhi);
            if sched.delta.cmp_rational(&d)? != Ordering::Less {
                hosts.push(nb);
            }
        }
        for h in hosts {
            let rec = self.host_record(&h)?;
            let flat = match &rec.flat {
                Some(f) => f,
                None => continue,
            };
            if !self.is_starred(&h)? {
                continue;
            }
            let (hlo, hhi) = grid.bounds(&h);
            let dist = dist_box_to_clipped_flat(&clo, &chi, flat, &hlo, &hhi)?;
            if sched.delta.cmp_rational(&dist)? != Ordering::Less {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether a cube of level `l(stage)` belongs to the stage's surviving
    /// family. Stage 0 is the unpruned base family.
    pub fn survives(&self, cube: &GridCube, stage: u32) -> Result<bool> {
        let expected = self.params.prune_level(stage);
        if cube.level != expected {
            return Err(Error::InvalidParams(format!(
                "stage {stage} expects cubes of level {expected}, got level {}",
                cube.level
            )));
        }
        if stage == 0 {
            return Ok(true);
        }
        let key = (stage, cube.index.clone());
        if let Some(&v) = self.survives_memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let parent = self.params.grid().ancestor(cube, self.params.prune_level(stage - 1));
        let v = if !self.survives(&parent, stage - 1)? {
            false
        } else {
            !self.removed_at_stage(cube, stage)?
        };
        self.survives_memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// All surviving cubes of level `l(stage)`, by recursive descent from the
    /// previous stage's survivors (deterministic lexicographic order).
    pub fn surviving_cubes(&self, stage: u32) -> Result<Vec<GridCube>> {
        let grid = self.params.grid();
        let lvl = self.params.prune_level(stage);
        if stage == 0 {
            let per = grid.per_axis(lvl);
            let total = grid.count(lvl);
            if total.bits() > 63 || total.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
                return Err(Error::EnumerationBudget { count: total.to_string(), budget: SWEEP_BUDGET });
            }
            let top = &per - BigUint::one();
            let ranges = vec![(BigUint::zero(), top); self.params.d];
            return Ok(RangeIter::new(ranges).map(|index| GridCube { level: lvl, index }).collect());
        }
        let prev = self.surviving_cubes(stage - 1)?;
        let fanout = BigUint::from(self.params.m)
            .pow((lvl - self.params.prune_level(stage - 1)) * (self.params.d as u32 + 1))
            .pow(self.params.d as u32);
        let visits = BigUint::from(prev.len()) * fanout;
        if visits.bits() > 63 || visits.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
            return Err(Error::EnumerationBudget { count: visits.to_string(), budget: SWEEP_BUDGET });
        }
        let mut out = Vec::new();
        for p in &prev {
            for index in RangeIter::new(grid.child_ranges(p, lvl)) {
                let cube = GridCube { level: lvl, index };
                if !self.removed_at_stage(&cube, stage)? {
                    out.push(cube);
                }
            }
        }
        Ok(out)
    }

    /// Exact Lebesgue measure of the stage's surviving union, by full
    /// enumeration (budget-guarded).
    pub fn surviving_measure_exact(&self, stage: u32) -> Result<BigRational> {
        let survivors = self.surviving_cubes(stage)?;
        let vol = self.params.grid().volume(self.params.prune_level(stage));
        Ok(BigRational::from_integer(survivors.len().into()) * vol)
    }

    /// Certified lower bound on the stage's surviving measure: one minus a
    /// union bound over every starred flat's removal, counting each removed
    /// cube at every stage that removes it. Much cheaper than enumeration
    /// when the flats are low-dimensional.
    pub fn surviving_measure_lower_bound(&self, stage: u32) -> Result<BigRational> {
        let grid = self.params.grid();
        let mut removed = BigRational::zero();
        for k in 1..=stage {
            let sched = self.schedule(k)?;
            let lvl = sched.prune_level;
            let vol = grid.volume(lvl);
            let hosts = grid.count(k);
            if hosts.bits() > 63 || hosts.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
                return Err(Error::EnumerationBudget { count: hosts.to_string(), budget: SWEEP_BUDGET });
            }
            let top = &grid.per_axis(k) - BigUint::one();
            let host_ranges = vec![(BigUint::zero(), top); self.params.d];
            let delta_hi = sched.delta.upper_bound_rational()?;
            for hidx in RangeIter::new(host_ranges) {
                let host = GridCube { level: k, index: hidx };
                if !self.is_starred(&host)? {
                    continue;
                }
                let rec = self.host_record(&host)?;
                let flat = rec.flat.as_ref().expect("starred host has a flat");
                let (hlo, hhi) = grid.bounds(&host);
                // scan box: the clipped flat's bounding box, widened by delta
                let (blo, bhi) = if flat.dim() == 0 {
                    (flat.base.clone(), flat.base.clone())
                } else {
                    (hlo.clone(), hhi.clone())
                };
                let blo: Vec<BigRational> = blo.iter().map(|x| x - &delta_hi).collect();
                let bhi: Vec<BigRational> = bhi.iter().map(|x| x + &delta_hi).collect();
                let ranges = match grid.ranges_touching_box(&blo, &bhi, lvl) {
                    Some(r) => r,
                    None => continue,
                };
                let count = range_count(&ranges);
                if count.bits() > 63
                    || count.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET
                {
                    return Err(Error::EnumerationBudget {
                        count: count.to_string(),
                        budget: SWEEP_BUDGET,
                    });
                }
                for index in RangeIter::new(ranges) {
                    let cube = GridCube { level: lvl, index };
                    let (clo, chi) = grid.bounds(&cube);
                    let dist = dist_box_to_clipped_flat(&clo, &chi, flat, &hlo, &hhi)?;
                    if sched.delta.cmp_rational(&dist)? != Ordering::Less {
                        removed += &vol;
                    }
                }
            }
        }
        Ok(BigRational::one() - removed)
    }

    /// Whether a canonical rational actively removes cubes at its band's
    /// stage: its open `delta`-ball must meet the previous surviving union.
    /// (Being on its host's removal flat is automatic: the flat is the hull
    /// of all such rationals in the host.)
    pub fn is_leading(&self, point: &RationalPoint) -> Result<bool> {
        let stage = self.params.stage_of_denominator(&point.denominator);
        if stage > self.params.max_stage {
            return Err(Error::StageOutOfRange { stage, max: self.params.max_stage });
        }
        let sched = self.schedule(stage)?;
        self.ball_meets_surviving(&point.coords(), &sched.delta, stage - 1)
    }

    /// All leading rationals of one stage, in host-then-denominator order.
    pub fn leading_rationals(&self, stage: u32) -> Result<Vec<LeadingRational>> {
        let grid = self.params.grid();
        let sched = self.schedule(stage)?;
        let hosts = grid.count(stage);
        if hosts.bits() > 63 || hosts.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
            return Err(Error::EnumerationBudget { count: hosts.to_string(), budget: SWEEP_BUDGET });
        }
        let top = &grid.per_axis(stage) - BigUint::one();
        let host_ranges = vec![(BigUint::zero(), top); self.params.d];
        let mut out = Vec::new();
        for hidx in RangeIter::new(host_ranges) {
            let host = GridCube { level: stage, index: hidx };
            let rec = self.host_record(&host)?;
            if rec.flat.is_none() {
                continue;
            }
            for p in &rec.points {
                if !p.denominator_in_band(&sched.band_lo, &sched.band_hi) {
                    continue;
                }
                if self.ball_meets_surviving(&p.coords(), &sched.delta, stage - 1)? {
                    out.push(LeadingRational { point: p.clone(), stage, host: host.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Leading rationals of one stage whose coordinates lie in a box
    /// (streamed for cover searches; ordered by denominator, then numerators).
    pub fn leading_rationals_in_box(&self, bx: &RatBox, stage: u32) -> Result<Vec<LeadingRational>> {
        let grid = self.params.grid();
        let sched = self.schedule(stage)?;
        let pts = enumerate_rationals(bx, &sched.band_lo, &sched.band_hi)?;
        let mut out = Vec::new();
        for p in pts {
            if self.ball_meets_surviving(&p.coords(), &sched.delta, stage - 1)? {
                let host = grid.cube_containing(&p.coords(), stage)?;
                out.push(LeadingRational { point: p, stage, host });
            }
        }
        Ok(out)
    }

    /// Exhaustively check that every canonical rational with denominator up
    /// to `q_cap` has its open dangerous ball disjoint from the surviving
    /// union of the stage that retires its band.
    pub fn check_dangerous_avoidance(&self, stage: u32, q_cap: &BigUint) -> Result<AvoidanceReport> {
        let d = self.params.d;
        let unit = RatBox::closed(vec![BigRational::zero(); d], vec![BigRational::one(); d]);
        let q_hi = q_cap + BigUint::one();
        let pts = enumerate_rationals(&unit, &BigUint::one(), &q_hi)?;
        let mut violations = Vec::new();
        let checked = pts.len();
        for p in pts {
            let band_stage = self.params.stage_of_denominator(&p.denominator);
            if band_stage > stage {
                continue; // band not yet retired at this stage
            }
            let radius = self.params.dangerous_radius(&p.denominator);
            if self.ball_meets_surviving(&p.coords(), &radius, stage)? {
                violations.push(p);
            }
        }
        Ok(AvoidanceReport {
            stage,
            q_cap: q_cap.to_string(),
            rationals_checked: checked,
            violations,
        })
    }

    /// For every cube surviving `from_stage`, measure the fraction of its
    /// volume still surviving at `to_stage` and compare against the
    /// schedule's retention bound.
    pub fn check_cube_retention(&self, from_stage: u32, to_stage: u32) -> Result<RetentionReport> {
        assert!(from_stage < to_stage);
        let grid = self.params.grid();
        let bound = self.params.retention_bound(from_stage, to_stage);
        let survivors = self.surviving_cubes(from_stage)?;
        let from_vol = grid.volume(self.params.prune_level(from_stage));
        let to_vol = grid.volume(self.params.prune_level(to_stage));
        let mut min_ratio = BigRational::one();
        let mut failures = Vec::new();
        let checked = survivors.len();
        for cube in survivors {
            let kept = self.surviving_descendants(&cube, from_stage, to_stage)?;
            let ratio = BigRational::from_integer(kept.into()) * &to_vol / &from_vol;
            if ratio < min_ratio {
                min_ratio = ratio.clone();
            }
            if ratio < bound {
                failures.push(cube);
            }
        }
        Ok(RetentionReport {
            from_stage,
            to_stage,
            cubes_checked: checked,
            bound,
            min_ratio,
            failures,
        })
    }

    /// Count of `l(to_stage)` descendants of a surviving `l(from_stage)` cube
    /// that survive every intermediate stage.
    fn surviving_descendants(&self, cube: &GridCube, from_stage: u32, to_stage: u32) -> Result<u64> {
        if from_stage == to_stage {
            return Ok(1);
        }
        let grid = self.params.grid();
        let next = from_stage + 1;
        let lvl = self.params.prune_level(next);
        let mut total = 0u64;
        for index in RangeIter::new(grid.child_ranges(cube, lvl)) {
            let child = GridCube { level: lvl, index };
            if !self.removed_at_stage(&child, next)? {
                total += self.surviving_descendants(&child, next, to_stage)?;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::{fixture_d1, fixture_d2};
    use crate::rational::parse_rational;
    use num_bigint::BigInt;

    fn state_d1() -> PruningState {
        PruningState::new(fixture_d1()).unwrap()
    }

    fn pt(nums: Vec<i64>, den: u64) -> RationalPoint {
        RationalPoint::new(nums.into_iter().map(BigInt::from).collect(), BigUint::from(den)).unwrap()
    }

    #[test]
    fn stage_one_records_d1() {
        let st = state_d1();
        // 8 hosts of width 1/8; only the end hosts contain a rational with
        // denominator below 2 (the integers 0 and 1)
        for j in 0..8u32 {
            let host = GridCube { level: 1, index: vec![BigUint::from(j)] };
            let rec = st.host_record(&host).unwrap();
            if j == 0 || j == 7 {
                let flat = rec.flat.as_ref().unwrap();
                assert_eq!(flat.dim(), 0);
                assert!(st.is_starred(&host).unwrap());
            } else {
                assert!(rec.flat.is_none());
                assert!(!st.is_starred(&host).unwrap());
            }
        }
    }

    #[test]
    fn stage_one_measure_d1() {
        let st = state_d1();
        // stage 1 removes 2 cubes of level 6 at each end: measure 4 * 2^-13
        let survivors = st.surviving_cubes(1).unwrap();
        assert_eq!(survivors.len(), 8192 - 4);
        let exact = st.surviving_measure_exact(1).unwrap();
        assert_eq!(exact, parse_rational("2047/2048").unwrap());
        // the union bound is exact at stage 1
        let lower = st.surviving_measure_lower_bound(1).unwrap();
        assert_eq!(lower, exact);
    }

    #[test]
    fn neighbor_host_removal_d1() {
        let st = state_d1();
        // 1/2 has band stage 2 and sits on the boundary of host 16 of level
        // 2; the cube of level 7 immediately left of 1/2 belongs to host 15,
        // whose own record is empty, yet it must still be removed.
        let left = GridCube { level: 7, index: vec![BigUint::from(16383u32)] };
        assert!(st.removed_at_stage(&left, 2).unwrap());
        assert!(!st.survives(&left, 2).unwrap());
        let right = GridCube { level: 7, index: vec![BigUint::from(16384u32)] };
        assert!(!st.survives(&right, 2).unwrap());
        // one cube further out: distance 2^-15 exceeds delta(2) = 2^-16
        let far = GridCube { level: 7, index: vec![BigUint::from(16382u32)] };
        assert!(st.survives(&far, 2).unwrap());
    }

    #[test]
    fn leading_rationals_d1() {
        let st = state_d1();
        let stage1 = st.leading_rationals(1).unwrap();
        let pts: Vec<&RationalPoint> = stage1.iter().map(|l| &l.point).collect();
        assert_eq!(pts, vec![&pt(vec![0], 1), &pt(vec![1], 1)]);
        // 1/2 and 1/3 lead at stage 2
        assert!(st.is_leading(&pt(vec![1], 2)).unwrap());
        assert!(st.is_leading(&pt(vec![1], 3)).unwrap());
        // a deep rational buried in the stage-1 removal zone near 0 is not
        // leading: its ball only meets long-dead cubes
        assert!(!st.is_leading(&pt(vec![1], 8192)).unwrap());
    }

    #[test]
    fn dangerous_avoidance_small_d1() {
        let st = state_d1();
        let report = st.check_dangerous_avoidance(2, &BigUint::from(3u32)).unwrap();
        assert_eq!(report.rationals_checked, 5); // 0, 1, 1/2, 1/3, 2/3
        assert!(report.violations.is_empty());
    }

    #[test]
    fn retention_d1() {
        let st = state_d1();
        let report = st.check_cube_retention(1, 2).unwrap();
        assert!(report.failures.is_empty(), "min ratio {}", report.min_ratio);
        assert!(report.min_ratio >= report.bound);
    }

    #[test]
    fn stage_one_records_d2() {
        let st = PruningState::new(fixture_d2()).unwrap();
        // d = 2: hosts of level 1 form a 16 x 16 grid; the corner host
        // contains several integer-band rationals but their hull must stay
        // below dimension 2
        let corner = GridCube { level: 1, index: vec![BigUint::zero(), BigUint::zero()] };
        let rec = st.host_record(&corner).unwrap();
        let flat = rec.flat.as_ref().unwrap();
        assert!(flat.dim() < 2);
        assert!(st.is_starred(&corner).unwrap());
        // a generic interior host holds at most one rational of denominator
        // below 4 and a zero-dimensional flat, or none at all
        let mid = GridCube { level: 1, index: vec![BigUint::from(5u32), BigUint::from(6u32)] };
        let rec = st.host_record(&mid).unwrap();
        if let Some(f) = &rec.flat {
            assert_eq!(f.dim(), 0);
        }
    }

    #[test]
    fn lazy_membership_deep_d1() {
        let st = state_d1();
        // resolve one membership at stage 5 (level 12) without sweeping:
        // the cube containing the golden-ratio-ish point 13/21 shifted off
        // all shallow flats
        let x = parse_rational("5/13").unwrap();
        let grid = st.params().grid();
        let cube = grid.cube_containing(&[x], st.params().prune_level(5)).unwrap();
        // survival is decided either way without exhausting any budget
        let _ = st.survives(&cube, 5).unwrap();
        let (s, _, _) = st.memo_sizes();
        assert!(s < 2_000, "lazy resolution touched {s} cubes");
    }
}
