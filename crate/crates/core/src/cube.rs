//! Grid geometry: nested half-open cube grids over `[0,1]^d`.
//!
//! Level `n` splits each axis into `t * m^(n*(d+1))` equal pieces, so each
//! refinement step subdivides a cube into `m^((d+1)*d)` children. Cubes are
//! half-open `[lo, hi)` on every axis except that faces lying on the top
//! boundary of `[0,1]^d` are closed, making the cubes of a level an exact
//! partition of the unit cube.

use crate::error::{Error, Result};
use crate::rational::floor_int;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Grid parameters: ambient dimension `d`, global density factor `t`, and
/// per-level subdivision base `m` (each level multiplies the per-axis count
/// by `m^(d+1)`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub t: u32,
    pub m: u32,
}

/// A cube of the level-`level` grid, identified by its per-axis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridCube {
    pub level: u32,
    pub index: Vec<BigUint>,
}

impl Grid {
    /// Per-axis cube count at a level: `t * m^(level*(d+1))`.
    pub fn per_axis(&self, level: u32) -> BigUint {
        BigUint::from(self.t) * BigUint::from(self.m).pow(level * (self.d as u32 + 1))
    }

    /// Side length of a level cube.
    pub fn side(&self, level: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.per_axis(level)))
    }

    /// Cube volume `side^d`.
    pub fn volume(&self, level: u32) -> BigRational {
        let s = self.side(level);
        crate::rational::pow_rational(&s, self.d as u32)
    }

    /// Total cube count at a level (`per_axis^d`).
    pub fn count(&self, level: u32) -> BigUint {
        self.per_axis(level).pow(self.d as u32)
    }

    /// Closed bounds `[lo, hi]` of a cube (the half-open convention only
    /// matters for point membership, not for the distance geometry).
    pub fn bounds(&self, cube: &GridCube) -> (Vec<BigRational>, Vec<BigRational>) {
        let s = self.side(cube.level);
        let lo: Vec<BigRational> = cube
            .index
            .iter()
            .map(|i| BigRational::from(BigInt::from(i.clone())) * &s)
            .collect();
        let hi: Vec<BigRational> = lo.iter().map(|l| l + &s).collect();
        (lo, hi)
    }

    /// Whether a point belongs to the cube under the half-open convention
    /// (top faces of `[0,1]^d` closed).
    pub fn contains_point(&self, cube: &GridCube, p: &[BigRational]) -> bool {
        let per = BigRational::from(BigInt::from(self.per_axis(cube.level)));
        let one = BigRational::one();
        for i in 0..self.d {
            let scaled = &p[i] * &per;
            let lo = BigRational::from(BigInt::from(cube.index[i].clone()));
            let hi = &lo + &one;
            let closed_top = hi == per; // face on the boundary of [0,1]^d
            if scaled < lo || scaled > hi || (scaled == hi && !closed_top) {
                return false;
            }
        }
        true
    }

    /// The level cube containing a point of `[0,1]^d`.
    pub fn cube_containing(&self, p: &[BigRational], level: u32) -> Result<GridCube> {
        if p.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: p.len() });
        }
        let per = self.per_axis(level);
        let per_rat = BigRational::from(BigInt::from(per.clone()));
        let top = &per - BigUint::one();
        let mut index = Vec::with_capacity(self.d);
        for x in p {
            if x.is_negative() || *x > BigRational::one() {
                return Err(Error::InvalidParams(format!("point coordinate {x} outside [0,1]")));
            }
            let mut j = floor_int(&(x * &per_rat)).magnitude().clone();
            if j > top {
                j = top.clone(); // x == 1 lands in the closed top cube
            }
            index.push(j);
        }
        Ok(GridCube { level, index })
    }

    /// Ancestor of a cube at a coarser level.
    pub fn ancestor(&self, cube: &GridCube, level: u32) -> GridCube {
        assert!(level <= cube.level);
        let shrink = BigUint::from(self.m).pow((cube.level - level) * (self.d as u32 + 1));
        GridCube {
            level,
            index: cube.index.iter().map(|i| i / &shrink).collect(),
        }
    }

    /// Per-axis inclusive index ranges of level cubes whose closed bounds
    /// intersect the closed box `[lo, hi]`, clamped to the grid. Returns
    /// `None` when the box misses `[0,1]^d` entirely on some axis.
    pub fn ranges_touching_box(
        &self,
        lo: &[BigRational],
        hi: &[BigRational],
        level: u32,
    ) -> Option<Vec<(BigUint, BigUint)>> {
        let per = self.per_axis(level);
        let per_rat = BigRational::from(BigInt::from(per.clone()));
        let top = &per - BigUint::one();
        let mut ranges = Vec::with_capacity(self.d);
        for i in 0..self.d {
            // cube j = [j, j+1]/per intersects [lo, hi] iff j <= hi*per and j+1 >= lo*per
            let jmax_i = floor_int(&(&hi[i] * &per_rat));
            let jmin_i = (&lo[i] * &per_rat).ceil().to_integer() - BigInt::one();
            if jmax_i.is_negative() {
                return None;
            }
            let jmin = if jmin_i.is_negative() { BigUint::zero() } else { jmin_i.magnitude().clone() };
            let jmax_m = jmax_i.magnitude().clone();
            let jmax = if jmax_m > top { top.clone() } else { jmax_m };
            if jmin > jmax {
                return None;
            }
            ranges.push((jmin, jmax));
        }
        Some(ranges)
    }

    /// Per-axis inclusive index ranges of the descendants of `cube` at a
    /// deeper level.
    pub fn child_ranges(&self, cube: &GridCube, level: u32) -> Vec<(BigUint, BigUint)> {
        assert!(level >= cube.level);
        let f = BigUint::from(self.m).pow((level - cube.level) * (self.d as u32 + 1));
        cube.index
            .iter()
            .map(|i| {
                let lo = i * &f;
                let hi = &lo + &f - BigUint::one();
                (lo, hi)
            })
            .collect()
    }

    /// Cubes at the same level whose closed boundary touches `cube`
    /// (the 3^d - 1 neighborhood, clamped to the grid).
    pub fn neighbors(&self, cube: &GridCube) -> Vec<GridCube> {
        let top = &self.per_axis(cube.level) - BigUint::one();
        let mut axis_options: Vec<Vec<BigUint>> = Vec::with_capacity(self.d);
        for i in &cube.index {
            let mut opts = vec![i.clone()];
            if !i.is_zero() {
                opts.push(i - BigUint::one());
            }
            if *i < top {
                opts.push(i + BigUint::one());
            }
            axis_options.push(opts);
        }
        let mut out = Vec::new();
        let mut counters = vec![0usize; self.d];
        loop {
            let idx: Vec<BigUint> = (0..self.d).map(|a| axis_options[a][counters[a]].clone()).collect();
            if idx != cube.index {
                out.push(GridCube { level: cube.level, index: idx });
            }
            // odometer
            let mut a = 0;
            loop {
                if a == self.d {
                    return out;
                }
                counters[a] += 1;
                if counters[a] < axis_options[a].len() {
                    break;
                }
                counters[a] = 0;
                a += 1;
            }
        }
    }
}

/// Number of index tuples in a list of inclusive per-axis ranges.
pub fn range_count(ranges: &[(BigUint, BigUint)]) -> BigUint {
    let mut n = BigUint::one();
    for (lo, hi) in ranges {
        n *= hi - lo + BigUint::one();
    }
    n
}

/// Iterator over all index tuples of inclusive per-axis ranges, in
/// lexicographic order (deterministic).
pub struct RangeIter {
    ranges: Vec<(BigUint, BigUint)>,
    current: Option<Vec<BigUint>>,
}

impl RangeIter {
    pub fn new(ranges: Vec<(BigUint, BigUint)>) -> Self {
        let current = if ranges.iter().all(|(lo, hi)| lo <= hi) && !ranges.is_empty() {
            Some(ranges.iter().map(|(lo, _)| lo.clone()).collect())
        } else {
            None
        };
        Self { ranges, current }
    }
}

impl Iterator for RangeIter {
    type Item = Vec<BigUint>;

    fn next(&mut self) -> Option<Vec<BigUint>> {
        let cur = self.current.clone()?;
        // advance odometer from the last axis (lexicographic order)
        let mut next = cur.clone();
        let mut a = self.ranges.len();
        loop {
            if a == 0 {
                self.current = None;
                break;
            }
            a -= 1;
            if next[a] < self.ranges[a].1 {
                next[a] += BigUint::one();
                for b in a + 1..self.ranges.len() {
                    next[b] = self.ranges[b].0.clone();
                }
                self.current = Some(next);
                break;
            }
        }
        Some(cur)
    }
}
