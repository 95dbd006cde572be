//! Layered mass-transfer tree.
//!
//! From a seed ball, a Cantor-type tree of surviving cubes is grown: each
//! node's cube is covered by a disjoint family of "fat" balls around leading
//! rationals of large denominator (a greedy Vitali selection reaching a fixed
//! fraction `kappa_1` of the cube's volume), each fat ball is shrunk to the
//! approximation ball of its center, and a surviving cube is nested inside
//! the shrunk ball to carry the next layer. Mass flows from parent to
//! children proportionally to fat-ball volume, so every layer carries total
//! mass one exactly.
//!
//! The point of the tree is the Hoelder-type bound `mu(F) <= K r(F)^(s-eps)`
//! it supports, which feeds the mass-distribution principle; `check_holder`
//! verifies the bound on every node and on sampled balls, and
//! `dimension_certificate` converts a clean report into the certified lower
//! bound `s - eps` on the Hausdorff dimension of the intersection set.

use crate::cube::{range_count, GridCube, RangeIter};
use crate::enumerate::{enumerate_rationals, RatBox};
use crate::error::{Error, Result};
use crate::params::ConstructionParams;
use crate::power::{cmp_sum_to_rational, PowerProduct, PowerRadius, floor_nth_root};
use crate::pruning::{PruningState, SWEEP_BUDGET};
use crate::rational::{
    format_rational, pow_rational, sup_dist, sup_dist_point_box, RationalPoint,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// The two balls carried by an approximating rational `p/q`: the fat ball of
/// radius `2 q^{-(d+1)/d}` used for covering, and the shrunk ball of radius
/// `q^{-(1+tau)}` that the next layer nests into.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxBall {
    pub center: RationalPoint,
    /// Denominator-band stage of `q`.
    pub stage: u32,
    pub fat: PowerRadius,
    pub shrunk: PowerRadius,
    /// Exactly rational: `4^d q^{-(d+1)}`.
    #[serde(with = "crate::rational::serde_rational")]
    pub fat_volume: BigRational,
}

impl ApproxBall {
    pub fn new(params: &ConstructionParams, center: RationalPoint) -> Self {
        let q = center.denominator.clone();
        let stage = params.stage_of_denominator(&q);
        ApproxBall {
            stage,
            fat: params.fat_radius(&q),
            shrunk: params.shrunk_radius(&q),
            fat_volume: params.fat_volume(&q),
            center,
        }
    }
}

/// One node of the tree: a surviving cube carrying exact mass, nested inside
/// the shrunk ball it was reached through (the root has no ball).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeNode {
    pub cube: GridCube,
    /// Pruning stage of `cube` (its level is `l(stage)`).
    pub stage: u32,
    pub ball: Option<ApproxBall>,
    #[serde(with = "crate::rational::serde_rational")]
    pub mass: BigRational,
    /// Index of the parent within the previous layer.
    pub parent: Option<usize>,
}

/// The seed ball the tree grows inside (sup-norm, rational data).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedBall {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub center: Vec<BigRational>,
    #[serde(with = "crate::rational::serde_rational")]
    pub radius: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CantorTree {
    pub params: ConstructionParams,
    pub seed: SeedBall,
    #[serde(with = "crate::rational::serde_rational")]
    pub epsilon: BigRational,
    /// `layers[0]` is the single root node on the seed cube.
    pub layers: Vec<Vec<TreeNode>>,
    /// Denominator threshold used to build each layer `1..`.
    pub thresholds: Vec<BigUint>,
    /// Non-fatal deviations observed during the build (interior-measure or
    /// Hoelder-headroom shortfalls); they flow into the Hoelder report.
    pub warnings: Vec<String>,
}

/// Result of one greedy Vitali cover.
#[derive(Debug, Clone)]
pub struct CoverResult {
    pub kept: Vec<ApproxBall>,
    /// Candidates that failed only disjointness; each meets the 5-blowup of
    /// some kept ball, which is what grants the `kappa_1` guarantee.
    pub rejected: Vec<ApproxBall>,
    pub achieved: BigRational,
    pub target: BigRational,
}

/// Interior surviving subcubes of a node cube, one stage deeper.
#[derive(Debug, Clone)]
pub struct InteriorSet {
    pub cubes: Vec<GridCube>,
    pub total_measure: BigRational,
    /// Whether the total reaches half the retention-adjusted cube volume.
    pub half_ok: bool,
}

/// Coverage fraction `kappa_1 = C_retention * 5^{-d} / 4` with the retention
/// constant `1 - (removed-measure majorant through max_stage)`.
pub fn kappa1(params: &ConstructionParams) -> BigRational {
    let retention = BigRational::one() - params.removed_measure_majorant(params.max_stage);
    let five_d = BigRational::new(BigInt::one(), BigInt::from(5u32).pow(params.d as u32));
    retention * five_d / BigRational::from(BigInt::from(4))
}

/// Surviving subcubes of `cube` at stage `stage + 1` that avoid its boundary,
/// with the half-volume sanity check the construction expects of them.
pub fn interior_subcubes(state: &PruningState, cube: &GridCube, stage: u32) -> Result<InteriorSet> {
    let params = state.params();
    let grid = params.grid();
    let next = stage + 1;
    let lvl = params.prune_level(next);
    let mut ranges = grid.child_ranges(cube, lvl);
    for (lo, hi) in &mut ranges {
        *lo += BigUint::one();
        if hi.is_zero() {
            return Ok(InteriorSet { cubes: vec![], total_measure: BigRational::zero(), half_ok: false });
        }
        *hi -= BigUint::one();
    }
    let mut cubes = Vec::new();
    for index in RangeIter::new(ranges) {
        let c = GridCube { level: lvl, index };
        if state.survives(&c, next)? {
            cubes.push(c);
        }
    }
    let total = BigRational::from_integer(cubes.len().into()) * grid.volume(lvl);
    let retention = BigRational::one() - params.removed_measure_majorant(params.max_stage);
    let half = grid.volume(cube.level) * retention / BigRational::from(BigInt::from(2));
    let half_ok = total >= half;
    Ok(InteriorSet { cubes, total_measure: total, half_ok })
}

/// Closed fat ball of `ball` contained in the closed box `[lo, hi]`.
fn ball_inside_box(ball: &ApproxBall, lo: &[BigRational], hi: &[BigRational]) -> Result<bool> {
    let c = ball.center.coords();
    let mut margin: Option<BigRational> = None;
    for i in 0..c.len() {
        let m = (&c[i] - &lo[i]).min(&hi[i] - &c[i]);
        margin = Some(match margin {
            None => m,
            Some(prev) => prev.min(m),
        });
    }
    let margin = margin.expect("nonempty dimension");
    if !margin.is_positive() {
        return Ok(false);
    }
    Ok(ball.fat.cmp_rational(&margin)? != Ordering::Greater)
}

/// Greedy Vitali cover of a surviving cube by disjoint fat balls of leading
/// rationals with denominator at least `g`, reaching volume `kappa_1 *
/// lambda(cube)`. Candidates stream largest-radius first (denominator
/// ascending, then lexicographic), so the classical 5r argument applies to
/// the rejected ones.
pub fn t_gi_cover(
    state: &PruningState,
    cube: &GridCube,
    _stage: u32,
    g: &BigUint,
    interior: &[GridCube],
) -> Result<CoverResult> {
    let params = state.params();
    let grid = params.grid();
    let (ilo, ihi) = grid.bounds(cube);
    let target = kappa1(params) * grid.volume(cube.level);
    let bx = RatBox::closed(ilo.clone(), ihi.clone());
    let interior_bounds: Vec<(Vec<BigRational>, Vec<BigRational>)> =
        interior.iter().map(|c| grid.bounds(c)).collect();
    let mut kept: Vec<ApproxBall> = Vec::new();
    let mut rejected: Vec<ApproxBall> = Vec::new();
    let mut achieved = BigRational::zero();
    let start_stage = params.stage_of_denominator(g).max(1);
    let mut q_reached = g.clone();
    for st in start_stage..=params.max_stage {
        let sched = params.schedule_value(st)?;
        let q_lo = if &sched.band_lo > g { sched.band_lo.clone() } else { g.clone() };
        let pts = enumerate_rationals(&bx, &q_lo, &sched.band_hi)?;
        for p in pts {
            q_reached = p.denominator.clone();
            let ball = ApproxBall::new(params, p);
            // cheap geometric filters first, the pruning oracle last
            if !ball_inside_box(&ball, &ilo, &ihi)? {
                continue;
            }
            let c = ball.center.coords();
            let mut touches_interior = false;
            for (clo, chi) in &interior_bounds {
                let dist = sup_dist_point_box(&c, clo, chi);
                if ball.fat.cmp_rational(&dist)? != Ordering::Less {
                    touches_interior = true;
                    break;
                }
            }
            if !touches_interior {
                continue;
            }
            let mut disjoint = true;
            for k in &kept {
                let dist = sup_dist(&c, &k.center.coords())?;
                if cmp_sum_to_rational(&ball.fat, &k.fat, &dist)? != Ordering::Less {
                    disjoint = false;
                    break;
                }
            }
            if !state.is_leading(&ball.center)? {
                continue;
            }
            if !disjoint {
                rejected.push(ball);
                continue;
            }
            achieved += &ball.fat_volume;
            kept.push(ball);
            if achieved >= target {
                return Ok(CoverResult { kept, rejected, achieved, target });
            }
        }
    }
    Err(Error::CoverageShortfall {
        level: cube.level,
        achieved: format_rational(&achieved),
        target: format_rational(&target),
        q_reached: q_reached.to_string(),
    })
}

/// Surviving cube of the previous stage nested strictly inside the shrunk
/// ball (smallest index), with the volume-ratio invariant
/// `lambda(shrunk ball) <= C * lambda(cube)` verified exactly.
pub fn nest_cube(state: &PruningState, ball: &ApproxBall) -> Result<GridCube> {
    let params = state.params();
    let grid = params.grid();
    assert!(ball.stage >= 1);
    let target_stage = ball.stage - 1;
    let lvl = params.prune_level(target_stage);
    let c = ball.center.coords();
    let r = ball.shrunk.upper_bound_rational()?;
    let lo: Vec<BigRational> = c.iter().map(|x| x - &r).collect();
    let hi: Vec<BigRational> = c.iter().map(|x| x + &r).collect();
    let ranges = grid
        .ranges_touching_box(&lo, &hi, lvl)
        .ok_or(Error::NestingFailure { point: ball.center.to_string() })?;
    let count = range_count(&ranges);
    if count.bits() > 63 || count.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
        return Err(Error::EnumerationBudget { count: count.to_string(), budget: SWEEP_BUDGET });
    }
    for index in RangeIter::new(ranges) {
        let cand = GridCube { level: lvl, index };
        let (clo, chi) = grid.bounds(&cand);
        // farthest corner must be strictly inside the open shrunk ball
        let mut corner = BigRational::zero();
        for i in 0..c.len() {
            let m = (&c[i] - &clo[i]).abs().max((&chi[i] - &c[i]).abs());
            if m > corner {
                corner = m;
            }
        }
        if ball.shrunk.cmp_rational(&corner)? != Ordering::Greater {
            continue;
        }
        if !state.survives(&cand, target_stage)? {
            continue;
        }
        // lambda(shrunk) = 2^d q^{-(1+tau)d} <= C * lambda(cand)
        let d = params.d as u32;
        let mut lhs = PowerProduct::one();
        lhs.mul_rational(&BigRational::from(BigInt::from(2).pow(d)));
        let neg_exp = -params.one_plus_tau() * BigRational::from(BigInt::from(d));
        lhs.mul_power(&ball.center.denominator, &neg_exp);
        let mut rhs = params.nesting_constant().product();
        rhs.mul_rational(&grid.volume(lvl));
        if lhs.cmp_exact(&rhs)? == Ordering::Greater {
            return Err(Error::NestingFailure { point: ball.center.to_string() });
        }
        return Ok(cand);
    }
    Err(Error::NestingFailure { point: ball.center.to_string() })
}

/// Minimal denominator threshold for the next layer. Conditions, each
/// monotone in the threshold: (a) fat radius below the interior-subcube side
/// of the deepest previous node; (b) four shrunk radii below one fat radius;
/// (c) Hoelder headroom `q^{(1+tau) eps}` above the previous layer's worst
/// mass-to-fat-volume ratio. Condition (c) may demand denominators beyond
/// the configured stage range; it is then waived with a recorded warning
/// rather than silently met.
pub fn choose_g(
    params: &ConstructionParams,
    prev_stage_max: u32,
    prev_ratio_max: &BigRational,
    prev_g: &BigUint,
    epsilon: &BigRational,
) -> Result<(BigUint, Option<String>)> {
    let d = params.d as u32;
    let grid = params.grid();
    // (a): 2 G^{-(d+1)/d} < side  <=>  G^{d+1} > (2/side)^d
    let side = grid.side(params.prune_level(prev_stage_max + 1));
    let xa = pow_rational(&(BigRational::from(BigInt::from(2)) / side), d);
    let ga = floor_nth_root(&xa, d + 1) + BigUint::one();
    // (b): 4 G^{-(1+tau)} < 2 G^{-(d+1)/d}  <=>  G^{tau_num d - tau_den} > 2^{tau_den d}
    let eb = params.tau_num * d - params.tau_den; // positive: tau > 1/d
    let xb = BigRational::from(BigInt::from(2).pow(params.tau_den * d));
    let gb = floor_nth_root(&xb, eb) + BigUint::one();
    let mut g = ga.max(gb).max(prev_g + BigUint::one()).max(BigUint::from(2u32));
    let cap = params.n_base().pow(params.max_stage - 1);
    if g > cap {
        return Err(Error::InvalidParams(format!(
            "denominator threshold {g} exceeds the stage-range cap {cap}; increase max_stage"
        )));
    }
    // (c): G^{(1+tau) eps} > prev_ratio_max  <=>  G^a > ratio^b
    let mut warning = None;
    if prev_ratio_max > &BigRational::one() {
        let e = params.one_plus_tau() * epsilon;
        let a = e.numer().magnitude().to_u32_digits();
        let b = e.denom().magnitude().to_u32_digits();
        let (a, b) = (a.first().copied().unwrap_or(1), b.first().copied().unwrap_or(1));
        let xc = pow_rational(prev_ratio_max, b);
        let gc = floor_nth_root(&xc, a) + BigUint::one();
        if gc > cap {
            warning = Some(format!(
                "Hoelder headroom shortfall: condition (c) needs threshold {gc} but the stage \
                 range caps it at {cap}; proceeding with {g}"
            ));
        } else if gc > g {
            g = gc;
        }
    }
    Ok((g, warning))
}

/// Grow the tree to the requested depth with exact proportional masses.
pub fn build_tree(
    state: &PruningState,
    seed: &SeedBall,
    depth: u32,
    epsilon: &BigRational,
) -> Result<CantorTree> {
    let params = state.params().clone();
    let grid = params.grid();
    if !epsilon.is_positive() || *epsilon >= params.dim_target() {
        return Err(Error::InvalidParams(format!(
            "epsilon must lie in (0, s); got {}",
            format_rational(epsilon)
        )));
    }
    // seed precondition: removed-measure majorant below a quarter of the
    // seed ball's volume
    let seed_vol = pow_rational(
        &(BigRational::from(BigInt::from(2)) * &seed.radius),
        params.d as u32,
    );
    let majorant = params.removed_measure_majorant(params.max_stage);
    if majorant >= seed_vol / BigRational::from(BigInt::from(4)) {
        return Err(Error::InvalidParams(
            "seed ball too small for the removed-measure budget".into(),
        ));
    }
    // smallest-index surviving first-stage cube strictly inside the seed ball
    let lvl1 = params.prune_level(1);
    let lo: Vec<BigRational> = seed.center.iter().map(|x| x - &seed.radius).collect();
    let hi: Vec<BigRational> = seed.center.iter().map(|x| x + &seed.radius).collect();
    let ranges = grid.ranges_touching_box(&lo, &hi, lvl1).ok_or(Error::SeedFailure)?;
    let count = range_count(&ranges);
    if count.bits() > 63 || count.to_u64_digits().first().copied().unwrap_or(0) > SWEEP_BUDGET {
        return Err(Error::EnumerationBudget { count: count.to_string(), budget: SWEEP_BUDGET });
    }
    let mut seed_cube = None;
    for index in RangeIter::new(ranges) {
        let cand = GridCube { level: lvl1, index };
        let (clo, chi) = grid.bounds(&cand);
        let mut corner = BigRational::zero();
        for i in 0..params.d {
            let m = (&seed.center[i] - &clo[i]).abs().max((&chi[i] - &seed.center[i]).abs());
            if m > corner {
                corner = m;
            }
        }
        if corner < seed.radius && state.survives(&cand, 1)? {
            seed_cube = Some(cand);
            break;
        }
    }
    let seed_cube = seed_cube.ok_or(Error::SeedFailure)?;
    let root = TreeNode {
        cube: seed_cube,
        stage: 1,
        ball: None,
        mass: BigRational::one(),
        parent: None,
    };
    let mut tree = CantorTree {
        params: params.clone(),
        seed: seed.clone(),
        epsilon: epsilon.clone(),
        layers: vec![vec![root]],
        thresholds: Vec::new(),
        warnings: Vec::new(),
    };
    let mut prev_g = BigUint::one();
    for layer in 1..=depth {
        let prev = tree.layers.last().unwrap();
        let prev_stage_max = prev.iter().map(|n| n.stage).max().unwrap();
        let prev_ratio_max = prev
            .iter()
            .map(|n| match &n.ball {
                Some(b) => &n.mass / &b.fat_volume,
                None => BigRational::one(),
            })
            .max()
            .unwrap();
        let (g, warning) = choose_g(&params, prev_stage_max, &prev_ratio_max, &prev_g, epsilon)?;
        if let Some(w) = warning {
            tree.warnings.push(format!("layer {layer}: {w}"));
        }
        let mut next_layer = Vec::new();
        for (pidx, node) in prev.iter().enumerate() {
            let interior = interior_subcubes(state, &node.cube, node.stage)?;
            if !interior.half_ok {
                tree.warnings.push(format!(
                    "layer {layer}: interior subcubes of parent {pidx} retain only {} of {}",
                    format_rational(&interior.total_measure),
                    format_rational(&grid.volume(node.cube.level)),
                ));
            }
            let cover = t_gi_cover(state, &node.cube, node.stage, &g, &interior.cubes)?;
            let total_fat: BigRational =
                cover.kept.iter().map(|b| b.fat_volume.clone()).sum();
            for ball in cover.kept {
                let nested = nest_cube(state, &ball)?;
                let mass = &ball.fat_volume / &total_fat * &node.mass;
                next_layer.push(TreeNode {
                    cube: nested,
                    stage: ball.stage - 1,
                    ball: Some(ball),
                    mass,
                    parent: Some(pidx),
                });
            }
        }
        tree.thresholds.push(g.clone());
        tree.layers.push(next_layer);
        prev_g = g;
    }
    Ok(tree)
}

/// Upper bound on the tree measure of the closed sup-norm ball `F`: the sum
/// of deepest-layer masses whose shrunk balls intersect it (a valid cover).
pub fn mass_upper(tree: &CantorTree, center: &[BigRational], radius: &BigRational) -> Result<BigRational> {
    let deepest = tree.layers.last().unwrap();
    let grid = tree.params.grid();
    let mut total = BigRational::zero();
    for node in deepest {
        let hit = match &node.ball {
            Some(ball) => {
                let dist = sup_dist(center, &ball.center.coords())?;
                // intersect iff dist - radius <= shrunk
                ball.shrunk.cmp_rational(&(&dist - radius))? != Ordering::Less
            }
            None => {
                let (clo, chi) = grid.bounds(&node.cube);
                sup_dist_point_box(center, &clo, &chi) <= *radius
            }
        };
        if hit {
            total += &node.mass;
        }
    }
    Ok(total)
}

/// Hoelder verification report: the per-node bound with constant K and the
/// sampled-ball bound with constant K'.
#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    /// Human-readable description of K and K'.
    pub k_description: String,
    pub node_checks: usize,
    pub node_violations: Vec<String>,
    pub sample_checks: usize,
    pub sample_violations: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(with = "crate::rational::serde_rational")]
    pub exponent: BigRational,
}

fn holder_exponent(params: &ConstructionParams, epsilon: &BigRational) -> BigRational {
    params.dim_target() - epsilon
}

/// The constant K of the node bound as an exact power product:
/// `max(2^{2d} / (kappa_1 lambda(I_0)), 2^{2d} / (kappa_1 C))`.
fn node_constant(params: &ConstructionParams, seed_cube_volume: &BigRational) -> Result<PowerProduct> {
    let two_2d = BigRational::from(BigInt::from(2).pow(2 * params.d as u32));
    let k1 = &two_2d / (kappa1(params) * seed_cube_volume);
    let mut p1 = PowerProduct::one();
    p1.mul_rational(&k1);
    let mut p2 = PowerProduct::one();
    p2.mul_rational(&(&two_2d / kappa1(params)));
    let mut cinv = params.nesting_constant().product();
    cinv.pow(&-BigRational::one());
    p2.mul(&cinv);
    Ok(if p1.cmp_exact(&p2)? == Ordering::Less { p2 } else { p1 })
}

/// Check the per-node bound `mu <= K r^{s-eps}` on every node and the
/// sampled-ball bound `mass_upper(F) <= K' r(F)^{s-eps}` on `samples` seeded
/// pseudo-random balls spanning the layer scales.
pub fn check_holder(tree: &CantorTree, samples: usize, seed: u64) -> Result<HolderReport> {
    let params = &tree.params;
    let grid = params.grid();
    let exponent = holder_exponent(params, &tree.epsilon);
    let root_vol = grid.volume(tree.layers[0][0].cube.level);
    let k = node_constant(params, &root_vol)?;
    // K' = 10^d / (kappa_1 C)
    let mut kp = PowerProduct::one();
    kp.mul_rational(&(BigRational::from(BigInt::from(10).pow(params.d as u32)) / kappa1(params)));
    let mut cinv = params.nesting_constant().product();
    cinv.pow(&-BigRational::one());
    kp.mul(&cinv);

    let mut node_checks = 0;
    let mut node_violations = Vec::new();
    for (li, layer) in tree.layers.iter().enumerate() {
        for (ni, node) in layer.iter().enumerate() {
            node_checks += 1;
            let mut lhs = PowerProduct::one();
            lhs.mul_rational(&node.mass);
            let mut rhs = k.clone();
            match &node.ball {
                Some(ball) => {
                    // r = q^{-(1+tau)}: r^{s-eps} = q^{-(1+tau)(s-eps)}
                    let e = -params.one_plus_tau() * &exponent;
                    rhs.mul_power(&ball.center.denominator, &e);
                }
                None => {
                    let r = grid.side(node.cube.level) / BigRational::from(BigInt::from(2));
                    rhs.mul_rational_pow(&r, &exponent);
                }
            }
            if lhs.cmp_exact(&rhs)? == Ordering::Greater {
                node_violations.push(format!(
                    "layer {li} node {ni}: mass {} exceeds K r^(s-eps)",
                    format_rational(&node.mass)
                ));
            }
        }
    }

    // sampled general balls: dyadic radii between the deepest shrunk radius
    // and the root cube side, centers uniform dyadics in the root cube
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = &tree.layers[0][0];
    let (rlo, rhi) = grid.bounds(&root.cube);
    let e_coarse = (-grid.side(root.cube.level).to_f64_diag().log2()).ceil() as i64;
    let e_fine = tree
        .layers
        .last()
        .unwrap()
        .iter()
        .filter_map(|n| n.ball.as_ref())
        .map(|b| (-b.shrunk.approx_f64().log2()).ceil() as i64)
        .max()
        .unwrap_or(e_coarse + 1);
    let mut sample_checks = 0;
    let mut sample_violations = Vec::new();
    for _ in 0..samples {
        let e = rng.gen_range(e_coarse..=e_fine.max(e_coarse + 1));
        let radius = BigRational::new(BigInt::one(), BigInt::one() << (e.max(1) as usize));
        let center: Vec<BigRational> = (0..params.d)
            .map(|i| {
                let u = BigRational::new(BigInt::from(rng.gen::<u32>()), BigInt::from(1u64 << 32));
                &rlo[i] + (&rhi[i] - &rlo[i]) * u
            })
            .collect();
        sample_checks += 1;
        let mu = mass_upper(tree, &center, &radius)?;
        if mu.is_zero() {
            continue;
        }
        let mut lhs = PowerProduct::one();
        lhs.mul_rational(&mu);
        let mut rhs = kp.clone();
        rhs.mul_rational_pow(&radius, &exponent);
        if lhs.cmp_exact(&rhs)? == Ordering::Greater {
            sample_violations.push(format!(
                "ball at radius 2^-{e}: mass bound {} exceeds K' r^(s-eps)",
                format_rational(&mu)
            ));
        }
    }

    Ok(HolderReport {
        k_description: format!(
            "K = max(2^2d/(kappa1 vol(I0)), 2^2d/(kappa1 C)); K' = 10^d/(kappa1 C); kappa1 = {}",
            format_rational(&kappa1(params))
        ),
        node_checks,
        node_violations,
        sample_checks,
        sample_violations,
        warnings: tree.warnings.clone(),
        exponent,
    })
}

/// The certified Hausdorff-dimension lower bound `s - eps` carried by the
/// tree's measure; refuses when the Hoelder report records violations.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionCertificate {
    #[serde(with = "crate::rational::serde_rational")]
    pub s: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub epsilon: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lower_bound: BigRational,
}

pub fn dimension_certificate(tree: &CantorTree, report: &HolderReport) -> Result<DimensionCertificate> {
    let violations = report.node_violations.len() + report.sample_violations.len();
    if violations > 0 {
        return Err(Error::CertificateRefused { violations });
    }
    let s = tree.params.dim_target();
    Ok(DimensionCertificate {
        lower_bound: &s - &tree.epsilon,
        s,
        epsilon: tree.epsilon.clone(),
    })
}

/// Diagnostic-only f64 view of a rational (used for choosing sample scales,
/// never for decisions).
trait DiagF64 {
    fn to_f64_diag(&self) -> f64;
}

impl DiagF64 for BigRational {
    fn to_f64_diag(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::fixture_d1;
    use crate::rational::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn seed_half() -> SeedBall {
        SeedBall { center: vec![rat("1/2")], radius: rat("1/4") }
    }

    #[test]
    fn seed_cube_is_first_inside_ball() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let tree = build_tree(&state, &seed_half(), 0, &rat("1/10")).unwrap();
        // level 6 cubes have side 2^-13; the first whose closure sits
        // strictly inside (1/4, 3/4) is index 2049
        assert_eq!(tree.layers[0][0].cube.index, vec![BigUint::from(2049u32)]);
        assert_eq!(tree.layers[0][0].mass, BigRational::one());
    }

    #[test]
    fn nest_cube_for_one_half() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let p = RationalPoint::new(vec![BigInt::one()], BigUint::from(2u32)).unwrap();
        let ball = ApproxBall::new(state.params(), p);
        assert_eq!(ball.stage, 2);
        let cube = nest_cube(&state, &ball).unwrap();
        // shrunk radius 1/8: first level-6 cube strictly inside (3/8, 5/8)
        assert_eq!(cube.level, 6);
        assert_eq!(cube.index, vec![BigUint::from(3073u32)]);
    }

    #[test]
    fn interior_trim_and_measure() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let cube = GridCube { level: 6, index: vec![BigUint::from(2049u32)] };
        let interior = interior_subcubes(&state, &cube, 1).unwrap();
        // 4 children at level 7, 2 interior, both surviving (far from flats)
        assert_eq!(interior.cubes.len(), 2);
        assert!(interior.half_ok);
    }

    #[test]
    fn depth_one_tree_masses() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let tree = build_tree(&state, &seed_half(), 1, &rat("1/10")).unwrap();
        let layer = &tree.layers[1];
        assert!(!layer.is_empty());
        let total: BigRational = layer.iter().map(|n| n.mass.clone()).sum();
        assert_eq!(total, BigRational::one());
        for node in layer {
            assert!(node.mass.is_positive());
            let ball = node.ball.as_ref().unwrap();
            assert_eq!(node.stage, ball.stage - 1);
            // the nested cube must sit inside the parent cube
            let grid = tree.params.grid();
            let (plo, phi) = grid.bounds(&tree.layers[0][0].cube);
            let (clo, chi) = grid.bounds(&node.cube);
            for i in 0..1 {
                assert!(clo[i] >= plo[i] && chi[i] <= phi[i]);
            }
        }
    }

    #[test]
    fn cover_structural_properties() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let params = state.params();
        let cube = GridCube { level: 6, index: vec![BigUint::from(2049u32)] };
        let interior = interior_subcubes(&state, &cube, 1).unwrap();
        let (g, warn) = choose_g(params, 1, &BigRational::one(), &BigUint::one(), &rat("1/10")).unwrap();
        assert!(warn.is_none());
        let cover = t_gi_cover(&state, &cube, 1, &g, &interior.cubes).unwrap();
        assert!(cover.achieved >= cover.target);
        let grid = params.grid();
        let (ilo, ihi) = grid.bounds(&cube);
        for (a, b) in cover.kept.iter().zip(cover.kept.iter().skip(1)) {
            let dist = sup_dist(&a.center.coords(), &b.center.coords()).unwrap();
            assert_eq!(cmp_sum_to_rational(&a.fat, &b.fat, &dist).unwrap(), Ordering::Less);
        }
        for b in &cover.kept {
            assert!(ball_inside_box(b, &ilo, &ihi).unwrap());
            assert!(&b.center.denominator >= &g);
        }
        // every rejected candidate overlaps some kept ball, hence meets its
        // 5-blowup
        for r in &cover.rejected {
            let overlaps = cover.kept.iter().any(|k| {
                let dist = sup_dist(&r.center.coords(), &k.center.coords()).unwrap();
                cmp_sum_to_rational(&r.fat, &k.fat, &dist).unwrap() != Ordering::Less
            });
            assert!(overlaps);
        }
    }

    #[test]
    #[ignore = "multi-minute stress run; exercised by the acceptance suite"]
    fn depth_three_tree_builds() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let tree = build_tree(&state, &seed_half(), 3, &rat("1/10")).unwrap();
        for layer in &tree.layers {
            let total: BigRational = layer.iter().map(|n| n.mass.clone()).sum();
            assert_eq!(total, BigRational::one());
        }
        eprintln!(
            "layer sizes: {:?}; thresholds: {:?}; warnings: {:?}",
            tree.layers.iter().map(|l| l.len()).collect::<Vec<_>>(),
            tree.thresholds.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            tree.warnings
        );
        for (i, layer) in tree.layers.iter().enumerate() {
            eprintln!(
                "layer {i} stages: {:?}",
                layer.iter().map(|n| n.stage).collect::<Vec<_>>()
            );
        }
        let (s, st, rec) = state.memo_sizes();
        eprintln!("memo sizes: survives {s}, starred {st}, records {rec}");
    }

    #[test]
    fn mass_upper_extremes() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let tree = build_tree(&state, &seed_half(), 1, &rat("1/10")).unwrap();
        // a huge ball covers everything
        let all = mass_upper(&tree, &[rat("1/2")], &rat("1")).unwrap();
        assert_eq!(all, BigRational::one());
        // a far-away tiny ball covers nothing
        let none = mass_upper(&tree, &[rat("1/100")], &rat("1/1000000")).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn certificate_value_and_refusal() {
        let state = PruningState::new(fixture_d1()).unwrap();
        let tree = build_tree(&state, &seed_half(), 0, &rat("1/10")).unwrap();
        let report = check_holder(&tree, 10, 7).unwrap();
        // the node bound holds at the root, but every sampled ball engulfs
        // the whole root cube (mass 1), which the K' bound cannot absorb at
        // these scales -- the certificate must refuse
        assert!(report.node_violations.is_empty());
        assert!(!report.sample_violations.is_empty());
        assert!(matches!(
            dimension_certificate(&tree, &report),
            Err(Error::CertificateRefused { .. })
        ));
        let mut clean = report.clone();
        clean.sample_violations.clear();
        let cert = dimension_certificate(&tree, &clean).unwrap();
        assert_eq!(cert.lower_bound, rat("17/30"));
    }

    use num_bigint::{BigInt, BigUint};
}
