//! Acceptance suite. Each test prints one PASS/FAIL line for its criterion;
//! failures carry enough detail to reproduce. The checks are independent of
//! the library's internals wherever feasible: criterion 2 re-derives the
//! pruned families with a dense sweep written directly against the removal
//! definitions, and the geometric postconditions of criterion 5 are asserted
//! from first principles on the covers.

use badapprox::checkpoint::{Checkpoint, TreeFile};
use badapprox::cube::GridCube;
use badapprox::enumerate::{enumerate_rationals, RatBox};
use badapprox::params::ConstructionParams;
use badapprox::power::cmp_sum_to_rational;
use badapprox::pruning::PruningState;
use badapprox::rational::{format_rational, sup_dist};
use badapprox::report::ReportBundle;
use badapprox::transfer::{
    build_tree, check_holder, dimension_certificate, interior_subcubes, kappa1, t_gi_cover,
    CantorTree, SeedBall,
};
use badapprox::verify::{
    box_count, check_membership_band, compliant_side, simplex_property_suite, Verdict,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::sync::OnceLock;
use std::time::Instant;

const SEED: u64 = 20_260_826;

fn params_d1() -> ConstructionParams {
    ConstructionParams { d: 1, tau_num: 2, tau_den: 1, m: 2, t: 2, u: 4, max_stage: 48 }
}

fn params_d2() -> ConstructionParams {
    ConstructionParams { d: 2, tau_num: 1, tau_den: 1, m: 2, t: 2, u: 4, max_stage: 6 }
}

fn seed_ball() -> SeedBall {
    SeedBall {
        center: vec![BigRational::new(BigInt::one(), BigInt::from(2))],
        radius: BigRational::new(BigInt::one(), BigInt::from(4)),
    }
}

fn epsilon() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10))
}

/// Depth-3 tree on the d=1 parameters, built once and shared.
fn shared_tree() -> &'static (PruningState, CantorTree) {
    static TREE: OnceLock<(PruningState, CantorTree)> = OnceLock::new();
    TREE.get_or_init(|| {
        let state = PruningState::new(params_d1()).unwrap();
        let tree = build_tree(&state, &seed_ball(), 3, &epsilon()).unwrap();
        (state, tree)
    })
}

fn verdict(criterion: u32, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    eprintln!("ACCEPTANCE {criterion}: {status} - {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_simplex_suite() {
    let start = Instant::now();
    let mut all_ok = true;
    let mut notes = Vec::new();
    for d in [1usize, 2] {
        let side = compliant_side(d, 8);
        let rep = simplex_property_suite(d, 8, 1000, SEED, &side).unwrap();
        all_ok &= rep.violations == 0;
        notes.push(format!("d={d}: {} violations/{} boxes", rep.violations, rep.trials));
    }
    // negative control: interval slightly longer than the minimal Farey gap
    let bad_side = BigRational::new(BigInt::one(), BigInt::from(6))
        + BigRational::new(BigInt::one(), BigInt::from(64));
    let control = simplex_property_suite(1, 3, 1000, SEED, &bad_side).unwrap();
    all_ok &= control.violations >= 1;
    notes.push(format!("negative control: {} violations", control.violations));
    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 60.0;
    verdict(1, all_ok, &format!("{}; {elapsed:.1}s", notes.join("; ")));
}

/// Dense reference oracle for the d=1 pruned families, written against the
/// removal definitions: stage n removes every level-l(n) cube within
/// delta(n) (closed) of a starred band rational, where a rational is
/// starred at stage 1 unconditionally and later iff its open delta(n)-ball
/// meets the previous surviving union.
fn dense_surviving_d1(params: &ConstructionParams, up_to: u32) -> Vec<Vec<bool>> {
    let grid = params.grid();
    let mut results: Vec<Vec<bool>> = Vec::new();
    let mut prev: Vec<bool> = Vec::new();
    let mut prev_per: u64 = 0;
    for n in 1..=up_to {
        let lvl = params.prune_level(n);
        let per: u64 = grid.per_axis(lvl).to_string().parse().unwrap();
        let side = BigRational::new(BigInt::one(), BigInt::from(per));
        let mut cur: Vec<bool> = if n == 1 {
            vec![true; per as usize]
        } else {
            let factor = (per / prev_per) as usize;
            let mut v = Vec::with_capacity(per as usize);
            for &s in &prev {
                v.extend(std::iter::repeat(s).take(factor));
            }
            v
        };
        let sched = params.schedule_value(n).unwrap();
        let delta = sched.delta.exact_value().expect("dyadic delta for these parameters");
        let unit = RatBox::closed(vec![BigRational::zero()], vec![BigRational::one()]);
        let rats = enumerate_rationals(&unit, &sched.band_lo, &sched.band_hi).unwrap();
        let prev_side = if n > 1 {
            BigRational::new(BigInt::one(), BigInt::from(prev_per))
        } else {
            BigRational::one()
        };
        for r in rats {
            let x = &r.coords()[0];
            let starred = if n == 1 {
                true
            } else {
                // open ball (x - delta, x + delta) meets the previous union
                let lo = (((x - &delta) / &prev_side).floor().to_integer() - BigInt::one()).max(BigInt::zero());
                let hi = ((x + &delta) / &prev_side).ceil().to_integer();
                let mut hit = false;
                let mut j = lo.to_u64().unwrap_or(0);
                // widen by one so cubes at distance exactly delta are
                // visited; the predicate below decides inclusion
                let j_hi = hi.to_u64().map(|v| v + 1).unwrap_or(prev_per).min(prev_per);
                while j < j_hi {
                    if prev[j as usize] {
                        let clo = BigRational::new(BigInt::from(j), BigInt::from(prev_per));
                        let chi = &clo + &prev_side;
                        let dist = (&clo - x).max(x - &chi).max(BigRational::zero());
                        if dist < delta {
                            hit = true;
                            break;
                        }
                    }
                    j += 1;
                }
                hit
            };
            if !starred {
                continue;
            }
            let lo = (((x - &delta) / &side).floor().to_integer() - BigInt::one()).max(BigInt::zero());
            let hi = ((x + &delta) / &side).ceil().to_integer();
            let mut j = lo.to_u64().unwrap_or(0);
            let j_hi = hi.to_u64().map(|v| v + 1).unwrap_or(per).min(per);
            while j < j_hi {
                let clo = BigRational::new(BigInt::from(j), BigInt::from(per));
                let chi = &clo + &side;
                let dist = (&clo - x).max(x - &chi).max(BigRational::zero());
                if dist <= delta {
                    cur[j as usize] = false;
                }
                j += 1;
            }
        }
        results.push(cur.clone());
        prev = cur;
        prev_per = per;
    }
    results
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let params = params_d1();
    let state = PruningState::new(params.clone()).unwrap();
    let dense = dense_surviving_d1(&params, 3);
    let mut notes = Vec::new();
    let mut all_ok = true;
    for n in 1..=3u32 {
        let lvl = params.prune_level(n);
        let bitmap = &dense[(n - 1) as usize];
        let mut disagreements = 0usize;
        for (i, &want) in bitmap.iter().enumerate() {
            let cube = GridCube { level: lvl, index: vec![BigUint::from(i)] };
            if state.survives(&cube, n).unwrap() != want {
                disagreements += 1;
            }
        }
        all_ok &= disagreements == 0;
        notes.push(format!("stage {n}: {} cubes, {} disagreements", bitmap.len(), disagreements));
    }
    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 300.0;
    verdict(2, all_ok, &format!("{}; {elapsed:.1}s", notes.join("; ")));
}

#[test]
fn criterion_03_dangerous_avoidance() {
    let state = PruningState::new(params_d1()).unwrap();
    let rep = state.check_dangerous_avoidance(3, &BigUint::from(7u32)).unwrap();
    verdict(
        3,
        rep.violations.is_empty(),
        &format!(
            "stage 3, q <= 7: {} rationals, {} dangerous-ball intersections",
            rep.rationals_checked,
            rep.violations.len()
        ),
    );
}

#[test]
fn criterion_04_measure_certificates() {
    let params = params_d1();
    let state = PruningState::new(params.clone()).unwrap();
    let mut all_ok = true;
    let mut notes = Vec::new();
    for n in 1..=3u32 {
        let exact = state.surviving_measure_exact(n).unwrap();
        let certified = state.surviving_measure_lower_bound(n).unwrap();
        let floor = BigRational::one() - params.removed_measure_majorant(n);
        let ok = exact >= certified && certified >= floor;
        all_ok &= ok;
        notes.push(format!(
            "stage {n}: exact={} certified={} floor={}",
            format_rational(&exact),
            format_rational(&certified),
            format_rational(&floor)
        ));
    }
    let retention = state.check_cube_retention(1, 2).unwrap();
    let ret_ok = retention.failures.is_empty();
    all_ok &= ret_ok;
    notes.push(format!(
        "retention 1->2: {} cubes, min ratio {} >= bound {}: {}",
        retention.cubes_checked,
        format_rational(&retention.min_ratio),
        format_rational(&retention.bound),
        ret_ok
    ));
    verdict(4, all_ok, &notes.join("; "));
}

#[test]
fn criterion_05_cover_postconditions() {
    let (state, tree) = shared_tree();
    let params = state.params();
    let grid = params.grid();
    let k1 = kappa1(params);
    let mut all_ok = true;
    let mut covers = 0usize;
    let mut notes = Vec::new();
    for (layer, nodes) in tree.layers.iter().enumerate().take(tree.layers.len() - 1) {
        let g = &tree.thresholds[layer];
        for node in nodes {
            let interior = interior_subcubes(state, &node.cube, node.stage).unwrap();
            let cover =
                t_gi_cover(state, &node.cube, node.stage, g, &interior.cubes).unwrap();
            covers += 1;
            let (ilo, ihi) = grid.bounds(&node.cube);
            // pairwise disjointness: strict separation of the fat balls
            for (i, a) in cover.kept.iter().enumerate() {
                for b in cover.kept.iter().skip(i + 1) {
                    let dist = sup_dist(&a.center.coords(), &b.center.coords()).unwrap();
                    if cmp_sum_to_rational(&a.fat, &b.fat, &dist).unwrap() != Ordering::Less {
                        all_ok = false;
                        notes.push(format!("layer {layer}: overlapping kept pair"));
                    }
                }
            }
            // containment in the node cube
            for ball in &cover.kept {
                let c = ball.center.coords();
                for ax in 0..params.d {
                    let margin = (&c[ax] - &ilo[ax]).min(&ihi[ax] - &c[ax]);
                    if ball.fat.cmp_rational(&margin).unwrap() == Ordering::Greater {
                        all_ok = false;
                        notes.push(format!("layer {layer}: kept ball leaves its cube"));
                    }
                }
                // denominators at or above the layer threshold
                if &ball.center.denominator < g {
                    all_ok = false;
                    notes.push(format!("layer {layer}: denominator below threshold"));
                }
            }
            // measure fraction
            let total: BigRational =
                cover.kept.iter().map(|b| b.fat_volume.clone()).sum();
            if total < &k1 * grid.volume(node.cube.level) {
                all_ok = false;
                notes.push(format!("layer {layer}: cover below kappa_1 fraction"));
            }
            // every rejected candidate meets the 5-blowup of some kept ball
            for r in &cover.rejected {
                let mut met = false;
                for k in &cover.kept {
                    let dist =
                        sup_dist(&r.center.coords(), &k.center.coords()).unwrap();
                    let blown = k.fat.scale(&BigRational::from(BigInt::from(5))).unwrap();
                    if cmp_sum_to_rational(&blown, &r.fat, &dist).unwrap() != Ordering::Less {
                        met = true;
                        break;
                    }
                }
                if !met {
                    all_ok = false;
                    notes.push(format!("layer {layer}: rejected ball misses all 5-blowups"));
                }
            }
        }
    }
    notes.insert(0, format!("{covers} covers re-derived and checked"));
    verdict(5, all_ok, &notes.join("; "));
}

#[test]
fn criterion_06_mass_distribution() {
    let (_, tree) = shared_tree();
    let mut all_ok = true;
    let mut notes = Vec::new();
    for (layer, nodes) in tree.layers.iter().enumerate() {
        let total: BigRational = nodes.iter().map(|n| n.mass.clone()).sum();
        if !total.is_one() {
            all_ok = false;
        }
        notes.push(format!("layer {layer}: mass {}", format_rational(&total)));
    }
    let report = check_holder(tree, 500, SEED).unwrap();
    let nodes_ok = report.node_violations.is_empty();
    let samples_ok = report.sample_violations.is_empty();
    notes.push(format!(
        "node bound: {}/{} ok; sampled balls: {}/{} ok",
        report.node_checks - report.node_violations.len(),
        report.node_checks,
        report.sample_checks - report.sample_violations.len(),
        report.sample_checks
    ));
    if !report.warnings.is_empty() {
        notes.push(format!("warnings: {}", report.warnings.join(" | ")));
    }
    all_ok &= nodes_ok && samples_ok;
    verdict(6, all_ok, &notes.join("; "));
}

#[test]
fn criterion_07_membership_pattern() {
    let (state, tree) = shared_tree();
    let start = Instant::now();
    let params = state.params();
    let grid = params.grid();
    let c_low = params.dangerous_coeff();
    let q_cap = BigUint::from(10_000u32);
    let deepest = tree.layers.len() - 1;
    let mut confirmed = 0usize;
    let total = tree.layers[deepest].len();
    for node in &tree.layers[deepest] {
        let (lo, hi) = grid.bounds(&node.cube);
        let center: Vec<BigRational> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (l + h) / BigRational::from(BigInt::from(2)))
            .collect();
        let v = check_membership_band(params, &center, &c_low, &q_cap, &BigUint::one()).unwrap();
        if v.verdict == Verdict::ConfirmedPattern && v.witnesses.len() >= 3 {
            confirmed += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let all_ok = confirmed == total && elapsed < 120.0;
    verdict(
        7,
        all_ok,
        &format!("{confirmed}/{total} deepest centers confirmed at qcap 10000; {elapsed:.1}s"),
    );
}

#[test]
fn criterion_08_dimension_diagnostic() {
    let (_, tree) = shared_tree();
    let grid = tree.params.grid();
    let deepest = tree.layers.len() - 1;
    let points: Vec<Vec<BigRational>> = tree.layers[deepest]
        .iter()
        .map(|node| {
            let (lo, hi) = grid.bounds(&node.cube);
            lo.iter()
                .zip(&hi)
                .map(|(l, h)| (l + h) / BigRational::from(BigInt::from(2)))
                .collect()
        })
        .collect();
    let scales: Vec<BigRational> = (4..=12)
        .map(|k| BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)))
        .collect();
    let series = box_count(&points, &scales).unwrap();
    let s = 2.0 / 3.0;
    let slope_ok = (series.slope - s).abs() <= 0.25;
    let mut notes = vec![format!("slope {:.4} vs s=2/3 +- 0.25: {slope_ok}", series.slope)];

    let report = check_holder(&tree, 500, SEED).unwrap();
    let cert_ok = match dimension_certificate(&tree, &report) {
        Ok(cert) => {
            let want = BigRational::new(BigInt::from(17), BigInt::from(30));
            let ok = cert.lower_bound == want;
            notes.push(format!("certificate {}", format_rational(&cert.lower_bound)));
            ok
        }
        Err(e) => {
            notes.push(format!("certificate refused: {e}"));
            false
        }
    };
    verdict(8, slope_ok && cert_ok, &notes.join("; "));
}

#[test]
fn criterion_09_d2_smoke() {
    let start = Instant::now();
    let params = params_d2();
    let state = PruningState::new(params.clone()).unwrap();
    let mut all_ok = true;
    let mut notes = Vec::new();

    // schedule values by direct evaluation
    let l1 = params.prune_level(1);
    let l2 = params.prune_level(2);
    all_ok &= l1 == 5 && l2 == 6;
    notes.push(format!("l(1)={l1} l(2)={l2}"));

    // lazy stage-1 membership on a handful of cubes, no enumeration of the
    // ~4e9 level-5 family
    let corner = GridCube { level: l1, index: vec![BigUint::zero(), BigUint::zero()] };
    let inner = GridCube {
        level: l1,
        index: vec![BigUint::from(12_345u32), BigUint::from(54_321u32)],
    };
    let corner_removed = !state.survives(&corner, 1).unwrap();
    let inner_survives = state.survives(&inner, 1).unwrap();
    all_ok &= corner_removed && inner_survives;
    notes.push(format!(
        "lazy stage 1: corner removed={corner_removed}, interior survives={inner_survives}"
    ));

    let rep = state.check_dangerous_avoidance(1, &BigUint::from(3u32)).unwrap();
    all_ok &= rep.violations.is_empty();
    notes.push(format!(
        "avoidance q <= 3: {} rationals, {} violations",
        rep.rationals_checked,
        rep.violations.len()
    ));

    let (survive_memo, _, _) = state.memo_sizes();
    all_ok &= survive_memo < 100_000;
    notes.push(format!("{survive_memo} lazy memo entries"));

    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 600.0;
    verdict(9, all_ok, &format!("{}; {elapsed:.1}s", notes.join("; ")));
}

#[test]
fn criterion_10_determinism() {
    let dir = std::env::temp_dir().join("badapprox-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let mut all_ok = true;
    let mut notes = Vec::new();

    // checkpoints: identical query sequences on fresh states
    let mut cp_paths = Vec::new();
    for run in 0..2 {
        let state = PruningState::new(params_d1()).unwrap();
        state.surviving_cubes(2).unwrap();
        let path = dir.join(format!("cp-{run}.json"));
        Checkpoint::from_state(&state, 2).save(&path).unwrap();
        cp_paths.push(path);
    }
    let cp_same = std::fs::read(&cp_paths[0]).unwrap() == std::fs::read(&cp_paths[1]).unwrap();
    all_ok &= cp_same;
    notes.push(format!("checkpoints byte-identical: {cp_same}"));

    // trees and reports: full rebuild from scratch
    let mut tree_paths = Vec::new();
    let mut report_paths = Vec::new();
    for run in 0..2 {
        let state = PruningState::new(params_d1()).unwrap();
        let tree = build_tree(&state, &seed_ball(), 3, &epsilon()).unwrap();
        let tree_path = dir.join(format!("tree-{run}.json"));
        TreeFile::new(tree.clone()).save(&tree_path).unwrap();
        tree_paths.push(tree_path);

        let holder = check_holder(&tree, 500, SEED).unwrap();
        let mut bundle = ReportBundle::new(vec![
            "command=acceptance".into(),
            format!("rng_seed={SEED}"),
        ]);
        bundle.record(
            "holder-nodes",
            holder.node_violations.is_empty(),
            format!("{} checked", holder.node_checks),
        );
        bundle.record(
            "holder-samples",
            holder.sample_violations.is_empty(),
            format!("{} checked", holder.sample_checks),
        );
        let report_path = dir.join(format!("report-{run}.json"));
        bundle.save(&report_path).unwrap();
        report_paths.push(report_path);
    }
    let tree_same =
        std::fs::read(&tree_paths[0]).unwrap() == std::fs::read(&tree_paths[1]).unwrap();
    let report_same =
        std::fs::read(&report_paths[0]).unwrap() == std::fs::read(&report_paths[1]).unwrap();
    all_ok &= tree_same && report_same;
    notes.push(format!("trees byte-identical: {tree_same}"));
    notes.push(format!("reports byte-identical: {report_same}"));
    verdict(10, all_ok, &notes.join("; "));
}
