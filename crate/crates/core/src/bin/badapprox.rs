//! Command-line front end: build pruned-state checkpoints, run verification
//! suites, grow mass-distribution trees, and emit box-counting diagnostics.
//!
//! All output files are deterministic for a fixed config and tool version;
//! wall-clock timing goes to stderr only. Exit status: 0 all checks pass,
//! 1 any check fails or an error occurs, 2 usage error.

use badapprox::checkpoint::{Checkpoint, TreeFile};
use badapprox::error::Error;
use badapprox::params::ConstructionParams;
use badapprox::pruning::{PruningState, SWEEP_BUDGET};
use badapprox::rational::{format_rational, parse_rational};
use badapprox::report::ReportBundle;
use badapprox::transfer::{build_tree, check_holder, dimension_certificate, SeedBall};
use badapprox::verify::{
    box_count, check_membership_band, check_q_approx, compliant_side, simplex_property_suite,
    Verdict,
};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "badapprox", version, about = "Exact-arithmetic Cantor-type constructions for badly approximable points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve the pruning cascade and write a checkpoint file.
    Build(BuildArgs),
    /// Run verification suites against a checkpoint.
    Verify(VerifyArgs),
    /// Grow a mass-distribution tree inside a seed ball and certify it.
    Subset(SubsetArgs),
    /// Box-counting dimension diagnostic over a tree's deepest centers.
    Dimension(DimensionArgs),
}

/// Construction parameters, overridable over a JSON config file.
#[derive(Args, Clone)]
struct ParamArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Approximation exponent as "a/b".
    #[arg(long)]
    tau: Option<String>,
    /// Per-axis coarse subdivision parameter (the grid base is M^d).
    #[arg(long = "M")]
    m: Option<u32>,
    /// Grid density parameter (t^d must exceed d!).
    #[arg(long)]
    t: Option<u32>,
    /// Schedule offset (at least 4).
    #[arg(long)]
    u: Option<u32>,
    /// Deepest pruning stage the run may resolve.
    #[arg(long)]
    max_stage: Option<u32>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of pruning stages to resolve eagerly (when affordable).
    #[arg(long)]
    depth: Option<u32>,
    /// Output checkpoint path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Checkpoint to verify; omitted means a fresh lazy state.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Comma-separated suites: simplex,avoidance,measure,retention,leading,qapprox
    /// (default: all).
    #[arg(long)]
    suite: Option<String>,
    /// Stage the suites address.
    #[arg(long)]
    depth: Option<u32>,
    /// Denominator cap for avoidance / simplex / membership scans.
    #[arg(long)]
    qcap: Option<String>,
    /// Sample count for randomized suites.
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed (mandatory for randomized suites; default 0).
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Report output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SubsetArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Tree depth (number of layers below the root).
    #[arg(long)]
    depth: Option<u32>,
    /// Dimension-drop parameter as "a/b", in (0, s).
    #[arg(long)]
    epsilon: Option<String>,
    /// Seed ball "c1,...,cd;r" in rational coordinates.
    #[arg(long)]
    seed_ball: Option<String>,
    /// Sampled-ball count for the Hoelder check.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Denominator cap for the deepest-layer membership scan.
    #[arg(long)]
    qcap: Option<String>,
    /// Output stem: writes <out>.tree.json, <out>.centers.csv, <out>.report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DimensionArgs {
    /// Tree file produced by `subset`.
    #[arg(long)]
    tree: PathBuf,
    /// Scale spec "2^-a..2^-b" (dyadic, inclusive).
    #[arg(long, default_value = "2^-4..2^-12")]
    scales: String,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Optional fields a JSON config file may set; flags take precedence.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<usize>,
    tau: Option<String>,
    #[serde(rename = "M")]
    m: Option<u32>,
    t: Option<u32>,
    u: Option<u32>,
    max_stage: Option<u32>,
    depth: Option<u32>,
    qcap: Option<String>,
    epsilon: Option<String>,
    seed_ball: Option<String>,
    samples: Option<usize>,
    rng_seed: Option<u64>,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, Error> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => badapprox::checkpoint::load_json(p),
    }
}

fn parse_tau(s: &str) -> Result<(u32, u32), Error> {
    let r = parse_rational(s).map_err(Error::InvalidParams)?;
    let num = r.numer().to_u32();
    let den = r.denom().to_u32();
    match (num, den) {
        (Some(n), Some(d)) if d > 0 => Ok((n, d)),
        _ => Err(Error::InvalidParams(format!("tau {s:?} out of range"))),
    }
}

fn resolve_params(args: &ParamArgs, file: &FileConfig) -> Result<ConstructionParams, Error> {
    let (tau_num, tau_den) = match args.tau.as_deref().or(file.tau.as_deref()) {
        Some(s) => parse_tau(s)?,
        None => (2, 1),
    };
    let params = ConstructionParams {
        d: args.d.or(file.d).unwrap_or(1),
        tau_num,
        tau_den,
        m: args.m.or(file.m).unwrap_or(2),
        t: args.t.or(file.t).unwrap_or(2),
        u: args.u.or(file.u).unwrap_or(4),
        max_stage: args.max_stage.or(file.max_stage).unwrap_or(48),
    };
    params.validate()?;
    Ok(params)
}

fn parse_seed_ball(s: &str, d: usize) -> Result<SeedBall, Error> {
    let (centers, radius) = s
        .split_once(';')
        .ok_or_else(|| Error::InvalidParams("seed ball must be \"c1,...,cd;r\"".into()))?;
    let center: Vec<BigRational> = centers
        .split(',')
        .map(|c| parse_rational(c.trim()).map_err(Error::InvalidParams))
        .collect::<Result<_, _>>()?;
    if center.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: center.len() });
    }
    let radius = parse_rational(radius.trim()).map_err(Error::InvalidParams)?;
    if !radius.is_positive() {
        return Err(Error::InvalidParams("seed radius must be positive".into()));
    }
    for c in &center {
        if (c - &radius) < BigRational::zero() || (c + &radius) > BigRational::one() {
            return Err(Error::InvalidParams(
                "seed ball must lie inside the unit cube".into(),
            ));
        }
    }
    Ok(SeedBall { center, radius })
}

/// Parse "2^-a..2^-b" into strictly decreasing dyadic scales.
fn parse_scales(spec: &str) -> Result<Vec<BigRational>, Error> {
    let bad = || Error::InvalidParams(format!("scale spec {spec:?}; expected \"2^-a..2^-b\""));
    let (lo, hi) = spec.split_once("..").ok_or_else(bad)?;
    let exp_of = |s: &str| -> Result<u32, Error> {
        s.trim()
            .strip_prefix("2^-")
            .and_then(|e| e.parse::<u32>().ok())
            .ok_or_else(bad)
    };
    let (a, b) = (exp_of(lo)?, exp_of(hi)?);
    if b <= a {
        return Err(bad());
    }
    Ok((a..=b)
        .map(|k| BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)))
        .collect())
}

fn config_echo(params: &ConstructionParams, extra: &[(&str, String)]) -> Vec<String> {
    let mut cfg = vec![
        format!("d={}", params.d),
        format!("tau={}/{}", params.tau_num, params.tau_den),
        format!("M={}", params.m),
        format!("t={}", params.t),
        format!("u={}", params.u),
        format!("max_stage={}", params.max_stage),
    ];
    cfg.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
    cfg
}

fn load_state(
    params: &ConstructionParams,
    checkpoint: &Option<PathBuf>,
) -> Result<PruningState, Error> {
    match checkpoint {
        None => PruningState::new(params.clone()),
        Some(p) => {
            let cp = Checkpoint::load(p)?;
            if &cp.params != params {
                return Err(Error::InvalidParams(format!(
                    "checkpoint {} was built with different parameters",
                    p.display()
                )));
            }
            cp.restore()
        }
    }
}

fn cmd_build(args: &BuildArgs) -> Result<i32, Error> {
    let file = load_file_config(&args.params.config)?;
    let params = resolve_params(&args.params, &file)?;
    let depth = args.depth.or(file.depth).unwrap_or(3).min(params.max_stage);
    let state = PruningState::new(params.clone())?;
    let grid = params.grid();
    for stage in 1..=depth {
        let count = grid.count(params.prune_level(stage));
        if count <= BigUint::from(SWEEP_BUDGET) {
            let survivors = state.surviving_cubes(stage)?;
            eprintln!("stage {stage}: {} of {count} cubes survive", survivors.len());
        } else {
            eprintln!("stage {stage}: {count} cubes, beyond eager budget; left lazy");
        }
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("checkpoint.json"));
    Checkpoint::from_state(&state, depth).save(&out)?;
    eprintln!("wrote {}", out.display());
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, Error> {
    let file = load_file_config(&args.params.config)?;
    let params = resolve_params(&args.params, &file)?;
    let depth = args.depth.or(file.depth).unwrap_or(3).min(params.max_stage);
    let qcap_str = args.qcap.clone().or(file.qcap.clone()).unwrap_or_else(|| "7".into());
    let qcap: BigUint = qcap_str
        .parse()
        .map_err(|_| Error::InvalidParams(format!("qcap {qcap_str:?} is not an integer")))?;
    let samples = args.samples.or(file.samples).unwrap_or(100);
    let seed = args.rng_seed.or(file.rng_seed).unwrap_or(0);
    let suites: Vec<String> = args
        .suite
        .as_deref()
        .unwrap_or("simplex,avoidance,measure,retention,leading,qapprox")
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();

    let state = load_state(&params, &args.checkpoint)?;
    let mut bundle = ReportBundle::new(config_echo(
        &params,
        &[
            ("command", "verify".into()),
            ("depth", depth.to_string()),
            ("qcap", qcap.to_string()),
            ("samples", samples.to_string()),
            ("rng_seed", seed.to_string()),
            ("suite", suites.join(",")),
        ],
    ));
    if let Some(cp) = &args.checkpoint {
        bundle.attach_artifact(cp)?;
    }

    for suite in &suites {
        match suite.as_str() {
            "simplex" => {
                let q_max = qcap.to_u32().unwrap_or(8).min(8).max(2);
                let side = compliant_side(params.d, q_max);
                let rep = simplex_property_suite(params.d, q_max, samples, seed, &side)?;
                bundle.record(
                    "simplex",
                    rep.violations == 0,
                    format!(
                        "{} boxes of side {}, {} violations",
                        rep.trials,
                        format_rational(&side),
                        rep.violations
                    ),
                );
            }
            "avoidance" => {
                let band_hi = state.schedule(depth)?.band_hi;
                if qcap >= band_hi {
                    return Err(Error::InvalidParams(format!(
                        "qcap must be < N^n = {band_hi} for stage {depth}"
                    )));
                }
                let rep = state.check_dangerous_avoidance(depth, &qcap)?;
                bundle.record(
                    "avoidance",
                    rep.violations.is_empty(),
                    format!(
                        "stage {}, {} rationals checked, {} violations",
                        rep.stage,
                        rep.rationals_checked,
                        rep.violations.len()
                    ),
                );
            }
            "measure" => {
                for stage in 1..=depth {
                    let certified = state.surviving_measure_lower_bound(stage)?;
                    let majorant = params.removed_measure_majorant(stage);
                    let floor = BigRational::one() - majorant;
                    let cheap_ok = certified >= floor;
                    let count = params.grid().count(params.prune_level(stage));
                    if count <= BigUint::from(SWEEP_BUDGET) {
                        let exact = state.surviving_measure_exact(stage)?;
                        bundle.record(
                            &format!("measure-stage-{stage}"),
                            exact >= certified && cheap_ok,
                            format!(
                                "exact={} certified={} floor={}",
                                format_rational(&exact),
                                format_rational(&certified),
                                format_rational(&floor)
                            ),
                        );
                    } else {
                        bundle.record(
                            &format!("measure-stage-{stage}"),
                            cheap_ok,
                            format!(
                                "certified={} floor={} (exact sweep beyond budget)",
                                format_rational(&certified),
                                format_rational(&floor)
                            ),
                        );
                    }
                }
            }
            "retention" => {
                let to = depth.max(2).min(params.max_stage);
                let rep = state.check_cube_retention(to - 1, to)?;
                bundle.record(
                    "retention",
                    rep.failures.is_empty(),
                    format!(
                        "stages {}->{}: {} cubes, min ratio {}, bound {}",
                        rep.from_stage,
                        rep.to_stage,
                        rep.cubes_checked,
                        format_rational(&rep.min_ratio),
                        format_rational(&rep.bound)
                    ),
                );
            }
            "leading" => {
                let mut counts = Vec::new();
                for stage in 1..=depth {
                    counts.push(format!("stage {}: {}", stage, state.leading_rationals(stage)?.len()));
                }
                bundle.record("leading", true, counts.join("; "));
            }
            "qapprox" => {
                let rep = check_q_approx(&state, depth, samples, seed)?;
                bundle.record(
                    "qapprox",
                    rep.passes == rep.samples,
                    format!("{} of {} sampled centers witnessed", rep.passes, rep.samples),
                );
            }
            other => {
                return Err(Error::InvalidParams(format!("unknown suite {other:?}")));
            }
        }
    }

    finish(&bundle, &args.out)
}

fn cmd_subset(args: &SubsetArgs) -> Result<i32, Error> {
    let file = load_file_config(&args.params.config)?;
    let params = resolve_params(&args.params, &file)?;
    let depth = args.depth.or(file.depth).unwrap_or(3);
    let epsilon = parse_rational(
        args.epsilon.as_deref().or(file.epsilon.as_deref()).unwrap_or("1/10"),
    )
    .map_err(Error::InvalidParams)?;
    let seed_spec = args
        .seed_ball
        .clone()
        .or(file.seed_ball.clone())
        .unwrap_or_else(|| "1/2;1/4".into());
    let seed_ball = parse_seed_ball(&seed_spec, params.d)?;
    let samples = args.samples.or(file.samples).unwrap_or(500);
    let rng_seed = args.rng_seed.or(file.rng_seed).unwrap_or(0);
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("subset"));

    let state = load_state(&params, &args.checkpoint)?;
    let tree = build_tree(&state, &seed_ball, depth, &epsilon)?;
    let report = check_holder(&tree, samples, rng_seed)?;

    let tree_path = out.with_extension("tree.json");
    TreeFile::new(tree.clone()).save(&tree_path)?;
    let csv_path = out.with_extension("centers.csv");
    write_centers_csv(&csv_path, &tree)?;

    let mut bundle = ReportBundle::new(config_echo(
        &params,
        &[
            ("command", "subset".into()),
            ("depth", depth.to_string()),
            ("epsilon", format_rational(&epsilon)),
            ("seed_ball", seed_spec.clone()),
            ("samples", samples.to_string()),
            ("rng_seed", rng_seed.to_string()),
        ],
    ));
    bundle.attach_artifact(&tree_path)?;
    bundle.attach_artifact(&csv_path)?;
    for w in &report.warnings {
        bundle.skip("warning", w.clone());
    }
    bundle.record(
        "holder-nodes",
        report.node_violations.is_empty(),
        format!("{} checked, {} violations", report.node_checks, report.node_violations.len()),
    );
    bundle.record(
        "holder-samples",
        report.sample_violations.is_empty(),
        format!("{} checked, {} violations", report.sample_checks, report.sample_violations.len()),
    );
    // membership pattern of every deepest-layer center, truncated at qcap
    let qcap_str = args.qcap.clone().or(file.qcap.clone()).unwrap_or_else(|| "10000".into());
    let qcap: BigUint = qcap_str
        .parse()
        .map_err(|_| Error::InvalidParams(format!("qcap {qcap_str:?} is not an integer")))?;
    let grid = params.grid();
    let c_low = params.dangerous_coeff();
    let deepest = tree.layers.len() - 1;
    let mut confirmed = 0usize;
    let mut unconfirmed = Vec::new();
    for node in &tree.layers[deepest] {
        let (lo, hi) = grid.bounds(&node.cube);
        let center: Vec<BigRational> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (l + h) / BigRational::from(BigInt::from(2)))
            .collect();
        let v = check_membership_band(&params, &center, &c_low, &qcap, &BigUint::one())?;
        if v.verdict == Verdict::ConfirmedPattern {
            confirmed += 1;
        } else {
            unconfirmed.push(v.point);
        }
    }
    bundle.record(
        "membership",
        unconfirmed.is_empty(),
        format!(
            "{} of {} deepest centers confirmed at qcap {}",
            confirmed,
            tree.layers[deepest].len(),
            qcap
        ),
    );
    match dimension_certificate(&tree, &report) {
        Ok(cert) => {
            bundle.record(
                "certificate",
                true,
                format!(
                    "dimension lower bound s - epsilon = {}",
                    format_rational(&cert.lower_bound)
                ),
            );
            println!("certificate: {}", format_rational(&cert.lower_bound));
        }
        Err(e) => bundle.record("certificate", false, e.to_string()),
    }

    finish(&bundle, &Some(out.with_extension("report.json")))
}

fn write_centers_csv(path: &Path, tree: &badapprox::transfer::CantorTree) -> Result<(), Error> {
    let grid = tree.params.grid();
    let mut rows = String::from("layer,node,center,mass\n");
    let deepest = tree.layers.len() - 1;
    for (i, node) in tree.layers[deepest].iter().enumerate() {
        let (lo, hi) = grid.bounds(&node.cube);
        let center: Vec<String> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| format_rational(&((l + h) / BigRational::from(BigInt::from(2)))))
            .collect();
        rows.push_str(&format!(
            "{deepest},{i},\"{}\",{}\n",
            center.join(","),
            format_rational(&node.mass)
        ));
    }
    std::fs::write(path, rows)?;
    Ok(())
}

fn cmd_dimension(args: &DimensionArgs) -> Result<i32, Error> {
    let tf = TreeFile::load(&args.tree)?;
    let tree = tf.tree;
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
    let scales = parse_scales(&args.scales)?;
    let series = box_count(&points, &scales)?;

    let mut csv = String::from("scale,count\n");
    for (s, c) in series.scales.iter().zip(&series.counts) {
        csv.push_str(&format!("{s},{c}\n"));
    }
    if let Some(out) = &args.out {
        std::fs::write(out, &csv)?;
        eprintln!("wrote {}", out.display());
    } else {
        print!("{csv}");
    }
    let s = tree.params.dim_target();
    println!(
        "slope={:.4} theoretical_s={} degenerate={}",
        series.slope,
        format_rational(&s),
        series.degenerate
    );
    Ok(0)
}

fn finish(bundle: &ReportBundle, out: &Option<PathBuf>) -> Result<i32, Error> {
    if let Some(path) = out {
        bundle.save(path)?;
        eprintln!("wrote {}", path.display());
    } else {
        println!("{}", serde_json::to_string_pretty(bundle).map_err(Error::Json)?);
    }
    for c in &bundle.checks {
        eprintln!("{:?} {} - {}", c.status, c.name, c.detail);
    }
    Ok(if bundle.has_failure() { 1 } else { 0 })
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Subset(a) => cmd_subset(a),
        Command::Dimension(a) => cmd_dimension(a),
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
