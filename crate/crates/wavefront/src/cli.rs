//! Experiment driver behind the `wavefront` binary.
//!
//! Each subcommand reads one JSON config, writes CSV/JSON artifacts into
//! `--out`, and prints a one-line JSON summary. Exit codes: 0 success,
//! 2 schema or assertion failure, 3 numerical failure; failures also print a
//! JSON diagnostic on stderr and into `diagnostics.json`.

use crate::datagen::{decay_experiment, generate_palpha, PAlphaSpec};
use crate::error::Error;
use crate::fronttrack::{evolve, init_from_steps, write_profile_csv, EngineOptions, Front, Profile, SolverKind, StepData};
use crate::glimm::{holder_scaling, rough_bound_check, total_variation};
use crate::hypsys::{HyperbolicSystem, PSystemExp};
use crate::io::{to_json_string, write_json, write_json_lines, write_table};
use crate::oracle::oracle_compare;
use crate::sensitivity::{finite_difference_check, propagate, ShiftSeed};
use crate::temple::{
    compare_interactions, tangent_temple, verify_temple_semigroup, CompareSpec, SemigroupSpec, TangencyData, TempleGrid,
    TempleSystem,
};
use crate::wavecurves::solve_riemann;
use crate::RiemannPoint;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "wavefront", version, about = "Front tracking experiments for 2x2 conservation laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one Riemann problem and dump the fan.
    Riemann(ConfigArg),
    /// Evolve initial data and write snapshots and the interaction log.
    Simulate(ConfigArg),
    /// Propagate a shift seed and check it against displaced re-runs.
    Shift(ConfigArg),
    /// Measure L(τ), the rough bound and the Hölder fits.
    Lipschitz(ConfigArg),
    /// Tangent Temple construction, comparison and semigroup checks.
    Temple(ConfigArg),
    /// Generate rough data, certify it and fit the decay of TV.
    Decay(ConfigArg),
    /// L¹ convergence of front tracking against a Godunov solver.
    OracleCompare(ConfigArg),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON config file.
    pub config: PathBuf,
}

/// How a run failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "message")]
pub enum Failure {
    Schema(String),
    Assertion(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) | Failure::Assertion(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Schema(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Outcome<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Assertion(what()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    PsystemExp { eps1: f64 },
    TempleBuiltin { half_width: f64 },
    TempleTangent { eps1: f64 },
}

impl SystemConfig {
    pub fn build(&self) -> crate::Result<Box<dyn HyperbolicSystem>> {
        Ok(match *self {
            SystemConfig::PsystemExp { eps1 } => Box::new(PSystemExp::new(eps1)),
            SystemConfig::TempleBuiltin { half_width } => Box::new(TempleSystem::builtin(half_width)?),
            SystemConfig::TempleTangent { eps1 } => Box::new(tangent_system(eps1, TempleGrid::default())?),
        })
    }
}

fn tangent_system(eps1: f64, grid: TempleGrid) -> crate::Result<TempleSystem> {
    let sys = PSystemExp::new(eps1);
    let d = sys.domain();
    tangent_temple(&sys, grid, (d.hi[0] - d.lo[0]) / (grid.n - 1) as f64)
}

/// Initial data. `csv` paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// `left = [w1, w2]`, `jumps = [[x, w1, w2], …]`.
    Steps { left: [f64; 2], jumps: Vec<[f64; 3]> },
    Csv { path: PathBuf },
    /// `count` uniformly spaced jumps on `[start, end]` to values in `[−amplitude, amplitude]²`,
    /// returning to the origin at `end`.
    Random { count: usize, amplitude: f64, start: f64, end: f64 },
    Palpha { spec: PAlphaSpec },
}

impl DataConfig {
    pub fn build(&self, base: &Path, seed: u64) -> crate::Result<StepData> {
        Ok(match self {
            DataConfig::Steps { left, jumps } => StepData {
                left: RiemannPoint::new(left[0], left[1]),
                jumps: jumps.iter().map(|j| (j[0], RiemannPoint::new(j[1], j[2]))).collect(),
            },
            DataConfig::Csv { path } => StepData::read_csv(base.join(path))?,
            DataConfig::Random { count, amplitude, start, end } => random_steps(seed, *count, *amplitude, (*start, *end)),
            DataConfig::Palpha { spec } => generate_palpha(&PAlphaSpec { seed, ..spec.clone() })?,
        })
    }
}

pub fn random_steps(seed: u64, count: usize, amplitude: f64, (a, b): (f64, f64)) -> StepData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    for k in 0..count {
        let x = a + (b - a) * k as f64 / count as f64;
        d.jumps.push((x, RiemannPoint::new(rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude))));
    }
    d.jumps.push((b, RiemannPoint::ORIGIN));
    d
}

fn default_seed() -> u64 {
    1
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannConfig {
    pub system: SystemConfig,
    pub w_minus: [f64; 2],
    pub w_plus: [f64; 2],
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub system: SystemConfig,
    pub data: DataConfig,
    pub epsilon: f64,
    pub t_end: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub interaction_cap: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub system: SystemConfig,
    pub data: DataConfig,
    pub epsilon: f64,
    pub t_end: f64,
    #[serde(default)]
    pub solver: SolverKind,
    /// Index of the seeded initial front.
    pub front: usize,
    pub xi0: f64,
    pub hs: Vec<f64>,
    pub sample_times: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Require a displacement slope in `[0.8, 1.2]` when topology is preserved.
    #[serde(default = "yes")]
    pub assert: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzConfig {
    pub system: SystemConfig,
    pub epsilon: f64,
    #[serde(default)]
    pub solver: SolverKind,
    pub alpha: f64,
    pub q: f64,
    pub levels: usize,
    pub runs: usize,
    pub count: usize,
    pub amplitude: f64,
    /// Uniform displacement of the second member of each pair, scaled by `2^{−run mod 4}`.
    pub perturbation: f64,
    pub delta0: f64,
    #[serde(default = "max_seeds")]
    pub max_seeds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Require `L(τ) ≤ (2L)^N` for every run and level.
    #[serde(default = "yes")]
    pub assert: bool,
}

fn max_seeds() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TempleConfig {
    pub eps1: f64,
    #[serde(default)]
    pub grid: Option<TempleGrid>,
    #[serde(default)]
    pub compare: CompareSpec,
    #[serde(default)]
    pub semigroup: SemigroupSpec,
    #[serde(default = "yes")]
    pub run_semigroup: bool,
    /// Require tangency and straight invariants to `1e−6`.
    #[serde(default = "yes")]
    pub assert: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub spec: PAlphaSpec,
    pub epsilon: f64,
    /// Geometric time grid from `10 ε` to 1.
    pub time_samples: usize,
    #[serde(default)]
    pub interval: Option<(f64, f64)>,
    #[serde(default = "heavy")]
    pub heavy_threshold: f64,
    /// Require a certified data set.
    #[serde(default = "yes")]
    pub assert: bool,
}

fn heavy() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub eps1: f64,
    pub data: DataConfig,
    pub t: f64,
    pub cfl: f64,
    /// `[ε, h]` pairs, coarse to fine.
    pub levels: Vec<[f64; 2]>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Require a monotone decrease of the L¹ distance.
    #[serde(default = "yes")]
    pub assert: bool,
}

fn load<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.jobs {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = std::fs::create_dir_all(&cli.out)
        .map_err(|e| Failure::Schema(format!("cannot create {}: {e}", cli.out.display())))
        .and_then(|_| dispatch(&cli));
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(f) => {
            let diag = serde_json::json!({ "status": "failed", "exit_code": f.exit_code(), "failure": f });
            let text = to_json_string(&diag).unwrap_or_else(|_| diag.to_string());
            eprintln!("{text}");
            let _ = std::fs::write(cli.out.join("diagnostics.json"), format!("{text}\n"));
            f.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome<String> {
    let out = cli.out.as_path();
    let summary = match &cli.command {
        Command::Riemann(a) => riemann(load(&a.config)?, out)?,
        Command::Simulate(a) => simulate(load(&a.config)?, &base_dir(&a.config), cli.seed, out)?,
        Command::Shift(a) => shift(load(&a.config)?, &base_dir(&a.config), cli.seed, out)?,
        Command::Lipschitz(a) => lipschitz(load(&a.config)?, cli.seed, out)?,
        Command::Temple(a) => temple(load(&a.config)?, out)?,
        Command::Decay(a) => decay(load(&a.config)?, cli.seed, out)?,
        Command::OracleCompare(a) => oracle(load(&a.config)?, &base_dir(&a.config), cli.seed, out)?,
    };
    Ok(serde_json::to_string(&summary).map_err(|e| Failure::Numerical(e.to_string()))?)
}

fn engine(epsilon: f64, solver: SolverKind, cap: Option<usize>) -> EngineOptions {
    let mut o = EngineOptions::new(epsilon);
    o.solver = solver;
    if let Some(c) = cap {
        o.interaction_cap = c;
    }
    o
}

pub fn riemann(cfg: RiemannConfig, out: &Path) -> Outcome<serde_json::Value> {
    let sys = cfg.system.build()?;
    let (wm, wp) = (RiemannPoint::new(cfg.w_minus[0], cfg.w_minus[1]), RiemannPoint::new(cfg.w_plus[0], cfg.w_plus[1]));
    let fan = solve_riemann(sys.as_ref(), wm, wp, cfg.epsilon)?;
    let residual = fan.reconstruction_residual(sys.as_ref(), wm, wp, cfg.epsilon)?;
    let fronts = fan
        .fronts
        .iter()
        .enumerate()
        .map(|(id, f)| Front {
            id,
            position: 0.0,
            family: f.family,
            kind: f.kind,
            strength: f.strength,
            speed: f.speed,
            left_w: f.left,
            right_w: f.right,
        })
        .collect();
    write_profile_csv(&Profile { leftmost_state: wm, fronts, time: 0.0 }, out.join("fan.csv"))?;
    write_json(out.join("fan.json"), &fan)?;
    check(residual <= 1e-9, || format!("reconstruction residual {residual:e} above 1e-9"))?;
    Ok(serde_json::json!({ "fronts": fan.fronts.len(), "s1": fan.s1, "s2": fan.s2, "residual": residual }))
}

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    fronts: usize,
    tv1: f64,
    tv2: f64,
    sup_norm: f64,
}

pub fn simulate(cfg: SimulateConfig, base: &Path, seed: Option<u64>, out: &Path) -> Outcome<serde_json::Value> {
    let sys = cfg.system.build()?;
    let opts = engine(cfg.epsilon, cfg.solver, cfg.interaction_cap);
    let data = cfg.data.build(base, seed.unwrap_or(cfg.seed))?.quantized(cfg.epsilon);
    let ev = evolve(sys.as_ref(), &init_from_steps(sys.as_ref(), &data, &opts)?, cfg.t_end, &opts)?;
    let mut times = cfg.snapshots.clone();
    times.push(cfg.t_end);
    let mut snaps = Vec::new();
    for (i, &t) in times.iter().enumerate().filter(|(_, &t)| t >= 0.0 && t <= cfg.t_end) {
        let p = ev.history.profile_at(t);
        write_profile_csv(&p, out.join(format!("snapshot_{i:03}.csv")))?;
        let v = total_variation(&p, f64::NEG_INFINITY, f64::INFINITY);
        snaps.push(Snapshot { t, fronts: p.fronts.len(), tv1: v.family[0], tv2: v.family[1], sup_norm: p.sup_norm() });
    }
    write_json_lines(out.join("interactions.jsonl"), &ev.history.interactions)?;
    ev.profile.check_invariants(sys.as_ref(), cfg.epsilon, 1e-9).map_err(|e| Failure::Assertion(e.to_string()))?;
    let summary = serde_json::json!({
        "system": sys.name(),
        "interactions": ev.history.interactions.len(),
        "fronts_initial": ev.initial.fronts.len(),
        "fronts_final": ev.profile.fronts.len(),
        "snapshots": snaps,
    });
    write_json(out.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn shift(cfg: ShiftConfig, base: &Path, seed: Option<u64>, out: &Path) -> Outcome<serde_json::Value> {
    let sys = cfg.system.build()?;
    let opts = engine(cfg.epsilon, cfg.solver, None);
    let data = cfg.data.build(base, seed.unwrap_or(cfg.seed))?.quantized(cfg.epsilon);
    let p0 = init_from_steps(sys.as_ref(), &data, &opts)?;
    let ev = evolve(sys.as_ref(), &p0, cfg.t_end, &opts)?;
    let ledger = propagate(&ev.history, ShiftSeed { front: cfg.front, xi0: cfg.xi0, tau: 0.0 }, &cfg.sample_times)?;
    ledger.write_csv(out.join("ledger.csv"))?;
    ledger.write_interactions(out.join("shift_interactions.jsonl"))?;
    let fd = finite_difference_check(sys.as_ref(), &ev.initial, &ev.history, cfg.front, cfg.xi0, &cfg.hs, &cfg.sample_times, &opts)?;
    write_json(out.join("fd.json"), &fd)?;
    if cfg.assert && !fd.topology_changed {
        let s = fd.displacement_slope;
        check((0.8..=1.2).contains(&s), || format!("displacement slope {s} outside [0.8, 1.2]"))?;
    }
    Ok(serde_json::json!({
        "v_xi_initial": ledger.v_xi_initial,
        "v_xi_max": ledger.v_xi_max,
        "shifted_interactions": fd.shifted_interactions,
        "displacement_slope": fd.displacement_slope,
        "topology_changed": fd.topology_changed,
    }))
}

pub fn lipschitz(cfg: LipschitzConfig, seed: Option<u64>, out: &Path) -> Outcome<serde_json::Value> {
    let sys = cfg.system.build()?;
    let opts = engine(cfg.epsilon, cfg.solver, None);
    let seed = seed.unwrap_or(cfg.seed);
    let pairs: Vec<(StepData, StepData)> = (0..cfg.runs)
        .map(|r| {
            let d = random_steps(seed.wrapping_add(r as u64), cfg.count, cfg.amplitude, (0.0, 1.0)).quantized(cfg.epsilon);
            let dx = cfg.perturbation * 0.5f64.powi((r % 4) as i32);
            let e = d.with_shifts(&vec![dx; d.jumps.len()]);
            (d, e)
        })
        .collect();
    let taus: Vec<f64> = (1..=cfg.levels).map(|k| cfg.q.powi(-(k as i32))).collect();
    let checks = pairs
        .par_iter()
        .map(|(d, _)| {
            let ev = evolve(sys.as_ref(), &init_from_steps(sys.as_ref(), d, &opts)?, 1.0, &opts)?;
            taus.iter().map(|&tau| rough_bound_check(&ev.history, tau, cfg.delta0, cfg.max_seeds)).collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let rows = checks
        .iter()
        .enumerate()
        .flat_map(|(r, cs)| cs.iter().map(move |c| vec![r as f64, c.tau, c.c, c.n as f64, c.l_local, c.bound, c.l_tau]));
    write_table(out.join("l_tau.csv"), &["run", "tau", "c", "n", "l_local", "bound", "l_tau"], rows)?;
    let holder = holder_scaling(sys.as_ref(), &pairs, cfg.alpha, cfg.q, cfg.levels, &opts)?;
    write_json(out.join("holder.json"), &holder)?;
    let dominated = checks.iter().filter(|cs| cs.iter().all(|c| c.dominated)).count();
    if cfg.assert {
        check(dominated == cfg.runs, || format!("rough bound dominated in {dominated}/{} runs", cfg.runs))?;
    }
    Ok(serde_json::json!({
        "runs": cfg.runs,
        "dominated": dominated,
        "beta_hat": holder.beta_hat,
        "gamma_hat": holder.gamma_hat,
        "gamma_predicted": holder.gamma_predicted,
    }))
}

pub fn temple(cfg: TempleConfig, out: &Path) -> Outcome<serde_json::Value> {
    let sys = PSystemExp::new(cfg.eps1);
    let t = tangent_system(cfg.eps1, cfg.grid.unwrap_or_default())?;
    t.write_csv(out.join("temple_grid.csv"))?;
    let (orig, tang) = (TangencyData::of(&sys), TangencyData::of(&t));
    let gap = orig.max_gap(&tang);
    let straight = t.straightness_defect(16, t.spacing());
    let parallel = t.parallelism_defect();
    let tangency = serde_json::json!({
        "original": orig,
        "tangent": tang,
        "tangency_gap": gap,
        "straightness_defect": straight,
        "parallelism_defect": parallel,
        "picard_residual": t.picard_residual(),
        "params": t.params(),
    });
    write_json(out.join("tangency.json"), &tangency)?;
    let cmp = compare_interactions(&sys, &t, &cfg.compare)?;
    write_json(out.join("compare.json"), &cmp)?;
    let semi = if cfg.run_semigroup {
        let r = verify_temple_semigroup(&t, &cfg.semigroup)?;
        write_json(out.join("semigroup.json"), &r)?;
        Some(r)
    } else {
        None
    };
    if cfg.assert {
        check(gap <= 1e-6, || format!("tangency gap {gap:e} above 1e-6"))?;
        check(straight.max(parallel) <= 1e-6, || format!("invariant defects {straight:e}, {parallel:e} above 1e-6"))?;
    }
    Ok(serde_json::json!({
        "tangency_gap": gap,
        "strength_diff_slope": cmp.strength_diff_slope,
        "strength_same_slope": cmp.strength_same_slope,
        "gap_slope": semi.as_ref().map(|s| s.gap_slope),
        "l_star_spread": semi.as_ref().map(|s| s.l_star_spread),
    }))
}

pub fn decay(cfg: DecayConfig, seed: Option<u64>, out: &Path) -> Outcome<serde_json::Value> {
    let spec = PAlphaSpec { seed: seed.unwrap_or(cfg.spec.seed), ..cfg.spec.clone() };
    let sys = PSystemExp::new(spec.eps1);
    let opts = EngineOptions::new(cfg.epsilon);
    let t0 = 10.0 * cfg.epsilon;
    if !(t0 < 1.0) || cfg.time_samples < 2 {
        return Err(Failure::Schema("need 10·epsilon < 1 and at least two time samples".into()));
    }
    let n = cfg.time_samples - 1;
    let times: Vec<f64> = (0..=n).map(|i| t0 * (1.0 / t0).powf(i as f64 / n as f64)).collect();
    let interval = cfg.interval.unwrap_or_else(|| spec.support());
    generate_palpha(&spec)?.write_csv(out.join("data.csv"))?;
    let r = decay_experiment(&sys, &spec, interval, &times, &opts, cfg.heavy_threshold)?;
    write_json(out.join("certificate.json"), &r.certificate)?;
    write_json(out.join("decay.json"), &r.decay)?;
    write_table(
        out.join("covering.csv"),
        &["t", "indices", "heavy", "touched", "touched_bound", "short_window_constant", "light_ratio"],
        r.covering.iter().map(|c| {
            vec![c.t, c.indices as f64, c.heavy as f64, c.touched as f64, c.touched_bound, c.short_window_constant, c.light_ratio]
        }),
    )?;
    if cfg.assert {
        check(r.certificate.certified, || format!("data not certified (growth slope {})", r.certificate.growth_slope))?;
    }
    Ok(serde_json::json!({
        "alpha": spec.alpha,
        "slope": r.decay.slope,
        "target": spec.alpha - 1.0,
        "c_tilde": r.certificate.c_tilde,
        "certified": r.certificate.certified,
    }))
}

pub fn oracle(cfg: OracleConfig, base: &Path, seed: Option<u64>, out: &Path) -> Outcome<serde_json::Value> {
    let sys = PSystemExp::new(cfg.eps1);
    let data = cfg.data.build(base, seed.unwrap_or(cfg.seed))?;
    let levels: Vec<(f64, f64)> = cfg.levels.iter().map(|l| (l[0], l[1])).collect();
    let study = oracle_compare(&sys, &data, &levels, cfg.t, cfg.cfl)?;
    write_json(out.join("study.json"), &study)?;
    if let Some(g) = &study.finest {
        g.write_csv(out.join("cells.csv"))?;
    }
    if cfg.assert {
        check(study.monotone, || "L¹ distance did not decrease at every level".into())?;
    }
    Ok(serde_json::json!({
        "l1": study.levels.iter().map(|l| l.l1).collect::<Vec<_>>(),
        "final_relative": study.final_relative,
        "monotone": study.monotone,
    }))
}
