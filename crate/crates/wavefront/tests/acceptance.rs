//! Acceptance suite. Prints one PASS/FAIL line per criterion with the measured
//! values and the wall time. Exits 0 unless `ACCEPTANCE_STRICT` is set, so a
//! documented failure does not break `cargo test`. `ACCEPTANCE_ONLY=3,7`
//! restricts the run to the listed criteria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};
use wavefront::cli::random_steps;
use wavefront::datagen::{decay_experiment, PAlphaSpec};
use wavefront::fit::loglog_slope;
use wavefront::fronttrack::{evolve, init_from_steps, EngineOptions, Evolution, StepData};
use wavefront::glimm::{holder_scaling, rough_bound_check, total_variation};
use wavefront::hypsys::PSystemExp;
use wavefront::oracle::oracle_compare;
use wavefront::sensitivity::{finite_difference_check, fit_interaction_constants, EstimateConstants, EstimateSpec};
use wavefront::temple::{
    compare_interactions, strength_sum_defect, tangent_temple, verify_temple_semigroup, CompareSpec, SemigroupSpec,
    TangencyData, TempleGrid, TempleSystem,
};
use wavefront::wavecurves::{shock, solve_riemann, CurveParam};
use wavefront::{Family, HyperbolicSystem, RiemannPoint};

const RESIDUAL_TOL: f64 = 1e-9;
const CUBIC_SLOPE_MIN: f64 = 2.7;
const CONSTANT_SPREAD: f64 = 0.10;
const UNIT_SHIFT_TOL: f64 = 1e-12;
const FD_SLOPE: (f64, f64) = (0.8, 1.2);
const SUM_DEFECT_TOL: f64 = 1e-12;
const TEMPLE_EVENTS: usize = 10_000;
const GAP_SLOPE: (f64, f64) = (0.8, 1.2);
const L_STAR_SPREAD: f64 = 0.25;
const TANGENT_TOL: f64 = 1e-6;
const DIFF_SLOPE_MIN: f64 = 1.7;
const SAME_SLOPE_MIN: f64 = 0.8;
const DECAY_TOL: f64 = 0.15;
const LIPSCHITZ_RUNS: usize = 100;
const ORACLE_RELATIVE: f64 = 5e-3;

type Verdict = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn psys() -> PSystemExp {
    PSystemExp::new(0.05)
}

fn run(sys: &dyn HyperbolicSystem, d: &StepData, t: f64, opts: &EngineOptions) -> Result<Evolution, String> {
    evolve(sys, &init_from_steps(sys, d, opts).map_err(|e| e.to_string())?, t, opts).map_err(|e| e.to_string())
}

fn riemann_solver() -> Verdict {
    let sys = psys();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eps = 2e-3;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut w = || RiemannPoint::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        let (wm, wp) = (w(), w());
        let fan = solve_riemann(&sys, wm, wp, eps).map_err(|e| e.to_string())?;
        worst = worst.max(fan.reconstruction_residual(&sys, wm, wp, eps).map_err(|e| e.to_string())?);
    }
    // transverse drift of the 1-shock curve against the straight rarefaction curve
    let pts: Vec<(f64, f64)> = (0..12)
        .map(|k| {
            let s = -0.08 * 0.7f64.powi(k);
            let (p, _) = shock(&sys, RiemannPoint::ORIGIN, CurveParam::new(Family::One, s, 1e-6)).unwrap();
            (s.abs(), p.w2.abs())
        })
        .collect();
    let slope = loglog_slope(&pts);
    Ok((worst <= RESIDUAL_TOL && slope >= CUBIC_SLOPE_MIN, format!("max residual {worst:.2e}, cubic slope {slope:.3}")))
}

fn interaction_estimates() -> Verdict {
    let sys = psys();
    let fits: Vec<EstimateConstants> = (1..=3)
        .map(|seed| fit_interaction_constants(&sys, &EstimateSpec { samples: 1000, rng_seed: seed, ..Default::default() }))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let field = |c: &EstimateConstants| {
        [c.strength_cross, c.shift_cross, c.strength_same, c.shift_merged, c.shift_reflected]
    };
    let mut spread = 0.0f64;
    let mut finite = true;
    for k in 0..5 {
        let v: Vec<f64> = fits.iter().map(|c| field(c)[k]).collect();
        finite &= v.iter().all(|x| x.is_finite() && *x > 0.0);
        let (lo, hi) = (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(0.0, f64::max));
        spread = spread.max((hi - lo) / lo);
    }
    let unit = fits.iter().map(|c| c.unit_shift_error).fold(0.0, f64::max);
    let c = field(&fits[0]);
    Ok((
        finite && spread <= CONSTANT_SPREAD && unit <= UNIT_SHIFT_TOL,
        format!(
            "C = [{:.3e}, {:.3e}, {:.3e}, {:.3e}, {:.3e}], spread {:.3}, unit shift error {unit:.1e}",
            c[0], c[1], c[2], c[3], c[4], spread
        ),
    ))
}

fn shift_derivative() -> Verdict {
    let sys = psys();
    let eps = 2e-3;
    let opts = EngineOptions::new(eps);
    let cases: Vec<(u64, Option<usize>)> = std::iter::once((12, Some(66))).chain((30..50).map(|s| (s, None))).collect();
    let results: Vec<Option<f64>> = cases
        .par_iter()
        .map(|&(seed, front)| {
            let d = random_steps(seed, 12, 0.04, (0.0, 1.0)).quantized(eps);
            let ev = run(&sys, &d, 1.0, &opts)?;
            let ids = ev.history.initial_ids();
            let id = front.unwrap_or(ids[ids.len() / 2]);
            let r = finite_difference_check(&sys, &ev.initial, &ev.history, id, 1.0, &[1e-5, 1e-6, 1e-7], &[0.25, 0.5, 0.75, 1.0], &opts)
                .map_err(|e| e.to_string())?;
            Ok((!r.topology_changed && r.shifted_interactions > 0).then_some(r.displacement_slope))
        })
        .collect::<Result<_, String>>()?;
    let slopes: Vec<f64> = results.into_iter().flatten().collect();
    let (lo, hi) = (slopes.iter().cloned().fold(f64::INFINITY, f64::min), slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let ok = !slopes.is_empty() && lo >= FD_SLOPE.0 && hi <= FD_SLOPE.1;
    Ok((ok, format!("{} runs without topology change, slopes in [{lo:.4}, {hi:.4}]", slopes.len())))
}

fn glimm_lax_decay() -> Verdict {
    let eps1s = [0.05, 0.02, 0.01];
    let times = [0.25, 0.5, 1.0];
    let widths = [0.05, 0.2, 0.8];
    let cells: Vec<Vec<(f64, f64, f64, f64)>> = eps1s
        .par_iter()
        .map(|&e1| {
            let sys = PSystemExp::new(e1);
            let eps = e1 / 20.0;
            let d = random_steps(5, 200, 0.8 * e1, (0.0, 1.0)).quantized(eps);
            let h = run(&sys, &d, 1.0, &EngineOptions::new(eps))?.history;
            let mut out = Vec::new();
            for &t in &times {
                let p = h.profile_at(t);
                for &w in &widths {
                    let tv = total_variation(&p, 0.5 - w / 2.0, 0.5 + w / 2.0).total;
                    out.push((e1, t, w, tv / (e1.sqrt() + w / t)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, String>>()?;
    // C0 from the ε1 = 0.05 slice, checked on the other two.
    let c0 = cells[0].iter().map(|c| c.3).fold(0.0, f64::max);
    let worst = cells[1..].iter().flatten().map(|c| c.3).fold(0.0, f64::max);
    let violations = cells[1..].iter().flatten().filter(|c| c.3 > c0).count();
    Ok((c0.is_finite() && violations == 0, format!("C0 {c0:.4}, largest held-out ratio {worst:.4}, {violations} violations")))
}

fn temple_exactness() -> Verdict {
    let t = TempleSystem::builtin(0.1).map_err(|e| e.to_string())?;
    let eps = 2e-3;
    let opts = EngineOptions::temple(eps);
    let d = random_steps(9, 100, 0.04, (0.0, 1.0)).quantized(eps);
    let ev = run(&t, &d, 1.0, &opts)?;
    let events = ev.history.interactions.len();
    let defect = strength_sum_defect(&ev.history);
    let spec = SemigroupSpec { tv_targets: vec![1.0], lipschitz_seeds: 1, ..Default::default() };
    let r = verify_temple_semigroup(&t, &spec).map_err(|e| e.to_string())?;
    let ok = events >= TEMPLE_EVENTS
        && defect.max(r.max_sum_defect) <= SUM_DEFECT_TOL
        && (GAP_SLOPE.0..=GAP_SLOPE.1).contains(&r.gap_slope);
    Ok((ok, format!("{events} events, sum defect {:.1e}, gap slope {:.4}", defect.max(r.max_sum_defect), r.gap_slope)))
}

fn tangent(sys: &PSystemExp) -> Result<TempleSystem, String> {
    let grid = TempleGrid::default();
    let d = sys.domain();
    tangent_temple(sys, grid, (d.hi[0] - d.lo[0]) / (grid.n - 1) as f64).map_err(|e| e.to_string())
}

fn temple_lipschitz() -> Verdict {
    let t = tangent(&psys())?;
    let r = verify_temple_semigroup(&t, &SemigroupSpec::default()).map_err(|e| e.to_string())?;
    let l: Vec<String> = r.tv_sweep.iter().map(|p| format!("{:.3}", p.l_star)).collect();
    Ok((r.l_star_spread < L_STAR_SPREAD, format!("L* over TV {{1,2,4,8}} = [{}], spread {:.3}", l.join(", "), r.l_star_spread)))
}

fn tangent_temple_check() -> Verdict {
    let sys = psys();
    let t = tangent(&sys)?;
    let gap = TangencyData::of(&sys).max_gap(&TangencyData::of(&t));
    let straight = t.straightness_defect(16, t.spacing()).max(t.parallelism_defect());
    let c = compare_interactions(&sys, &t, &CompareSpec::default()).map_err(|e| e.to_string())?;
    let ok = gap <= TANGENT_TOL
        && straight <= TANGENT_TOL
        && c.strength_diff_slope >= DIFF_SLOPE_MIN
        && c.strength_same_slope >= SAME_SLOPE_MIN;
    Ok((
        ok,
        format!(
            "tangency {gap:.1e}, invariant defect {straight:.1e}, slopes {:.3} / {:.3}",
            c.strength_diff_slope, c.strength_same_slope
        ),
    ))
}

fn fast_decay() -> Verdict {
    let sys = psys();
    let eps = 4e-3;
    let opts = EngineOptions::new(eps);
    let t0 = 10.0 * eps;
    let times: Vec<f64> = (0..=12).map(|i| t0 * (1.0 / t0).powf(i as f64 / 12.0)).collect();
    let mut ok = true;
    let mut msg = Vec::new();
    for alpha in [0.5, 0.8] {
        let spec = PAlphaSpec { alpha, levels: 10, amplitude: 0.08, ..Default::default() };
        let r = decay_experiment(&sys, &spec, spec.support(), &times, &opts, 0.1).map_err(|e| e.to_string())?;
        ok &= r.certificate.certified && (r.decay.slope - (alpha - 1.0)).abs() <= DECAY_TOL;
        msg.push(format!(
            "alpha {alpha}: slope {:.3} (target {:.1}), C~ {:.3}, certified {}",
            r.decay.slope,
            alpha - 1.0,
            r.certificate.c_tilde,
            r.certificate.certified
        ));
    }
    Ok((ok, msg.join("; ")))
}

fn pairs(eps1: f64, runs: usize) -> (Vec<(StepData, StepData)>, f64) {
    let eps = 0.08 * eps1;
    let p = (0..runs)
        .map(|r| {
            let d = random_steps(1 + r as u64, 12, 0.4 * eps1, (0.0, 1.0)).quantized(eps);
            let e = d.with_shifts(&vec![0.01 * 0.5f64.powi((r % 4) as i32); d.jumps.len()]);
            (d, e)
        })
        .collect();
    (p, eps)
}

fn l_tau_scaling() -> Verdict {
    let sys = psys();
    let (runs, eps) = pairs(0.05, LIPSCHITZ_RUNS);
    let opts = EngineOptions::new(eps);
    let dominated = runs
        .par_iter()
        .map(|(d, _)| {
            let h = run(&sys, d, 1.0, &opts)?.history;
            (1..=4).try_fold(true, |acc, k| Ok(acc && rough_bound_check(&h, 0.5f64.powi(k), 0.05, 4).map_err(|e| e.to_string())?.dominated))
        })
        .collect::<Result<Vec<bool>, String>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    let beta = |eps1: f64| {
        let sys = PSystemExp::new(eps1);
        let (p, eps) = pairs(eps1, 8);
        holder_scaling(&sys, &p, 0.5, 2.0, 4, &EngineOptions::new(eps)).map(|r| r.beta_hat)
    };
    let (b05, b01) = (beta(0.05).map_err(|e| e.to_string())?, beta(0.01).map_err(|e| e.to_string())?);
    Ok((
        dominated == LIPSCHITZ_RUNS && b01 < b05,
        format!("dominated {dominated}/{LIPSCHITZ_RUNS}, beta_hat {b05:.4} (eps1 0.05) vs {b01:.4} (eps1 0.01)"),
    ))
}

fn oracle_agreement() -> Verdict {
    let sys = psys();
    let d = StepData { left: RiemannPoint::new(0.05, -0.05), jumps: vec![(0.0, RiemannPoint::new(-0.05, 0.05))] };
    let s = oracle_compare(&sys, &d, &[(1e-2, 1e-3), (2.5e-3, 2.5e-4), (1e-3, 1e-4)], 1.0, 0.8).map_err(|e| e.to_string())?;
    let l1: Vec<String> = s.levels.iter().map(|l| format!("{:.3e}", l.l1)).collect();
    Ok((
        s.monotone && s.final_relative <= ORACLE_RELATIVE,
        format!("L1 [{}], final relative {:.2e}", l1.join(", "), s.final_relative),
    ))
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let all = [
        Criterion { id: 1, name: "riemann solver", budget: min(1), run: riemann_solver },
        Criterion { id: 2, name: "interaction estimates", budget: min(1), run: interaction_estimates },
        Criterion { id: 3, name: "shift as derivative", budget: min(5), run: shift_derivative },
        Criterion { id: 4, name: "glimm-lax decay", budget: min(10), run: glimm_lax_decay },
        Criterion { id: 5, name: "temple exactness", budget: min(10), run: temple_exactness },
        Criterion { id: 6, name: "temple uniform lipschitz", budget: min(15), run: temple_lipschitz },
        Criterion { id: 7, name: "tangent temple", budget: min(10), run: tangent_temple_check },
        Criterion { id: 8, name: "fast decay", budget: min(20), run: fast_decay },
        Criterion { id: 9, name: "scaling of L(tau)", budget: min(30), run: l_tau_scaling },
        Criterion { id: 10, name: "oracle agreement", budget: min(10), run: oracle_agreement },
    ];
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for c in all.iter().filter(|c| only.as_ref().map_or(true, |o| o.contains(&c.id))) {
        let start = Instant::now();
        let (pass, detail) = match (c.run)() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let took = start.elapsed();
        let pass = pass && took <= c.budget;
        failed += usize::from(!pass);
        println!("{} {:>2} {:<26} {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, c.id, c.name, took.as_secs_f64());
    }
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
