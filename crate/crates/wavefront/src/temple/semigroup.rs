use super::shifts::{temple_terminal_shift, ShiftCase};
use crate::error::{Error, Result};
use crate::fronttrack::{evolve, init_from_steps, EngineOptions, FrontId, History, StepData};
use crate::sensitivity::{lipschitz_estimate_for, propagate, ShiftSeed};
use crate::{Family, HyperbolicSystem, RiemannPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::fit::loglog_slope;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupSpec {
    /// Front tracking resolutions for the closed-form comparison, coarse to fine.
    pub refinement: Vec<f64>,
    /// Resolution of the TV sweep.
    pub eps: f64,
    /// Data take values in `[−amplitude, amplitude]²`, on a grid of this step.
    pub amplitude: f64,
    pub value_step: f64,
    pub t_end: f64,
    pub tv_targets: Vec<f64>,
    /// Seeds sampled per sweep point for the Lipschitz estimate.
    pub lipschitz_seeds: usize,
    pub rng_seed: u64,
}

impl Default for SemigroupSpec {
    fn default() -> Self {
        Self {
            refinement: vec![0.02, 0.01, 0.005],
            eps: 0.01,
            amplitude: 0.04,
            value_step: 0.02,
            t_end: 1.0,
            tv_targets: vec![1.0, 2.0, 4.0, 8.0],
            lipschitz_seeds: 48,
            rng_seed: 7,
        }
    }
}

/// Agreement of event-loop and closed-form shifts for one case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseGap {
    pub case: ShiftCase,
    pub count: usize,
    /// `Σ |σ| |ξ_loop − ξ_closed| / |σ0 ξ0|` over the fronts of this case.
    pub gap: f64,
    /// `Σ |σ| |ξ_closed| / |σ0 ξ0|`.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementPoint {
    pub eps: f64,
    pub interactions: usize,
    pub cases: Vec<CaseGap>,
    /// Sum of the case gaps.
    pub total_gap: f64,
    /// Fronts outside every case that nevertheless carry a shift.
    pub unaffected_violations: usize,
    /// Largest change of a per-family strength sum across one interaction.
    pub sum_defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvSweepPoint {
    pub tv_target: f64,
    pub tv_initial: f64,
    pub fronts: usize,
    pub interactions: usize,
    /// `sup_T V^ξ(T) / |σ0 ξ0|` over the sampled seeds.
    pub l_star: f64,
    /// Largest `Σ|σ|` over windows `[x0 − T, x0 + T]` at the sampled times.
    pub window_strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupReport {
    pub refinement: Vec<RefinementPoint>,
    /// Log-log slope of the total gap against `ε`.
    pub gap_slope: f64,
    pub tv_sweep: Vec<TvSweepPoint>,
    /// `(max L* − min L*) / min L*` across the sweep.
    pub l_star_spread: f64,
    pub max_sum_defect: f64,
}

/// Largest change of per-family strength sums across any interaction of the log.
pub fn strength_sum_defect(history: &History) -> f64 {
    let mut worst: f64 = 0.0;
    for rec in &history.interactions {
        let mut d = [0.0; 2];
        for &i in &rec.incoming {
            let f = &history.fronts[i].front;
            d[f.family.index()] += f.strength;
        }
        for &o in &rec.outgoing {
            let f = &history.fronts[o].front;
            d[f.family.index()] -= f.strength;
        }
        worst = worst.max(d[0].abs()).max(d[1].abs());
    }
    worst
}

/// Extent of the backward same-family lineage of a front, as a range of
/// initial front indices, and whether it contains the seed.
#[derive(Clone, Copy)]
struct Lineage {
    lo: usize,
    hi: usize,
    seed: bool,
}

fn lineages(history: &History, seed: FrontId) -> HashMap<FrontId, Lineage> {
    let mut map = HashMap::new();
    for (k, id) in history.initial_ids().into_iter().enumerate() {
        map.insert(id, Lineage { lo: k, hi: k, seed: id == seed });
    }
    for rec in &history.interactions {
        for &o in &rec.outgoing {
            let fam = history.fronts[o].front.family;
            let mut l = Lineage { lo: usize::MAX, hi: 0, seed: false };
            for &i in rec.incoming.iter().filter(|&&i| history.fronts[i].front.family == fam) {
                let li = map[&i];
                l.lo = l.lo.min(li.lo);
                l.hi = l.hi.max(li.hi);
                l.seed |= li.seed;
            }
            if l.lo != usize::MAX {
                map.insert(o, l);
            }
        }
    }
    map
}

/// Compares the propagated shifts at the end of a Temple run with the closed
/// forms, for the shift `xi0` of the initial 2-front `seed`.
pub fn terminal_shift_gaps(
    sys: &dyn HyperbolicSystem,
    history: &History,
    seed: FrontId,
    xi0: f64,
) -> Result<(Vec<CaseGap>, usize)> {
    let s0 = history.fronts[seed].front;
    if s0.family != Family::Two || history.fronts[seed].birth_time != history.t_start {
        return Err(Error::Config("the seed must be an initial 2-front".into()));
    }
    let ledger = propagate(history, ShiftSeed { front: seed, xi0, tau: history.t_start }, &[])?;
    let lin = lineages(history, seed);
    let seed_idx = history.initial_ids().iter().position(|&i| i == seed).unwrap();
    let norm = (s0.strength * xi0).abs();
    let mut gaps: Vec<CaseGap> = [ShiftCase::One, ShiftCase::Two, ShiftCase::ThreeA, ShiftCase::ThreeB]
        .map(|case| CaseGap { case, count: 0, gap: 0.0, mass: 0.0 })
        .to_vec();
    let mut violations = 0;
    for f in history.profile_at(history.t_end).fronts {
        let Some(l) = lin.get(&f.id) else {
            if ledger.xi[f.id] != 0.0 {
                violations += 1;
            }
            continue;
        };
        let case = match f.family {
            Family::Two if l.seed => Some(ShiftCase::One),
            Family::Two if l.hi < seed_idx => Some(ShiftCase::Two),
            Family::One if l.lo < seed_idx && l.hi > seed_idx => Some(ShiftCase::ThreeA),
            Family::One if l.lo > seed_idx => Some(ShiftCase::ThreeB),
            _ => None,
        };
        let Some(case) = case else {
            if ledger.xi[f.id] != 0.0 {
                violations += 1;
            }
            continue;
        };
        let xi_cf = temple_terminal_shift(sys, case, f.left_w, f.right_w, s0.left_w, s0.right_w, xi0)?;
        let g = &mut gaps[match case {
            ShiftCase::One => 0,
            ShiftCase::Two => 1,
            ShiftCase::ThreeA => 2,
            ShiftCase::ThreeB => 3,
        }];
        g.count += 1;
        g.gap += f.strength.abs() * (ledger.xi[f.id] - xi_cf).abs() / norm;
        g.mass += f.strength.abs() * xi_cf.abs() / norm;
    }
    Ok((gaps, violations))
}

fn grid_value(rng: &mut ChaCha8Rng, amplitude: f64, step: f64) -> f64 {
    let k = (amplitude / step).floor() as i64;
    rng.gen_range(-k..=k) as f64 * step
}

/// Piecewise-constant data on `[0, 1]` with values on a grid, returning to 0
/// outside, with roughly the requested total variation of `(w1, w2)`.
pub fn grid_steps(rng: &mut ChaCha8Rng, tv: f64, amplitude: f64, step: f64) -> StepData {
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    let mut prev = RiemannPoint::ORIGIN;
    let mut acc = 0.0;
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    while acc < tv {
        let w = RiemannPoint::new(grid_value(rng, amplitude, step), grid_value(rng, amplitude, step));
        acc += (w.w1 - prev.w1).abs() + (w.w2 - prev.w2).abs();
        vals.push(w);
        prev = w;
    }
    for k in 0..vals.len() {
        xs.push(k as f64 / vals.len() as f64);
    }
    for (x, w) in xs.into_iter().zip(vals) {
        d.jumps.push((x, w));
    }
    d.jumps.push((1.0, RiemannPoint::ORIGIN));
    d.simplified()
}

/// Data for the closed-form comparison: random grid data on `[0, 1]` with a
/// single 2-shock inserted at `x = 1/2`.
fn comparison_data(sys: &dyn HyperbolicSystem, spec: &SemigroupSpec, rng: &mut ChaCha8Rng) -> StepData {
    let mut d = grid_steps(rng, 1.0, spec.amplitude, spec.value_step);
    d.jumps.retain(|j| (j.0 - 0.5).abs() > 1e-9);
    let k = d.jumps.partition_point(|j| j.0 < 0.5);
    let left = if k == 0 { d.left } else { d.jumps[k - 1].1 };
    let sign = sys.gnl_signs()[1];
    let right = RiemannPoint::new(left.w1, left.w2 - sign * 2.0 * spec.value_step);
    d.jumps.insert(k, (0.5, right));
    d
}

/// Runs the Temple checks: closed-form against event-loop terminal shifts under
/// `ε` refinement, exact conservation of strength sums, and uniformity of the
/// Lipschitz constant as the initial total variation grows.
pub fn verify_temple_semigroup(sys: &dyn HyperbolicSystem, spec: &SemigroupSpec) -> Result<SemigroupReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let data = comparison_data(sys, spec, &mut rng);
    let mut refinement = Vec::new();
    let mut max_defect: f64 = 0.0;
    for &eps in &spec.refinement {
        let opts = EngineOptions::temple(eps);
        let p0 = init_from_steps(sys, &data, &opts)?;
        let ev = evolve(sys, &p0, spec.t_end, &opts)?;
        let seed = ev
            .initial
            .fronts
            .iter()
            .find(|f| f.position == 0.5 && f.family == Family::Two)
            .ok_or_else(|| Error::Config("no 2-front at the seeded jump".into()))?
            .id;
        let (cases, violations) = terminal_shift_gaps(sys, &ev.history, seed, 1.0)?;
        let defect = strength_sum_defect(&ev.history);
        max_defect = max_defect.max(defect);
        refinement.push(RefinementPoint {
            eps,
            interactions: ev.history.interactions.len(),
            total_gap: cases.iter().map(|c| c.gap).sum(),
            cases,
            unaffected_violations: violations,
            sum_defect: defect,
        });
    }
    let gap_slope = loglog_slope(&refinement.iter().map(|r| (r.eps, r.total_gap)).collect::<Vec<_>>());

    let mut tv_sweep = Vec::new();
    let opts = EngineOptions::temple(spec.eps);
    for &tv in &spec.tv_targets {
        let d = grid_steps(&mut rng, tv, spec.amplitude, spec.value_step);
        let tv_initial: f64 = d.total_variation().iter().sum();
        let p0 = init_from_steps(sys, &d, &opts)?;
        let ev = evolve(sys, &p0, spec.t_end, &opts)?;
        max_defect = max_defect.max(strength_sum_defect(&ev.history));
        let n = ev.initial.fronts.len();
        let stride = (n / spec.lipschitz_seeds.max(1)).max(1);
        let ids: Vec<FrontId> = (0..n).step_by(stride).collect();
        let lip = lipschitz_estimate_for(&ev.history, ev.history.t_start, &ids)?;
        let mut window: f64 = 0.0;
        for k in 1..=4 {
            let t = spec.t_end * k as f64 / 4.0;
            let p = ev.history.profile_at(t);
            for j in 0..=20 {
                let x0 = j as f64 / 20.0;
                let s: f64 = p.fronts.iter().filter(|f| (f.position - x0).abs() <= t).map(|f| f.strength.abs()).sum();
                window = window.max(s);
            }
        }
        tv_sweep.push(TvSweepPoint {
            tv_target: tv,
            tv_initial,
            fronts: n,
            interactions: ev.history.interactions.len(),
            l_star: lip.l_hat,
            window_strength: window,
        });
    }
    let lmin = tv_sweep.iter().map(|p| p.l_star).fold(f64::INFINITY, f64::min);
    let lmax = tv_sweep.iter().map(|p| p.l_star).fold(0.0, f64::max);
    Ok(SemigroupReport {
        refinement,
        gap_slope,
        tv_sweep,
        l_star_spread: (lmax - lmin) / lmin,
        max_sum_defect: max_defect,
    })
}
