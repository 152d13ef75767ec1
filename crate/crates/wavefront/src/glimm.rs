//! Scalar diagnostics over profiles and interaction logs: total variation,
//! the trapezoid covering schedule behind the rough shift bound, decay fits
//! and Lipschitz/Hölder scaling.

use crate::error::{Error, Result};
use crate::fit::{loglog_fit, loglog_slope};
use crate::fronttrack::{evolve, init_from_steps, EngineOptions, FrontId, History, Profile, StepData};
use crate::hypsys::{sub, HyperbolicSystem};
use crate::sensitivity::{lipschitz_estimate, shifts_until, ShiftSeed};
use crate::Family;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Total variation of a profile on an interval, split by family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Variation {
    pub family: [f64; 2],
    pub total: f64,
}

/// Sum of `|σ|` over fronts with position in `[a, b]`.
pub fn total_variation(p: &Profile, a: f64, b: f64) -> Variation {
    let family = [p.family_variation(Family::One, a, b), p.family_variation(Family::Two, a, b)];
    Variation { family, total: family[0] + family[1] }
}

/// Total variation of the conserved variables, `Σ |u(x+) − u(x−)|₁`.
pub fn conserved_variation(sys: &dyn HyperbolicSystem, p: &Profile) -> f64 {
    p.fronts
        .iter()
        .map(|f| {
            let d = sub(sys.state(f.right_w), sys.state(f.left_w));
            d[0].abs() + d[1].abs()
        })
        .sum()
}

/// Largest `Σ|σ|` over closed windows of length `len`.
pub fn max_window_strength(p: &Profile, len: f64) -> f64 {
    let f = &p.fronts;
    let (mut lo, mut acc, mut best) = (0, 0.0, 0.0f64);
    for hi in 0..f.len() {
        acc += f[hi].strength.abs();
        while f[hi].position - f[lo].position > len {
            acc -= f[lo].strength.abs();
            lo += 1;
        }
        best = best.max(acc);
    }
    best
}

/// Smallest `C` such that at each sampled time `t` every window of length
/// `2 δ0 t / C` carries total strength `≤ δ0`. Infinite if a single front
/// exceeds `δ0`.
pub fn measure_tv_constant(history: &History, delta0: f64, times: &[f64]) -> f64 {
    let profiles: Vec<(f64, Profile)> = times.iter().filter(|&&t| t > 0.0).map(|&t| (t, history.profile_at(t))).collect();
    let ok = |c: f64| profiles.iter().all(|(t, p)| max_window_strength(p, 2.0 * delta0 * t / c) <= delta0);
    let mut hi = 1e-3;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e15 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    if ok(lo) {
        return lo;
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Times `t_k = e^{γk} τ` with `t_{k+1} = t_k + ℓ_k/2`, `ℓ_k = (δ0/C) t_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSchedule {
    pub tau: f64,
    pub delta0: f64,
    pub c: f64,
    pub gamma: f64,
    /// `t_0 = τ, …, t_N ≥ 1`.
    pub times: Vec<f64>,
    pub lengths: Vec<f64>,
    pub n: usize,
}

/// `Γ_kj`: times `[t_k, t_{k+1})`, centered at `x_kj`, half-width `ℓ_k − (t − t_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub k: usize,
    pub j: i64,
    pub t0: f64,
    pub t1: f64,
    pub center: f64,
    pub half_width: f64,
}

impl Trapezoid {
    pub fn half_width_at(&self, t: f64) -> f64 {
        self.half_width - (t - self.t0)
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        t >= self.t0 && t < self.t1 && (x - self.center).abs() < self.half_width_at(t)
    }
}

pub fn build_cover(tau: f64, delta0: f64, c: f64) -> Result<CoverSchedule> {
    if !(tau > 0.0 && tau <= 1.0) || !(delta0 > 0.0) || !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("cover needs τ ∈ (0,1], δ0, C > 0; got {tau}, {delta0}, {c}")));
    }
    let ratio = delta0 / c;
    let mut times = vec![tau];
    let mut lengths = Vec::new();
    while *times.last().unwrap() < 1.0 {
        let t = *times.last().unwrap();
        let l = ratio * t;
        lengths.push(l);
        times.push(t + l / 2.0);
    }
    lengths.push(ratio * times.last().unwrap());
    let n = times.len() - 1;
    Ok(CoverSchedule { tau, delta0, c, gamma: (1.0 + ratio / 2.0).ln(), times, lengths, n })
}

impl CoverSchedule {
    /// Trapezoids covering `Δ = {t ∈ [τ, t_N), |x − x0| < t − τ}`.
    pub fn trapezoids(&self, x0: f64) -> Vec<Trapezoid> {
        let mut out = Vec::new();
        for k in 0..self.n {
            let (t0, t1, l) = (self.times[k], self.times[k + 1], self.lengths[k]);
            let jmax = ((t1 - self.tau) / l).ceil() as i64 + 1;
            for j in -jmax..=jmax {
                let center = x0 + j as f64 * l;
                // keep cells that meet the cone before t1
                if (center - x0).abs() - l < t1 - self.tau {
                    out.push(Trapezoid { k, j, t0, t1, center, half_width: l });
                }
            }
        }
        out
    }

    /// Number of trapezoids containing `(t, x)`.
    pub fn coverage(&self, x0: f64, t: f64, x: f64) -> usize {
        self.trapezoids(x0).iter().filter(|g| g.contains(t, x)).count()
    }
}

/// `(2L)^N`, the bound on `V^ξ(T)/|σ0 ξ0|` from iterating the local estimate.
pub fn rough_shift_bound(schedule: &CoverSchedule, l: f64) -> f64 {
    (2.0 * l).powi(schedule.n as i32)
}

/// Empirical constant of the local Lipschitz property on one trapezoid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpCell {
    pub k: usize,
    pub j: i64,
    pub seeds: usize,
    /// `Σ|σ|` at `t_k` inside the base interval.
    pub strength: f64,
    /// Largest ratio of the shrunk-window `Σ|σξ|` at `t_{k+1}` to `|σ0|`.
    pub l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    /// `max(1, max over cells)`.
    pub l: f64,
    pub cells: Vec<LpCell>,
    /// Cells whose base strength exceeds `δ0`.
    pub over_threshold: usize,
}

/// Measures the local Lipschitz constant on every trapezoid of the cover
/// below `t_end`, seeding at most `max_seeds` fronts per cell (strongest first).
/// The triangle inequality makes single-front seeds the worst case.
pub fn measure_lp(history: &History, schedule: &CoverSchedule, x0: f64, max_seeds: usize) -> Result<LpReport> {
    let traps: Vec<Trapezoid> = schedule.trapezoids(x0).into_iter().filter(|g| g.t0 < history.t_end).collect();
    let cells = traps
        .par_iter()
        .map(|g| {
            let t1 = g.t1.min(history.t_end);
            let (a, b) = (g.center - g.half_width, g.center + g.half_width);
            let p0 = history.profile_at(g.t0);
            let mut inside: Vec<(FrontId, f64)> = p0
                .fronts
                .iter()
                .filter(|f| f.position > a && f.position < b)
                .map(|f| (f.id, f.strength.abs()))
                .collect();
            let strength = inside.iter().map(|s| s.1).sum();
            inside.sort_by(|x, y| y.1.total_cmp(&x.1));
            inside.truncate(max_seeds);
            let p1 = history.profile_at(t1);
            let shrink = t1 - g.t0;
            let mut l: f64 = 0.0;
            for &(id, s0) in &inside {
                let xi = shifts_until(history, &[ShiftSeed { front: id, xi0: 1.0, tau: g.t0 }], t1)?;
                let v: f64 = p1
                    .fronts
                    .iter()
                    .filter(|f| f.position >= a + shrink && f.position <= b - shrink)
                    .map(|f| (f.strength * xi[f.id]).abs())
                    .sum();
                l = l.max(v / s0);
            }
            Ok(LpCell { k: g.k, j: g.j, seeds: inside.len(), strength, l })
        })
        .collect::<Result<Vec<_>>>()?;
    let over_threshold = cells.iter().filter(|c| c.strength > schedule.delta0).count();
    let l = cells.iter().map(|c| c.l).fold(1.0, f64::max);
    Ok(LpReport { l, cells, over_threshold })
}

/// Fit of `TV{u(t); [a, b]} ≈ C t^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub alpha_target: f64,
    pub slope: f64,
    pub constant: f64,
    pub residual: f64,
    pub times: Vec<f64>,
    pub tv: Vec<f64>,
    /// Times below this were excluded from the fit.
    pub fit_from: f64,
    /// `sup_t t^{1−α} TV(t)` over the fitted times.
    pub scaled_sup: f64,
}

/// Least-squares slope of `ln TV` against `ln t` on `interval`, excluding
/// times below `10 ε`.
pub fn decay_fit_history(history: &History, interval: (f64, f64), times: &[f64], epsilon: f64, alpha: f64) -> DecayReport {
    let fit_from = 10.0 * epsilon;
    let tv: Vec<f64> = times.iter().map(|&t| total_variation(&history.profile_at(t), interval.0, interval.1).total).collect();
    let pts: Vec<(f64, f64)> = times.iter().zip(&tv).filter(|(t, _)| **t >= fit_from).map(|(&t, &v)| (t, v)).collect();
    let fit = loglog_fit(&pts);
    DecayReport {
        alpha_target: alpha,
        slope: fit.map_or(f64::NAN, |f| f.slope),
        constant: fit.map_or(f64::NAN, |f| f.constant()),
        residual: fit.map_or(f64::NAN, |f| f.residual),
        times: times.to_vec(),
        tv,
        fit_from,
        scaled_sup: pts.iter().map(|(t, v)| t.powf(1.0 - alpha) * v).fold(0.0, f64::max),
    }
}

/// Evolves `data` to the last sampled time and fits the decay on `interval`.
pub fn decay_fit(
    sys: &dyn HyperbolicSystem,
    data: &StepData,
    interval: (f64, f64),
    times: &[f64],
    opts: &EngineOptions,
    alpha: f64,
) -> Result<(DecayReport, History)> {
    let t_end = times.iter().copied().fold(0.0, f64::max);
    if t_end <= 0.0 || times.iter().any(|&t| t <= 0.0 || t > 1.0) {
        return Err(Error::Config("decay times must lie in (0, 1]".into()));
    }
    let p0 = init_from_steps(sys, data, opts)?;
    let ev = evolve(sys, &p0, t_end, opts)?;
    Ok((decay_fit_history(&ev.history, interval, times, opts.scheme.epsilon, alpha), ev.history))
}

/// Finite-difference speed `‖u(t+h) − u(t)‖/h` against `max|λ| TV{u(t)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeLipschitzCheck {
    pub t: f64,
    pub h: f64,
    pub rate: f64,
    pub bound: f64,
}

pub fn time_lipschitz_check(sys: &dyn HyperbolicSystem, history: &History, t: f64, h: f64) -> TimeLipschitzCheck {
    let (p0, p1) = (history.profile_at(t), history.profile_at(t + h));
    let lo = p0.fronts.first().map_or(0.0, |f| f.position) - 2.0 * h - 1.0;
    let hi = p0.fronts.last().map_or(0.0, |f| f.position) + 2.0 * h + 1.0;
    let smax = p0.fronts.iter().map(|f| f.speed.abs()).fold(0.0, f64::max);
    TimeLipschitzCheck { t, h, rate: p1.l1_distance(&p0, sys, lo, hi) / h, bound: smax * conserved_variation(sys, &p0) }
}

/// Smallest `C` with `‖u(τ) − ū‖_L¹ ≤ C τ^α` over the sampled `τ`.
pub fn initial_distance_constant(sys: &dyn HyperbolicSystem, history: &History, taus: &[f64], alpha: f64) -> f64 {
    let p0 = history.profile_at(history.t_start);
    let lo = p0.fronts.first().map_or(0.0, |f| f.position) - 2.0;
    let hi = p0.fronts.last().map_or(0.0, |f| f.position) + 2.0;
    taus.iter()
        .filter(|&&t| t > history.t_start)
        .map(|&t| history.profile_at(t).l1_distance(&p0, sys, lo, hi) / t.powf(alpha))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub tau: f64,
    pub l_tau: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistancePair {
    pub initial: f64,
    pub terminal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub q: f64,
    pub points: Vec<ScalingPoint>,
    /// Fitted from `L(τ) ~ τ^{−β}`.
    pub beta_hat: f64,
    pub pairs: Vec<DistancePair>,
    /// Fitted from `‖u1(1) − u2(1)‖ ~ ‖ū1 − ū2‖^γ`.
    pub gamma_hat: f64,
    /// `1 − β_hat/α`.
    pub gamma_predicted: f64,
}

/// `L(τ)` at `τ = q^{−k}`, `k = 1..=levels`, taken as the largest seed
/// amplification over the first member of every pair, plus the terminal L¹
/// distances of the pairs at `t = 1`.
pub fn holder_scaling(
    sys: &dyn HyperbolicSystem,
    pairs: &[(StepData, StepData)],
    alpha: f64,
    q: f64,
    levels: usize,
    opts: &EngineOptions,
) -> Result<HolderReport> {
    if q <= 1.0 {
        return Err(Error::Config(format!("q must exceed 1, got {q}")));
    }
    let runs = pairs
        .par_iter()
        .map(|(d1, d2)| {
            let e1 = evolve(sys, &init_from_steps(sys, d1, opts)?, 1.0, opts)?;
            let e2 = evolve(sys, &init_from_steps(sys, d2, opts)?, 1.0, opts)?;
            let xs = d1.jumps.iter().chain(&d2.jumps).map(|j| j.0);
            let lo = xs.clone().fold(0.0, f64::min) - 2.0;
            let hi = xs.fold(0.0, f64::max) + 2.0;
            let pair = DistancePair {
                initial: e1.initial.l1_distance(&e2.initial, sys, lo, hi),
                terminal: e1.profile.l1_distance(&e2.profile, sys, lo, hi),
            };
            let ls = (1..=levels)
                .map(|k| lipschitz_estimate(&e1.history, q.powi(-(k as i32))).map(|r| r.l_hat))
                .collect::<Result<Vec<f64>>>()?;
            Ok((pair, ls))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<ScalingPoint> = (1..=levels)
        .map(|k| ScalingPoint {
            tau: q.powi(-(k as i32)),
            l_tau: runs.iter().map(|r| r.1[k - 1]).fold(1.0, f64::max),
        })
        .collect();
    let beta_hat = -loglog_slope(&points.iter().map(|p| (p.tau, p.l_tau)).collect::<Vec<_>>());
    let dist: Vec<DistancePair> = runs.into_iter().map(|r| r.0).collect();
    let gamma_hat = loglog_slope(&dist.iter().map(|d| (d.initial, d.terminal)).collect::<Vec<_>>());
    Ok(HolderReport { alpha, q, points, beta_hat, pairs: dist, gamma_hat, gamma_predicted: 1.0 - beta_hat / alpha })
}

/// Measured `L(τ)` against the rough bound `(2L)^N` of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughBoundCheck {
    pub tau: f64,
    /// TV constant measured from the run.
    pub c: f64,
    pub n: usize,
    /// Local constant from the trapezoids around the worst seed.
    pub l_local: f64,
    pub bound: f64,
    pub l_tau: f64,
    pub dominated: bool,
}

/// Builds the cover from the measured TV constant and compares `L̂(τ)` with
/// `(2L)^N`, the trapezoids centered at the seed of largest amplification.
pub fn rough_bound_check(history: &History, tau: f64, delta0: f64, max_seeds: usize) -> Result<RoughBoundCheck> {
    let times: Vec<f64> = (0..=16).map(|i| tau * (1.0 / tau).powf(i as f64 / 16.0)).filter(|&t| t <= history.t_end).collect();
    let c = measure_tv_constant(history, delta0, &times);
    if !c.is_finite() {
        return Err(Error::Config(format!("a single front exceeds δ0 = {delta0}")));
    }
    let schedule = build_cover(tau, delta0, c)?;
    let lip = lipschitz_estimate(history, tau)?;
    let x0 = lip.argmax().map_or(0.0, |s| history.fronts[s.front].position_at(tau));
    let lp = measure_lp(history, &schedule, x0, max_seeds)?;
    let bound = rough_shift_bound(&schedule, lp.l);
    Ok(RoughBoundCheck { tau, c, n: schedule.n, l_local: lp.l, bound, l_tau: lip.l_hat, dominated: lip.l_hat <= bound })
}
