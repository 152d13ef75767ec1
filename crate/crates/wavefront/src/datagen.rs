//! Rough initial data whose variation concentrates on few short intervals,
//! a numerical certificate for that structure, and the decay experiment.

use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::fronttrack::{EngineOptions, History, StepData};
use crate::glimm::{decay_fit, total_variation, DecayReport};
use crate::{Family, HyperbolicSystem, RiemannPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PAlphaSpec {
    pub alpha: f64,
    /// Number of dyadic levels `K`.
    pub levels: u32,
    /// Jump size of the square waves; values lie in `[−a/2, a/2]`.
    pub amplitude: f64,
    /// Left end of the first block.
    pub start: f64,
    pub family: Family,
    /// Sup-norm budget.
    pub eps1: f64,
    pub seed: u64,
}

impl Default for PAlphaSpec {
    fn default() -> Self {
        Self { alpha: 0.5, levels: 10, amplitude: 0.01, start: 0.0, family: Family::One, eps1: 0.05, seed: 1 }
    }
}

impl PAlphaSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.levels == 0 || self.levels > 30 {
            return Err(Error::Config(format!("levels must lie in 1..=30, got {}", self.levels)));
        }
        if !(self.amplitude > 0.0) {
            return Err(Error::Config("amplitude must be positive".into()));
        }
        if self.amplitude / 2.0 > self.eps1 {
            return Err(Error::Config(format!("sup norm {} exceeds eps1 = {}", self.amplitude / 2.0, self.eps1)));
        }
        Ok(())
    }

    /// Blocks `I_k` of length `2^{−k}` followed by gaps of the same length.
    pub fn blocks(&self) -> Vec<Block> {
        let mut x = self.start;
        (1..=self.levels)
            .map(|k| {
                let len = 0.5f64.powi(k as i32);
                let n = (2f64.powf(k as f64 * (1.0 - self.alpha))).ceil() as usize;
                let b = Block { k, start: x, len, oscillations: n, tv: 2.0 * self.amplitude * n as f64 };
                x += 2.0 * len;
                b
            })
            .collect()
    }

    /// `[start, start + 2)`, which contains every block and gap.
    pub fn support(&self) -> (f64, f64) {
        (self.start, self.start + 2.0 * (1.0 - 0.5f64.powi(self.levels as i32)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub k: u32,
    pub start: f64,
    pub len: f64,
    pub oscillations: usize,
    pub tv: f64,
}

/// Square waves with `⌈2^{k(1−α)}⌉` periods on each block, in the chosen
/// invariant, between `±a/2`. The seed picks the leading sign of each block.
pub fn generate_palpha(spec: &PAlphaSpec) -> Result<StepData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    let h = spec.amplitude / 2.0;
    for b in spec.blocks() {
        let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = b.len / b.oscillations as f64;
        for i in 0..b.oscillations {
            let x = b.start + i as f64 * p;
            d.jumps.push((x, RiemannPoint::ORIGIN.with(spec.family, s * h)));
            d.jumps.push((x + p / 2.0, RiemannPoint::ORIGIN.with(spec.family, -s * h)));
        }
        d.jumps.push((b.start + b.len, RiemannPoint::ORIGIN));
    }
    Ok(d)
}

/// Witness at one `λ`: the chosen components of `V^λ` and the implied constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificatePoint {
    pub lambda: f64,
    pub intervals: Vec<(f64, f64)>,
    pub measure: f64,
    pub tv_outside: f64,
    pub components: usize,
    /// `max(meas/λ^α, TV_out/λ^{α−1}, N/λ^{α−1})` for the chosen set.
    pub c_tilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PAlphaCertificate {
    pub alpha: f64,
    pub interval: (f64, f64),
    pub points: Vec<CertificatePoint>,
    /// Largest per-`λ` constant: one constant serving every grid point.
    pub c_tilde: f64,
    /// Log-log slope of the per-`λ` constant against `λ`; strongly negative
    /// when the constant blows up as `λ → 0`.
    pub growth_slope: f64,
    pub certified: bool,
}

/// Slope below which the per-`λ` constant is considered unbounded.
pub const GROWTH_LIMIT: f64 = -0.2;

struct Cluster {
    lo: f64,
    hi: f64,
    tv: f64,
}

fn clusters(jumps: &[(f64, f64)], gap: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for &(x, v) in jumps {
        match out.last_mut() {
            Some(c) if x - c.hi <= gap => {
                c.hi = x;
                c.tv += v;
            }
            _ => out.push(Cluster { lo: x, hi: x, tv: v }),
        }
    }
    out
}

fn certify_at(jumps: &[(f64, f64)], alpha: f64, lambda: f64) -> Result<CertificatePoint> {
    let mut cl = clusters(jumps, lambda);
    // densest first; zero-length clusters are free in measure
    cl.sort_by(|a, b| {
        let da = a.tv / (a.hi - a.lo).max(f64::MIN_POSITIVE);
        let db = b.tv / (b.hi - b.lo).max(f64::MIN_POSITIVE);
        db.total_cmp(&da)
    });
    let total: f64 = cl.iter().map(|c| c.tv).sum();
    let (sa, sb) = (lambda.powf(alpha), lambda.powf(alpha - 1.0));
    let mut best = (f64::INFINITY, 0usize);
    let (mut meas, mut out) = (0.0, total);
    for m in 0..=cl.len() {
        if m > 0 {
            let c = &cl[m - 1];
            meas += c.hi - c.lo;
            let next = (out - c.tv).max(0.0);
            if next > out {
                return Err(Error::Numerical("growing V^λ increased the outside variation".into()));
            }
            out = next;
        }
        let c = (meas / sa).max(out / sb).max(m as f64 / sb);
        if c < best.0 {
            best = (c, m);
        }
    }
    let chosen = &cl[..best.1];
    let mut intervals: Vec<(f64, f64)> = chosen.iter().map(|c| (c.lo, c.hi)).collect();
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(CertificatePoint {
        lambda,
        measure: chosen.iter().map(|c| c.hi - c.lo).sum(),
        tv_outside: total - chosen.iter().map(|c| c.tv).sum::<f64>(),
        components: chosen.len(),
        intervals,
        c_tilde: best.0,
    })
}

/// Greedy witness for the fast-decay structure on `interval`: for each `λ`,
/// breakpoints closer than `λ` are grouped into components, which enter
/// `V^λ` densest first; the prefix minimizing the largest normalized
/// constraint is kept. Failure to certify does not prove the data lies
/// outside the class.
pub fn check_palpha(data: &StepData, alpha: f64, lambdas: &[f64], interval: (f64, f64)) -> Result<PAlphaCertificate> {
    let mut prev = data.left;
    let mut jumps = Vec::new();
    for &(x, w) in &data.jumps {
        if x >= interval.0 && x <= interval.1 {
            jumps.push((x, (w.w1 - prev.w1).abs() + (w.w2 - prev.w2).abs()));
        }
        prev = w;
    }
    let points = lambdas.par_iter().map(|&l| certify_at(&jumps, alpha, l)).collect::<Result<Vec<_>>>()?;
    let c_tilde = points.iter().map(|p| p.c_tilde).fold(0.0, f64::max);
    let growth_slope = loglog_slope(&points.iter().map(|p| (p.lambda, p.c_tilde)).collect::<Vec<_>>());
    let growing = growth_slope.is_finite() && growth_slope < GROWTH_LIMIT;
    Ok(PAlphaCertificate {
        alpha,
        interval,
        points,
        c_tilde,
        growth_slope,
        certified: c_tilde.is_finite() && !growing,
    })
}

/// Covering diagnostics of the decay proof at one time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverDiagnostics {
    pub t: f64,
    /// Indices `k` with `I_k(t) = [kt, (k+1)t]` meeting `[a, b]`.
    pub indices: usize,
    /// `|J|`: cells whose initial variation on `I_k(0)` exceeds `K`.
    pub heavy: usize,
    /// `|J′|`: cells whose `I_k(0)` meets `V^t`.
    pub touched: usize,
    /// `8 C̃ t^{α−1}`, the bound on `|J′|`.
    pub touched_bound: f64,
    /// Largest `TV{u(t); I_k(t)} / 2`, the constant in the short-window bound.
    pub short_window_constant: f64,
    /// Largest `TV{u(t); I_k(t)} / TV{ū; I_k(0)}` over light cells.
    pub light_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayExperiment {
    pub spec: PAlphaSpec,
    pub initial_tv: f64,
    pub certificate: PAlphaCertificate,
    pub decay: DecayReport,
    pub covering: Vec<CoverDiagnostics>,
}

/// Generates the data, certifies it on `interval` over the sampled times,
/// evolves, fits the decay on `interval` and records the covering diagnostics.
pub fn decay_experiment(
    sys: &dyn HyperbolicSystem,
    spec: &PAlphaSpec,
    interval: (f64, f64),
    times: &[f64],
    opts: &EngineOptions,
    heavy_threshold: f64,
) -> Result<DecayExperiment> {
    let data = generate_palpha(spec)?;
    let tvs = data.total_variation();
    let (a, b) = interval;
    let wide = (a - 1.0, b + 1.0);
    let certificate = check_palpha(&data, spec.alpha, times, wide)?;
    let (decay, history) = decay_fit(sys, &data, interval, times, opts, spec.alpha)?;
    let covering = times
        .iter()
        .zip(&certificate.points)
        .map(|(&t, cert)| cover_diagnostics(&data, &history, cert, certificate.c_tilde, spec.alpha, interval, t, heavy_threshold))
        .collect();
    Ok(DecayExperiment { spec: spec.clone(), initial_tv: tvs[0] + tvs[1], certificate, decay, covering })
}

#[allow(clippy::too_many_arguments)]
fn cover_diagnostics(
    data: &StepData,
    history: &History,
    cert: &CertificatePoint,
    c_tilde: f64,
    alpha: f64,
    (a, b): (f64, f64),
    t: f64,
    heavy_threshold: f64,
) -> CoverDiagnostics {
    let p = history.profile_at(t);
    let (k0, k1) = ((a / t).floor() as i64, (b / t).ceil() as i64 - 1);
    let (mut heavy, mut touched) = (0, 0);
    let (mut c1, mut ratio): (f64, f64) = (0.0, 0.0);
    for k in k0..=k1 {
        let (lo0, hi0) = ((k - 1) as f64 * t, (k + 2) as f64 * t);
        let tv0: f64 = data.total_variation_in(lo0, hi0).iter().sum();
        let tv_t = total_variation(&p, k as f64 * t, (k + 1) as f64 * t).total;
        c1 = c1.max(tv_t / 2.0);
        let is_heavy = tv0 > heavy_threshold;
        let is_touched = cert.intervals.iter().any(|&(l, h)| l < hi0 && h > lo0);
        heavy += is_heavy as usize;
        touched += is_touched as usize;
        if !is_heavy && !is_touched && tv0 > 0.0 {
            ratio = ratio.max(tv_t / tv0);
        }
    }
    CoverDiagnostics {
        t,
        indices: (k1 - k0 + 1).max(0) as usize,
        heavy,
        touched,
        touched_bound: 8.0 * c_tilde * t.powf(alpha - 1.0),
        short_window_constant: c1,
        light_ratio: ratio,
    }
}
