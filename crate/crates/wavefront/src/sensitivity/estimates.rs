//! Empirical constants of the two-front interaction estimates.

use super::outgoing_shift;
use crate::error::Result;
use crate::wavecurves::{shock, solve_riemann_with, CurveParam, FanSplit, Scheme};
use crate::{Family, HyperbolicSystem, RiemannPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Incoming front from left state `w`: right state and speed. Shocks use the
/// Hugoniot curve, rarefactions the characteristic speed at the right state.
fn incoming(sys: &dyn HyperbolicSystem, w: RiemannPoint, fam: Family, s: f64) -> Result<(RiemannPoint, f64)> {
    if sys.gnl_signs()[fam.index()] * s < 0.0 {
        return shock(sys, w, CurveParam::new(fam, s, 0.0));
    }
    let r = w.shifted(fam, s);
    Ok((r, sys.lambda(fam, r)))
}

/// Two incoming fronts and the outgoing waves of the exact Riemann solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairInteraction {
    pub families: [Family; 2],
    /// `σ′, σ″` (left, right).
    pub sigma_in: [f64; 2],
    pub xi_in: [f64; 2],
    pub speed_in: [f64; 2],
    /// Outgoing strengths by family.
    pub sigma: [f64; 2],
    pub xi: [f64; 2],
}

/// Resolves fronts `a` (left) and `b` (right), each `(family, σ, ξ)`, from `w_minus`.
/// An absent outgoing wave gets shift 0; a vanishing incoming front passes the
/// other front's shift through.
pub fn resolve_pair(sys: &dyn HyperbolicSystem, w_minus: RiemannPoint, a: (Family, f64, f64), b: (Family, f64, f64)) -> Result<PairInteraction> {
    let (wm, la) = incoming(sys, w_minus, a.0, a.1)?;
    let (wp, lb) = incoming(sys, wm, b.0, b.1)?;
    let fan = solve_riemann_with(sys, w_minus, wp, &Scheme::exact_curves(1.0), [FanSplit::Single; 2])?;
    let mut sigma = [0.0; 2];
    let mut speed = [f64::NAN; 2];
    for f in &fan.fronts {
        sigma[f.family.index()] = f.strength;
        speed[f.family.index()] = f.speed;
    }
    let mut xi = [0.0; 2];
    for k in 0..2 {
        xi[k] = if a.1 == 0.0 || b.1 == 0.0 {
            if a.1 == 0.0 {
                b.2
            } else {
                a.2
            }
        } else if speed[k].is_nan() {
            0.0
        } else {
            outgoing_shift(a.2, la, b.2, lb, speed[k])?
        };
    }
    Ok(PairInteraction { families: [a.0, b.0], sigma_in: [a.1, b.1], xi_in: [a.2, b.2], speed_in: [la, lb], sigma, xi })
}

/// Sampling of random weak interactions near the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateSpec {
    /// Left states in `[−scale/2, scale/2]²`, strengths in `±[scale/10, scale/2]`.
    pub scale: f64,
    /// Samples per case.
    pub samples: usize,
    pub rng_seed: u64,
}

impl Default for EstimateSpec {
    fn default() -> Self {
        Self { scale: 0.04, samples: 1000, rng_seed: 1 }
    }
}

/// Largest ratio of each left-hand side to its right-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateConstants {
    /// `(|σ1−σ′|+|σ2−σ″|) / (|σ′σ″|(σ′²+σ″²))`, different families.
    pub strength_cross: f64,
    /// `|ξi − ξ_in,i| / (|σ_other|(|ξ′|+|ξ″|))`, different families.
    pub shift_cross: f64,
    /// `(|σ_k−σ′−σ″|+|σ_o|) / (|σ′σ″|(|σ′|+|σ″|))`, same family `k`.
    pub strength_same: f64,
    /// `|ξ_k − (ξ′σ′+ξ″σ″)/(σ′+σ″)| (|σ′|+|σ″|) / ((|ξ′|+|ξ″|)|σ′σ″|)`.
    pub shift_merged: f64,
    /// `|ξ_o| (|σ′|+|σ″|) / (|ξ′|+|ξ″|)`.
    pub shift_reflected: f64,
    /// `max |ξi − 1|` when both incoming shifts equal 1.
    pub unit_shift_error: f64,
}

/// Fits the constants over random interactions. Cross pairs put a 2-front left
/// of a 1-front. Same-family pairs are two merging shocks; a rarefaction
/// cancelling against a shock moves the outgoing shift by `O(1)` and is not
/// covered by the merge estimate.
pub fn fit_interaction_constants(sys: &dyn HyperbolicSystem, spec: &EstimateSpec) -> Result<EstimateConstants> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let s = spec.scale;
    let strength = |rng: &mut ChaCha8Rng| rng.gen_range(0.1 * s..0.5 * s) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let state = |rng: &mut ChaCha8Rng| RiemannPoint::new(rng.gen_range(-s..s) / 2.0, rng.gen_range(-s..s) / 2.0);
    let mut c = EstimateConstants::default();

    for _ in 0..spec.samples {
        let w = state(&mut rng);
        let (s2, s1) = (strength(&mut rng), strength(&mut rng));
        let (x2, x1) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = resolve_pair(sys, w, (Family::Two, s2, x2), (Family::One, s1, x1))?;
        let (prod, xs) = ((s1 * s2).abs(), x1.abs() + x2.abs());
        c.strength_cross = c.strength_cross.max(((p.sigma[0] - s1).abs() + (p.sigma[1] - s2).abs()) / (prod * (s1 * s1 + s2 * s2)));
        c.shift_cross = c.shift_cross.max((p.xi[0] - x1).abs() / (s2.abs() * xs)).max((p.xi[1] - x2).abs() / (s1.abs() * xs));
        let u = resolve_pair(sys, w, (Family::Two, s2, 1.0), (Family::One, s1, 1.0))?;
        c.unit_shift_error = c.unit_shift_error.max((u.xi[0] - 1.0).abs()).max((u.xi[1] - 1.0).abs());
    }

    for _ in 0..spec.samples {
        let fam = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
        let w = state(&mut rng);
        let sign = -sys.gnl_signs()[fam.index()];
        let (sa, sb) = (sign * strength(&mut rng).abs(), sign * strength(&mut rng).abs());
        let sum = sa.abs() + sb.abs();
        let (xa, xb) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = resolve_pair(sys, w, (fam, sa, xa), (fam, sb, xb))?;
        let (k, o) = (fam.index(), fam.other().index());
        let (prod, xs) = ((sa * sb).abs(), xa.abs() + xb.abs());
        c.strength_same = c.strength_same.max(((p.sigma[k] - sa - sb).abs() + p.sigma[o].abs()) / (prod * sum));
        let mean = (xa * sa + xb * sb) / (sa + sb);
        c.shift_merged = c.shift_merged.max((p.xi[k] - mean).abs() * sum / (xs * prod));
        c.shift_reflected = c.shift_reflected.max(p.xi[o].abs() * sum / xs);
        let u = resolve_pair(sys, w, (fam, sa, 1.0), (fam, sb, 1.0))?;
        c.unit_shift_error = c.unit_shift_error.max((u.xi[k] - 1.0).abs());
        if u.sigma[o] != 0.0 {
            c.unit_shift_error = c.unit_shift_error.max((u.xi[o] - 1.0).abs());
        }
    }
    Ok(c)
}
