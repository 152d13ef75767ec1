use super::shifts::temple_interaction;
use crate::error::Result;
use crate::fronttrack::rh_projection_speed;
use crate::hypsys::lambda_jacobian;
use crate::sensitivity::outgoing_shift;
use crate::wavecurves::{shock, solve_riemann_with, CurveParam, FanSplit, Scheme};
use crate::{Family, HyperbolicSystem, RiemannPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::fit::loglog_slope;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSpec {
    pub scales: Vec<f64>,
    /// Accepted samples per scale and interaction type.
    pub samples: usize,
    pub rng_seed: u64,
}

impl Default for CompareSpec {
    fn default() -> Self {
        Self { scales: vec![0.05, 0.02, 0.01], samples: 400, rng_seed: 11 }
    }
}

/// Outgoing strengths and shifts of one interaction for both systems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionPair {
    pub sigma: [f64; 2],
    pub sigma_temple: [f64; 2],
    pub xi: [f64; 2],
    pub xi_temple: [f64; 2],
}

impl InteractionPair {
    pub fn strength_gap(&self) -> f64 {
        (self.sigma_temple[0] - self.sigma[0]).abs() + (self.sigma_temple[1] - self.sigma[1]).abs()
    }
}

/// Largest normalized gaps at one scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleComparison {
    pub eps: f64,
    /// Different families: `max (|σ̃1−σ1| + |σ̃2−σ2|) / |σ′σ″|`.
    pub strength_diff: f64,
    /// Different families: `max |ξ̃i − ξi| / (|σ_other| (|ξ′| + |ξ″|))`.
    pub shift_diff: f64,
    /// Same family: `max (|σ̃1−σ1| + |σ̃2−σ2|) / |σ′σ″|`.
    pub strength_same: f64,
    /// Same family: `max |ξ̃σ̃ − ξσ| / ((|ξ′| + |ξ″|)|σ′σ″|)` for the merged front.
    pub merged_product: f64,
    /// Same family: `max |σ2 ξ2| / ((|ξ′| + |ξ″|)|σ′σ″|)` for the reflected front.
    pub reflected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionComparison {
    pub scales: Vec<ScaleComparison>,
    pub strength_diff_slope: f64,
    pub shift_diff_slope: f64,
    pub strength_same_slope: f64,
}

/// Incoming front: the right state and speed from left state `w`.
fn front(sys: &dyn HyperbolicSystem, w: RiemannPoint, fam: Family, s: f64, temple: bool) -> Result<(RiemannPoint, f64)> {
    if sys.gnl_signs()[fam.index()] * s < 0.0 {
        if temple {
            let r = w.shifted(fam, s);
            return Ok((r, rh_projection_speed(sys, w, r)));
        }
        return shock(sys, w, CurveParam::new(fam, s, 0.0));
    }
    let r = w.shifted(fam, s);
    Ok((r, sys.lambda(fam, r)))
}

fn temple_speed(sys: &dyn HyperbolicSystem, fam: Family, s: f64, l: RiemannPoint, r: RiemannPoint) -> f64 {
    if sys.gnl_signs()[fam.index()] * s < 0.0 {
        rh_projection_speed(sys, l, r)
    } else {
        sys.lambda(fam, r)
    }
}

/// Resolves the interaction of the fronts `a` (left) and `b` (right), given as
/// `(family, strength, shift)`, from the left state `w_minus` for both systems.
pub fn compare_single(
    sys: &dyn HyperbolicSystem,
    temple: &dyn HyperbolicSystem,
    w_minus: RiemannPoint,
    a: (Family, f64, f64),
    b: (Family, f64, f64),
) -> Result<InteractionPair> {
    let (wm, la) = front(sys, w_minus, a.0, a.1, false)?;
    let (wp, lb) = front(sys, wm, b.0, b.1, false)?;
    let fan = solve_riemann_with(sys, w_minus, wp, &Scheme::exact_curves(1.0), [FanSplit::Single; 2])?;
    let mut sigma = [0.0; 2];
    let mut speed = [f64::NAN; 2];
    for f in &fan.fronts {
        sigma[f.family.index()] = f.strength;
        speed[f.family.index()] = f.speed;
    }

    let (twm, tla) = front(temple, w_minus, a.0, a.1, true)?;
    let (twp, tlb) = front(temple, twm, b.0, b.1, true)?;
    let (t1, t2) = temple_interaction(&[(a.1, a.0), (b.1, b.0)]);
    let sigma_temple = [t1, t2];
    let tstar = RiemannPoint::new(twp.w1, w_minus.w2);
    let tspeed = [
        temple_speed(temple, Family::One, t1, w_minus, tstar),
        temple_speed(temple, Family::Two, t2, tstar, twp),
    ];

    let mut xi = [0.0; 2];
    let mut xi_temple = [0.0; 2];
    for k in 0..2 {
        (xi[k], xi_temple[k]) = if a.1 == 0.0 || b.1 == 0.0 {
            let x = if a.1 == 0.0 { b.2 } else { a.2 };
            (x, x)
        } else {
            let o = if speed[k].is_nan() { 0.0 } else { outgoing_shift(a.2, la, b.2, lb, speed[k])? };
            (o, outgoing_shift(a.2, tla, b.2, tlb, tspeed[k])?)
        };
    }
    Ok(InteractionPair { sigma, sigma_temple, xi, xi_temple })
}

/// Random interactions near the origin at each scale `ε`: left states in
/// `[−ε/2, ε/2]²`, strengths in `±[ε/10, ε/2]`, shifts in `[−1, 1]`. Same-family
/// pairs closing slower than `κ(|σ′|+|σ″|)/10` are skipped, `κ` being the
/// genuine nonlinearity rate at the origin.
pub fn compare_interactions(
    sys: &dyn HyperbolicSystem,
    temple: &dyn HyperbolicSystem,
    spec: &CompareSpec,
) -> Result<InteractionComparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let jac = lambda_jacobian(sys, RiemannPoint::ORIGIN);
    let mut scales = Vec::new();
    for &eps in &spec.scales {
        let mut sc = ScaleComparison {
            eps,
            strength_diff: 0.0,
            shift_diff: 0.0,
            strength_same: 0.0,
            merged_product: 0.0,
            reflected: 0.0,
        };
        let strength = |rng: &mut ChaCha8Rng| rng.gen_range(0.1 * eps..0.5 * eps) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut done = 0;
        while done < spec.samples {
            let w = RiemannPoint::new(rng.gen_range(-eps..eps) / 2.0, rng.gen_range(-eps..eps) / 2.0);
            let (s2, s1) = (strength(&mut rng), strength(&mut rng));
            let (x2, x1) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // a 2-front on the left meets a 1-front on the right
            let p = compare_single(sys, temple, w, (Family::Two, s2, x2), (Family::One, s1, x1))?;
            let prod = (s1 * s2).abs();
            let xs = x1.abs() + x2.abs();
            sc.strength_diff = sc.strength_diff.max(p.strength_gap() / prod);
            sc.shift_diff = sc
                .shift_diff
                .max((p.xi_temple[0] - p.xi[0]).abs() / (s2.abs() * xs))
                .max((p.xi_temple[1] - p.xi[1]).abs() / (s1.abs() * xs));
            done += 1;
        }
        let mut done = 0;
        while done < spec.samples {
            let fam = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
            let w = RiemannPoint::new(rng.gen_range(-eps..eps) / 2.0, rng.gen_range(-eps..eps) / 2.0);
            let (sa, sb) = (strength(&mut rng), strength(&mut rng));
            let sign = sys.gnl_signs()[fam.index()];
            if sign * sa >= 0.0 && sign * sb >= 0.0 {
                continue;
            }
            let (xa, xb) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (wm, la) = front(sys, w, fam, sa, false)?;
            let (_, lb) = front(sys, wm, fam, sb, false)?;
            let kappa = jac[fam.index()][fam.index()].abs();
            if la - lb < 0.1 * kappa * (sa.abs() + sb.abs()) {
                continue;
            }
            let p = compare_single(sys, temple, w, (fam, sa, xa), (fam, sb, xb))?;
            let prod = (sa * sb).abs();
            let xs = xa.abs() + xb.abs();
            let (k, o) = (fam.index(), fam.other().index());
            sc.strength_same = sc.strength_same.max(p.strength_gap() / prod);
            sc.merged_product = sc.merged_product.max((p.xi_temple[k] * p.sigma_temple[k] - p.xi[k] * p.sigma[k]).abs() / (xs * prod));
            sc.reflected = sc.reflected.max((p.sigma[o] * p.xi[o]).abs() / (xs * prod));
            done += 1;
        }
        scales.push(sc);
    }
    let slope = |f: fn(&ScaleComparison) -> f64| loglog_slope(&scales.iter().map(|s| (s.eps, f(s))).collect::<Vec<_>>());
    Ok(InteractionComparison {
        strength_diff_slope: slope(|s| s.strength_diff),
        shift_diff_slope: slope(|s| s.shift_diff),
        strength_same_slope: slope(|s| s.strength_same),
        scales,
    })
}
