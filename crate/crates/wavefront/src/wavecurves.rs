//! Rarefaction, shock, interpolated-shock and mixed wave curves, and the
//! two-family Riemann solver built from them.

use crate::error::{Error, Result};
use crate::hypsys::{HyperbolicSystem, RiemannPoint};
use crate::Family;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Kind of a traveling discontinuity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    #[serde(rename = "shock")]
    Shock,
    #[serde(rename = "rarefaction-fan")]
    Rarefaction,
    #[serde(rename = "interpolated")]
    Interpolated,
}

impl fmt::Display for WaveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveKind::Shock => "shock",
            WaveKind::Rarefaction => "rarefaction-fan",
            WaveKind::Interpolated => "interpolated",
        })
    }
}

impl std::str::FromStr for WaveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shock" => Ok(WaveKind::Shock),
            "rarefaction-fan" => Ok(WaveKind::Rarefaction),
            "interpolated" => Ok(WaveKind::Interpolated),
            other => Err(Error::Config(format!("unknown wave kind {other:?}"))),
        }
    }
}

/// Family, signed strength and scheme parameter of a point on a wave curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveParam {
    pub family: Family,
    pub s: f64,
    pub epsilon: f64,
}

impl CurveParam {
    pub fn new(family: Family, s: f64, epsilon: f64) -> Self {
        Self { family, s, epsilon }
    }
}

/// Speed assigned to each front of a discretized rarefaction fan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanSpeed {
    /// Characteristic speed at the front's right state.
    #[default]
    RightState,
    /// Characteristic speed at the midpoint of the front's states.
    Midpoint,
}

/// Speed of a front on an interpolated shock curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolatedSpeed {
    /// `φ·λ̄ + (1−φ)·σ_RH` with the same cutoff weight as the states.
    #[default]
    Blend,
    /// Rankine–Hugoniot speed of the underlying shock.
    RankineHugoniot,
}

/// Parameters of the front tracking scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    /// Fan grid spacing.
    pub epsilon: f64,
    /// Parameter of the interpolated shock curves; usually equal to `epsilon`.
    pub blend_epsilon: f64,
    pub fan_speed: FanSpeed,
    pub interpolated_speed: InterpolatedSpeed,
}

impl Scheme {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            blend_epsilon: epsilon,
            fan_speed: FanSpeed::RightState,
            interpolated_speed: InterpolatedSpeed::Blend,
        }
    }

    /// Exact Lax curves: the blend zone shrinks below any strength of interest.
    pub fn exact_curves(epsilon: f64) -> Self {
        Self { blend_epsilon: 1e-30, ..Self::new(epsilon) }
    }
}

/// How a rarefaction of one family is emitted by the Riemann solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanSplit {
    /// Centered fan with intermediate states on the grid `{jε}`.
    Grid,
    /// One front carrying the whole rarefaction.
    Single,
}

/// The smooth nondecreasing cutoff: 0 for `t ≤ −2`, 1 for `t ≥ −1`,
/// a C² quintic in between.
pub fn cutoff(t: f64) -> f64 {
    if t <= -2.0 {
        0.0
    } else if t >= -1.0 {
        1.0
    } else {
        let y = t + 2.0;
        y * y * y * (10.0 + y * (-15.0 + 6.0 * y))
    }
}

/// `R_i(w, s)`: shift the own invariant by `s`.
pub fn rarefaction(sys: &dyn HyperbolicSystem, w: RiemannPoint, p: CurveParam) -> Result<RiemannPoint> {
    let out = w.shifted(p.family, p.s);
    sys.domain().check(out)?;
    Ok(out)
}

const WEAK_SHOCK: f64 = 1e-7;
const HUGONIOT_MAX_ITER: usize = 50;

fn state_derivative(sys: &dyn HyperbolicSystem, w: RiemannPoint, fam: Family) -> [f64; 2] {
    let h = 1e-7 * w.get(fam).abs().max(1.0);
    let a = sys.state(w.shifted(fam, h));
    let b = sys.state(w.shifted(fam, -h));
    [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
}

/// Solves the Rankine–Hugoniot conditions for the state whose own invariant
/// differs from `w` by `s`. Returns the state and the shock speed.
fn hugoniot(sys: &dyn HyperbolicSystem, w: RiemannPoint, fam: Family, s: f64) -> Result<(RiemannPoint, f64)> {
    let target = w.shifted(fam, s);
    if s.abs() < WEAK_SHOCK {
        let speed = 0.5 * (sys.lambda(fam, w) + sys.lambda(fam, target));
        return Ok((target, speed));
    }
    let tr = fam.other();
    let u0 = sys.state(w);
    let f0 = sys.flux(w);
    let mut d = 0.0;
    let mut sigma = 0.5 * (sys.lambda(fam, w) + sys.lambda(fam, target));
    let tol = 4e-15 + 1e-12 * s.abs();
    let mut res_norm = f64::INFINITY;
    for _ in 0..HUGONIOT_MAX_ITER {
        let wp = target.shifted(tr, d);
        let u = sys.state(wp);
        let f = sys.flux(wp);
        let du = [u[0] - u0[0], u[1] - u0[1]];
        let res = [f[0] - f0[0] - sigma * du[0], f[1] - f0[1] - sigma * du[1]];
        res_norm = res[0].abs().max(res[1].abs());
        let rj = state_derivative(sys, wp, tr);
        let lj = sys.lambda(tr, wp);
        let a = [(lj - sigma) * rj[0], (lj - sigma) * rj[1]];
        let b = [-du[0], -du[1]];
        let det = a[0] * b[1] - a[1] * b[0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Numerical(format!("singular Hugoniot Jacobian at s = {s:e}")));
        }
        let dd = (-res[0] * b[1] + res[1] * b[0]) / det;
        let ds = (-a[0] * res[1] + a[1] * res[0]) / det;
        d += dd;
        sigma += ds;
        if dd.abs() + s.abs() * ds.abs() <= 1e-17 && res_norm <= tol {
            break;
        }
    }
    let out = target.shifted(tr, d);
    let u = sys.state(out);
    let f = sys.flux(out);
    let final_res = (0..2)
        .map(|k| (f[k] - f0[k] - sigma * (u[k] - u0[k])).abs())
        .fold(0.0, f64::max);
    if !(final_res <= tol.max(res_norm)) || !out.is_finite() {
        return Err(Error::Numerical(format!(
            "Rankine-Hugoniot solve did not converge: family {fam}, s = {s:e}, w = ({}, {}), residual {final_res:e}",
            w.w1, w.w2
        )));
    }
    Ok((out, sigma))
}

/// `S_i(w, s)` for `s < 0` on the admissible side: the Hugoniot state and the RH speed.
pub fn shock(sys: &dyn HyperbolicSystem, w: RiemannPoint, p: CurveParam) -> Result<(RiemannPoint, f64)> {
    let (out, speed) = hugoniot(sys, w, p.family, p.s)?;
    sys.domain().check(out)?;
    Ok((out, speed))
}

/// `S^ε_i(w, s) = φ(s/√ε)·R_i + (1 − φ(s/√ε))·S_i` with the blended speed.
pub fn interpolated_shock(sys: &dyn HyperbolicSystem, w: RiemannPoint, p: CurveParam) -> Result<(RiemannPoint, f64)> {
    let (pt, speed, _) = blend(sys, w, p, InterpolatedSpeed::Blend)?;
    Ok((pt, speed))
}

fn blend(
    sys: &dyn HyperbolicSystem,
    w: RiemannPoint,
    p: CurveParam,
    speed_rule: InterpolatedSpeed,
) -> Result<(RiemannPoint, f64, f64)> {
    let sign = sys.gnl_signs()[p.family.index()];
    let phi = cutoff(sign * p.s / p.epsilon.sqrt());
    let r = w.shifted(p.family, p.s);
    let avg = 0.5 * (sys.lambda(p.family, w) + sys.lambda(p.family, r));
    if phi == 1.0 {
        sys.domain().check(r)?;
        return Ok((r, avg, phi));
    }
    let (sh, sigma) = hugoniot(sys, w, p.family, p.s)?;
    let tr = p.family.other();
    let pt = r.with(tr, r.get(tr) + (1.0 - phi) * (sh.get(tr) - r.get(tr)));
    sys.domain().check(pt)?;
    let speed = match speed_rule {
        InterpolatedSpeed::Blend => phi * avg + (1.0 - phi) * sigma,
        InterpolatedSpeed::RankineHugoniot => sigma,
    };
    Ok((pt, speed, phi))
}

/// A point on the mixed curve `Ψ^ε_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedPoint {
    pub state: RiemannPoint,
    /// `None` for `s = 0`.
    pub kind: Option<WaveKind>,
    /// Front speed for compressive waves; for rarefactions the speed at the end state.
    pub speed: f64,
    /// Set when the branch must be discretized as a fan.
    pub fan: bool,
}

/// `Ψ^ε_i(w, s)`: the rarefaction branch for expansive `s`, the interpolated shock otherwise.
pub fn mixed_curve(sys: &dyn HyperbolicSystem, w: RiemannPoint, p: CurveParam) -> Result<MixedPoint> {
    mixed_with(sys, w, p, InterpolatedSpeed::Blend)
}

fn mixed_with(
    sys: &dyn HyperbolicSystem,
    w: RiemannPoint,
    p: CurveParam,
    speed_rule: InterpolatedSpeed,
) -> Result<MixedPoint> {
    let sign = sys.gnl_signs()[p.family.index()];
    if p.s == 0.0 {
        return Ok(MixedPoint { state: w, kind: None, speed: sys.lambda(p.family, w), fan: false });
    }
    if sign * p.s > 0.0 {
        let state = rarefaction(sys, w, p)?;
        return Ok(MixedPoint {
            state,
            kind: Some(WaveKind::Rarefaction),
            speed: sys.lambda(p.family, state),
            fan: true,
        });
    }
    let (state, speed, phi) = blend(sys, w, p, speed_rule)?;
    let kind = if phi == 0.0 { WaveKind::Shock } else { WaveKind::Interpolated };
    Ok(MixedPoint { state, kind: Some(kind), speed, fan: false })
}

/// A front produced by the Riemann solver, before it is placed in a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontProto {
    pub family: Family,
    pub kind: WaveKind,
    pub strength: f64,
    pub speed: f64,
    pub left: RiemannPoint,
    pub right: RiemannPoint,
}

/// Solution of a Riemann problem by the front tracking scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannFan {
    pub s1: f64,
    pub s2: f64,
    pub w_star: RiemannPoint,
    pub fronts: Vec<FrontProto>,
}

impl RiemannFan {
    /// Re-applies the curves with `(s1, s2)` and measures the distance to `w_plus`.
    pub fn reconstruction_residual(
        &self,
        sys: &dyn HyperbolicSystem,
        w_minus: RiemannPoint,
        w_plus: RiemannPoint,
        epsilon: f64,
    ) -> Result<f64> {
        let a = mixed_curve(sys, w_minus, CurveParam::new(Family::One, self.s1, epsilon))?.state;
        let b = mixed_curve(sys, a, CurveParam::new(Family::Two, self.s2, epsilon))?.state;
        Ok(b.sup_dist(&w_plus))
    }
}

/// Strengths below this are not emitted as fronts.
pub const DROP_STRENGTH: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-14;

/// Riemann solver with grid fans for both families and default speeds.
pub fn solve_riemann(
    sys: &dyn HyperbolicSystem,
    w_minus: RiemannPoint,
    w_plus: RiemannPoint,
    epsilon: f64,
) -> Result<RiemannFan> {
    solve_riemann_with(sys, w_minus, w_plus, &Scheme::new(epsilon), [FanSplit::Grid; 2])
}

fn compose(
    sys: &dyn HyperbolicSystem,
    w: RiemannPoint,
    s: [f64; 2],
    scheme: &Scheme,
) -> Result<(MixedPoint, MixedPoint)> {
    let a = mixed_with(sys, w, CurveParam::new(Family::One, s[0], scheme.blend_epsilon), scheme.interpolated_speed)?;
    let b = mixed_with(sys, a.state, CurveParam::new(Family::Two, s[1], scheme.blend_epsilon), scheme.interpolated_speed)?;
    Ok((a, b))
}

/// Finds `(s1, s2)` with `Ψ2(Ψ1(w−, s1), s2) = w+`.
pub fn riemann_strengths(
    sys: &dyn HyperbolicSystem,
    w_minus: RiemannPoint,
    w_plus: RiemannPoint,
    scheme: &Scheme,
) -> Result<[f64; 2]> {
    let mut s = [w_plus.w1 - w_minus.w1, w_plus.w2 - w_minus.w2];
    let resid = |s: [f64; 2]| -> Result<[f64; 2]> {
        let (_, b) = compose(sys, w_minus, s, scheme)?;
        Ok([b.state.w1 - w_plus.w1, b.state.w2 - w_plus.w2])
    };
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = resid(s)?;
    for _ in 0..NEWTON_MAX_ITER {
        if norm(r) <= NEWTON_TOL {
            return Ok(s);
        }
        let h = 1e-7;
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut sp = s;
            let mut sm = s;
            sp[k] += h;
            sm[k] -= h;
            let (rp, rm) = (resid(sp)?, resid(sm)?);
            jac[0][k] = (rp[0] - rm[0]) / (2.0 * h);
            jac[1][k] = (rp[1] - rm[1]) / (2.0 * h);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::Solver(format!("singular Riemann Jacobian, det = {det:e}")));
        }
        let step = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        // Damped update: halve the step while the residual does not decrease.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [s[0] + lambda * step[0], s[1] + lambda * step[1]];
            if let Ok(rt) = resid(trial) {
                if norm(rt) < norm(r) || norm(rt) <= NEWTON_TOL {
                    s = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(r) <= 1e-10 {
        Ok(s)
    } else {
        Err(Error::Solver(format!(
            "Newton stalled for w- = ({}, {}), w+ = ({}, {}), residual {:e}",
            w_minus.w1,
            w_minus.w2,
            w_plus.w1,
            w_plus.w2,
            norm(r)
        )))
    }
}

/// Grid breakpoints strictly inside `(lo, hi)`.
fn fan_breakpoints(lo: f64, hi: f64, eps: f64) -> Vec<f64> {
    let delta = 1e-9 * eps;
    let mut j = ((lo + delta) / eps).floor() as i64 + 1;
    let mut pts = Vec::new();
    loop {
        let x = j as f64 * eps;
        if x >= hi - delta {
            break;
        }
        if x > lo + delta {
            pts.push(x);
        }
        j += 1;
    }
    pts
}

/// Full Riemann solver with explicit scheme options and per-family fan handling.
pub fn solve_riemann_with(
    sys: &dyn HyperbolicSystem,
    w_minus: RiemannPoint,
    w_plus: RiemannPoint,
    scheme: &Scheme,
    split: [FanSplit; 2],
) -> Result<RiemannFan> {
    let dom = sys.domain();
    dom.check(w_minus)?;
    dom.check(w_plus)?;
    if w_minus == w_plus {
        return Ok(RiemannFan { s1: 0.0, s2: 0.0, w_star: w_minus, fronts: Vec::new() });
    }
    let mut s = riemann_strengths(sys, w_minus, w_plus, scheme)?;
    for v in s.iter_mut() {
        if v.abs() <= DROP_STRENGTH {
            *v = 0.0;
        }
    }
    let (a, b) = compose(sys, w_minus, s, scheme)?;
    // Snap the intermediate state so that the chain of states ends exactly at w+.
    let w_star = if s[1] == 0.0 {
        w_plus
    } else if s[0] == 0.0 {
        w_minus
    } else {
        a.state
    };
    let mut fronts = Vec::new();
    emit(sys, Family::One, w_minus, w_star, s[0], a, scheme, split[0], &mut fronts);
    emit(sys, Family::Two, w_star, w_plus, s[1], b, scheme, split[1], &mut fronts);
    Ok(RiemannFan { s1: s[0], s2: s[1], w_star, fronts })
}

#[allow(clippy::too_many_arguments)]
fn emit(
    sys: &dyn HyperbolicSystem,
    fam: Family,
    left: RiemannPoint,
    right: RiemannPoint,
    s: f64,
    pt: MixedPoint,
    scheme: &Scheme,
    split: FanSplit,
    out: &mut Vec<FrontProto>,
) {
    if s == 0.0 {
        return;
    }
    let kind = pt.kind.expect("nonzero strength has a kind");
    let fan_speed = |l: RiemannPoint, r: RiemannPoint| match scheme.fan_speed {
        FanSpeed::RightState => sys.lambda(fam, r),
        FanSpeed::Midpoint => {
            let m = RiemannPoint::new(0.5 * (l.w1 + r.w1), 0.5 * (l.w2 + r.w2));
            sys.lambda(fam, m)
        }
    };
    if kind != WaveKind::Rarefaction {
        let strength = right.get(fam) - left.get(fam);
        out.push(FrontProto { family: fam, kind, strength, speed: pt.speed, left, right });
        return;
    }
    let (lo, hi) = (left.get(fam), right.get(fam));
    let cuts = match split {
        FanSplit::Grid => fan_breakpoints(lo.min(hi), lo.max(hi), scheme.epsilon),
        FanSplit::Single => Vec::new(),
    };
    let mut prev = left;
    let mut push = |next: RiemannPoint, prev: RiemannPoint| {
        out.push(FrontProto {
            family: fam,
            kind,
            strength: next.get(fam) - prev.get(fam),
            speed: fan_speed(prev, next),
            left: prev,
            right: next,
        });
    };
    let ordered: Vec<f64> = if hi >= lo { cuts } else { cuts.into_iter().rev().collect() };
    for c in ordered {
        let next = prev.with(fam, c);
        push(next, prev);
        prev = next;
    }
    push(right, prev);
}

/// Strict Lax inequality `λi(right) < speed < λi(left)` for a compressive front.
pub fn lax_admissible(sys: &dyn HyperbolicSystem, f: &FrontProto, tol: f64) -> bool {
    let l = sys.lambda(f.family, f.left);
    let r = sys.lambda(f.family, f.right);
    r + tol < f.speed && f.speed < l - tol
}
