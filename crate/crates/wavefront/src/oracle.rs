//! First-order Godunov reference solver for the exponential p-system, with
//! its own exact Riemann solver, and exact L¹ distances between step functions.

use crate::error::{Error, Result};
use crate::fronttrack::{evolve, init_from_steps, EngineOptions, Profile, StepData};
use crate::hypsys::PSystemExp;
use crate::io::write_table;
use crate::HyperbolicSystem;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MAX_CFL: f64 = 0.9;

/// Velocity reached from `(vl, zl)` along the 1-wave curve at volume `v`.
fn z_left(vl: f64, zl: f64, v: f64) -> (f64, f64) {
    if v >= vl {
        (zl + 2.0 * ((-vl / 2.0).exp() - (-v / 2.0).exp()), (-v / 2.0).exp())
    } else {
        let (pv, pl) = ((-v).exp(), (-vl).exp());
        let g = (vl - v) * (pv - pl);
        let s = g.sqrt();
        let dg = -(pv - pl) - (vl - v) * pv;
        (zl - s, if s > 0.0 { -dg / (2.0 * s) } else { (-vl / 2.0).exp() })
    }
}

/// Velocity left of the 2-wave that ends at `(vr, zr)`, at volume `v`.
fn z_right(vr: f64, zr: f64, v: f64) -> (f64, f64) {
    if v >= vr {
        (zr + 2.0 * ((-v / 2.0).exp() - (-vr / 2.0).exp()), -(-v / 2.0).exp())
    } else {
        let (pv, pr) = ((-v).exp(), (-vr).exp());
        let g = (vr - v) * (pv - pr);
        let s = g.sqrt();
        let dg = -(pv - pr) - (vr - v) * pv;
        (zr + s, if s > 0.0 { dg / (2.0 * s) } else { -(-vr / 2.0).exp() })
    }
}

/// Middle state `(v*, z*)` of the Riemann problem in physical variables.
pub fn middle_state(left: (f64, f64), right: (f64, f64)) -> Result<(f64, f64)> {
    if left == right {
        return Ok(left);
    }
    let phi = |v: f64| {
        let (a, da) = z_left(left.0, left.1, v);
        let (b, db) = z_right(right.0, right.1, v);
        (a - b, da - db)
    };
    let (mut lo, mut hi) = (left.0.min(right.0) - 1.0, left.0.max(right.0) + 1.0);
    while phi(lo).0 > 0.0 {
        lo -= 1.0;
    }
    while phi(hi).0 < 0.0 {
        hi += 1.0;
        if hi > 60.0 {
            return Err(Error::Numerical(format!("no middle state between {left:?} and {right:?} (vacuum)")));
        }
    }
    let mut v = 0.5 * (left.0 + right.0);
    for _ in 0..100 {
        let (f, df) = phi(v);
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let mut next = v - f / df;
        if !(next > lo && next < hi) || !df.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - v).abs() <= 1e-15 * (1.0 + v.abs()) {
            v = next;
            break;
        }
        v = next;
    }
    Ok((v, z_left(left.0, left.1, v).0))
}

/// Cell averages of `(v, z)` on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FvGrid {
    /// Left edge of the first cell.
    pub x0: f64,
    pub h: f64,
    pub cfl: f64,
    pub u: Vec<[f64; 2]>,
    pub time: f64,
}

impl FvGrid {
    /// Exact cell averages of step data on `[a, b]`.
    pub fn from_steps(sys: &dyn HyperbolicSystem, data: &StepData, (a, b): (f64, f64), h: f64, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= MAX_CFL) {
            return Err(Error::Config(format!("CFL number {cfl} outside (0, {MAX_CFL}]")));
        }
        let n = ((b - a) / h).ceil() as usize;
        let f = StepFunction::from_steps(sys, data);
        let u = (0..n).map(|i| f.average(a + i as f64 * h, a + (i + 1) as f64 * h)).collect();
        Ok(Self { x0: a, h, cfl, u, time: 0.0 })
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.u.len()).map(|i| self.x0 + (i as f64 + 0.5) * self.h)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_table(path, &["x_center", "u1", "u2"], self.centers().zip(&self.u).map(|(x, u)| vec![x, u[0], u[1]]))
    }
}

/// Advances the grid to time `t` with Godunov's scheme and transmissive ends.
pub fn fv_advance(sys: &PSystemExp, grid: &mut FvGrid, t: f64) -> Result<()> {
    let c = sys.speed_scale();
    let n = grid.u.len();
    let mut flux = vec![[0.0; 2]; n + 1];
    while grid.time < t {
        let smax = grid.u.iter().map(|u| (-u[0] / 2.0).exp()).fold(0.0, f64::max) / c;
        if !smax.is_finite() || smax <= 0.0 {
            return Err(Error::Numerical(format!("invalid wave speed {smax} at t = {}", grid.time)));
        }
        let dt = (grid.cfl * grid.h / smax).min(t - grid.time);
        for i in 0..=n {
            let l = grid.u[i.saturating_sub(1)];
            let r = grid.u[i.min(n - 1)];
            let (v, z) = middle_state((l[0], l[1]), (r[0], r[1]))?;
            flux[i] = [-z / c, (-v).exp() / c];
        }
        let k = dt / grid.h;
        for i in 0..n {
            grid.u[i][0] -= k * (flux[i + 1][0] - flux[i][0]);
            grid.u[i][1] -= k * (flux[i + 1][1] - flux[i][1]);
        }
        grid.time += dt;
    }
    Ok(())
}

/// Godunov solution at time `t` on a region padded by the domain of
/// dependence of the data's breakpoints.
pub fn fv_evolve(sys: &PSystemExp, data: &StepData, t: f64, h: f64, cfl: f64) -> Result<FvGrid> {
    let (lo, hi) = data_span(data);
    let pad = 1.1 * t + 10.0 * h;
    let mut g = FvGrid::from_steps(sys, data, (lo - pad, hi + pad), h, cfl)?;
    fv_advance(sys, &mut g, t)?;
    Ok(g)
}

fn data_span(data: &StepData) -> (f64, f64) {
    let xs = data.jumps.iter().map(|j| j.0);
    let lo = xs.clone().fold(f64::INFINITY, f64::min);
    let hi = xs.fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 0.0)
    }
}

/// Piecewise-constant function: `values[0]` left of `breaks[0]`, `values[i]`
/// on `[breaks[i−1], breaks[i])`, `values[n]` to the right.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<[f64; 2]>,
}

impl StepFunction {
    pub fn from_profile(sys: &dyn HyperbolicSystem, p: &Profile) -> Self {
        let mut values = vec![sys.state(p.leftmost_state)];
        values.extend(p.fronts.iter().map(|f| sys.state(f.right_w)));
        Self { breaks: p.fronts.iter().map(|f| f.position).collect(), values }
    }

    pub fn from_steps(sys: &dyn HyperbolicSystem, data: &StepData) -> Self {
        let mut values = vec![sys.state(data.left)];
        values.extend(data.jumps.iter().map(|j| sys.state(j.1)));
        Self { breaks: data.jumps.iter().map(|j| j.0).collect(), values }
    }

    /// Cells as steps, extended by the edge cells.
    pub fn from_grid(g: &FvGrid) -> Self {
        let n = g.u.len();
        let mut values = Vec::with_capacity(n + 2);
        values.push(g.u[0]);
        values.extend(g.u.iter().copied());
        values.push(g.u[n - 1]);
        Self { breaks: (0..=n).map(|i| g.x0 + i as f64 * g.h).collect(), values }
    }

    pub fn value_at(&self, x: f64) -> [f64; 2] {
        self.values[self.breaks.partition_point(|&b| b <= x)]
    }

    /// Pieces `(x_lo, x_hi, value)` covering `[a, b]`.
    fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64, [f64; 2])> {
        let mut out = Vec::new();
        let mut k = self.breaks.partition_point(|&x| x <= a);
        let mut x = a;
        while x < b {
            let end = self.breaks.get(k).copied().unwrap_or(f64::INFINITY).min(b);
            if end > x {
                out.push((x, end, self.values[k]));
            }
            x = end;
            k += 1;
        }
        out
    }

    pub fn average(&self, a: f64, b: f64) -> [f64; 2] {
        let mut s = [0.0; 2];
        for (lo, hi, v) in self.pieces(a, b) {
            s[0] += (hi - lo) * v[0];
            s[1] += (hi - lo) * v[1];
        }
        [s[0] / (b - a), s[1] / (b - a)]
    }

    /// `∫_a^b |u|₁ dx`.
    pub fn l1_norm(&self, a: f64, b: f64) -> f64 {
        self.pieces(a, b).iter().map(|(lo, hi, v)| (hi - lo) * (v[0].abs() + v[1].abs())).sum()
    }
}

/// `∫_a^b |f − g|₁ dx`, computed on the merged breakpoints.
pub fn l1_distance(f: &StepFunction, g: &StepFunction, (a, b): (f64, f64)) -> f64 {
    let mut cuts: Vec<f64> = f.breaks.iter().chain(&g.breaks).copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            let (u, v) = (f.value_at(m), g.value_at(m));
            (w[1] - w[0]) * ((u[0] - v[0]).abs() + (u[1] - v[1]).abs())
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLevel {
    pub epsilon: f64,
    pub h: f64,
    pub l1: f64,
    pub fronts: usize,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleStudy {
    pub t: f64,
    pub interval: (f64, f64),
    /// `‖ū‖_L¹` on the comparison interval.
    pub data_norm: f64,
    pub levels: Vec<OracleLevel>,
    pub monotone: bool,
    /// Final distance relative to `data_norm`.
    pub final_relative: f64,
    /// Godunov cells of the last level.
    #[serde(skip)]
    pub finest: Option<FvGrid>,
}

/// Front tracking against Godunov at time `t` over joint refinement levels
/// `(ε, h)`, on the data span padded by `t`. Front tracking starts from the
/// data rounded to the `ε` grid, so levels whose grid does not contain the
/// data values carry an extra `O(ε)` initial error.
pub fn oracle_compare(sys: &PSystemExp, data: &StepData, levels: &[(f64, f64)], t: f64, cfl: f64) -> Result<OracleStudy> {
    let (lo, hi) = data_span(data);
    let interval = (lo - t, hi + t);
    let data_norm = StepFunction::from_steps(sys, data).l1_norm(interval.0, interval.1);
    let mut finest = None;
    let out = levels
        .iter()
        .map(|&(eps, h)| {
            let opts = EngineOptions::new(eps);
            let d = data.quantized(eps);
            let ev = evolve(sys, &init_from_steps(sys, &d, &opts)?, t, &opts)?;
            let g = fv_evolve(sys, data, t, h, cfl)?;
            let l1 = l1_distance(&StepFunction::from_profile(sys, &ev.profile), &StepFunction::from_grid(&g), interval);
            let level = OracleLevel { epsilon: eps, h, l1, fronts: ev.profile.fronts.len(), cells: g.u.len() };
            finest = Some(g);
            Ok(level)
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = out.windows(2).all(|w| w[1].l1 < w[0].l1);
    let final_relative = out.last().map_or(f64::NAN, |l| l.l1 / data_norm);
    Ok(OracleStudy { t, interval, data_norm, levels: out, monotone, final_relative, finest })
}
