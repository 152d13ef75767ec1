//! First-order shifts of fronts: transfer across interactions, propagation
//! through a recorded run, and the derived functionals and experiments.

mod estimates;
mod fd;
mod homotopy;
mod lipschitz;
mod replay;

pub use estimates::{fit_interaction_constants, resolve_pair, EstimateConstants, EstimateSpec, PairInteraction};
pub use fd::{finite_difference_check, FdReport, FdStep};
pub use homotopy::{homotopy_distance, HomotopyOptions, HomotopyReport, PathMetric};
pub use lipschitz::{lipschitz_estimate, lipschitz_estimate_for, LipschitzReport, SeedAmplification};
pub use replay::{temple_replay, ReplayReport};

use crate::error::{Error, Result};
use crate::fronttrack::{FrontId, History, Profile};
use crate::io::{write_json_lines, write_table};
use crate::wavecurves::WaveKind;
use crate::Family;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Shift of an outgoing front of speed `lambda_out`, given the incoming pair
/// `(ξ′, λ′)`, `(ξ″, λ″)`. The formula is symmetric in the two incoming fronts.
pub fn outgoing_shift(xi_a: f64, lam_a: f64, xi_b: f64, lam_b: f64, lambda_out: f64) -> Result<f64> {
    if xi_a == xi_b {
        return Ok(xi_a);
    }
    let gap = lam_b - lam_a;
    if gap.abs() < 1e-14 {
        return Err(Error::Degenerate(format!("incoming speeds {lam_a} and {lam_b} coincide")));
    }
    let dt = (xi_a - xi_b) / gap;
    Ok(xi_a - (lambda_out - lam_a) * dt)
}

/// Shifts `(ξ1, ξ2)` of the two outgoing fronts with speeds `(λ1, λ2)`.
/// Incoming fronts are `(σ, ξ, λ)` triples; the strengths do not enter.
pub fn transfer_shifts(incoming_a: (f64, f64, f64), incoming_b: (f64, f64, f64), outgoing: (f64, f64)) -> Result<(f64, f64)> {
    let (_, xa, la) = incoming_a;
    let (_, xb, lb) = incoming_b;
    Ok((outgoing_shift(xa, la, xb, lb, outgoing.0)?, outgoing_shift(xa, la, xb, lb, outgoing.1)?))
}

/// A shift rate `xi0` assigned at time `tau` to one front.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSeed {
    pub front: FrontId,
    pub xi0: f64,
    pub tau: f64,
}

/// Functionals at one sample time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: f64,
    /// `Σ |σ ξ|` over fronts alive at `t`.
    pub v_xi: f64,
    /// Cumulative `Σ (|ξ′| + |ξ″|)|σ′σ″|` over interactions in `(τ, t]`.
    pub q_xi: f64,
    /// Same, restricted to interactions of fronts of one family.
    pub q_xi_same: f64,
    /// Glimm potential of approaching pairs at `t`.
    pub q: f64,
    pub front_count: usize,
}

/// One interaction as seen by the shift calculus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftInteraction {
    pub time: f64,
    pub position: f64,
    pub families_in: Vec<Family>,
    pub sigma_in: Vec<f64>,
    pub xi_in: Vec<f64>,
    pub speed_in: Vec<f64>,
    pub families_out: Vec<Family>,
    pub sigma_out: Vec<f64>,
    pub xi_out: Vec<f64>,
    pub speed_out: Vec<f64>,
    pub multi: bool,
}

impl ShiftInteraction {
    pub fn same_family(&self) -> bool {
        self.families_in.windows(2).all(|w| w[0] == w[1])
    }

    /// `Σ_out |σξ| − Σ_in |σξ|`.
    pub fn v_xi_increase(&self) -> f64 {
        let out: f64 = self.sigma_out.iter().zip(&self.xi_out).map(|(s, x)| (s * x).abs()).sum();
        let inc: f64 = self.sigma_in.iter().zip(&self.xi_in).map(|(s, x)| (s * x).abs()).sum();
        out - inc
    }

    /// `(|ξ′| + |ξ″|)|σ′σ″|`, summed over incoming pairs.
    pub fn amount(&self) -> f64 {
        let n = self.sigma_in.len();
        let mut a = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                a += (self.xi_in[i].abs() + self.xi_in[j].abs()) * (self.sigma_in[i] * self.sigma_in[j]).abs();
            }
        }
        a
    }
}

/// Result of [`propagate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftLedger {
    pub seeds: Vec<ShiftSeed>,
    /// `|σ0 ξ0|` summed over seeds.
    pub v_xi_initial: f64,
    /// Final shift of every front of the run, indexed by id; zero where never reached.
    pub xi: Vec<f64>,
    pub rows: Vec<LedgerRow>,
    /// Interactions with at least one shifted incoming front.
    pub interactions: Vec<ShiftInteraction>,
    pub q_xi: f64,
    pub q_xi_same: f64,
    /// `sup_t V^ξ(t)` over `[τ, t_end]`.
    pub v_xi_max: f64,
    pub v_xi_final: f64,
    /// Some shifted interaction involved more than two fronts.
    pub multi_flagged: bool,
}

impl ShiftLedger {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_table(
            path,
            &["t", "V_xi", "Q_xi", "Q_xi_same", "Q", "front_count"],
            self.rows.iter().map(|r| vec![r.t, r.v_xi, r.q_xi, r.q_xi_same, r.q, r.front_count as f64]),
        )
    }

    pub fn write_interactions(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json_lines(path, &self.interactions)
    }
}

/// Glimm potential `Q = Σ |σα σβ|` over approaching pairs: a 2-front left of a
/// 1-front, or two fronts of one family at least one of which is compressive.
pub fn glimm_potential(p: &Profile) -> f64 {
    let mut q = 0.0;
    let mut left_two = 0.0;
    for f in &p.fronts {
        match f.family {
            Family::One => q += f.strength.abs() * left_two,
            Family::Two => left_two += f.strength.abs(),
        }
    }
    for fam in Family::BOTH {
        let (mut s, mut s2, mut r, mut r2) = (0.0, 0.0, 0.0, 0.0);
        for f in p.fronts.iter().filter(|f| f.family == fam) {
            let a = f.strength.abs();
            s += a;
            s2 += a * a;
            if f.kind == WaveKind::Rarefaction {
                r += a;
                r2 += a * a;
            }
        }
        q += 0.5 * (s * s - s2) - 0.5 * (r * r - r2);
    }
    q
}

/// Single-seed propagation with ledger rows at `sample_times`.
pub fn propagate(history: &History, seed: ShiftSeed, sample_times: &[f64]) -> Result<ShiftLedger> {
    propagate_many(history, &[seed], sample_times)
}

/// Propagates the superposition of several seeds assigned at a common time.
pub fn propagate_many(history: &History, seeds: &[ShiftSeed], sample_times: &[f64]) -> Result<ShiftLedger> {
    let tau = seeds.first().map_or(history.t_start, |s| s.tau);
    let mut xi = vec![0.0; history.fronts.len()];
    let mut v = 0.0;
    for s in seeds {
        if s.tau != tau {
            return Err(Error::Config("all seeds must share one time".into()));
        }
        let rec = history
            .fronts
            .get(s.front)
            .ok_or_else(|| Error::Config(format!("unknown front {}", s.front)))?;
        if !rec.alive_at(tau) && !(tau == history.t_end && rec.death_time == f64::INFINITY) {
            return Err(Error::Config(format!("front {} is not alive at t = {tau}", s.front)));
        }
        xi[s.front] += s.xi0;
    }
    for s in seeds {
        v += (history.fronts[s.front].front.strength * xi[s.front]).abs();
    }
    let v0 = v;
    let mut times: Vec<f64> = sample_times.iter().copied().filter(|&t| t >= tau && t <= history.t_end).collect();
    times.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(times.len());
    let mut next_row = 0;
    let (mut q_xi, mut q_same, mut v_max) = (0.0, 0.0, v);
    let mut records = Vec::new();
    let mut multi_flagged = false;

    let mut emit_rows = |upto: f64, xi: &[f64], q_xi: f64, q_same: f64, rows: &mut Vec<LedgerRow>| {
        while next_row < times.len() && times[next_row] < upto {
            let t = times[next_row];
            let p = history.profile_at(t);
            let v_xi = p.fronts.iter().map(|f| (f.strength * xi[f.id]).abs()).sum();
            rows.push(LedgerRow { t, v_xi, q_xi, q_xi_same: q_same, q: glimm_potential(&p), front_count: p.fronts.len() });
            next_row += 1;
        }
    };

    for rec in history.interactions_in(tau, history.t_end) {
        emit_rows(rec.time, &xi, q_xi, q_same, &mut rows);
        if rec.incoming.iter().all(|&i| xi[i] == 0.0) {
            continue;
        }
        let (a, b) = (rec.incoming[0], *rec.incoming.last().unwrap());
        let (fa, fb) = (&history.fronts[a].front, &history.fronts[b].front);
        let mut xi_out = Vec::with_capacity(rec.outgoing.len());
        for &o in &rec.outgoing {
            let lo = history.fronts[o].front.speed;
            let x = outgoing_shift(xi[a], fa.speed, xi[b], fb.speed, lo).map_err(|e| {
                Error::Degenerate(format!("interaction at t = {}, x = {}: {e}", rec.time, rec.position))
            })?;
            xi[o] = x;
            xi_out.push(x);
        }
        let si = ShiftInteraction {
            time: rec.time,
            position: rec.position,
            families_in: rec.incoming.iter().map(|&i| history.fronts[i].front.family).collect(),
            sigma_in: rec.incoming.iter().map(|&i| history.fronts[i].front.strength).collect(),
            xi_in: rec.incoming.iter().map(|&i| xi[i]).collect(),
            speed_in: rec.incoming.iter().map(|&i| history.fronts[i].front.speed).collect(),
            families_out: rec.outgoing.iter().map(|&i| history.fronts[i].front.family).collect(),
            sigma_out: rec.outgoing.iter().map(|&i| history.fronts[i].front.strength).collect(),
            xi_out,
            speed_out: rec.outgoing.iter().map(|&i| history.fronts[i].front.speed).collect(),
            multi: rec.multi,
        };
        multi_flagged |= rec.multi;
        let amount = si.amount();
        q_xi += amount;
        if si.same_family() {
            q_same += amount;
        }
        v += si.v_xi_increase();
        v_max = v_max.max(v);
        records.push(si);
    }
    emit_rows(f64::INFINITY, &xi, q_xi, q_same, &mut rows);
    let end = history.profile_at(history.t_end);
    let v_final = end.fronts.iter().map(|f| (f.strength * xi[f.id]).abs()).sum();
    Ok(ShiftLedger {
        seeds: seeds.to_vec(),
        v_xi_initial: v0,
        xi,
        rows,
        interactions: records,
        q_xi,
        q_xi_same: q_same,
        v_xi_max: v_max.max(v_final),
        v_xi_final: v_final,
        multi_flagged,
    })
}

/// Shift of every front of the run after propagating `seeds` up to `t_stop`,
/// indexed by id. Cheaper than a full ledger when only a window is needed.
pub fn shifts_until(history: &History, seeds: &[ShiftSeed], t_stop: f64) -> Result<Vec<f64>> {
    let mut xi = vec![0.0; history.fronts.len()];
    let Some(tau) = seeds.first().map(|s| s.tau) else {
        return Ok(xi);
    };
    for s in seeds {
        if s.front >= xi.len() {
            return Err(Error::Config(format!("unknown front {}", s.front)));
        }
        xi[s.front] += s.xi0;
    }
    for rec in history.interactions_in(tau, t_stop) {
        if rec.incoming.iter().all(|&i| xi[i] == 0.0) {
            continue;
        }
        let (a, b) = (rec.incoming[0], *rec.incoming.last().unwrap());
        let (fa, fb) = (&history.fronts[a].front, &history.fronts[b].front);
        for &o in &rec.outgoing {
            xi[o] = outgoing_shift(xi[a], fa.speed, xi[b], fb.speed, history.fronts[o].front.speed)?;
        }
    }
    Ok(xi)
}

/// Total `Q^ξ_same` of a propagated ledger.
pub fn same_family_interaction_mass(ledger: &ShiftLedger) -> f64 {
    ledger.q_xi_same
}
