use super::{propagate_many, ShiftSeed};
use crate::error::{Error, Result};
use crate::fronttrack::{evolve, init_from_steps, EngineOptions, Profile, StepData};
use crate::HyperbolicSystem;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Norm of the tangent `∂θ u^θ(t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMetric {
    /// `Σ |[u]_α|₁ |ξ_α|` in conserved variables, comparable with the L¹ distance.
    #[default]
    Conserved,
    /// `Σ |σ_α ξ_α|` in Riemann coordinates.
    Strength,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyOptions {
    pub n_steps: usize,
    pub metric: PathMetric,
    /// Maximum bisection depth of a θ-cell whose endpoints differ in topology.
    pub max_depth: u32,
    /// Relative slack allowed when comparing with the measured distance.
    pub slack: f64,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self { n_steps: 16, metric: PathMetric::Conserved, max_depth: 12, slack: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub t: f64,
    /// Length of the path `θ ↦ u^θ(t)`.
    pub bound: f64,
    /// Directly integrated `‖u0(t) − u1(t)‖_L¹`.
    pub measured: f64,
    /// `measured ≤ (1 + slack)·bound`.
    pub dominates: bool,
    /// Some cell reached the depth cap; its contribution used the largest sampled tangent.
    pub flagged: bool,
    pub evaluations: usize,
}

#[derive(Clone, PartialEq)]
struct Sample {
    tangent: f64,
    signature: Vec<(u8, u64)>,
}

fn path_point(d0: &StepData, d1: &StepData, theta: f64) -> StepData {
    StepData {
        left: d0.left,
        jumps: d0
            .jumps
            .iter()
            .zip(&d1.jumps)
            .map(|(&(x0, w), &(x1, _))| ((1.0 - theta) * x0 + theta * x1, w))
            .collect(),
    }
}

/// Upper bound on `‖u0(t) − u1(t)‖_L¹` by the length of the path of solutions
/// whose data move every jump linearly from `data0` to `data1`.
pub fn homotopy_distance(
    sys: &dyn HyperbolicSystem,
    data0: &StepData,
    data1: &StepData,
    t: f64,
    engine: &EngineOptions,
    opts: &HomotopyOptions,
) -> Result<HomotopyReport> {
    if data0.left != data1.left
        || data0.jumps.len() != data1.jumps.len()
        || data0.jumps.iter().zip(&data1.jumps).any(|(a, b)| a.1 != b.1)
    {
        return Err(Error::Config("endpoints must share their states and differ only in jump positions".into()));
    }
    if opts.n_steps == 0 {
        return Err(Error::Config("n_steps must be positive".into()));
    }
    let dx: Vec<f64> = data0.jumps.iter().zip(&data1.jumps).map(|(a, b)| b.0 - a.0).collect();

    let evaluate = |theta: f64| -> Result<(Sample, Profile)> {
        let data = path_point(data0, data1, theta);
        let p0 = init_from_steps(sys, &data, engine)?;
        // fronts of jump k share its position; jumps are laid out in order
        let mut seeds = Vec::with_capacity(p0.fronts.len());
        let mut k = 0;
        for f in &p0.fronts {
            while data.jumps[k].0 != f.position {
                k += 1;
            }
            if dx[k] != 0.0 {
                seeds.push(ShiftSeed { front: f.id, xi0: dx[k], tau: p0.time });
            }
        }
        let run = evolve(sys, &p0, t, engine)?;
        let ledger = propagate_many(&run.history, &seeds, &[])?;
        let tangent = run
            .profile
            .fronts
            .iter()
            .map(|f| {
                let xi = ledger.xi[f.id].abs();
                match opts.metric {
                    PathMetric::Strength => f.strength.abs() * xi,
                    PathMetric::Conserved => {
                        let (ul, ur) = (sys.state(f.left_w), sys.state(f.right_w));
                        ((ul[0] - ur[0]).abs() + (ul[1] - ur[1]).abs()) * xi
                    }
                }
            })
            .sum();
        let signature = run
            .profile
            .fronts
            .iter()
            .map(|f| (f.family.index() as u8 * 4 + f.kind as u8, f.strength.to_bits()))
            .collect();
        Ok((Sample { tangent, signature }, run.profile))
    };

    let mut cache: HashMap<u64, Sample> = HashMap::new();
    let mut endpoints = Vec::new();
    let mut sample = |theta: f64, cache: &mut HashMap<u64, Sample>| -> Result<Sample> {
        if let Some(s) = cache.get(&theta.to_bits()) {
            return Ok(s.clone());
        }
        let (s, p) = evaluate(theta)?;
        if theta == 0.0 || theta == 1.0 {
            endpoints.push((theta, p));
        }
        cache.insert(theta.to_bits(), s.clone());
        Ok(s)
    };

    let mut bound = 0.0;
    let mut flagged = false;
    let n = opts.n_steps;
    let mut stack: Vec<(f64, f64, u32)> = (0..n).rev().map(|i| (i as f64 / n as f64, (i + 1) as f64 / n as f64, 0)).collect();
    while let Some((a, b, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (sa, sm, sb) = (sample(a, &mut cache)?, sample(m, &mut cache)?, sample(b, &mut cache)?);
        if sa.signature == sm.signature && sm.signature == sb.signature {
            bound += sm.tangent * (b - a);
        } else if depth < opts.max_depth {
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        } else {
            flagged = true;
            bound += sa.tangent.max(sm.tangent).max(sb.tangent) * (b - a);
        }
    }
    let evaluations = cache.len();
    endpoints.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (u0, u1) = (&endpoints[0].1, &endpoints[1].1);
    let xs = data0.jumps.iter().chain(&data1.jumps).map(|j| j.0);
    let lo = xs.clone().fold(f64::INFINITY, f64::min) - t - 1.0;
    let hi = xs.fold(f64::NEG_INFINITY, f64::max) + t + 1.0;
    let measured = if data0.jumps.is_empty() { 0.0 } else { u0.l1_distance(u1, sys, lo, hi) };
    Ok(HomotopyReport {
        t,
        bound,
        measured,
        dominates: measured <= (1.0 + opts.slack) * bound + 1e-15,
        flagged,
        evaluations,
    })
}
