use super::{propagate, ShiftSeed};
use crate::error::{Error, Result};
use crate::fronttrack::{evolve, EngineOptions, FrontId, History, Profile};
use crate::HyperbolicSystem;
use serde::{Deserialize, Serialize};

/// One displaced re-run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdStep {
    pub h: f64,
    /// Sample times at which every front could be matched.
    pub matched_times: Vec<f64>,
    /// First sample time where matching failed.
    pub topology_change_at: Option<f64>,
    /// `max |x_h − x|` over matched fronts.
    pub max_displacement: f64,
    /// `max |(x_h − x)/h − ξ|` over matched fronts.
    pub max_derivative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    pub seed: ShiftSeed,
    pub steps: Vec<FdStep>,
    /// Log-log slope of the displacement against `h`.
    pub displacement_slope: f64,
    /// Log-log slope of the derivative error against `h`; NaN when the error
    /// vanishes at every step.
    pub error_slope: f64,
    pub max_derivative_error: f64,
    pub topology_changed: bool,
    /// Interactions inside the seed's cone before the last sample time.
    pub shifted_interactions: usize,
}

/// Same number of fronts, same families and strengths, so the run followed
/// the same sequence of Riemann problems.
fn same_topology(a: &Profile, b: &Profile) -> bool {
    a.fronts.len() == b.fronts.len()
        && a.fronts
            .iter()
            .zip(&b.fronts)
            .all(|(f, g)| f.family == g.family && f.kind == g.kind && (f.strength - g.strength).abs() <= 1e-12)
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Re-runs `initial` with front `seed` displaced by `h·xi0` for each `h` and
/// compares the displaced fronts with the propagated shifts at `sample_times`.
/// `history` must be the log of `initial` evolved with `opts`.
#[allow(clippy::too_many_arguments)]
pub fn finite_difference_check(
    sys: &dyn HyperbolicSystem,
    initial: &Profile,
    history: &History,
    seed: FrontId,
    xi0: f64,
    hs: &[f64],
    sample_times: &[f64],
    opts: &EngineOptions,
) -> Result<FdReport> {
    if seed >= initial.fronts.len() {
        return Err(Error::Config(format!("seed {seed} is not an initial front")));
    }
    let tau = initial.time;
    let s = ShiftSeed { front: seed, xi0, tau };
    let ledger = propagate(history, s, &[])?;
    let mut times: Vec<f64> = sample_times.iter().copied().filter(|&t| t > tau && t <= history.t_end).collect();
    times.sort_by(f64::total_cmp);
    let t_last = times.last().copied().unwrap_or(tau);
    let base: Vec<Profile> = times.iter().map(|&t| history.profile_at(t)).collect();

    let mut steps = Vec::with_capacity(hs.len());
    for &h in hs {
        let mut moved = initial.clone();
        let x = moved.fronts[seed].position + h * xi0;
        let ordered = (seed == 0 || moved.fronts[seed - 1].position <= x)
            && moved.fronts.get(seed + 1).map_or(true, |f| x <= f.position);
        let mut step = FdStep {
            h,
            matched_times: Vec::new(),
            topology_change_at: None,
            max_displacement: 0.0,
            max_derivative_error: 0.0,
        };
        if !ordered {
            step.topology_change_at = Some(tau);
            steps.push(step);
            continue;
        }
        moved.fronts[seed].position = x;
        let run = evolve(sys, &moved, history.t_end, opts)?;
        for (&t, p) in times.iter().zip(&base) {
            let q = run.history.profile_at(t);
            if !same_topology(p, &q) {
                step.topology_change_at = Some(t);
                break;
            }
            for (f, g) in p.fronts.iter().zip(&q.fronts) {
                let d = g.position - f.position;
                step.max_displacement = step.max_displacement.max(d.abs());
                if h != 0.0 {
                    let e = (d / h - ledger.xi[f.id]).abs();
                    step.max_derivative_error = step.max_derivative_error.max(e);
                }
            }
            step.matched_times.push(t);
        }
        steps.push(step);
    }
    let disp: Vec<(f64, f64)> = steps.iter().filter(|s| !s.matched_times.is_empty()).map(|s| (s.h.abs(), s.max_displacement)).collect();
    let err: Vec<(f64, f64)> = steps.iter().filter(|s| !s.matched_times.is_empty()).map(|s| (s.h.abs(), s.max_derivative_error)).collect();
    Ok(FdReport {
        seed: s,
        displacement_slope: loglog_slope(&disp),
        error_slope: loglog_slope(&err),
        max_derivative_error: steps.iter().map(|s| s.max_derivative_error).fold(0.0, f64::max),
        topology_changed: steps.iter().any(|s| s.topology_change_at.is_some()),
        shifted_interactions: ledger.interactions.iter().filter(|r| r.time <= t_last).count(),
        steps,
    })
}
