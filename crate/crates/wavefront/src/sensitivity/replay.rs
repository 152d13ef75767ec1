use super::{outgoing_shift, ShiftLedger};
use crate::error::{Error, Result};
use crate::fronttrack::{rh_projection_speed, History};
use crate::{Family, HyperbolicSystem, RiemannPoint};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub s: f64,
    /// `(t, Σ |σ̃ ξ̃|)` at the sample times.
    pub series: Vec<(f64, f64)>,
    /// `Σ |σ ξ|` at the end of the run.
    pub terminal_v: f64,
    /// `Σ |σ̃ ξ̃|` at the end of the run.
    pub terminal_v_tilde: f64,
    /// `Σ |σ ξ − σ̃ ξ̃|` at the end of the run.
    pub terminal_discrepancy: f64,
    /// Strength the Temple rules assigned to a family with no outgoing front in the log.
    pub unassigned: f64,
    /// Interactions whose Temple speeds coincided; the logged speeds were used instead.
    pub speed_fallbacks: usize,
}

fn temple_speed(sys: &dyn HyperbolicSystem, fam: Family, sigma: f64, l: RiemannPoint, r: RiemannPoint) -> f64 {
    if sys.gnl_signs()[fam.index()] * sigma < 0.0 {
        rh_projection_speed(sys, l, r)
    } else {
        sys.lambda(fam, r)
    }
}

/// Replays the log with the original wave strengths and shifts up to time `s`
/// and the Temple-class rules of `temple` afterwards: strengths of each family
/// add up across interactions, states are rebuilt from the hybrid strengths and
/// shifts are transferred with the Temple speeds.
pub fn temple_replay(
    temple: &dyn HyperbolicSystem,
    history: &History,
    ledger: &ShiftLedger,
    s: f64,
    sample_times: &[f64],
) -> Result<ReplayReport> {
    let tau = ledger.seeds.first().map_or(history.t_start, |x| x.tau);
    if s < tau || s > history.t_end {
        return Err(Error::Config(format!("switch time {s} outside [{tau}, {}]", history.t_end)));
    }
    let n = history.fronts.len();
    let mut sig: Vec<f64> = history.fronts.iter().map(|r| r.front.strength).collect();
    let mut xi = ledger.xi.clone();
    let mut wl: Vec<RiemannPoint> = history.fronts.iter().map(|r| r.front.left_w).collect();
    let mut wr: Vec<RiemannPoint> = history.fronts.iter().map(|r| r.front.right_w).collect();
    let mut speed: Vec<f64> = vec![f64::NAN; n];
    let mut unassigned = 0.0;
    let mut fallbacks = 0;

    let mut times: Vec<f64> = sample_times.iter().copied().filter(|&t| t >= tau && t <= history.t_end).collect();
    times.sort_by(f64::total_cmp);
    let mut series = Vec::with_capacity(times.len());
    let mut next = 0;
    let snapshot = |t: f64, sig: &[f64], xi: &[f64]| -> f64 {
        history.profile_at(t).fronts.iter().map(|f| (sig[f.id] * xi[f.id]).abs()).sum()
    };

    for rec in history.interactions_in(s, history.t_end) {
        while next < times.len() && times[next] < rec.time {
            series.push((times[next], snapshot(times[next], &sig, &xi)));
            next += 1;
        }
        let mut sums = [0.0; 2];
        for &i in &rec.incoming {
            sums[history.fronts[i].front.family.index()] += sig[i];
        }
        let first = rec.incoming[0];
        let last = *rec.incoming.last().unwrap();
        let (w_left, w_right) = (wl[first], wr[last]);
        let w_star = RiemannPoint::new(w_right.w1, w_left.w2);

        // shift transfer uses only incoming fronts that carry strength
        let mut speed_of = |i: usize| {
            if speed[i].is_nan() {
                speed[i] = temple_speed(temple, history.fronts[i].front.family, sig[i], wl[i], wr[i]);
            }
            speed[i]
        };
        let real: Vec<usize> = rec.incoming.iter().copied().filter(|&i| sig[i] != 0.0).collect();
        let pair = match real.as_slice() {
            [] => None,
            [a] => Some((*a, *a)),
            [a, .., b] => Some((*a, *b)),
        };
        let pair_speeds = pair.map(|(a, b)| {
            let (la, lb) = (speed_of(a), speed_of(b));
            if a != b && (lb - la).abs() < 1e-14 {
                fallbacks += 1;
                (history.fronts[a].front.speed, history.fronts[b].front.speed, true)
            } else {
                (la, lb, false)
            }
        });

        let mut logged = [0.0; 2];
        let mut count = [0usize; 2];
        for &o in &rec.outgoing {
            let f = &history.fronts[o].front;
            logged[f.family.index()] += f.strength;
            count[f.family.index()] += 1;
        }
        for k in 0..2 {
            if count[k] == 0 && sums[k] != 0.0 {
                unassigned += sums[k].abs();
            }
        }
        let mut seen = [0usize; 2];
        let mut cum = [0.0; 2];
        for &o in &rec.outgoing {
            let f = &history.fronts[o].front;
            let k = f.family.index();
            let share = if logged[k] != 0.0 { f.strength / logged[k] } else { 1.0 / count[k] as f64 };
            sig[o] = sums[k] * share;
            seen[k] += 1;
            let (lo, hi) = match f.family {
                Family::One => (w_left, w_star),
                Family::Two => (w_star, w_right),
            };
            let left = lo.with(f.family, lo.get(f.family) + cum[k]);
            cum[k] += sig[o];
            let right = if seen[k] == count[k] { hi } else { lo.with(f.family, lo.get(f.family) + cum[k]) };
            wl[o] = left;
            wr[o] = right;
            speed[o] = temple_speed(temple, f.family, sig[o], left, right);
            xi[o] = match pair {
                None => 0.0,
                Some((a, b)) if a == b => xi[a],
                Some((a, b)) => {
                    let (la, lb, fallback) = pair_speeds.unwrap();
                    let lo_speed = if fallback { f.speed } else { speed[o] };
                    outgoing_shift(xi[a], la, xi[b], lb, lo_speed)?
                }
            };
        }
    }
    while next < times.len() {
        series.push((times[next], snapshot(times[next], &sig, &xi)));
        next += 1;
    }
    let end = history.profile_at(history.t_end);
    let (mut v, mut vt, mut d) = (0.0, 0.0, 0.0);
    for f in &end.fronts {
        let a = f.strength * ledger.xi[f.id];
        let b = sig[f.id] * xi[f.id];
        v += a.abs();
        vt += b.abs();
        d += (a - b).abs();
    }
    Ok(ReplayReport {
        s,
        series,
        terminal_v: v,
        terminal_v_tilde: vt,
        terminal_discrepancy: d,
        unassigned,
        speed_fallbacks: fallbacks,
    })
}
