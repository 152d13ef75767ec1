//! Event-driven front tracking: profiles, the interaction engine, initial
//! data and weak-form residuals.

mod engine;
mod init;
mod io;
mod residual;

pub use engine::{
    evolve, next_interaction, resolve_interaction, rh_projection_speed, EngineOptions, Evolution, FrontRecord, History,
    InteractionEvent, InteractionRecord, SolverKind,
};
pub use init::{init_from_steps, init_profile, StepData};
pub use io::{read_profile_csv, write_profile_csv};
pub use residual::{weak_residual, WeakTestSpec};

use crate::error::{Error, Result};
use crate::hypsys::{HyperbolicSystem, RiemannPoint};
use crate::wavecurves::WaveKind;
use crate::Family;
use serde::{Deserialize, Serialize};

pub type FrontId = usize;

/// One traveling discontinuity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub id: FrontId,
    pub position: f64,
    pub family: Family,
    pub kind: WaveKind,
    /// Signed jump of the front's own Riemann invariant.
    pub strength: f64,
    pub speed: f64,
    pub left_w: RiemannPoint,
    pub right_w: RiemannPoint,
}

/// Piecewise-constant snapshot: ordered fronts and the state at `−∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub leftmost_state: RiemannPoint,
    pub fronts: Vec<Front>,
    pub time: f64,
}

impl Profile {
    pub fn constant(state: RiemannPoint, time: f64) -> Self {
        Self { leftmost_state: state, fronts: Vec::new(), time }
    }

    pub fn rightmost_state(&self) -> RiemannPoint {
        self.fronts.last().map_or(self.leftmost_state, |f| f.right_w)
    }

    /// State at `x`; at a front position the right state is returned.
    pub fn state_at(&self, x: f64) -> RiemannPoint {
        let k = self.fronts.partition_point(|f| f.position <= x);
        if k == 0 {
            self.leftmost_state
        } else {
            self.fronts[k - 1].right_w
        }
    }

    /// Fronts moved linearly to time `t`, without resolving collisions.
    pub fn advanced(&self, t: f64) -> Profile {
        let dt = t - self.time;
        let mut p = self.clone();
        for f in &mut p.fronts {
            f.position += f.speed * dt;
        }
        p.time = t;
        p
    }

    /// Sum of `|σ|` of one family's fronts with position in `[a, b]`.
    pub fn family_variation(&self, fam: Family, a: f64, b: f64) -> f64 {
        self.fronts
            .iter()
            .filter(|f| f.family == fam && f.position >= a && f.position <= b)
            .map(|f| f.strength.abs())
            .sum()
    }

    /// Total variation of `w_fam` read off the state chain.
    pub fn invariant_variation(&self, fam: Family) -> f64 {
        self.fronts.iter().map(|f| (f.right_w.get(fam) - f.left_w.get(fam)).abs()).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.fronts
            .iter()
            .map(|f| f.right_w.sup_norm())
            .fold(self.leftmost_state.sup_norm(), f64::max)
    }

    /// Checks ordering, state chaining, strength bookkeeping and, for shocks, the Lax inequality.
    pub fn check_invariants(&self, sys: &dyn HyperbolicSystem, epsilon: f64, tol: f64) -> Result<()> {
        let mut prev = self.leftmost_state;
        let mut last_x = f64::NEG_INFINITY;
        let signs = sys.gnl_signs();
        for f in &self.fronts {
            let fail = |what: &str| Err(Error::Numerical(format!("front {} at x = {}: {what}", f.id, f.position)));
            if f.left_w.sup_dist(&prev) > tol {
                return fail("left state does not match previous right state");
            }
            if f.position < last_x - tol {
                return fail("fronts out of order");
            }
            let jump = f.right_w.get(f.family) - f.left_w.get(f.family);
            if (jump - f.strength).abs() > tol.max(1e-12) {
                return fail("strength differs from invariant jump");
            }
            let oriented = signs[f.family.index()] * f.strength;
            match f.kind {
                WaveKind::Rarefaction if !(oriented > 0.0 && f.strength.abs() <= epsilon * (1.0 + 1e-6)) => {
                    return fail("rarefaction front strength outside (0, eps]");
                }
                WaveKind::Shock | WaveKind::Interpolated if oriented >= 0.0 => {
                    return fail("compressive front with expansive strength");
                }
                WaveKind::Shock => {
                    let (l, r) = (sys.lambda(f.family, f.left_w), sys.lambda(f.family, f.right_w));
                    if !(r - 1e-10 < f.speed && f.speed < l + 1e-10) {
                        return fail("Lax inequality violated");
                    }
                }
                _ => {}
            }
            prev = f.right_w;
            last_x = f.position;
        }
        Ok(())
    }

    /// `∫ |u(x) − v(x)|₁ dx` over `[a, b]` in conserved variables, computed exactly.
    pub fn l1_distance(&self, other: &Profile, sys: &dyn HyperbolicSystem, a: f64, b: f64) -> f64 {
        let mut cuts: Vec<f64> = self
            .fronts
            .iter()
            .chain(other.fronts.iter())
            .map(|f| f.position)
            .filter(|&x| x > a && x < b)
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                let (u, v) = (sys.state(self.state_at(m)), sys.state(other.state_at(m)));
                ((u[0] - v[0]).abs() + (u[1] - v[1]).abs()) * (w[1] - w[0])
            })
            .sum()
    }
}
