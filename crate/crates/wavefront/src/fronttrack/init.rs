use super::engine::outgoing_fronts;
use super::{EngineOptions, Front, Profile};
use crate::error::{Error, Result};
use crate::hypsys::{HyperbolicSystem, RiemannPoint};
use crate::io::fmt17;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Piecewise-constant data in Riemann coordinates: `left` on `(−∞, x_0)`,
/// then `jumps[k].1` on `[x_k, x_{k+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepData {
    pub left: RiemannPoint,
    pub jumps: Vec<(f64, RiemannPoint)>,
}

#[derive(Serialize, Deserialize)]
struct StepRow {
    x: f64,
    w1: f64,
    w2: f64,
}

impl StepData {
    pub fn constant(w: RiemannPoint) -> Self {
        Self { left: w, jumps: Vec::new() }
    }

    /// Samples `f` at the centers of `mesh` cells of `[a, b]`, extended by constants.
    pub fn from_fn(f: impl Fn(f64) -> RiemannPoint, a: f64, b: f64, mesh: usize) -> Self {
        let h = (b - a) / mesh as f64;
        let vals: Vec<RiemannPoint> = (0..mesh).map(|k| f(a + (k as f64 + 0.5) * h)).collect();
        let mut d = Self { left: vals[0], jumps: Vec::new() };
        for k in 1..mesh {
            d.jumps.push((a + k as f64 * h, vals[k]));
        }
        d.simplified()
    }

    /// Drops breakpoints where the value does not change.
    pub fn simplified(mut self) -> Self {
        let mut prev = self.left;
        self.jumps.retain(|&(_, w)| {
            let keep = w != prev;
            prev = w;
            keep
        });
        self
    }

    /// Rounds both invariants to the grid `{jε}`.
    pub fn quantized(&self, eps: f64) -> Self {
        let q = |w: RiemannPoint| RiemannPoint::new((w.w1 / eps).round() * eps, (w.w2 / eps).round() * eps);
        Self { left: q(self.left), jumps: self.jumps.iter().map(|&(x, w)| (x, q(w))).collect() }.simplified()
    }

    pub fn value_at(&self, x: f64) -> RiemannPoint {
        let k = self.jumps.partition_point(|j| j.0 <= x);
        if k == 0 {
            self.left
        } else {
            self.jumps[k - 1].1
        }
    }

    pub fn values(&self) -> impl Iterator<Item = RiemannPoint> + '_ {
        std::iter::once(self.left).chain(self.jumps.iter().map(|j| j.1))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().map(|w| w.sup_norm()).fold(0.0, f64::max)
    }

    /// Total variation of `(w1, w2)` over the jumps with `x ∈ [a, b]`.
    pub fn total_variation_in(&self, a: f64, b: f64) -> [f64; 2] {
        let mut tv = [0.0; 2];
        let mut prev = self.left;
        for &(x, w) in &self.jumps {
            if x >= a && x <= b {
                tv[0] += (w.w1 - prev.w1).abs();
                tv[1] += (w.w2 - prev.w2).abs();
            }
            prev = w;
        }
        tv
    }

    pub fn total_variation(&self) -> [f64; 2] {
        self.total_variation_in(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Same values with every breakpoint moved by `dx[k]`.
    pub fn with_shifts(&self, dx: &[f64]) -> Self {
        Self {
            left: self.left,
            jumps: self.jumps.iter().zip(dx).map(|(&(x, w), d)| (x + d, w)).collect(),
        }
    }

    /// CSV with columns `(x, w1, w2)`; the first row carries `x = -inf` and the left state.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "w1", "w2"])?;
        w.write_record([fmt17(f64::NEG_INFINITY), fmt17(self.left.w1), fmt17(self.left.w2)])?;
        for &(x, p) in &self.jumps {
            w.write_record([fmt17(x), fmt17(p.w1), fmt17(p.w2)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let rows: Vec<StepRow> = r.deserialize().collect::<std::result::Result<_, _>>()?;
        let (first, rest) = rows.split_first().ok_or_else(|| Error::Config("empty data file".into()))?;
        if first.x != f64::NEG_INFINITY {
            return Err(Error::Config("first data row must have x = -inf".into()));
        }
        if rest.windows(2).any(|w| w[1].x < w[0].x) {
            return Err(Error::Config("breakpoints must be sorted".into()));
        }
        Ok(Self {
            left: RiemannPoint::new(first.w1, first.w2),
            jumps: rest.iter().map(|r| (r.x, RiemannPoint::new(r.w1, r.w2))).collect(),
        })
    }
}

/// Profile at time 0 made of the Riemann fans at every breakpoint of `data`.
pub fn init_from_steps(sys: &dyn HyperbolicSystem, data: &StepData, opts: &EngineOptions) -> Result<Profile> {
    let dom = sys.domain();
    let mut fronts = Vec::new();
    let mut prev = data.left;
    dom.check(prev)?;
    for (k, &(x, w)) in data.jumps.iter().enumerate() {
        dom.check(w)?;
        let protos = outgoing_fronts(sys, prev, w, None, opts)
            .map_err(|e| Error::Solver(format!("initial jump {k} at x = {x}: {e}")))?;
        for p in protos {
            fronts.push(Front {
                id: fronts.len(),
                position: x,
                family: p.family,
                kind: p.kind,
                strength: p.strength,
                speed: p.speed,
                left_w: p.left,
                right_w: p.right,
            });
        }
        prev = w;
    }
    Ok(Profile { leftmost_state: data.left, fronts, time: 0.0 })
}

/// Samples `f` on `mesh` cells of `[a, b]`, quantizes to `{jε}` and builds the initial profile.
pub fn init_profile(
    sys: &dyn HyperbolicSystem,
    f: impl Fn(f64) -> RiemannPoint,
    interval: (f64, f64),
    mesh: usize,
    opts: &EngineOptions,
) -> Result<Profile> {
    let data = StepData::from_fn(f, interval.0, interval.1, mesh).quantized(opts.scheme.epsilon);
    init_from_steps(sys, &data, opts)
}
