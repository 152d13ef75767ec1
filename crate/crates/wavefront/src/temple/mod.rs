//! Temple-class systems: a grid-based 2×2 system whose integral curves of
//! eigenvectors are straight lines, its construction tangent to a given system
//! at the origin, exact interaction rules and terminal shift formulas.

mod compare;
mod semigroup;
mod shifts;

pub use compare::{compare_interactions, compare_single, CompareSpec, InteractionComparison, InteractionPair, ScaleComparison};
pub use semigroup::{
    grid_steps, strength_sum_defect, terminal_shift_gaps, verify_temple_semigroup, CaseGap, RefinementPoint, SemigroupReport,
    SemigroupSpec, TvSweepPoint,
};
pub use shifts::{temple_interaction, temple_terminal_shift, ShiftCase};

use crate::error::{Error, Result};
use crate::hypsys::{dot, eigenframe, lambda_jacobian, DomainBox, HyperbolicSystem, RiemannPoint};
use crate::io::write_table;
use crate::Family;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Data fixing a Temple system on a box around the origin.
///
/// Unit direction fields are `r̄1(w2) = (cos, sin)(θ1 + k1 w2)` and
/// `r̄2(w1) = (cos, sin)(θ2 + k2 w1)`. The state map has `∂u/∂w1 = a r̄1`,
/// `∂u/∂w2 = b r̄2`, the flux `∂f/∂w1 = A r̄1`, `∂f/∂w2 = B r̄2`, with affine
/// boundary data `a(w1, 0)`, `A(w1, 0)`, `b(0, w2)`, `B(0, w2)` given as
/// `[value, slope]` at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TempleParams {
    pub origin_state: [f64; 2],
    pub origin_flux: [f64; 2],
    pub theta1: f64,
    pub k1: f64,
    pub theta2: f64,
    pub k2: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub flux_a: [f64; 2],
    pub flux_b: [f64; 2],
}

impl TempleParams {
    /// A genuinely nonlinear example with curved direction fields.
    pub fn example() -> Self {
        Self {
            origin_state: [0.0, 0.0],
            origin_flux: [0.0, 0.0],
            theta1: 2.4,
            k1: 0.6,
            theta2: 0.7,
            k2: -0.4,
            a: [1.0, 0.2],
            b: [1.2, -0.1],
            flux_a: [-0.9, 0.3],
            flux_b: [1.2 * 0.8, 0.35],
        }
    }

    /// Eigenvalues at the origin.
    pub fn speeds(&self) -> (f64, f64) {
        (self.flux_a[0] / self.a[0], self.flux_b[0] / self.b[0])
    }
}

/// Grid resolution and Picard controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TempleGrid {
    /// Nodes per side; odd so the origin is a node.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TempleGrid {
    fn default() -> Self {
        Self { n: 201, tol: 1e-10, max_iter: 500 }
    }
}

/// A Temple-class system tabulated on a tensor grid of Riemann coordinates.
#[derive(Clone, Debug)]
pub struct TempleSystem {
    name: String,
    domain: DomainBox,
    n: usize,
    h: f64,
    params: Option<TempleParams>,
    /// Node arrays indexed `[i * n + j]` with `i` along `w1`.
    alpha: Vec<f64>,
    beta: Vec<f64>,
    mu: [Vec<f64>; 2],
    u: [Vec<f64>; 2],
    f: [Vec<f64>; 2],
    gnl: [f64; 2],
    picard_residual: f64,
}

fn unit(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

fn perp(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

/// Dual covectors of `(r1, r2)`.
fn dual(r1: [f64; 2], r2: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let det = r1[0] * r2[1] - r2[0] * r1[1];
    ([r2[1] / det, -r2[0] / det], [-r1[1] / det, r1[0] / det])
}

struct Coefficients {
    p: Vec<f64>,
    q: Vec<f64>,
    s: Vec<f64>,
    r: Vec<f64>,
}

/// Solves `α_{w2} = pβ − qα`, `β_{w1} = sα − rβ` with `α(w1, 0)`, `β(0, w2)`
/// prescribed, by Picard iteration with cumulative trapezoid quadrature.
fn goursat(
    n: usize,
    h: f64,
    c: &Coefficients,
    alpha_bd: &[f64],
    beta_bd: &[f64],
    grid: &TempleGrid,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mid = n / 2;
    let idx = |i: usize, j: usize| i * n + j;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[idx(i, j)] = alpha_bd[i];
            b[idx(i, j)] = beta_bd[j];
        }
    }
    let mut diff = f64::INFINITY;
    for _ in 0..grid.max_iter {
        diff = 0.0;
        let g: Vec<f64> = (0..n * n).map(|k| c.p[k] * b[k] - c.q[k] * a[k]).collect();
        for i in 0..n {
            let mut next = vec![0.0; n];
            next[mid] = alpha_bd[i];
            for j in mid + 1..n {
                next[j] = next[j - 1] + 0.5 * h * (g[idx(i, j - 1)] + g[idx(i, j)]);
            }
            for j in (0..mid).rev() {
                next[j] = next[j + 1] - 0.5 * h * (g[idx(i, j + 1)] + g[idx(i, j)]);
            }
            for j in 0..n {
                diff = diff.max((next[j] - a[idx(i, j)]).abs());
                a[idx(i, j)] = next[j];
            }
        }
        let k: Vec<f64> = (0..n * n).map(|m| c.s[m] * a[m] - c.r[m] * b[m]).collect();
        for j in 0..n {
            let mut next = vec![0.0; n];
            next[mid] = beta_bd[j];
            for i in mid + 1..n {
                next[i] = next[i - 1] + 0.5 * h * (k[idx(i - 1, j)] + k[idx(i, j)]);
            }
            for i in (0..mid).rev() {
                next[i] = next[i + 1] - 0.5 * h * (k[idx(i + 1, j)] + k[idx(i, j)]);
            }
            for i in 0..n {
                diff = diff.max((next[i] - b[idx(i, j)]).abs());
                b[idx(i, j)] = next[i];
            }
        }
        if diff < grid.tol {
            return Ok((a, b, diff));
        }
    }
    if diff > 1e-8 {
        return Err(Error::Numerical(format!(
            "Goursat iteration stalled with successive difference {diff:e} after {} sweeps",
            grid.max_iter
        )));
    }
    Ok((a, b, diff))
}

/// Integrates `∂v/∂w1 = a r̄1(w2)`, `∂v/∂w2 = b r̄2(w1)` from the origin: first
/// up and down the column `w1 = 0`, then along every row.
fn integrate_map(n: usize, h: f64, xs: &[f64], p: &TempleParams, a: &[f64], b: &[f64], origin: [f64; 2]) -> [Vec<f64>; 2] {
    let mid = n / 2;
    let idx = |i: usize, j: usize| i * n + j;
    let mut v = [vec![0.0; n * n], vec![0.0; n * n]];
    let r2 = unit(p.theta2 + p.k2 * xs[mid]);
    for d in 0..2 {
        v[d][idx(mid, mid)] = origin[d];
    }
    for j in mid + 1..n {
        for d in 0..2 {
            v[d][idx(mid, j)] = v[d][idx(mid, j - 1)] + 0.5 * h * (b[idx(mid, j - 1)] + b[idx(mid, j)]) * r2[d];
        }
    }
    for j in (0..mid).rev() {
        for d in 0..2 {
            v[d][idx(mid, j)] = v[d][idx(mid, j + 1)] - 0.5 * h * (b[idx(mid, j + 1)] + b[idx(mid, j)]) * r2[d];
        }
    }
    for j in 0..n {
        let r1 = unit(p.theta1 + p.k1 * xs[j]);
        for i in mid + 1..n {
            for d in 0..2 {
                v[d][idx(i, j)] = v[d][idx(i - 1, j)] + 0.5 * h * (a[idx(i - 1, j)] + a[idx(i, j)]) * r1[d];
            }
        }
        for i in (0..mid).rev() {
            for d in 0..2 {
                v[d][idx(i, j)] = v[d][idx(i + 1, j)] - 0.5 * h * (a[idx(i + 1, j)] + a[idx(i, j)]) * r1[d];
            }
        }
    }
    v
}

impl TempleSystem {
    /// Builds the system defined by `params` on a centered box.
    pub fn from_params(name: &str, params: TempleParams, domain: DomainBox, grid: TempleGrid) -> Result<Self> {
        let (lo, hi) = (domain.lo, domain.hi);
        if lo[0] != -hi[0] || lo[1] != -hi[1] || hi[0] != hi[1] {
            return Err(Error::Config("Temple construction needs a square box centered at the origin".into()));
        }
        if grid.n < 5 || grid.n % 2 == 0 {
            return Err(Error::Config(format!("grid size must be odd and >= 5, got {}", grid.n)));
        }
        let n = grid.n;
        let h = 2.0 * hi[0] / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|k| lo[0] + k as f64 * h).collect();
        let mut co = Coefficients { p: vec![0.0; n * n], q: vec![0.0; n * n], s: vec![0.0; n * n], r: vec![0.0; n * n] };
        for i in 0..n {
            let r2 = unit(params.theta2 + params.k2 * xs[i]);
            let r2d = perp(r2).map(|x| x * params.k2);
            for j in 0..n {
                let r1 = unit(params.theta1 + params.k1 * xs[j]);
                let r1d = perp(r1).map(|x| x * params.k1);
                let (l1, l2) = dual(r1, r2);
                let k = i * n + j;
                co.p[k] = dot(l1, r2d);
                co.q[k] = dot(l1, r1d);
                co.s[k] = dot(l2, r1d);
                co.r[k] = dot(l2, r2d);
            }
        }
        let affine = |c: [f64; 2]| -> Vec<f64> { xs.iter().map(|&x| c[0] + c[1] * x).collect() };
        let (alpha, beta, res1) = goursat(n, h, &co, &affine(params.a), &affine(params.b), &grid)?;
        let (fa, fb, res2) = goursat(n, h, &co, &affine(params.flux_a), &affine(params.flux_b), &grid)?;
        if alpha.iter().chain(&beta).any(|&x| x <= 0.0) {
            return Err(Error::Degenerate("state map degenerates on the box".into()));
        }
        let u = integrate_map(n, h, &xs, &params, &alpha, &beta, params.origin_state);
        let f = integrate_map(n, h, &xs, &params, &fa, &fb, params.origin_flux);
        let mu = [
            fa.iter().zip(&alpha).map(|(x, y)| x / y).collect(),
            fb.iter().zip(&beta).map(|(x, y)| x / y).collect(),
        ];
        let c11 = (params.flux_a[1] * params.a[0] - params.flux_a[0] * params.a[1]) / params.a[0].powi(2);
        let c22 = (params.flux_b[1] * params.b[0] - params.flux_b[0] * params.b[1]) / params.b[0].powi(2);
        Ok(Self {
            name: name.to_string(),
            domain,
            n,
            h,
            params: Some(params),
            alpha,
            beta,
            mu,
            u,
            f,
            gnl: [c11.signum(), c22.signum()],
            picard_residual: res1.max(res2),
        })
    }

    /// The built-in example on a box of half-width `half_width`.
    pub fn builtin(half_width: f64) -> Result<Self> {
        Self::from_params("temple_example", TempleParams::example(), DomainBox::centered(half_width), TempleGrid::default())
    }

    pub fn params(&self) -> Option<&TempleParams> {
        self.params.as_ref()
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn picard_residual(&self) -> f64 {
        self.picard_residual
    }

    /// Catmull–Rom bicubic interpolation of a node array, with ghost nodes
    /// extrapolated linearly past the edges. Keeps jump quotients of `u` and
    /// `f` within a cell close to the local derivative ratio.
    fn interp(&self, v: &[f64], w: RiemannPoint) -> f64 {
        let n = self.n;
        let locate = |x: f64, lo: f64| {
            let t = (x - lo) / self.h;
            let k = (t.floor().max(0.0) as usize).min(n - 2);
            (k, t - k as f64)
        };
        let (i, s) = locate(w.w1, self.domain.lo[0]);
        let (j, t) = locate(w.w2, self.domain.lo[1]);
        let row = |a: usize| {
            let at = |b: usize| v[a * n + b];
            let p1 = at(j);
            let p2 = at(j + 1);
            let p0 = if j == 0 { 2.0 * p1 - p2 } else { at(j - 1) };
            let p3 = if j + 2 == n { 2.0 * p2 - p1 } else { at(j + 2) };
            catmull_rom([p0, p1, p2, p3], t)
        };
        let q1 = row(i);
        let q2 = row(i + 1);
        let q0 = if i == 0 { 2.0 * q1 - q2 } else { row(i - 1) };
        let q3 = if i + 2 == n { 2.0 * q2 - q1 } else { row(i + 2) };
        catmull_rom([q0, q1, q2, q3], s)
    }

    /// Largest deviation from a straight line of the state curves of either
    /// family, measured as the normal component of second differences with
    /// step `step`, relative to `step²`, over `samples²` base points.
    pub fn straightness_defect(&self, samples: usize, step: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let inner = self.domain.shrink(1.0 - 2.0 * step / (self.domain.hi[0] - self.domain.lo[0]));
        for w in inner.grid(samples) {
            for fam in Family::BOTH {
                let um = self.state(w.shifted(fam, -step));
                let u0 = self.state(w);
                let up = self.state(w.shifted(fam, step));
                let t = [up[0] - um[0], up[1] - um[1]];
                let norm = (t[0] * t[0] + t[1] * t[1]).sqrt();
                let d2 = [up[0] - 2.0 * u0[0] + um[0], up[1] - 2.0 * u0[1] + um[1]];
                let normal = (d2[0] * t[1] - d2[1] * t[0]).abs() / norm;
                worst = worst.max(normal / (step * step));
            }
        }
        worst
    }

    /// Largest sine of the angle between `r̄i` and the grid differences of the
    /// state along `wi`, over all nodes.
    pub fn parallelism_defect(&self) -> f64 {
        let Some(p) = self.params else { return f64::NAN };
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let w1 = self.domain.lo[0] + i as f64 * self.h;
                let w2 = self.domain.lo[1] + j as f64 * self.h;
                let k = i * n + j;
                let d1 = [self.u[0][k + n] - self.u[0][k], self.u[1][k + n] - self.u[1][k]];
                let d2 = [self.u[0][k + 1] - self.u[0][k], self.u[1][k + 1] - self.u[1][k]];
                let r1 = unit(p.theta1 + p.k1 * w2);
                let r2 = unit(p.theta2 + p.k2 * w1);
                let c1 = (d1[0] * r1[1] - d1[1] * r1[0]).abs() / d1[0].hypot(d1[1]);
                let c2 = (d2[0] * r2[1] - d2[1] * r2[0]).abs() / d2[0].hypot(d2[1]);
                worst = worst.max(c1).max(c2);
            }
        }
        worst
    }

    /// Writes the node table `(w1, w2, mu1, mu2, alpha, beta, u1, u2, f1, f2)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let n = self.n;
        let rows = (0..n * n).map(|k| {
            let (i, j) = (k / n, k % n);
            vec![
                self.domain.lo[0] + i as f64 * self.h,
                self.domain.lo[1] + j as f64 * self.h,
                self.mu[0][k],
                self.mu[1][k],
                self.alpha[k],
                self.beta[k],
                self.u[0][k],
                self.u[1][k],
                self.f[0][k],
                self.f[1][k],
            ]
        });
        write_table(path, &["w1", "w2", "mu1", "mu2", "alpha", "beta", "u1", "u2", "f1", "f2"], rows)
    }

    /// Reads a table written by [`TempleSystem::write_csv`].
    pub fn read_csv(name: &str, path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut rows: Vec<[f64; 10]> = Vec::new();
        for rec in rdr.deserialize() {
            let r: [f64; 10] = rec?;
            rows.push(r);
        }
        let n = (rows.len() as f64).sqrt().round() as usize;
        if n * n != rows.len() || n < 2 {
            return Err(Error::Config(format!("{} rows do not form a square grid", rows.len())));
        }
        let h = rows[1][1] - rows[0][1];
        let lo = [rows[0][0], rows[0][1]];
        let hi = [rows[n * n - 1][0], rows[n * n - 1][1]];
        let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
        let mu = [col(2), col(3)];
        let mid = (n / 2) * n + n / 2;
        let mut sys = Self {
            name: name.to_string(),
            domain: DomainBox { lo, hi },
            n,
            h,
            params: None,
            alpha: col(4),
            beta: col(5),
            mu,
            u: [col(6), col(7)],
            f: [col(8), col(9)],
            gnl: [1.0, 1.0],
            picard_residual: f64::NAN,
        };
        let jac = lambda_jacobian(&sys, RiemannPoint::new(rows[mid][0], rows[mid][1]));
        sys.gnl = [jac[0][0].signum(), jac[1][1].signum()];
        Ok(sys)
    }
}

impl HyperbolicSystem for TempleSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> DomainBox {
        self.domain
    }

    fn eigenvalues_raw(&self, w: RiemannPoint) -> (f64, f64) {
        (self.interp(&self.mu[0], w), self.interp(&self.mu[1], w))
    }

    fn state(&self, w: RiemannPoint) -> [f64; 2] {
        [self.interp(&self.u[0], w), self.interp(&self.u[1], w)]
    }

    fn flux(&self, w: RiemannPoint) -> [f64; 2] {
        [self.interp(&self.f[0], w), self.interp(&self.f[1], w)]
    }

    fn gnl_signs(&self) -> [f64; 2] {
        self.gnl
    }
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let [p0, p1, p2, p3] = p;
    p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)))
}

/// Finite-difference tangency data of a system at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyData {
    pub lambda: [f64; 2],
    /// `c[i][j] = ∂λi/∂wj`.
    pub c: [[f64; 2]; 2],
}

impl TangencyData {
    pub fn of(sys: &dyn HyperbolicSystem) -> Self {
        let (l1, l2) = sys.eigenvalues_raw(RiemannPoint::ORIGIN);
        Self { lambda: [l1, l2], c: lambda_jacobian(sys, RiemannPoint::ORIGIN) }
    }

    /// Largest deviation from `other` over values and derivatives.
    pub fn max_gap(&self, other: &TangencyData) -> f64 {
        let mut g: f64 = 0.0;
        for i in 0..2 {
            g = g.max((self.lambda[i] - other.lambda[i]).abs());
            for j in 0..2 {
                g = g.max((self.c[i][j] - other.c[i][j]).abs());
            }
        }
        g
    }
}

/// Parameters of the Temple system tangent to `sys` at the origin. Derivatives
/// of the state map use central differences with step `delta`.
pub fn tangent_params(sys: &dyn HyperbolicSystem, delta: f64) -> Result<TempleParams> {
    let o = RiemannPoint::ORIGIN;
    let tang = TangencyData::of(sys);
    let col = |w: RiemannPoint, fam: Family| -> [f64; 2] {
        let up = sys.state(w.shifted(fam, delta));
        let dn = sys.state(w.shifted(fam, -delta));
        [(up[0] - dn[0]) / (2.0 * delta), (up[1] - dn[1]) / (2.0 * delta)]
    };
    let norm = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let (r1, r2) = (col(o, Family::One), col(o, Family::Two));
    eigenframe(sys, o)?;
    let (a0, b0) = (norm(r1), norm(r2));
    let a1 = (norm(col(o.shifted(Family::One, delta), Family::One)) - norm(col(o.shifted(Family::One, -delta), Family::One)))
        / (2.0 * delta);
    let b1 = (norm(col(o.shifted(Family::Two, delta), Family::Two)) - norm(col(o.shifted(Family::Two, -delta), Family::Two)))
        / (2.0 * delta);
    let (th1, th2) = (r1[1].atan2(r1[0]), r2[1].atan2(r2[0]));
    let (u1, u2) = (unit(th1), unit(th2));
    let (l1, l2) = dual(u1, u2);
    let [lam1, lam2] = tang.lambda;
    let c = tang.c;
    // ∂μ1/∂w2 = p b (μ2 − μ1)/a and ∂μ2/∂w1 = s a (μ1 − μ2)/b at the origin
    let p0 = c[0][1] * a0 / (b0 * (lam2 - lam1));
    let s0 = c[1][0] * b0 / (a0 * (lam1 - lam2));
    let k2 = p0 / dot(l1, perp(u2));
    let k1 = s0 / dot(l2, perp(u1));
    Ok(TempleParams {
        origin_state: sys.state(o),
        origin_flux: sys.flux(o),
        theta1: th1,
        k1,
        theta2: th2,
        k2,
        a: [a0, a1],
        b: [b0, b1],
        flux_a: [lam1 * a0, c[0][0] * a0 + lam1 * a1],
        flux_b: [lam2 * b0, c[1][1] * b0 + lam2 * b1],
    })
}

/// Temple system tangent to `sys` at the origin, tabulated on the box of `sys`.
pub fn tangent_temple(sys: &dyn HyperbolicSystem, grid: TempleGrid, delta: f64) -> Result<TempleSystem> {
    let params = tangent_params(sys, delta)?;
    TempleSystem::from_params(&format!("temple_tangent_{}", sys.name()), params, sys.domain(), grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_is_hyperbolic_and_gnl() {
        let t = TempleSystem::builtin(0.1).unwrap();
        let rep = crate::hypsys::check_hyperbolicity_gnl(&t, 9).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(t.picard_residual() < 1e-10);
    }

    #[test]
    fn flat_fields_give_constant_coefficients() {
        let mut p = TempleParams::example();
        p.k1 = 0.0;
        p.k2 = 0.0;
        p.a[1] = 0.0;
        p.b[1] = 0.0;
        let t = TempleSystem::from_params("flat", p, DomainBox::centered(0.1), TempleGrid { n: 21, ..Default::default() }).unwrap();
        assert!(t.alpha.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!(t.beta.iter().all(|&x| (x - 1.2).abs() < 1e-15));
    }
}
