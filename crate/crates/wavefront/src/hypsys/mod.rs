//! 2×2 hyperbolic systems presented in Riemann coordinates.

mod psystem;
mod tabulated;

pub use psystem::PSystemExp;
pub use tabulated::TabulatedSystem;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point in Riemann coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RiemannPoint {
    pub w1: f64,
    pub w2: f64,
}

impl RiemannPoint {
    pub const ORIGIN: RiemannPoint = RiemannPoint { w1: 0.0, w2: 0.0 };

    pub fn new(w1: f64, w2: f64) -> Self {
        Self { w1, w2 }
    }

    pub fn get(&self, fam: Family) -> f64 {
        match fam {
            Family::One => self.w1,
            Family::Two => self.w2,
        }
    }

    pub fn with(mut self, fam: Family, value: f64) -> Self {
        match fam {
            Family::One => self.w1 = value,
            Family::Two => self.w2 = value,
        }
        self
    }

    pub fn shifted(self, fam: Family, s: f64) -> Self {
        let v = self.get(fam);
        self.with(fam, v + s)
    }

    pub fn sup_dist(&self, other: &RiemannPoint) -> f64 {
        (self.w1 - other.w1).abs().max((self.w2 - other.w2).abs())
    }

    pub fn sup_norm(&self) -> f64 {
        self.w1.abs().max(self.w2.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.w1.is_finite() && self.w2.is_finite()
    }
}

/// Characteristic family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::One, Family::Two];

    pub fn index(self) -> usize {
        match self {
            Family::One => 0,
            Family::Two => 1,
        }
    }

    pub fn other(self) -> Family {
        match self {
            Family::One => Family::Two,
            Family::Two => Family::One,
        }
    }
}

impl From<Family> for u8 {
    fn from(f: Family) -> u8 {
        f.index() as u8 + 1
    }
}

impl TryFrom<u8> for Family {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Family::One),
            2 => Ok(Family::Two),
            _ => Err(format!("family must be 1 or 2, got {v}")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Rectangle `[lo1, hi1] × [lo2, hi2]` in Riemann coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl DomainBox {
    /// Sup-norm ball of radius `r` around the origin.
    pub fn centered(r: f64) -> Self {
        Self { lo: [-r, -r], hi: [r, r] }
    }

    pub fn contains(&self, w: RiemannPoint) -> bool {
        w.w1 >= self.lo[0] && w.w1 <= self.hi[0] && w.w2 >= self.lo[1] && w.w2 <= self.hi[1]
    }

    pub fn check(&self, w: RiemannPoint) -> Result<()> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(Error::Domain { w1: w.w1, w2: w.w2 })
        }
    }

    pub fn shrink(&self, factor: f64) -> Self {
        let c = [(self.lo[0] + self.hi[0]) / 2.0, (self.lo[1] + self.hi[1]) / 2.0];
        let h = [(self.hi[0] - self.lo[0]) / 2.0 * factor, (self.hi[1] - self.lo[1]) / 2.0 * factor];
        Self { lo: [c[0] - h[0], c[1] - h[1]], hi: [c[0] + h[0], c[1] + h[1]] }
    }

    /// Uniform `n × n` grid of points covering the box, corners included.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = RiemannPoint> + '_ {
        let n = n.max(2);
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                let a = i as f64 / (n - 1) as f64;
                let b = j as f64 / (n - 1) as f64;
                RiemannPoint::new(
                    self.lo[0] + a * (self.hi[0] - self.lo[0]),
                    self.lo[1] + b * (self.hi[1] - self.lo[1]),
                )
            })
        })
    }
}

/// A 2×2 system `u_t + f(u)_x = 0` written in Riemann coordinates.
///
/// The flux is exposed as a function of the Riemann coordinates, which avoids
/// inverting the state map inside the solver.
pub trait HyperbolicSystem: Send + Sync {
    fn name(&self) -> &str;

    fn domain(&self) -> DomainBox;

    /// `(λ1, λ2)` without the box check.
    fn eigenvalues_raw(&self, w: RiemannPoint) -> (f64, f64);

    /// Conserved state `u(w)`.
    fn state(&self, w: RiemannPoint) -> [f64; 2];

    /// Flux `f(u(w))`.
    fn flux(&self, w: RiemannPoint) -> [f64; 2];

    /// Sign of `∂λi/∂wi` per family.
    fn gnl_signs(&self) -> [f64; 2] {
        [1.0, 1.0]
    }

    /// Inverse of the state map when available in closed form.
    fn riemann_coords(&self, _u: [f64; 2]) -> Option<RiemannPoint> {
        None
    }

    fn lambda(&self, fam: Family, w: RiemannPoint) -> f64 {
        let (l1, l2) = self.eigenvalues_raw(w);
        match fam {
            Family::One => l1,
            Family::Two => l2,
        }
    }
}

/// `(λ1(w), λ2(w))` with a domain check.
pub fn eigenvalues(sys: &dyn HyperbolicSystem, w: RiemannPoint) -> Result<(f64, f64)> {
    sys.domain().check(w)?;
    Ok(sys.eigenvalues_raw(w))
}

/// Right eigenvectors `r_i = ∂u/∂w_i` and their dual covectors at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFrame {
    pub r1: [f64; 2],
    pub r2: [f64; 2],
    pub l1: [f64; 2],
    pub l2: [f64; 2],
    pub at: RiemannPoint,
}

impl EigenFrame {
    /// Builds the dual basis for the given right vectors.
    pub fn from_right(r1: [f64; 2], r2: [f64; 2], at: RiemannPoint) -> Result<Self> {
        let det = r1[0] * r2[1] - r2[0] * r1[1];
        if det.abs() < 1e-12 || !det.is_finite() {
            return Err(Error::Degenerate(format!(
                "eigenframe determinant {det:e} at ({}, {})",
                at.w1, at.w2
            )));
        }
        let l1 = [r2[1] / det, -r2[0] / det];
        let l2 = [-r1[1] / det, r1[0] / det];
        Ok(Self { r1, r2, l1, l2, at })
    }

    pub fn r(&self, fam: Family) -> [f64; 2] {
        match fam {
            Family::One => self.r1,
            Family::Two => self.r2,
        }
    }

    pub fn l(&self, fam: Family) -> [f64; 2] {
        match fam {
            Family::One => self.l1,
            Family::Two => self.l2,
        }
    }

    /// Largest deviation of `l_i · r_j` from `δ_ij`.
    pub fn duality_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for (i, l) in [self.l1, self.l2].iter().enumerate() {
            for (j, r) in [self.r1, self.r2].iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max((dot(*l, *r) - target).abs());
            }
        }
        e
    }
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

const FD_REL_STEP: f64 = 1e-6;

fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1.0)
}

/// Eigenframe from central differences of the state map.
pub fn eigenframe(sys: &dyn HyperbolicSystem, w: RiemannPoint) -> Result<EigenFrame> {
    sys.domain().check(w)?;
    let mut cols = [[0.0; 2]; 2];
    for fam in Family::BOTH {
        let h = fd_step(w.get(fam));
        let up = sys.state(w.shifted(fam, h));
        let dn = sys.state(w.shifted(fam, -h));
        cols[fam.index()] = [(up[0] - dn[0]) / (2.0 * h), (up[1] - dn[1]) / (2.0 * h)];
    }
    EigenFrame::from_right(cols[0], cols[1], w)
}

/// Central-difference `∂λi/∂wj`, indexed `[i][j]`.
pub fn lambda_jacobian(sys: &dyn HyperbolicSystem, w: RiemannPoint) -> [[f64; 2]; 2] {
    let mut jac = [[0.0; 2]; 2];
    for j in Family::BOTH {
        let h = fd_step(w.get(j)) * 10.0;
        let up = sys.eigenvalues_raw(w.shifted(j, h));
        let dn = sys.eigenvalues_raw(w.shifted(j, -h));
        jac[0][j.index()] = (up.0 - dn.0) / (2.0 * h);
        jac[1][j.index()] = (up.1 - dn.1) / (2.0 * h);
    }
    jac
}

/// Sampled hyperbolicity and genuine-nonlinearity margins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub min_gap: f64,
    /// Minimum over the box of `sign_i · ∂λi/∂wi`, per family.
    pub min_gnl: [f64; 2],
    pub max_speed: f64,
    pub strictly_hyperbolic: bool,
    pub genuinely_nonlinear: bool,
}

impl HyperbolicityReport {
    pub fn passed(&self) -> bool {
        self.strictly_hyperbolic && self.genuinely_nonlinear
    }
}

const MARGIN_FLOOR: f64 = 1e-12;

pub fn check_hyperbolicity_gnl(sys: &dyn HyperbolicSystem, samples: usize) -> Result<HyperbolicityReport> {
    if samples < 4 {
        return Err(Error::Config(format!("samples must be >= 4, got {samples}")));
    }
    let signs = sys.gnl_signs();
    let mut min_gap = f64::INFINITY;
    let mut min_gnl = [f64::INFINITY; 2];
    let mut max_speed: f64 = 0.0;
    for w in sys.domain().grid(samples) {
        let (l1, l2) = sys.eigenvalues_raw(w);
        min_gap = min_gap.min(l2 - l1);
        max_speed = max_speed.max(l1.abs()).max(l2.abs());
        let jac = lambda_jacobian(sys, w);
        min_gnl[0] = min_gnl[0].min(signs[0] * jac[0][0]);
        min_gnl[1] = min_gnl[1].min(signs[1] * jac[1][1]);
    }
    Ok(HyperbolicityReport {
        min_gap,
        min_gnl,
        max_speed,
        strictly_hyperbolic: min_gap > MARGIN_FLOOR,
        genuinely_nonlinear: min_gnl[0] > MARGIN_FLOOR && min_gnl[1] > MARGIN_FLOOR,
    })
}

type PointFn<T> = Box<dyn Fn(RiemannPoint) -> T + Send + Sync>;

/// A system assembled from closures.
pub struct CustomSystem {
    name: String,
    domain: DomainBox,
    eig: PointFn<(f64, f64)>,
    state: PointFn<[f64; 2]>,
    flux: PointFn<[f64; 2]>,
    signs: [f64; 2],
}

impl CustomSystem {
    pub fn new(
        name: impl Into<String>,
        domain: DomainBox,
        eig: impl Fn(RiemannPoint) -> (f64, f64) + Send + Sync + 'static,
        state: impl Fn(RiemannPoint) -> [f64; 2] + Send + Sync + 'static,
        flux: impl Fn(RiemannPoint) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eig: Box::new(eig),
            state: Box::new(state),
            flux: Box::new(flux),
            signs: [1.0, 1.0],
        }
    }

    pub fn with_gnl_signs(mut self, signs: [f64; 2]) -> Self {
        self.signs = signs;
        self
    }
}

impl HyperbolicSystem for CustomSystem {
    fn name(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> DomainBox {
        self.domain
    }
    fn eigenvalues_raw(&self, w: RiemannPoint) -> (f64, f64) {
        (self.eig)(w)
    }
    fn state(&self, w: RiemannPoint) -> [f64; 2] {
        (self.state)(w)
    }
    fn flux(&self, w: RiemannPoint) -> [f64; 2] {
        (self.flux)(w)
    }
    fn gnl_signs(&self) -> [f64; 2] {
        self.signs
    }
}
