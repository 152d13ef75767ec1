use super::{DomainBox, HyperbolicSystem, RiemannPoint};

/// Lagrangian p-system `v_t − z_x = 0`, `z_t + p(v)_x = 0` with `p(v) = e^{−v}`.
///
/// Riemann invariants are shifted so that `(v, z) = (0, 0)` sits at the origin:
/// `w1 = z − 2e^{−v/2} + 2`, `w2 = z + 2e^{−v/2} − 2`, with `λ∓ = ∓e^{−v/2}`.
/// Time is rescaled by `c` so that every speed on the box lies in `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct PSystemExp {
    half_width: f64,
    c: f64,
}

impl PSystemExp {
    /// Normalized system for data bounded by `eps1`; the box has half-width `2·eps1`.
    pub fn new(eps1: f64) -> Self {
        let half_width = 2.0 * eps1;
        Self { half_width, c: 1.0 + half_width / 2.0 }
    }

    /// Physical time scale (`c = 1`) on a box of the given half-width.
    pub fn unnormalized(half_width: f64) -> Self {
        assert!(half_width < 2.0, "box must keep e^(-v/2) positive");
        Self { half_width, c: 1.0 }
    }

    pub fn speed_scale(&self) -> f64 {
        self.c
    }

    /// `e^{−v/2}` as a function of the invariants.
    fn sound(w: RiemannPoint) -> f64 {
        1.0 + (w.w2 - w.w1) / 4.0
    }

    /// Lagrangian specific volume and velocity `(v, z)`.
    pub fn primitive(w: RiemannPoint) -> (f64, f64) {
        (-2.0 * Self::sound(w).ln(), 0.5 * (w.w1 + w.w2))
    }

    pub fn pressure(v: f64) -> f64 {
        (-v).exp()
    }

    /// Velocity behind an admissible shock from `(v0, z0)` to volume `v`.
    /// 1-shocks have `v < v0`, 2-shocks `v > v0`; `z` drops across both.
    pub fn hugoniot_z(v0: f64, z0: f64, v: f64) -> f64 {
        z0 - ((Self::pressure(v) - Self::pressure(v0)) * (v0 - v)).max(0.0).sqrt()
    }
}

impl HyperbolicSystem for PSystemExp {
    fn name(&self) -> &str {
        "psystem_exp"
    }

    fn domain(&self) -> DomainBox {
        DomainBox::centered(self.half_width)
    }

    fn eigenvalues_raw(&self, w: RiemannPoint) -> (f64, f64) {
        let s = Self::sound(w) / self.c;
        (-s, s)
    }

    fn state(&self, w: RiemannPoint) -> [f64; 2] {
        let (v, z) = Self::primitive(w);
        [v, z]
    }

    fn flux(&self, w: RiemannPoint) -> [f64; 2] {
        let (v, z) = Self::primitive(w);
        [-z / self.c, Self::pressure(v) / self.c]
    }

    fn riemann_coords(&self, u: [f64; 2]) -> Option<RiemannPoint> {
        let e = (-u[0] / 2.0).exp();
        if !e.is_finite() {
            return None;
        }
        Some(RiemannPoint::new(u[1] - 2.0 * e + 2.0, u[1] + 2.0 * e - 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypsys::{check_hyperbolicity_gnl, eigenframe, eigenvalues};

    #[test]
    fn base_state_speeds() {
        let sys = PSystemExp::unnormalized(1.5);
        let (l1, l2) = eigenvalues(&sys, RiemannPoint::ORIGIN).unwrap();
        assert_eq!((l1, l2), (-1.0, 1.0));
    }

    #[test]
    fn speeds_at_v_two_ln_two() {
        let sys = PSystemExp::unnormalized(1.5);
        // v = 2 ln 2, z = 0
        let w = sys.riemann_coords([2.0 * 2f64.ln(), 0.0]).unwrap();
        assert!((w.w1 - 1.0).abs() < 1e-15 && (w.w2 + 1.0).abs() < 1e-15);
        let (l1, l2) = eigenvalues(&sys, w).unwrap();
        assert!((l1 + 0.5).abs() < 1e-15 && (l2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn state_map_roundtrip() {
        let sys = PSystemExp::new(0.05);
        for w in sys.domain().grid(9) {
            let back = sys.riemann_coords(sys.state(w)).unwrap();
            assert!(back.sup_dist(&w) < 1e-14);
        }
    }

    #[test]
    fn hyperbolicity_margins_match_closed_form() {
        // Box [-0.2, 0.2]^2 with physical time: λ± = ±e^{-v/2}, e^{-v/2} = 1 + (w2-w1)/4 ≥ 0.9.
        let sys = PSystemExp::unnormalized(0.2);
        let rep = check_hyperbolicity_gnl(&sys, 11).unwrap();
        assert!(rep.passed());
        assert!((rep.min_gap - 1.8).abs() < 1e-12);
        // ∂λi/∂wi = 1/4 exactly
        assert!((rep.min_gnl[0] - 0.25).abs() < 1e-8);
        assert!((rep.min_gnl[1] - 0.25).abs() < 1e-8);
    }

    #[test]
    fn normalized_speeds_bounded_by_one() {
        let sys = PSystemExp::new(0.05);
        let rep = check_hyperbolicity_gnl(&sys, 21).unwrap();
        assert!(rep.max_speed <= 1.0 + 1e-15);
    }

    #[test]
    fn frame_from_closed_form_jacobian() {
        let sys = PSystemExp::new(0.05);
        let w = RiemannPoint::new(0.02, -0.03);
        let f = eigenframe(&sys, w).unwrap();
        let e = PSystemExp::sound(w);
        // v = -2 ln e, dv/dw1 = 1/(2e), dv/dw2 = -1/(2e); z = (w1+w2)/2
        let r1 = [1.0 / (2.0 * e), 0.5];
        let r2 = [-1.0 / (2.0 * e), 0.5];
        assert!((f.r1[0] - r1[0]).abs() < 1e-9 && (f.r1[1] - r1[1]).abs() < 1e-9);
        assert!((f.r2[0] - r2[0]).abs() < 1e-9 && (f.r2[1] - r2[1]).abs() < 1e-9);
        assert!(f.duality_error() < 1e-10);
    }

    #[test]
    fn flux_jacobian_has_eigenpairs() {
        // A r_i = λ_i r_i via df/dw_i = λ_i du/dw_i.
        let sys = PSystemExp::new(0.05);
        let w = RiemannPoint::new(-0.04, 0.01);
        let h = 1e-6;
        let (l1, l2) = sys.eigenvalues_raw(w);
        for (fam, lam) in [(crate::Family::One, l1), (crate::Family::Two, l2)] {
            let fu = sys.flux(w.shifted(fam, h));
            let fd = sys.flux(w.shifted(fam, -h));
            let uu = sys.state(w.shifted(fam, h));
            let ud = sys.state(w.shifted(fam, -h));
            for k in 0..2 {
                let df = (fu[k] - fd[k]) / (2.0 * h);
                let du = (uu[k] - ud[k]) / (2.0 * h);
                assert!((df - lam * du).abs() < 1e-8);
            }
        }
    }
}
