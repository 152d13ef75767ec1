use super::History;
use crate::hypsys::{sub, HyperbolicSystem};
use serde::{Deserialize, Serialize};

/// Family of tensor-product hat functions `φ(t, x) = h((x − x_c)/hx)·h((t − t_c)/ht)`
/// centered at the nodes of a uniform grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTestSpec {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub nx: usize,
    pub nt: usize,
}

fn hat(y: f64) -> f64 {
    (1.0 - y.abs()).max(0.0)
}

/// `max_φ |∬ u φ_t + f(u) φ_x dx dt + ∫ ū φ(0, x) dx|` over the test family.
///
/// For a piecewise-constant solution this equals `Σ_fronts ∫ φ(t, x(t)) (ẋ[u] − [f]) dt`,
/// which is integrated exactly: the integrand is piecewise quadratic along each
/// front and Simpson's rule is applied between its kinks.
pub fn weak_residual(sys: &dyn HyperbolicSystem, history: &History, spec: &WeakTestSpec) -> f64 {
    let hx = (spec.x_range.1 - spec.x_range.0) / (spec.nx + 1) as f64;
    let ht = (spec.t_range.1 - spec.t_range.0) / (spec.nt + 1) as f64;
    let segments: Vec<_> = history
        .fronts
        .iter()
        .map(|r| {
            let f = &r.front;
            let du = sub(sys.state(f.right_w), sys.state(f.left_w));
            let df = sub(sys.flux(f.right_w), sys.flux(f.left_w));
            let defect = [f.speed * du[0] - df[0], f.speed * du[1] - df[1]];
            (r, defect)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 1..=spec.nx {
        let xc = spec.x_range.0 + i as f64 * hx;
        for j in 1..=spec.nt {
            let tc = spec.t_range.0 + j as f64 * ht;
            let mut acc = [0.0; 2];
            for (r, defect) in &segments {
                let t0 = r.birth_time.max(tc - ht).max(history.t_start);
                let t1 = r.death_time.min(tc + ht).min(history.t_end);
                if t1 <= t0 {
                    continue;
                }
                let v = r.front.speed;
                let x0 = r.position_at(t0);
                let x1 = r.position_at(t1);
                if x0.max(x1) <= xc - hx || x0.min(x1) >= xc + hx {
                    continue;
                }
                let mut cuts = vec![t0, t1];
                if t0 < tc && tc < t1 {
                    cuts.push(tc);
                }
                if v != 0.0 {
                    for xk in [xc - hx, xc, xc + hx] {
                        let tk = r.birth_time + (xk - r.front.position) / v;
                        if t0 < tk && tk < t1 {
                            cuts.push(tk);
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                let phi = |t: f64| hat((r.position_at(t) - xc) / hx) * hat((t - tc) / ht);
                let mut integral = 0.0;
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    integral += (b - a) / 6.0 * (phi(a) + 4.0 * phi(0.5 * (a + b)) + phi(b));
                }
                acc[0] += integral * defect[0];
                acc[1] += integral * defect[1];
            }
            worst = worst.max(acc[0].abs() + acc[1].abs());
        }
    }
    worst
}
