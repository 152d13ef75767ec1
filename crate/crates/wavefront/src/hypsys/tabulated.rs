use super::{DomainBox, HyperbolicSystem, RiemannPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    w1: f64,
    w2: f64,
    lambda1: f64,
    lambda2: f64,
    u1: f64,
    u2: f64,
}

/// System sampled on a tensor grid in `(w1, w2)` and interpolated bilinearly.
///
/// The flux is reconstructed from `∂f/∂wi = λi ∂u/∂wi` by trapezoidal
/// integration along grid lines, anchored at `f = 0` on the first node.
#[derive(Clone, Debug)]
pub struct TabulatedSystem {
    name: String,
    g1: Vec<f64>,
    g2: Vec<f64>,
    // row-major [i1 * n2 + i2]
    lam: Vec<[f64; 2]>,
    u: Vec<[f64; 2]>,
    f: Vec<[f64; 2]>,
}

impl TabulatedSystem {
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path.as_ref())?;
        let rows: Vec<Row> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Self::from_samples(
            path.as_ref().display().to_string(),
            rows.iter().map(|r| ([r.w1, r.w2], [r.lambda1, r.lambda2], [r.u1, r.u2])),
        )
    }

    pub fn from_samples(
        name: impl Into<String>,
        samples: impl IntoIterator<Item = ([f64; 2], [f64; 2], [f64; 2])>,
    ) -> Result<Self> {
        let samples: Vec<_> = samples.into_iter().collect();
        let mut g1: Vec<f64> = samples.iter().map(|s| s.0[0]).collect();
        let mut g2: Vec<f64> = samples.iter().map(|s| s.0[1]).collect();
        for g in [&mut g1, &mut g2] {
            g.sort_by(f64::total_cmp);
            g.dedup();
        }
        let (n1, n2) = (g1.len(), g2.len());
        if n1 < 2 || n2 < 2 || n1 * n2 != samples.len() {
            return Err(Error::Config(format!(
                "tabulated system needs a full tensor grid, got {} samples on {n1}x{n2} axes",
                samples.len()
            )));
        }
        let mut lam = vec![[f64::NAN; 2]; n1 * n2];
        let mut u = vec![[f64::NAN; 2]; n1 * n2];
        for (w, l, st) in &samples {
            let i = g1.binary_search_by(|x| x.total_cmp(&w[0])).unwrap();
            let j = g2.binary_search_by(|x| x.total_cmp(&w[1])).unwrap();
            lam[i * n2 + j] = *l;
            u[i * n2 + j] = *st;
        }
        if lam.iter().any(|l| l[0].is_nan()) {
            return Err(Error::Config("duplicate grid points in tabulated system".into()));
        }
        let mut f = vec![[0.0; 2]; n1 * n2];
        for i in 1..n1 {
            let (a, b) = ((i - 1) * n2, i * n2);
            let l = 0.5 * (lam[a][0] + lam[b][0]);
            f[b] = [f[a][0] + l * (u[b][0] - u[a][0]), f[a][1] + l * (u[b][1] - u[a][1])];
        }
        for i in 0..n1 {
            for j in 1..n2 {
                let (a, b) = (i * n2 + j - 1, i * n2 + j);
                let l = 0.5 * (lam[a][1] + lam[b][1]);
                f[b] = [f[a][0] + l * (u[b][0] - u[a][0]), f[a][1] + l * (u[b][1] - u[a][1])];
            }
        }
        Ok(Self { name: name.into(), g1, g2, lam, u, f })
    }

    fn locate(g: &[f64], x: f64) -> (usize, f64) {
        let n = g.len();
        let k = g.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let t = ((x - g[k]) / (g[k + 1] - g[k])).clamp(0.0, 1.0);
        (k, t)
    }

    fn interp(&self, table: &[[f64; 2]], w: RiemannPoint) -> [f64; 2] {
        let n2 = self.g2.len();
        let (i, a) = Self::locate(&self.g1, w.w1);
        let (j, b) = Self::locate(&self.g2, w.w2);
        let c = |ii: usize, jj: usize| table[ii * n2 + jj];
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (1.0 - a) * (1.0 - b) * c(i, j)[k]
                + a * (1.0 - b) * c(i + 1, j)[k]
                + (1.0 - a) * b * c(i, j + 1)[k]
                + a * b * c(i + 1, j + 1)[k];
        }
        out
    }
}

impl HyperbolicSystem for TabulatedSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> DomainBox {
        DomainBox {
            lo: [self.g1[0], self.g2[0]],
            hi: [*self.g1.last().unwrap(), *self.g2.last().unwrap()],
        }
    }

    fn eigenvalues_raw(&self, w: RiemannPoint) -> (f64, f64) {
        let l = self.interp(&self.lam, w);
        (l[0], l[1])
    }

    fn state(&self, w: RiemannPoint) -> [f64; 2] {
        self.interp(&self.u, w)
    }

    fn flux(&self, w: RiemannPoint) -> [f64; 2] {
        self.interp(&self.f, w)
    }
}
