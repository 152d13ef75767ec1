//! Least-squares power-law fits.

use serde::{Deserialize, Serialize};

/// `y ≈ exp(intercept) · x^slope`, with the RMS residual in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

impl LogFit {
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fits a line through `(ln x, ln y)`, ignoring non-positive points. `None`
/// with fewer than two distinct abscissae.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<LogFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite())
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Some(LogFit { slope, intercept, residual })
}

/// Slope of [`loglog_fit`], `NaN` when undefined.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    loglog_fit(points).map_or(f64::NAN, |f| f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.5, 1.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-0.4))).collect();
        let f = loglog_fit(&pts).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-12);
        assert!((f.constant() - 3.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(loglog_fit(&[(1.0, 1.0)]).is_none());
        assert!(loglog_fit(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
        assert!(loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_nan());
    }
}
