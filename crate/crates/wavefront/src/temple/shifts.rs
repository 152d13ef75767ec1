use crate::error::{Error, Result};
use crate::hypsys::{dot, eigenframe, sub, HyperbolicSystem, RiemannPoint};
use crate::Family;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Outgoing strengths `(σ1, σ2)` of an interaction under Temple rules: each
/// family keeps the sum of its incoming strengths.
pub fn temple_interaction(incoming: &[(f64, Family)]) -> (f64, f64) {
    let mut s = (0.0, 0.0);
    for &(sigma, fam) in incoming {
        match fam {
            Family::One => s.0 += sigma,
            Family::Two => s.1 += sigma,
        }
    }
    s
}

/// Position of a terminal front relative to a shifted initial 2-front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftCase {
    /// The 2-front that contains the shifted front.
    #[serde(rename = "1")]
    One,
    /// A 2-front to its left.
    #[serde(rename = "2")]
    Two,
    /// A 1-front whose backward fan straddles the shifted front.
    #[serde(rename = "3a")]
    ThreeA,
    /// A 1-front whose backward fan lies entirely to the right of it.
    #[serde(rename = "3b")]
    ThreeB,
}

impl fmt::Display for ShiftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftCase::One => "1",
            ShiftCase::Two => "2",
            ShiftCase::ThreeA => "3a",
            ShiftCase::ThreeB => "3b",
        })
    }
}

impl FromStr for ShiftCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" => Ok(ShiftCase::One),
            "2" => Ok(ShiftCase::Two),
            "3a" => Ok(ShiftCase::ThreeA),
            "3b" => Ok(ShiftCase::ThreeB),
            _ => Err(format!("unknown shift case '{s}'")),
        }
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den.abs() < 1e-12 {
        return Err(Error::Degenerate(format!("terminal shift denominator {den:e}")));
    }
    Ok(num / den)
}

/// Closed-form shift at the terminal time of a front with states `(w_minus,
/// w_plus)`, when the initial 2-front `(w0_minus, w0_plus)` is shifted at rate `xi0`.
pub fn temple_terminal_shift(
    sys: &dyn HyperbolicSystem,
    case: ShiftCase,
    w_minus: RiemannPoint,
    w_plus: RiemannPoint,
    w0_minus: RiemannPoint,
    w0_plus: RiemannPoint,
    xi0: f64,
) -> Result<f64> {
    let (um, up) = (sys.state(w_minus), sys.state(w_plus));
    let du = sub(um, up);
    let du0 = sub(sys.state(w0_minus), sys.state(w0_plus));
    let fm = eigenframe(sys, w_minus)?;
    let fp = eigenframe(sys, w_plus)?;
    let k = match case {
        ShiftCase::One => ratio(dot(fm.l2, du0), dot(fm.l2, du))?,
        ShiftCase::Two => ratio(dot(fm.l2, fp.r1) * dot(fp.l1, du0), dot(fm.l2, du))?,
        ShiftCase::ThreeA => ratio(dot(fp.l1, du0), dot(fp.l1, du))?,
        ShiftCase::ThreeB => {
            ratio(dot(fp.l1, fm.r2), dot(fp.l1, du))? * ratio(dot(fp.l2, du0), dot(fp.l2, fm.r2))?
        }
    };
    Ok(k * xi0)
}
