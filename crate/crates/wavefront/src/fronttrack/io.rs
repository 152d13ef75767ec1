use super::{Front, Profile};
use crate::error::{Error, Result};
use crate::hypsys::RiemannPoint;
use crate::io::fmt17;
use crate::Family;
use std::path::Path;

const HEADER: [&str; 9] =
    ["position", "family", "kind", "strength", "speed", "w1_left", "w2_left", "w1_right", "w2_right"];

/// Writes one snapshot, one row per front.
pub fn write_profile_csv(p: &Profile, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HEADER)?;
    for f in &p.fronts {
        w.write_record([
            fmt17(f.position),
            f.family.to_string(),
            f.kind.to_string(),
            fmt17(f.strength),
            fmt17(f.speed),
            fmt17(f.left_w.w1),
            fmt17(f.left_w.w2),
            fmt17(f.right_w.w1),
            fmt17(f.right_w.w2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot written by [`write_profile_csv`]. Fronts are numbered by row.
/// An empty file yields a constant profile at `empty_state`.
pub fn read_profile_csv(path: impl AsRef<Path>, time: f64, empty_state: RiemannPoint) -> Result<Profile> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Config(format!("profile header must be {}", HEADER.join(","))));
    }
    let mut fronts = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|e| Error::Config(format!("column {}: {e}", HEADER[k])))
        };
        let fam: u8 = rec[1].parse().map_err(|e| Error::Config(format!("family: {e}")))?;
        fronts.push(Front {
            id: fronts.len(),
            position: num(0)?,
            family: Family::try_from(fam).map_err(Error::Config)?,
            kind: rec[2].parse()?,
            strength: num(3)?,
            speed: num(4)?,
            left_w: RiemannPoint::new(num(5)?, num(6)?),
            right_w: RiemannPoint::new(num(7)?, num(8)?),
        });
    }
    let leftmost_state = fronts.first().map_or(empty_state, |f| f.left_w);
    Ok(Profile { leftmost_state, fronts, time })
}
