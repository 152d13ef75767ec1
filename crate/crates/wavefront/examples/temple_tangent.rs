//! Build the Temple system tangent to the p-system at the origin, compare
//! interactions, and check the Temple semigroup identities.

use wavefront::hypsys::PSystemExp;
use wavefront::temple::{
    compare_interactions, tangent_temple, verify_temple_semigroup, CompareSpec, SemigroupSpec, TangencyData, TempleGrid,
};
use wavefront::HyperbolicSystem;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let grid = TempleGrid::default();
    let d = sys.domain();
    let t = tangent_temple(&sys, grid, (d.hi[0] - d.lo[0]) / (grid.n - 1) as f64)?;

    println!("tangency gap        {:.2e}", TangencyData::of(&sys).max_gap(&TangencyData::of(&t)));
    println!("straightness defect {:.2e}", t.straightness_defect(16, t.spacing()));

    let c = compare_interactions(&sys, &t, &CompareSpec::default())?;
    println!("strength gap slopes: different families {:.3}, same family {:.3}", c.strength_diff_slope, c.strength_same_slope);

    let r = verify_temple_semigroup(&t, &SemigroupSpec { lipschitz_seeds: 16, ..Default::default() })?;
    println!("strength sum defect {:.1e}, closed-form gap slope {:.3}", r.max_sum_defect, r.gap_slope);
    for p in &r.tv_sweep {
        println!("TV {:>4}: L* = {:.3} over {} interactions", p.tv_target, p.l_star, p.interactions);
    }
    Ok(())
}
