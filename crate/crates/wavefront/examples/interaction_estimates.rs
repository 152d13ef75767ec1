//! Fit the constants of the two-front interaction estimates over random
//! weak interactions.

use wavefront::hypsys::PSystemExp;
use wavefront::sensitivity::{fit_interaction_constants, resolve_pair, EstimateSpec};
use wavefront::{Family, RiemannPoint};

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);

    // a 2-shock overtaken head-on by a 1-shock
    let p = resolve_pair(&sys, RiemannPoint::ORIGIN, (Family::Two, -0.01, 0.5), (Family::One, -0.02, -1.0))?;
    println!("outgoing strengths {:?}, shifts {:?}", p.sigma, p.xi);

    for seed in 1..=3 {
        let c = fit_interaction_constants(&sys, &EstimateSpec { rng_seed: seed, ..Default::default() })?;
        println!("seed {seed}: {c:?}");
    }
    Ok(())
}
