//! Track random initial data and watch the total variation decay once
//! same-family waves start to meet.

use wavefront::cli::random_steps;
use wavefront::fronttrack::{evolve, init_from_steps, EngineOptions};
use wavefront::glimm::total_variation;
use wavefront::hypsys::PSystemExp;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let eps = 2e-3;
    let opts = EngineOptions::new(eps);
    let data = random_steps(3, 30, 0.04, (0.0, 1.0)).quantized(eps);
    let ev = evolve(&sys, &init_from_steps(&sys, &data, &opts)?, 20.0, &opts)?;

    println!("{} interactions", ev.history.interactions.len());
    for t in [0.0, 1.0, 2.5, 5.0, 10.0, 20.0] {
        let p = ev.history.profile_at(t);
        let tv = total_variation(&p, f64::NEG_INFINITY, f64::INFINITY);
        println!("t = {t:4.1}: {:4} fronts, TV = {:.4} ({:.4} + {:.4})", p.fronts.len(), tv.total, tv.family[0], tv.family[1]);
    }
    ev.profile.check_invariants(&sys, eps, 1e-9)
}
