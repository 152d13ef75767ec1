//! Propagate a unit shift from one front through every interaction and
//! compare with finite differences of the perturbed run.

use wavefront::cli::random_steps;
use wavefront::fronttrack::{evolve, init_from_steps, EngineOptions};
use wavefront::hypsys::PSystemExp;
use wavefront::sensitivity::{finite_difference_check, propagate, ShiftSeed};

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let eps = 2e-3;
    let opts = EngineOptions::new(eps);
    let data = random_steps(12, 12, 0.04, (0.0, 1.0)).quantized(eps);
    let ev = evolve(&sys, &init_from_steps(&sys, &data, &opts)?, 1.0, &opts)?;

    let (front, times) = (66, [0.25, 0.5, 0.75, 1.0]);
    let ledger = propagate(&ev.history, ShiftSeed { front, xi0: 1.0, tau: 0.0 }, &times)?;
    println!("{:>5} {:>10} {:>10} {:>10}", "t", "V_xi", "Q_xi", "fronts");
    for r in &ledger.rows {
        println!("{:>5} {:>10.4e} {:>10.4e} {:>10}", r.t, r.v_xi, r.q_xi, r.front_count);
    }
    println!("shifted interactions: {}", ledger.interactions.len());

    let fd = finite_difference_check(&sys, &ev.initial, &ev.history, front, 1.0, &[1e-5, 1e-6, 1e-7], &times, &opts)?;
    println!("displacement slope {:.4}, topology changed: {}", fd.displacement_slope, fd.topology_changed);
    Ok(())
}
