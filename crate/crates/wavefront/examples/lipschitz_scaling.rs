//! Compare measured shift amplification L(τ) with the rough bound (2L)^N and
//! fit the Hölder exponents over translated pairs.

use wavefront::cli::random_steps;
use wavefront::fronttrack::{evolve, init_from_steps, EngineOptions, StepData};
use wavefront::glimm::{holder_scaling, rough_bound_check};
use wavefront::hypsys::PSystemExp;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let eps = 4e-3;
    let opts = EngineOptions::new(eps);
    let pairs: Vec<(StepData, StepData)> = (0..6)
        .map(|r| {
            let d = random_steps(1 + r, 12, 0.02, (0.0, 1.0)).quantized(eps);
            let e = d.with_shifts(&vec![0.01 * 0.5f64.powi(r as i32 % 4); d.jumps.len()]);
            (d, e)
        })
        .collect();

    let ev = evolve(&sys, &init_from_steps(&sys, &pairs[0].0, &opts)?, 1.0, &opts)?;
    println!("{:>8} {:>8} {:>4} {:>10} {:>12}", "tau", "C", "N", "L(tau)", "(2L)^N");
    for k in 1..=4 {
        let c = rough_bound_check(&ev.history, 0.5f64.powi(k), 0.05, 4)?;
        println!("{:>8.4} {:>8.3} {:>4} {:>10.4} {:>12.4e}", c.tau, c.c, c.n, c.l_tau, c.bound);
    }

    let h = holder_scaling(&sys, &pairs, 0.5, 2.0, 4, &opts)?;
    println!("beta_hat {:.4}, gamma_hat {:.4} (predicted {:.4})", h.beta_hat, h.gamma_hat, h.gamma_predicted);
    Ok(())
}
