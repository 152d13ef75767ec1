//! Compare front tracking with a Godunov finite-volume solution under joint
//! refinement.

use wavefront::fronttrack::StepData;
use wavefront::hypsys::PSystemExp;
use wavefront::oracle::oracle_compare;
use wavefront::RiemannPoint;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let data = StepData { left: RiemannPoint::new(0.05, -0.05), jumps: vec![(0.0, RiemannPoint::new(-0.05, 0.05))] };
    let s = oracle_compare(&sys, &data, &[(1e-2, 2e-3), (5e-3, 1e-3), (2.5e-3, 5e-4)], 0.5, 0.8)?;
    for l in &s.levels {
        println!("eps {:.1e}, h {:.1e}: L1 = {:.3e} ({} fronts, {} cells)", l.epsilon, l.h, l.l1, l.fronts, l.cells);
    }
    println!("monotone {}, final relative {:.2e}", s.monotone, s.final_relative);
    Ok(())
}
