//! Solve one Riemann problem for the p-system and print the front-tracking fan.

use wavefront::hypsys::PSystemExp;
use wavefront::wavecurves::solve_riemann;
use wavefront::RiemannPoint;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let (wm, wp) = (RiemannPoint::new(0.03, -0.02), RiemannPoint::new(-0.01, 0.04));
    let eps = 5e-3;
    let fan = solve_riemann(&sys, wm, wp, eps)?;

    println!("sigma1 = {:+.6}, sigma2 = {:+.6}", fan.s1, fan.s2);
    println!("{:>6} {:>12} {:>12} {:>12}", "family", "kind", "strength", "speed");
    for f in &fan.fronts {
        println!("{:>6?} {:>12?} {:>12.3e} {:>12.6}", f.family, f.kind, f.strength, f.speed);
    }
    println!("reconstruction residual {:.2e}", fan.reconstruction_residual(&sys, wm, wp, eps)?);
    Ok(())
}
