//! Generate rough data with prescribed oscillation and fit the decay of the
//! total variation against the predicted exponent α − 1.

use wavefront::datagen::{decay_experiment, PAlphaSpec};
use wavefront::fronttrack::EngineOptions;
use wavefront::hypsys::PSystemExp;

fn main() -> wavefront::Result<()> {
    let sys = PSystemExp::new(0.05);
    let eps = 4e-3;
    let opts = EngineOptions::new(eps);
    let t0 = 10.0 * eps;
    let times: Vec<f64> = (0..=12).map(|i| t0 * (1.0 / t0).powf(i as f64 / 12.0)).collect();

    for alpha in [0.5, 0.8] {
        let spec = PAlphaSpec { alpha, amplitude: 0.08, ..Default::default() };
        let r = decay_experiment(&sys, &spec, spec.support(), &times, &opts, 0.1)?;
        println!(
            "alpha {alpha}: TV ~ t^{:.3} (predicted {:.1}), certificate C~ = {:.3}, certified {}",
            r.decay.slope,
            alpha - 1.0,
            r.certificate.c_tilde,
            r.certificate.certified
        );
    }
    Ok(())
}
