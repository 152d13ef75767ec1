use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavefront::datagen::*;
use wavefront::fronttrack::{EngineOptions, StepData};
use wavefront::hypsys::PSystemExp;
use wavefront::RiemannPoint;

fn tv_on(d: &StepData, a: f64, b: f64) -> f64 {
    let mut prev = d.left;
    let mut tv = 0.0;
    for &(x, w) in &d.jumps {
        if x >= a && x <= b {
            tv += (w.w1 - prev.w1).abs() + (w.w2 - prev.w2).abs();
        }
        prev = w;
    }
    tv
}

/// Hand bound: at `λ = 2^{−j}` either leave `V^λ` empty or put every block
/// with `k > j` into one component of measure `≤ 2λ`, whichever is cheaper.
fn geometric_estimate(spec: &PAlphaSpec) -> f64 {
    let a = spec.alpha;
    (0..=spec.levels)
        .map(|j| {
            let lambda = 0.5f64.powi(j as i32);
            let outside: f64 = (1..=j.min(spec.levels)).map(|k| 2.0 * spec.amplitude * (2f64.powf(k as f64 * (1.0 - a))).ceil()).sum();
            let comps = if j < spec.levels { 1.0 } else { 0.0 };
            let total: f64 = spec.blocks().iter().map(|b| b.tv).sum();
            let s = lambda.powf(1.0 - a);
            (total * s).min((2.0 * s).max(outside * s).max(comps * s))
        })
        .fold(0.0, f64::max)
}

fn dyadic(levels: u32) -> Vec<f64> {
    (0..=levels).map(|j| 0.5f64.powi(j as i32)).collect()
}

#[test]
fn generator_is_deterministic() {
    let spec = PAlphaSpec::default();
    assert_eq!(generate_palpha(&spec).unwrap(), generate_palpha(&spec).unwrap());
    let other = PAlphaSpec { seed: 2, ..spec.clone() };
    assert_ne!(generate_palpha(&spec).unwrap(), generate_palpha(&other).unwrap());
}

#[test]
fn single_block_counts() {
    let spec = PAlphaSpec { levels: 1, ..Default::default() };
    let d = generate_palpha(&spec).unwrap();
    let n1 = spec.blocks()[0].oscillations;
    assert_eq!(n1, 2);
    assert!((tv_on(&d, -1.0, 3.0) - 2.0 * spec.amplitude * n1 as f64).abs() < 1e-15);
}

#[test]
fn block_variation_is_exact() {
    let spec = PAlphaSpec::default();
    let d = generate_palpha(&spec).unwrap();
    for b in spec.blocks() {
        let expect = 2.0 * spec.amplitude * (2f64.powf(b.k as f64 / 2.0)).ceil();
        assert!((tv_on(&d, b.start, b.start + b.len) - expect).abs() < 1e-14, "block {}", b.k);
        assert_eq!(b.tv, expect);
    }
}

#[test]
fn blocks_are_separated_and_bounded() {
    let spec = PAlphaSpec { alpha: 0.8, levels: 8, amplitude: 0.06, ..Default::default() };
    let bl = spec.blocks();
    for w in bl.windows(2) {
        assert!(w[1].start - (w[0].start + w[0].len) >= w[0].len - 1e-15);
    }
    let d = generate_palpha(&spec).unwrap();
    assert!(d.jumps.iter().all(|j| j.1.w1.abs().max(j.1.w2.abs()) <= spec.eps1));
    assert!(generate_palpha(&PAlphaSpec { amplitude: 0.2, ..spec }).is_err());
}

#[test]
fn certificate_within_twice_geometric_bound() {
    for (alpha, amp) in [(0.5, 0.01), (0.8, 0.01), (0.5, 0.04)] {
        let spec = PAlphaSpec { alpha, amplitude: amp, ..Default::default() };
        let d = generate_palpha(&spec).unwrap();
        let cert = check_palpha(&d, alpha, &dyadic(spec.levels), spec.support()).unwrap();
        let geo = geometric_estimate(&spec);
        assert!(cert.certified);
        assert!(cert.c_tilde <= 2.0 * geo && cert.c_tilde >= 0.5 * geo, "alpha {alpha}: {} vs {geo}", cert.c_tilde);
        for p in &cert.points {
            let s = p.lambda.powf(alpha - 1.0);
            assert!(p.measure <= cert.c_tilde * p.lambda.powf(alpha) + 1e-12);
            assert!(p.tv_outside <= cert.c_tilde * s + 1e-12);
            assert!(p.components as f64 <= cert.c_tilde * s + 1e-12);
        }
    }
}

#[test]
fn single_jump_certificate_is_bounded() {
    let d = StepData { left: RiemannPoint::ORIGIN, jumps: vec![(0.5, RiemannPoint::new(0.3, 0.0))] };
    let cert = check_palpha(&d, 0.5, &dyadic(20), (0.0, 1.0)).unwrap();
    assert!(cert.certified);
    assert!(cert.c_tilde <= 1.0f64.max(0.3) + 1e-12);
}

#[test]
fn white_noise_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 1 << 14;
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    for k in 0..n {
        d.jumps.push((k as f64 / n as f64, RiemannPoint::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))));
    }
    let lambdas: Vec<f64> = (0..=8).map(|j| 0.5f64.powi(j)).collect();
    let cert = check_palpha(&d, 0.5, &lambdas, (0.0, 1.0)).unwrap();
    assert!(!cert.certified, "growth slope {}", cert.growth_slope);
    assert!(cert.growth_slope < GROWTH_LIMIT);
}

#[test]
fn bv_data_decays_slowly() {
    let sys = PSystemExp::new(0.05);
    let eps = 2e-3;
    let opts = EngineOptions::new(eps);
    let d = StepData {
        left: RiemannPoint::ORIGIN,
        jumps: vec![(0.0, RiemannPoint::new(0.02, 0.0)), (0.6, RiemannPoint::new(0.02, -0.02)), (1.2, RiemannPoint::ORIGIN)],
    };
    let t0 = 10.0 * eps;
    let times: Vec<f64> = (0..=8).map(|i| t0 * (1.0 / t0).powf(i as f64 / 8.0)).collect();
    let (r, _) = wavefront::glimm::decay_fit(&sys, &d.quantized(eps), (0.0, 1.2), &times, &opts, 0.5).unwrap();
    assert!(r.slope.abs() < 0.2, "slope {}", r.slope);
}

#[test]
fn decay_exponents_match_alpha() {
    let sys = PSystemExp::new(0.05);
    let eps = 4e-3;
    let opts = EngineOptions::new(eps);
    let t0 = 10.0 * eps;
    let times: Vec<f64> = (0..=12).map(|i| t0 * (1.0 / t0).powf(i as f64 / 12.0)).collect();
    for (alpha, lo, hi) in [(0.5, -0.65, -0.35), (0.8, -0.35, -0.05)] {
        let spec = PAlphaSpec { alpha, amplitude: 0.08, ..Default::default() };
        let r = decay_experiment(&sys, &spec, spec.support(), &times, &opts, 0.1).unwrap();
        assert!(r.certificate.certified);
        assert!(r.decay.slope >= lo && r.decay.slope <= hi, "alpha {alpha}: slope {}", r.decay.slope);
        assert!(r.covering.iter().all(|c| c.touched as f64 <= c.touched_bound));
    }
}
