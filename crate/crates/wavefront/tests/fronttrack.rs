use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavefront::fronttrack::*;
use wavefront::hypsys::PSystemExp;
use wavefront::wavecurves::{solve_riemann, WaveKind};
use wavefront::{Family, HyperbolicSystem, RiemannPoint};

fn random_steps(seed: u64, n: usize, amp: f64) -> StepData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    for k in 0..n {
        let x = k as f64 / n as f64;
        d.jumps.push((x, RiemannPoint::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))));
    }
    d.jumps.push((1.0, RiemannPoint::ORIGIN));
    d
}

#[test]
fn random_run_keeps_invariants() {
    let sys = PSystemExp::new(0.05);
    let eps = 1e-3;
    let opts = EngineOptions::new(eps);
    let data = random_steps(3, 40, 0.05).quantized(eps);
    let p0 = init_from_steps(&sys, &data, &opts).unwrap();
    p0.check_invariants(&sys, eps, 1e-10).unwrap();
    let t0 = std::time::Instant::now();
    let ev = evolve(&sys, &p0, 1.0, &opts).unwrap();
    eprintln!(
        "fronts {} -> {}, interactions {}, {:?}",
        p0.fronts.len(),
        ev.profile.fronts.len(),
        ev.history.interactions.len(),
        t0.elapsed()
    );
    ev.profile.check_invariants(&sys, eps, 1e-10).unwrap();
    for t in [0.1, 0.37, 0.8] {
        let p = ev.history.profile_at(t);
        p.check_invariants(&sys, eps, 1e-10).unwrap();
        for fam in Family::BOTH {
            // transverse jumps across shocks of the other family are O(|σ|³)
            let tv: f64 = p.fronts.iter().filter(|f| f.family == fam).map(|f| f.strength.abs()).sum();
            let cubic: f64 = p.fronts.iter().filter(|f| f.family != fam).map(|f| f.strength.abs().powi(3)).sum();
            assert!((tv - p.invariant_variation(fam)).abs() <= 1e-10 + cubic);
        }
    }
    assert_eq!(ev.history.profile_at(1.0).fronts.len(), ev.profile.fronts.len());
}

#[test]
fn front_count_only_grows_by_new_fans() {
    let sys = PSystemExp::new(0.05);
    let eps = 1e-3;
    let opts = EngineOptions::new(eps);
    let p0 = init_from_steps(&sys, &random_steps(5, 30, 0.04).quantized(eps), &opts).unwrap();
    let ev = evolve(&sys, &p0, 1.0, &opts).unwrap();
    for rec in &ev.history.interactions {
        let inc: Vec<Family> = rec.incoming.iter().map(|&i| ev.history.front(i).front.family).collect();
        let out = &rec.outgoing;
        let mut allowed = 2;
        for fam in Family::BOTH {
            if !inc.contains(&fam) {
                // a newly created wave may be split over grid lines it crosses
                let s: f64 = out
                    .iter()
                    .map(|&i| ev.history.front(i).front)
                    .filter(|f| f.family == fam)
                    .map(|f| f.strength.abs())
                    .sum();
                allowed += (s / eps).ceil() as usize + 1;
            }
        }
        assert!(out.len() <= allowed.max(rec.incoming.len()), "{rec:?}");
    }
}

#[test]
fn riemann_datum_is_self_similar() {
    let sys = PSystemExp::new(0.05);
    let eps = 1e-3;
    let opts = EngineOptions::new(eps);
    let data = StepData { left: RiemannPoint::new(0.01, -0.02), jumps: vec![(0.0, RiemannPoint::new(-0.03, 0.02))] };
    let p0 = init_from_steps(&sys, &data, &opts).unwrap();
    let ev = evolve(&sys, &p0, 2.0, &opts).unwrap();
    assert!(ev.history.interactions.is_empty());
    let p1 = ev.history.profile_at(1.0);
    let p2 = ev.history.profile_at(2.0);
    for (a, b) in p1.fronts.iter().zip(&p2.fronts) {
        assert!((2.0 * a.position - b.position).abs() < 1e-9);
    }
}

#[test]
fn sawtooth_front_count_and_variation() {
    let sys = PSystemExp::new(0.05);
    let eps = 1e-3;
    let opts = EngineOptions::new(eps);
    let amp = 0.02;
    // 10 teeth on [0,1]: ramp up in w1 then drop
    let tooth = |x: f64| {
        let y = (10.0 * x).fract();
        RiemannPoint::new(amp * y, 0.0)
    };
    let p = init_profile(&sys, tooth, (0.0, 1.0), 400, &opts).unwrap();
    let bound = 10 * (2 + 2 * (amp / eps).ceil() as usize);
    assert!(p.fronts.len() <= bound, "{} > {bound}", p.fronts.len());
    let data = StepData::from_fn(tooth, 0.0, 1.0, 400);
    let sampled_tv: f64 = data.total_variation().iter().sum();
    let tv: f64 = p.fronts.iter().map(|f| f.strength.abs()).sum();
    assert!((tv - sampled_tv).abs() <= 2.0 * eps * p.fronts.len() as f64);
}

#[test]
fn resolve_interaction_matches_engine() {
    let sys = PSystemExp::new(0.05);
    let eps = 1e-3;
    let opts = EngineOptions::new(eps);
    let data = StepData {
        left: RiemannPoint::ORIGIN,
        jumps: vec![(0.0, RiemannPoint::new(0.0, -0.02)), (0.3, RiemannPoint::new(-0.02, -0.02))],
    };
    let p0 = init_from_steps(&sys, &data, &opts).unwrap();
    let e = next_interaction(&p0, 1.0).unwrap();
    let q = resolve_interaction(&sys, &p0, &e, &opts).unwrap();
    q.check_invariants(&sys, eps, 1e-10).unwrap();
    let ev = evolve(&sys, &p0, e.time, &opts).unwrap();
    assert_eq!(ev.history.interactions.len(), 1);
    let r = ev.history.profile_at(e.time);
    assert_eq!(q.fronts.len(), r.fronts.len());
    for (a, b) in q.fronts.iter().zip(&r.fronts) {
        assert!((a.position - b.position).abs() < 1e-12);
        assert_eq!(a.strength, b.strength);
    }
}

#[test]
fn weak_residual_cases() {
    let sys = PSystemExp::new(0.05);
    let spec = WeakTestSpec { x_range: (-1.0, 1.0), t_range: (0.0, 1.0), nx: 9, nt: 4 };
    // constant
    let ev = evolve(&sys, &Profile::constant(RiemannPoint::ORIGIN, 0.0), 1.0, &EngineOptions::new(1e-3)).unwrap();
    assert_eq!(weak_residual(&sys, &ev.history, &spec), 0.0);
    // exact shock with RH speed
    let wm = RiemannPoint::ORIGIN;
    let fan = solve_riemann(&sys, wm, RiemannPoint::new(-0.04, 0.0), 1e-6).unwrap();
    let wp = fan.fronts[0].right;
    let data = StepData { left: wm, jumps: vec![(0.0, wp)] };
    let opts = EngineOptions::new(1e-6);
    let ev = evolve(&sys, &init_from_steps(&sys, &data, &opts).unwrap(), 1.0, &opts).unwrap();
    assert_eq!(ev.history.fronts[0].front.kind, WaveKind::Shock);
    assert!(weak_residual(&sys, &ev.history, &spec) <= 1e-10);
    // pure fan: residual O(eps)
    let mut res = Vec::new();
    for eps in [4e-3, 2e-3, 1e-3] {
        let opts = EngineOptions::new(eps);
        let data = StepData { left: RiemannPoint::ORIGIN, jumps: vec![(0.0, RiemannPoint::new(0.04, 0.0))] };
        let ev = evolve(&sys, &init_from_steps(&sys, &data, &opts).unwrap(), 1.0, &opts).unwrap();
        res.push(weak_residual(&sys, &ev.history, &spec));
    }
    let slope = (res[0] / res[2]).ln() / 4f64.ln();
    assert!((slope - 1.0).abs() < 0.2, "{res:?} slope {slope}");
}

#[test]
fn profile_csv_roundtrip() {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(1e-3);
    let p = init_from_steps(&sys, &random_steps(9, 5, 0.03).quantized(1e-3), &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    write_profile_csv(&p, &path).unwrap();
    let q = read_profile_csv(&path, 0.0, RiemannPoint::ORIGIN).unwrap();
    assert_eq!(p, q);
    let _ = sys.name();
}
