use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavefront::fronttrack::*;
use wavefront::hypsys::PSystemExp;
use wavefront::sensitivity::*;
use wavefront::RiemannPoint;

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

fn run(seed: u64, n: usize, eps: f64) -> (PSystemExp, Evolution) {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(eps);
    let p0 = init_from_steps(&sys, &random_steps(seed, n, 0.04).quantized(eps), &opts).unwrap();
    let ev = evolve(&sys, &p0, 1.0, &opts).unwrap();
    (sys, ev)
}

/// Fronts that are alone at their initial position.
fn isolated(p: &Profile) -> Vec<usize> {
    (0..p.fronts.len())
        .filter(|&i| {
            let x = p.fronts[i].position;
            (i == 0 || p.fronts[i - 1].position < x) && p.fronts.get(i + 1).map_or(true, |f| f.position > x)
        })
        .collect()
}

#[test]
fn translation_shifts_every_front_by_one() {
    let (_, ev) = run(11, 20, 2e-3);
    let seeds: Vec<ShiftSeed> = ev.initial.fronts.iter().map(|f| ShiftSeed { front: f.id, xi0: 1.0, tau: 0.0 }).collect();
    let ledger = propagate_many(&ev.history, &seeds, &[]).unwrap();
    assert!(ev.history.interactions.len() > 100);
    assert!(ledger.xi.iter().all(|&x| x == 1.0));
}

#[test]
fn shifts_are_linear_in_the_seed() {
    let (_, ev) = run(12, 20, 2e-3);
    let id = ev.initial.fronts.len() / 2;
    let a = propagate(&ev.history, ShiftSeed { front: id, xi0: 1.0, tau: 0.0 }, &[0.5, 1.0]).unwrap();
    let b = propagate(&ev.history, ShiftSeed { front: id, xi0: -2.0, tau: 0.0 }, &[0.5, 1.0]).unwrap();
    for (x, y) in a.xi.iter().zip(&b.xi) {
        assert_eq!(*y, -2.0 * x);
    }
    assert_eq!(b.v_xi_final, 2.0 * a.v_xi_final);
    let c = propagate(&ev.history, ShiftSeed { front: id, xi0: 0.3, tau: 0.0 }, &[]).unwrap();
    for (x, y) in a.xi.iter().zip(&c.xi) {
        assert!((y - 0.3 * x).abs() <= 1e-12 * x.abs().max(1.0));
    }
    let z = propagate(&ev.history, ShiftSeed { front: id, xi0: 0.0, tau: 0.0 }, &[]).unwrap();
    assert_eq!(z.q_xi_same, 0.0);
    assert_eq!(z.v_xi_max, 0.0);
}

#[test]
fn shifts_stay_in_the_cone() {
    let (_, ev) = run(13, 25, 2e-3);
    for tau in [0.0, 0.3] {
        let p = ev.history.profile_at(tau);
        for f in p.fronts.iter().step_by(7) {
            let ledger = propagate(&ev.history, ShiftSeed { front: f.id, xi0: 1.0, tau }, &[]).unwrap();
            for t in [0.4, 0.7, 1.0] {
                if t < tau {
                    continue;
                }
                for g in ev.history.profile_at(t).fronts {
                    if ledger.xi[g.id] != 0.0 {
                        assert!((g.position - f.position).abs() <= t - tau + 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn free_front_keeps_its_shift() {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(1e-3);
    let mut d = StepData::constant(RiemannPoint::ORIGIN);
    d.jumps.push((0.0, RiemannPoint::new(-0.02, 0.0)));
    let p0 = init_from_steps(&sys, &d, &opts).unwrap();
    assert_eq!(p0.fronts.len(), 1);
    let ev = evolve(&sys, &p0, 1.0, &opts).unwrap();
    let l = propagate(&ev.history, ShiftSeed { front: 0, xi0: 0.5, tau: 0.0 }, &[0.25, 0.5, 1.0]).unwrap();
    assert!(l.rows.iter().all(|r| r.v_xi == 0.02 * 0.5 && r.q_xi == 0.0));
    let lip = lipschitz_estimate(&ev.history, 0.0).unwrap();
    assert_eq!(lip.l_hat, 1.0);
}

#[test]
fn ledger_rows_track_the_functionals() {
    let (_, ev) = run(14, 20, 2e-3);
    let times: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let l = propagate(&ev.history, ShiftSeed { front: 5, xi0: 1.0, tau: 0.0 }, &times).unwrap();
    assert_eq!(l.rows.len(), times.len());
    for w in l.rows.windows(2) {
        assert!(w[1].q_xi >= w[0].q_xi && w[1].q_xi_same >= w[0].q_xi_same);
        assert!(w[1].q_xi >= w[1].q_xi_same);
    }
    assert!(l.rows.iter().all(|r| r.v_xi <= l.v_xi_max + 1e-14));
    assert!((l.rows.last().unwrap().v_xi - l.v_xi_final).abs() < 1e-14);
    let dir = tempfile::tempdir().unwrap();
    l.write_csv(dir.path().join("ledger.csv")).unwrap();
    l.write_interactions(dir.path().join("ledger.jsonl")).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert!(csv.starts_with("t,V_xi,Q_xi,Q_xi_same,Q,front_count"));
    assert_eq!(csv.lines().count(), times.len() + 1);
}

#[test]
fn interaction_increase_is_quadratic() {
    // |ξ1σ1| + |ξ2σ2| − |ξ′σ′| − |ξ″σ″| ≤ C (|ξ′| + |ξ″|)|σ′σ″| with one C
    let mut c: f64 = 0.0;
    for seed in 0..4 {
        let (_, ev) = run(20 + seed, 20, 2e-3);
        for id in isolated(&ev.initial).into_iter().step_by(3) {
            let l = propagate(&ev.history, ShiftSeed { front: id, xi0: 1.0, tau: 0.0 }, &[]).unwrap();
            for r in l.interactions.iter().filter(|r| !r.multi) {
                let a = r.amount();
                if a > 1e-12 {
                    c = c.max(r.v_xi_increase() / a);
                }
            }
        }
    }
    eprintln!("fitted C = {c}");
    assert!(c.is_finite() && c < 50.0);
}

#[test]
fn displacement_is_first_order() {
    let opts = EngineOptions::new(2e-3);
    let mut checked = 0;
    for seed in 30..80 {
        let (sys, ev) = run(seed, 12, 2e-3);
        for id in isolated(&ev.initial) {
            let r = finite_difference_check(
                &sys,
                &ev.initial,
                &ev.history,
                id,
                1.0,
                &[1e-5, 1e-6, 1e-7],
                &[0.25, 0.5, 0.75, 1.0],
                &opts,
            )
            .unwrap();
            if r.topology_changed || r.shifted_interactions == 0 {
                continue;
            }
            assert!((r.displacement_slope - 1.0).abs() < 0.05, "{r:?}");
            assert!(r.max_derivative_error < 1e-6, "{r:?}");
            checked += 1;
        }
    }
    assert!(checked >= 3, "{checked}");
}

#[test]
fn zero_seed_moves_nothing() {
    let (sys, ev) = run(16, 10, 2e-3);
    let r = finite_difference_check(&sys, &ev.initial, &ev.history, 3, 0.0, &[1e-4], &[1.0], &EngineOptions::new(2e-3)).unwrap();
    assert_eq!(r.steps[0].max_displacement, 0.0);
}

#[test]
fn homotopy_of_identical_data_is_zero() {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(2e-3);
    let d = random_steps(17, 8, 0.04).quantized(2e-3);
    let r = homotopy_distance(&sys, &d, &d, 0.5, &opts, &HomotopyOptions::default()).unwrap();
    assert_eq!(r.bound, 0.0);
    assert_eq!(r.measured, 0.0);
}

#[test]
fn homotopy_of_a_lone_shock_is_a_rectangle() {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(1e-3);
    let w = RiemannPoint::new(-0.03, 0.0);
    let mk = |x: f64| StepData { left: RiemannPoint::ORIGIN, jumps: vec![(x, w)] };
    let (d0, d1) = (mk(0.0), mk(0.1));
    let strength = homotopy_distance(&sys, &d0, &d1, 0.5, &opts, &HomotopyOptions { metric: PathMetric::Strength, ..Default::default() }).unwrap();
    assert!((strength.bound - 0.03 * 0.1).abs() < 1e-15);
    let cons = homotopy_distance(&sys, &d0, &d1, 0.5, &opts, &HomotopyOptions::default()).unwrap();
    assert!((cons.bound - cons.measured).abs() < 1e-12 * cons.measured);
}

#[test]
fn homotopy_bound_dominates_random_pairs() {
    let sys = PSystemExp::new(0.05);
    let opts = EngineOptions::new(2e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..10 {
        let d0 = random_steps(200 + trial, 8, 0.04).quantized(2e-3);
        let mut d1 = d0.clone();
        for j in d1.jumps.iter_mut() {
            j.0 += rng.gen_range(-0.02..0.02);
        }
        d1.jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        if d1.jumps.iter().zip(&d0.jumps).any(|(a, b)| a.1 != b.1) {
            continue;
        }
        let r = homotopy_distance(&sys, &d0, &d1, 0.5, &opts, &HomotopyOptions::default()).unwrap();
        assert!(r.dominates, "{r:?}");
    }
}

#[test]
fn replay_switching_at_the_end_is_exact() {
    let (_, ev) = run(18, 15, 2e-3);
    let l = propagate(&ev.history, ShiftSeed { front: 4, xi0: 1.0, tau: 0.0 }, &[]).unwrap();
    let sys = PSystemExp::new(0.05);
    let r = temple_replay(&sys, &ev.history, &l, 1.0, &[0.5, 1.0]).unwrap();
    assert_eq!(r.terminal_discrepancy, 0.0);
    assert_eq!(r.terminal_v, r.terminal_v_tilde);
}

#[test]
fn glimm_potential_counts_approaching_pairs() {
    let a = RiemannPoint::ORIGIN;
    let front = |x: f64, l: RiemannPoint, r: RiemannPoint, fam: wavefront::Family, kind| Front {
        id: 0,
        position: x,
        family: fam,
        kind,
        strength: r.get(fam) - l.get(fam),
        speed: 0.0,
        left_w: l,
        right_w: r,
    };
    use wavefront::wavecurves::WaveKind::*;
    use wavefront::Family::*;
    let b = RiemannPoint::new(0.0, 0.1);
    let c = RiemannPoint::new(-0.2, 0.1);
    let d = RiemannPoint::new(-0.2, 0.4);
    // 2-front, 1-shock, 2-rarefaction: pairs (2,1) approach; (2,2) both rarefactions do not
    let p = Profile {
        leftmost_state: a,
        fronts: vec![front(0.0, a, b, Two, Rarefaction), front(1.0, b, c, One, Shock), front(2.0, c, d, Two, Rarefaction)],
        time: 0.0,
    };
    assert!((glimm_potential(&p) - 0.1 * 0.2).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn transfer_matches_closed_form(xp in -2.0..2.0f64, xpp in -2.0..2.0f64, lp in -1.0..0.0f64, gap in 0.1..1.0f64, l1 in -1.0..1.0f64) {
        let lpp = lp + gap;
        let (x1, _) = transfer_shifts((0.0, xp, lp), (0.0, xpp, lpp), (l1, 0.0)).unwrap();
        let closed = (xp * (lpp - l1) - xpp * (lp - l1)) / (lpp - lp);
        prop_assert!((x1 - closed).abs() <= 1e-12 * (1.0 + closed.abs()));
    }
}
