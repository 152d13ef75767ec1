use proptest::prelude::*;
use wavefront::fronttrack::*;
use wavefront::hypsys::PSystemExp;
use wavefront::oracle::*;
use wavefront::wavecurves::{solve_riemann_with, FanSplit, Scheme};
use wavefront::{HyperbolicSystem, RiemannPoint};

fn shock_data(sys: &PSystemExp) -> (StepData, f64) {
    // 1-shock from (0, 0) down to v = −0.04
    let vr = -0.04f64;
    let zr = -((vr.abs()) * ((-vr).exp() - 1.0)).sqrt();
    let right = sys.riemann_coords([vr, zr]).unwrap();
    let speed = -(((-vr).exp() - 1.0) / -vr).sqrt() / sys.speed_scale();
    (StepData { left: RiemannPoint::ORIGIN, jumps: vec![(0.0, right)] }, speed)
}

/// Position where `v` crosses the midpoint of its end states.
fn crossing(g: &FvGrid, mid: f64) -> f64 {
    let xs: Vec<f64> = g.centers().collect();
    for i in 1..g.u.len() {
        let (a, b) = (g.u[i - 1][0] - mid, g.u[i][0] - mid);
        if a.signum() != b.signum() {
            return xs[i - 1] + (xs[i] - xs[i - 1]) * a / (a - b);
        }
    }
    panic!("no crossing")
}

#[test]
fn constant_data_is_stationary() {
    let sys = PSystemExp::new(0.05);
    let d = StepData::constant(RiemannPoint::new(0.03, -0.02));
    let g0 = FvGrid::from_steps(&sys, &d, (-1.0, 1.0), 0.01, 0.8).unwrap();
    let mut g = g0.clone();
    fv_advance(&sys, &mut g, 0.5).unwrap();
    for (a, b) in g.u.iter().zip(&g0.u) {
        assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }
}

#[test]
fn cfl_above_limit_is_rejected() {
    let sys = PSystemExp::new(0.05);
    let d = StepData::constant(RiemannPoint::ORIGIN);
    assert!(fv_evolve(&sys, &d, 0.1, 0.01, 0.95).is_err());
}

#[test]
fn shock_moves_at_rankine_hugoniot_speed() {
    let sys = PSystemExp::new(0.05);
    let (d, s) = shock_data(&sys);
    let t = 0.5;
    for h in [4e-3, 2e-3, 1e-3] {
        let g = fv_evolve(&sys, &d, t, h, 0.8).unwrap();
        let x = crossing(&g, -0.02);
        assert!((x - s * t).abs() <= 2.0 * h, "h={h}: {x} vs {}", s * t);
    }
}

#[test]
fn refinement_is_first_order() {
    let sys = PSystemExp::new(0.05);
    let (d, _) = shock_data(&sys);
    let grids: Vec<StepFunction> =
        [4e-3, 2e-3, 1e-3].iter().map(|&h| StepFunction::from_grid(&fv_evolve(&sys, &d, 0.5, h, 0.8).unwrap())).collect();
    let iv = (-1.0, 1.0);
    let d1 = l1_distance(&grids[0], &grids[1], iv);
    let d2 = l1_distance(&grids[1], &grids[2], iv);
    let r = d1 / d2;
    assert!((r - 2.0).abs() <= 0.6, "ratio {r}");
}

#[test]
fn l1_elementary_cases() {
    let a = StepFunction { breaks: vec![0.0], values: vec![[0.0, 0.0], [1.0, -0.5]] };
    assert_eq!(l1_distance(&a, &a, (-1.0, 1.0)), 0.0);
    let b = StepFunction { breaks: vec![0.1], values: a.values.clone() };
    assert!((l1_distance(&a, &b, (-1.0, 1.0)) - 1.5 * 0.1).abs() < 1e-15);
}

#[test]
fn profile_vs_cells_matches_quadrature() {
    let sys = PSystemExp::new(0.05);
    let (d, _) = shock_data(&sys);
    let d = StepData { jumps: vec![d.jumps[0], (0.3, RiemannPoint::new(0.02, 0.01))], ..d };
    let opts = EngineOptions::new(5e-3);
    let ev = evolve(&sys, &init_from_steps(&sys, &d.quantized(5e-3), &opts).unwrap(), 0.4, &opts).unwrap();
    let g = fv_evolve(&sys, &d, 0.4, 5e-3, 0.8).unwrap();
    let (a, b) = (-0.6, 0.9);
    let fast = l1_distance(&StepFunction::from_profile(&sys, &ev.profile), &StepFunction::from_grid(&g), (a, b));

    // cell by cell, splitting at every front inside the cell
    let mut quad = 0.0;
    for (i, u) in g.u.iter().enumerate() {
        let (c0, c1) = ((g.x0 + i as f64 * g.h).max(a), (g.x0 + (i + 1) as f64 * g.h).min(b));
        if c1 <= c0 {
            continue;
        }
        let mut cuts = vec![c0, c1];
        cuts.extend(ev.profile.fronts.iter().map(|f| f.position).filter(|&x| x > c0 && x < c1));
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let s = sys.state(ev.profile.state_at(0.5 * (w[0] + w[1])));
            quad += (w[1] - w[0]) * ((s[0] - u[0]).abs() + (s[1] - u[1]).abs());
        }
    }
    assert!((fast - quad).abs() < 1e-10, "{fast} vs {quad}");
}

#[test]
fn csv_has_cell_centers() {
    let sys = PSystemExp::new(0.05);
    let g = FvGrid::from_steps(&sys, &StepData::constant(RiemannPoint::ORIGIN), (0.0, 0.1), 0.05, 0.5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cells.csv");
    g.write_csv(&p).unwrap();
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_center,u1,u2"));
    let x: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((x - 0.025).abs() < 1e-15);
}

#[test]
fn riemann_study_converges() {
    let sys = PSystemExp::new(0.05);
    let d = StepData { left: RiemannPoint::new(0.05, -0.05), jumps: vec![(0.0, RiemannPoint::new(-0.05, 0.05))] };
    let s = oracle_compare(&sys, &d, &[(1e-2, 1e-3), (5e-3, 5e-4), (2.5e-3, 2.5e-4)], 0.5, 0.8).unwrap();
    assert!(s.monotone, "{:?}", s.levels);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn middle_state_agrees_with_wave_curves(a in -0.08f64..0.08, b in -0.08f64..0.08, c in -0.08f64..0.08, d in -0.08f64..0.08) {
        let sys = PSystemExp::new(0.05);
        let (wl, wr) = (RiemannPoint::new(a, b), RiemannPoint::new(c, d));
        let fan = solve_riemann_with(&sys, wl, wr, &Scheme::exact_curves(1.0), [FanSplit::Single; 2]).unwrap();
        let (l, r) = (sys.state(wl), sys.state(wr));
        let (v, z) = middle_state((l[0], l[1]), (r[0], r[1])).unwrap();
        let m = sys.state(fan.w_star);
        prop_assert!((v - m[0]).abs() < 1e-9 && (z - m[1]).abs() < 1e-9, "({v}, {z}) vs {m:?}");
    }
}
