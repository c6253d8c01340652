use curveflow::numerics::{fd_derivative, EigenClass};
use curveflow::quotient::quotient_residual;
use curveflow::thermo::{GasParams, PlanckPotential, Polynomial};
use curveflow::virial_flow::{
    fixed_points, flow_temperature_rhs, integrate_first_order, integrate_trajectory, integrate_zeroth, planar_field,
    rescale_to_reduced, zeroth_residual, ExpansionOrders, FirstOrderSolution, ReducedParams, SeriesField, Termination,
    Window, ZerothTerm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIGURE_PARAMS: [(f64, f64); 4] = [(-2.0, 1.0), (1.0, 2.0), (2.0, -3.0), (-2.0, -1.0)];

fn gas() -> GasParams {
    GasParams::new(1.0, 3, 0.1, 1.0, 0.5).unwrap()
}

fn first_order(a1: Polynomial) -> FirstOrderSolution {
    let g = gas();
    let term = ZerothTerm::new(2.0, 1.0, 2.0, &g).unwrap();
    integrate_first_order(&term, &g, &a1, (1.0, 3.0), 0.5, [0.1, -0.2, 0.3, 0.05], 1e-8).unwrap()
}

#[test]
fn zeroth_order_holds_along_planar_trajectories() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let window = Window::default();
    for (a, b) in FIGURE_PARAMS {
        let p = ReducedParams::new(a, b).unwrap();
        let term = ZerothTerm::from_reduced(&p, 1.3, 0.8, 1.1).unwrap();
        let scale = term.rescaling();
        for _ in 0..4 {
            let start = (rng.gen_range(-0.5..2.5), rng.gen_range(-1.5..1.5));
            let traj = integrate_trajectory(&p, start, 5.0, 1e-10, Some(&window)).unwrap();
            for (_, y, n) in traj.samples(60) {
                let (yp, np) = scale.inverse(y, n);
                let Ok(j) = term.jet(yp, np) else { continue };
                if n.abs() < 1e-3 || (y - n * n).abs() < 1e-3 {
                    continue;
                }
                let e = zeroth_residual(&term, &j);
                let mag = [j.l0_y * j.n0 * j.n0, j.m0 * j.k0 * j.k0, j.l0 * j.k0 * j.n0, 1.0]
                    .iter()
                    .fold(0.0f64, |s, v| s.max(v.abs()));
                assert!(e.iter().all(|v| v.abs() <= 1e-10 * mag), "({a},{b}) at ({y},{n}): {e:?}");
                assert!((j.l0 * j.n0 + j.m0 * j.k0 - term.c2).abs() <= 1e-12 * mag);
            }
        }
    }
}

#[test]
fn zeroth_order_from_sampled_trajectory() {
    let g = gas();
    let term = ZerothTerm::new(2.0, 1.0, 2.0, &g).unwrap();
    let traj = integrate_zeroth(&term, (1.0, 3.0), 0.5, 1e-12).unwrap();
    for i in 1..10 {
        let y = 1.0 + 0.2 * i as f64;
        let exact = traj.jet_at(y).unwrap();
        let fd = traj.fd_jet_at(y, 1e-2).unwrap();
        assert!((exact.k0 - fd.k0).abs() < 1e-7, "{} vs {}", exact.k0, fd.k0);
        assert!((exact.k0_y - fd.k0_y).abs() < 1e-5, "{} vs {}", exact.k0_y, fd.k0_y);
        assert!(zeroth_residual(&term, &fd).iter().all(|v| v.abs() < 1e-5));
    }
}

#[test]
fn planar_trajectories_follow_the_graph_ode() {
    let p = ReducedParams::new(2.0, -3.0).unwrap();
    let traj = integrate_trajectory(&p, (2.0, 0.3), 0.5, 1e-13, None).unwrap();
    let (s0, s1) = (traj.path.t_start(), traj.path.t_end());
    for i in 1..20 {
        let s = s0 + (s1 - s0) * i as f64 / 20.0;
        let z = traj.path.eval(s).unwrap();
        if z[0] <= z[1] * z[1] {
            continue;
        }
        let dy = fd_derivative(|t| traj.path.eval(t).unwrap()[0], s, 1, 2e-3).unwrap();
        let dn = fd_derivative(|t| traj.path.eval(t).unwrap()[1], s, 1, 2e-3).unwrap();
        let slope = flow_temperature_rhs(&p, z[0], z[1]).unwrap();
        assert!((dn / dy - slope).abs() <= 1e-8 * slope.abs().max(1.0), "{} vs {slope}", dn / dy);
    }
}

#[test]
fn rescaled_physical_solutions_solve_the_reduced_equation() {
    let (c1, c2, c3, r, w) = (2.0, 0.5, -0.5, 1.0, 1.0);
    let term = ZerothTerm::with_omega_sq(c1, c2, c3, r, w * w).unwrap();
    let map = rescale_to_reduced(c1, c2, c3, r, w).unwrap();
    let traj = integrate_zeroth(&term, (1.0, 3.0), 0.5, 1e-12).unwrap();
    for i in 0..20 {
        let y = 1.01 + 1.98 * i as f64 / 19.0;
        let n = traj.n0_at(y).unwrap();
        let slope_phys = fd_derivative(|t| traj.n0_at(t).unwrap(), y, 1, 2e-3).unwrap();
        let (yr, nr) = map.forward(y, n);
        let reduced = flow_temperature_rhs(&map.params, yr, nr).unwrap();
        assert!((slope_phys * map.y_scale / map.n_scale - reduced).abs() <= 1e-8 * reduced.abs().max(1.0));
        let (yb, nb) = map.inverse(map.forward(y, n).0, map.forward(y, n).1);
        assert!((yb - y).abs() <= 1e-14 * y.abs() && (nb - n).abs() <= 1e-14 * n.abs().max(1.0));
    }
}

#[test]
fn jacobians_match_finite_differences() {
    for (a, b) in FIGURE_PARAMS {
        let p = ReducedParams::new(a, b).unwrap();
        for f in fixed_points(&p) {
            for (i, row) in f.jacobian.iter().enumerate() {
                let dy = fd_derivative(|v| planar_field(&p, v, f.n0)[i], f.y, 1, 1e-5).unwrap();
                let dn = fd_derivative(|v| planar_field(&p, f.y, v)[i], f.n0, 1, 1e-5).unwrap();
                assert!((row[0] - dy).abs() <= 1e-6 * row[0].abs().max(1.0));
                assert!((row[1] - dn).abs() <= 1e-6 * row[1].abs().max(1.0));
            }
        }
    }
}

#[test]
fn centre_orbit_stays_in_an_annulus() {
    let p = ReducedParams::new(2.0, -3.0).unwrap();
    let centre = fixed_points(&p).into_iter().find(|f| f.class == EigenClass::Centre).unwrap();
    let traj = integrate_trajectory(&p, (1.05, 1.05), 50.0, 1e-11, None).unwrap();
    assert_eq!(traj.termination, Termination::ReachedSMax);
    let d: Vec<f64> = traj.samples(5001).iter().map(|&(_, y, n)| (y - centre.y).hypot(n - centre.n0)).collect();
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(lo > 0.04 && hi < 0.08, "annulus [{lo}, {hi}]");
}

#[test]
fn unstable_node_repels() {
    let p = ReducedParams::new(-2.0, 1.0).unwrap();
    let traj = integrate_trajectory(&p, (0.01, 0.01), 20.0, 1e-10, Some(&Window::default())).unwrap();
    let far = traj.samples(200).iter().map(|&(_, y, n)| y.hypot(n)).fold(0.0f64, f64::max);
    assert!(far > 0.5, "max distance {far}");
}

#[test]
fn first_order_solutions_satisfy_their_equations() {
    for a1 in [Polynomial::zero(), Polynomial::constant(1.0), Polynomial::identity()] {
        let sol = first_order(a1.clone());
        let (y0, y1) = sol.y_range();
        for i in 0..=10 {
            let y = y0 + (y1 - y0) * (0.02 + 0.96 * i as f64 / 10.0);
            let r = sol.residual_at(y).unwrap();
            assert!(r.iter().all(|v| v.abs() <= 1e-6), "A1 = {a1:?} at y = {y}: {r:?}");
        }
    }
}

#[test]
fn first_order_is_forced_and_linear() {
    let g = gas();
    let term = ZerothTerm::new(2.0, 1.0, 2.0, &g).unwrap();
    let run = |a1: &Polynomial| integrate_first_order(&term, &g, a1, (1.0, 3.0), 0.5, [0.0; 4], 1e-10).unwrap();
    let zero = run(&Polynomial::zero());
    let end = zero.state_at(3.0).unwrap();
    assert!(end[1..].iter().any(|v| v.abs() > 1e-3), "{end:?}");

    let a1 = Polynomial::new(vec![0.3, -0.2, 0.1]);
    let single = run(&a1);
    let double = run(&a1.scaled(2.0));
    for y in [1.5, 2.0, 2.5, 3.0] {
        let (z, s, d) = (zero.state_at(y).unwrap(), single.state_at(y).unwrap(), double.state_at(y).unwrap());
        for i in 1..5 {
            let lhs = d[i] - z[i];
            let rhs = 2.0 * (s[i] - z[i]);
            assert!((lhs - rhs).abs() <= 1e-7 * rhs.abs().max(1.0), "slot {i} at {y}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn truncated_series_solves_the_quotient_to_expected_order() {
    let a1 = Polynomial::new(vec![0.4, -0.3, 0.1]);
    let sol = first_order(a1.clone());
    let pot = PlanckPotential::virial(3, &[a1], 1).unwrap();
    let field = SeriesField::new(&sol, ExpansionOrders::default()).unwrap();
    let g = gas();
    // q1, q2 start at x²; q3, q4 at x³
    let orders = [2, 2, 3, 3];
    for y in [1.2, 1.7, 2.3, 2.8] {
        let h = 0.02;
        let coarse = quotient_residual(&field, &g, &pot, h, y).unwrap();
        let fine = quotient_residual(&field, &g, &pot, h / 2.0, y).unwrap();
        for i in 0..4 {
            let bound = coarse[i].abs() / 2f64.powi(orders[i]) * 1.25 + 1e-12;
            assert!(fine[i].abs() <= bound, "q{} at y = {y}: {} -> {}", i + 1, coarse[i], fine[i]);
            let lower = coarse[i].abs() / 2f64.powi(orders[i] + 1) * 0.8;
            assert!(fine[i].abs() >= lower.min(1e-9), "q{} vanishes faster than expected", i + 1);
        }
    }
    assert!(SeriesField::new(&sol, ExpansionOrders { d_k: 1, ..ExpansionOrders::default() }).is_err());
}
