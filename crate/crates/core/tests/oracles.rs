//! Reference values checked against independent computations: hand-rolled
//! RK4, finite differences of flow maps, closed-form spectra and the full
//! mass-action network.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slowfast::analysis::{
    convergence_census, find_equilibria, lift_equilibria, nullcline_scan, planar_equilibria, scalar_equilibria,
    CensusConfig, Classification, NewtonConfig,
};
use slowfast::experiments::{k0, model_equilibria};
use slowfast::integrate::integrate_variational;
use slowfast::manifold::{estimate_mu, first_order_manifold, invariant_manifold, relax_to_manifold};
use slowfast::models::counterexample::{beta, jacobian_origin};
use slowfast::models::futile::k0_grid;
use slowfast::system::State;
use slowfast::{
    integrate, CounterexampleParams, FutileCycleParams, IntegratorConfig, Model, Output, Status, VectorField,
};

fn rk4(f: impl Fn(&[f64]) -> Vec<f64>, z: &[f64], h: f64) -> Vec<f64> {
    let add = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
    let k1 = f(z);
    let k2 = f(&add(z, &k1, h / 2.0));
    let k3 = f(&add(z, &k2, h / 2.0));
    let k4 = f(&add(z, &k3, h));
    (0..z.len())
        .map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn bistable() -> FutileCycleParams {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/futile_cycle_bistable.json")).unwrap();
    *Model::from_json(&text).unwrap().futile_params().unwrap()
}

#[test]
fn counterexample_box_half_width() {
    // smallest a with a^3/3 - a = 4, by Cardano: a^3 - 3a - 12 = 0
    let (p, q) = (-3.0f64, -12.0f64);
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let a = (-q / 2.0 + disc.sqrt()).cbrt() + (-q / 2.0 - disc.sqrt()).cbrt();
    let cp = CounterexampleParams::new(0.5).unwrap();
    assert_relative_eq!(cp.a, a, epsilon = 1e-10);
    assert_relative_eq!(beta(cp.a), 4.0, epsilon = 1e-10);
    assert!((cp.a - 2.7219).abs() < 1e-4);
    assert_eq!(cp.b1, 3.0);
}

#[test]
fn counterexample_origin_spectrum_at_eps_two() {
    let (j, tr, det) = jacobian_origin(2.0f64).unwrap();
    assert_relative_eq!(tr, 0.5);
    assert_relative_eq!(det, 0.5);
    // λ = tr/2 ± i sqrt(det - tr²/4)
    let im = (det - tr * tr / 4.0).sqrt();
    let eigs = j.eigenvalues().unwrap();
    assert_eq!(eigs.len(), 2);
    for e in &eigs {
        assert_relative_eq!(e.re, 0.25, epsilon = 1e-12);
        assert_relative_eq!(e.im.abs(), im, epsilon = 1e-12);
    }
    let m = Model::Counterexample(CounterexampleParams::new(2.0).unwrap());
    let eq = model_equilibria(&m, 10_000, &NewtonConfig::default()).unwrap();
    assert_eq!(eq.full.len(), 1);
    assert_eq!(eq.full[0].classification, Some(Classification::UnstableFocus));
}

#[test]
fn counterexample_reduced_root_is_unique() {
    let cp = CounterexampleParams::new(0.1).unwrap();
    // on y = -2 tanh x the slow equation reads -2 tanh x = x^3/3 - x
    let h = |x: f64| -2.0 * x.tanh() - (x * x * x / 3.0 - x);
    let grid: Vec<f64> = (0..10_000).map(|i| -5.0 + 10.0 * i as f64 / 9_999.0).collect();
    let changes = grid.windows(2).filter(|w| h(w[0]).signum() != h(w[1]).signum()).count();
    assert_eq!(changes, 1);
    let red = slowfast::analysis::reduced_field(&cp.system());
    let roots = scalar_equilibria(&red, -5.0, 5.0, 10_000, &NewtonConfig::default()).unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].location[0].abs() < 1e-12);
}

fn counterexample_rhs(eps: f64) -> impl Fn(&[f64]) -> Vec<f64> {
    move |z: &[f64]| vec![z[1] - (z[0].powi(3) / 3.0 - z[0]), (-z[1] - 2.0 * z[0].tanh()) / eps]
}

#[test]
fn limit_cycle_period_at_eps_two() {
    // fixed-step RK4; upward crossings of x = 0 by linear interpolation
    let f = counterexample_rhs(2.0);
    let h = 1e-4;
    let mut z = vec![0.5, 0.5];
    let mut t = 0.0;
    let mut crossings = Vec::new();
    while t < 260.0 {
        let next = rk4(&f, &z, h);
        if z[0] < 0.0 && next[0] >= 0.0 {
            let s = -z[0] / (next[0] - z[0]);
            crossings.push((t + s * h, z[1] + s * (next[1] - z[1])));
        }
        z = next;
        t += h;
    }
    let n = crossings.len();
    assert!(n > 20);
    let period = crossings[n - 1].0 - crossings[n - 2].0;
    assert!((period - 9.74015085681554).abs() < 1e-6, "{period}");
    assert!((crossings[n - 1].1 - crossings[n - 2].1).abs() < 1e-8);

    let cp = CounterexampleParams::new(2.0).unwrap();
    let sys = cp.system();
    let field = sys.slow_time_field(2.0).unwrap();
    let section = slowfast::integrate::EventSpec::coordinate(0, 0.0, slowfast::integrate::Direction::Up, 1e-12).unwrap();
    let r = slowfast::analysis::detect_limit_cycle(&field, &[0.5, 0.5], &section, &[vec![0.0, 0.0]], &Default::default())
        .unwrap();
    assert_eq!(r.verdict, slowfast::analysis::Verdict::CycleFound);
    assert!((r.period.unwrap() - period).abs() < 1e-6);
    assert!((r.fixed_point.as_ref().unwrap()[1] - crossings[n - 1].1).abs() < 1e-6);
}

#[test]
fn counterexample_census_at_eps_two_does_not_converge() {
    let m = Model::Counterexample(CounterexampleParams::new(2.0).unwrap());
    let (sys, dom) = m.slow_fast().unwrap();
    let eqs = model_equilibria(&m, 10_000, &NewtonConfig::default()).unwrap();
    let cfg = CensusConfig {
        samples: 100,
        horizon: 200.0,
        tol: 1e-6,
        seed: 7,
        integrator: IntegratorConfig::default(),
    };
    let c = convergence_census(&sys, &dom, 2.0, &eqs.full, &cfg).unwrap();
    assert!(c.report.converged_fraction <= 0.02, "{}", c.report.converged_fraction);
}

#[test]
fn reduced_flow_derivative_sign_pattern() {
    let p = FutileCycleParams::all_ones(1e-3).unwrap();
    let red = p.scaled().reduced_field();
    let x0 = [0.3, 0.2];
    let times = [0.5, 1.0, 2.0, 5.0];
    let cfg = IntegratorConfig::default().with_tolerances(1e-11, 1e-13);
    let var = integrate_variational(&red, &x0, 5.0, &times, &cfg).unwrap();
    assert_eq!(var.status, Status::Completed);
    // independent: central differences of an RK4 flow map
    let flow = |z0: &[f64], t: f64| {
        let n = (t / 1e-3).round() as usize;
        let mut z = z0.to_vec();
        for _ in 0..n {
            z = rk4(|v| red.call(v), &z, t / n as f64);
        }
        z
    };
    let d = 1e-5;
    for &t in &times {
        let k = var.times.iter().position(|&s| s == t).unwrap();
        let m = &var.derivatives[k];
        for j in 0..2 {
            let mut a = x0.to_vec();
            let mut b = x0.to_vec();
            a[j] += d;
            b[j] -= d;
            let (fa, fb) = (flow(&a, t), flow(&b, t));
            for i in 0..2 {
                let fd = (fa[i] - fb[i]) / (2.0 * d);
                assert!((fd - m[(i, j)]).abs() < 1e-6, "t={t} ({i},{j}): {fd} vs {}", m[(i, j)]);
            }
        }
        assert!(m[(0, 0)] > 0.0 && m[(1, 1)] > 0.0, "t={t}");
        assert!(m[(0, 1)] < 0.0 && m[(1, 0)] < 0.0, "t={t}");
    }
}

/// Newton with a forward-difference Jacobian, solved by nalgebra.
fn newton_fd(f: impl Fn(&[f64]) -> Vec<f64>, mut z: Vec<f64>, scale: f64) -> Vec<f64> {
    let n = z.len();
    for _ in 0..60 {
        let r = f(&z);
        if r.iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-14 * scale {
            break;
        }
        let mut j = DMatrix::zeros(n, n);
        for c in 0..n {
            let h = 1e-7 * z[c].abs().max(scale);
            let mut zp = z.clone();
            zp[c] += h;
            let rp = f(&zp);
            for row in 0..n {
                j[(row, c)] = (rp[row] - r[row]) / h;
            }
        }
        let step = j.lu().solve(&DVector::from_vec(r)).unwrap();
        for i in 0..n {
            z[i] -= step[i];
        }
    }
    z
}

#[test]
fn bistable_roots_on_a_fine_grid() {
    let p = bistable();
    let fc = p.scaled();
    let red = fc.reduced_field();
    let scan = nullcline_scan(&red, [0.0, 0.0], [1.0, 1.0], 500);
    let roots = planar_equilibria(&red, [0.0, 0.0], [1.0, 1.0], 500, Some(&k0()), &NewtonConfig::default()).unwrap();
    assert_eq!(roots.len(), 3, "{:?}", scan.candidates.len());
    let mut locs: Vec<[f64; 2]> = roots.iter().map(|e| [e.location[0], e.location[1]]).collect();
    locs.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    let expected = [[0.00303, 0.8354], [0.15396, 0.23516], [0.79303, 0.00499]];
    for (l, e) in locs.iter().zip(&expected) {
        assert!((l[0] - e[0]).abs() < 5e-5 && (l[1] - e[1]).abs() < 5e-5, "{l:?} vs {e:?}");
    }
    let kinds: Vec<_> = {
        let mut r = roots.clone();
        r.sort_by(|a, b| a.location[0].partial_cmp(&b.location[0]).unwrap());
        r.into_iter().map(|e| e.classification.unwrap()).collect()
    };
    assert!(kinds[0].is_stable() && kinds[2].is_stable());
    assert_eq!(kinds[1], Classification::Saddle);

    // the same roots seen from the mass-action network: its equilibria sit
    // within O(eps) of the lifted reduced roots
    let ma = p.mass_action();
    let field = ma.field();
    for l in &locs {
        let s = fc.on_manifold(*l).unwrap();
        let (_, u0) = ma.from_scaled(&fc, 0.0, &s);
        let u = newton_fd(|v| field.call(v), u0.to_vec(), p.e_tot);
        let x = [u[0] / p.s_tot, u[1] / p.s_tot];
        assert!((x[0] - l[0]).abs() < 5e-3 && (x[1] - l[1]).abs() < 5e-3, "{x:?} vs {l:?}");
    }
}

#[test]
fn all_ones_root_count_cross_validated() {
    let p = FutileCycleParams::all_ones(1e-3).unwrap();
    let red = p.scaled().reduced_field();
    let scanned = planar_equilibria(&red, [0.0, 0.0], [1.0, 1.0], 200, Some(&k0()), &NewtonConfig::default()).unwrap();
    let seeds: Vec<Vec<f64>> = k0_grid::<f64>(20).into_iter().map(|x| x.to_vec()).collect();
    let brute = find_equilibria(&red, Some(&k0()), &seeds, &NewtonConfig::default()).unwrap();
    assert_eq!(scanned.len(), brute.len());
    assert_eq!(scanned.len(), 1);
    // symmetric parameters put the root on the diagonal
    let r = &scanned[0].location;
    assert!((r[0] - r[1]).abs() < 1e-9);
    assert_eq!(scanned[0].classification.map(|c| c.is_stable()), Some(true));

    let m = Model::FutileCycle(p);
    let (sys, dom) = m.slow_fast().unwrap();
    let lifted = lift_equilibria(&sys, 1e-3, std::slice::from_ref(r), Some(&dom.at(1e-3).unwrap()), &NewtonConfig::default()).unwrap();
    assert_eq!(lifted.len(), 1);
}

#[test]
fn scaled_and_mass_action_trajectories_agree() {
    let p = FutileCycleParams::all_ones(1e-3).unwrap();
    let ma = p.mass_action();
    let cfg = IntegratorConfig::stiff().with_tolerances(1e-11, 1e-13);
    for fc in [p.scaled(), p.alternative_scaling()] {
        let sys = fc.system();
        let field = sys.slow_time_field(fc.eps).unwrap();
        let s0 = State::new(vec![0.6 * fc.s, 0.2 * fc.s], vec![0.1, 0.05, 0.02, 0.1]).unwrap();
        let t_end = 2.0;
        let tr = integrate(&field, &s0.concat(), (0.0, t_end), &cfg, None, &Output::Final).unwrap();
        let (tau0, u0) = ma.from_scaled(&fc, 0.0, &s0);
        assert_eq!(tau0, 0.0);
        let tau_end = t_end / fc.eps;
        let tm = integrate(&ma.field(), &u0, (0.0, tau_end), &cfg, None, &Output::Final).unwrap();
        let end = State::from_concat(tr.last_state(), 2);
        let (_, u_end) = ma.from_scaled(&fc, t_end, &end);
        for (a, b) in u_end.iter().zip(tm.last_state()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn relaxed_manifold_matches_first_order_to_second_order() {
    let p = FutileCycleParams::all_ones(1e-3).unwrap();
    let sys = p.scaled().system();
    let xs: Vec<Vec<f64>> = k0_grid::<f64>(6).into_iter().map(|x| x.to_vec()).collect();
    let mu = estimate_mu(&sys, &xs).unwrap();
    let cfg = IntegratorConfig::stiff().with_tolerances(1e-12, 1e-14);
    let x = [0.3, 0.3];
    let gap = |eps: f64| {
        let r = relax_to_manifold(&sys, &x, eps, mu, &cfg, None).unwrap();
        // compare at the relaxed slow point, which drifted during the layer
        let y1 = first_order_manifold(&sys, &r.x_final, eps).unwrap();
        r.y.iter().zip(&y1).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    // Richardson: halving eps cuts an O(eps^2) gap by about four
    let (g1, g2) = (gap(1e-2), gap(5e-3));
    let c = g1 / 1e-4;
    assert!(g2 <= c * 2.5e-5 * 1.5, "{g1:e} {g2:e}");
    assert!(g1 / g2 > 3.0, "ratio {}", g1 / g2);

    let r = relax_to_manifold(&sys, &x, 1e-3, mu, &cfg, None).unwrap();
    let y1 = first_order_manifold(&sys, &r.x_final, 1e-3).unwrap();
    let y2 = invariant_manifold(&sys, &r.x_final, 1e-3, 2).unwrap();
    let d1 = r.y.iter().zip(&y1).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let d2 = r.y.iter().zip(&y2).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(d1 < c * 1e-6 * 2.0, "{d1:e}");
    assert!(d2 <= d1, "{d2:e} vs {d1:e}");
}

#[test]
fn positive_invariance_small_sample() {
    let fc = FutileCycleParams::all_ones(1e-2).unwrap().scaled();
    let sys = fc.system();
    let poly = fc.domain().at(1e-2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (pts, rate) = poly.rejection_sample(&mut rng, 50);
    assert!(rate > 0.0 && rate <= 1.0);
    let field = sys.slow_time_field(1e-2).unwrap();
    for p in &pts {
        let tr = integrate(&field, p, (0.0, 5.0), &IntegratorConfig::stiff(), None, &Output::Steps).unwrap();
        assert_eq!(tr.status, Status::Completed);
        assert!(tr.states.iter().all(|s| poly.margin(s) >= -1e-8));
    }
}
