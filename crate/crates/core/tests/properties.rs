use proptest::prelude::*;
use slowfast::analysis::equilibria::classify_spectrum;
use slowfast::models::counterexample::jacobian_origin;
use slowfast::models::futile::MassAction;
use slowfast::monotone::Order;
use slowfast::{integrate, CounterexampleParams, FutileCycleParams, IntegratorConfig, Output, OrthantCone, Polytope, VectorField};

fn params() -> impl Strategy<Value = FutileCycleParams> {
    (prop::collection::vec(0.1f64..10.0, 12), 0.5f64..5.0).prop_map(|(r, s)| {
        let mut p = FutileCycleParams::all_ones(1e-3).unwrap();
        let names = ["k1", "k_m1", "k2", "k3", "k_m3", "k4", "h1", "h_m1", "h2", "h3", "h_m3", "h4"];
        for (n, v) in names.iter().zip(r) {
            p.set(n, v).unwrap();
        }
        p.set("S_tot", s).unwrap();
        p.set("E_tot", 1e-3 * s).unwrap();
        p.set("F_tot", 1e-3 * s).unwrap();
        p
    })
}

/// A point of K0 from two unit coordinates.
fn in_k0(a: f64, b: f64) -> [f64; 2] {
    let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
    [a, b]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m0_solves_the_fast_equation(p in params(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let fc = p.scaled();
        let sys = fc.system();
        let x = in_k0(a, b);
        let y = sys.m0(&x).unwrap();
        prop_assert!(y.iter().all(|v| *v >= 0.0));
        let g = sys.g0(&x, &y, 0.0);
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(g.iter().all(|v| v.abs() <= 1e-12 * scale), "{g:?}");
    }

    #[test]
    fn hurwitz_verdicts_agree_on_k0(p in params(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let hb = p.scaled().hurwitz_blocks(&in_k0(a, b)).unwrap();
        prop_assert!(hb.hurwitz);
        prop_assert_eq!(hb.hurwitz, hb.hurwitz_by_eigenvalues());
    }

    #[test]
    fn sigma_is_at_most_sigma0(p in params()) {
        prop_assert!(p.sigma() <= p.sigma0());
        prop_assert!(p.sigma() > 0.0);
    }

    #[test]
    fn nine_species_totals_are_conserved(p in params(), v0 in prop::collection::vec(0.0f64..1.0, 9)) {
        let ma = p.mass_action();
        let tr = integrate(&ma.species_field(), &v0, (0.0, 5.0), &IntegratorConfig::stiff(), None, &Output::Final).unwrap();
        let (a, b) = (MassAction::totals(&v0), MassAction::totals(tr.last_state()));
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-10 * a[k].max(1.0));
        }
    }

    #[test]
    fn cone_order_is_antisymmetric(signs in prop::collection::vec(prop::bool::ANY, 1..5), seed in prop::collection::vec(-1.0f64..1.0, 10)) {
        let signs: Vec<i8> = signs.iter().map(|&s| if s { 1 } else { -1 }).collect();
        let n = signs.len();
        let cone = OrthantCone::new(signs).unwrap();
        let u = &seed[..n];
        let v = &seed[5..5 + n];
        let (uv, vu) = (cone.compare(u, v), cone.compare(v, u));
        prop_assert_eq!(uv.is_ordered() && vu.is_ordered(), u == v);
        prop_assert_eq!(cone.compare(u, u), Order::Leq);
    }

    #[test]
    fn counterexample_jacobian_matches_field(eps in 0.05f64..5.0) {
        let cp = CounterexampleParams::new(eps).unwrap();
        let sys = cp.system();
        let f = sys.slow_time_field(eps).unwrap();
        let (exact, tr, det) = jacobian_origin(eps).unwrap();
        let j = f.jacobian(&[0.0, 0.0]);
        prop_assert!(j.sub(&exact).max_abs() <= 1e-6 * (1.0 + 1.0 / eps));
        prop_assert!((tr - (1.0 - 1.0 / eps)).abs() < 1e-12);
        prop_assert!((det - 1.0 / eps).abs() < 1e-12);
        let stable = classify_spectrum(&exact.eigenvalues().unwrap()).is_stable();
        prop_assert_eq!(stable, eps < 1.0);
    }

    #[test]
    fn rejection_samples_lie_inside(seed in 0u64..1000, eps in 1e-4f64..0.4) {
        use rand::SeedableRng;
        let fc = FutileCycleParams::all_ones(eps).unwrap().scaled();
        let poly: Polytope = fc.domain().at(eps).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (pts, rate) = poly.rejection_sample(&mut rng, 20);
        prop_assert!(rate > 0.0);
        prop_assert!(pts.iter().all(|p| poly.margin(p) >= 0.0));
    }
}
