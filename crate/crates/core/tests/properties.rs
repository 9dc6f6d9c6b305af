use dnls_core::config::ScenarioConfig;
use dnls_core::driving::{sample_driving, DrivingSpec, Forcing, Harmonic, SpatialProfile, TemporalLaw};
use dnls_core::lattice::{
    apply_difference, apply_laplacian, core_mass, inner, l2_norm, tail_mass, Boundary, Direction, Lattice, LatticeState,
};
use dnls_core::nonlinearity::{NonlinearitySpec, Sign};
use num_complex::Complex64;
use proptest::prelude::*;

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Dirichlet), Just(Boundary::Periodic)]
}

fn state(max_sites: usize) -> impl Strategy<Value = LatticeState> {
    (3..max_sites, boundary()).prop_flat_map(|(n, bc)| {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
            .prop_map(move |v| LatticeState::from_values(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(), bc).unwrap())
    })
}

fn pair(max_sites: usize) -> impl Strategy<Value = (LatticeState, LatticeState)> {
    state(max_sites).prop_flat_map(|a| {
        let bc = a.boundary();
        let n = a.len();
        (
            Just(a),
            prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
                .prop_map(move |v| LatticeState::from_values(v.into_iter().map(|(x, y)| Complex64::new(x, y)).collect(), bc).unwrap()),
        )
    })
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #[test]
    fn laplacian_is_bounded_by_four(s in state(64)) {
        prop_assert!(l2_norm(&apply_laplacian(&s)) <= 4.0 * l2_norm(&s) * (1.0 + 1e-14));
    }

    #[test]
    fn laplacian_is_non_positive(s in state(64)) {
        let q = inner(&apply_laplacian(&s), &s).unwrap();
        prop_assert!(q.re <= 1e-12 * s.norm_sqr());
    }

    #[test]
    fn difference_operators_are_adjoint((a, b) in pair(64)) {
        let lhs = inner(&apply_difference(&a, Direction::Forward), &b).unwrap();
        let rhs = inner(&a, &apply_difference(&b, Direction::Backward)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * l2_norm(&a) * l2_norm(&b));
    }

    #[test]
    fn tail_plus_core_is_norm_and_tail_is_monotone(s in state(64)) {
        let total = s.norm_sqr();
        let mut previous = f64::INFINITY;
        for m in 0..s.lattice().max_cutoff() {
            let t = tail_mass(&s, m).unwrap();
            prop_assert!(t <= previous);
            prop_assert!((t + core_mass(&s, m).unwrap() - total).abs() <= 1e-12 * total.max(1e-300));
            previous = t;
        }
        prop_assert!(tail_mass(&s, 0).unwrap() <= total);
    }

    #[test]
    fn h1_bound_holds(sigma in 0.05..3.0f64, psi in complex(), phi in complex(), minus in any::<bool>()) {
        let f = NonlinearitySpec::power(sigma, if minus { Sign::Minus } else { Sign::Plus }).unwrap();
        let lhs = (f.apply(psi) - f.apply(phi)).norm();
        prop_assert!(lhs <= f.h1_bound(psi, phi) * (1.0 + 1e-12) + 1e-12, "σ = {}: {} > {}", sigma, lhs, f.h1_bound(psi, phi));
    }

    #[test]
    fn sup_norm_is_translation_invariant(h in -1e4..1e4f64, amp in 0.0..3.0f64, rate in 0.1..3.0f64, period in 0.1..10.0f64) {
        let law = TemporalLaw::Periodic {
            period,
            phase: 0.0,
            harmonics: vec![Harmonic { order: 1, coefficient: Complex64::new(amp, 0.5) }, Harmonic { order: 2, coefficient: Complex64::new(0.1, 0.0) }],
        };
        let spec = DrivingSpec::new(
            Forcing::new(SpatialProfile::Exponential { amplitude: amp, rate }, law.clone()),
            Forcing::new(SpatialProfile::Gaussian { amplitude: 0.2, width: rate }, law),
        );
        prop_assert_eq!(spec.translate(h).sup_norm(), spec.sup_norm());
    }

    #[test]
    fn translation_shifts_samples(h in -50.0..50.0f64, t in -50.0..50.0f64) {
        let law = TemporalLaw::Quasiperiodic {
            frequencies: vec![1.0, std::f64::consts::SQRT_2],
            modes: vec![dnls_core::driving::Mode { indices: vec![1, -1], coefficient: Complex64::new(0.3, 0.1) }],
        };
        let spec = DrivingSpec::additive_only(Forcing::new(SpatialProfile::Exponential { amplitude: 1.0, rate: 1.0 }, law));
        let lat = Lattice::new(9, Boundary::Dirichlet).unwrap();
        let moved = sample_driving(&spec.translate(h), lat, t).0;
        let direct = sample_driving(&spec, lat, t + h).0;
        prop_assert!(dnls_core::lattice::distance(&moved, &direct).unwrap() <= 1e-12);
    }

    #[test]
    fn config_round_trips(kappa in -2.0..2.0f64, gamma in 0.1..5.0f64, sites in 3usize..300, sigma in 0.5..2.0f64, seed in any::<u64>(), periodic in any::<bool>()) {
        let text = format!(
            r#"{{"schema_version":1,
                "model":{{"kappa":{kappa},"gamma":{gamma},"nonlinearity":{{"sigma":{sigma},"sign":-1}}}},
                "lattice":{{"sites":{sites},"boundary":"{}"}},
                "driving":{{"g1":{{"profile":{{"kind":"gaussian","amplitude":0.5,"width":2.0}},"law":{{"kind":"constant","value":[1.0,0.0]}}}},
                            "g2":{{"profile":{{"kind":"single_site","amplitude":0.0,"site":0}},"law":{{"kind":"constant","value":[0.0,0.0]}}}}}},
                "scenario":{{"seed":{seed}}}}}"#,
            if periodic { "periodic" } else { "dirichlet" }
        );
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        let emitted = cfg.to_json();
        let back = ScenarioConfig::from_json(&emitted).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), emitted);
    }
}
