mod common;

use common::*;
use proptest::prelude::*;
use qosc::dissipative::{augment, frictionless_form, OpenSystem, RelaxationModel};
use qosc::linalg::{CMatrix, RMatrix, RVector, C64};
use qosc::liouville_map::{build_liouville_generator, drop_identity, rotor_propagate_vector};
use qosc::operator_basis::{expand, gell_mann_basis, reconstruct};
use qosc::oscillator_network::{
    generator_from_springs, integrate_ode, piecewise_propagate, propagate_modes,
    propagate_network_exact, shortest_period, springs_from_omega_squared,
};
use qosc::schrodinger_map::{
    complexify, propagate_state, realify_generator, realify_state, reduce_mixed,
    schrodinger_omega_squared, MixedEnsemble, RealState,
};
use qosc::verify::{evolve_density, evolve_state};
use qosc::{Generator, GeneratorSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gell_mann_gram_is_identity(n in 2usize..=6) {
        let b = gell_mann_basis(n, true).unwrap();
        prop_assert_eq!(b.len(), n * n);
        let g = b.gram();
        prop_assert!((g - CMatrix::identity(n * n, n * n)).camax() < 1e-12);
        prop_assert!(b.is_hermitian(1e-15));
    }

    #[test]
    fn expand_reconstruct_round_trip(seed: u64, n in 2usize..=5) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, n);
        let b = gell_mann_basis(n, true).unwrap();
        let back = reconstruct(&expand(&rho, &b).unwrap()).unwrap();
        prop_assert!((back - rho).camax() < 1e-13);
    }

    #[test]
    fn liouville_generator_is_antisymmetric_and_norm_preserving(seed: u64, n in 2usize..=5, t in 0.0f64..20.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 2.0);
        let b = gell_mann_basis(n, true).unwrap();
        let omega = build_liouville_generator(&h, &b).unwrap();
        let m = omega.matrix();
        prop_assert!((m + m.transpose()).amax() < 1e-12);
        let r0 = expand(&random_density(&mut r, n), &b).unwrap().values;
        let rt = rotor_propagate_vector(&omega, &r0, t).unwrap();
        prop_assert!((rt.norm() - r0.norm()).abs() < 1e-12);
    }

    // dr/dt at t = 0 from the commutator -i[H, ρ] expanded directly.
    #[test]
    fn generator_matches_commutator(seed: u64, n in 2usize..=5) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let rho = random_density(&mut r, n);
        let b = gell_mann_basis(n, true).unwrap();
        let omega = build_liouville_generator(&h, &b).unwrap();
        let hm = h.matrix();
        let drho = (hm * &rho - &rho * hm) * C64::new(0.0, -1.0);
        let expected = expand(&drho, &b).unwrap().values;
        let got = omega.matrix() * expand(&rho, &b).unwrap().values;
        prop_assert!(max_diff(&got, &expected) < 1e-12);
    }

    // Central finite difference of the Taylor-oracle evolution.
    #[test]
    fn generator_matches_finite_difference(seed: u64, n in 2usize..=4) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let rho = random_density(&mut r, n);
        let b = gell_mann_basis(n, true).unwrap();
        let omega = build_liouville_generator(&h, &b).unwrap();
        let dt = 1e-4;
        let at = |t: f64| {
            let u = taylor_expm(&(h.matrix() * C64::new(0.0, -t)));
            expand(&(&u * &rho * u.adjoint()), &b).unwrap().values
        };
        let fd = (at(dt) - at(-dt)) / (2.0 * dt);
        let got = omega.matrix() * expand(&rho, &b).unwrap().values;
        prop_assert!(max_diff(&got, &fd) < 1e-7);
    }

    #[test]
    fn evolve_state_matches_taylor_oracle(seed: u64, n in 2usize..=5, t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let c0 = random_state(&mut r, n);
        let got = evolve_state(&h, &c0, t).unwrap();
        prop_assert!((got - oracle_state(&h, &c0, t)).camax() < 1e-11);
    }

    #[test]
    fn realified_rotation_matches_schrodinger(seed: u64, n in 2usize..=5, t in 0.0f64..20.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let c0 = random_state(&mut r, n);
        let omega = realify_generator(&h);
        let got = propagate_state(&omega, &c0, t).unwrap();
        prop_assert!((got - oracle_state(&h, &c0, t)).camax() < 1e-10);
    }

    #[test]
    fn realify_round_trip(seed: u64, n in 1usize..=6) {
        let mut r = rng(seed);
        let c = random_state(&mut r, n);
        let back = complexify(&RealState::from_vector(&realify_state(&c).to_vector()).unwrap());
        prop_assert_eq!(back, c);
    }

    #[test]
    fn schrodinger_omega_squared_blocks(seed: u64, n in 2usize..=5) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let h2 = h.matrix() * h.matrix();
        let re = h2.map(|z| z.re);
        let im = h2.map(|z| z.im);
        let mut expected = RMatrix::zeros(2 * n, 2 * n);
        expected.view_mut((0, 0), (n, n)).copy_from(&-&re);
        expected.view_mut((0, n), (n, n)).copy_from(&im);
        expected.view_mut((n, 0), (n, n)).copy_from(&-&im);
        expected.view_mut((n, n), (n, n)).copy_from(&-&re);
        let osq = schrodinger_omega_squared(&h);
        prop_assert!((&osq - &expected).amax() < 1e-13);
        prop_assert!((osq - realify_generator(&h).squared()).amax() < 1e-13);
    }

    #[test]
    fn reduced_ensemble_expectations(seed: u64, n in 2usize..=4, k in 1usize..=5, t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let raw: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        let states = (0..k).map(|_| random_state(&mut r, n)).collect();
        let e = MixedEnsemble::new(weights, states).unwrap();
        let reduced = reduce_mixed(&e).unwrap();
        prop_assert!((reduced.density() - e.density()).camax() < 1e-12);
        let obs = random_hermitian(&mut r, n, 1.0);
        let omega = realify_generator(&h);
        let got = reduced.expectation(&omega, obs.matrix(), t).unwrap();
        let expected = (obs.matrix() * evolve_density(&h, &e.density(), t).unwrap()).trace();
        prop_assert!((got - expected).norm() < 1e-10);
    }

    #[test]
    fn spring_round_trip(seed: u64, n in 1usize..=12, mass in 0.1f64..10.0) {
        let mut r = rng(seed);
        let a = random_real(&mut r, n, n);
        let osq = &a + a.transpose();
        let net = springs_from_omega_squared(&osq, mass).unwrap();
        prop_assert!((generator_from_springs(&net) - osq).amax() < 1e-12);
    }

    #[test]
    fn augmented_split(seed: u64, n in 1usize..=5) {
        let mut r = rng(seed);
        let gamma = random_real(&mut r, n, n);
        let f = RVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0));
        let (gsq, drive) = frictionless_form(&gamma, &f).unwrap();
        prop_assert!((&gsq - &gamma * &gamma).amax() < 1e-14);
        prop_assert!(max_diff(&drive, &(&gamma * &f)) < 1e-14);
        let a = augment(&gsq, &drive).unwrap();
        prop_assert!((&a.sym + &a.antisym - &a.gamma_tilde).amax() < 1e-15);
        prop_assert!((&a.sym - a.sym.transpose()).amax() == 0.0);
        prop_assert!((&a.antisym + a.antisym.transpose()).amax() == 0.0);
        prop_assert!(a.gamma_tilde.row(n).amax() == 0.0);
    }

    #[test]
    fn ode_matches_modes(seed: u64, n in 2usize..=4) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let b = gell_mann_basis(n, true).unwrap();
        let full = build_liouville_generator(&h, &b).unwrap();
        let active = drop_identity(&full, &b).unwrap();
        let x0 = active.project(&expand(&random_density(&mut r, n), &b).unwrap().values);
        let omega = &active.generator;
        let net = springs_from_omega_squared(&omega.squared(), 1.0).unwrap()
            .with_initial(x0.clone(), omega.matrix() * &x0).unwrap();
        let period = shortest_period(&net.acceleration_matrix());
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * period / 2.0).collect();
        let ode = integrate_ode(&net, &times, period / 1000.0).unwrap();
        let modes = propagate_modes(omega, &x0, &times).unwrap();
        prop_assert!(ode.max_position_error(&modes) < 1e-6);
        let exact = propagate_network_exact(&net, &times).unwrap();
        prop_assert!(exact.max_position_error(&modes) < 1e-9);
    }

    #[test]
    fn piecewise_matches_exponential_product(seed: u64, n in 2usize..=6, segments in 1usize..=4) {
        let mut r = rng(seed);
        let r0 = RVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0));
        let mut segs = Vec::new();
        let mut expected = r0.clone();
        for _ in 0..segments {
            let m = random_antisymmetric(&mut r, n);
            let d = r.gen_range(0.1..3.0);
            expected = taylor_expm_real(&(&m * d)) * expected;
            segs.push((Generator::new(m, GeneratorSource::Liouville).unwrap(), d));
        }
        let traj = piecewise_propagate(&segs, &r0, 7).unwrap();
        prop_assert!(max_diff(traj.positions.last().unwrap(), &expected) < 1e-10);
    }

    #[test]
    fn open_system_forms_agree(seed: u64) {
        let mut r = rng(seed);
        let omega = random_antisymmetric(&mut r, 3);
        let rates = RVector::from_fn(3, |_, _| -r.gen_range(0.2..1.0));
        let f = RVector::from_fn(3, |_, _| r.gen_range(-0.5..0.5));
        let sys = OpenSystem::new(
            Generator::new(omega, GeneratorSource::Liouville).unwrap(),
            RelaxationModel::new(RMatrix::from_diagonal(&rates), f).unwrap(),
        ).unwrap();
        let r0 = RVector::from_fn(3, |_, _| r.gen_range(-1.0..1.0));
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let exact = sys.exact(&r0, &times).unwrap();
        let first = sys.first_order(&r0, &times, 1e-3).unwrap();
        let damped = sys.damped(&r0, &times, 1e-3).unwrap();
        prop_assert!(first.max_position_error(&exact) < 1e-9);
        prop_assert!(damped.max_position_error(&exact) < 1e-9);
    }
}
