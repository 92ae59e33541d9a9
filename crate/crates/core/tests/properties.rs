use proptest::prelude::*;

use roughflux::harness::{ExperimentConfig, OutputTimes, PathFamily};
use roughflux::irregularity::{k_sup, phi, psi};
use roughflux::kinetic::{chi, velocity_average};
use roughflux::paths::{generate_brownian, generate_deterministic, generate_fbm, sum_paths, DeterministicKind};
use roughflux::regularity::{besov_exponent, l1_modulus, predicted_lambda_fbm};
use roughflux::solver::{make_flux, solve_rough, total_variation, InitialData};

fn field(nx: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, nx)
}

fn burgers() -> roughflux::solver::Flux {
    make_flux(&[0.0, 0.0, 0.5]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fbm_is_seeded_and_starts_at_origin(h in 0.05f64..0.95, seed in any::<u64>(), d in 1usize..3) {
        let a = generate_fbm(h, d, 128, 2.0, seed).unwrap();
        let b = generate_fbm(h, d, 128, 2.0, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.values().len(), 129 * d);
        prop_assert!(a.point(0).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn path_sum_commutes_and_associates(s1 in any::<u64>(), s2 in any::<u64>(), h in 0.1f64..0.9) {
        let p = generate_fbm(h, 1, 64, 1.0, s1).unwrap();
        let q = generate_brownian(1, 64, 1.0, s2).unwrap();
        let r = generate_deterministic(DeterministicKind::Linear, 64, 1.0).unwrap();
        let (pq, qp) = (sum_paths(&p, &q).unwrap(), sum_paths(&q, &p).unwrap());
        prop_assert_eq!(pq.values(), qp.values());
        let left = sum_paths(&sum_paths(&p, &q).unwrap(), &r).unwrap();
        let right = sum_paths(&p, &sum_paths(&q, &r).unwrap()).unwrap();
        for (x, y) in left.values().iter().zip(right.values()) {
            prop_assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
        }
        let zero = generate_deterministic(DeterministicKind::Custom(vec![0.0; 65]), 64, 1.0).unwrap();
        let pz = sum_paths(&p, &zero).unwrap();
        prop_assert_eq!(pz.values(), p.values());
    }

    #[test]
    fn phi_conjugate_symmetry_and_trivial_bound(seed in any::<u64>(), a in -200.0f64..200.0, i in 0usize..60, len in 1usize..68) {
        let p = generate_fbm(0.4, 1, 128, 1.0, seed).unwrap();
        let j = (i + len).min(128);
        let (s, t) = (p.time(i), p.time(j));
        let z = phi(&p, &[a], s, t).unwrap();
        let zm = phi(&p, &[-a], s, t).unwrap();
        prop_assert!((z.conj() - zm).norm() <= 1e-12);
        prop_assert!(z.norm() <= (t - s) * (1.0 + 1e-12));
    }

    #[test]
    fn phi_shift_identity(seed in any::<u64>(), a in -100.0f64..100.0, s_idx in 1usize..100) {
        let p = generate_fbm(0.6, 1, 128, 1.0, seed).unwrap();
        let shifted = p.shifted(s_idx).unwrap();
        let (s, t) = (p.time(s_idx), p.horizon());
        let direct = phi(&p, &[a], s, t).unwrap();
        let phase = num_complex::Complex64::from_polar(1.0, a * p.point(s_idx)[0]);
        let via = phase * phi(&shifted, &[a], 0.0, t - s).unwrap();
        prop_assert!((direct - via).norm() <= 1e-10);
    }

    #[test]
    fn k_sup_bounds(seed in any::<u64>(), a in -50.0f64..50.0, b in 0.0f64..20.0) {
        let p = generate_fbm(0.3, 1, 128, 1.0, seed).unwrap();
        let k = k_sup(&p, &[a], b).unwrap();
        let whole = psi(&p, &[a], b, 0.0, 1.0).unwrap().norm();
        let cap = if b > 0.0 { (1.0 - (-2.0 * b).exp()) / (2.0 * b) } else { 1.0 };
        prop_assert!(k + 1e-12 >= whole);
        prop_assert!(k <= cap * (1.0 + 1e-10));
    }

    #[test]
    fn scheme_conserves_and_obeys_max_principle(u0 in field(64), seed in any::<u64>()) {
        let p = generate_fbm(0.3, 1, 32, 0.5, seed).unwrap();
        let sol = solve_rough(&burgers(), &p, &u0, 64, 0.9, &[0.25, 0.5]).unwrap();
        let (lo, hi) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
        let m0: f64 = u0.iter().sum::<f64>() / 64.0;
        for k in 0..2 {
            prop_assert!((sol.mass(k) - m0).abs() <= 1e-12 * 64.0);
            prop_assert!(sol.slice(k).iter().all(|x| *x >= lo - 1e-12 && *x <= hi + 1e-12));
            prop_assert!(total_variation(sol.slice(k)) <= total_variation(&u0) + 1e-12);
        }
    }

    #[test]
    fn scheme_contracts_in_l1(u0 in field(64), v0 in field(64), seed in any::<u64>()) {
        let p = generate_fbm(0.5, 1, 32, 0.5, seed).unwrap();
        let f = burgers();
        let su = solve_rough(&f, &p, &u0, 64, 0.9, &[0.5]).unwrap();
        let sv = solve_rough(&f, &p, &v0, 64, 0.9, &[0.5]).unwrap();
        let d0: f64 = u0.iter().zip(&v0).map(|(a, b)| (a - b).abs()).sum();
        let d1: f64 = su.slice(0).iter().zip(sv.slice(0)).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(d1 <= d0 + 1e-10);
    }

    #[test]
    fn negating_path_equals_negating_flux(u0 in field(48), seed in any::<u64>()) {
        let p = generate_fbm(0.4, 1, 32, 1.0, seed).unwrap();
        let f = make_flux(&[0.0, 0.3, 0.5, 0.2]).unwrap();
        let a = solve_rough(&f, &p.negated(), &u0, 48, 0.9, &[1.0]).unwrap();
        let b = solve_rough(&f.negated(), &p, &u0, 48, 0.9, &[1.0]).unwrap();
        prop_assert_eq!(a.slice(0), b.slice(0));
    }

    #[test]
    fn chi_is_odd_and_integrates_to_u(u in -3.0f64..3.0, v in -3.0f64..3.0) {
        prop_assert_eq!(chi(-u, -v), -chi(u, v));
        let levels: Vec<f64> = (0..=64).map(|i| -3.5 + 7.0 * i as f64 / 64.0).collect();
        let avg = velocity_average(&[u], |_| 1.0, &levels).unwrap();
        prop_assert!((avg[0] - u).abs() <= 1e-8);
    }

    #[test]
    fn modulus_is_bounded_and_subadditive(u in field(256)) {
        let c = l1_modulus(&u, 7).unwrap();
        let l1: f64 = u.iter().map(|x| x.abs()).sum::<f64>() / 256.0;
        for w in &c.omega {
            prop_assert!(*w >= 0.0 && *w <= 2.0 * l1 + 1e-12);
        }
        for k in 1..c.omega.len() {
            prop_assert!(c.omega[k] <= 2.0 * c.omega[k - 1] + 1e-12);
        }
    }

    #[test]
    fn besov_fit_invariant_under_shift_scale_translate(lambda in 0.2f64..0.8, c in 0.1f64..10.0, off in -5.0f64..5.0, roll in 0usize..1024) {
        let u = InitialData::Lacunary { lambda, terms: 10 }.cell_averages(1024).unwrap();
        let base = besov_exponent(&l1_modulus(&u, 8).unwrap(), 4.0 / 1024.0, 1.0 / 16.0).unwrap().lambda_hat;
        let mut v: Vec<f64> = u.iter().map(|x| c * x + off).collect();
        v.rotate_left(roll);
        let other = besov_exponent(&l1_modulus(&v, 8).unwrap(), 4.0 / 1024.0, 1.0 / 16.0).unwrap().lambda_hat;
        prop_assert!((base - other).abs() <= 1e-9);
    }

    #[test]
    fn predicted_fbm_exponent_decreases_in_h(h1 in 0.01f64..0.98, dh in 0.001f64..0.5, nu in 1.0f64..4.0) {
        let h2 = (h1 + dh).min(0.99);
        prop_assume!(h2 > h1);
        prop_assert!(predicted_lambda_fbm(h2, nu).unwrap() < predicted_lambda_fbm(h1, nu).unwrap());
    }

    #[test]
    fn config_round_trips(
        hurst in prop::collection::vec(0.01f64..0.99, 1..4),
        ensemble in 1usize..500,
        seed in any::<u64>(),
        k in 1usize..16,
        linear in any::<bool>(),
    ) {
        let mut cfg = ExperimentConfig::default();
        cfg.path.hurst = hurst;
        cfg.ensemble = ensemble;
        cfg.master_seed = seed;
        cfg.solver.output_times = OutputTimes::Uniform(k);
        if linear {
            cfg.path.kinds.push(PathFamily::Linear);
        }
        prop_assert_eq!(ExperimentConfig::from_ini_str(&cfg.to_ini_string()).unwrap(), cfg);
    }
}
