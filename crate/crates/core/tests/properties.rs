use proptest::prelude::*;
use rmapl_core::fitting::{fit_ci, fit_cih, rmse, solve_btx_from_ci};
use rmapl_core::models::{
    breakpoint_distance, ci_path_loss, cih_path_loss, effective_ple, fspl, rma_los_path_loss,
    rma_nlos_path_loss, ApplicabilityRange, CiParams, CihParams, Environment, GeometryParams,
    RangeCheck, RmaLos,
};
use rmapl_core::simulation::{generate_samples, ScenarioConfig};
use rmapl_core::{PathLossSample, SampleSource};

fn table_geometry(env: Environment) -> impl Strategy<Value = GeometryParams> {
    let r = ApplicabilityRange::for_environment(env);
    (
        r.d_2d.min..=r.d_2d.max,
        r.h_bs.min..=r.h_bs.max,
        r.h_ut.min..=r.h_ut.max,
        r.h.min..=r.h.max,
        r.w.min..=r.w.max,
    )
        .prop_map(|(d_2d, h_bs, h_ut, h, w)| GeometryParams {
            d_2d,
            h_bs,
            h_ut,
            h,
            w,
        })
}

fn noiseless(cih: &CihParams, heights: &[f64]) -> Vec<PathLossSample> {
    let mut out = Vec::new();
    for (i, &h_bs) in heights.iter().enumerate() {
        for (j, &f_c) in [1.0, 28.0, 73.0].iter().enumerate() {
            for k in 0..20 {
                let d = 10.0 + 247.0 * (k + i + j) as f64;
                out.push(PathLossSample {
                    f_c,
                    d_2d: d,
                    d_3d: d,
                    h_bs,
                    h_ut: 1.5,
                    environment: Environment::Nlos,
                    pl: cih_path_loss(cih, f_c, d, h_bs).unwrap(),
                    source: SampleSource::Simulated,
                });
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ci_at_n_two_is_free_space(f_c in 0.5f64..150.0, d in 1.0f64..20_000.0) {
        let p = CiParams { n: 2.0, sigma: 0.0 };
        prop_assert_eq!(ci_path_loss(&p, f_c, d).unwrap(), fspl(f_c, d).unwrap());
    }

    #[test]
    fn cih_reduces_to_ci(n in 1.0f64..5.0, b_tx in -0.1f64..0.1, h_bs in 10.0f64..150.0,
                         f_c in 0.5f64..100.0, d in 1.0f64..10_000.0) {
        let flat = CihParams { n, b_tx: 0.0, h_b0: 35.0, sigma: 0.0 };
        let ci = CiParams { n, sigma: 0.0 };
        prop_assert_eq!(cih_path_loss(&flat, f_c, d, h_bs).unwrap(), ci_path_loss(&ci, f_c, d).unwrap());
        let sloped = CihParams { b_tx, ..flat };
        prop_assert_eq!(cih_path_loss(&sloped, f_c, d, 35.0).unwrap(), ci_path_loss(&ci, f_c, d).unwrap());
    }

    #[test]
    fn close_in_frequency_offset(n in 1.0f64..5.0, f1 in 0.5f64..100.0, f2 in 0.5f64..100.0, d in 1.0f64..10_000.0) {
        let p = CiParams { n, sigma: 0.0 };
        let diff = ci_path_loss(&p, f2, d).unwrap() - ci_path_loss(&p, f1, d).unwrap();
        prop_assert!((diff - 20.0 * (f2 / f1).log10()).abs() < 1e-9);
        let q = CihParams { n, b_tx: -0.05, h_b0: 35.0, sigma: 0.0 };
        let diff = cih_path_loss(&q, f2, d, 90.0).unwrap() - cih_path_loss(&q, f1, d, 90.0).unwrap();
        prop_assert!((diff - 20.0 * (f2 / f1).log10()).abs() < 1e-9);
    }

    #[test]
    fn los_is_continuous_at_breakpoint(h_bs in 10.0f64..150.0, h_ut in 1.0f64..10.0, h in 5.0f64..50.0, f_c in 0.5f64..100.0) {
        let m = RmaLos::new(h_bs, h_ut, h, f_c).unwrap();
        let bp = m.breakpoint();
        prop_assert!((m.pl1(bp) - m.pl2(bp)).abs() < 1e-9);
    }

    #[test]
    fn breakpoint_is_linear(h_bs in 1.0f64..200.0, h_ut in 0.5f64..20.0, f in 1e8f64..1e11, k in 0.1f64..10.0) {
        let base = breakpoint_distance(h_bs, h_ut, f).unwrap();
        for scaled in [
            breakpoint_distance(k * h_bs, h_ut, f).unwrap(),
            breakpoint_distance(h_bs, k * h_ut, f).unwrap(),
            breakpoint_distance(h_bs, h_ut, k * f).unwrap(),
        ] {
            prop_assert!((scaled - k * base).abs() <= 1e-12 * scaled.abs());
        }
    }

    #[test]
    fn evaluation_is_deterministic(g in table_geometry(Environment::Nlos), f_c in 0.5f64..100.0) {
        let a = rma_nlos_path_loss(&g, f_c, RangeCheck::Strict).unwrap();
        let b = rma_nlos_path_loss(&g, f_c, RangeCheck::Strict).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn noiseless_ci_round_trip(n in 1.5f64..4.5) {
        let cih = CihParams { n, b_tx: 0.0, h_b0: 35.0, sigma: 0.0 };
        let fit = fit_ci(&noiseless(&cih, &[35.0])).unwrap();
        prop_assert!(((fit.n - n) / n).abs() < 1e-10);
        prop_assert!(fit.sigma < 1e-9);
    }

    #[test]
    fn noiseless_cih_round_trip(n in 1.5f64..4.5, b_tx in -0.1f64..0.05) {
        let truth = CihParams { n, b_tx, h_b0: 35.0, sigma: 0.0 };
        let fit = fit_cih(&noiseless(&truth, &[10.0, 80.0, 150.0]), 35.0).unwrap();
        prop_assert!(((fit.n - n) / n).abs() < 1e-10);
        prop_assert!((fit.b_tx.unwrap() - b_tx).abs() < 1e-10);
    }

    #[test]
    fn back_solve_identity(ple in 1.5f64..4.0, n in 1.5f64..4.0, h_bs in 10.0f64..150.0) {
        prop_assume!((h_bs - 35.0).abs() > 1e-3);
        let b_tx = solve_btx_from_ci(ple, n, h_bs, 35.0).unwrap();
        let p = CihParams { n, b_tx, h_b0: 35.0, sigma: 0.0 };
        prop_assert!((effective_ple(&p, h_bs).unwrap() - ple).abs() < 1e-12);
    }
}

#[test]
fn nlos_mean_never_below_los_mean() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig {
        cases: 10_000,
        ..ProptestConfig::default()
    });
    runner
        .run(
            &(table_geometry(Environment::Nlos), 0.5f64..100.0),
            |(g, f_c)| {
                let nlos = rma_nlos_path_loss(&g, f_c, RangeCheck::Strict).unwrap();
                let los = rma_los_path_loss(&g, f_c, RangeCheck::Strict).unwrap();
                prop_assert!(nlos.mean_db >= los.mean_db);
                Ok(())
            },
        )
        .unwrap();
}

fn noisy_case() -> Vec<PathLossSample> {
    let cfg = ScenarioConfig {
        samples_per_cell: 2_000,
        h_bs_sweep: vec![10.0, 60.0, 150.0],
        ..ScenarioConfig::case_one(Environment::Nlos, 99)
    };
    generate_samples(&cfg).unwrap()
}

#[test]
fn fitted_ci_is_optimal() {
    let samples = noisy_case();
    let fit = fit_ci(&samples).unwrap();
    let best = fit.sigma;
    assert!((rmse(&samples, &fit.ci_params()).unwrap() - best).abs() < 1e-12);
    for dn in [-0.01, 0.01] {
        let p = CiParams {
            n: fit.n + dn,
            sigma: 0.0,
        };
        assert!(rmse(&samples, &p).unwrap() > best);
    }
    for n in [2.0, 2.5, 3.0, 3.5] {
        assert!(rmse(&samples, &CiParams { n, sigma: 0.0 }).unwrap() >= best);
    }
}

#[test]
fn fitted_cih_is_optimal() {
    let samples = noisy_case();
    let fit = fit_cih(&samples, 35.0).unwrap();
    let p = fit.cih_params(35.0);
    for (dn, db) in [(-0.01, 0.0), (0.01, 0.0), (0.0, -0.01), (0.0, 0.01)] {
        let q = CihParams {
            n: p.n + dn,
            b_tx: p.b_tx + db,
            ..p
        };
        assert!(rmse(&samples, &q).unwrap() > fit.sigma);
    }
}

#[test]
fn fits_ignore_order_and_duplication() {
    let samples = noisy_case();
    let ci = fit_ci(&samples).unwrap();
    let cih = fit_cih(&samples, 35.0).unwrap();

    let mut reversed = samples.clone();
    reversed.reverse();
    let mut doubled = samples.clone();
    doubled.extend_from_slice(&samples);

    for other in [&reversed, &doubled] {
        let c = fit_ci(other).unwrap();
        assert!((c.n - ci.n).abs() < 1e-12);
        assert!((c.sigma - ci.sigma).abs() < 1e-9);
        let h = fit_cih(other, 35.0).unwrap();
        assert!((h.n - cih.n).abs() < 1e-10);
        assert!((h.b_tx.unwrap() - cih.b_tx.unwrap()).abs() < 1e-10);
        assert!((h.sigma - cih.sigma).abs() < 1e-9);
    }
    assert_eq!(fit_ci(&doubled).unwrap().sample_count, 2 * ci.sample_count);
}
