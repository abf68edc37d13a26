mod common;

use common::grid;
use cylflow::background::HamelParameters;
use cylflow::families::{build_forcing, ForcingFamily};
use cylflow::linear::solve_linear;
use cylflow::verification::decay::fit_decay;
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = HamelParameters> {
    (-5.0f64..5.0, 2.3f64..6.0, 0.05f64..0.95).prop_map(|(a, g, t)| {
        let rho = 2.0 + t * (g.min(3.0) - 2.0);
        HamelParameters::new(a, g, rho).unwrap()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3).prop_map(|v| {
        let mut c: Vec<_> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        c[0].im = 0.0;
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_solve_is_linear(p in params(), c1 in coeffs(), c2 in coeffs(), a in -2.0f64..2.0, seed in any::<u64>()) {
        let g = grid(16);
        let f1 = build_forcing(&g, p.rho, 2, ForcingFamily::Random, 1.0, &c1, seed);
        let f2 = build_forcing(&g, p.rho, 2, ForcingFamily::PowerEnvelope, 1.0, &c2, seed);
        let mut combined = f1.scale(a);
        for m in f2.modes() {
            let t = combined.mode_mut(m.n).unwrap();
            for k in 0..3 {
                t.g[k] = t.g[k].add(&m.g[k]);
            }
            for k in 0..6 {
                t.f[k] = t.f[k].add(&m.f[k]);
            }
        }
        let together = solve_linear(&g, &p, &combined).unwrap();
        let apart = solve_linear(&g, &p, &f1).unwrap().scale(a).axpy(1.0, &solve_linear(&g, &p, &f2).unwrap()).unwrap();
        let scale = together.scale_max().max(1e-300);
        prop_assert!(together.sub(&apart).unwrap().scale_max() <= 1e-12 * scale);
    }

    #[test]
    fn real_forcing_gives_real_solution(p in params(), c in coeffs(), seed in any::<u64>()) {
        let g = grid(16);
        for family in ForcingFamily::ALL {
            let f = build_forcing(&g, p.rho, 2, family, 1.0, &c, seed);
            let v = solve_linear(&g, &p, &f).unwrap();
            prop_assert!(v.reality_defect() <= 1e-12 * v.scale_max().max(1e-300));
        }
    }

    #[test]
    fn decay_fit_recovers_power_laws(e in -4.0f64..-0.5, amp in 1e-6f64..1e3) {
        let radii: Vec<f64> = (0..200).map(|k| 10f64.powf(k as f64 * 3.0 / 199.0)).collect();
        let mags: Vec<f64> = radii.iter().map(|r| amp * r.powf(e)).collect();
        let fit = fit_decay(&radii, &mags, [10.0, 333.0], 1000.0).unwrap();
        prop_assert!((fit.slope - e).abs() <= 1e-10);
        prop_assert!((fit.intercept - amp.ln()).abs() <= 1e-8 * amp.ln().abs().max(1.0));
    }
}
