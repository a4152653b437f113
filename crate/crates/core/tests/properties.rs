use dirac_core::diracd::Channel;
use dirac_core::numerics::{
    find_root_bracketed, integrate_ode, quad_adaptive, scan_sign_changes, OdeConfig,
    QuadratureConfig,
};
use dirac_core::potentials::{PotentialSpec, SymmetryMode};
use dirac_core::theorems::{
    corollary_area_check, detect_crossings, transform_g, transform_rho, weighted_transform,
    AreaVerdict, TransformConfig, TransformKind, Weight,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn quick() -> TransformConfig {
    TransformConfig { samples: 400, extension_samples: 8192, ..TransformConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_is_additive(a in -2.0..0.0f64, m in 0.1..2.0f64, b in 2.1..5.0f64, k in 0.1..3.0f64) {
        let f = |x: f64| (k * x).sin() * (-0.3 * x * x).exp() + x * x;
        let cfg = QuadratureConfig::default();
        let whole = quad_adaptive(f, a, b, &cfg).unwrap();
        let split = quad_adaptive(f, a, m, &cfg).unwrap() + quad_adaptive(f, m, b, &cfg).unwrap();
        prop_assert!((whole - split).abs() < 1e-9 * whole.abs().max(1.0));
    }

    #[test]
    fn ode_matches_matrix_exponential(w in 0.2..5.0f64, g in 0.0..1.0f64, t1 in 0.5..6.0f64) {
        // y' = [[-g, w], [-w, -g]] y has the solution e^{-gt}(cos wt, -sin wt)
        let sol = integrate_ode(
            |_, y| [-g * y[0] + w * y[1], -w * y[0] - g * y[1]],
            0.0,
            [1.0, 0.0],
            t1,
            &OdeConfig::default(),
        )
        .unwrap();
        let y = sol.last();
        let e = (-g * t1).exp();
        prop_assert!((y[0] - e * (w * t1).cos()).abs() < 1e-8);
        prop_assert!((y[1] + e * (w * t1).sin()).abs() < 1e-8);
    }

    #[test]
    fn root_stays_in_bracket(c in 0.01..50.0f64) {
        let x = find_root_bracketed(|x| x * x * x - c, 0.0, 4.0, 1e-12).unwrap();
        prop_assert!((0.0..=4.0).contains(&x));
        prop_assert!((x - c.cbrt()).abs() < 1e-10);
    }

    #[test]
    fn scan_recovers_sine_modulated_crossings(beta in 0.3..3.0f64) {
        let f = |x: f64| (x * x * x + beta).sin();
        let roots: Vec<f64> = scan_sign_changes(f, 0.0, 2.5, 2.5 / 2048.0)
            .into_iter()
            .map(|b| find_root_bracketed(f, b.lo, b.hi, 1e-14).unwrap())
            .collect();
        let expected: Vec<f64> = (1..)
            .map(|k| k as f64 * PI - beta)
            .filter(|z| *z > 0.0)
            .map(f64::cbrt)
            .take_while(|x| *x < 2.5)
            .collect();
        prop_assert_eq!(roots.len(), expected.len());
        for (r, e) in roots.iter().zip(&expected) {
            prop_assert!((r - e).abs() < 1e-8);
        }
    }

    #[test]
    fn transforms_are_antisymmetric_and_linear(a1 in 0.1..2.0f64, a2 in 0.1..2.0f64, b in 0.1..1.0f64, c in 0.2..3.0f64) {
        let va = PotentialSpec::Harmonic { a: a1 };
        let vb = PotentialSpec::SineModulatedHarmonic { b: a2, beta: 1.0 + b };
        let (fa, fb) = (|x| va.value(x), |x| vb.value(x));
        let cfg = quick();
        let g = transform_g(&fa, &fb, 3.0, &cfg).unwrap();
        let swapped = transform_g(&fb, &fa, 3.0, &cfg).unwrap();
        let scaled = transform_g(&|x| c * fa(x), &|x| c * fb(x), 3.0, &cfg).unwrap();
        for x in [0.0, 0.7, 1.3, 2.2, 3.0] {
            let v = g.value_at(x);
            let tol = 1e-9 * g.scale.max(1.0);
            prop_assert!((swapped.value_at(x) + v).abs() < tol);
            prop_assert!((scaled.value_at(x) - c * v).abs() < c * tol);
        }
        prop_assert_eq!(g.value_at(0.0), 0.0);
    }

    #[test]
    fn weights_keep_the_sign_of_the_difference(p in 0.5..3.0f64, x in 0.01..10.0f64) {
        let d = |t: f64| (t - 2.0) * (-t).exp();
        for w in [Weight::Unit, Weight::Power(p)] {
            let v = w.eval(x);
            prop_assert!(v > 0.0);
            prop_assert_eq!((d(x) * v).signum(), d(x).signum());
        }
    }

    #[test]
    fn pointwise_ordering_implies_positive_transforms(
        alpha in 0.05..0.4f64, a in 0.05..1.0f64, shift in 0.0..0.3f64,
    ) {
        // Yukawa above an equally strong or stronger Coulomb
        let va = PotentialSpec::Coulomb { beta: alpha + shift };
        let vb = PotentialSpec::Yukawa { alpha, a };
        let (fa, fb) = (|x| va.value(x), |x| vb.value(x));
        let cfg = quick();
        let ch = Channel::new(2, 0.5, -1).unwrap();
        let rho = transform_rho(&fa, &fb, SymmetryMode::Spin, ch, 30.0, &cfg).unwrap();
        prop_assert!(rho.nonnegative);
        let ha = PotentialSpec::Harmonic { a };
        let hb = PotentialSpec::Harmonic { a: a + shift };
        let g = transform_g(&|x| ha.value(x), &|x| hb.value(x), 4.0, &cfg).unwrap();
        prop_assert!(g.nonnegative);
    }

    #[test]
    fn area_verdict_agrees_with_transform(c1 in 0.5..3.0f64, c2 in 3.1..6.0f64, amp in 0.1..2.0f64, decay in 0.05..1.0f64) {
        // difference positive on [0, c1), negative on (c1, c2), positive after
        let va = |_: f64| 0.0;
        let vb = move |x: f64| amp * (x - c1) * (x - c2) * (-decay * x).exp();
        let cfg = quick();
        let crossings = detect_crossings(&va, &vb, (0.0, 40.0), &cfg);
        prop_assert_eq!(crossings.count, 2);
        let chk = corollary_area_check(&va, &vb, &crossings, Weight::Unit, &cfg).unwrap();
        let d = |x: f64| vb(x) - va(x);
        let g = weighted_transform(TransformKind::G, &d, Weight::Unit, 40.0, &cfg).unwrap();
        if chk.verdict == AreaVerdict::Nonnegative {
            prop_assert!(g.nonnegative, "areas {:?} but min {}", chk.areas, g.min_value);
        }
        // for two crossings the test is exact: g(x₂) ≥ 0
        let g2 = g.value_at(crossings.points[1]);
        prop_assert_eq!(chk.verdict == AreaVerdict::Nonnegative, g2 >= -1e-12 * g.scale);
    }
}

mod solver {
    use dirac_core::dirac1d::ParityChoice;
    use dirac_core::diracd::{Channel, ScalarCoupling};
    use dirac_core::potentials::{PotentialSpec, SymmetryMode};
    use dirac_core::problem::{Geometry, Problem};
    use dirac_core::shooting::SolverConfig;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn harmonic_states_respect_window_and_lemma(a in 0.1..2.0f64, m in 0.5..2.0f64, pseudo in any::<bool>()) {
            let mode = if pseudo { SymmetryMode::PseudoSpin } else { SymmetryMode::Spin };
            let sign = if pseudo { -1.0 } else { 1.0 };
            let p = Problem {
                potential: PotentialSpec::Harmonic { a: sign * a },
                scalar: ScalarCoupling::Symmetric(mode),
                mass: m,
                geometry: Geometry::Line { parity: ParityChoice::Auto },
            };
            let st = p.solve(&SolverConfig::default()).unwrap();
            prop_assert!(p.window().unwrap().contains(st.energy()));
            prop_assert!(p.lemma_check(&st).unwrap().holds);
            prop_assert!((st.norm() - 1.0).abs() < 1e-8);
            let reduced = p.solve_reduced(&SolverConfig::default()).unwrap();
            prop_assert!((reduced - st.energy()).abs() < 5e-5);
        }

        #[test]
        fn cutoff_coulomb_states_are_nodeless(v in 0.3..2.0f64, a in 0.2..1.5f64) {
            let p = Problem {
                potential: PotentialSpec::CutoffCoulomb { v, a },
                scalar: ScalarCoupling::Symmetric(SymmetryMode::Spin),
                mass: 1.0,
                geometry: Geometry::Radial { channel: Channel::new(3, 0.5, -1).unwrap() },
            };
            let st = p.solve(&SolverConfig::default()).unwrap();
            prop_assert_eq!(st.nodes(), (0, 0));
            prop_assert!(p.window().unwrap().contains(st.energy()));
            prop_assert!(p.lemma_check(&st).unwrap().holds);
        }
    }
}
