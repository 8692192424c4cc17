//! Invariants checked on random inputs.

mod common;

use proptest::prelude::*;

use nerve_orbits::cli::{Scenario, Seeds, Task, WeightSpec};
use nerve_orbits::energy::LevelRule;
use nerve_orbits::model::{ModifiedNonlinearity, Nonlinearity, SplitStrategy, Weight};
use nerve_orbits::{IntegratorSettings, PhaseState};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn piecewise_weight() -> impl Strategy<Value = Weight> {
    (0.5f64..3.0, prop::collection::vec((0.05f64..1.0, 0.5f64..60.0), 1..5)).prop_map(|(beta, raw)| {
        let total: f64 = raw.iter().map(|r| r.0).sum();
        let mut t = 0.0;
        let mut segs: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(len, v)| {
                t += beta * len / total;
                (t, v)
            })
            .collect();
        segs.last_mut().unwrap().0 = beta;
        Weight::piecewise(beta, segs).unwrap()
    })
}

fn sampled_weight() -> impl Strategy<Value = Weight> {
    (0.5f64..3.0, prop::collection::vec(0.5f64..60.0, 1..6)).prop_map(|(beta, vals)| {
        let n = vals.len() as f64;
        let samples = vals.iter().enumerate().map(|(i, &v)| (beta * i as f64 / n, v)).collect();
        Weight::sampled(beta, samples).unwrap()
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn energy_is_conserved_for_constant_weight(
        nbar in 5.0f64..200.0,
        lambda in 0.05f64..1.0,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let s = IntegratorSettings::default();
        let (drift, e0) = common::energy_drift(nbar, lambda, theta, 5.0, &s).unwrap();
        prop_assert!(drift <= 100.0 * s.rel_tol * e0.abs().max(1.0), "drift {drift:e} at E = {e0}");
    }

    #[test]
    fn flow_is_a_semigroup(
        x in -2.0f64..3.0,
        y in -3.0f64..3.0,
        t0 in 0.0f64..1.0,
        d1 in 0.01f64..1.5,
        d2 in 0.01f64..1.5,
        alpha in 0.2f64..0.9,
    ) {
        let p = common::two_level(1.0, alpha, 40.0, 1.0);
        let s = IntegratorSettings::default();
        let (gap, tol) = common::semigroup_gap(&p, PhaseState::new(x, y), t0, t0 + d1, t0 + d1 + d2, &s).unwrap();
        prop_assert!(gap <= 10.0 * tol, "gap {gap:e}, tolerance {tol:e}");
    }

    #[test]
    fn rotation_number_is_stable_under_refinement(
        r in 0.02f64..0.5,
        phi in 0.0f64..std::f64::consts::TAU,
        m in 1u32..3,
        alpha in 0.3f64..1.0,
    ) {
        let p = common::two_level(1.0, alpha, 20.0, 1.0);
        let q0 = PhaseState::new(common::center_oracle(20.0), 0.0);
        let z0 = q0 + PhaseState::new(r * phi.cos(), r * phi.sin());
        let (coarse, fine) = common::rot_refinement(&p, z0, q0, m, &IntegratorSettings::default()).unwrap();
        prop_assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
    }

    #[test]
    fn modified_nonlinearity_agrees_on_unit_interval(
        a in 0.05f64..0.95,
        frac in 0.01f64..1.0,
        s in 0.0f64..=1.0,
    ) {
        let f = Nonlinearity::cubic(a).unwrap();
        let c0 = ModifiedNonlinearity::with_default_k0(f.clone()).unwrap().c0();
        let f0 = ModifiedNonlinearity::new(f.clone(), frac * c0).unwrap();
        prop_assert_eq!(f0.eval(s), f.eval(s));
    }

    #[test]
    fn split_reassembles_piecewise_weights(
        w in piecewise_weight(),
        t in -5.0f64..5.0,
        pick in 0usize..3,
        explicit in 1.0f64..50.0,
    ) {
        let strategy = [SplitStrategy::Mean, SplitStrategy::PlateauValue, SplitStrategy::Explicit(explicit)][pick];
        let split = w.split(strategy).unwrap();
        let n = split.eval(t);
        prop_assert!((split.nbar() + split.perturbation(t) - n).abs() <= 1e-12 * n.max(1.0));
        prop_assert!((split.ntilde_l1() - w.deviation_l1(split.nbar())).abs() <= 1e-12 * split.ntilde_l1().max(1.0));
    }

    #[test]
    fn split_reassembles_sampled_weights(w in sampled_weight(), t in -5.0f64..5.0) {
        let split = w.split(SplitStrategy::Mean).unwrap();
        let n = split.eval(t);
        prop_assert!((split.nbar() + split.perturbation(t) - n).abs() <= 1e-12 * n.max(1.0));
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![0.001f64..100.0, (1u32..1000).prop_map(|k| k as f64 / 8.0), Just(1e-10)]
}

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 0..4)
}

fn scenario() -> impl Strategy<Value = Scenario> {
    let weight = prop_oneof![
        finite().prop_map(WeightSpec::Constant),
        (0.1f64..0.9, finite(), finite()).prop_map(|(alpha, n1, n0)| WeightSpec::TwoLevel { alpha, n1, n0 }),
        (0.1f64..0.9, finite(), finite()).prop_map(|(t, v1, v2)| WeightSpec::Piecewise(vec![(t, v1), (1.0, v2)])),
        (0.1f64..0.9, finite(), finite()).prop_map(|(t, v1, v2)| WeightSpec::Sampled(vec![(0.0, v1), (t, v2)])),
    ];
    let split = prop_oneof![
        Just(SplitStrategy::Mean),
        Just(SplitStrategy::PlateauValue),
        finite().prop_map(SplitStrategy::Explicit),
    ];
    let level = prop_oneof![Just(LevelRule::MaxAllowed), (0.01f64..=1.0).prop_map(LevelRule::Fraction)];
    (
        (prop::option::of(prop::sample::select(Task::ALL.to_vec())), finite(), 0.01f64..0.99, prop::option::of(finite())),
        (weight, split, 1u32..5, prop::option::of(1u32..9), prop::option::of(1u32..9), level),
        (1e-12f64..1e-3, 1e-14f64..1e-3, finite(), finite(), (1usize..99, 1usize..99, 1usize..9)),
        (prop::collection::vec(finite(), 0..5), finite(), pairs(), prop::option::of((-1.0f64..1.0, -1.0f64..1.0))),
        (prop::collection::vec(finite(), 0..4), prop::collection::vec(0.01f64..1.0, 0..4), prop::collection::vec(1u32..4, 0..3)),
        "[a-z0-9_/ #\"\\\\-]{0,12}",
    )
        .prop_map(|(head, model, tol, lists, sweep, dir)| {
            let (task, g, a, k0) = head;
            let (weight, split, m, n, k, level) = model;
            let (rel, abs, max_step, dt_out, (angular, radial, phases)) = tol;
            let (x0, half_span, points, q0) = lists;
            let (nbar, alpha, ms) = sweep;
            let mut sc = Scenario {
                task,
                g,
                a,
                k0,
                weight,
                split,
                m,
                n,
                k,
                level,
                dt_out,
                seeds: Seeds { angular, radial, phases },
                out_dir: dir.into(),
                ..Scenario::default()
            };
            sc.tol = IntegratorSettings { rel_tol: rel, abs_tol: abs, max_step };
            sc.portrait.x0 = x0.clone();
            sc.portrait.half_span = half_span;
            sc.portrait.curve_n = x0;
            sc.timemap_nbar = nbar.clone();
            sc.rotation.points = points;
            sc.rotation.q0 = q0;
            sc.sweep.nbar = nbar;
            sc.sweep.alpha = alpha;
            sc.sweep.m = ms;
            sc
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn config_round_trips(sc in scenario()) {
        let text = sc.to_config();
        let parsed = Scenario::parse(&text);
        prop_assert!(parsed.is_ok(), "{:?}\n{text}", parsed);
        prop_assert_eq!(parsed.unwrap(), sc);
    }

    #[test]
    fn value_parser_never_panics(text in "\\PC{0,40}") {
        let _ = nerve_orbits::cli::parse_value(&text);
        let _ = Scenario::parse(&text);
        let _ = nerve_orbits::cli::parse_float_list(&text);
    }
}
