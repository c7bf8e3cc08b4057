use proptest::prelude::*;

use tfim_fidelity::dynamics::{
    thermal_state, NambuPropagator, QuenchKind, QuenchProtocol, QuenchSetup, ThermalQuenchSetup,
};
use tfim_fidelity::freefermion::{ground_correlation_matrix, nambu_form, CorrelationMatrix};
use tfim_fidelity::linalg::{hermiticity_error, HermitianEigen};
use tfim_fidelity::model::{clean_form, realization_form, ModelSpec};
use tfim_fidelity::statics::{
    entanglement_profile, global_fidelity, mean_single_site_fidelity, mean_two_site_fidelity, StaticsReference,
};
use tfim_fidelity::{diagonalize, draw_disorder};

fn spectrum(g: &CorrelationMatrix) -> Vec<f64> {
    HermitianEigen::new(g.matrix()).values.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fidelities_are_ordered_and_bounded(
        length in 4usize..40,
        lambda in 0.3f64..2.0,
        r in 0.0f64..0.4,
        stream in 0u64..10_000,
    ) {
        let spec = ModelSpec::ising(length, lambda).with_disorder(r);
        let reference = StaticsReference::new(diagonalize(&clean_form(&spec)).unwrap()).unwrap();
        let d = diagonalize(&realization_form(&spec, stream)).unwrap();
        let f = global_fidelity(&reference.ideal, &d).unwrap();
        let f1 = mean_single_site_fidelity(&reference, &d).unwrap();
        let f2 = mean_two_site_fidelity(&reference, &d).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(f1 <= 1.0 + 1e-12 && f2 <= 1.0 + 1e-12);
        prop_assert!(f <= f2 + 1e-9, "F = {f} > f2 = {f2}");
        prop_assert!(f <= f1 + 1e-9, "F = {f} > f1 = {f1}");
    }

    #[test]
    fn entropy_is_bounded_by_block_size(
        length in 4usize..40,
        lambda in 0.3f64..2.0,
        r in 0.0f64..0.4,
        stream in 0u64..10_000,
    ) {
        let spec = ModelSpec::ising(length, lambda).with_disorder(r);
        let d = diagonalize(&realization_form(&spec, stream)).unwrap();
        let cuts: Vec<usize> = (1..length).collect();
        let s = entanglement_profile(&d, &cuts).unwrap();
        for (&l, &value) in cuts.iter().zip(&s) {
            let bound = (l.min(length - l) as f64) * std::f64::consts::LN_2;
            prop_assert!(value >= -1e-12 && value <= bound + 1e-9, "S({l}) = {value}");
        }
    }

    #[test]
    fn evolution_keeps_correlations_gaussian(
        length in 2usize..16,
        lambda in 0.3f64..2.0,
        r in 0.0f64..0.4,
        t in 0.0f64..10.0,
        stream in 0u64..10_000,
    ) {
        let spec = ModelSpec::ising(length, lambda).with_disorder(r);
        let g = ground_correlation_matrix(&diagonalize(&clean_form(&spec)).unwrap());
        let prop = NambuPropagator::new(&nambu_form(&realization_form(&spec, stream)));
        let gt = prop.evolve(&g, t);
        prop_assert!(hermiticity_error(gt.matrix()) < 1e-10);
        for (a, b) in spectrum(&g).iter().zip(spectrum(&gt).iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn thermal_correlations_are_physical(
        length in 2usize..16,
        lambda in 0.3f64..2.0,
        temperature in 0.05f64..20.0,
    ) {
        let d = diagonalize(&clean_form(&ModelSpec::ising(length, lambda))).unwrap();
        let state = thermal_state(&d, temperature).unwrap();
        prop_assert!(hermiticity_error(state.correlations.matrix()) < 1e-10);
        for v in spectrum(&state.correlations) {
            prop_assert!((-1e-10..=1.0 + 1e-10).contains(&v));
        }
    }

    #[test]
    fn quench_fidelity_starts_at_one_and_stays_bounded(
        length in 2usize..24,
        lambda0 in 0.3f64..1.7,
        delta in -0.5f64..0.5,
        r in 0.0f64..0.3,
        stream in 0u64..10_000,
        local in any::<bool>(),
    ) {
        let spec = ModelSpec::ising(length, lambda0).with_disorder(r);
        let kind = if local { QuenchKind::Local(length / 2) } else { QuenchKind::Global };
        let protocol = QuenchProtocol {
            kind,
            lambda_initial: lambda0,
            delta_lambda: delta,
            times: vec![0.0, 0.5, 2.0, 7.5],
        };
        let f = QuenchSetup::new(&spec, &protocol).unwrap().run(&draw_disorder(&spec, stream)).unwrap();
        prop_assert!((f[0] - 1.0).abs() < 1e-10);
        for v in f {
            prop_assert!((0.0..=1.0 + 1e-8).contains(&v), "F = {v}");
        }
    }

    #[test]
    fn thermal_quench_fidelity_is_bounded(
        length in 2usize..24,
        temperature in 0.1f64..10.0,
        r in 0.0f64..0.3,
        stream in 0u64..10_000,
    ) {
        let spec = ModelSpec::ising(length, 1.0).with_disorder(r);
        let setup = ThermalQuenchSetup::new(&spec, 1.0, 2.0, temperature, &[0.0, 1.0, 5.0]).unwrap();
        let f = setup.run(&draw_disorder(&spec, stream)).unwrap();
        prop_assert!((f[0] - 1.0).abs() < 1e-10);
        for v in f {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
    }
}

#[test]
fn clean_quench_is_perfect() {
    let spec = ModelSpec::ising(30, 0.75);
    let protocol = QuenchProtocol {
        kind: QuenchKind::Global,
        lambda_initial: 0.75,
        delta_lambda: 0.5,
        times: (0..21).map(|k| 0.5 * k as f64).collect(),
    };
    let f = QuenchSetup::new(&spec, &protocol).unwrap().run(&draw_disorder(&spec, 0)).unwrap();
    assert!(f.iter().all(|v| (v - 1.0).abs() < 1e-9), "{f:?}");
}
