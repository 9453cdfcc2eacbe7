use graphon_transfer::filters::{stability_constant, stability_constant_with, Periodic, PeriodicExtension};
use graphon_transfer::{DMatrix, EigenDecomposition, FilterSpec};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

fn symmetric(n: usize, vals: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut it = vals.iter().cycle();
    for i in 0..n {
        for j in i..n {
            let v = *it.next().unwrap();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().amax()
}

fn with_norm(m: DMatrix<f64>, target: f64) -> DMatrix<f64> {
    let s = spectral_norm(&m);
    if s == 0.0 {
        m
    } else {
        m * (target / s)
    }
}

fn test_filters() -> Vec<FilterSpec> {
    vec![
        FilterSpec::square(),
        FilterSpec::cube_minus_id(),
        FilterSpec::rational(vec![0.0, 1.0], vec![2.0, 1.0]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..ProptestConfig::with_cases(24)
    })]

    #[test]
    fn matrix_perturbation_bound(
        (a_vals, e_vals, n) in (1usize..10).prop_flat_map(|n| (
            prop::collection::vec(-1.0f64..1.0, n * n),
            prop::collection::vec(-1.0f64..1.0, n * n),
            Just(n),
        )),
        which in 0usize..3,
        eps in prop::sample::select(vec![1e-1, 1e-2, 1e-3]),
    ) {
        let h = &test_filters()[which];
        let gamma = h.domain_bound();
        let a = with_norm(symmetric(n, &a_vals), gamma - eps);
        let b = &a + with_norm(symmetric(n, &e_vals), eps);
        prop_assume!(spectral_norm(&b) <= gamma);
        let c = stability_constant(h, 2048).unwrap().lemma_constant;
        let ha = EigenDecomposition::new(&a).filter(h).unwrap();
        let hb = EigenDecomposition::new(&b).filter(h).unwrap();
        prop_assert!(spectral_norm(&(ha - hb)) <= c * spectral_norm(&(&a - &b)) + 1e-8);
    }

    #[test]
    fn extension_reproduces_and_joins_smoothly(c in prop::collection::vec(-1.0f64..1.0, 2..=5)) {
        let h = FilterSpec::polynomial(c);
        let ext = PeriodicExtension::new(&h).unwrap();
        let g = h.domain_bound();
        for i in 0..=1000 {
            let t = -g + 2.0 * g * i as f64 / 1000.0;
            prop_assert_eq!(ext.eval(t), h.eval(t));
            prop_assert!((ext.eval(t + ext.period()) - h.eval(t)).abs() < 1e-12);
        }
        let d = 1e-6;
        for edge in [-g, g] {
            let left = (ext.eval(edge) - ext.eval(edge - d)) / d;
            let right = (ext.eval(edge + d) - ext.eval(edge)) / d;
            prop_assert!((ext.eval(edge + 1e-12) - ext.eval(edge - 1e-12)).abs() < 1e-9);
            prop_assert!((left - right).abs() < 1e-4 * (1.0 + left.abs()));
        }
    }
}

#[test]
fn constant_is_stable_under_sample_doubling() {
    for h in test_filters() {
        let a = stability_constant_with(&h, 512, 1 << 14).unwrap().lemma_constant;
        let b = stability_constant_with(&h, 512, 1 << 15).unwrap().lemma_constant;
        assert!((a - b).abs() <= 1e-6 * a, "{}: {a} vs {b}", h.label());
    }
}

#[test]
fn zero_filter_constant() {
    let c = stability_constant(&FilterSpec::polynomial(vec![0.0]), 256).unwrap();
    assert_eq!(c.coeff_sum, 0.0);
    assert_eq!(c.lemma_constant, 2.0);
}
