use graphon_transfer::harness::{
    csv_string, derive_seed, run_convergence, sample_graph, sample_signal, ConvergenceParams, ExperimentConfig,
    GraphonFamily, Sampling, SignalFn,
};
use graphon_transfer::FilterSpec;
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

#[test]
fn seed_derivation_matches_reference_digest() {
    // first eight bytes of sha256 over the little-endian fields, computed independently
    assert_eq!(derive_seed(42, "converge", 64, 3), 1166584387957133855);
    assert_eq!(derive_seed(0, "", 0, 0), 8628161281313630310);
}

#[test]
fn product_grid_of_two() {
    let s = sample_graph(&GraphonFamily::Product, 2, Sampling::Grid, 0).unwrap();
    assert_eq!(s.nodes, vec![0.25, 0.75]);
    let a = s.graph.gwm();
    let want = [[0.0625, 0.1875], [0.1875, 0.5625]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((a[(i, j)] - want[i][j]).abs() < 1e-15);
        }
    }
}

#[test]
fn linear_signal_on_grid_of_four() {
    let s = sample_graph(&GraphonFamily::Const(0.5), 4, Sampling::Grid, 9).unwrap();
    let x = sample_signal(SignalFn::Linear, &s, 9).unwrap();
    let got: Vec<f64> = x.values().iter().map(|z| z.re).collect();
    assert_eq!(got, vec![0.125, 0.375, 0.625, 0.875]);
    assert!(sample_signal(SignalFn::Linear, &s, 10).is_err());
}

fn convergence_csv() -> String {
    let r = run_convergence(&ConvergenceParams {
        name: "determinism".into(),
        graphon: GraphonFamily::ExpDist(2.0),
        filter: FilterSpec::cube_minus_id(),
        sizes: vec![8, 16, 32],
        sampling: Sampling::Iid,
        trials: 6,
        seed: 11,
    })
    .unwrap();
    csv_string(&r.rows)
}

#[test]
fn csv_is_identical_across_runs_and_thread_counts() {
    let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let one = pool(1).install(convergence_csv);
    let four = pool(4).install(convergence_csv);
    assert_eq!(one, four);
    assert_eq!(one, convergence_csv());
    assert!(one.starts_with("experiment,graphon,filter_or_scnn,n,m,trial,seed,metric,value\n"));
}

#[test]
fn config_round_trip() {
    let text = r#"{"experiment": "converge", "graphon": "min", "filter": "sq", "sizes": [8, 16], "trials": 2}"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    cfg.validate().unwrap();
    let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(again.sizes, Some(vec![8, 16]));
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..ProptestConfig::with_cases(32)
    })]

    #[test]
    fn samples_are_symmetric_bounded_and_reproducible(
        family in prop::sample::select(vec!["product", "min", "expdist:3", "sbm:3,0.9,0.1", "const:0.4"]),
        n in 2usize..40,
        seed in any::<u64>(),
    ) {
        let w = GraphonFamily::parse(family).unwrap();
        let a = sample_graph(&w, n, Sampling::Iid, seed).unwrap();
        let b = sample_graph(&w, n, Sampling::Iid, seed).unwrap();
        prop_assert_eq!(a.graph.gso(), b.graph.gso());
        prop_assert!(a.nodes.windows(2).all(|p| p[0] <= p[1]));
        let m = a.graph.gwm();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
                prop_assert!(m[(i, j)].abs() <= w.bound() + 1e-15);
            }
        }
    }
}
