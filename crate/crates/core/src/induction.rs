//! Embedding graphs and graph signals into graphon space.

use nalgebra::DVector;

use crate::domain::{
    FeatureMap, Graph, GraphSignal, Partition, StepFeatureMap, StepGraphon, StepSignal,
};
use crate::error::{Error, Result};

/// The induced graphon `W_A`: value `A_ij = n Δ_ij` on `P_i x P_j` of the
/// standard partition `P_n`.
pub fn induce_graphon(g: &Graph) -> StepGraphon {
    StepGraphon::uniform(g.gwm()).expect("GWM is square and non-empty")
}

/// The induced step signal `ψ_x` on `P_n`.
pub fn induce_signal(x: &GraphSignal) -> StepSignal {
    let p = Partition::uniform(x.len().max(1)).expect("non-empty partition");
    StepSignal::new(p, x.values().clone()).expect("length matches partition")
}

pub fn induce_feature_map(x: &FeatureMap) -> StepFeatureMap {
    StepFeatureMap { features: x.features.iter().map(induce_signal).collect() }
}

/// Re-expresses both kernels on the partition generated by the union of their
/// breakpoints. Values are unchanged pointwise.
pub fn common_refinement(a: &StepGraphon, b: &StepGraphon) -> (StepGraphon, StepGraphon) {
    if a.partition().same_as(b.partition()) {
        return (a.clone(), b.clone());
    }
    let p = a.partition().common_refinement(b.partition());
    (
        a.refine_to(&p).expect("union refines both"),
        b.refine_to(&p).expect("union refines both"),
    )
}

pub fn signal_refinement(a: &StepSignal, b: &StepSignal) -> (StepSignal, StepSignal) {
    if a.partition().same_as(b.partition()) {
        return (a.clone(), b.clone());
    }
    let p = a.partition().common_refinement(b.partition());
    (
        a.refine_to(&p).expect("union refines both"),
        b.refine_to(&p).expect("union refines both"),
    )
}

/// `‖a - b‖_{L2}` for step signals on arbitrary partitions.
pub fn signal_distance(a: &StepSignal, b: &StepSignal) -> f64 {
    let (a, b) = signal_refinement(a, b);
    a.partition()
        .measures()
        .iter()
        .zip(a.values().iter().zip(b.values().iter()))
        .map(|(m, (x, y))| m * (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Maximum over features of the per-feature `L2` distance.
pub fn feature_distance(a: &StepFeatureMap, b: &StepFeatureMap) -> Result<f64> {
    if a.width() != b.width() {
        return Err(Error::Dimension { expected: a.width(), got: b.width() });
    }
    Ok(a.features
        .iter()
        .zip(&b.features)
        .map(|(x, y)| signal_distance(x, y))
        .fold(0.0, f64::max))
}

/// Step signal on `p` with the given values (test and harness helper).
pub fn step_signal(p: Partition, values: Vec<num_complex::Complex64>) -> Result<StepSignal> {
    StepSignal::new(p, DVector::from_vec(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn induced_graphon_examples() {
        let g = Graph::from_gso(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let w = induce_graphon(&g);
        assert_eq!(w.values(), &DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]));
        assert_eq!(w.partition(), &Partition::uniform(2).unwrap());

        let z = induce_graphon(&Graph::from_gso(DMatrix::zeros(3, 3)).unwrap());
        assert_eq!(z.bound(), 0.0);

        let tri = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        let w = induce_graphon(&Graph::from_gwm(tri.clone()).unwrap());
        assert!((w.values() - tri).amax() < 1e-15);
    }

    #[test]
    fn induced_signal_scaling() {
        let s = induce_signal(&GraphSignal::from_real(&[1.0, 2.0]));
        assert!((s.l2_norm() - 2.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(induce_signal(&GraphSignal::zeros(4)).l2_norm(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rand_sig = || {
            GraphSignal::new((0..7).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        };
        let (x, y) = (rand_sig(), rand_sig());
        let (px, py) = (induce_signal(&x), induce_signal(&y));
        // quadrature over cells: each cell has length 1/7
        let quad: Complex64 = (0..7)
            .map(|i| {
                let u = (i as f64 + 0.5) / 7.0;
                px.eval(u) * py.eval(u).conj() / 7.0
            })
            .sum();
        let expect = x.inner(&y).unwrap() / 7.0;
        assert!((quad - expect).norm() < 1e-12);
        assert!((px.inner(&py).unwrap() - expect).norm() < 1e-12);
        assert!((px.l2_norm() - x.norm() / 7f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refinement_of_graphons() {
        let a = StepGraphon::uniform(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0])).unwrap();
        let b = StepGraphon::uniform(DMatrix::from_fn(3, 3, |i, j| (i + j) as f64)).unwrap();
        let (ra, rb) = common_refinement(&a, &b);
        assert_eq!(ra.partition().len(), 4);
        assert!(ra.partition().same_as(rb.partition()));

        let (sa, sb) = common_refinement(&a, &a);
        assert_eq!(sa, a);
        assert_eq!(sb, a);
    }

    #[test]
    fn nested_refinement_is_pointwise_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = StepGraphon::uniform(DMatrix::from_fn(2, 2, |i, j| (i * 2 + j) as f64)).unwrap();
        let b = StepGraphon::uniform(DMatrix::from_fn(4, 4, |i, j| (i.min(j)) as f64)).unwrap();
        let (ra, rb) = common_refinement(&a, &b);
        assert_eq!(ra.partition(), &Partition::uniform(4).unwrap());
        for _ in 0..100 {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            assert_eq!(ra.eval(u, v), a.eval(u, v));
            assert_eq!(rb.eval(u, v), b.eval(u, v));
        }
    }

    #[test]
    fn signal_distance_examples() {
        let one = step_signal(Partition::uniform(1).unwrap(), vec![c(1.0)]).unwrap();
        let ones = step_signal(Partition::uniform(2).unwrap(), vec![c(1.0), c(1.0)]).unwrap();
        assert_eq!(signal_distance(&one, &ones), 0.0);

        let a = step_signal(Partition::uniform(2).unwrap(), vec![c(1.0), c(0.0)]).unwrap();
        let b = step_signal(Partition::uniform(2).unwrap(), vec![c(0.0), c(1.0)]).unwrap();
        assert!((signal_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(signal_distance(&a, &a), 0.0);
    }
}
