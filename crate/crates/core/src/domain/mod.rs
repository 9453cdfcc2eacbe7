//! Graphs, signals, partitions of the unit interval, step graphons and node
//! permutations.
//!
//! Norm conventions: graph signals use the plain Euclidean inner product
//! `<x, y> = sum x_i conj(y_i)`, step signals use the `L2[0,1]` inner product,
//! and feature maps take the maximum of their per-feature norms.

mod graph;
mod graphon;
pub mod io;
mod partition;
mod permutation;
mod signal;

pub use graph::{graph_norms, relabel, Graph, GraphNorms};
pub(crate) use graph::symmetric_spectral_norm;
pub use graphon::{GraphonEvaluator, StepGraphon};
pub use partition::Partition;
pub use permutation::Permutation;
pub use signal::{FeatureMap, GraphSignal, StepFeatureMap, StepSignal};

/// Largest absolute entry of `m - m^T`.
pub(crate) fn asymmetry(m: &nalgebra::DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
