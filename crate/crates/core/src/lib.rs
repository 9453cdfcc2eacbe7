//! Transferability analysis of spectral graph filters and spectral graph CNNs
//! through graphons.
//!
//! Graphs are embedded into the space of graphons by their induced step
//! kernels and step signals. Filters act by functional calculus, on the graph
//! shift operator as well as on the integral operator of a step kernel, so the
//! discrete and continuous pictures can be compared with the same norms.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`domain`] | graphs, signals, partitions, step graphons, permutations, file format |
//! | [`induction`] | induced graphons and signals, partition refinement |
//! | [`spectral`] | eigendecomposition, filters on GSOs and step operators, operator/Schatten norms |
//! | [`motifs`] | homomorphism densities, cut norm, aligned cut distance |
//! | [`filters`] | filter specs, periodic extension, Fourier coefficients, stability constants |
//! | [`scnn`] | spectral CNN forward passes on graphs and step graphons, transfer constant |
//! | [`unbounded`] | Fourier eigen-models, Paley–Wiener bands, finite-difference graphs |
//! | [`harness`] | graphon sampling, seeded experiments, verification suite |

pub mod domain;
pub mod error;
pub mod filters;
pub mod harness;
pub mod induction;
pub mod motifs;
pub mod scnn;
pub mod spectral;
pub mod unbounded;

pub use domain::{
    FeatureMap, Graph, GraphSignal, GraphonEvaluator, Partition, Permutation, StepFeatureMap,
    StepGraphon, StepSignal,
};
pub use error::{Error, Result};
pub use filters::FilterSpec;
pub use spectral::{EigenDecomposition, StepOperator};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
