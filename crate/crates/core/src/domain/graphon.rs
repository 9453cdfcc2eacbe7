use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{asymmetry, signal::check_refines, symmetrize, Partition, Permutation};
use crate::error::{Error, Result};

/// A symmetric kernel that is constant on the rectangles `P_i x P_j` of a
/// partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    partition: Partition,
    values: DMatrix<f64>,
}

impl StepGraphon {
    pub fn new(partition: Partition, values: DMatrix<f64>) -> Result<Self> {
        let k = partition.len();
        if values.nrows() != k || values.ncols() != k {
            return Err(Error::Dimension { expected: k, got: values.nrows().max(values.ncols()) });
        }
        if asymmetry(&values) > 1e-9 * values.amax().max(1.0) {
            log::warn!("step graphon values asymmetric; symmetrizing");
        }
        Ok(Self { partition, values: symmetrize(&values) })
    }

    /// A step graphon on the uniform partition `P_k`.
    pub fn uniform(values: DMatrix<f64>) -> Result<Self> {
        Self::new(Partition::uniform(values.nrows())?, values)
    }

    pub fn constant(c: f64) -> Self {
        Self { partition: Partition::uniform(1).unwrap(), values: DMatrix::from_element(1, 1, c) }
    }

    pub fn zero(partition: Partition) -> Self {
        let k = partition.len();
        Self { partition, values: DMatrix::zeros(k, k) }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// The smallest `Γ` with `|W| <= Γ` everywhere.
    pub fn bound(&self) -> f64 {
        self.values.amax()
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.values[(self.partition.cell_of(u), self.partition.cell_of(v))]
    }

    /// Re-expresses the kernel on a finer partition by duplicating cells.
    pub fn refine_to(&self, fine: &Partition) -> Result<StepGraphon> {
        check_refines(fine, &self.partition)?;
        let parents = fine.parent_cells(&self.partition);
        let k = parents.len();
        let values = DMatrix::from_fn(k, k, |i, j| self.values[(parents[i], parents[j])]);
        Ok(StepGraphon { partition: fine.clone(), values })
    }

    /// Pointwise difference; both kernels must share a partition.
    pub fn sub(&self, other: &StepGraphon) -> Result<StepGraphon> {
        if !self.partition.same_as(&other.partition) {
            return Err(Error::PartitionMismatch);
        }
        Ok(StepGraphon { partition: self.partition.clone(), values: &self.values - &other.values })
    }

    pub fn scale(&self, c: f64) -> StepGraphon {
        StepGraphon { partition: self.partition.clone(), values: &self.values * c }
    }

    /// Moves cell `i` to position `p(i)`; only meaningful on uniform
    /// partitions, where it is a measure-preserving relabeling of `[0,1]`.
    pub fn relabel(&self, p: &Permutation) -> Result<StepGraphon> {
        let k = self.partition.len();
        if p.len() != k {
            return Err(Error::Dimension { expected: k, got: p.len() });
        }
        let inv = p.inverse();
        let values = DMatrix::from_fn(k, k, |i, j| self.values[(inv.get(i), inv.get(j))]);
        Ok(StepGraphon { partition: self.partition.clone(), values })
    }
}

type KernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A graphon given as a function handle on `[0,1]^2` with a declared bound.
#[derive(Clone)]
pub struct GraphonEvaluator {
    eval: Arc<KernelFn>,
    bound: f64,
}

impl fmt::Debug for GraphonEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphonEvaluator").field("bound", &self.bound).finish_non_exhaustive()
    }
}

impl GraphonEvaluator {
    pub fn new(bound: f64, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), bound }
    }

    pub fn from_step(w: StepGraphon) -> Self {
        let bound = w.bound();
        Self::new(bound, move |u, v| w.eval(u, v))
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u, v)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Largest `|W(u,v) - W(v,u)|` and largest `|W(u,v)|` over random probes.
    pub fn probe(&self, probes: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut skew, mut peak) = (0.0_f64, 0.0_f64);
        for _ in 0..probes {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            let (a, b) = (self.eval(u, v), self.eval(v, u));
            skew = skew.max((a - b).abs());
            peak = peak.max(a.abs());
        }
        (skew, peak)
    }

    /// Checks symmetry to `1e-12` and the declared bound on random probes.
    pub fn validate(&self, probes: usize, seed: u64) -> Result<()> {
        let (skew, peak) = self.probe(probes, seed);
        if skew > 1e-12 {
            return Err(Error::param(format!("graphon not symmetric (deviation {skew:e})")));
        }
        if peak > self.bound + 1e-12 {
            return Err(Error::param(format!(
                "graphon exceeds its declared bound {} (found {peak})",
                self.bound
            )));
        }
        Ok(())
    }
}
