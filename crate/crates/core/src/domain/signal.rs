use nalgebra::DVector;
use num_complex::Complex64;

use super::Partition;
use crate::error::{Error, Result};

/// A complex signal on the nodes of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    values: DVector<Complex64>,
}

impl GraphSignal {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values: DVector::from_vec(values) }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_vector(values: DVector<Complex64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: DVector::zeros(n) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &DVector<Complex64> {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum x_i conj(y_i)`.
    pub fn inner(&self, other: &GraphSignal) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::Dimension { expected: self.len(), got: other.len() });
        }
        Ok(self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b.conj()).sum())
    }
}

/// A graph feature map: one signal per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub features: Vec<GraphSignal>,
}

impl FeatureMap {
    pub fn new(features: Vec<GraphSignal>) -> Result<Self> {
        if let Some(first) = features.first() {
            if let Some(bad) = features.iter().find(|f| f.len() != first.len()) {
                return Err(Error::Dimension { expected: first.len(), got: bad.len() });
            }
        }
        Ok(Self { features })
    }

    pub fn width(&self) -> usize {
        self.features.len()
    }

    /// Node count, zero for an empty map.
    pub fn nodes(&self) -> usize {
        self.features.first().map_or(0, GraphSignal::len)
    }

    /// Maximum over the per-feature norms.
    pub fn norm(&self) -> f64 {
        self.features.iter().map(GraphSignal::norm).fold(0.0, f64::max)
    }
}

/// A complex signal on `[0,1]` that is constant on the cells of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSignal {
    partition: Partition,
    values: DVector<Complex64>,
}

impl StepSignal {
    pub fn new(partition: Partition, values: DVector<Complex64>) -> Result<Self> {
        if values.len() != partition.len() {
            return Err(Error::Dimension { expected: partition.len(), got: values.len() });
        }
        Ok(Self { partition, values })
    }

    pub fn zeros(partition: Partition) -> Self {
        let k = partition.len();
        Self { partition, values: DVector::zeros(k) }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &DVector<Complex64> {
        &self.values
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        self.values[self.partition.cell_of(u)]
    }

    /// `sqrt(sum mu_i |v_i|^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.partition
            .measures()
            .iter()
            .zip(self.values.iter())
            .map(|(m, v)| m * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `L2` inner product; both signals must share a partition.
    pub fn inner(&self, other: &StepSignal) -> Result<Complex64> {
        if !self.partition.same_as(&other.partition) {
            return Err(Error::PartitionMismatch);
        }
        Ok(self
            .partition
            .measures()
            .iter()
            .zip(self.values.iter().zip(other.values.iter()))
            .map(|(m, (a, b))| a * b.conj() * *m)
            .sum())
    }

    /// Re-expresses the signal on a finer partition.
    pub fn refine_to(&self, fine: &Partition) -> Result<StepSignal> {
        check_refines(fine, &self.partition)?;
        let parents = fine.parent_cells(&self.partition);
        let values = DVector::from_iterator(parents.len(), parents.iter().map(|&p| self.values[p]));
        Ok(StepSignal { partition: fine.clone(), values })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> StepSignal {
        StepSignal { partition: self.partition.clone(), values: self.values.map(f) }
    }
}

pub(crate) fn check_refines(fine: &Partition, coarse: &Partition) -> Result<()> {
    let fb = fine.breakpoints();
    for &b in coarse.breakpoints() {
        let i = fb.partition_point(|&x| x < b - super::partition::MERGE_TOL);
        if i >= fb.len() || (fb[i] - b).abs() > super::partition::MERGE_TOL {
            return Err(Error::PartitionMismatch);
        }
    }
    Ok(())
}

/// A graphon feature map made of step signals.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFeatureMap {
    pub features: Vec<StepSignal>,
}

impl StepFeatureMap {
    pub fn width(&self) -> usize {
        self.features.len()
    }

    /// Maximum over the per-feature `L2` norms.
    pub fn norm(&self) -> f64 {
        self.features.iter().map(StepSignal::l2_norm).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_signal_norms() {
        let x = GraphSignal::new(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]);
        assert_eq!(x.norm(), 5.0);
        let y = GraphSignal::new(vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
        // 3 * conj(i) + 4i * 1
        assert_eq!(x.inner(&y).unwrap(), Complex64::new(0.0, 1.0));
        let fm = FeatureMap::new(vec![x, y]).unwrap();
        assert_eq!(fm.norm(), 5.0);
    }

    #[test]
    fn step_signal_norm_uses_measures() {
        let p = Partition::from_breakpoints(vec![0.0, 0.25, 1.0]).unwrap();
        let s = StepSignal::new(p, DVector::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)])).unwrap();
        assert!((s.l2_norm() - (0.25_f64 * 4.0 + 0.75).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn refine_rejects_non_refinement() {
        let s = StepSignal::zeros(Partition::uniform(2).unwrap());
        assert!(s.refine_to(&Partition::uniform(3).unwrap()).is_err());
        assert!(s.refine_to(&Partition::uniform(4).unwrap()).is_ok());
    }
}
