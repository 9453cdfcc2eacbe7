use crate::error::{Error, Result};

/// Breakpoints closer than this are merged when partitions are combined.
pub(crate) const MERGE_TOL: f64 = 1e-14;

/// A partition of `[0, 1]` into consecutive intervals.
///
/// Stored by its breakpoints `0 = b_0 < b_1 < ... < b_k = 1`; cell `i`
/// is `[b_i, b_{i+1})` with measure `b_{i+1} - b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    /// The standard partition `P_n` into `n` cells of length `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("uniform partition needs at least one cell"));
        }
        let mut breakpoints: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        breakpoints[n] = 1.0;
        Ok(Self { breakpoints })
    }

    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::param("a partition needs at least two breakpoints"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::param("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("breakpoints must be strictly increasing"));
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn measures(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    /// Index of the cell containing `u`; `u = 1` belongs to the last cell.
    pub fn cell_of(&self, u: f64) -> usize {
        let k = self.len();
        if u >= 1.0 {
            return k - 1;
        }
        if u <= 0.0 {
            return 0;
        }
        // first breakpoint strictly greater than u, minus one
        let idx = self.breakpoints.partition_point(|&b| b <= u);
        idx.saturating_sub(1).min(k - 1)
    }

    /// True when both partitions have the same breakpoints up to the merge
    /// tolerance.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.breakpoints.len() == other.breakpoints.len()
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOL)
    }

    /// The partition generated by the union of both breakpoint sets.
    pub fn common_refinement(&self, other: &Partition) -> Partition {
        let mut merged: Vec<f64> = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        while i < a.len() || j < b.len() {
            let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            match merged.last() {
                Some(&last) if next - last <= MERGE_TOL => {}
                _ => merged.push(next),
            }
        }
        // the merge may have kept a near-1 point instead of 1 itself
        let last = merged.len() - 1;
        merged[last] = 1.0;
        Partition { breakpoints: merged }
    }

    /// For every cell of `self` (which must refine `coarse`), the index of the
    /// coarse cell containing it.
    pub(crate) fn parent_cells(&self, coarse: &Partition) -> Vec<usize> {
        self.breakpoints
            .windows(2)
            .map(|w| coarse.cell_of(0.5 * (w[0] + w[1])))
            .collect()
    }

    /// Midpoints of the cells.
    pub fn midpoints(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_measures_sum_to_one() {
        for n in [1, 3, 7, 100] {
            let p = Partition::uniform(n).unwrap();
            let mu = p.measures();
            assert_eq!(mu.len(), n);
            assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(mu.iter().all(|m| (m - 1.0 / n as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn refinement_of_p2_and_p3() {
        let p2 = Partition::uniform(2).unwrap();
        let p3 = Partition::uniform(3).unwrap();
        let r = p2.common_refinement(&p3);
        let expect = [0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0];
        assert_eq!(r.len(), 4);
        for (a, b) in r.breakpoints().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn refinement_with_itself_is_identity() {
        let p = Partition::from_breakpoints(vec![0.0, 0.1, 0.7, 1.0]).unwrap();
        assert_eq!(p.common_refinement(&p), p);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(Partition::from_breakpoints(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::from_breakpoints(vec![0.1, 1.0]).is_err());
        assert!(Partition::uniform(0).is_err());
    }

    #[test]
    fn cell_lookup() {
        let p = Partition::uniform(4).unwrap();
        assert_eq!(p.cell_of(0.0), 0);
        assert_eq!(p.cell_of(0.25), 1);
        assert_eq!(p.cell_of(0.9), 3);
        assert_eq!(p.cell_of(1.0), 3);
    }
}
