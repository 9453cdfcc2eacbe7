use crate::error::{Error, Result};

/// A bijection of `{0, .., n-1}` stored as an index array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::param(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn get(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Self { perm: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension { expected: self.len(), got: other.len() });
        }
        Ok(Self { perm: other.perm.iter().map(|&i| self.perm[i]).collect() })
    }

    /// Moves entry `i` of `x` to position `p(i)`.
    pub fn apply_signal<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: x.len() });
        }
        let inv = self.inverse();
        Ok((0..x.len()).map(|i| x[inv.perm[i]].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn inverse_round_trips(seed in 0u64..1000, n in 1usize..20) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(&mut rng);
            let p = Permutation::new(v).unwrap();
            prop_assert_eq!(p.compose(&p.inverse()).unwrap(), Permutation::identity(n));
            let x: Vec<usize> = (0..n).map(|i| i * 10).collect();
            let y = p.apply_signal(&x).unwrap();
            prop_assert_eq!(p.inverse().apply_signal(&y).unwrap(), x);
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
    }
}
