use nalgebra::DMatrix;

use super::{asymmetry, symmetrize, GraphSignal, Permutation};
use crate::error::{Error, Result};

/// Asymmetry above this (relative to the largest entry) is logged before the
/// operator is symmetrized.
const ASYMMETRY_WARN: f64 = 1e-9;

/// An undirected weighted graph given by its graph shift operator (GSO) `Δ`.
///
/// The graph weight matrix is `A = n Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    gso: DMatrix<f64>,
}

impl Graph {
    /// Builds a graph from a square GSO, replacing it by `(Δ + Δ^T) / 2`.
    pub fn from_gso(gso: DMatrix<f64>) -> Result<Self> {
        if gso.nrows() != gso.ncols() {
            return Err(Error::Dimension { expected: gso.nrows(), got: gso.ncols() });
        }
        if gso.nrows() == 0 {
            return Err(Error::param("a graph needs at least one node"));
        }
        if gso.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("GSO contains non-finite entries"));
        }
        let scale = gso.amax().max(1.0);
        let skew = asymmetry(&gso);
        if skew > ASYMMETRY_WARN * scale {
            log::warn!("GSO asymmetric by {skew:e}; symmetrizing");
        }
        Ok(Self { gso: symmetrize(&gso) })
    }

    /// Builds a graph from its weight matrix `A`, i.e. `Δ = A / n`.
    pub fn from_gwm(gwm: DMatrix<f64>) -> Result<Self> {
        let n = gwm.nrows().max(1) as f64;
        Self::from_gso(gwm / n)
    }

    pub fn n(&self) -> usize {
        self.gso.nrows()
    }

    pub fn gso(&self) -> &DMatrix<f64> {
        &self.gso
    }

    /// The graph weight matrix `n Δ`.
    pub fn gwm(&self) -> DMatrix<f64> {
        &self.gso * self.n() as f64
    }

    /// `Δ x`.
    pub fn shift(&self, x: &GraphSignal) -> Result<GraphSignal> {
        if x.len() != self.n() {
            return Err(Error::Dimension { expected: self.n(), got: x.len() });
        }
        let re = self.gso.map(|v| num_complex::Complex64::new(v, 0.0));
        Ok(GraphSignal::from_vector(re * x.values()))
    }
}

/// Relabels the nodes of `g`: node `i` becomes node `p(i)`.
///
/// This is conjugation by the permutation matrix `P e_i = e_{p(i)}`, so the
/// output GSO satisfies `out[p(i), p(j)] = Δ[i, j]`. Signals are relabeled
/// with the same convention by [`Permutation::apply_signal`].
pub fn relabel(g: &Graph, p: &Permutation) -> Result<Graph> {
    let n = g.n();
    if p.len() != n {
        return Err(Error::Dimension { expected: n, got: p.len() });
    }
    let inv = p.inverse();
    let gso = DMatrix::from_fn(n, n, |i, j| g.gso[(inv.get(i), inv.get(j))]);
    Ok(Graph { gso })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphNorms {
    pub gso_opnorm: f64,
    pub gwm_opnorm: f64,
}

/// Spectral norms of the GSO and of the GWM.
pub fn graph_norms(g: &Graph) -> GraphNorms {
    let gso_opnorm = symmetric_spectral_norm(g.gso());
    GraphNorms { gso_opnorm, gwm_opnorm: gso_opnorm * g.n() as f64 }
}

pub(crate) fn symmetric_spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigenvalues().amax()
}
