//! Homomorphism numbers and densities, the cut norm, and permutation-aligned
//! cut distances.

mod cut;
mod hom;

pub use cut::{cut_distance_aligned, cut_norm_exact, cut_norm_heuristic, AlignMode, CutNorm, MAX_EXACT_CELLS};
pub use hom::{hom_density_graph, hom_density_mc, hom_density_step, hom_number, MonteCarloEstimate};

use crate::error::{Error, Result};

/// Largest motif handled by exact enumeration.
pub const MAX_MOTIF_NODES: usize = 6;

/// A simple graph `F` used as a motif.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Motif {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if nodes == 0 || nodes > MAX_MOTIF_NODES {
            return Err(Error::param(format!("motifs need 1..={MAX_MOTIF_NODES} nodes, got {nodes}")));
        }
        let mut seen = Vec::new();
        for &(a, b) in &edges {
            if a >= nodes || b >= nodes {
                return Err(Error::param(format!("edge {a}-{b} references a missing node")));
            }
            if a == b {
                return Err(Error::param(format!("loop at node {a}")));
            }
            let key = (a.min(b), a.max(b));
            if seen.contains(&key) {
                return Err(Error::param(format!("duplicate edge {a}-{b}")));
            }
            seen.push(key);
        }
        Ok(Self { nodes, edges })
    }

    pub fn complete(k: usize) -> Result<Self> {
        let edges = (0..k).flat_map(|a| ((a + 1)..k).map(move |b| (a, b))).collect();
        Self::new(k, edges)
    }

    pub fn path(k: usize) -> Result<Self> {
        Self::new(k, (1..k).map(|b| (b - 1, b)).collect())
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::param("cycles need at least 3 nodes"));
        }
        Self::new(k, (0..k).map(|a| (a, (a + 1) % k)).collect())
    }

    /// Parses `K<k>`, `P<k>`, `C<k>` or `edges:0-1,1-2,...` (node count
    /// inferred from the largest index).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: String| Error::Parse(format!("motif {s:?}: {why}"));
        if let Some(list) = s.strip_prefix("edges:") {
            let mut edges = Vec::new();
            for tok in list.split(',').filter(|t| !t.is_empty()) {
                let (a, b) = tok.split_once('-').ok_or_else(|| bad(format!("bad edge {tok:?}")))?;
                let a: usize = a.parse().map_err(|_| bad(format!("bad node {a:?}")))?;
                let b: usize = b.parse().map_err(|_| bad(format!("bad node {b:?}")))?;
                edges.push((a, b));
            }
            if edges.is_empty() {
                return Err(bad("no edges".into()));
            }
            let nodes = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap() + 1;
            return Self::new(nodes, edges);
        }
        let (kind, k) = s.split_at(1.min(s.len()));
        let k: usize = k.parse().map_err(|_| bad("unknown motif".into()))?;
        match kind {
            "K" => Self::complete(k),
            "P" => Self::path(k),
            "C" => Self::cycle(k),
            _ => Err(bad("unknown motif".into())),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}
