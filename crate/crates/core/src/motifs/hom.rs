use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Motif;
use crate::domain::{Graph, GraphonEvaluator, StepGraphon};
use crate::error::{Error, Result};

/// Maximum number of node maps enumerated exactly.
const MAP_BUDGET: f64 = 2e8;

/// `Σ_φ Π_{(u,v)∈E(F)} M[φ(u), φ(v)] Π_u w[φ(u)]` over all maps
/// `φ: V(F) -> {0..k}`.
///
/// Motif nodes are assigned in order; each edge's factor is multiplied in as
/// soon as both endpoints are placed, so partial products that vanish prune
/// the search.
fn weighted_hom_sum(f: &Motif, m: &DMatrix<f64>, w: &[f64]) -> Result<f64> {
    let k = w.len();
    let v = f.nodes();
    if (k as f64).powi(v as i32) > MAP_BUDGET {
        return Err(Error::Budget(format!(
            "{k}^{v} node maps; use the Monte-Carlo density instead"
        )));
    }
    // back_edges[u] = earlier endpoints adjacent to u
    let mut back_edges = vec![Vec::new(); v];
    for &(a, b) in f.edges() {
        let (lo, hi) = (a.min(b), a.max(b));
        back_edges[hi].push(lo);
    }
    let mut assign = vec![0usize; v];
    Ok(extend(0, 1.0, &mut assign, &back_edges, m, w))
}

fn extend(
    depth: usize,
    acc: f64,
    assign: &mut [usize],
    back_edges: &[Vec<usize>],
    m: &DMatrix<f64>,
    w: &[f64],
) -> f64 {
    if depth == assign.len() {
        return acc;
    }
    let mut total = 0.0;
    for c in 0..w.len() {
        let mut factor = acc * w[c];
        for &prev in &back_edges[depth] {
            factor *= m[(assign[prev], c)];
        }
        if factor == 0.0 {
            continue;
        }
        assign[depth] = c;
        total += extend(depth + 1, factor, assign, back_edges, m, w);
    }
    total
}

/// `hom(F, G) = Σ_φ Π_{(u,v)∈E(F)} A[φ(u), φ(v)]` with `A` the GWM.
pub fn hom_number(f: &Motif, g: &Graph) -> Result<f64> {
    weighted_hom_sum(f, &g.gwm(), &vec![1.0; g.n()])
}

/// `t(F, G) = |hom(F, G)| / n^{|V(F)|}`.
pub fn hom_density_graph(f: &Motif, g: &Graph) -> Result<f64> {
    Ok(hom_number(f, g)?.abs() / (g.n() as f64).powi(f.nodes() as i32))
}

/// `t(F, W)` for a step graphon: the exact (signed) integral, summed over
/// cell assignments with the cell measures as weights.
pub fn hom_density_step(f: &Motif, w: &StepGraphon) -> Result<f64> {
    weighted_hom_sum(f, w.values(), &w.partition().measures())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Monte-Carlo `t(F, W)` from i.i.d. uniform node placements.
pub fn hom_density_mc(
    f: &Motif,
    w: &GraphonEvaluator,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 100 {
        return Err(Error::param("Monte-Carlo density needs at least 100 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; f.nodes()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        for p in points.iter_mut() {
            *p = rng.random();
        }
        let val: f64 = f.edges().iter().map(|&(a, b)| w.eval(points[a], points[b])).product();
        sum += val;
        sum_sq += val * val;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate { estimate: mean, stderr: (var / n).sqrt() })
}
