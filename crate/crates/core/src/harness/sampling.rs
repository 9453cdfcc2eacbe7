use std::fmt;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::GraphonFamily;
use crate::domain::{Graph, GraphSignal};
use crate::error::{Error, Result};

/// How node positions in `[0,1]` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Cell midpoints `(i + 1/2) / n`.
    Grid,
    /// Uniform i.i.d. positions, sorted ascending.
    Iid,
}

impl Sampling {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Self::Grid),
            "iid" => Ok(Self::Iid),
            _ => Err(Error::Parse(format!("unknown sampling mode {s:?}"))),
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Grid => "grid",
            Self::Iid => "iid",
        })
    }
}

/// `hash(master, experiment, n, trial)` folded to 64 bits.
pub fn derive_seed(master: u64, experiment: &str, n: usize, trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((experiment.len() as u64).to_le_bytes());
    h.update(experiment.as_bytes());
    h.update((n as u64).to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn node_positions(n: usize, mode: Sampling, seed: u64) -> Vec<f64> {
    match mode {
        Sampling::Grid => (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
        Sampling::Iid => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            u.sort_by(f64::total_cmp);
            u
        }
    }
}

/// A sampled graph with the node positions it was built from.
#[derive(Debug, Clone)]
pub struct GraphSample {
    pub graph: Graph,
    pub nodes: Vec<f64>,
    pub mode: Sampling,
    pub seed: u64,
}

/// `A_ij = W(u_i, u_j)`, `Δ = A / n`.
pub fn sample_graph(w: &GraphonFamily, n: usize, mode: Sampling, seed: u64) -> Result<GraphSample> {
    if n < 2 {
        return Err(Error::param(format!("need at least 2 nodes, got {n}")));
    }
    let nodes = node_positions(n, mode, seed);
    let gwm = nalgebra::DMatrix::from_fn(n, n, |i, j| w.eval(nodes[i], nodes[j]));
    Ok(GraphSample { graph: Graph::from_gwm(gwm)?, nodes, mode, seed })
}

/// Named signals on `[0,1]`, all bounded by 1 in modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFn {
    One,
    /// `f(u) = u`.
    Linear,
    /// `cos(2πu)`.
    Cos,
    /// `sin(2πu)`.
    Sin,
    /// `e^{2πiu}`.
    Wave,
}

impl SignalFn {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Self::One),
            "u" => Ok(Self::Linear),
            "cos" => Ok(Self::Cos),
            "sin" => Ok(Self::Sin),
            "wave" => Ok(Self::Wave),
            _ => Err(Error::Parse(format!("unknown signal {s:?}"))),
        }
    }

    pub fn eval(self, u: f64) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self {
            Self::One => C::new(1.0, 0.0),
            Self::Linear => C::new(u, 0.0),
            Self::Cos => C::new((2.0 * PI * u).cos(), 0.0),
            Self::Sin => C::new((2.0 * PI * u).sin(), 0.0),
            Self::Wave => C::from_polar(1.0, 2.0 * PI * u),
        }
    }
}

impl fmt::Display for SignalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "one",
            Self::Linear => "u",
            Self::Cos => "cos",
            Self::Sin => "sin",
            Self::Wave => "wave",
        })
    }
}

/// `x_i = f(u_i)` at the nodes of `sample`; `seed` must be the one the
/// sample was drawn with.
pub fn sample_signal(f: SignalFn, sample: &GraphSample, seed: u64) -> Result<GraphSignal> {
    if seed != sample.seed {
        return Err(Error::param(format!(
            "signal seed {seed} does not match the graph sample seed {}",
            sample.seed
        )));
    }
    Ok(GraphSignal::new(sample.nodes.iter().map(|&u| f.eval(u)).collect()))
}
