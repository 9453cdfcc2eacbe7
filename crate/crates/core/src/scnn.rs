//! Spectral convolutional networks on graphs and on step graphons, and the
//! end-to-end transfer constant.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{FeatureMap, Graph, GraphSignal, StepFeatureMap, StepSignal};
use crate::error::{Error, Result};
use crate::filters::{stability_constant, FilterKind, FilterSpec, Regularity, DEFAULT_TRUNCATION};
use crate::induction::{feature_distance, induce_feature_map};
use crate::spectral::{EigenDecomposition, StepOperator};

pub const SCHEMA: &str = "scnn/1";

/// Slope of [`Activation::LeakyRelu`] on the negative half-line.
pub const LEAKY_SLOPE: f64 = 0.1;

/// Grid used to check `‖h‖_∞ <= 1` on `[-Γ, Γ]`.
const SUP_GRID: usize = 4001;

/// A pointwise activation; complex values are activated part by part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
    LeakyRelu,
}

impl Activation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Self::Relu),
            "tanh" => Ok(Self::Tanh),
            "identity" | "id" => Ok(Self::Identity),
            "leaky-relu" => Ok(Self::LeakyRelu),
            _ => Err(Error::Parse(format!("unknown activation {s:?}"))),
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Relu => x.max(0.0),
            Self::Tanh => x.tanh(),
            Self::Identity => x,
            Self::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
        }
    }

    pub fn apply(self, z: Complex64) -> Complex64 {
        Complex64::new(self.eval(z.re), self.eval(z.im))
    }

    /// Declared Lipschitz constant.
    pub fn lipschitz(self) -> f64 {
        1.0
    }

    pub fn is_contractive(self) -> bool {
        self.lipschitz() <= 1.0
    }

    /// Largest `|ρ(x) − ρ(y)| / |x − y|` over random pairs in `[-scale, scale]`.
    pub fn probe_lipschitz(self, probes: usize, scale: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..probes)
            .filter_map(|_| {
                let x = rng.random_range(-scale..scale);
                let y = rng.random_range(-scale..scale);
                (x != y).then(|| (self.eval(x) - self.eval(y)).abs() / (x - y).abs())
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Relu => "relu",
            Self::Tanh => "tanh",
            Self::Identity => "identity",
            Self::LeakyRelu => "leaky-relu",
        })
    }
}

/// Layer `l` maps `F_{l-1}` features to `F_l` through
/// `x_l^j = ρ(Σ_k M_l[j,k] h_l^{jk}(Δ) x_{l-1}^k)`.
#[derive(Debug, Clone)]
pub struct ScnnSpec {
    widths: Vec<usize>,
    filters: Vec<Vec<Vec<FilterSpec>>>,
    weights: Vec<DMatrix<f64>>,
    activation: Activation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema: String,
    layers: usize,
    widths: Vec<usize>,
    activation: String,
    filters: Vec<Vec<Vec<String>>>,
    weights: Vec<RawWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain_bound: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawWeights {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl ScnnSpec {
    pub fn new(
        widths: Vec<usize>,
        filters: Vec<Vec<Vec<FilterSpec>>>,
        weights: Vec<DMatrix<f64>>,
        activation: Activation,
    ) -> Result<Self> {
        let layers = widths.len().checked_sub(1).filter(|&l| l > 0);
        let layers = layers.ok_or_else(|| Error::param("need at least one layer"))?;
        if widths.contains(&0) {
            return Err(Error::param("feature widths must be positive"));
        }
        if filters.len() != layers || weights.len() != layers {
            return Err(Error::param(format!(
                "{layers} layers but {} filter banks and {} weight matrices",
                filters.len(),
                weights.len()
            )));
        }
        for l in 0..layers {
            let (out, inp) = (widths[l + 1], widths[l]);
            if filters[l].len() != out || filters[l].iter().any(|row| row.len() != inp) {
                return Err(Error::param(format!("layer {}: filters must be {out}x{inp}", l + 1)));
            }
            if weights[l].shape() != (out, inp) {
                return Err(Error::param(format!(
                    "layer {}: weights are {:?}, expected {out}x{inp}",
                    l + 1,
                    weights[l].shape()
                )));
            }
        }
        Ok(Self { widths, filters, weights, activation })
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Filter `h_l^{jk}` with `l` counted from 1.
    pub fn filter(&self, l: usize, j: usize, k: usize) -> &FilterSpec {
        &self.filters[l - 1][j][k]
    }

    /// `M_l` with `l` counted from 1.
    pub fn weights(&self, l: usize) -> &DMatrix<f64> {
        &self.weights[l - 1]
    }

    fn all_filters(&self) -> impl Iterator<Item = (usize, usize, usize, &FilterSpec)> {
        self.filters.iter().enumerate().flat_map(|(l, bank)| {
            bank.iter().enumerate().flat_map(move |(j, row)| {
                row.iter().enumerate().map(move |(k, h)| (l + 1, j, k, h))
            })
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        if raw.schema != SCHEMA {
            return Err(Error::Config(format!("schema {:?}, expected {SCHEMA:?}", raw.schema)));
        }
        if raw.widths.len() != raw.layers + 1 {
            return Err(Error::Config(format!(
                "{} layers need {} widths, got {}",
                raw.layers,
                raw.layers + 1,
                raw.widths.len()
            )));
        }
        if raw.weights.len() != raw.layers {
            return Err(Error::Config(format!("expected {} weight matrices", raw.layers)));
        }
        let filters = raw
            .filters
            .iter()
            .map(|bank| {
                bank.iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| {
                                let h = FilterSpec::parse(s)?;
                                Ok(match raw.domain_bound {
                                    Some(g) => h.with_domain_bound(g),
                                    None => h,
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = raw
            .weights
            .into_iter()
            .enumerate()
            .map(|(l, w)| {
                let (rows, cols) = (raw.widths[l + 1], raw.widths[l]);
                let flat: Vec<f64> = match w {
                    RawWeights::Rows(r) => {
                        if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                            return Err(Error::Config(format!("layer {}: weights must be {rows}x{cols}", l + 1)));
                        }
                        r.into_iter().flatten().collect()
                    }
                    RawWeights::Flat(f) => f,
                };
                if flat.len() != rows * cols {
                    return Err(Error::Config(format!(
                        "layer {}: {} weights for a {rows}x{cols} matrix",
                        l + 1,
                        flat.len()
                    )));
                }
                Ok(DMatrix::from_row_slice(rows, cols, &flat))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.widths, filters, weights, Activation::parse(&raw.activation)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let bounds: Vec<f64> = self.all_filters().map(|f| f.3.domain_bound()).collect();
        let domain_bound = bounds.first().copied().filter(|b| bounds.iter().all(|x| x == b));
        let raw = RawSpec {
            schema: SCHEMA.into(),
            layers: self.layers(),
            widths: self.widths.clone(),
            activation: self.activation.to_string(),
            filters: self
                .filters
                .iter()
                .map(|bank| bank.iter().map(|row| row.iter().map(|h| h.label().to_string()).collect()).collect())
                .collect(),
            weights: self
                .weights
                .iter()
                .map(|m| RawWeights::Rows(m.row_iter().map(|r| r.iter().copied().collect()).collect()))
                .collect(),
            domain_bound,
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }
}

/// `Q v` (or `Qᵀ v`) for a real `Q` and complex `v`.
fn real_mul(q: &DMatrix<f64>, v: &DVector<Complex64>, transpose: bool) -> DVector<Complex64> {
    let re = v.map(|z| z.re);
    let im = v.map(|z| z.im);
    let (re, im) = if transpose { (q.tr_mul(&re), q.tr_mul(&im)) } else { (q * re, q * im) };
    DVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]))
}

/// Pre- and post-activation vectors of every layer.
type Trace = Vec<(Vec<DVector<Complex64>>, Vec<DVector<Complex64>>)>;

/// Runs the recursion in the eigenbasis of a symmetric `S` acting on
/// coordinates `v_i = s_i z_i`; the activation sees the natural values `z`.
/// `input` and the returned trace are in natural values.
fn run(
    spec: &ScnnSpec,
    eig: &EigenDecomposition,
    scale: &[f64],
    input: Vec<DVector<Complex64>>,
) -> Result<Trace> {
    let q = &eig.eigenvectors;
    let mut x = input;
    let mut trace = Vec::with_capacity(spec.layers());
    for l in 1..=spec.layers() {
        let coeffs: Vec<DVector<Complex64>> = x
            .iter()
            .map(|v| real_mul(q, &DVector::from_fn(v.len(), |i, _| v[i] * scale[i]), true))
            .collect();
        let m = spec.weights(l);
        let mut pre = Vec::with_capacity(m.nrows());
        for j in 0..m.nrows() {
            let mut acc = DVector::<Complex64>::zeros(eig.dim());
            for (k, c) in coeffs.iter().enumerate() {
                let w = m[(j, k)];
                if w == 0.0 {
                    continue;
                }
                let hv = eig.filter_values(spec.filter(l, j, k))?;
                for i in 0..acc.len() {
                    acc[i] += c[i] * (w * hv[i]);
                }
            }
            let v = real_mul(q, &acc, false);
            pre.push(DVector::from_fn(v.len(), |i, _| v[i] / scale[i]));
        }
        let post: Vec<DVector<Complex64>> = pre.iter().map(|v| v.map(|z| spec.activation.apply(z))).collect();
        x = post.clone();
        trace.push((pre, post));
    }
    Ok(trace)
}

/// Pre-activations `x̃_l` and outputs `x_l` of every layer on a graph.
#[derive(Debug, Clone)]
pub struct GraphTrace {
    pub pre: Vec<FeatureMap>,
    pub post: Vec<FeatureMap>,
}

fn check_width(spec: &ScnnSpec, width: usize) -> Result<()> {
    if width != spec.widths[0] {
        return Err(Error::Dimension { expected: spec.widths[0], got: width });
    }
    Ok(())
}

pub fn scnn_forward_graph_trace(spec: &ScnnSpec, g: &Graph, x: &FeatureMap) -> Result<GraphTrace> {
    check_width(spec, x.width())?;
    if x.nodes() != g.n() {
        return Err(Error::Dimension { expected: g.n(), got: x.nodes() });
    }
    let eig = EigenDecomposition::new(g.gso());
    let input = x.features.iter().map(|f| f.values().clone()).collect();
    let to_map = |vs: Vec<DVector<Complex64>>| {
        FeatureMap::new(vs.into_iter().map(GraphSignal::from_vector).collect())
    };
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for (a, b) in run(spec, &eig, &vec![1.0; g.n()], input)? {
        pre.push(to_map(a)?);
        post.push(to_map(b)?);
    }
    Ok(GraphTrace { pre, post })
}

/// The network output `φ_Δ(x)`.
pub fn scnn_forward_graph(spec: &ScnnSpec, g: &Graph, x: &FeatureMap) -> Result<FeatureMap> {
    Ok(scnn_forward_graph_trace(spec, g, x)?.post.pop().expect("at least one layer"))
}

/// The network on the graphon side, `φ_W(y)`, with each filter acting as
/// `h(T_W)`. Operator and features are first refined to a common partition.
pub fn scnn_forward_graphon(spec: &ScnnSpec, t: &StepOperator, y: &StepFeatureMap) -> Result<StepFeatureMap> {
    check_width(spec, y.width())?;
    let p = y
        .features
        .iter()
        .fold(t.partition().clone(), |p, f| p.common_refinement(f.partition()));
    let op = StepOperator::new(t.kernel().refine_to(&p)?);
    let ys: Vec<StepSignal> = y.features.iter().map(|f| f.refine_to(&p)).collect::<Result<_>>()?;
    let sym = op.symmetrized();
    let eig = EigenDecomposition::new(&sym.matrix);
    let input = ys
        .iter()
        .map(|f| DVector::from_fn(sym.kept.len(), |r, _| f.values()[sym.kept[r]]))
        .collect();
    let trace = run(spec, &eig, &sym.sqrt_measure, input)?;

    // cells below the measure cutoff lie in the kernel of T and see h(0)
    let mut out: Vec<DVector<Complex64>> = ys.iter().map(|f| f.values().clone()).collect();
    for (l, (_, post)) in trace.into_iter().enumerate() {
        let layer = l + 1;
        let m = spec.weights(layer);
        out = (0..m.nrows())
            .map(|j| {
                let mut full = DVector::<Complex64>::zeros(p.len());
                for (k, prev) in out.iter().enumerate() {
                    let h0 = m[(j, k)] * spec.filter(layer, j, k).eval(0.0);
                    full += prev * Complex64::new(h0, 0.0);
                }
                let mut full = full.map(|z| spec.activation.apply(z));
                for (r, &i) in sym.kept.iter().enumerate() {
                    full[i] = post[j][r];
                }
                full
            })
            .collect();
    }
    Ok(StepFeatureMap {
        features: out.into_iter().map(|v| StepSignal::new(p.clone(), v)).collect::<Result<_>>()?,
    })
}

/// `‖ψ_{φ_{Δ1}(x1)} − ψ_{φ_{Δ2}(x2)}‖`, maximized over output features.
pub fn scnn_repercussion(spec: &ScnnSpec, g1: &Graph, x1: &FeatureMap, g2: &Graph, x2: &FeatureMap) -> Result<f64> {
    let y1 = induce_feature_map(&scnn_forward_graph(spec, g1, x1)?);
    let y2 = induce_feature_map(&scnn_forward_graph(spec, g2, x2)?);
    feature_distance(&y1, &y2)
}

/// `C_L = M^L (1 + L C)`.
pub fn transfer_constant_formula(m: f64, layers: usize, c: f64) -> f64 {
    m.powi(layers as i32) * (1.0 + layers as f64 * c)
}

/// The transfer constant with its ingredients.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TransferConstant {
    pub c_l: f64,
    /// Largest max-row-sum norm of the weight matrices.
    pub m: f64,
    /// Largest per-filter stability constant.
    pub c: f64,
    pub layers: usize,
}

fn is_zero_filter(h: &FilterSpec) -> bool {
    match h.kind() {
        FilterKind::Polynomial(c) => c.iter().all(|&x| x == 0.0),
        FilterKind::Rational { num, .. } => num.iter().all(|&x| x == 0.0),
        FilterKind::Tabulated { .. } => false,
    }
}

/// Reasons a filter fails the transfer-constant preconditions.
pub fn gate_failures(h: &FilterSpec) -> Vec<String> {
    let mut why = Vec::new();
    if !h.zero_at_zero() {
        why.push(format!("h(0) = {}", h.eval(0.0)));
    }
    if h.regularity() < Regularity::SmoothLipschitzDerivative {
        why.push("needs a Lipschitz derivative".into());
    }
    let gamma = h.domain_bound();
    let sup = (0..SUP_GRID)
        .map(|i| h.eval(-gamma + 2.0 * gamma * i as f64 / (SUP_GRID - 1) as f64).abs())
        .fold(0.0, f64::max);
    if !(sup <= 1.0 + 1e-12) {
        why.push(format!("sup |h| on [-{gamma}, {gamma}] is {sup}"));
    }
    why
}

/// `C_L` for a spec whose filters pass the regularity and sup-norm gate and
/// whose activation is contractive.
pub fn transfer_constant(spec: &ScnnSpec) -> Result<TransferConstant> {
    transfer_constant_with(spec, DEFAULT_TRUNCATION)
}

pub fn transfer_constant_with(spec: &ScnnSpec, truncation: usize) -> Result<TransferConstant> {
    let mut failures = Vec::new();
    if !spec.activation.is_contractive() {
        failures.push(format!("activation {} is not contractive", spec.activation));
    }
    for (l, j, k, h) in spec.all_filters() {
        for why in gate_failures(h) {
            failures.push(format!("layer {l} filter ({j},{k}) {}: {why}", h.label()));
        }
    }
    if !failures.is_empty() {
        return Err(Error::Gate(failures.join("; ")));
    }
    let mut c: f64 = 0.0;
    for (_, _, _, h) in spec.all_filters() {
        if !is_zero_filter(h) {
            c = c.max(stability_constant(h, truncation)?.lemma_constant);
        }
    }
    let m = spec
        .weights
        .iter()
        .map(|w| w.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let layers = spec.layers();
    Ok(TransferConstant { c_l: transfer_constant_formula(m, layers, c), m, c, layers })
}

/// Fails unless every feature has induced norm `‖x^k‖ / √n <= 1`.
pub fn check_normalized(x: &FeatureMap) -> Result<()> {
    let n = x.nodes() as f64;
    let worst = x.features.iter().map(|f| f.norm() / n.sqrt()).fold(0.0, f64::max);
    if worst > 1.0 + 1e-12 {
        return Err(Error::Gate(format!("feature map is not normalized: induced norm {worst}")));
    }
    Ok(())
}

/// Fails unless every feature has `L2` norm at most 1.
pub fn check_normalized_step(y: &StepFeatureMap) -> Result<()> {
    let worst = y.norm();
    if worst > 1.0 + 1e-12 {
        return Err(Error::Gate(format!("feature map is not normalized: norm {worst}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induction::{induce_feature_map, induce_signal};
    use crate::spectral::grso_apply;

    fn single(h: FilterSpec, w: f64, act: Activation) -> ScnnSpec {
        ScnnSpec::new(vec![1, 1], vec![vec![vec![h]]], vec![DMatrix::from_element(1, 1, w)], act).unwrap()
    }

    fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                a[(i, j)] = v / n as f64;
                a[(j, i)] = v / n as f64;
            }
        }
        Graph::from_gso(a).unwrap()
    }

    fn random_map(width: usize, n: usize, rng: &mut ChaCha8Rng) -> FeatureMap {
        FeatureMap::new(
            (0..width)
                .map(|_| {
                    GraphSignal::new(
                        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn random_spec(widths: Vec<usize>, act: Activation, rng: &mut ChaCha8Rng) -> ScnnSpec {
        let mut filters = Vec::new();
        let mut weights = Vec::new();
        for l in 1..widths.len() {
            let (o, i) = (widths[l], widths[l - 1]);
            filters.push(
                (0..o)
                    .map(|_| {
                        (0..i)
                            .map(|_| FilterSpec::polynomial((0..4).map(|_| rng.random_range(-1.0..1.0)).collect()))
                            .collect()
                    })
                    .collect(),
            );
            weights.push(DMatrix::from_fn(o, i, |_, _| rng.random_range(-1.0..1.0)));
        }
        ScnnSpec::new(widths, filters, weights, act).unwrap()
    }

    /// Straight-line oracle: explicit filter matrices, no eigenbasis reuse.
    fn oracle(spec: &ScnnSpec, g: &Graph, x: &FeatureMap) -> Vec<DVector<Complex64>> {
        let mut cur: Vec<DVector<Complex64>> = x.features.iter().map(|f| f.values().clone()).collect();
        for l in 1..=spec.layers() {
            let m = spec.weights(l);
            cur = (0..m.nrows())
                .map(|j| {
                    let mut s = DVector::<Complex64>::zeros(g.n());
                    for (k, v) in cur.iter().enumerate() {
                        let c = match spec.filter(l, j, k).kind() {
                            FilterKind::Polynomial(c) => c.clone(),
                            _ => unreachable!(),
                        };
                        let mut pow = v.clone();
                        let mut hv = DVector::<Complex64>::zeros(g.n());
                        for &ci in &c {
                            hv += &pow * Complex64::new(ci, 0.0);
                            pow = g.gso().map(|a| Complex64::new(a, 0.0)) * pow;
                        }
                        s += hv * Complex64::new(m[(j, k)], 0.0);
                    }
                    s.map(|z| spec.activation().apply(z))
                })
                .collect();
        }
        cur
    }

    #[test]
    fn single_identity_filter_is_a_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_graph(5, &mut rng);
        let x = random_map(1, 5, &mut rng);
        let spec = single(FilterSpec::identity(), 1.0, Activation::Identity);
        let out = scnn_forward_graph(&spec, &g, &x).unwrap();
        let want = g.shift(&x.features[0]).unwrap();
        assert!((out.features[0].values() - want.values()).norm() < 1e-12);

        let zero = single(FilterSpec::identity(), 0.0, Activation::Relu);
        assert_eq!(scnn_forward_graph(&zero, &g, &x).unwrap().norm(), 0.0);
    }

    #[test]
    fn matches_straight_line_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for act in [Activation::Relu, Activation::Tanh, Activation::LeakyRelu] {
            let spec = random_spec(vec![2, 3, 2], act, &mut rng);
            let g = random_graph(5, &mut rng);
            let x = random_map(2, 5, &mut rng);
            let out = scnn_forward_graph(&spec, &g, &x).unwrap();
            for (a, b) in out.features.iter().zip(oracle(&spec, &g, &x)) {
                assert!((a.values() - b).norm() < 1e-10);
            }
            let trace = scnn_forward_graph_trace(&spec, &g, &x).unwrap();
            assert_eq!(trace.pre.len(), 2);
            let relu_of_pre = trace.pre[1].features[0].values().map(|z| act.apply(z));
            assert!((relu_of_pre - out.features[0].values()).norm() < 1e-14);
        }
    }

    #[test]
    fn graphon_side_matches_induction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for act in [Activation::Relu, Activation::Tanh, Activation::LeakyRelu, Activation::Tanh] {
            let spec = random_spec(vec![2, 2, 3], act, &mut rng);
            let g = random_graph(7, &mut rng);
            let x = random_map(2, 7, &mut rng);
            let lhs = induce_feature_map(&scnn_forward_graph(&spec, &g, &x).unwrap());
            let rhs = scnn_forward_graphon(&spec, &StepOperator::from_graph(&g), &induce_feature_map(&x)).unwrap();
            assert!(feature_distance(&lhs, &rhs).unwrap() < 1e-8);
        }
    }

    #[test]
    fn graphon_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let zero = StepOperator::new(crate::domain::StepGraphon::constant(0.0));
        let spec = random_spec(vec![1, 2], Activation::Tanh, &mut rng);
        let y = induce_feature_map(&random_map(1, 4, &mut rng));
        // h(0) != 0 in general; use filters vanishing at 0 for the zero example
        let spec0 = single(FilterSpec::square(), 1.0, Activation::Tanh);
        assert!(scnn_forward_graphon(&spec0, &zero, &induce_feature_map(&random_map(1, 4, &mut rng)))
            .unwrap()
            .norm()
            < 1e-15);
        assert!(scnn_forward_graphon(&spec, &zero, &y).is_ok());

        let g = random_graph(6, &mut rng);
        let t = StepOperator::from_graph(&g);
        let x = random_map(1, 6, &mut rng);
        let y = induce_signal(&x.features[0]);
        let id = single(FilterSpec::identity(), 1.0, Activation::Identity);
        let out = scnn_forward_graphon(&id, &t, &StepFeatureMap { features: vec![y.clone()] }).unwrap();
        let want = grso_apply(&t, &y).unwrap();
        assert!((out.features[0].values() - want.values()).norm() < 1e-12);
    }

    #[test]
    fn transfer_constants() {
        assert_eq!(transfer_constant_formula(2.0, 3, 5.0), 128.0);
        let zero = single(FilterSpec::polynomial(vec![0.0]), 1.0, Activation::Relu);
        let tc = transfer_constant(&zero).unwrap();
        assert_eq!((tc.c, tc.c_l), (0.0, 1.0));
        let h = FilterSpec::polynomial(vec![0.0, 0.5]);
        let one = single(h.clone(), 1.0, Activation::Relu);
        let c = stability_constant(&h, DEFAULT_TRUNCATION).unwrap().lemma_constant;
        assert!((transfer_constant(&one).unwrap().c_l - (1.0 + c)).abs() < 1e-12);
        // sup |h| = 2 on [-1, 1]
        let big = single(FilterSpec::polynomial(vec![0.0, 2.0]), 1.0, Activation::Relu);
        assert!(matches!(transfer_constant(&big), Err(Error::Gate(_))));
        let offset = single(FilterSpec::polynomial(vec![0.5, 0.1]), 1.0, Activation::Relu);
        assert!(matches!(transfer_constant(&offset), Err(Error::Gate(_))));
        let weights = ScnnSpec::new(
            vec![2, 1],
            vec![vec![vec![h.clone(), h]]],
            vec![DMatrix::from_row_slice(1, 2, &[0.7, -0.6])],
            Activation::Tanh,
        )
        .unwrap();
        assert!((transfer_constant(&weights).unwrap().m - 1.3).abs() < 1e-15);
    }

    #[test]
    fn activations_are_contractive() {
        for a in [Activation::Relu, Activation::Tanh, Activation::Identity, Activation::LeakyRelu] {
            assert!(a.probe_lipschitz(10_000, 5.0, 9) <= 1.0 + 1e-12);
            assert_eq!(Activation::parse(&a.to_string()).unwrap(), a);
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "schema": "scnn/1", "layers": 2, "widths": [1, 2, 1], "activation": "relu",
            "filters": [[["id"], ["poly:0,0.5"]], [["sq", "cube-minus-id"]]],
            "weights": [[[1.0], [0.5]], [0.25, -0.25]]
        }"#;
        let spec = ScnnSpec::from_json(text).unwrap();
        assert_eq!(spec.layers(), 2);
        assert_eq!(spec.weights(2)[(0, 1)], -0.25);
        let again = ScnnSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(again.weights(1), spec.weights(1));
        assert_eq!(again.filter(2, 0, 1).label(), "cube-minus-id");
        assert!(ScnnSpec::from_json(&text.replace("scnn/1", "scnn/2")).is_err());
        assert!(ScnnSpec::from_json(&text.replace("[0.25, -0.25]", "[0.25]")).is_err());
        assert!(ScnnSpec::from_json(&text.replace("\"layers\": 2", "\"layers\": 3")).is_err());
    }

    #[test]
    fn normalization_is_checked_not_fixed() {
        let x = FeatureMap::new(vec![GraphSignal::from_real(&[1.0, 1.0, 1.0, 1.0])]).unwrap();
        assert!(check_normalized(&x).is_ok());
        let y = FeatureMap::new(vec![GraphSignal::from_real(&[2.0, 2.0, 2.0, 2.0])]).unwrap();
        assert!(check_normalized(&y).is_err());
        assert!(check_normalized_step(&induce_feature_map(&y)).is_err());
    }

    #[test]
    fn repercussion_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = random_spec(vec![1, 2], Activation::Tanh, &mut rng);
        let g = random_graph(6, &mut rng);
        let x = random_map(1, 6, &mut rng);
        assert_eq!(scnn_repercussion(&spec, &g, &x, &g, &x).unwrap(), 0.0);
        let g2 = random_graph(4, &mut rng);
        let x2 = random_map(1, 4, &mut rng);
        let id = single(FilterSpec::identity(), 1.0, Activation::Identity);
        let r = scnn_repercussion(&id, &g, &x, &g2, &x2).unwrap();
        let a = induce_signal(&g.shift(&x.features[0]).unwrap());
        let b = induce_signal(&g2.shift(&x2.features[0]).unwrap());
        assert!((r - crate::induction::signal_distance(&a, &b)).abs() < 1e-12);
    }
}
