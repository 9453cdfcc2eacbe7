use rayon::prelude::*;
use serde::Serialize;

use super::csv::Row;
use super::sampling::{derive_seed, sample_graph, sample_signal, GraphSample, Sampling, SignalFn};
use super::GraphonFamily;
use crate::domain::graph_norms;
use crate::domain::{FeatureMap, Graph};
use crate::error::{Error, Result};
use crate::filters::{stability_constant, FilterSpec, Regularity, StabilityConstant, DEFAULT_TRUNCATION};
use crate::induction::{feature_distance, induce_feature_map};
use crate::scnn::{check_normalized, scnn_repercussion, transfer_constant, ScnnSpec, TransferConstant};
use crate::spectral::{filter_graph, filter_step_operator_on_range, operator_distance, NormKind, StepOperator};
use crate::unbounded::{
    approx_commutation_gap, default_laplace_scale, laplace_step_operator, unbdd_convergence_gap,
    FourierModel, TargetSign,
};

/// Slack added to the right-hand side of the filter stability bound.
pub const FILTER_BOUND_SLACK: f64 = 1e-8;
/// Slack added to the right-hand side of the network bound.
pub const SCNN_BOUND_SLACK: f64 = 1e-7;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Negated least-squares slope of `log y` against `log x`; `None` if any
/// `y` is not positive.
pub fn loglog_rate(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|p| !(p.1 > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}

/// True if `v` decreases at every step but at most `exceptions` of them.
pub fn decreasing_with_exceptions(v: &[f64], exceptions: usize) -> bool {
    v.windows(2).filter(|w| !(w[1] < w[0])).count() <= exceptions
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Config("sizes: at least one size is required".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("sizes: must be strictly increasing".into()));
    }
    Ok(())
}

fn filtered_operator(h: &FilterSpec, g: &Graph) -> Result<StepOperator> {
    Ok(StepOperator::from_graph(&filter_graph(h, g)?))
}

#[derive(Debug, Clone)]
pub struct ConvergenceParams {
    pub name: String,
    pub graphon: GraphonFamily,
    pub filter: FilterSpec,
    pub sizes: Vec<usize>,
    pub sampling: Sampling,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<Row>,
    /// `grid:<N>` for a sampled reference, `exact-step:<k>` for an exact one.
    pub reference: String,
    /// Size of the sampled reference, `None` when it is exact.
    pub reference_size: Option<usize>,
    /// `(n, median distance to the reference)`.
    pub medians: Vec<(usize, f64)>,
    /// Fitted decay exponent of the medians.
    pub rate: Option<f64>,
    pub strictly_decreasing: bool,
}

/// Distances from induced filtered operators to a reference: the filtered
/// grid sample at twice the largest size, or the filtered step kernel itself
/// when the graphon is step-valued.
pub fn run_convergence(p: &ConvergenceParams) -> Result<ConvergenceReport> {
    check_sizes(&p.sizes)?;
    if p.trials == 0 {
        return Err(Error::Config("trials: must be at least 1".into()));
    }
    // step-valued graphons are their own exact reference
    let (t_ref, reference_size, reference) = match p.graphon.as_step() {
        Some(w) => {
            let k = w.partition().len();
            (filter_step_operator_on_range(&p.filter, &StepOperator::new(w))?, None, format!("exact-step:{k}"))
        }
        None => {
            let size = 2 * p.sizes.last().expect("checked");
            let g = sample_graph(&p.graphon, size, Sampling::Grid, 0)?;
            (filtered_operator(&p.filter, &g.graph)?, Some(size), format!("grid:{size}"))
        }
    };

    let jobs: Vec<(usize, usize)> = p
        .sizes
        .iter()
        .flat_map(|&n| (0..p.trials).map(move |t| (n, t)))
        .collect();
    let grid = p.sampling == Sampling::Grid;
    // grid samples do not depend on the seed; compute one per size
    let grid_ops: Vec<(usize, StepOperator)> = if grid {
        p.sizes
            .par_iter()
            .map(|&n| Ok((n, filtered_operator(&p.filter, &sample_graph(&p.graphon, n, Sampling::Grid, 0)?.graph)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let grid_dists: Vec<f64> = grid_ops
        .par_iter()
        .map(|(_, op)| operator_distance(op, &t_ref, NormKind::Operator))
        .collect::<Result<_>>()?;

    let results: Vec<(u64, f64, Option<f64>)> = jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = derive_seed(p.seed, &p.name, n, t);
            let idx = p.sizes.iter().position(|&s| s == n).expect("size in ladder");
            let next = p.sizes.get(idx + 1).copied();
            if grid {
                let cross = match next {
                    Some(_) => Some(operator_distance(&grid_ops[idx].1, &grid_ops[idx + 1].1, NormKind::Operator)?),
                    None => None,
                };
                return Ok((seed, grid_dists[idx], cross));
            }
            let op = filtered_operator(&p.filter, &sample_graph(&p.graphon, n, p.sampling, seed)?.graph)?;
            let d = operator_distance(&op, &t_ref, NormKind::Operator)?;
            let cross = match next {
                Some(m) => {
                    let seed_m = derive_seed(p.seed, &p.name, m, t);
                    let g_m = sample_graph(&p.graphon, m, p.sampling, seed_m)?;
                    Some(operator_distance(&op, &filtered_operator(&p.filter, &g_m.graph)?, NormKind::Operator)?)
                }
                None => None,
            };
            Ok((seed, d, cross))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut medians = Vec::new();
    let row = |n, m, trial, seed, metric: &str, value| Row {
        experiment: p.name.clone(),
        graphon: p.graphon.to_string(),
        filter_or_scnn: p.filter.label().to_string(),
        n,
        m,
        trial,
        seed,
        metric: metric.into(),
        value,
    };
    for (i, &n) in p.sizes.iter().enumerate() {
        let chunk = &results[i * p.trials..(i + 1) * p.trials];
        for (t, &(seed, d, cross)) in chunk.iter().enumerate() {
            rows.push(row(n, reference_size, Some(t), Some(seed), "dist_ref", d));
            if let Some(c) = cross {
                rows.push(row(n, Some(p.sizes[i + 1]), Some(t), Some(seed), "dist_cross", c));
            }
        }
        let mut ds: Vec<f64> = chunk.iter().map(|r| r.1).collect();
        let med = median(&mut ds);
        rows.push(row(n, reference_size, None, None, "median_dist_ref", med));
        medians.push((n, med));
    }
    let strictly_decreasing = medians.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(ConvergenceReport { rows, reference, reference_size, rate: loglog_rate(&medians), medians, strictly_decreasing })
}

#[derive(Debug, Clone)]
pub struct TransferParams {
    pub name: String,
    pub graphon: GraphonFamily,
    pub filter: FilterSpec,
    pub n1: usize,
    pub n2: usize,
    pub sampling: Sampling,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferTrial {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub rows: Vec<Row>,
    pub constant: StabilityConstant,
    pub trials: Vec<TransferTrial>,
    pub all_hold: bool,
}

/// Preconditions of the linear stability bound for one filter.
pub fn check_filter_gate(h: &FilterSpec) -> Result<()> {
    let mut why = Vec::new();
    if !h.zero_at_zero() {
        why.push(format!("h(0) = {}", h.eval(0.0)));
    }
    if h.regularity() < Regularity::SmoothLipschitzDerivative {
        why.push("needs a Lipschitz derivative".to_string());
    }
    if why.is_empty() {
        Ok(())
    } else {
        Err(Error::Gate(format!("filter {}: {}", h.label(), why.join("; "))))
    }
}

fn check_spectrum(g: &Graph, gamma: f64) -> Result<()> {
    let norm = graph_norms(g).gso_opnorm;
    if norm > gamma * (1.0 + 1e-12) {
        return Err(Error::Gate(format!("GSO norm {norm} exceeds the filter domain bound {gamma}")));
    }
    Ok(())
}

/// `‖T_{W_{n1 h(Δ1)}} − T_{W_{n2 h(Δ2)}}‖` against `C ‖T_{W_{A1}} − T_{W_{A2}}‖`.
pub fn run_transfer_bound(p: &TransferParams) -> Result<TransferReport> {
    check_filter_gate(&p.filter)?;
    if p.trials == 0 {
        return Err(Error::Config("trials: must be at least 1".into()));
    }
    let constant = stability_constant(&p.filter, DEFAULT_TRUNCATION)?;
    let c = constant.lemma_constant;
    let results: Vec<(u64, u64, f64, f64)> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let s1 = derive_seed(p.seed, &p.name, p.n1, t);
            let s2 = derive_seed(p.seed, &p.name, p.n2, t);
            let g1 = sample_graph(&p.graphon, p.n1, p.sampling, s1)?.graph;
            let g2 = sample_graph(&p.graphon, p.n2, p.sampling, s2)?.graph;
            check_spectrum(&g1, p.filter.domain_bound())?;
            check_spectrum(&g2, p.filter.domain_bound())?;
            let lhs = operator_distance(
                &filtered_operator(&p.filter, &g1)?,
                &filtered_operator(&p.filter, &g2)?,
                NormKind::Operator,
            )?;
            let rhs = operator_distance(&StepOperator::from_graph(&g1), &StepOperator::from_graph(&g2), NormKind::Operator)?;
            Ok((s1, s2, lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for (t, &(s1, _, lhs, rhs)) in results.iter().enumerate() {
        let holds = lhs <= c * rhs + FILTER_BOUND_SLACK;
        let row = |metric: &str, value| Row {
            experiment: p.name.clone(),
            graphon: p.graphon.to_string(),
            filter_or_scnn: p.filter.label().to_string(),
            n: p.n1,
            m: Some(p.n2),
            trial: Some(t),
            seed: Some(s1),
            metric: metric.into(),
            value,
        };
        rows.push(row("lhs", lhs));
        rows.push(row("rhs_raw", rhs));
        rows.push(row("constant", c));
        rows.push(row("holds", if holds { 1.0 } else { 0.0 }));
        trials.push(TransferTrial { trial: t, lhs, rhs, holds });
    }
    let all_hold = trials.iter().all(|t| t.holds);
    Ok(TransferReport { rows, constant, trials, all_hold })
}

#[derive(Debug, Clone)]
pub struct ScnnParams {
    pub name: String,
    pub label: String,
    pub spec: ScnnSpec,
    pub graphon: GraphonFamily,
    pub signals: Vec<SignalFn>,
    pub n1: usize,
    pub n2: usize,
    pub sampling: Sampling,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScnnTrial {
    pub trial: usize,
    pub operator_distance: f64,
    pub signal_distance: f64,
    pub epsilon: f64,
    pub repercussion: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScnnReport {
    pub rows: Vec<Row>,
    pub constant: TransferConstant,
    pub trials: Vec<ScnnTrial>,
    pub all_hold: bool,
}

fn features(signals: &[SignalFn], s: &GraphSample) -> Result<FeatureMap> {
    FeatureMap::new(signals.iter().map(|&f| sample_signal(f, s, s.seed)).collect::<Result<_>>()?)
}

/// Network repercussion against `C_L ε`, with `ε` the larger of the
/// operator and input-signal distances.
pub fn run_scnn_transfer(p: &ScnnParams) -> Result<ScnnReport> {
    let constant = transfer_constant(&p.spec)?;
    if p.signals.len() != p.spec.widths()[0] {
        return Err(Error::Config(format!(
            "signals: the network takes {} input features, got {}",
            p.spec.widths()[0],
            p.signals.len()
        )));
    }
    if p.trials == 0 {
        return Err(Error::Config("trials: must be at least 1".into()));
    }
    let gamma = (1..=p.spec.layers())
        .flat_map(|l| {
            let w = p.spec.weights(l).shape();
            (0..w.0).flat_map(move |j| (0..w.1).map(move |k| (l, j, k)))
        })
        .map(|(l, j, k)| p.spec.filter(l, j, k).domain_bound())
        .fold(f64::INFINITY, f64::min);
    let results: Vec<(u64, ScnnTrial)> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let s1 = sample_graph(&p.graphon, p.n1, p.sampling, derive_seed(p.seed, &p.name, p.n1, t))?;
            let s2 = sample_graph(&p.graphon, p.n2, p.sampling, derive_seed(p.seed, &p.name, p.n2, t))?;
            check_spectrum(&s1.graph, gamma)?;
            check_spectrum(&s2.graph, gamma)?;
            let (x1, x2) = (features(&p.signals, &s1)?, features(&p.signals, &s2)?);
            check_normalized(&x1)?;
            check_normalized(&x2)?;
            let op = operator_distance(
                &StepOperator::from_graph(&s1.graph),
                &StepOperator::from_graph(&s2.graph),
                NormKind::Operator,
            )?;
            let sig = feature_distance(&induce_feature_map(&x1), &induce_feature_map(&x2))?;
            let epsilon = op.max(sig);
            let repercussion = scnn_repercussion(&p.spec, &s1.graph, &x1, &s2.graph, &x2)?;
            let holds = repercussion <= constant.c_l * epsilon + SCNN_BOUND_SLACK;
            Ok((
                s1.seed,
                ScnnTrial { trial: t, operator_distance: op, signal_distance: sig, epsilon, repercussion, holds },
            ))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (seed, tr) in &results {
        for (metric, value) in [
            ("epsilon", tr.epsilon),
            ("operator_distance", tr.operator_distance),
            ("signal_distance", tr.signal_distance),
            ("repercussion", tr.repercussion),
            ("c_l", constant.c_l),
            ("holds", if tr.holds { 1.0 } else { 0.0 }),
        ] {
            rows.push(Row {
                experiment: p.name.clone(),
                graphon: p.graphon.to_string(),
                filter_or_scnn: p.label.clone(),
                n: p.n1,
                m: Some(p.n2),
                trial: Some(tr.trial),
                seed: Some(*seed),
                metric: metric.into(),
                value,
            });
        }
    }
    let trials: Vec<ScnnTrial> = results.into_iter().map(|r| r.1).collect();
    let all_hold = trials.iter().all(|t| t.holds);
    Ok(ScnnReport { rows, constant, trials, all_hold })
}

#[derive(Debug, Clone)]
pub struct LaplaceParams {
    pub name: String,
    pub lambda: f64,
    pub power: u32,
    pub sizes: Vec<usize>,
    /// GSO scale per size; `None` uses `n^2`.
    pub scale: Option<f64>,
    pub sign: TargetSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplaceReport {
    pub rows: Vec<Row>,
    pub band_dimension: usize,
    /// `(n, convergence gap, commutation gap)`.
    pub gaps: Vec<(usize, f64, f64)>,
    pub convergence_decreasing: bool,
    pub commutation_decreasing: bool,
}

/// Band gaps of the finite-difference operators over a size ladder.
pub fn run_laplace(p: &LaplaceParams) -> Result<LaplaceReport> {
    check_sizes(&p.sizes)?;
    if p.power == 0 {
        return Err(Error::Config("k: must be at least 1".into()));
    }
    let model = FourierModel::laplace();
    let band_dimension = model.band_dimension(p.lambda)?;
    let gaps: Vec<(usize, f64, f64)> = p
        .sizes
        .par_iter()
        .map(|&n| {
            let t = laplace_step_operator(n, p.scale.unwrap_or_else(|| default_laplace_scale(n)))?;
            let gap = unbdd_convergence_gap(&model, p.lambda, &t, p.sign)?;
            let comm = approx_commutation_gap(&model, p.lambda, &t, p.power)?;
            Ok((n, gap, comm))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &(n, gap, comm) in &gaps {
        for (metric, value) in [("convergence_gap", gap), ("commutation_gap", comm)] {
            rows.push(Row {
                experiment: p.name.clone(),
                graphon: "finite-difference".into(),
                filter_or_scnn: format!("x^{}", p.power),
                n,
                m: None,
                trial: None,
                seed: None,
                metric: metric.into(),
                value,
            });
        }
    }
    let g: Vec<f64> = gaps.iter().map(|x| x.1).collect();
    let c: Vec<f64> = gaps.iter().map(|x| x.2).collect();
    Ok(LaplaceReport {
        rows,
        band_dimension,
        convergence_decreasing: decreasing_with_exceptions(&g, 1),
        commutation_decreasing: decreasing_with_exceptions(&c, 1),
        gaps,
    })
}
