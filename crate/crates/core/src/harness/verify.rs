use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::experiments::{run_convergence, run_scnn_transfer, run_transfer_bound, ConvergenceParams, ScnnParams, TransferParams};
use super::sampling::{derive_seed, sample_graph, Sampling, SignalFn};
use super::GraphonFamily;
use crate::domain::{FeatureMap, Graph, GraphSignal, StepGraphon};
use crate::error::Result;
use crate::filters::FilterSpec;
use crate::induction::{feature_distance, induce_feature_map, induce_graphon, induce_signal, signal_distance};
use crate::motifs::{cut_distance_aligned, cut_norm_exact, cut_norm_heuristic, hom_density_step, hom_number, AlignMode, Motif};
use crate::scnn::{scnn_forward_graph, scnn_forward_graphon, Activation, ScnnSpec};
use crate::spectral::{
    complex_spectral_norm, filter_graph, filter_graph_signal, filter_step_operator, graphon_filter_signal,
    operator_norm, schatten_norm, unitary_exp, StepOperator,
};
use crate::unbounded::{
    approx_commutation_gap, band_projector, combination_gap, default_laplace_scale, laplace_step_operator, FourierModel,
};

/// Deliberate implementation faults for mutation testing of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Build the graph-side filtered kernel from `h(Δ)` instead of `n h(Δ)`.
    DropGwmScale,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub property: String,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Relative tolerance of the exact identities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Absolute slack of the inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;

fn rng_for(seed: u64, check: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, check, 0, 0))
}

/// Symmetric GSO with entries in `[-1/n, 1/n]`, so `‖Δ‖ <= 1`.
pub fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0) / n as f64;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Graph::from_gso(a).expect("symmetric")
}

pub fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> GraphSignal {
    GraphSignal::new((0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
}

/// Random polynomial of degree `<= max_degree`, optionally vanishing at 0.
pub fn random_polynomial(max_degree: usize, zero_at_zero: bool, rng: &mut ChaCha8Rng) -> FilterSpec {
    let d = rng.random_range(1..=max_degree);
    let mut c: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
    if zero_at_zero {
        c[0] = 0.0;
    }
    FilterSpec::polynomial(c)
}

/// Symmetric step kernel on `P_k` with values in `[-1, 1]`.
pub fn random_kernel(k: usize, rng: &mut ChaCha8Rng) -> StepGraphon {
    let mut b = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = rng.random_range(-1.0..1.0);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    StepGraphon::uniform(b).expect("symmetric")
}

/// Random network; `contractive` scales filters to `Σ|c_i| <= 1` and weight
/// rows to absolute sum `<= 1`.
pub fn random_spec(max_layers: usize, max_width: usize, contractive: bool, rng: &mut ChaCha8Rng) -> ScnnSpec {
    let layers = rng.random_range(1..=max_layers);
    let widths: Vec<usize> = (0..=layers).map(|_| rng.random_range(1..=max_width)).collect();
    let acts = [Activation::Relu, Activation::Tanh, Activation::Identity, Activation::LeakyRelu];
    let act = acts[rng.random_range(0..acts.len())];
    let mut filters = Vec::new();
    let mut weights = Vec::new();
    for l in 1..=layers {
        let (o, i) = (widths[l], widths[l - 1]);
        let bank = (0..o)
            .map(|_| {
                (0..i)
                    .map(|_| {
                        let d = rng.random_range(1..=4);
                        let mut c: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
                        if contractive {
                            c[0] = 0.0;
                            let s: f64 = c.iter().map(|x| x.abs()).sum();
                            c.iter_mut().for_each(|x| *x /= s.max(1.0));
                        }
                        FilterSpec::polynomial(c)
                    })
                    .collect()
            })
            .collect();
        filters.push(bank);
        let mut w = DMatrix::from_fn(o, i, |_, _| rng.random_range(-1.0..1.0));
        if contractive {
            for mut row in w.row_iter_mut() {
                let s: f64 = row.iter().map(|x: &f64| x.abs()).sum();
                row /= s.max(1.0);
            }
        }
        weights.push(w);
    }
    ScnnSpec::new(widths, filters, weights, act).expect("consistent shapes")
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(1.0)
}

fn check(name: &str, property: &str, tolerance: f64, errors: Vec<f64>) -> CheckResult {
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let passed = errors.iter().all(|e| e.is_finite()) && max_error <= tolerance;
    CheckResult {
        name: name.into(),
        property: property.into(),
        instances: errors.len(),
        max_error,
        tolerance,
        passed,
    }
}

fn filtered_kernel_scaling(seed: u64, fault: Fault) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "filtered_kernel_scaling");
    let mut errs = Vec::new();
    for _ in 0..50 {
        let n = rng.random_range(2..=32);
        let g = random_graph(n, &mut rng);
        let h = random_polynomial(6, true, &mut rng);
        let op_side = filter_step_operator(&h, &StepOperator::from_graph(&g))?;
        let graph_side = match fault {
            Fault::None => induce_graphon(&filter_graph(&h, &g)?),
            Fault::DropGwmScale => StepGraphon::uniform(filter_graph(&h, &g)?.gso().clone())?,
        };
        let diff = (op_side.kernel().values() - graph_side.values()).amax();
        errs.push(rel(diff, graph_side.values().amax()));
    }
    Ok(check(
        "filtered_kernel_scaling",
        "h applied to the induced operator equals the operator of the graphon induced by n h(GSO)",
        IDENTITY_TOL,
        errs,
    ))
}

fn filtered_signal_induction(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "filtered_signal_induction");
    let mut errs = Vec::new();
    for _ in 0..50 {
        let n = rng.random_range(2..=64);
        let g = random_graph(n, &mut rng);
        let h = random_polynomial(6, false, &mut rng);
        let x = random_signal(n, &mut rng);
        let lhs = induce_signal(&filter_graph_signal(&h, &g, &x)?);
        let rhs = graphon_filter_signal(&h, &StepOperator::from_graph(&g), &induce_signal(&x))?;
        errs.push(rel(signal_distance(&lhs, &rhs), lhs.l2_norm()));
    }
    Ok(check(
        "filtered_signal_induction",
        "inducing a filtered graph signal commutes with filtering the induced signal",
        IDENTITY_TOL,
        errs,
    ))
}

fn induced_norm_scaling(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "induced_norm_scaling");
    let mut errs = Vec::new();
    for _ in 0..50 {
        let n = rng.random_range(1..=64);
        let (x, y) = (random_signal(n, &mut rng), random_signal(n, &mut rng));
        let (px, py) = (induce_signal(&x), induce_signal(&y));
        let want = x.norm() / (n as f64).sqrt();
        errs.push(rel((px.l2_norm() - want).abs(), want));
        let ip = x.inner(&y)? / n as f64;
        errs.push(rel((px.inner(&py)? - ip).norm(), ip.norm()));
    }
    Ok(check(
        "induced_norm_scaling",
        "induced signals scale norms by 1/sqrt(n) and inner products by 1/n",
        IDENTITY_TOL,
        errs,
    ))
}

fn induced_spectrum(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "induced_spectrum");
    let mut errs = Vec::new();
    for _ in 0..50 {
        let n = rng.random_range(2..=64);
        let g = random_graph(n, &mut rng);
        let mut want: Vec<f64> = g.gso().clone().symmetric_eigenvalues().iter().copied().collect();
        want.sort_by(f64::total_cmp);
        let got = StepOperator::from_graph(&g).eigenvalues();
        let err = want.iter().zip(got.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        errs.push(rel(err, want.iter().fold(0.0, |m: f64, v| m.max(v.abs()))));
    }
    Ok(check(
        "induced_spectrum",
        "the induced operator has the spectrum of the GSO",
        IDENTITY_TOL,
        errs,
    ))
}

fn scnn_commutation(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "scnn_commutation");
    let mut errs = Vec::new();
    for _ in 0..50 {
        let spec = random_spec(3, 4, false, &mut rng);
        let n = rng.random_range(2..=32);
        let g = random_graph(n, &mut rng);
        let x = FeatureMap::new((0..spec.widths()[0]).map(|_| random_signal(n, &mut rng)).collect())?;
        let lhs = induce_feature_map(&scnn_forward_graph(&spec, &g, &x)?);
        let rhs = scnn_forward_graphon(&spec, &StepOperator::from_graph(&g), &induce_feature_map(&x))?;
        errs.push(rel(feature_distance(&lhs, &rhs)?, lhs.norm()));
    }
    Ok(check(
        "scnn_commutation",
        "inducing the network output equals running the network on the induced operator",
        IDENTITY_TOL,
        errs,
    ))
}

fn scnn_contractivity(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "scnn_contractivity");
    let mut errs = Vec::new();
    for _ in 0..30 {
        let spec = random_spec(3, 4, true, &mut rng);
        let n = rng.random_range(2..=32);
        let g = random_graph(n, &mut rng);
        let x = FeatureMap::new((0..spec.widths()[0]).map(|_| random_signal(n, &mut rng)).collect())?;
        let out = scnn_forward_graph(&spec, &g, &x)?;
        errs.push((out.norm() - x.norm()).max(0.0));
    }
    Ok(check(
        "scnn_contractivity",
        "contractive activations, sup-bounded filters and unit weight rows never increase feature norms",
        INEQUALITY_SLACK,
        errs,
    ))
}

fn cut_norm_sandwich(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "cut_norm_sandwich");
    let mut errs = Vec::new();
    for _ in 0..100 {
        let k = rng.random_range(1..=12);
        let w = random_kernel(k, &mut rng);
        let t = StepOperator::new(w.clone());
        let cut = cut_norm_exact(&w)?.value;
        let op = operator_norm(&t);
        errs.push(cut - op);
        for p in [3.0, 4.0, 6.0] {
            let sp = schatten_norm(&t, p)?;
            errs.push(op - sp);
            errs.push(sp - SQRT_2 * cut.powf(0.5 - 1.0 / p));
        }
    }
    Ok(check(
        "cut_norm_sandwich",
        "cut norm <= operator norm <= Schatten p-norm <= sqrt(2) cut^(1/2 - 1/p) for kernels bounded by 1",
        INEQUALITY_SLACK,
        errs,
    ))
}

fn counting_lemma(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "counting_lemma");
    let motifs: Vec<Motif> = ["K2", "P3", "K3", "P4", "edges:0-1,0-2,0-3"]
        .iter()
        .map(|s| Motif::parse(s))
        .collect::<Result<_>>()?;
    let mut errs = Vec::new();
    for pair in 0..8 {
        let u = random_kernel(8, &mut rng);
        let w = if pair % 2 == 0 {
            random_kernel(8, &mut rng)
        } else {
            // a small perturbation of a relabeled copy
            let mut perm: Vec<usize> = (0..8).collect();
            for i in (1..8).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let moved = u.relabel(&crate::domain::Permutation::new(perm)?)?;
            let noise = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-0.05..0.05));
            let vals = (moved.values() + &noise + noise.transpose()) * 0.5;
            StepGraphon::uniform(vals.map(|v: f64| v.clamp(-1.0, 1.0)))?
        };
        let delta = cut_distance_aligned(&u, &w, AlignMode::Exact)?;
        for f in &motifs {
            let m = f.edges().len() as f64;
            let gap = (hom_density_step(f, &u)? - hom_density_step(f, &w)?).abs();
            errs.push(gap - 4.0 * m * delta);
        }
    }
    Ok(check(
        "counting_lemma",
        "homomorphism densities differ by at most 4 m times the aligned cut distance",
        INEQUALITY_SLACK,
        errs,
    ))
}

fn unitary_exp_bound(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "unitary_exp_bound");
    let mut errs = Vec::new();
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let a = random_kernel(n, &mut rng).values().clone();
        let b = random_kernel(n, &mut rng).values().clone();
        let s = rng.random_range(-3.0..3.0);
        let lhs = complex_spectral_norm(&(unitary_exp(s, &a) - unitary_exp(s, &b)));
        let diff = crate::domain::symmetric_spectral_norm(&(&a - &b));
        errs.push(lhs - s.abs() * diff);
    }
    Ok(check(
        "unitary_exp_bound",
        "||exp(i a A) - exp(i a B)|| <= |a| ||A - B|| for symmetric A, B",
        INEQUALITY_SLACK,
        errs,
    ))
}

fn hom_density_induction(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "hom_density_induction");
    let motifs: Vec<Motif> = ["K2", "P3", "K3", "C4", "edges:0-1,1-2,1-3"]
        .iter()
        .map(|s| Motif::parse(s))
        .collect::<Result<_>>()?;
    let mut errs = Vec::new();
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let g = random_graph(n, &mut rng);
        for f in &motifs {
            let graph_side = hom_number(f, &g)? / (n as f64).powi(f.nodes() as i32);
            let step_side = hom_density_step(f, &induce_graphon(&g))?;
            errs.push(rel((graph_side - step_side).abs(), graph_side.abs()));
        }
    }
    Ok(check(
        "hom_density_induction",
        "signed homomorphism densities of a graph and of its induced graphon agree",
        1e-12,
        errs,
    ))
}

fn cut_heuristic_oracle(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "cut_heuristic_oracle");
    let mut errs = Vec::new();
    let mut misses = 0;
    for t in 0..100 {
        let w = random_kernel(10, &mut rng);
        let exact = cut_norm_exact(&w)?.value;
        let h = cut_norm_heuristic(&w, 8, t);
        errs.push(h - exact);
        if exact - h > 1e-12 {
            misses += 1;
        }
    }
    // more than 10 misses out of 100 is reported as a violation
    errs.push(if misses > 10 { 1.0 } else { 0.0 });
    Ok(check(
        "cut_heuristic_oracle",
        "the local-search cut norm never exceeds the exact value and matches it on at least 90% of instances",
        1e-12,
        errs,
    ))
}

fn band_projector_algebra(_seed: u64) -> Result<CheckResult> {
    let m = FourierModel::laplace();
    let mut errs = Vec::new();
    for lambda in [1.0, 50.0, 400.0, 2000.0] {
        let p = band_projector(&m, lambda, 64)?;
        errs.push(complex_spectral_norm(&(&p * &p - &p)));
        errs.push(complex_spectral_norm(&(p.adjoint() - &p)));
        errs.push((p.trace().re - m.band_dimension(lambda)? as f64).abs());
    }
    Ok(check(
        "band_projector_algebra",
        "band projectors are idempotent, self-adjoint and have the band dimension as rank",
        IDENTITY_TOL,
        errs,
    ))
}

fn commutation_linearity(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed, "commutation_linearity");
    let m = FourierModel::laplace();
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let t = laplace_step_operator(n, default_laplace_scale(n))?;
        let g1 = approx_commutation_gap(&m, 50.0, &t, 1)?;
        let g2 = approx_commutation_gap(&m, 50.0, &t, 2)?;
        for _ in 0..5 {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let gap = combination_gap(&m, 50.0, &t, &FilterSpec::polynomial(vec![0.0, a, b]))?;
            errs.push(gap - (a.abs() * g1 + b.abs() * g2));
        }
    }
    Ok(check(
        "commutation_linearity",
        "the band commutation gap of a x + b x^2 is at most |a| gap(x) + |b| gap(x^2)",
        IDENTITY_TOL,
        errs,
    ))
}

fn filter_stability_bound(seed: u64) -> Result<CheckResult> {
    let mut errs = Vec::new();
    for (h, w) in [
        (FilterSpec::square(), GraphonFamily::Product),
        (FilterSpec::cube_minus_id(), GraphonFamily::sbm(2, 0.8, 0.2)?),
    ] {
        let report = run_transfer_bound(&TransferParams {
            name: "verify-transfer".into(),
            graphon: w,
            filter: h,
            n1: 16,
            n2: 32,
            sampling: Sampling::Iid,
            trials: 3,
            seed,
        })?;
        let c = report.constant.lemma_constant;
        errs.extend(report.trials.iter().map(|t| t.lhs - c * t.rhs));
    }
    Ok(check(
        "filter_stability_bound",
        "filtered induced operators differ by at most C times the induced operators",
        1e-8,
        errs,
    ))
}

fn scnn_transfer_bound(seed: u64) -> Result<CheckResult> {
    let spec = ScnnSpec::new(
        vec![2, 2, 2],
        vec![
            vec![vec![FilterSpec::square(), FilterSpec::identity()], vec![FilterSpec::cube_minus_id(), FilterSpec::square()]],
            vec![vec![FilterSpec::identity(), FilterSpec::square()], vec![FilterSpec::square(), FilterSpec::cube_minus_id()]],
        ],
        vec![DMatrix::from_row_slice(2, 2, &[0.5, 0.5, -0.3, 0.6]), DMatrix::from_row_slice(2, 2, &[0.7, 0.2, 0.4, -0.4])],
        Activation::Tanh,
    )?;
    let report = run_scnn_transfer(&ScnnParams {
        name: "verify-scnn".into(),
        label: "verify".into(),
        spec,
        graphon: GraphonFamily::sbm(2, 0.8, 0.2)?,
        signals: vec![SignalFn::Linear, SignalFn::Cos],
        n1: 16,
        n2: 32,
        sampling: Sampling::Iid,
        trials: 3,
        seed,
    })?;
    let c = report.constant.c_l;
    let errs = report.trials.iter().map(|t| t.repercussion - c * t.epsilon).collect();
    Ok(check(
        "scnn_transfer_bound",
        "network outputs on two sampled graphs differ by at most C_L epsilon",
        1e-7,
        errs,
    ))
}

fn sampling_determinism(seed: u64) -> Result<CheckResult> {
    let mut errs = Vec::new();
    for (i, w) in [GraphonFamily::Product, GraphonFamily::Min, GraphonFamily::ExpDist(3.0)].iter().enumerate() {
        let s = derive_seed(seed, "sampling_determinism", 24, i);
        let a = sample_graph(w, 24, Sampling::Iid, s)?;
        let b = sample_graph(w, 24, Sampling::Iid, s)?;
        errs.push(if a.graph.gso() == b.graph.gso() { 0.0 } else { 1.0 });
    }
    Ok(check(
        "sampling_determinism",
        "equal seeds give bitwise equal graphs",
        0.0,
        errs,
    ))
}

fn convergence_triangle(seed: u64) -> Result<CheckResult> {
    let report = run_convergence(&ConvergenceParams {
        name: "verify-converge".into(),
        graphon: GraphonFamily::Product,
        filter: FilterSpec::square(),
        sizes: vec![8, 16, 32],
        sampling: Sampling::Iid,
        trials: 2,
        seed,
    })?;
    let find = |n: usize, trial: usize, metric: &str| {
        report
            .rows
            .iter()
            .find(|r| r.n == n && r.trial == Some(trial) && r.metric == metric)
            .map(|r| r.value)
    };
    let mut errs = Vec::new();
    for trial in 0..2 {
        for (n, m) in [(8, 16), (16, 32)] {
            let cross = find(n, trial, "dist_cross").unwrap_or(f64::NAN);
            let a = find(n, trial, "dist_ref").unwrap_or(f64::NAN);
            let b = find(m, trial, "dist_ref").unwrap_or(f64::NAN);
            errs.push(cross - a - b);
        }
    }
    Ok(check(
        "convergence_triangle",
        "cross-size distances obey the triangle inequality through the reference",
        INEQUALITY_SLACK,
        errs,
    ))
}

fn constant_kernel_reference(_seed: u64) -> Result<CheckResult> {
    let report = run_convergence(&ConvergenceParams {
        name: "verify-const".into(),
        graphon: GraphonFamily::Const(0.4),
        filter: FilterSpec::identity(),
        sizes: vec![4, 8, 16],
        sampling: Sampling::Iid,
        trials: 1,
        seed: 0,
    })?;
    let errs = report.rows.iter().filter(|r| r.metric == "dist_ref").map(|r| r.value).collect();
    Ok(check(
        "constant_kernel_reference",
        "a constant graphon is reproduced exactly at every size",
        1e-12,
        errs,
    ))
}

/// Runs every check with the given master seed.
pub fn verify_suite(seed: u64, fault: Fault) -> Result<VerifyReport> {
    let checks = vec![
        filtered_kernel_scaling(seed, fault)?,
        filtered_signal_induction(seed)?,
        induced_norm_scaling(seed)?,
        induced_spectrum(seed)?,
        scnn_commutation(seed)?,
        scnn_contractivity(seed)?,
        cut_norm_sandwich(seed)?,
        counting_lemma(seed)?,
        unitary_exp_bound(seed)?,
        hom_density_induction(seed)?,
        cut_heuristic_oracle(seed)?,
        band_projector_algebra(seed)?,
        commutation_linearity(seed)?,
        filter_stability_bound(seed)?,
        scnn_transfer_bound(seed)?,
        sampling_determinism(seed)?,
        convergence_triangle(seed)?,
        constant_kernel_reference(seed)?,
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { seed, passed, checks })
}
