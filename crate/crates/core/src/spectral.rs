//! Functional calculus through symmetric eigendecomposition.
//!
//! A step kernel `B` on a partition with cell measures `μ` acts on step
//! functions as the matrix `B D` with `D = diag(μ)`; it is similar to the
//! symmetric matrix `S = D^{1/2} B D^{1/2}`, whose eigenvalues are the nonzero
//! eigenvalues of the integral operator. Every filter, norm and distance on
//! step operators goes through `S`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::domain::{Graph, GraphSignal, Partition, StepGraphon, StepSignal};
use crate::error::{Error, Result};
use crate::filters::{FilterKind, FilterSpec};
use crate::induction::{common_refinement, induce_graphon};

/// Cells thinner than this are dropped before forming `S`.
const MIN_CELL: f64 = 1e-14;
/// Relative threshold for a vanishing rational-filter denominator.
const SINGULAR_DEN: f64 = 1e-12;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eig = m.clone().symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { eigenvalues, eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(f(λ)) Q^T`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let v = f(lam);
            scaled.column_mut(j).scale_mut(v);
        }
        scaled * q.transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply(|x| x)
    }

    /// `h(M)`; rational filters fail loudly when the denominator nearly
    /// vanishes on the spectrum.
    pub fn filter(&self, h: &FilterSpec) -> Result<DMatrix<f64>> {
        let values = self.filter_values(h)?;
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        Ok(scaled * q.transpose())
    }

    /// `h(λ_j)` for every eigenvalue, with the same singularity check as
    /// [`EigenDecomposition::filter`].
    pub fn filter_values(&self, h: &FilterSpec) -> Result<DVector<f64>> {
        if let FilterKind::Rational { .. } = h.kind() {
            let dens: Vec<f64> = self.eigenvalues.iter().map(|&l| h.denominator(l)).collect();
            let scale = dens.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
            for (&lam, &d) in self.eigenvalues.iter().zip(&dens) {
                if scale == 0.0 || d.abs() < SINGULAR_DEN * scale {
                    return Err(Error::SingularFilter { eigenvalue: lam, value: d });
                }
            }
        }
        Ok(self.eigenvalues.map(|x| h.eval(x)))
    }

    /// Maximum of `|f(λ_j)|`.
    pub fn spectral_sup(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.eigenvalues.iter().map(|&l| f(l).abs()).fold(0.0, f64::max)
    }
}

/// The graph with GSO `h(Δ)`.
pub fn filter_graph(h: &FilterSpec, g: &Graph) -> Result<Graph> {
    let eig = EigenDecomposition::new(g.gso());
    Graph::from_gso(eig.filter(h)?)
}

/// `h(Δ) x`.
pub fn filter_graph_signal(h: &FilterSpec, g: &Graph, x: &GraphSignal) -> Result<GraphSignal> {
    filter_graph(h, g)?.shift(x)
}

/// The integral operator `T_W` of a step kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOperator {
    kernel: StepGraphon,
}

/// `S = D^{1/2} B D^{1/2}` restricted to cells of non-negligible measure.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    pub matrix: DMatrix<f64>,
    /// Indices of the cells kept in `matrix`.
    pub kept: Vec<usize>,
    /// `sqrt(μ)` for the kept cells.
    pub sqrt_measure: Vec<f64>,
}

impl StepOperator {
    pub fn new(kernel: StepGraphon) -> Self {
        Self { kernel }
    }

    /// `T_{W_A}` for the induced graphon of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        Self::new(induce_graphon(g))
    }

    pub fn kernel(&self) -> &StepGraphon {
        &self.kernel
    }

    pub fn partition(&self) -> &Partition {
        self.kernel.partition()
    }

    pub fn symmetrized(&self) -> Symmetrized {
        let mu = self.partition().measures();
        let kept: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] >= MIN_CELL).collect();
        let sqrt_measure: Vec<f64> = kept.iter().map(|&i| mu[i].sqrt()).collect();
        let b = self.kernel.values();
        let k = kept.len();
        let matrix = DMatrix::from_fn(k, k, |r, c| {
            sqrt_measure[r] * b[(kept[r], kept[c])] * sqrt_measure[c]
        });
        Symmetrized { matrix, kept, sqrt_measure }
    }

    /// Nonzero spectrum of the operator (zeros included for kept cells).
    pub fn eigenvalues(&self) -> DVector<f64> {
        let s = self.symmetrized().matrix;
        if s.nrows() == 0 {
            return DVector::zeros(0);
        }
        let mut v: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        DVector::from_vec(v)
    }

    /// Difference of two operators on the common refinement of their
    /// partitions.
    pub fn sub(&self, other: &StepOperator) -> StepOperator {
        let (a, b) = common_refinement(&self.kernel, &other.kernel);
        StepOperator::new(a.sub(&b).expect("shared partition"))
    }
}

/// `(Tψ)_i = Σ_j B_ij μ_j ψ_j`.
pub fn grso_apply(t: &StepOperator, s: &StepSignal) -> Result<StepSignal> {
    if !t.partition().same_as(s.partition()) {
        return Err(Error::PartitionMismatch);
    }
    let mu = t.partition().measures();
    let b = t.kernel().values();
    let k = mu.len();
    let weighted: Vec<Complex64> = (0..k).map(|j| s.values()[j] * mu[j]).collect();
    let out = DVector::from_fn(k, |i, _| (0..k).map(|j| weighted[j] * b[(i, j)]).sum());
    StepSignal::new(t.partition().clone(), out)
}

/// `h(T)` as a step operator, with `h(0) = 0` required.
///
/// The kernel is `B' = D^{-1/2} h(S) D^{-1/2}`. When `h(0) != 0`, `h(T)` is
/// not an integral operator (it acts as `h(0)` on the kernel of `T`), so this
/// fails; see [`filter_step_operator_on_range`].
pub fn filter_step_operator(h: &FilterSpec, t: &StepOperator) -> Result<StepOperator> {
    if !h.zero_at_zero() {
        return Err(Error::NonzeroAtZero(h.eval(0.0)));
    }
    filter_step_operator_on_range(h, t)
}

/// The step kernel that agrees with `h(T)` on step functions of `t`'s
/// partition, for any `h`. Off that subspace it acts as zero rather than
/// `h(0)`.
pub fn filter_step_operator_on_range(h: &FilterSpec, t: &StepOperator) -> Result<StepOperator> {
    let sym = t.symmetrized();
    let filtered = EigenDecomposition::new(&sym.matrix).filter(h)?;
    let k = t.partition().len();
    let mut values = DMatrix::zeros(k, k);
    for (r, &i) in sym.kept.iter().enumerate() {
        for (c, &j) in sym.kept.iter().enumerate() {
            values[(i, j)] = filtered[(r, c)] / (sym.sqrt_measure[r] * sym.sqrt_measure[c]);
        }
    }
    Ok(StepOperator::new(StepGraphon::new(t.partition().clone(), values)?))
}

/// `h(T) ψ` for any filter, exact for step signals: the operator and the
/// signal are refined to a common partition, where the complement of the
/// step functions lies in the kernel of `T` and receives `h(0)`.
pub fn graphon_filter_signal(h: &FilterSpec, t: &StepOperator, s: &StepSignal) -> Result<StepSignal> {
    let p = t.partition().common_refinement(s.partition());
    let kernel = t.kernel().refine_to(&p)?;
    let s = s.refine_to(&p)?;
    let op = StepOperator::new(kernel);
    let sym = op.symmetrized();
    let filtered = EigenDecomposition::new(&sym.matrix).filter(h)?;
    let h0 = h.eval(0.0);
    let mut out = s.values().map(|v| v * h0);
    let scaled: Vec<Complex64> = sym
        .kept
        .iter()
        .zip(&sym.sqrt_measure)
        .map(|(&i, &r)| s.values()[i] * r)
        .collect();
    for (row, &i) in sym.kept.iter().enumerate() {
        let acc: Complex64 = scaled.iter().enumerate().map(|(c, v)| v * filtered[(row, c)]).sum();
        out[i] = acc / sym.sqrt_measure[row];
    }
    StepSignal::new(p, out)
}

/// Which norm to measure operators in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Operator,
    /// Schatten `p`-norm; `f64::INFINITY` is the operator norm.
    Schatten(f64),
}

/// Largest singular value of `S`; for `P_n` and `B = nΔ` this is `‖Δ‖₂`.
pub fn operator_norm(t: &StepOperator) -> f64 {
    t.eigenvalues().iter().fold(0.0, |m, l| m.max(l.abs()))
}

/// `(Σ |λ_i|^p)^{1/p}`.
pub fn schatten_norm(t: &StepOperator, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(format!("Schatten exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(operator_norm(t));
    }
    let eig = t.eigenvalues();
    let peak = eig.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    // scale by the peak to avoid overflow for large p
    let sum: f64 = eig.iter().map(|l| (l.abs() / peak).powf(p)).sum();
    Ok(peak * sum.powf(1.0 / p))
}

pub fn norm(t: &StepOperator, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Operator => Ok(operator_norm(t)),
        NormKind::Schatten(p) => schatten_norm(t, p),
    }
}

/// `‖T_1 - T_2‖` in the chosen norm.
pub fn operator_distance(t1: &StepOperator, t2: &StepOperator, kind: NormKind) -> Result<f64> {
    norm(&t1.sub(t2), kind)
}

/// `‖h(T_1) - h(T_2)‖` in the chosen norm.
pub fn filter_distance(
    h: &FilterSpec,
    t1: &StepOperator,
    t2: &StepOperator,
    kind: NormKind,
) -> Result<f64> {
    let f1 = filter_step_operator(h, t1)?;
    let f2 = filter_step_operator(h, t2)?;
    operator_distance(&f1, &f2, kind)
}

/// `e^{i a M} = Q diag(e^{i a λ}) Q^T`.
pub fn unitary_exp(a: f64, m: &DMatrix<f64>) -> DMatrix<Complex64> {
    let eig = EigenDecomposition::new(m);
    let q = eig.eigenvectors.map(|v| Complex64::new(v, 0.0));
    let mut scaled = q.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, a * lam);
        for v in scaled.column_mut(j).iter_mut() {
            *v *= phase;
        }
    }
    scaled * q.transpose()
}

/// Largest singular value of a complex matrix.
pub fn complex_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Largest singular value of a Hermitian matrix via its eigenvalues.
pub fn hermitian_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().fold(0.0, |acc, l| acc.max(l.abs()))
}
