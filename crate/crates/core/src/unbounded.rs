//! Unbounded shift operators diagonal in the Fourier basis `e^{2πikx}`,
//! their band projections, and finite-difference approximations.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::domain::{Graph, Partition, StepGraphon, StepSignal};
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::spectral::{complex_spectral_norm, filter_step_operator, StepOperator};

/// Largest `|k|` scanned when a model is given by a function.
pub const DEFAULT_SCAN: i64 = 1 << 14;

/// Bands used to validate function-defined models.
pub const PROBE_BANDS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

#[derive(Clone)]
enum Eigs {
    Laplace,
    Table(Vec<(i64, f64)>),
    Function { f: Arc<dyn Fn(i64) -> f64 + Send + Sync>, scan: i64 },
}

/// Eigen-data `k -> λ(k)` over the Fourier basis.
#[derive(Clone)]
pub struct FourierModel {
    eigs: Eigs,
}

impl std::fmt::Debug for FourierModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.eigs {
            Eigs::Laplace => f.write_str("FourierModel(laplace)"),
            Eigs::Table(t) => write!(f, "FourierModel(table, {} modes)", t.len()),
            Eigs::Function { scan, .. } => write!(f, "FourierModel(function, scan {scan})"),
        }
    }
}

/// Which sign the diagonal target carries in [`unbdd_convergence_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetSign {
    /// `−λ(k)`, the sign of the second-difference stencil.
    #[default]
    Stencil,
    /// `+λ(k)`.
    Model,
}

impl FourierModel {
    /// The circle Laplacian `−f''`, `λ(k) = 4π²k²`.
    pub fn laplace() -> Self {
        Self { eigs: Eigs::Laplace }
    }

    /// Finitely many modes; all other `k` are absent from the model.
    pub fn table(mut modes: Vec<(i64, f64)>) -> Result<Self> {
        modes.sort_by_key(|m| m.0);
        for w in modes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::param(format!("mode {} listed twice", w[0].0)));
            }
        }
        if let Some(&(k, l)) = modes.iter().find(|m| !m.1.is_finite()) {
            return Err(Error::param(format!("eigenvalue of mode {k} is {l}")));
        }
        Ok(Self { eigs: Eigs::Table(modes) })
    }

    /// A model defined for every `k`, scanned over `|k| <= scan`.
    ///
    /// Rejected when the eigenvalues in some probe band neither stop within
    /// the scan window nor have square-summable tails.
    pub fn from_fn(f: impl Fn(i64) -> f64 + Send + Sync + 'static, scan: i64) -> Result<Self> {
        if scan < 1 {
            return Err(Error::param("scan window must be positive"));
        }
        let model = Self { eigs: Eigs::Function { f: Arc::new(f), scan } };
        for band in PROBE_BANDS {
            let in_band: Vec<(i64, f64)> = model.modes().filter(|m| m.1.abs() <= band).collect();
            if let Some(&(k, l)) = in_band.iter().find(|m| !m.1.is_finite()) {
                return Err(Error::param(format!("eigenvalue of mode {k} is {l}")));
            }
            if in_band.iter().any(|m| m.0.abs() == scan) {
                let total: f64 = in_band.iter().map(|m| m.1 * m.1).sum();
                let tail: f64 = in_band.iter().filter(|m| m.0.abs() > scan / 2).map(|m| m.1 * m.1).sum();
                if tail > 1e-6 * total.max(f64::MIN_POSITIVE) {
                    return Err(Error::param(format!(
                        "eigenvalues in [-{band}, {band}] are not square-summable"
                    )));
                }
            }
        }
        Ok(model)
    }

    /// Parses `laplace` or `eigs:<file>` (lines `k lambda_k`, `#` comments).
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "laplace" {
            return Ok(Self::laplace());
        }
        match spec.strip_prefix("eigs:") {
            Some(path) => Self::read_table(Path::new(path)),
            None => Err(Error::Parse(format!("unknown model {spec:?}"))),
        }
    }

    pub fn read_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_table(&text)
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let mut modes = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `k lambda`", no + 1));
            let mut it = line.split_whitespace();
            let k: i64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let l: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if it.next().is_some() {
                return Err(bad());
            }
            modes.push((k, l));
        }
        Self::table(modes)
    }

    fn modes(&self) -> Box<dyn Iterator<Item = (i64, f64)> + '_> {
        match &self.eigs {
            Eigs::Laplace => unreachable!("laplace modes are enumerated in closed form"),
            Eigs::Table(t) => Box::new(t.iter().copied()),
            Eigs::Function { f, scan } => Box::new((-*scan..=*scan).map(move |k| (k, f(k)))),
        }
    }

    /// `λ(k)`, or `None` if `k` is not a mode of the model.
    pub fn eigenvalue(&self, k: i64) -> Option<f64> {
        match &self.eigs {
            Eigs::Laplace => Some(4.0 * PI * PI * (k * k) as f64),
            Eigs::Table(t) => t.binary_search_by_key(&k, |m| m.0).ok().map(|i| t[i].1),
            Eigs::Function { f, scan } => (k.abs() <= *scan).then(|| f(k)),
        }
    }

    /// Modes with `|λ(k)| <= lambda`, ascending in `k`.
    pub fn band(&self, lambda: f64) -> Result<Vec<i64>> {
        if !(lambda > 0.0) {
            return Err(Error::param(format!("band must be positive, got {lambda}")));
        }
        match &self.eigs {
            Eigs::Laplace => {
                let mut kmax = (lambda.sqrt() / (2.0 * PI)).floor() as i64;
                while 4.0 * PI * PI * ((kmax + 1) * (kmax + 1)) as f64 <= lambda {
                    kmax += 1;
                }
                while kmax > 0 && 4.0 * PI * PI * (kmax * kmax) as f64 > lambda {
                    kmax -= 1;
                }
                Ok((-kmax..=kmax).collect())
            }
            Eigs::Function { scan, .. } => {
                let band: Vec<i64> = self.modes().filter(|m| m.1.abs() <= lambda).map(|m| m.0).collect();
                if band.iter().any(|k| k.abs() == *scan) {
                    return Err(Error::Budget(format!("band {lambda} reaches the scan limit {scan}")));
                }
                Ok(band)
            }
            Eigs::Table(_) => Ok(self.modes().filter(|m| m.1.abs() <= lambda).map(|m| m.0).collect()),
        }
    }

    pub fn band_dimension(&self, lambda: f64) -> Result<usize> {
        Ok(self.band(lambda)?.len())
    }
}

fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

/// `∫_a^b e^{2πikx} dx`, in a form that stays accurate for short cells.
pub fn cell_integral(k: i64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    if k == 0 {
        return Complex64::new(len, 0.0);
    }
    let half = PI * k as f64 * len;
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    cis(PI * k as f64 * (a + b)) * (len * sinc)
}

/// `C[i, r] = ∫_{cell i} φ_{band[r]}`.
fn cell_matrix(p: &Partition, band: &[i64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(p.len(), band.len(), |i, r| {
        let (a, b) = p.cell(i);
        cell_integral(band[r], a, b)
    })
}

/// Coefficients `c_k = ⟨s, φ_k⟩` over a band, with the reconstruction
/// `Σ c_k φ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandProjection {
    pub band: Vec<i64>,
    pub coeffs: Vec<Complex64>,
}

impl BandProjection {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.band
            .iter()
            .zip(&self.coeffs)
            .map(|(&k, &c)| c * cis(2.0 * PI * k as f64 * x))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Projection of a step signal, with exact per-cell integrals.
pub fn project_step(model: &FourierModel, lambda: f64, s: &StepSignal) -> Result<BandProjection> {
    let band = model.band(lambda)?;
    let c = cell_matrix(s.partition(), &band);
    let coeffs = (0..band.len())
        .map(|r| (0..c.nrows()).map(|i| s.values()[i] * c[(i, r)].conj()).sum())
        .collect();
    Ok(BandProjection { band, coeffs })
}

/// Projection of a function sampled on the grid `j / samples`; exact for
/// trigonometric polynomials of degree below `samples / 2`.
pub fn project_sampled(
    model: &FourierModel,
    lambda: f64,
    f: impl Fn(f64) -> Complex64,
    samples: usize,
) -> Result<BandProjection> {
    let band = model.band(lambda)?;
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let values: Vec<Complex64> = (0..samples).map(|j| f(j as f64 / samples as f64)).collect();
    let coeffs = band
        .iter()
        .map(|&k| {
            values
                .iter()
                .enumerate()
                .map(|(j, &v)| v * cis(-2.0 * PI * (k * j as i64) as f64 / samples as f64))
                .sum::<Complex64>()
                / samples as f64
        })
        .collect();
    Ok(BandProjection { band, coeffs })
}

/// The band projector acting on functions sampled at `j / samples`.
pub fn band_projector(model: &FourierModel, lambda: f64, samples: usize) -> Result<DMatrix<Complex64>> {
    let band = model.band(lambda)?;
    let kmax = band.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0) as usize;
    if samples <= 2 * kmax {
        return Err(Error::param(format!("{samples} samples cannot resolve mode {kmax}")));
    }
    let f = DMatrix::from_fn(samples, band.len(), |j, r| {
        cis(2.0 * PI * (band[r] * j as i64) as f64 / samples as f64)
    });
    Ok(&f * f.adjoint() / Complex64::new(samples as f64, 0.0))
}

/// The circulant second-difference GSO: `−2` on the diagonal, `1` on the
/// neighbours with wrap-around.
pub fn finite_difference_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param(format!("finite-difference graphs need n >= 3, got {n}")));
    }
    let gso = DMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        if d == 0 {
            -2.0
        } else if d == 1 || d == n - 1 {
            1.0
        } else {
            0.0
        }
    });
    Graph::from_gso(gso)
}

/// Scale at which the finite-difference operator approximates `f''`.
pub fn default_laplace_scale(n: usize) -> f64 {
    (n * n) as f64
}

/// `T` of the graph with GSO `scale · Δ_n`.
pub fn laplace_step_operator(n: usize, scale: f64) -> Result<StepOperator> {
    let g = finite_difference_graph(n)?;
    Ok(StepOperator::from_graph(&Graph::from_gso(g.gso() * scale)?))
}

/// `⟨T φ_k, φ_k'⟩` for `k, k'` in the band: `Cᴴ B C` with `C` the cell
/// integrals of the modes.
pub fn compressed_operator(model: &FourierModel, lambda: f64, t: &StepOperator) -> Result<DMatrix<Complex64>> {
    let band = model.band(lambda)?;
    Ok(compress(&band, t))
}

fn compress(band: &[i64], t: &StepOperator) -> DMatrix<Complex64> {
    let c = cell_matrix(t.partition(), band);
    let b = t.kernel().values().map(|x| Complex64::new(x, 0.0));
    c.adjoint() * b * c
}

fn diagonal_target(model: &FourierModel, band: &[i64], sign: TargetSign) -> DMatrix<Complex64> {
    let s = match sign {
        TargetSign::Stencil => -1.0,
        TargetSign::Model => 1.0,
    };
    let d = DVector::from_iterator(
        band.len(),
        band.iter().map(|&k| Complex64::new(s * model.eigenvalue(k).expect("band mode"), 0.0)),
    );
    DMatrix::from_diagonal(&d)
}

/// `‖P T P − (±𝓛) P‖` in the band basis.
pub fn unbdd_convergence_gap(
    model: &FourierModel,
    lambda: f64,
    t: &StepOperator,
    sign: TargetSign,
) -> Result<f64> {
    let band = model.band(lambda)?;
    let m = compress(&band, t) - diagonal_target(model, &band, sign);
    Ok(complex_spectral_norm(&m))
}

/// `‖P T^k P − (P T P)^k‖` in the band basis.
pub fn approx_commutation_gap(model: &FourierModel, lambda: f64, t: &StepOperator, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("power must be at least 1"));
    }
    combination_gap(model, lambda, t, &FilterSpec::monomial(k as usize))
}

/// `‖P h(T) P − h(P T P)‖` for a polynomial `h`, with
/// `P h(T) P` assembled from the powers of `T` one term at a time.
pub fn combination_gap(model: &FourierModel, lambda: f64, t: &StepOperator, h: &FilterSpec) -> Result<f64> {
    let coeffs = match h.kind() {
        crate::filters::FilterKind::Polynomial(c) => c.clone(),
        _ => return Err(Error::param("combination gaps need a polynomial filter")),
    };
    let band = model.band(lambda)?;
    let ptp = compress(&band, t);
    let d = band.len();
    // P h(T) P term by term; T^1 is used as given
    let c0 = coeffs.first().copied().unwrap_or(0.0);
    let mut filtered = DMatrix::<Complex64>::identity(d, d) * Complex64::new(c0, 0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(1) {
        if c == 0.0 {
            continue;
        }
        let term = if i == 1 { ptp.clone() } else { compress(&band, &filter_step_operator(&FilterSpec::monomial(i), t)?) };
        filtered += term * Complex64::new(c, 0.0);
    }
    // Horner in the compressed matrix
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for &c in coeffs.iter().rev() {
        acc = &acc * &ptp + DMatrix::identity(d, d) * Complex64::new(c, 0.0);
    }
    Ok(complex_spectral_norm(&(filtered - acc)))
}

/// A step kernel sampled from `Σ_k s·λ(k) φ_k(x) conj(φ_k(y))` at cell
/// midpoints of `P_n`.
pub fn truncated_model_kernel(model: &FourierModel, lambda: f64, n: usize, sign: TargetSign) -> Result<StepOperator> {
    let band = model.band(lambda)?;
    let s = if sign == TargetSign::Stencil { -1.0 } else { 1.0 };
    let p = Partition::uniform(n)?;
    let mid = p.midpoints();
    let values = DMatrix::from_fn(n, n, |i, j| {
        band.iter()
            .map(|&k| s * model.eigenvalue(k).unwrap() * (2.0 * PI * k as f64 * (mid[i] - mid[j])).cos())
            .sum()
    });
    Ok(StepOperator::new(StepGraphon::new(p, values)?))
}
