use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Step for central differences on tabulated filters without a derivative.
const FD_STEP: f64 = 1e-5;

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Declared smoothness of a tabulated filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Regularity {
    Continuous,
    Lipschitz,
    /// `C^1` with Lipschitz derivative.
    SmoothLipschitzDerivative,
}

#[derive(Clone)]
pub enum FilterKind {
    /// Coefficients in ascending order.
    Polynomial(Vec<f64>),
    /// `p(x) / q(x)`, both with ascending coefficients.
    Rational { num: Vec<f64>, den: Vec<f64> },
    Tabulated {
        f: Arc<ScalarFn>,
        df: Option<Arc<ScalarFn>>,
        regularity: Regularity,
    },
}

impl fmt::Debug for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            FilterKind::Rational { num, den } => {
                f.debug_struct("Rational").field("num", num).field("den", den).finish()
            }
            FilterKind::Tabulated { regularity, df, .. } => f
                .debug_struct("Tabulated")
                .field("regularity", regularity)
                .field("has_derivative", &df.is_some())
                .finish(),
        }
    }
}

/// A scalar filter `h` used through functional calculus, with the interval
/// `[-Γ, Γ]` it is meant to act on.
#[derive(Debug, Clone)]
pub struct FilterSpec {
    kind: FilterKind,
    domain_bound: f64,
    zero_at_zero: bool,
    label: String,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, &c)| acc * x + c * i as f64)
}

fn join(coeffs: &[f64]) -> String {
    coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl FilterSpec {
    fn build(kind: FilterKind, label: String) -> Self {
        let mut spec = Self { kind, domain_bound: 1.0, zero_at_zero: false, label };
        spec.zero_at_zero = spec.eval(0.0).abs() <= 1e-12;
        spec
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let label = format!("poly:{}", join(&coeffs));
        Self::build(FilterKind::Polynomial(coeffs), label)
    }

    pub fn rational(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if den.iter().all(|&d| d == 0.0) {
            return Err(Error::param("rational filter with zero denominator"));
        }
        let label = format!("rat:{}/{}", join(&num), join(&den));
        Ok(Self::build(FilterKind::Rational { num, den }, label))
    }

    pub fn tabulated(
        label: impl Into<String>,
        regularity: Regularity,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Arc<ScalarFn>>,
    ) -> Self {
        Self::build(FilterKind::Tabulated { f: Arc::new(f), df, regularity }, label.into())
    }

    pub fn identity() -> Self {
        Self::polynomial(vec![0.0, 1.0]).labeled("id")
    }

    pub fn square() -> Self {
        Self::polynomial(vec![0.0, 0.0, 1.0]).labeled("sq")
    }

    pub fn cube_minus_id() -> Self {
        Self::polynomial(vec![0.0, -1.0, 0.0, 1.0]).labeled("cube-minus-id")
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self::polynomial(c)
    }

    /// Parses `poly:c0,c1,..`, `rat:c0,c1,../d0,d1,..`, or one of the presets
    /// `id`, `sq`, `cube-minus-id`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("filter {s:?}: {why}"));
        let coeffs = |list: &str| -> Result<Vec<f64>> {
            if list.is_empty() {
                return Err(bad("empty coefficient list"));
            }
            list.split(',')
                .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad coefficient {t:?}"))))
                .collect()
        };
        if s.chars().any(char::is_whitespace) {
            return Err(bad("whitespace is not allowed"));
        }
        match s {
            "id" => return Ok(Self::identity()),
            "sq" => return Ok(Self::square()),
            "cube-minus-id" => return Ok(Self::cube_minus_id()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            return Ok(Self::polynomial(coeffs(rest)?));
        }
        if let Some(rest) = s.strip_prefix("rat:") {
            let (n, d) = rest.split_once('/').ok_or_else(|| bad("expected num/den"))?;
            return Self::rational(coeffs(n)?, coeffs(d)?);
        }
        Err(bad("unknown filter"))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_domain_bound(mut self, gamma: f64) -> Self {
        self.domain_bound = gamma;
        self
    }

    pub fn kind(&self) -> &FilterKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Γ`: the filter is meant for spectra inside `[-Γ, Γ]`.
    pub fn domain_bound(&self) -> f64 {
        self.domain_bound
    }

    pub fn zero_at_zero(&self) -> bool {
        self.zero_at_zero
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            FilterKind::Polynomial(c) => horner(c, x),
            FilterKind::Rational { num, den } => horner(num, x) / horner(den, x),
            FilterKind::Tabulated { f, .. } => f(x),
        }
    }

    /// Denominator value for rational filters, 1 otherwise.
    pub fn denominator(&self, x: f64) -> f64 {
        match &self.kind {
            FilterKind::Rational { den, .. } => horner(den, x),
            _ => 1.0,
        }
    }

    /// `h'(x)` when the filter is differentiable: exact for polynomial and
    /// rational filters, a central difference for smooth tabulated ones.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match &self.kind {
            FilterKind::Polynomial(c) => Some(horner_derivative(c, x)),
            FilterKind::Rational { num, den } => {
                let (p, q) = (horner(num, x), horner(den, x));
                let (dp, dq) = (horner_derivative(num, x), horner_derivative(den, x));
                Some((dp * q - p * dq) / (q * q))
            }
            FilterKind::Tabulated { df: Some(df), .. } => Some(df(x)),
            FilterKind::Tabulated { f, df: None, regularity } => {
                (*regularity == Regularity::SmoothLipschitzDerivative)
                    .then(|| (f(x + FD_STEP) - f(x - FD_STEP)) / (2.0 * FD_STEP))
            }
        }
    }

    pub fn regularity(&self) -> Regularity {
        match &self.kind {
            FilterKind::Polynomial(_) | FilterKind::Rational { .. } => {
                Regularity::SmoothLipschitzDerivative
            }
            FilterKind::Tabulated { regularity, .. } => *regularity,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, FilterKind::Polynomial(_))
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
