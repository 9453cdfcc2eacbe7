use super::{FilterSpec, Periodic, Regularity};
use crate::error::{Error, Result};

/// Cubic Hermite interpolant on `[0, len]` with values `y0, y1` and slopes
/// `m0, m1` at the ends, evaluated at `s ∈ [0, len]`.
pub fn hermite_blend(y0: f64, m0: f64, y1: f64, m1: f64, len: f64, s: f64) -> f64 {
    let t = s / len;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * len * m0 + h01 * y1 + h11 * len * m1
}

fn hermite_blend_derivative(y0: f64, m0: f64, y1: f64, m1: f64, len: f64, s: f64) -> f64 {
    let t = s / len;
    let t2 = t * t;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    (d00 * y0 + d01 * y1) / len + d10 * m0 + d11 * m1
}

/// The periodic extension of a filter from `[-Γ, Γ]` to period
/// `γ = 2(Γ + margin)`.
///
/// On `[Γ, Γ + 2 margin]` (which wraps around to `-Γ`) the extension is the
/// cubic Hermite blend between `(h(Γ), h'(Γ))` and `(h(-Γ), h'(-Γ))`, so the
/// result is `C^1` with a piecewise-polynomial, hence Lipschitz, derivative.
#[derive(Debug, Clone)]
pub struct PeriodicExtension {
    filter: FilterSpec,
    gamma_bound: f64,
    margin: f64,
    ends: [f64; 4],
}

impl PeriodicExtension {
    pub const BLEND: &'static str = "cubic-hermite";

    /// Extension with margin 1, i.e. period `2(Γ + 1)`.
    pub fn new(filter: &FilterSpec) -> Result<Self> {
        Self::with_margin(filter, 1.0)
    }

    pub fn with_margin(filter: &FilterSpec, margin: f64) -> Result<Self> {
        let gamma_bound = filter.domain_bound();
        if !(gamma_bound > 0.0) || !(margin > 0.0) {
            return Err(Error::param("domain bound and margin must be positive"));
        }
        if filter.regularity() < Regularity::SmoothLipschitzDerivative {
            return Err(Error::Regularity(format!(
                "filter {filter} is declared {:?}; a C^1 filter with Lipschitz derivative is required",
                filter.regularity()
            )));
        }
        check_denominator(filter)?;
        let h = |x: f64| filter.eval(x);
        let dh = |x: f64| {
            filter.derivative(x).ok_or_else(|| {
                Error::Regularity(format!("filter {filter} has no derivative"))
            })
        };
        let ends = [h(gamma_bound), dh(gamma_bound)?, h(-gamma_bound), dh(-gamma_bound)?];
        if ends.iter().any(|v| !v.is_finite()) {
            return Err(Error::Regularity(format!("filter {filter} is not finite at ±Γ")));
        }
        Ok(Self { filter: filter.clone(), gamma_bound, margin, ends })
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn gamma_bound(&self) -> f64 {
        self.gamma_bound
    }

    /// Maps `t` into the fundamental window `[-Γ, Γ + 2 margin)`.
    fn reduce(&self, t: f64) -> f64 {
        if t >= -self.gamma_bound && t < self.gamma_bound + 2.0 * self.margin {
            return t;
        }
        (t + self.gamma_bound).rem_euclid(self.period()) - self.gamma_bound
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = self.reduce(t);
        if s <= self.gamma_bound {
            self.filter.derivative(s).unwrap_or(f64::NAN)
        } else {
            let [y0, m0, y1, m1] = self.ends;
            hermite_blend_derivative(y0, m0, y1, m1, 2.0 * self.margin, s - self.gamma_bound)
        }
    }
}

impl Periodic for PeriodicExtension {
    fn period(&self) -> f64 {
        2.0 * (self.gamma_bound + self.margin)
    }

    fn eval(&self, t: f64) -> f64 {
        let s = self.reduce(t);
        if s <= self.gamma_bound {
            self.filter.eval(s)
        } else {
            let [y0, m0, y1, m1] = self.ends;
            hermite_blend(y0, m0, y1, m1, 2.0 * self.margin, s - self.gamma_bound)
        }
    }
}

/// Rational filters must keep their denominator away from zero on `[-Γ, Γ]`.
fn check_denominator(filter: &FilterSpec) -> Result<()> {
    if !matches!(filter.kind(), super::FilterKind::Rational { .. }) {
        return Ok(());
    }
    let g = filter.domain_bound();
    let samples = 4001;
    let vals: Vec<f64> = (0..samples)
        .map(|i| filter.denominator(-g + 2.0 * g * i as f64 / (samples - 1) as f64))
        .collect();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let sign_change = vals.windows(2).any(|w| w[0].signum() != w[1].signum());
    if sign_change || vals.iter().any(|v| v.abs() < 1e-12 * scale) {
        return Err(Error::Regularity(format!(
            "denominator of {filter} vanishes on [-{g}, {g}]"
        )));
    }
    Ok(())
}
