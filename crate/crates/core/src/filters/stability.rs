use std::f64::consts::PI;

use serde::Serialize;

use super::{fourier_coefficients, FilterSpec, Periodic, PeriodicExtension, DEFAULT_SAMPLES};
use crate::error::{Error, Result};

/// Default truncation `N` of the coefficient sum.
pub const DEFAULT_TRUNCATION: usize = 2048;

/// The constants of the linear stability bound for one filter.
///
/// `coeff_sum` is `C = Σ_{|n|<=N} |ĥ_ext(n)| |n|` for the periodic extension
/// of period `gamma`; `lemma_constant = 2 + 2πC/γ` bounds
/// `‖h(A) - h(B)‖ / ‖A - B‖` for self-adjoint `A, B` with spectra in
/// `[-Γ, Γ]`. `tail_estimate` extrapolates the neglected part of the sum
/// from a `c/n^2` fit and is never added to `coeff_sum`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StabilityConstant {
    pub gamma: f64,
    pub coeff_sum: f64,
    pub lemma_constant: f64,
    pub truncation_n: usize,
    pub tail_estimate: f64,
    pub blend: &'static str,
}

pub fn stability_constant(h: &FilterSpec, n_max: usize) -> Result<StabilityConstant> {
    stability_constant_with(h, n_max, DEFAULT_SAMPLES)
}

pub fn stability_constant_with(
    h: &FilterSpec,
    n_max: usize,
    samples: usize,
) -> Result<StabilityConstant> {
    if !h.zero_at_zero() {
        return Err(Error::NonzeroAtZero(h.eval(0.0)));
    }
    let ext = PeriodicExtension::new(h)?;
    constant_from_periodic(&ext, n_max, samples)
}

/// Same as [`stability_constant`] for an already periodic function.
pub(crate) fn constant_from_periodic(
    f: &impl Periodic,
    n_max: usize,
    samples: usize,
) -> Result<StabilityConstant> {
    let coeffs = fourier_coefficients(f, n_max, samples)?;
    let gamma = f.period();
    let coeff_sum = coeffs.weighted_abs_sum(n_max);

    // least-squares fit of a_n ≈ c / n^2 over the top decade
    let lo = (n_max / 10).max(1);
    let (mut num, mut den) = (0.0, 0.0);
    for n in lo..=n_max {
        let a = (coeffs.get(n as i64).norm() + coeffs.get(-(n as i64)).norm()) * n as f64;
        let basis = 1.0 / (n as f64 * n as f64);
        num += a * basis;
        den += basis * basis;
    }
    let c = if den > 0.0 { num / den } else { 0.0 };
    let tail_estimate = c / (n_max as f64 + 0.5);

    Ok(StabilityConstant {
        gamma,
        coeff_sum,
        lemma_constant: 2.0 + 2.0 * PI * coeff_sum / gamma,
        truncation_n: n_max,
        tail_estimate,
        blend: PeriodicExtension::BLEND,
    })
}

/// Largest slope of `h` on a uniform grid of `[a, b]`: `max |h'|` at the grid
/// points when a derivative exists, else the largest difference quotient.
/// A lower estimate of the Lipschitz constant, for reporting.
pub fn lipschitz_estimate(h: &FilterSpec, a: f64, b: f64, grid: usize) -> Result<f64> {
    if grid < 1000 {
        return Err(Error::param("lipschitz_estimate needs a grid of at least 1000 points"));
    }
    if !(b > a) {
        return Err(Error::param("empty interval"));
    }
    let xs: Vec<f64> = (0..grid).map(|i| a + (b - a) * i as f64 / (grid - 1) as f64).collect();
    if h.derivative(a).is_some() {
        Ok(xs.iter().map(|&x| h.derivative(x).unwrap().abs()).fold(0.0, f64::max))
    } else {
        let dx = (b - a) / (grid - 1) as f64;
        Ok(xs.windows(2).map(|w| ((h.eval(w[1]) - h.eval(w[0])) / dx).abs()).fold(0.0, f64::max))
    }
}

/// `sup |h - S_n h|` over a `10n`-point grid of one period.
pub fn jackson_gap(h: &impl Periodic, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("jackson_gap needs n >= 2"));
    }
    let samples = DEFAULT_SAMPLES.max((4 * n).next_power_of_two());
    let coeffs = fourier_coefficients(h, n, samples)?;
    let g = h.period();
    let points = 10 * n;
    Ok((0..points)
        .map(|i| {
            let t = -0.5 * g + g * i as f64 / points as f64;
            (h.eval(t) - coeffs.partial_sum(t, n)).abs()
        })
        .fold(0.0, f64::max))
}
