use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default number of samples per period for coefficient computation.
pub const DEFAULT_SAMPLES: usize = 1 << 14;

/// A real function with period `γ`.
pub trait Periodic {
    fn period(&self) -> f64;
    fn eval(&self, t: f64) -> f64;
}

/// A closure with a declared period.
pub struct FnPeriodic<F> {
    pub period: f64,
    pub f: F,
}

impl<F: Fn(f64) -> f64> Periodic for FnPeriodic<F> {
    fn period(&self) -> f64 {
        self.period
    }

    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

/// Fourier coefficients `ĥ(n) = (1/γ) ∫ h(t) e^{-2πint/γ} dt` for
/// `-N <= n <= N`.
#[derive(Debug, Clone)]
pub struct FourierCoefficients {
    period: f64,
    n_max: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn get(&self, n: i64) -> Complex64 {
        assert!(n.unsigned_abs() as usize <= self.n_max, "coefficient {n} not computed");
        self.coeffs[(n + self.n_max as i64) as usize]
    }

    /// `(S_N h)(t)` for `N <= n_max`.
    pub fn partial_sum(&self, t: f64, n: usize) -> f64 {
        assert!(n <= self.n_max);
        let w = 2.0 * PI * t / self.period;
        let mut acc = self.get(0).re;
        for m in 1..=n as i64 {
            let e = Complex64::from_polar(1.0, w * m as f64);
            acc += 2.0 * (self.get(m) * e).re;
        }
        acc
    }

    /// `Σ |ĥ(n)|^2` over the computed range.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_{|n| <= N} |ĥ(n)| |n|`.
    pub fn weighted_abs_sum(&self, n: usize) -> f64 {
        (1..=n as i64).map(|m| (self.get(m).norm() + self.get(-m).norm()) * m as f64).sum()
    }
}

/// Coefficients from `samples` uniform samples of one period and a discrete
/// Fourier transform.
pub fn fourier_coefficients(
    h: &impl Periodic,
    n_max: usize,
    samples: usize,
) -> Result<FourierCoefficients> {
    if !samples.is_power_of_two() {
        return Err(Error::param(format!("sample count {samples} is not a power of two")));
    }
    if n_max > samples / 4 {
        return Err(Error::param(format!(
            "n_max {n_max} exceeds a quarter of the sample count {samples}"
        )));
    }
    let period = h.period();
    let start = -0.5 * period;
    let mut buf: Vec<Complex64> = (0..samples)
        .map(|j| Complex64::new(h.eval(start + period * j as f64 / samples as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    let scale = 1.0 / samples as f64;
    let coeffs = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let idx = n.rem_euclid(samples as i64) as usize;
            // shift from the window start -γ/2: e^{-2πin(-1/2)} = (-1)^n
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            buf[idx] * scale * sign
        })
        .collect();
    Ok(FourierCoefficients { period, n_max, coeffs })
}
