//! Filter specifications and the regularity analysis behind the linear
//! stability bound: periodic `C^{1,1}` extension, Fourier coefficients and the
//! resulting constants.

mod extension;
mod fourier;
mod spec;
mod stability;

pub use extension::{hermite_blend, PeriodicExtension};
pub use fourier::{fourier_coefficients, FnPeriodic, FourierCoefficients, Periodic, DEFAULT_SAMPLES};
pub use spec::{FilterKind, FilterSpec, Regularity};
pub use stability::{
    jackson_gap, lipschitz_estimate, stability_constant, stability_constant_with, StabilityConstant,
    DEFAULT_TRUNCATION,
};
