//! Generalized Stokes operator Ξ_{V,V₀} on the torus, the strip Ω and the
//! Green-type identities.

pub mod green;
pub mod ops;
pub mod params;

pub use green::{energy_report, green_residuals, EnergyReport, GreenResiduals, StripIntegrator};
pub use ops::{
    apply_first_order, apply_xi, apply_xi_symbol, conormal, conormal_density, multiply_by, slice_trace,
    velocity_trace, VelocityPressureField,
};
pub use params::{Assumptions, Coefficient, KernelCase, StokesParams, KERNEL_THRESHOLD};
