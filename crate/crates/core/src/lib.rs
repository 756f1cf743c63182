//! Spectral layer-potential engine for the generalized Stokes operator
//! Ξ_{V,V₀} = (2Def*Def + V, ∇; ∇*, −V₀) on a flat torus strip.

pub mod bvp;
pub mod density;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod layer;
pub mod lateral;
pub mod spectral;
pub mod stokes;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for symbols and operator blocks.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
