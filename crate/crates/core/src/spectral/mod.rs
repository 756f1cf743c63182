//! Torus grids, Fourier transforms, Sobolev norms, quadrature over ℝ and
//! lattice sums over ξ_n ∈ ℤ.

pub mod field;
pub mod grid;
pub mod modesum;
pub mod quadrature;

pub use field::{fft_1d, transform, Direction, SpectralField};
pub use grid::{index_of_mode, japanese_bracket, mode_of_index, TorusGrid};
pub use modesum::{mode_sum, mode_sum_richardson, neville_matrix, neville_zero, ModeSum};
pub use quadrature::{
    fourier_quadrature_vec, gauss_legendre, graded_rule, integrate_interval, line_quadrature,
    line_quadrature_vec, wynn_epsilon, QuadratureSpec,
};
