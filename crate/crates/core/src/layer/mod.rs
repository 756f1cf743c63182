//! Pseudoinverse of Ξ, layer potentials, boundary operators, jump relations
//! and the representation formula on the strip.

pub mod asymptotics;
pub mod boundary;
pub mod jumps;
pub mod kernel;
pub mod pompeiu;
pub mod potentials;
pub mod profile;
pub mod strip;

pub use profile::{Evaluator, ModeKernel, ModeOperator, Source};
pub use strip::StripSolver;
pub use kernel::{
    detect_kernel, embed_density, embed_source, layer_coefficients, pseudo_inverse_apply, KernelDetection, KernelSpace,
    LayerKind,
};
pub use potentials::{LayerOperator, LayerPotential, ModeResponse, Side};
pub use boundary::{adjoint_restriction_check, one_sided, AdjointReport, BoundaryOp, BoundaryOperatorMatrix};
pub use jumps::{extrapolated_trace, jump_residuals, pressure_jump_term, BoundarySystem, JumpReport, OffsetLadder};
pub use pompeiu::{pompeiu_residual, PompeiuReport};
pub use asymptotics::{k_eigenvalue_gap, symbol_asymptotics, symbol_deviation, AsymptoticReport, SymbolDeviation};
