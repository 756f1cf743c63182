//! Dirichlet problem, Dirichlet-to-Neumann map and spectra of the boundary
//! operators on the strip.

pub mod solve;

pub use solve::{
    apply_xi_profile, compare_fields, compare_solutions, interior_heights, normal_complement, route_operator, solve_dirichlet,
    stability_constant, strip_rule, DirichletProblem, DirichletSolution, Route, RouteComparison, SolveDiagnostics,
    StabilityReport, COMPATIBILITY_TOLERANCE,
};
pub mod dtn;

pub use dtn::{dtn, growth_ratio, no_jump_check, single_mode_gain, DtnResult, NoJumpReport, TraceMethod};
pub mod spectrum;

pub use spectrum::{half_plus_k_floor, operator_spectrum, s_floor, spectrum_of, OperatorSpectrum, SpectrumReport, KERNEL_TOLERANCE};
