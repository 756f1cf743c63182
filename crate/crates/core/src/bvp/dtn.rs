//! Dirichlet-to-Neumann map f ↦ [T_ν U₀]₊ of the gauged solution, the
//! identity S𝒩 = −½ + K, and the continuity of the conormal derivative
//! of the double layer across Γ.

use crate::density::{BoundaryDensity, Component};
use crate::error::Result;
use crate::layer::{extrapolated_trace, BoundarySystem, Evaluator, LayerPotential, OffsetLadder, Side};
use crate::C64;

use super::solve::{solve_dirichlet, DirichletProblem, DirichletSolution, Route};

/// How one-sided limits on Γ are taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceMethod {
    /// Closed-form limit of the layer profiles.
    Exact,
    /// Neville extrapolation of values at offsets from Γ.
    Extrapolated(OffsetLadder),
}

impl TraceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TraceMethod::Exact => "exact",
            TraceMethod::Extrapolated(_) => "extrapolated",
        }
    }
}

/// Conormal limit of a layer potential from one side, with the Neville
/// error estimate (zero for the closed form).
fn conormal_limit(pot: &LayerPotential, side: Side, method: TraceMethod) -> Result<(BoundaryDensity, f64)> {
    let n = pot.operator().params().dim();
    match method {
        TraceMethod::Exact => Ok((pot.trace(side, Evaluator::Conormal, 0..n)?, 0.0)),
        TraceMethod::Extrapolated(ladder) => extrapolated_trace(pot, side, Evaluator::Conormal, 0..n, ladder),
    }
}

/// c·ν as a density.
fn normal_multiple(like: &BoundaryDensity, c: C64) -> BoundaryDensity {
    BoundaryDensity::normal(&like.grid()).scaled(c)
}

/// The Neumann datum of a Dirichlet problem with its identity residuals.
#[derive(Clone, Debug)]
pub struct DtnResult {
    /// [T_ν U₀]₊ with U₀ the mean-zero-pressure solution.
    pub neumann: BoundaryDensity,
    /// The same trace before the pressure constant is removed.
    pub ungauged: BoundaryDensity,
    /// ‖S𝒩f − (−½+K)f‖/‖f‖ with the gauged 𝒩f.
    pub gauged_residual: f64,
    /// ‖S𝒩f − (−½+K)f‖/‖f‖ with the ungauged trace.
    pub ungauged_residual: f64,
    /// Distance to (−½+K*)S⁺f, the conormal trace of the single-layer
    /// solution, after removing a multiple of ν, relative to ‖𝒩f‖.
    pub single_layer_route: f64,
    /// Neville change between the last two offsets, relative to ‖f‖.
    pub extrapolation_estimate: f64,
    pub solution: DirichletSolution,
}

/// Applies the Dirichlet-to-Neumann map to f.
pub fn dtn(system: &BoundarySystem, f: &BoundaryDensity, method: TraceMethod) -> Result<DtnResult> {
    let params = system.params();
    let problem = DirichletProblem::new(params, f.clone());
    let solution = solve_dirichlet(system, &problem, Route::DoubleLayer)?;
    let (ungauged, estimate) = conormal_limit(solution.potential(), Side::Interior, method)?;
    let mut neumann = ungauged.clone();
    neumann.axpy(C64::new(-1.0, 0.0), &normal_multiple(f, solution.pressure_shift))?;

    let scale = f.l2_norm().max(f64::MIN_POSITIVE);
    let mut target = system.k.apply(f)?;
    target.axpy(C64::new(-0.5, 0.0), f)?;
    let gauged_residual = system.s.apply(&neumann)?.sub(&target)?.l2_norm() / scale;
    let ungauged_residual = system.s.apply(&ungauged)?.sub(&target)?.l2_norm() / scale;

    let sl = solve_dirichlet(system, &problem, Route::SingleLayer)?;
    let mut via_sl = system.kstar.apply(&sl.density)?;
    via_sl.axpy(C64::new(-0.5, 0.0), &sl.density)?;
    let diff = via_sl.sub(&neumann)?;
    let diff = if problem.gauge { diff.project_out_normal()? } else { diff };
    let single_layer_route = diff.l2_norm() / neumann.l2_norm().max(f64::MIN_POSITIVE);

    Ok(DtnResult {
        neumann,
        ungauged,
        gauged_residual,
        ungauged_residual,
        single_layer_route,
        extrapolation_estimate: estimate / scale,
        solution,
    })
}

/// ‖𝒩(e^{iξ′·x′}a)‖ / ‖e^{iξ′·x′}a‖ on Γ₀ for the tangential direction a = e₁.
pub fn single_mode_gain(system: &BoundarySystem, mode: &[i64], method: TraceMethod) -> Result<f64> {
    let grid = system.params().grid;
    let t = grid
        .transverse_index(mode)
        .ok_or_else(|| crate::error::Error::Argument(format!("mode {mode:?} is not on the grid")))?;
    let mut f = BoundaryDensity::zeros(&grid, grid.dim());
    f.set(Component::Lower, t, 0, C64::new(1.0, 0.0));
    let r = dtn(system, &f, method)?;
    Ok(r.neumann.l2_norm() / f.l2_norm())
}

/// Ratio of the gains at |ξ′| = 2k and |ξ′| = k along the first axis.
pub fn growth_ratio(system: &BoundarySystem, k: i64, method: TraceMethod) -> Result<f64> {
    let n = system.params().dim();
    let axis = |m: i64| -> Vec<i64> {
        let mut v = vec![0; n - 1];
        v[0] = m;
        v
    };
    Ok(single_mode_gain(system, &axis(2 * k), method)? / single_mode_gain(system, &axis(k), method)?)
}

/// Residuals of [T_ν𝒟f]₊ = [T_ν𝒟f]₋ = (½+K*)𝒩f, relative to ‖f‖.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NoJumpReport {
    /// ‖[T_ν𝒟f]₊ − [T_ν𝒟f]₋‖.
    pub jump: f64,
    /// ‖[T_ν𝒟f]₊ − (½+K*)𝒩f‖ with the gauged 𝒩f.
    pub identity: f64,
    /// The same with the ungauged trace in place of 𝒩f.
    pub identity_ungauged: f64,
    pub extrapolation_estimate: f64,
}

impl NoJumpReport {
    pub fn max(&self) -> f64 {
        self.jump.max(self.identity)
    }
}

pub fn no_jump_check(system: &BoundarySystem, f: &BoundaryDensity, method: TraceMethod) -> Result<NoJumpReport> {
    let scale = f.l2_norm();
    if scale == 0.0 {
        return Ok(NoJumpReport::default());
    }
    let dl = LayerPotential::from_operator(system.double.clone(), f)?;
    let (plus, e1) = conormal_limit(&dl, Side::Interior, method)?;
    let (minus, e2) = conormal_limit(&dl, Side::Exterior, method)?;
    let d = dtn(system, f, method)?;
    let kstar = system.kstar.shifted(0.5)?;
    Ok(NoJumpReport {
        jump: plus.sub(&minus)?.l2_norm() / scale,
        identity: plus.sub(&kstar.apply(&d.neumann)?)?.l2_norm() / scale,
        identity_ungauged: plus.sub(&kstar.apply(&d.ungauged)?)?.l2_norm() / scale,
        extrapolation_estimate: e1.max(e2).max(d.extrapolation_estimate * scale) / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stokes::{Coefficient, StokesParams};
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn datum(grid: &TorusGrid, params: &StokesParams) -> BoundaryDensity {
        let f = BoundaryDensity::random_band_limited(grid, 2, 4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(21));
        if params.assumptions().v0_zero_inside {
            f.project_out_normal().unwrap()
        } else {
            f
        }
    }

    #[test]
    fn identity_and_no_jump_converge() {
        for v0 in [Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)] {
            let mut rows = Vec::new();
            for points in [32, 64] {
                let grid = TorusGrid::new(2, points).unwrap();
                let params = StokesParams::new(grid, Coefficient::Constant(1.0), v0).unwrap();
                let system = BoundarySystem::new(&params).unwrap();
                let f = datum(&grid, &params);
                let method = TraceMethod::Extrapolated(OffsetLadder::for_params(&params));
                let d = dtn(&system, &f, method).unwrap();
                let nj = no_jump_check(&system, &f, method).unwrap();
                let exact = dtn(&system, &f, TraceMethod::Exact).unwrap();
                eprintln!(
                    "{v0:?} N={points}: dtn {:.2e}/{:.2e} sl {:.2e} exact {:.2e} | jump {:.2e} id {:.2e}/{:.2e}",
                    d.gauged_residual, d.ungauged_residual, d.single_layer_route, exact.gauged_residual, nj.jump, nj.identity, nj.identity_ungauged
                );
                assert!(exact.gauged_residual < 1e-8, "{}", exact.gauged_residual);
                rows.push((d.gauged_residual, nj.max()));
            }
            assert!(rows[1].0 * 4.0 <= rows[0].0 && rows[1].1 * 4.0 <= rows[0].1, "{v0:?}: {rows:?}");
        }
    }

    #[test]
    fn growth_is_first_order() {
        let grid = TorusGrid::new(2, 64).unwrap();
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let system = BoundarySystem::new(&params).unwrap();
        let r = growth_ratio(&system, 8, TraceMethod::Exact).unwrap();
        assert!((1.5..=2.5).contains(&r), "{r}");
    }

    #[test]
    fn zero_datum() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let system = BoundarySystem::new(&params).unwrap();
        let r = no_jump_check(&system, &BoundaryDensity::zeros(&grid, 2), TraceMethod::Exact).unwrap();
        assert_eq!(r, NoJumpReport::default());
    }
}
