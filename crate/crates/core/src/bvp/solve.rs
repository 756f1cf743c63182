//! Dirichlet problem Ξ U = 0 in Ω, u = f on Γ, by a second-kind equation
//! for the double layer or a first-kind equation for the single layer.

use nalgebra::DMatrix;

use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::lattice::Approach;
use crate::linalg::{hermitian_singular_pairs, pseudo_inverse, singular_values};
use crate::layer::{BoundaryOperatorMatrix, BoundarySystem, Evaluator, LayerKind, LayerPotential, Side};
use crate::spectral::japanese_bracket;
use crate::stokes::green::composite_rule;
use crate::stokes::StokesParams;
use crate::{CMatrix, C64};

/// Largest |(f, ν)_Γ| accepted when the pressure constant is undetermined.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-10;

/// Relative singular-value cutoff for the per-mode boundary solves.
const SOLVE_CUTOFF: f64 = 1e-10;

/// Panels and order of the Gauss–Legendre rule across Ω.
const PANELS: usize = 4;
const ORDER: usize = 16;

/// Which boundary integral equation represents the solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// U = 𝒟(φ) with (½ + K)φ = f.
    DoubleLayer,
    /// U = 𝒮(ψ) with Sψ = f.
    SingleLayer,
}

impl Route {
    pub const BOTH: [Route; 2] = [Route::DoubleLayer, Route::SingleLayer];

    pub fn name(self) -> &'static str {
        match self {
            Route::DoubleLayer => "double_layer",
            Route::SingleLayer => "single_layer",
        }
    }

    fn kind(self) -> LayerKind {
        match self {
            Route::DoubleLayer => LayerKind::Double,
            Route::SingleLayer => LayerKind::Single,
        }
    }
}

/// Boundary datum on both components plus the pressure gauge.
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub params: StokesParams,
    pub f: BoundaryDensity,
    /// Normalize the pressure to mean zero on Ω.
    pub gauge: bool,
    /// Remove an incompatible flux instead of failing.
    pub project_incompatible: bool,
}

impl DirichletProblem {
    /// The gauge is on exactly when V₀ vanishes on Ω, where the Dirichlet
    /// problem fixes the pressure only up to a constant.
    pub fn new(params: &StokesParams, f: BoundaryDensity) -> Self {
        let gauge = params.assumptions().v0_zero_inside;
        Self { params: params.clone(), f, gauge, project_incompatible: false }
    }

    pub fn with_projection(mut self, on: bool) -> Self {
        self.project_incompatible = on;
        self
    }

    /// The flux (f, ν)_Γ.
    pub fn flux(&self) -> Result<C64> {
        self.f.inner(&BoundaryDensity::normal(&self.params.grid))
    }

    /// The datum actually solved for, after the compatibility check.
    fn admissible(&self, warnings: &mut Vec<String>) -> Result<BoundaryDensity> {
        if !self.gauge {
            return Ok(self.f.clone());
        }
        let flux = self.flux()?;
        if flux.norm() <= COMPATIBILITY_TOLERANCE {
            return Ok(self.f.clone());
        }
        if self.project_incompatible {
            warnings.push(format!("datum flux {:.3e} projected out", flux.norm()));
            self.f.project_out_normal()
        } else {
            Err(Error::Gauge(format!(
                "(f, nu) = {:.3e} exceeds {COMPATIBILITY_TOLERANCE:e} while V0 vanishes on the strip",
                flux.norm()
            )))
        }
    }
}

/// Accuracy figures of one solve.
#[derive(Clone, Debug, Default)]
pub struct SolveDiagnostics {
    /// ‖[u]₊ − f‖/‖f‖ with the exact one-sided limit of the potential.
    pub trace_error: f64,
    /// max |ΞU| on L/8 ≤ x_n ≤ 7L/8 relative to max |U| there.
    pub interior_residual: f64,
    /// Largest relative residual of the per-mode boundary solves.
    pub algebraic_residual: f64,
    /// |(f, ν)_Γ| of the supplied datum.
    pub flux: f64,
    /// Smallest singular value met among the modes of the datum.
    pub smallest_singular_value: f64,
    /// (‖u‖_{H^{m+1}(Ω)} + ‖p − p̄‖_{H^m(Ω)}) / ‖f‖_{H^{m+1/2}(Γ)} for m = 0, 1, 2.
    pub norm_ratio: [f64; 3],
    pub warnings: Vec<String>,
}

/// A solved Dirichlet problem.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub route: Route,
    pub density: BoundaryDensity,
    potential: LayerPotential,
    /// Constant subtracted from the pressure (ξ′ = 0 mode) by the gauge.
    pub pressure_shift: C64,
    pub diagnostics: SolveDiagnostics,
}

/// Gauss–Legendre nodes and weights on (0, L).
pub fn strip_rule(strip: f64) -> (Vec<f64>, Vec<f64>) {
    composite_rule(0.0, strip, PANELS, ORDER)
}

/// Heights of the interior check points.
pub fn interior_heights(strip: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| strip / 8.0 + 0.75 * strip * j as f64 / (count - 1) as f64).collect()
}

/// Ξ applied to the x_n-profile of a field at transverse frequency ξ′,
/// given the profile and its first two derivatives at height x.
pub fn apply_xi_profile(params: &StokesParams, xi_t: &[f64], x: f64, d: [&[C64]; 3]) -> Vec<C64> {
    let n = xi_t.len() + 1;
    let v = params.v.value(x);
    let v0 = params.v0.value(x);
    let q: f64 = xi_t.iter().map(|a| a * a).sum();
    let i = C64::new(0.0, 1.0);
    // ξ·u at derivative level j, with ξ_n acting as −i∂_n.
    let dot = |j: usize| -> C64 {
        let mut s: C64 = (0..n - 1).map(|a| d[j][a] * xi_t[a]).sum();
        s += -i * d[j + 1][n - 1];
        s
    };
    let (w0, w1) = (dot(0), dot(1));
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    for a in 0..n - 1 {
        out[a] = d[0][a] * (q + v) - d[2][a] + w0 * xi_t[a] + i * xi_t[a] * d[0][n];
    }
    out[n - 1] = d[0][n - 1] * (q + v) - d[2][n - 1] - i * w1 + d[1][n];
    out[n] = -i * w0 - d[0][n] * v0;
    out
}

impl DirichletSolution {
    pub fn params(&self) -> &StokesParams {
        self.potential.operator().params()
    }

    pub fn potential(&self) -> &LayerPotential {
        &self.potential
    }

    /// Gauged value of the evaluator at (ξ′ index, x_n).
    pub fn eval(&self, mode: usize, x: f64, approach: Approach, ev: Evaluator) -> Result<Vec<C64>> {
        let mut v = self.potential.eval(mode, x, approach, ev)?;
        if mode == 0 && self.pressure_shift != C64::new(0.0, 0.0) {
            let n = self.params().dim();
            match ev {
                Evaluator::Field => v[n] -= self.pressure_shift,
                Evaluator::Conormal(c) => v[n - 1] -= self.pressure_shift * c.normal_sign(),
                Evaluator::Derivative(_) => {}
            }
        }
        Ok(v)
    }

    /// Interior values on the given heights for every transverse mode of the density.
    pub fn samples(&self, heights: &[f64]) -> Result<Vec<(usize, f64, Vec<C64>)>> {
        let mut out = Vec::new();
        for t in self.density.support() {
            for &x in heights {
                out.push((t, x, self.eval(t, x, Approach::Principal, Evaluator::Field)?));
            }
        }
        Ok(out)
    }

    /// ‖u‖_{H^{m+1}(Ω)} and ‖p − p̄‖_{H^m(Ω)} with the norm
    /// Σ_j ∫₀^L ⟨ξ′⟩^{2(s−j)} |∂_n^j f̂(ξ′, x)|² dx summed over ξ′.
    pub fn interior_norms(&self, m: u32) -> Result<(f64, f64)> {
        let params = self.params();
        let grid = params.grid;
        let n = params.dim();
        let (xs, ws) = strip_rule(params.strip);
        let area = (2.0 * std::f64::consts::PI).powi(n as i32 - 1);
        let (mut u2, mut p2) = (0.0, 0.0);
        for t in self.density.support() {
            let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&a| a as f64).collect();
            let br = japanese_bracket(&xi);
            for (&x, &w) in xs.iter().zip(&ws) {
                for j in 0..=m + 1 {
                    let ev = if j == 0 { Evaluator::Field } else { Evaluator::Derivative(j) };
                    let v = self.eval(t, x, Approach::Principal, ev)?;
                    let uw = br.powi(2 * (m + 1 - j) as i32);
                    u2 += w * uw * v[..n].iter().map(|z| z.norm_sqr()).sum::<f64>();
                    if j <= m {
                        p2 += w * br.powi(2 * (m - j) as i32) * v[n].norm_sqr();
                    }
                }
            }
        }
        Ok(((area * u2).sqrt(), (area * p2).sqrt()))
    }
}

/// The boundary operator of a route: ½ + K or S.
pub fn route_operator(system: &BoundarySystem, route: Route) -> Result<BoundaryOperatorMatrix> {
    match route {
        Route::DoubleLayer => system.k.shifted(0.5),
        Route::SingleLayer => Ok(system.s.clone()),
    }
}

/// Solves the Dirichlet problem along one route.
pub fn solve_dirichlet(system: &BoundarySystem, problem: &DirichletProblem, route: Route) -> Result<DirichletSolution> {
    let params = system.params();
    if problem.params != *params {
        return Err(Error::Argument("problem and boundary system use different parameters".into()));
    }
    let n = params.dim();
    let mut warnings = Vec::new();
    let f = problem.admissible(&mut warnings)?;
    let op = route_operator(system, route)?;
    let (density, algebraic) = op.solve(&f, SOLVE_CUTOFF)?;
    let smallest = f
        .support()
        .iter()
        .map(|&t| singular_values(op.block(t))[0])
        .fold(f64::INFINITY, f64::min);
    if algebraic > 1e-8 {
        return Err(Error::Solver {
            message: format!("{} solve left relative residual {algebraic:.3e}; smallest singular value {smallest:.3e}", route.name()),
            condition: 1.0 / smallest,
        });
    }
    let layer = match route {
        Route::DoubleLayer => &system.double,
        Route::SingleLayer => &system.single,
    };
    let potential = LayerPotential::from_operator(layer.clone(), &density)?;
    let mut solution = DirichletSolution {
        route,
        density,
        potential,
        pressure_shift: C64::new(0.0, 0.0),
        diagnostics: SolveDiagnostics {
            algebraic_residual: algebraic,
            flux: problem.flux()?.norm(),
            smallest_singular_value: smallest,
            warnings,
            ..Default::default()
        },
    };
    if problem.gauge {
        let (xs, ws) = strip_rule(params.strip);
        let mut mean = C64::new(0.0, 0.0);
        for (&x, &w) in xs.iter().zip(&ws) {
            mean += solution.potential.eval(0, x, Approach::Principal, Evaluator::Field)?[n] * w;
        }
        solution.pressure_shift = mean / params.strip;
    }

    let trace = solution.potential.trace(Side::Interior, |_| Evaluator::Field, 0..n)?;
    let fnorm = problem.f.l2_norm().max(f64::MIN_POSITIVE);
    solution.diagnostics.trace_error = trace.sub(&f)?.l2_norm() / fnorm;
    solution.diagnostics.interior_residual = interior_residual(&solution)?;
    for m in 0..3u32 {
        let (u, p) = solution.interior_norms(m)?;
        let fs = problem.f.sobolev_norm(m as f64 + 0.5).max(f64::MIN_POSITIVE);
        solution.diagnostics.norm_ratio[m as usize] = (u + p) / fs;
    }
    Ok(solution)
}

/// max |ΞU| over interior check points relative to max |U| there.
pub fn interior_residual(solution: &DirichletSolution) -> Result<f64> {
    let params = solution.params();
    let grid = params.grid;
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for t in solution.density.support() {
        let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&a| a as f64).collect();
        for x in interior_heights(params.strip, 9) {
            let d0 = solution.eval(t, x, Approach::Principal, Evaluator::Field)?;
            let d1 = solution.eval(t, x, Approach::Principal, Evaluator::Derivative(1))?;
            let d2 = solution.eval(t, x, Approach::Principal, Evaluator::Derivative(2))?;
            let r = apply_xi_profile(params, &xi, x, [&d0, &d1, &d2]);
            defect = defect.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
            scale = scale.max(d0.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(defect / scale.max(f64::MIN_POSITIVE))
}

/// Difference of two solutions on the interior check points: the largest
/// velocity difference, the largest pressure difference after removing the
/// mean pressure difference on the ξ′ = 0 mode, and that mean, all
/// relative to the largest value of the first solution.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteComparison {
    pub velocity: f64,
    /// Pressure difference minus a constant.
    pub pressure_up_to_constant: f64,
    /// The constant pressure offset between the two solutions.
    pub pressure_offset: f64,
    /// Largest difference of the full fields, no constant removed.
    pub full: f64,
}

pub fn compare_solutions(a: &DirichletSolution, b: &DirichletSolution) -> Result<RouteComparison> {
    let mut modes = a.density.support();
    modes.extend(b.density.support());
    compare_fields(
        a.params(),
        &modes,
        |t, x| a.eval(t, x, Approach::Principal, Evaluator::Field),
        |t, x| b.eval(t, x, Approach::Principal, Evaluator::Field),
    )
}

/// Compares two fields given by their (mode, height) profiles on the
/// interior check points of the listed modes.
pub fn compare_fields(
    params: &StokesParams,
    modes: &[usize],
    a: impl Fn(usize, f64) -> Result<Vec<C64>>,
    b: impl Fn(usize, f64) -> Result<Vec<C64>>,
) -> Result<RouteComparison> {
    let n = params.dim();
    let heights = interior_heights(params.strip, 9);
    let mut modes = modes.to_vec();
    modes.push(0);
    modes.sort_unstable();
    modes.dedup();
    let mut offset = C64::new(0.0, 0.0);
    for &x in &heights {
        offset += a(0, x)?[n] - b(0, x)?[n];
    }
    offset /= heights.len() as f64;
    let mut scale: f64 = 0.0;
    let (mut velocity, mut pressure, mut full): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &t in &modes {
        for &x in &heights {
            let (va, vb) = (a(t, x)?, b(t, x)?);
            scale = scale.max(va.iter().map(|z| z.norm()).fold(0.0, f64::max));
            for c in 0..n {
                velocity = velocity.max((va[c] - vb[c]).norm());
            }
            let dp = va[n] - vb[n];
            full = full.max(velocity).max(dp.norm());
            let dp0 = if t == 0 { dp - offset } else { dp };
            pressure = pressure.max(dp0.norm());
        }
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    Ok(RouteComparison {
        velocity: velocity / scale,
        pressure_up_to_constant: pressure / scale,
        pressure_offset: offset.norm() / scale,
        full: full / scale,
    })
}

/// Orthonormal basis of the complement of ν = (−e_n on Γ₀, +e_n on Γ₁) in
/// the stacked ξ′ = 0 block ℂ^{2n}.
pub fn normal_complement(n: usize) -> CMatrix {
    let mut nu = DMatrix::<C64>::zeros(2 * n, 1);
    for c in Component::BOTH {
        nu[(c.index() * n + n - 1, 0)] = C64::new(c.normal_sign() / 2f64.sqrt(), 0.0);
    }
    let projector = CMatrix::identity(2 * n, 2 * n) - &nu * nu.adjoint();
    // Eigenvalues are 0 (along ν) and 1; the last 2n − 1 columns span {ν}⊥.
    let (_, vectors) = hermitian_singular_pairs(&projector);
    vectors.columns(1, 2 * n - 1).into_owned()
}

/// Stability constant of the solution operator for m ∈ {0, 1, 2}: the
/// supremum of (‖u‖²_{H^{m+1}} + ‖p − p̄‖²_{H^m})^{1/2}/‖f‖_{H^{m+1/2}}
/// over admissible data carried by transverse modes |ξ′_a| ≤ max_mode,
/// computed exactly per mode from the Gram matrix of the solution map.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub m: u32,
    pub constant: f64,
    pub worst_mode: Vec<i64>,
}

pub fn stability_constant(system: &BoundarySystem, route: Route, m: u32, max_mode: i64) -> Result<StabilityReport> {
    let params = system.params();
    let grid = params.grid;
    let n = params.dim();
    let gauge = params.assumptions().v0_zero_inside;
    let op = route_operator(system, route)?;
    let layer = match route {
        Route::DoubleLayer => &system.double,
        Route::SingleLayer => &system.single,
    };
    let (xs, ws) = strip_rule(params.strip);
    let mut best = StabilityReport { m, constant: 0.0, worst_mode: vec![] };
    for t in 0..grid.transverse_len() {
        let mode = grid.transverse_mode(t);
        if mode.iter().any(|a| a.abs() > max_mode) {
            continue;
        }
        let xi: Vec<f64> = mode.iter().map(|&a| a as f64).collect();
        let br = japanese_bracket(&xi);
        let block = op.block(t);
        let pinv = pseudo_inverse(block, SOLVE_CUTOFF);
        let domain = if gauge && t == 0 { normal_complement(n) } else { CMatrix::identity(2 * n, 2 * n) };
        let map = &pinv * &domain;
        let resp = layer.response(t)?;
        let eval = |x: f64, ev: Evaluator| -> CMatrix { resp.matrix(route.kind(), x, Approach::Principal, ev) * &map };
        let mut mean = DMatrix::<C64>::zeros(1, map.ncols());
        if gauge && t == 0 {
            for (&x, &w) in xs.iter().zip(&ws) {
                mean += eval(x, Evaluator::Field).rows(n, 1) * C64::new(w / params.strip, 0.0);
            }
        }
        let mut gram = DMatrix::<C64>::zeros(map.ncols(), map.ncols());
        for (&x, &w) in xs.iter().zip(&ws) {
            for j in 0..=m + 1 {
                let ev = if j == 0 { Evaluator::Field } else { Evaluator::Derivative(j) };
                let e = eval(x, ev);
                let u = e.rows(0, n);
                gram += u.adjoint() * u * C64::new(w * br.powi(2 * (m + 1 - j) as i32), 0.0);
                if j <= m {
                    let mut p = e.rows(n, 1).into_owned();
                    if j == 0 {
                        p -= &mean;
                    }
                    gram += p.adjoint() * p * C64::new(w * br.powi(2 * (m - j) as i32), 0.0);
                }
            }
        }
        let lambda = gram.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
        let c = (lambda / br.powi(2 * m as i32 + 1)).sqrt();
        if c > best.constant {
            best.constant = c;
            best.worst_mode = mode.clone();
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stokes::Coefficient;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn configs(grid: TorusGrid) -> Vec<StokesParams> {
        vec![
            StokesParams::constant(grid, 1.0, 1.0).unwrap(),
            StokesParams::new(grid, Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)).unwrap(),
        ]
    }

    #[test]
    fn manufactured_double_layer_is_recovered() {
        let grid = TorusGrid::new(2, 32).unwrap();
        for params in configs(grid) {
            let system = BoundarySystem::new(&params).unwrap();
            let mut h = BoundaryDensity::random_band_limited(&grid, 2, 4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(8));
            if params.assumptions().v0_zero_inside {
                h = h.project_out_normal().unwrap();
            }
            let f = system.k.shifted(0.5).unwrap().apply(&h).unwrap();
            let problem = DirichletProblem::new(&params, f);
            let dl = solve_dirichlet(&system, &problem, Route::DoubleLayer).unwrap();
            let sl = solve_dirichlet(&system, &problem, Route::SingleLayer).unwrap();
            for s in [&dl, &sl] {
                assert!(s.diagnostics.trace_error < 1e-10, "{:?}", s.diagnostics);
                assert!(s.diagnostics.interior_residual < 1e-8, "{:?}", s.diagnostics);
            }
            let cmp = compare_solutions(&dl, &sl).unwrap();
            assert!(cmp.velocity < 1e-8 && cmp.pressure_up_to_constant < 1e-8, "{cmp:?}");
        }
    }

    #[test]
    fn zero_datum_gives_zero_solution() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let system = BoundarySystem::new(&params).unwrap();
        let problem = DirichletProblem::new(&params, BoundaryDensity::zeros(&grid, 2));
        let s = solve_dirichlet(&system, &problem, Route::DoubleLayer).unwrap();
        assert_eq!(s.density.l2_norm(), 0.0);
    }

    #[test]
    fn incompatible_flux_is_rejected_or_projected() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = configs(grid).remove(1);
        let system = BoundarySystem::new(&params).unwrap();
        let f = BoundaryDensity::normal(&grid);
        let problem = DirichletProblem::new(&params, f.clone());
        assert!(matches!(solve_dirichlet(&system, &problem, Route::DoubleLayer), Err(Error::Gauge(_))));
        let s = solve_dirichlet(&system, &problem.with_projection(true), Route::DoubleLayer).unwrap();
        assert_eq!(s.diagnostics.warnings.len(), 1);
    }

    #[test]
    fn normal_complement_is_orthonormal() {
        let q = normal_complement(3);
        assert!((q.adjoint() * &q - CMatrix::identity(5, 5)).norm() < 1e-14);
        let mut nu = DMatrix::<C64>::zeros(6, 1);
        nu[(2, 0)] = C64::new(-1.0, 0.0);
        nu[(5, 0)] = C64::new(1.0, 0.0);
        assert!((q.adjoint() * nu).norm() < 1e-14);
    }

    #[test]
    fn stability_constant_is_finite() {
        let grid = TorusGrid::new(2, 16).unwrap();
        for params in configs(grid) {
            let system = BoundarySystem::new(&params).unwrap();
            for m in 0..3 {
                let r = stability_constant(&system, Route::DoubleLayer, m, 4).unwrap();
                assert!(r.constant.is_finite() && r.constant > 0.0, "{r:?}");
            }
        }
    }
}
