//! Single- and double-layer potentials evaluated per transverse mode as
//! functions of x_n, exact for constant coefficients and corrected by a
//! collocation solve when V or V₀ vary in x_n.
//!
//! For variable coefficients the potential is G_c F + w where G_c is the
//! pseudoinverse of the constant reference operator and
//! Ξ w = (p_{𝒩_c} − p_𝒩)F − (Ξ − Ξ_c)G_c F, which is smooth because the
//! coefficient deviations are smooth.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::kernel::{KernelSpace, LayerKind};
use super::profile::{Evaluator, ModeKernel, ModeOperator, Source};
use super::strip::StripSolver;
use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::lattice::Approach;
use crate::spectral::{fft_1d, mode_of_index, TorusGrid};
use crate::stokes::StokesParams;
use crate::{CMatrix, C64};

/// Side of a boundary component relative to Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Inside Ω (the "+" side, approached along −ν).
    Interior,
    /// Inside Ω₋ (the "−" side).
    Exterior,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Interior, Side::Exterior];

    /// Coordinate approach of x_n to the height of `c` from this side.
    pub fn approach(self, c: Component) -> Approach {
        match (self, c) {
            (Side::Interior, Component::Lower) | (Side::Exterior, Component::Upper) => Approach::Above,
            _ => Approach::Below,
        }
    }

    /// Signed x_n-offset of a point at distance `eps` on this side of `c`.
    pub fn offset(self, c: Component, eps: f64) -> f64 {
        match self.approach(c) {
            Approach::Above => eps,
            _ => -eps,
        }
    }

    /// ±1 for the interior/exterior side.
    pub fn sign(self) -> f64 {
        match self {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        }
    }
}

/// The evaluators a mode response is prepared for.
const EVALUATORS: [Evaluator; 6] = [
    Evaluator::Field,
    Evaluator::Conormal(Component::Lower),
    Evaluator::Conormal(Component::Upper),
    Evaluator::Derivative(1),
    Evaluator::Derivative(2),
    Evaluator::Derivative(3),
];

/// x_n-Fourier coefficients of the smooth correction w for each of the 2n
/// block-density basis vectors.
#[derive(Clone, Debug)]
struct Correction {
    /// Per evaluator, the x_n-coefficients E(k)ŵ(k), one rows×2n matrix per k.
    evaluated: Vec<(Evaluator, Vec<(f64, CMatrix)>)>,
    condition: f64,
}

/// Everything needed to evaluate a layer potential at one ξ′.
#[derive(Clone, Debug)]
pub struct ModeResponse {
    op: ModeOperator,
    kernels: Vec<((Source, Evaluator), ModeKernel)>,
    correction: Option<Correction>,
    strip: f64,
}

fn source_for(kind: LayerKind, c: Component) -> Source {
    match kind {
        LayerKind::Single => Source::Single,
        LayerKind::Double => Source::Double(c),
    }
}

impl ModeResponse {
    fn new(params: &StokesParams, kind: LayerKind, xi_t: &[f64], is_zero_mode: bool) -> Result<Self> {
        let op = ModeOperator::new(params.reference(), xi_t)?;
        let mut kernels = Vec::new();
        for c in Component::BOTH {
            let src = source_for(kind, c);
            for ev in EVALUATORS {
                kernels.push(((src, ev), op.kernel(src, ev)));
            }
        }
        let mut resp = Self { op, kernels, correction: None, strip: params.strip };
        if !params.is_constant() {
            resp.correction = Some(resp.build_correction(params, kind, is_zero_mode)?);
        }
        Ok(resp)
    }

    fn kernel(&self, src: Source, ev: Evaluator) -> &ModeKernel {
        &self.kernels.iter().find(|(key, _)| *key == (src, ev)).expect("evaluator prepared").1
    }

    fn constant_matrix(&self, kind: LayerKind, x: f64, approach: Approach, ev: Evaluator) -> CMatrix {
        let n = self.op.dim();
        let mut m = DMatrix::zeros(ev.rows(n), 2 * n);
        for c in Component::BOTH {
            let k = self.kernel(source_for(kind, c), ev).eval(x - c.height(self.strip), approach);
            m.view_mut((0, c.index() * n), (ev.rows(n), n)).copy_from(&k);
        }
        m
    }

    fn build_correction(&self, params: &StokesParams, kind: LayerKind, is_zero_mode: bool) -> Result<Correction> {
        let n = self.op.dim();
        let nz = params.collocation;
        let h = 2.0 * PI / nz as f64;
        let mut rhs: Vec<Vec<Vec<C64>>> = vec![vec![vec![C64::new(0.0, 0.0); nz]; n + 1]; 2 * n];
        for j in 0..nz {
            let x = j as f64 * h;
            let dv = params.v.deviation(x);
            let dv0 = params.v0.deviation(x);
            if dv == 0.0 && dv0 == 0.0 {
                continue;
            }
            let u = self.constant_matrix(kind, x, Approach::Principal, Evaluator::Field);
            for col in 0..2 * n {
                for i in 0..n {
                    rhs[col][i][j] = -dv * u[(i, col)];
                }
                rhs[col][n][j] = dv0 * u[(n, col)];
            }
        }
        for col in rhs.iter_mut() {
            for comp in col.iter_mut() {
                fft_1d(comp, false);
                comp.iter_mut().for_each(|z| *z /= nz as f64);
            }
        }
        if is_zero_mode {
            // (p_{𝒩_c} − p_𝒩)F: the ξ = 0 coefficient of the source on the
            // kernel components of the reference operator that are not in 𝒩.
            let reference = KernelSpace::for_case(params.grid, params.reference_kernel_case());
            let actual = KernelSpace::new(params);
            for c in Component::BOTH {
                let s0 = self.op.source_poly(source_for(kind, c)).eval(0.0);
                for comp in 0..n {
                    let col = c.index() * n + comp;
                    for &r in reference.components() {
                        if !actual.components().contains(&r) {
                            rhs[col][r][0] += s0[(r, comp)] / (2.0 * PI);
                        }
                    }
                }
            }
        }
        let solver = StripSolver::new(params, self.op.transverse(), nz)?;
        // Field coefficients per k: (n+1)×2n.
        let mut field = vec![DMatrix::zeros(n + 1, 2 * n); nz];
        for (col, r) in rhs.iter().enumerate() {
            let w = solver.solve(r)?;
            for (comp, wc) in w.iter().enumerate() {
                for (k, z) in wc.iter().enumerate() {
                    field[k][(comp, col)] = *z;
                }
            }
        }
        let evaluated = EVALUATORS
            .iter()
            .map(|&ev| {
                let e = self.op.evaluator_poly(ev);
                let terms = field
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.norm() > 0.0)
                    .map(|(k, w)| {
                        let kf = mode_of_index(k, nz) as f64;
                        (kf, e.eval(kf) * w)
                    })
                    .collect();
                (ev, terms)
            })
            .collect();
        Ok(Correction { evaluated, condition: solver.condition() })
    }

    /// Maps the block density [ĥ₀; ĥ₁] at this ξ′ to the evaluated
    /// quantity at height x.
    pub fn matrix(&self, kind: LayerKind, x: f64, approach: Approach, ev: Evaluator) -> CMatrix {
        let mut m = self.constant_matrix(kind, x, approach, ev);
        if let Some(corr) = &self.correction {
            let terms = &corr.evaluated.iter().find(|(e, _)| *e == ev).expect("evaluator prepared").1;
            for (kf, c) in terms {
                m.zip_apply(c, |a, b| *a += b * C64::from_polar(1.0, kf * x));
            }
        }
        m
    }

    pub fn operator(&self) -> &ModeOperator {
        &self.op
    }

    /// Condition estimate of the collocation solve, if one was needed.
    pub fn correction_condition(&self) -> Option<f64> {
        self.correction.as_ref().map(|c| c.condition)
    }
}

/// Density-independent data of 𝒮_ST or 𝒟_ST for a set of transverse modes.
#[derive(Clone, Debug)]
pub struct LayerOperator {
    params: StokesParams,
    kind: LayerKind,
    modes: Vec<Option<ModeResponse>>,
}

impl LayerOperator {
    /// Prepares the listed transverse modes, or all of them.
    pub fn new(params: &StokesParams, kind: LayerKind, modes: Option<&[usize]>) -> Result<Self> {
        let grid = params.grid;
        let all: Vec<usize> = match modes {
            Some(m) => m.to_vec(),
            None => (0..grid.transverse_len()).collect(),
        };
        let built: Vec<(usize, Result<ModeResponse>)> = all
            .par_iter()
            .map(|&t| {
                let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&m| m as f64).collect();
                (t, ModeResponse::new(params, kind, &xi, t == 0))
            })
            .collect();
        let mut out = vec![None; grid.transverse_len()];
        for (t, r) in built {
            out[t] = Some(r?);
        }
        Ok(Self { params: params.clone(), kind, modes: out })
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn params(&self) -> &StokesParams {
        &self.params
    }

    pub fn grid(&self) -> TorusGrid {
        self.params.grid
    }

    pub fn response(&self, mode: usize) -> Result<&ModeResponse> {
        self.modes
            .get(mode)
            .and_then(|m| m.as_ref())
            .ok_or_else(|| Error::Argument(format!("transverse mode {mode} was not prepared")))
    }

    pub fn prepared_modes(&self) -> Vec<usize> {
        (0..self.modes.len()).filter(|&t| self.modes[t].is_some()).collect()
    }

    pub fn matrix(&self, mode: usize, x: f64, approach: Approach, ev: Evaluator) -> Result<CMatrix> {
        Ok(self.response(mode)?.matrix(self.kind, x, approach, ev))
    }

    /// Largest condition estimate over the collocation solves.
    pub fn worst_condition(&self) -> f64 {
        self.modes
            .iter()
            .flatten()
            .filter_map(|m| m.correction_condition())
            .fold(1.0, f64::max)
    }
}

/// A layer potential of a fixed density.
#[derive(Clone, Debug)]
pub struct LayerPotential {
    operator: LayerOperator,
    density: BoundaryDensity,
}

impl LayerPotential {
    pub fn new(params: &StokesParams, kind: LayerKind, h: &BoundaryDensity) -> Result<Self> {
        if h.width() != params.dim() || h.grid() != params.grid {
            return Err(Error::Dimension("density does not match the parameters".into()));
        }
        let support = h.support();
        let operator = LayerOperator::new(params, kind, Some(&support))?;
        Ok(Self { operator, density: h.clone() })
    }

    pub fn from_operator(operator: LayerOperator, h: &BoundaryDensity) -> Result<Self> {
        for t in h.support() {
            operator.response(t)?;
        }
        Ok(Self { operator, density: h.clone() })
    }

    pub fn density(&self) -> &BoundaryDensity {
        &self.density
    }

    pub fn operator(&self) -> &LayerOperator {
        &self.operator
    }

    pub fn kind(&self) -> LayerKind {
        self.operator.kind
    }

    /// Coefficient vector at ξ′ (by transverse index) of the evaluated quantity at height x.
    pub fn eval(&self, mode: usize, x: f64, approach: Approach, ev: Evaluator) -> Result<Vec<C64>> {
        let n = self.operator.params.dim();
        let block = self.density.block(mode);
        if block.iter().all(|z| z.norm_sqr() == 0.0) {
            return Ok(vec![C64::new(0.0, 0.0); ev.rows(n)]);
        }
        let m = self.operator.matrix(mode, x, approach, ev)?;
        let b = DMatrix::from_column_slice(2 * n, 1, &block);
        Ok((m * b).iter().copied().collect())
    }

    /// Rows `rows` of the evaluated quantity on each boundary component,
    /// taken at height(c) + offset(c) with the given approach.
    pub fn boundary_values(
        &self,
        ev_for: impl Fn(Component) -> Evaluator,
        rows: std::ops::Range<usize>,
        at: impl Fn(Component) -> (f64, Approach),
    ) -> Result<BoundaryDensity> {
        let grid = self.operator.grid();
        let mut out = BoundaryDensity::zeros(&grid, rows.len());
        for c in Component::BOTH {
            let (x, approach) = at(c);
            for t in self.density.support() {
                let v = self.eval(t, x, approach, ev_for(c))?;
                for (j, r) in rows.clone().enumerate() {
                    out.set(c, t, j, v[r]);
                }
            }
        }
        Ok(out)
    }

    /// One-sided limit on Γ from `side` of rows `rows` of the evaluator.
    pub fn trace(&self, side: Side, ev_for: impl Fn(Component) -> Evaluator, rows: std::ops::Range<usize>) -> Result<BoundaryDensity> {
        let strip = self.operator.params.strip;
        self.boundary_values(ev_for, rows, |c| (c.height(strip), side.approach(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layer::kernel::layer_coefficients;
    use crate::spectral::mode_of_index;
    use crate::stokes::Coefficient;
    use rand::SeedableRng;

    /// Compares the closed-form profile against the truncated Fourier
    /// series of the grid coefficients at points away from Γ.
    #[test]
    fn profiles_match_grid_coefficients() {
        let grid = TorusGrid::new(2, 64).unwrap();
        let bump = Coefficient::exterior_bump(1.0, PI);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let h = BoundaryDensity::random_band_limited(&grid, 2, 2, &mut rng);
        for params in [
            StokesParams::constant(grid, 1.0, 1.0).unwrap(),
            StokesParams::new(grid, Coefficient::Constant(1.0), bump).unwrap().with_collocation(64).unwrap(),
        ] {
            for kind in [LayerKind::Single, LayerKind::Double] {
                let pot = LayerPotential::new(&params, kind, &h).unwrap();
                let coeffs = layer_coefficients(&params, kind, &h).unwrap();
                let np = grid.points();
                for t in h.support() {
                    for x in [1.0, 2.0, 4.5] {
                        let v = pot.eval(t, x, Approach::Principal, Evaluator::Field).unwrap();
                        for c in 0..3 {
                            let series: C64 = (0..np)
                                .map(|j| {
                                    coeffs.field().at(c, t * np + j)
                                        * C64::from_polar(1.0, mode_of_index(j, np) as f64 * x)
                                })
                                .sum();
                            // Truncation of the slowly decaying series dominates.
                            assert!((series - v[c]).norm() < 2e-2 * (1.0 + v[c].norm()), "{kind:?} {t} {x} {c}");
                        }
                    }
                }
            }
        }
    }
}
