//! One-sided traces of layer potentials by extrapolation along an offset
//! ladder, and the residuals of the jump relations against the assembled
//! boundary operators.

use nalgebra::DMatrix;

use super::boundary::{one_sided, BoundaryOp, BoundaryOperatorMatrix};
use super::kernel::LayerKind;
use super::potentials::{LayerOperator, LayerPotential, Side};
use super::profile::Evaluator;
use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::lattice::Approach;
use crate::spectral::neville_matrix;
use crate::stokes::StokesParams;
use crate::{CMatrix, C64};

/// Offsets ε_j = base·2^{−j}, j = 0..levels, used to extrapolate traces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetLadder {
    pub base: f64,
    pub levels: usize,
}

impl OffsetLadder {
    /// Five offsets starting at half the grid spacing 2π/N.
    pub fn for_params(params: &StokesParams) -> Self {
        Self { base: params.grid.spacing() / 2.0, levels: 5 }
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.levels).map(|j| self.base / f64::from(1u32 << j)).collect()
    }
}

/// Extrapolated one-sided limit of rows `rows` of `ev_for(c)` on each
/// component, together with the largest change between the last two
/// Neville levels (an error estimate).
pub fn extrapolated_trace(
    pot: &LayerPotential,
    side: Side,
    ev_for: impl Fn(Component) -> Evaluator,
    rows: std::ops::Range<usize>,
    ladder: OffsetLadder,
) -> Result<(BoundaryDensity, f64)> {
    let params = pot.operator().params();
    let strip = params.strip;
    let eps = ladder.offsets();
    let mut out = BoundaryDensity::zeros(&params.grid, rows.len());
    let mut estimate: f64 = 0.0;
    for c in Component::BOTH {
        for t in pot.density().support() {
            let samples: Vec<CMatrix> = eps
                .iter()
                .map(|&e| {
                    let x = c.height(strip) + side.offset(c, e);
                    let v = pot.eval(t, x, Approach::Principal, ev_for(c))?;
                    Ok(DMatrix::from_iterator(rows.len(), 1, v[rows.clone()].iter().copied()))
                })
                .collect::<Result<_>>()?;
            let (best, prev) = neville_matrix(&eps, &samples);
            if best.iter().any(|z| !z.is_finite()) {
                return Err(Error::Extrapolation(format!("non-finite trace at mode {t}")));
            }
            estimate = estimate.max((&best - &prev).norm());
            for (j, z) in best.iter().enumerate() {
                out.set(c, t, j, *z);
            }
        }
    }
    Ok((out, estimate))
}

/// Relative residuals of the jump relations for a density h:
/// the one-sided traces of 𝒲, 𝒱, 𝒫 and T_ν𝒱 against (±½+K)h, Sh,
/// (∓g/2 ν·h + C₀)h and (∓½+K*)h, the side-difference identities, and
/// the agreement between extrapolated and closed-form one-sided traces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JumpReport {
    pub double_velocity: f64,
    pub single_velocity: f64,
    pub single_pressure: f64,
    pub single_conormal: f64,
    /// ‖[𝒲]₊ − [𝒲]₋ − h‖.
    pub double_difference: f64,
    /// ‖[𝒱]₊ − [𝒱]₋‖.
    pub single_difference: f64,
    /// ‖[𝒫]₊ − [𝒫]₋ + g(ν·h)‖.
    pub pressure_difference: f64,
    /// ‖extrapolated trace − closed-form one-sided limit‖, all four traces.
    pub route_agreement: f64,
    /// Largest Neville change between the last two levels.
    pub extrapolation_estimate: f64,
}

impl JumpReport {
    /// Largest of the four trace residuals.
    pub fn max_trace(&self) -> f64 {
        self.double_velocity.max(self.single_velocity).max(self.single_pressure).max(self.single_conormal)
    }

    /// Largest of the three side-difference residuals.
    pub fn max_difference(&self) -> f64 {
        self.double_difference.max(self.single_difference).max(self.pressure_difference)
    }

    pub fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("double_velocity", self.double_velocity),
            ("single_velocity", self.single_velocity),
            ("single_pressure", self.single_pressure),
            ("single_conormal", self.single_conormal),
            ("double_difference", self.double_difference),
            ("single_difference", self.single_difference),
            ("pressure_difference", self.pressure_difference),
            ("route_agreement", self.route_agreement),
        ]
    }
}

/// g = 1/(2V₀+1) on each component, scaled by (ν·h), as a width-1 density.
pub fn pressure_jump_term(params: &StokesParams, h: &BoundaryDensity) -> BoundaryDensity {
    let n = params.dim();
    let mut out = BoundaryDensity::zeros(&params.grid, 1);
    for c in Component::BOTH {
        let g = 1.0 / (2.0 * params.v0.value(c.height(params.strip)) + 1.0);
        for t in 0..h.modes() {
            out.set(c, t, 0, h.get(c, t, n - 1) * (g * c.normal_sign()));
        }
    }
    out
}

fn rel(a: &BoundaryDensity, b: &BoundaryDensity, scale: f64) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm() / scale)
}

/// Layer operators and boundary operators of one configuration, assembled once.
pub struct BoundarySystem {
    pub single: LayerOperator,
    pub double: LayerOperator,
    pub k: BoundaryOperatorMatrix,
    pub kstar: BoundaryOperatorMatrix,
    pub s: BoundaryOperatorMatrix,
    pub c0: BoundaryOperatorMatrix,
}

impl BoundarySystem {
    pub fn new(params: &StokesParams) -> Result<Self> {
        let single = LayerOperator::new(params, LayerKind::Single, None)?;
        let double = LayerOperator::new(params, LayerKind::Double, None)?;
        let k = BoundaryOperatorMatrix::from_layer(&double, BoundaryOp::K)?;
        let kstar = BoundaryOperatorMatrix::from_layer(&single, BoundaryOp::KStar)?;
        let s = BoundaryOperatorMatrix::from_layer(&single, BoundaryOp::S)?;
        let c0 = BoundaryOperatorMatrix::from_layer(&single, BoundaryOp::C0)?;
        Ok(Self { single, double, k, kstar, s, c0 })
    }

    pub fn params(&self) -> &StokesParams {
        self.single.params()
    }

    /// Jump residuals of h relative to ‖h‖_{L²(Γ)}.
    pub fn jump_residuals(&self, h: &BoundaryDensity, ladder: OffsetLadder) -> Result<JumpReport> {
        let params = self.params();
        let n = params.dim();
        let scale = h.l2_norm();
        if scale == 0.0 {
            return Ok(JumpReport::default());
        }
        let sl = LayerPotential::from_operator(self.single.clone(), h)?;
        let dl = LayerPotential::from_operator(self.double.clone(), h)?;
        let kh = self.k.apply(h)?;
        let ksh = self.kstar.apply(h)?;
        let sh = self.s.apply(h)?;
        let ch = self.c0.apply(h)?;
        let gnu = pressure_jump_term(params, h);
        let mut r = JumpReport::default();
        let mut traces = Vec::new();
        for side in Side::BOTH {
            let s = side.sign();
            let (w, e1) = extrapolated_trace(&dl, side, |_| Evaluator::Field, 0..n, ladder)?;
            let (v, e2) = extrapolated_trace(&sl, side, |_| Evaluator::Field, 0..n, ladder)?;
            let (p, e3) = extrapolated_trace(&sl, side, |_| Evaluator::Field, n..n + 1, ladder)?;
            let (tv, e4) = extrapolated_trace(&sl, side, Evaluator::Conormal, 0..n, ladder)?;
            r.extrapolation_estimate = r.extrapolation_estimate.max(e1).max(e2).max(e3).max(e4) / scale;

            let mut expect_w = kh.clone();
            expect_w.axpy(C64::new(0.5 * s, 0.0), h)?;
            r.double_velocity = r.double_velocity.max(rel(&w, &expect_w, scale)?);
            r.single_velocity = r.single_velocity.max(rel(&v, &sh, scale)?);
            let mut expect_p = ch.clone();
            expect_p.axpy(C64::new(-0.5 * s, 0.0), &gnu)?;
            r.single_pressure = r.single_pressure.max(rel(&p, &expect_p, scale)?);
            let mut expect_t = ksh.clone();
            expect_t.axpy(C64::new(-0.5 * s, 0.0), h)?;
            r.single_conormal = r.single_conormal.max(rel(&tv, &expect_t, scale)?);

            for (pot, which, got) in [
                (&dl, BoundaryOp::K, &w),
                (&sl, BoundaryOp::S, &v),
                (&sl, BoundaryOp::C0, &p),
                (&sl, BoundaryOp::KStar, &tv),
            ] {
                let exact = one_sided(pot.operator(), which, side)?.apply(h)?;
                r.route_agreement = r.route_agreement.max(rel(got, &exact, scale)?);
            }
            traces.push((w, v, p));
        }
        let (wp, vp, pp) = &traces[0];
        let (wm, vm, pm) = &traces[1];
        let mut dw = wp.sub(wm)?;
        dw.axpy(C64::new(-1.0, 0.0), h)?;
        r.double_difference = dw.l2_norm() / scale;
        r.single_difference = vp.sub(vm)?.l2_norm() / scale;
        let mut dp = pp.sub(pm)?;
        dp.axpy(C64::new(1.0, 0.0), &gnu)?;
        r.pressure_difference = dp.l2_norm() / scale;
        Ok(r)
    }
}

/// Assembles the operators and evaluates the jump residuals for h.
pub fn jump_residuals(params: &StokesParams, h: &BoundaryDensity) -> Result<JumpReport> {
    BoundarySystem::new(params)?.jump_residuals(h, OffsetLadder::for_params(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stokes::Coefficient;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    #[test]
    fn jump_relations_hold_and_converge() {
        for v0 in [Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)] {
            let mut reports = Vec::new();
            for points in [32, 64] {
                let grid = TorusGrid::new(2, points).unwrap();
                let params = StokesParams::new(grid, Coefficient::Constant(1.0), v0).unwrap();
                let h = BoundaryDensity::random_band_limited(&grid, 2, 4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
                reports.push(jump_residuals(&params, &h).unwrap());
            }
            let (coarse, fine) = (&reports[0], &reports[1]);
            assert!(fine.max_trace() < 1e-4 && fine.max_difference() < 1e-4, "{v0:?}: {fine:?}");
            assert!(fine.route_agreement < 1e-4, "{v0:?}: {fine:?}");
            assert!(fine.max_trace() * 4.0 <= coarse.max_trace(), "{v0:?}: {coarse:?} -> {fine:?}");
        }
    }

    #[test]
    fn zero_density_has_zero_residuals() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let r = jump_residuals(&params, &BoundaryDensity::zeros(&grid, 2)).unwrap();
        assert_eq!(r, JumpReport::default());
    }
}
