//! Discrete boundary operators K, K*, S and C₀ on Γ = Γ₀ ∪ Γ₁.
//!
//! Each operator is block diagonal in the transverse mode ξ′; a block maps
//! the stacked density [ĥ₀(ξ′); ĥ₁(ξ′)] to the stacked output on both
//! components. Blocks are principal values (averages of the two one-sided
//! limits) of the layer-potential profiles at the boundary heights.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::kernel::LayerKind;
use super::potentials::LayerOperator;
use super::profile::{Evaluator, ModeOperator, Source};
use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::lattice::Approach;
use crate::spectral::{mode_sum_richardson, TorusGrid};
use crate::stokes::StokesParams;
use crate::{CMatrix, C64};

/// Which boundary operator a matrix realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryOp {
    /// Principal value of the velocity of the double layer.
    K,
    /// Principal value of the conormal derivative of the single layer.
    KStar,
    /// Velocity of the single layer on Γ.
    S,
    /// Principal value of the pressure of the single layer.
    C0,
}

impl BoundaryOp {
    pub const ALL: [BoundaryOp; 4] = [BoundaryOp::K, BoundaryOp::KStar, BoundaryOp::S, BoundaryOp::C0];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryOp::K => "K",
            BoundaryOp::KStar => "K*",
            BoundaryOp::S => "S",
            BoundaryOp::C0 => "C0",
        }
    }

    pub fn kind(self) -> LayerKind {
        match self {
            BoundaryOp::K => LayerKind::Double,
            _ => LayerKind::Single,
        }
    }

    /// Output rows per component.
    pub fn rows(self, n: usize) -> usize {
        match self {
            BoundaryOp::C0 => 1,
            _ => n,
        }
    }

    /// Evaluator and the rows of its output that form the operator on `c`.
    pub fn evaluator(self, c: Component, n: usize) -> (Evaluator, std::ops::Range<usize>) {
        match self {
            BoundaryOp::K | BoundaryOp::S => (Evaluator::Field, 0..n),
            BoundaryOp::KStar => (Evaluator::Conormal(c), 0..n),
            BoundaryOp::C0 => (Evaluator::Field, n..n + 1),
        }
    }
}

/// Block-diagonal (in ξ′) realization of a boundary operator.
#[derive(Clone, Debug)]
pub struct BoundaryOperatorMatrix {
    which: BoundaryOp,
    grid: TorusGrid,
    rows: usize,
    cols: usize,
    blocks: Vec<CMatrix>,
}

fn stack_rows(which: BoundaryOp, n: usize, per_component: impl Fn(Component) -> CMatrix) -> CMatrix {
    let r = which.rows(n);
    let mut block = DMatrix::zeros(2 * r, 2 * n);
    for c in Component::BOTH {
        let m = per_component(c);
        block.view_mut((c.index() * r, 0), (r, 2 * n)).copy_from(&m);
    }
    block
}

impl BoundaryOperatorMatrix {
    /// Assembles `which` from the closed-form profiles (plus the collocation
    /// correction for variable coefficients).
    pub fn assemble(params: &StokesParams, which: BoundaryOp) -> Result<Self> {
        let layer = LayerOperator::new(params, which.kind(), None)?;
        Self::from_layer(&layer, which)
    }

    /// Assembles `which` from an already prepared layer operator of the matching kind.
    pub fn from_layer(layer: &LayerOperator, which: BoundaryOp) -> Result<Self> {
        if layer.kind() != which.kind() {
            return Err(Error::Argument(format!("{} needs a {:?} layer", which.name(), which.kind())));
        }
        let grid = layer.grid();
        let n = grid.dim();
        let strip = layer.params().strip;
        let modes = grid.transverse_len();
        let blocks: Result<Vec<CMatrix>> = (0..modes)
            .into_par_iter()
            .map(|t| {
                let resp = layer.response(t)?;
                Ok(stack_rows(which, n, |c| {
                    let (ev, rows) = which.evaluator(c, n);
                    let m = resp.matrix(which.kind(), c.height(strip), Approach::Principal, ev);
                    m.rows(rows.start, rows.len()).into_owned()
                }))
            })
            .collect();
        Ok(Self { which, grid, rows: 2 * which.rows(n), cols: 2 * n, blocks: blocks? })
    }

    /// Assembles `which` by direct symmetric sums over ξ_n, extrapolated in
    /// the cutoff from Λ = 8N. Constant coefficients only; the cross
    /// blocks need L = π so that the alternating tails expand in 1/Λ.
    pub fn assemble_mode_sum(params: &StokesParams, which: BoundaryOp) -> Result<Self> {
        if !params.is_constant() {
            return Err(Error::Unsupported("mode-sum assembly needs constant coefficients".into()));
        }
        if (params.strip - std::f64::consts::PI).abs() > 1e-14 {
            return Err(Error::Unsupported("mode-sum assembly needs the strip width π".into()));
        }
        let grid = params.grid;
        let n = grid.dim();
        let base = 8 * grid.points() as i64;
        let strip = params.strip;
        let blocks: Result<Vec<CMatrix>> = (0..grid.transverse_len())
            .into_par_iter()
            .map(|t| {
                let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&m| m as f64).collect();
                let op = ModeOperator::new(params.reference(), &xi)?;
                let r = which.rows(n);
                let mut block = DMatrix::zeros(2 * r, 2 * n);
                for ce in Component::BOTH {
                    let (ev, rows) = which.evaluator(ce, n);
                    for cs in Component::BOTH {
                        let src = match which.kind() {
                            LayerKind::Single => Source::Single,
                            LayerKind::Double => Source::Double(cs),
                        };
                        let shift = ce.height(strip) - cs.height(strip);
                        let term = |k: i64| op.term(src, ev, k) * C64::from_polar(1.0, k as f64 * shift);
                        let sum = mode_sum_richardson(term, base, 5)?.value;
                        block
                            .view_mut((ce.index() * r, cs.index() * n), (r, n))
                            .copy_from(&sum.rows(rows.start, rows.len()));
                    }
                }
                Ok(block)
            })
            .collect();
        Ok(Self { which, grid, rows: 2 * which.rows(n), cols: 2 * n, blocks: blocks? })
    }

    pub fn which(&self) -> BoundaryOp {
        self.which
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn modes(&self) -> usize {
        self.blocks.len()
    }

    /// The 2r×2n block at transverse mode `mode`.
    pub fn block(&self, mode: usize) -> &CMatrix {
        &self.blocks[mode]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// Blockwise map of the operator.
    pub fn map_blocks(&self, f: impl Fn(usize, &CMatrix) -> CMatrix) -> Self {
        let blocks: Vec<CMatrix> = self.blocks.iter().enumerate().map(|(t, b)| f(t, b)).collect();
        let (rows, cols) = blocks[0].shape();
        Self { which: self.which, grid: self.grid, rows, cols, blocks }
    }

    /// a·I + B, for square operators.
    pub fn shifted(&self, a: f64) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!("{} is not square", self.which.name())));
        }
        Ok(self.map_blocks(|_, b| b + CMatrix::identity(self.rows, self.cols) * C64::new(a, 0.0)))
    }

    /// The L²(Γ)-adjoint, blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map_blocks(|_, b| b.adjoint())
    }

    pub fn apply(&self, h: &BoundaryDensity) -> Result<BoundaryDensity> {
        let n = self.cols / 2;
        if h.width() != n || h.grid() != self.grid {
            return Err(Error::Dimension("density does not match the boundary operator".into()));
        }
        let r = self.rows / 2;
        let mut out = BoundaryDensity::zeros(&self.grid, r);
        for (t, b) in self.blocks.iter().enumerate() {
            let x = DMatrix::from_column_slice(2 * n, 1, &h.block(t));
            let y = b * x;
            for c in Component::BOTH {
                for i in 0..r {
                    out.set(c, t, i, y[c.index() * r + i]);
                }
            }
        }
        Ok(out)
    }

    /// Solves B x = f blockwise by pseudoinverse plus one refinement step;
    /// returns the solution and the largest relative algebraic residual.
    pub fn solve(&self, f: &BoundaryDensity, cutoff: f64) -> Result<(BoundaryDensity, f64)> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!("{} is not square", self.which.name())));
        }
        let n = self.cols / 2;
        let mut out = BoundaryDensity::zeros(&self.grid, n);
        let mut worst: f64 = 0.0;
        for (t, b) in self.blocks.iter().enumerate() {
            let rhs = DMatrix::from_column_slice(2 * n, 1, &f.block(t));
            if rhs.norm() == 0.0 {
                continue;
            }
            let pinv = crate::linalg::pseudo_inverse(b, cutoff);
            let mut x = &pinv * &rhs;
            let r = &rhs - b * &x;
            x += &pinv * r;
            let res = (b * &x - &rhs).norm() / rhs.norm();
            worst = worst.max(res);
            out.set_block(t, x.as_slice());
        }
        Ok((out, worst))
    }

    /// max_ξ′ ‖B − B*‖ / max_ξ′ ‖B‖ for square operators.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        self.blocks.iter().map(|b| (b - b.adjoint()).norm()).fold(0.0, f64::max) / scale
    }

    /// max_ξ′ ‖B − C‖ / max_ξ′ ‖C‖.
    pub fn relative_distance(&self, other: &Self) -> Result<f64> {
        if self.blocks.len() != other.blocks.len() || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("boundary operators have different shapes".into()));
        }
        let scale = other.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        Ok(self.blocks.iter().zip(&other.blocks).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale)
    }

    /// Singular values of every block, sorted ascending, with their mode.
    pub fn singular_values(&self) -> Vec<(usize, Vec<f64>)> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(t, b)| {
                (t, crate::linalg::singular_values(b))
            })
            .collect()
    }

    /// The same-component block on `c` at mode `mode`.
    pub fn diagonal_block(&self, mode: usize, c: Component) -> CMatrix {
        let r = self.rows / 2;
        let n = self.cols / 2;
        self.blocks[mode].view((c.index() * r, c.index() * n), (r, n)).into_owned()
    }
}

/// One-sided trace operator of a layer potential, assembled from its
/// closed-form profile at the exact boundary limit.
pub fn one_sided(layer: &LayerOperator, which: BoundaryOp, side: super::potentials::Side) -> Result<BoundaryOperatorMatrix> {
    let grid = layer.grid();
    let n = grid.dim();
    let strip = layer.params().strip;
    let blocks: Result<Vec<CMatrix>> = (0..grid.transverse_len())
        .into_par_iter()
        .map(|t| {
            let resp = layer.response(t)?;
            Ok(stack_rows(which, n, |c| {
                let (ev, rows) = which.evaluator(c, n);
                let m = resp.matrix(which.kind(), c.height(strip), side.approach(c), ev);
                m.rows(rows.start, rows.len()).into_owned()
            }))
        })
        .collect();
    Ok(BoundaryOperatorMatrix { which, grid, rows: 2 * which.rows(n), cols: 2 * n, blocks: blocks? })
}

/// Residuals of the restriction-adjoint relations: ‖K − (K*)ᴴ‖ relative,
/// the Hermitian defect of S, and the jump coefficients of the double
/// layer and of the conormal of the single layer, read off the one-sided
/// closed forms as J₊ = −i·(trace₊ − trace₋).
#[derive(Clone, Debug)]
pub struct AdjointReport {
    pub k_vs_kstar: f64,
    pub s_hermitian: f64,
    pub jump_p: C64,
    pub jump_p_star: C64,
    /// max |J₊(P*) − J₊(P)ᴴ| over modes and entries.
    pub jump_adjoint: f64,
}

pub fn adjoint_restriction_check(params: &StokesParams) -> Result<AdjointReport> {
    use super::potentials::Side;
    let single = LayerOperator::new(params, LayerKind::Single, None)?;
    let double = LayerOperator::new(params, LayerKind::Double, None)?;
    let k = BoundaryOperatorMatrix::from_layer(&double, BoundaryOp::K)?;
    let kstar = BoundaryOperatorMatrix::from_layer(&single, BoundaryOp::KStar)?;
    let s = BoundaryOperatorMatrix::from_layer(&single, BoundaryOp::S)?;
    let k_vs_kstar = k.relative_distance(&kstar.adjoint())?;
    let jump = |layer: &LayerOperator, which| -> Result<BoundaryOperatorMatrix> {
        let plus = one_sided(layer, which, Side::Interior)?;
        let minus = one_sided(layer, which, Side::Exterior)?;
        Ok(plus.map_blocks(|t, b| (b - minus.block(t)) * C64::new(0.0, -1.0)))
    };
    let jp = jump(&double, BoundaryOp::K)?;
    let jps = jump(&single, BoundaryOp::KStar)?;
    let jump_adjoint = jps.relative_distance(&jp.adjoint())? * jp.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max);
    Ok(AdjointReport {
        k_vs_kstar,
        s_hermitian: s.hermitian_defect(),
        jump_p: jp.block(0)[(0, 0)],
        jump_p_star: jps.block(0)[(0, 0)],
        jump_adjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::Coefficient;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_matches_mode_sums() {
        let grid = TorusGrid::new(2, 16).unwrap();
        for (v, v0) in [(1.0, 1.0), (0.0, 0.0), (1.0, 0.0)] {
            let params = StokesParams::constant(grid, v, v0).unwrap();
            for which in BoundaryOp::ALL {
                let a = BoundaryOperatorMatrix::assemble(&params, which).unwrap();
                let b = BoundaryOperatorMatrix::assemble_mode_sum(&params, which).unwrap();
                let d = a.relative_distance(&b).unwrap();
                assert!(d < 1e-8, "{v} {v0} {}: {d}", which.name());
            }
        }
    }

    #[test]
    fn adjoint_relations_hold() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let bump = Coefficient::exterior_bump(1.0, PI);
        for params in [
            StokesParams::constant(grid, 1.0, 1.0).unwrap(),
            StokesParams::new(grid, Coefficient::Constant(1.0), bump).unwrap().with_collocation(512).unwrap(),
        ] {
            let r = adjoint_restriction_check(&params).unwrap();
            assert!(r.k_vs_kstar < 1e-8, "{r:?}");
            assert!(r.s_hermitian < 1e-8, "{r:?}");
            assert!((r.jump_p - C64::new(0.0, -1.0)).norm() < 1e-10, "{r:?}");
            assert!((r.jump_p_star - C64::new(0.0, 1.0)).norm() < 1e-10, "{r:?}");
            assert!(r.jump_adjoint < 1e-10, "{r:?}");
        }
    }
}
