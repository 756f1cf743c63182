//! Distance between the same-component blocks of the assembled K and S
//! and their principal symbols σ₀(K), σ₋₁(S) along a transverse axis.

use super::boundary::BoundaryOperatorMatrix;
use crate::density::Component;
use crate::error::{Error, Result};
use crate::spectral::japanese_bracket;
use crate::symbols::{boundary_symbol, hermitian_eigenvalues, BoundaryKind, StokesSymbolParams};

/// Deviation of one block from its principal symbol, scaled by ⟨ξ′⟩^{−order}
/// so that a first-order approach decays like 1/|ξ′|.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolDeviation {
    pub k: i64,
    pub deviation: f64,
}

fn symbol_kind(m: &BoundaryOperatorMatrix) -> Result<(BoundaryKind, i32)> {
    use super::boundary::BoundaryOp;
    match m.which() {
        BoundaryOp::K => Ok((BoundaryKind::K, 0)),
        BoundaryOp::S => Ok((BoundaryKind::S, -1)),
        other => Err(Error::Unsupported(format!("no principal symbol comparison for {}", other.name()))),
    }
}

/// Transverse mode k·e₁ and the full frequency vector (k, 0, …, 0).
fn axis_mode(n: usize, k: i64) -> (Vec<i64>, Vec<f64>) {
    let mut mode = vec![0; n - 1];
    mode[0] = k;
    let mut xi = vec![0.0; n];
    xi[0] = k as f64;
    (mode, xi)
}

/// Largest deviation over both components at transverse mode k·e₁, with
/// the symbol taken at the coefficient values on each component.
pub fn symbol_deviation(m: &BoundaryOperatorMatrix, v: f64, v0: [f64; 2], k: i64) -> Result<SymbolDeviation> {
    let (kind, order) = symbol_kind(m)?;
    let grid = m.grid();
    let n = grid.dim();
    let (mode, xi) = axis_mode(n, k);
    let t = grid.transverse_index(&mode).ok_or_else(|| Error::Argument(format!("mode {k} is not on the grid")))?;
    let mut deviation: f64 = 0.0;
    for c in Component::BOTH {
        let mut nu = vec![0.0; n];
        nu[n - 1] = c.normal_sign();
        let p = StokesSymbolParams::new(v, v0[c.index()])?;
        let sigma = boundary_symbol(kind, &p, &nu, &xi)?;
        let scale = japanese_bracket(&xi[..n - 1]).powi(-order);
        deviation = deviation.max((m.diagonal_block(t, c) - sigma).norm() * scale);
    }
    Ok(SymbolDeviation { k, deviation })
}

/// Deviations at k = 4, 8, 16, 32 and the ratios dev(2k)/dev(k).
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport {
    pub deviations: Vec<SymbolDeviation>,
    pub ratios: Vec<f64>,
}

impl AsymptoticReport {
    pub fn worst_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

pub fn symbol_asymptotics(m: &BoundaryOperatorMatrix, v: f64, v0: [f64; 2], ks: &[i64]) -> Result<AsymptoticReport> {
    let deviations: Vec<SymbolDeviation> = ks.iter().map(|&k| symbol_deviation(m, v, v0, k)).collect::<Result<_>>()?;
    let ratios = deviations.windows(2).map(|w| w[1].deviation / w[0].deviation).collect();
    Ok(AsymptoticReport { deviations, ratios })
}

/// Largest distance between the Hermitian eigenvalues of the Γ₀ block of K
/// at mode k·e₁ and those of σ₀(K), together with |ξ′| = k.
pub fn k_eigenvalue_gap(k_matrix: &BoundaryOperatorMatrix, v: f64, v0: f64, k: i64) -> Result<f64> {
    let grid = k_matrix.grid();
    let n = grid.dim();
    let (mode, xi) = axis_mode(n, k);
    let t = grid.transverse_index(&mode).ok_or_else(|| Error::Argument(format!("mode {k} is not on the grid")))?;
    let mut nu = vec![0.0; n];
    nu[n - 1] = Component::Lower.normal_sign();
    let sigma = boundary_symbol(BoundaryKind::K, &StokesSymbolParams::new(v, v0)?, &nu, &xi)?;
    let a = hermitian_eigenvalues(&k_matrix.diagonal_block(t, Component::Lower));
    let b = hermitian_eigenvalues(&sigma);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layer::BoundaryOp;
    use crate::spectral::TorusGrid;
    use crate::stokes::{Coefficient, StokesParams};
    use std::f64::consts::PI;

    #[test]
    fn blocks_approach_principal_symbols() {
        let grid = TorusGrid::new(2, 128).unwrap();
        for v0 in [Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)] {
            let params = StokesParams::new(grid, Coefficient::Constant(1.0), v0).unwrap();
            let edge = [v0.value(0.0), v0.value(PI)];
            for which in [BoundaryOp::K, BoundaryOp::S] {
                let m = BoundaryOperatorMatrix::assemble(&params, which).unwrap();
                let r = symbol_asymptotics(&m, 1.0, edge, &[4, 8, 16, 32]).unwrap();
                eprintln!("{v0:?} {}: {:?}", which.name(), r);
                assert!(r.worst_ratio() <= 0.75, "{}: {r:?}", which.name());
            }
        }
    }

    #[test]
    fn k_eigenvalues_approach_one_sixth() {
        let grid = TorusGrid::new(2, 64).unwrap();
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let m = BoundaryOperatorMatrix::assemble(&params, BoundaryOp::K).unwrap();
        let gaps: Vec<f64> = [4, 8, 16].iter().map(|&k| k_eigenvalue_gap(&m, 1.0, 1.0, k).unwrap()).collect();
        eprintln!("{gaps:?}");
        for (k, g) in [4.0, 8.0, 16.0].iter().zip(&gaps) {
            assert!(g * k < 2.0, "{gaps:?}");
        }
    }
}
