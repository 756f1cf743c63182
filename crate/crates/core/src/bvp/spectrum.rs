//! Singular values, kernels and condition numbers of S and ½ + K, and the
//! classification they imply for the coefficient configuration.

use nalgebra::DMatrix;

use crate::density::Component;
use crate::error::Result;
use crate::layer::{BoundaryOperatorMatrix, BoundarySystem};
use crate::linalg::{singular_values, smallest_right_singular_vector};
use crate::spectral::japanese_bracket;
use crate::{CMatrix, C64};

use super::solve::normal_complement;

/// Singular values below this fraction of the largest count as kernel.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

/// Spectral summary of one boundary operator over all transverse modes.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpectrum {
    pub smallest: f64,
    pub second_smallest: f64,
    pub largest: f64,
    pub kernel_dim: usize,
    /// Modes that carry a kernel vector.
    pub kernel_modes: Vec<usize>,
}

impl OperatorSpectrum {
    pub fn condition(&self) -> f64 {
        self.largest / self.smallest
    }

    fn from_blocks(blocks: &[CMatrix]) -> Self {
        let mut all: Vec<(f64, usize)> = Vec::new();
        for (t, b) in blocks.iter().enumerate() {
            all.extend(singular_values(b).into_iter().map(|s| (s, t)));
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let largest = all.last().map_or(0.0, |x| x.0);
        let kernel: Vec<(f64, usize)> = all.iter().copied().filter(|x| x.0 <= KERNEL_TOLERANCE * largest).collect();
        let mut kernel_modes: Vec<usize> = kernel.iter().map(|x| x.1).collect();
        kernel_modes.sort_unstable();
        kernel_modes.dedup();
        Self {
            smallest: all.first().map_or(0.0, |x| x.0),
            second_smallest: all.get(1).map_or(0.0, |x| x.0),
            largest,
            kernel_dim: kernel.len(),
            kernel_modes,
        }
    }
}

/// Report of the theorem-level structure of S and ½ + K.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// ⟨ξ′⟩^{1/2} S ⟨ξ′⟩^{1/2}, the H^{−1/2} → H^{1/2} realization of S.
    pub s: OperatorSpectrum,
    /// |⟨v, ν̂⟩| for the right singular vector of the smallest singular
    /// value of S on ξ′ = 0, with ν̂ the normalized normal.
    pub s_kernel_normal_correlation: f64,
    pub half_plus_k: OperatorSpectrum,
    /// ½ + K* assembled from the single layer, standing in for (½+K)*.
    pub half_plus_kstar: OperatorSpectrum,
    /// ½ + K compressed to {ν}⊥ on ξ′ = 0 (other modes unchanged).
    pub half_plus_k_on_complement: OperatorSpectrum,
    /// |(( ½ + K)h, ν)| / ‖h‖ maximized over h on ξ′ = 0.
    pub range_normal_component: f64,
    /// V₀ vanishes on Ω, so the theorem predicts ker S = ℂν.
    pub v0_zero_inside: bool,
    /// V₀ is nonzero somewhere on Ω₋, the hypothesis of the invertibility
    /// theorems; without it only the index-zero proxy is checked.
    pub hypotheses_hold: bool,
}

impl SpectrumReport {
    /// Whether the detected structure is the one the theorems predict.
    pub fn matches_theorem(&self) -> bool {
        let index_zero = self.half_plus_k.kernel_dim == self.half_plus_kstar.kernel_dim;
        if !self.hypotheses_hold {
            index_zero
        } else if self.v0_zero_inside {
            index_zero
                && self.s.kernel_dim == 1
                && self.s_kernel_normal_correlation >= 0.999
                && self.half_plus_k_on_complement.kernel_dim == 0
        } else {
            index_zero && self.s.kernel_dim == 0 && self.half_plus_k.kernel_dim == 0
        }
    }
}

fn normal_vector(n: usize) -> CMatrix {
    let mut nu = DMatrix::<C64>::zeros(2 * n, 1);
    for c in Component::BOTH {
        nu[(c.index() * n + n - 1, 0)] = C64::new(c.normal_sign() / 2f64.sqrt(), 0.0);
    }
    nu
}

/// Spectra of S and ½ + K for an assembled boundary system.
pub fn operator_spectrum(system: &BoundarySystem) -> Result<SpectrumReport> {
    let params = system.params();
    let grid = params.grid;
    let n = params.dim();
    let weighted: Vec<CMatrix> = system
        .s
        .blocks()
        .iter()
        .enumerate()
        .map(|(t, b)| {
            let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&a| a as f64).collect();
            b * C64::new(japanese_bracket(&xi), 0.0)
        })
        .collect();
    let s = OperatorSpectrum::from_blocks(&weighted);
    let nu = normal_vector(n);
    let (_, v) = smallest_right_singular_vector(system.s.block(0));
    let s_kernel_normal_correlation = (v.adjoint() * &nu)[(0, 0)].norm();

    let b = system.k.shifted(0.5)?;
    let bs = system.kstar.shifted(0.5)?;
    let q = normal_complement(n);
    let mut compressed: Vec<CMatrix> = b.blocks().to_vec();
    compressed[0] = q.adjoint() * b.block(0) * &q;
    let range_normal_component = (nu.adjoint() * b.block(0)).norm();
    Ok(SpectrumReport {
        s,
        s_kernel_normal_correlation,
        half_plus_k: OperatorSpectrum::from_blocks(b.blocks()),
        half_plus_kstar: OperatorSpectrum::from_blocks(bs.blocks()),
        half_plus_k_on_complement: OperatorSpectrum::from_blocks(&compressed),
        range_normal_component,
        v0_zero_inside: params.assumptions().v0_zero_inside,
        hypotheses_hold: params.assumptions().v0_nonzero_outside,
    })
}

/// Smallest singular value of ½ + K (on {ν}⊥ when V₀ vanishes on Ω).
pub fn half_plus_k_floor(report: &SpectrumReport) -> f64 {
    if report.v0_zero_inside {
        report.half_plus_k_on_complement.smallest
    } else {
        report.half_plus_k.smallest
    }
}

/// Smallest singular value of S (off the kernel when V₀ vanishes on Ω).
pub fn s_floor(report: &SpectrumReport) -> f64 {
    if report.v0_zero_inside {
        report.s.second_smallest
    } else {
        report.s.smallest
    }
}

/// Helper for callers that only hold the operator matrix.
pub fn spectrum_of(m: &BoundaryOperatorMatrix) -> OperatorSpectrum {
    OperatorSpectrum::from_blocks(m.blocks())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stokes::{Coefficient, StokesParams};
    use std::f64::consts::PI;

    #[test]
    fn classification_matches_coefficients() {
        let grid = TorusGrid::new(2, 32).unwrap();
        let cases = [
            (Coefficient::Constant(1.0), Coefficient::Constant(1.0)),
            (Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)),
            (Coefficient::Constant(0.0), Coefficient::exterior_bump(1.0, PI)),
            (Coefficient::Constant(0.0), Coefficient::Constant(1.0)),
            (Coefficient::Constant(0.0), Coefficient::Constant(0.0)),
            (Coefficient::Constant(1.0), Coefficient::Constant(0.0)),
        ];
        for (v, v0) in cases {
            let params = StokesParams::new(grid, v, v0).unwrap();
            let r = operator_spectrum(&BoundarySystem::new(&params).unwrap()).unwrap();
            eprintln!("{}: {r:?}", params.label());
            assert!(r.matches_theorem(), "{}: {r:?}", params.label());
            if !r.hypotheses_hold {
                continue;
            }
            if r.v0_zero_inside {
                assert!(r.s.smallest <= 1e-6 && r.s.second_smallest >= 1e-2, "{r:?}");
                assert!(r.range_normal_component <= 1e-6, "{r:?}");
                assert!(half_plus_k_floor(&r) >= 1e-3);
            } else {
                assert!(r.s.smallest >= 1e-3, "{r:?}");
            }
        }
    }
}
