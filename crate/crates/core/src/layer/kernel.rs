//! Kernel 𝒩 of Ξ on the flat torus, the Moore–Penrose pseudoinverse on
//! grid fields and the embedding of boundary densities as distributions.

use rayon::prelude::*;

use super::strip::{collocation_matrix, StripSolver};
use crate::density::BoundaryDensity;
use crate::error::{Error, Result};
use crate::linalg::hermitian_singular_pairs;
use crate::spectral::{SpectralField, TorusGrid};
use crate::stokes::green::embed_on_grid;
use crate::stokes::{apply_xi, KernelCase, StokesParams, VelocityPressureField};
use crate::symbols::full_inverse;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Orthonormal basis of 𝒩 = ker Ξ; on the flat torus every kernel element is constant.
#[derive(Clone, Debug)]
pub struct KernelSpace {
    case: KernelCase,
    grid: TorusGrid,
    /// Components (0..n velocity, n pressure) whose constants span 𝒩.
    components: Vec<usize>,
}

impl KernelSpace {
    pub fn new(params: &StokesParams) -> Self {
        Self::for_case(params.grid, params.kernel_case())
    }

    pub fn for_case(grid: TorusGrid, case: KernelCase) -> Self {
        let n = grid.dim();
        let mut components = Vec::new();
        if case.has_velocity() {
            components.extend(0..n);
        }
        if case.has_pressure() {
            components.push(n);
        }
        Self { case, grid, components }
    }

    pub fn case(&self) -> KernelCase {
        self.case
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    /// Basis fields e_c/(2π)^{n/2}.
    pub fn basis(&self) -> Vec<VelocityPressureField> {
        let n = self.grid.dim();
        let scale = 1.0 / self.grid.volume().sqrt();
        self.components
            .iter()
            .map(|&c| {
                let mut f = SpectralField::zeros(self.grid, n + 1);
                f.set(c, 0, C64::new(scale, 0.0));
                VelocityPressureField::from_field(f).expect("n+1 components")
            })
            .collect()
    }

    /// p_𝒩 F: the ξ = 0 coefficients of the kernel components.
    pub fn project(&self, f: &VelocityPressureField) -> VelocityPressureField {
        let mut out = VelocityPressureField::zeros(f.grid());
        for &c in &self.components {
            out.field_mut().set(c, 0, f.field().at(c, 0));
        }
        out
    }

    /// max ‖Ξ e‖ over the basis.
    pub fn residual(&self, params: &StokesParams) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in self.basis() {
            worst = worst.max(apply_xi(params, &e)?.l2_norm());
        }
        Ok(worst)
    }
}

/// Kernel dimension found numerically from the singular values of the
/// assembled discrete operator, with the residual of the null vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelDetection {
    pub dim: usize,
    /// Largest ‖Ξv‖ over the detected null vectors.
    pub residual: f64,
    /// Smallest singular value kept as nonzero.
    pub gap: f64,
}

/// Counts singular values below `tol`·σ_max of the collocation matrices at
/// every transverse mode of the grid.
pub fn detect_kernel(params: &StokesParams, tol: f64) -> KernelDetection {
    let grid = params.grid;
    let nz = grid.points();
    let results: Vec<(usize, f64, f64, f64)> = (0..grid.transverse_len())
        .into_par_iter()
        .map(|t| {
            let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&m| m as f64).collect();
            let m = collocation_matrix(params, &xi, nz);
            // The collocation matrix is Hermitian, so |eigenvalues| are its singular values.
            let (values, vectors) = hermitian_singular_pairs(&m);
            let max = values.iter().copied().fold(0.0, f64::max);
            let mut dim = 0;
            let mut residual: f64 = 0.0;
            let mut gap = f64::INFINITY;
            for (i, &s) in values.iter().enumerate() {
                if s <= tol * max {
                    dim += 1;
                    residual = residual.max((&m * vectors.column(i)).norm());
                } else {
                    gap = gap.min(s);
                }
            }
            (dim, residual, gap, max)
        })
        .collect();
    let dim = results.iter().map(|r| r.0).sum();
    let residual = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let gap = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    KernelDetection { dim, residual, gap }
}

/// Ξ^{(−1)} F: per-mode inverses for constant coefficients, collocation
/// solves in x_n at each ξ′ otherwise. The result is orthogonal to 𝒩.
pub fn pseudo_inverse_apply(params: &StokesParams, f: &VelocityPressureField) -> Result<VelocityPressureField> {
    let grid = f.grid();
    if grid != params.grid {
        return Err(Error::Dimension("field and parameters use different grids".into()));
    }
    let n = grid.dim();
    let np = grid.points();
    let mut out = SpectralField::zeros(grid, n + 1);
    if params.is_constant() {
        let sp = params.reference();
        for flat in 0..grid.len() {
            let xi: Vec<f64> = grid.mode(flat).into_iter().map(|m| m as f64).collect();
            let m = full_inverse(&sp, &xi);
            let v = f.mode_vector(flat);
            for i in 0..=n {
                out.set(i, flat, (0..=n).map(|j| m[(i, j)] * v[j]).sum());
            }
        }
        return VelocityPressureField::from_field(out);
    }
    let solved: Vec<Result<Vec<Vec<C64>>>> = (0..grid.transverse_len())
        .into_par_iter()
        .map(|t| {
            let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&m| m as f64).collect();
            let solver = StripSolver::new(params, &xi, np)?;
            let rhs: Vec<Vec<C64>> = (0..=n).map(|c| f.field().component(c)[t * np..(t + 1) * np].to_vec()).collect();
            solver.solve(&rhs)
        })
        .collect();
    for (t, w) in solved.into_iter().enumerate() {
        let w = w?;
        for (c, col) in w.into_iter().enumerate() {
            out.component_mut(c)[t * np..(t + 1) * np].copy_from_slice(&col);
        }
    }
    VelocityPressureField::from_field(out)
}

/// Coefficients (2π)⁻¹ ĥ(ξ′) e^{−iξ_n c} of hδ_Γ on the grid modes.
pub fn embed_density(h: &BoundaryDensity, strip: f64) -> SpectralField {
    embed_on_grid(h, strip)
}

/// Layer-potential kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerKind {
    /// 𝒮_ST h = Ξ^{(−1)}[(h, 0)δ_Γ].
    Single,
    /// 𝒟_ST h = Ξ^{(−1)}[T̃_ν*(hδ_Γ)].
    Double,
}

/// Grid coefficients of the distribution the potential of `kind` inverts.
pub fn embed_source(kind: LayerKind, h: &BoundaryDensity, strip: f64) -> Result<VelocityPressureField> {
    let grid = h.grid();
    let n = grid.dim();
    if h.width() != n {
        return Err(Error::Dimension("layer densities carry n components".into()));
    }
    let mut out = SpectralField::zeros(grid, n + 1);
    for comp in crate::density::Component::BOTH {
        let mut single = BoundaryDensity::zeros(&grid, n);
        single.component_mut(comp).copy_from_slice(h.component(comp));
        let emb = embed_on_grid(&single, strip);
        let s = comp.normal_sign();
        for flat in 0..grid.len() {
            let xi: Vec<f64> = grid.mode(flat).into_iter().map(|m| m as f64).collect();
            match kind {
                LayerKind::Single => {
                    for i in 0..n {
                        out.set(i, flat, out.at(i, flat) + emb.at(i, flat));
                    }
                }
                LayerKind::Double => {
                    let xn = s * xi[n - 1];
                    let dot: C64 = (0..n).map(|j| xi[j] * emb.at(j, flat)).sum();
                    for i in 0..n {
                        let mut z = I * xn * emb.at(i, flat);
                        if i == n - 1 {
                            z += I * s * dot;
                        }
                        out.set(i, flat, out.at(i, flat) + z);
                    }
                    out.set(n, flat, out.at(n, flat) + s * emb.at(n - 1, flat));
                }
            }
        }
    }
    VelocityPressureField::from_field(out)
}

/// Grid coefficients of a layer potential, Ξ^{(−1)} applied to the
/// truncated source distribution.
pub fn layer_coefficients(params: &StokesParams, kind: LayerKind, h: &BoundaryDensity) -> Result<VelocityPressureField> {
    pseudo_inverse_apply(params, &embed_source(kind, h, params.strip)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::Coefficient;
    use rand::SeedableRng;

    #[test]
    fn detected_kernel_matches_classification() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let bump = Coefficient::exterior_bump(1.0, std::f64::consts::PI);
        let configs = [
            StokesParams::constant(grid, 0.0, 0.0).unwrap(),
            StokesParams::constant(grid, 1.0, 0.0).unwrap(),
            StokesParams::new(grid, Coefficient::Constant(0.0), bump).unwrap(),
            StokesParams::constant(grid, 1.0, 1.0).unwrap(),
        ];
        for (params, want) in configs.iter().zip([3, 1, 2, 0]) {
            let det = detect_kernel(params, 1e-10);
            assert_eq!(det.dim, want);
            assert!(det.residual < 1e-8);
            let space = KernelSpace::new(params);
            assert_eq!(space.dim(), want);
            assert!(space.residual(params).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pseudo_inverse_relations() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let bump = Coefficient::exterior_bump(1.0, std::f64::consts::PI);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for params in [
            StokesParams::constant(grid, 0.0, 0.0).unwrap(),
            StokesParams::new(grid, Coefficient::Constant(0.0), bump).unwrap(),
        ] {
            let space = KernelSpace::new(&params);
            let f = VelocityPressureField::random_band_limited(grid, 5, &mut rng);
            let g = pseudo_inverse_apply(&params, &f).unwrap();
            let back = apply_xi(&params, &g).unwrap();
            let expect = f.sub(&space.project(&f)).unwrap();
            assert!(back.sub(&expect).unwrap().l2_norm() < 1e-9 * f.l2_norm());
            assert!(space.project(&g).l2_norm() < 1e-12);
        }
    }

    #[test]
    fn embedded_density_pairs_with_test_fields() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let h = BoundaryDensity::random_band_limited(&grid, 2, 3, &mut rng);
        let phi = SpectralField::random_band_limited(grid, 2, 4, &mut rng);
        let params = StokesParams::constant(grid, 1.0, 1.0).unwrap();
        let pairing = embed_density(&h, params.strip).inner(&phi).unwrap();
        let phi_u = VelocityPressureField::from_parts(&phi, &SpectralField::zeros(grid, 1)).unwrap();
        let surface = h.inner(&crate::stokes::velocity_trace(&params, &phi_u)).unwrap();
        assert!((pairing - surface).norm() < 1e-12 * surface.norm().max(1.0));
    }
}
