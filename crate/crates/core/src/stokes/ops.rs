//! Grid realizations of Def, Def*, ∇, ∇*, D_ν, D_ν*, Ξ and the conormal
//! operator T_ν, acting on band-limited spectral fields.

use rand::Rng;

use super::params::{Coefficient, StokesParams};
use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};
use crate::symbols::{full_symbol, FirstOrder};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// U = (u, p): n velocity components followed by the pressure.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityPressureField {
    field: SpectralField,
}

impl VelocityPressureField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { field: SpectralField::zeros(grid, grid.dim() + 1) }
    }

    pub fn from_field(field: SpectralField) -> Result<Self> {
        if field.components() != field.grid().dim() + 1 {
            return Err(Error::Dimension(format!(
                "velocity-pressure fields need {} components, got {}",
                field.grid().dim() + 1,
                field.components()
            )));
        }
        Ok(Self { field })
    }

    pub fn from_parts(u: &SpectralField, p: &SpectralField) -> Result<Self> {
        let grid = u.grid();
        if u.components() != grid.dim() || p.components() != 1 || p.grid() != grid {
            return Err(Error::Dimension("velocity needs n components and pressure one".into()));
        }
        let mut coeffs = u.coeffs().to_vec();
        coeffs.extend_from_slice(p.coeffs());
        Ok(Self { field: SpectralField::from_coeffs(grid, grid.dim() + 1, coeffs)? })
    }

    /// Real random field with modes max|ξ_a| ≤ bandwidth.
    pub fn random_band_limited<R: Rng>(grid: TorusGrid, bandwidth: usize, rng: &mut R) -> Self {
        Self { field: SpectralField::random_band_limited(grid, grid.dim() + 1, bandwidth, rng) }
    }

    pub fn grid(&self) -> TorusGrid {
        self.field.grid()
    }

    pub fn dim(&self) -> usize {
        self.field.grid().dim()
    }

    pub fn field(&self) -> &SpectralField {
        &self.field
    }

    pub fn field_mut(&mut self) -> &mut SpectralField {
        &mut self.field
    }

    pub fn velocity(&self) -> SpectralField {
        let n = self.dim();
        let len = self.grid().len();
        SpectralField::from_coeffs(self.grid(), n, self.field.coeffs()[..n * len].to_vec())
            .expect("slice sized by construction")
    }

    pub fn pressure(&self) -> SpectralField {
        let n = self.dim();
        SpectralField::from_coeffs(self.grid(), 1, self.field.component(n).to_vec()).expect("one component")
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.field.inner(&other.field)
    }

    pub fn l2_norm(&self) -> f64 {
        self.field.l2_norm()
    }

    pub fn axpy(&mut self, a: C64, other: &Self) -> Result<()> {
        self.field.axpy(a, &other.field)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// Per-mode vector (û(ξ), p̂(ξ)) at a flat grid index.
    pub fn mode_vector(&self, flat: usize) -> Vec<C64> {
        (0..=self.dim()).map(|c| self.field.at(c, flat)).collect()
    }
}

fn wave(grid: &TorusGrid, flat: usize) -> Vec<f64> {
    grid.mode(flat).into_iter().map(|m| m as f64).collect()
}

fn expect_components(f: &SpectralField, want: usize, what: &str) -> Result<()> {
    if f.components() != want {
        return Err(Error::Dimension(format!("{what} expects {want} components, got {}", f.components())));
    }
    Ok(())
}

/// Multiplies every component of `f` by the real function `m(x)` in real space.
pub fn multiply_by(f: &SpectralField, m: impl Fn(&[f64]) -> f64) -> SpectralField {
    let grid = f.grid();
    let len = grid.len();
    let weights: Vec<f64> = (0..len).map(|j| m(&grid.coordinate(j))).collect();
    let mut values = f.values();
    for chunk in values.chunks_mut(len) {
        for (z, w) in chunk.iter_mut().zip(&weights) {
            *z *= w;
        }
    }
    SpectralField::from_values(grid, f.components(), &values).expect("same shape")
}

/// Spectral Def: n components to n² components, T_{ij} = ½(∂_i u_j + ∂_j u_i).
fn def(u: &SpectralField) -> SpectralField {
    let grid = u.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, n * n);
    for flat in 0..grid.len() {
        let xi = wave(&grid, flat);
        for i in 0..n {
            for j in 0..n {
                let z = 0.5 * I * (xi[i] * u.at(j, flat) + xi[j] * u.at(i, flat));
                out.set(i * n + j, flat, z);
            }
        }
    }
    out
}

/// Spectral Def*: (Def* T)_i = −½ Σ_j ∂_j(T_{ij} + T_{ji}).
fn def_star(t: &SpectralField) -> SpectralField {
    let grid = t.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, n);
    for flat in 0..grid.len() {
        let xi = wave(&grid, flat);
        for i in 0..n {
            let mut z = C64::new(0.0, 0.0);
            for j in 0..n {
                z += xi[j] * (t.at(i * n + j, flat) + t.at(j * n + i, flat));
            }
            out.set(i, flat, -0.5 * I * z);
        }
    }
    out
}

/// (D_ν u)_i = Σ_j Def(u)_{ij} ν_j for the extended normal ν_ext = −cos(x_n)e_n.
fn d_nu(u: &SpectralField) -> SpectralField {
    let grid = u.grid();
    let n = grid.dim();
    let t = def(u);
    let mut col = SpectralField::zeros(grid, n);
    for i in 0..n {
        col.component_mut(i).copy_from_slice(t.component(i * n + n - 1));
    }
    multiply_by(&col, |x| -x[n - 1].cos())
}

/// D_ν* v = Def*(v ⊗ ν_ext).
fn d_nu_star(v: &SpectralField) -> SpectralField {
    let grid = v.grid();
    let n = grid.dim();
    let scaled = multiply_by(v, |x| -x[n - 1].cos());
    let mut t = SpectralField::zeros(grid, n * n);
    for i in 0..n {
        t.component_mut(i * n + n - 1).copy_from_slice(scaled.component(i));
    }
    def_star(&t)
}

/// Applies a first-order operator. Component counts: Def n→n², DefStar n²→n,
/// Grad 1→n, DivStar n→1, Dnu and DnuStar n→n (with ν = ν_ext).
pub fn apply_first_order(which: FirstOrder, f: &SpectralField) -> Result<SpectralField> {
    let grid = f.grid();
    let n = grid.dim();
    match which {
        FirstOrder::Def => {
            expect_components(f, n, "Def")?;
            Ok(def(f))
        }
        FirstOrder::DefStar => {
            expect_components(f, n * n, "Def*")?;
            Ok(def_star(f))
        }
        FirstOrder::Grad => {
            expect_components(f, 1, "grad")?;
            let mut out = SpectralField::zeros(grid, n);
            for flat in 0..grid.len() {
                let xi = wave(&grid, flat);
                for (i, x) in xi.iter().enumerate() {
                    out.set(i, flat, I * x * f.at(0, flat));
                }
            }
            Ok(out)
        }
        FirstOrder::DivStar => {
            expect_components(f, n, "grad*")?;
            let mut out = SpectralField::zeros(grid, 1);
            for flat in 0..grid.len() {
                let xi = wave(&grid, flat);
                let z: C64 = xi.iter().enumerate().map(|(i, x)| x * f.at(i, flat)).sum();
                out.set(0, flat, -I * z);
            }
            Ok(out)
        }
        FirstOrder::Dnu => {
            expect_components(f, n, "D_nu")?;
            Ok(d_nu(f))
        }
        FirstOrder::DnuStar => {
            expect_components(f, n, "D_nu*")?;
            Ok(d_nu_star(f))
        }
    }
}

fn multiply_coefficient(f: &SpectralField, c: &Coefficient) -> SpectralField {
    match *c {
        Coefficient::Constant(a) => {
            let mut out = f.clone();
            out.coeffs_mut().iter_mut().for_each(|z| *z *= a);
            out
        }
        _ => {
            let n = f.grid().dim();
            multiply_by(f, |x| c.value(x[n - 1]))
        }
    }
}

/// Ξ U = (2Def*Def u + Vu + ∇p, ∇*u − V₀p).
pub fn apply_xi(params: &StokesParams, u: &VelocityPressureField) -> Result<VelocityPressureField> {
    let grid = u.grid();
    if grid != params.grid {
        return Err(Error::Dimension("field and parameters use different grids".into()));
    }
    let n = grid.dim();
    let vel = u.velocity();
    let pre = u.pressure();
    let vu = multiply_coefficient(&vel, &params.v);
    let v0p = multiply_coefficient(&pre, &params.v0);
    let mut out = SpectralField::zeros(grid, n + 1);
    for flat in 0..grid.len() {
        let xi = wave(&grid, flat);
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        let dot: C64 = xi.iter().enumerate().map(|(j, x)| x * vel.at(j, flat)).sum();
        for i in 0..n {
            let z = k2 * vel.at(i, flat) + xi[i] * dot + vu.at(i, flat) + I * xi[i] * pre.at(0, flat);
            out.set(i, flat, z);
        }
        out.set(n, flat, -I * dot - v0p.at(0, flat));
    }
    VelocityPressureField::from_field(out)
}

/// Ξ U computed mode by mode from the full constant-coefficient symbol.
pub fn apply_xi_symbol(params: &StokesParams, u: &VelocityPressureField) -> Result<VelocityPressureField> {
    if !params.is_constant() {
        return Err(Error::Unsupported("the symbol action needs constant V and V0".into()));
    }
    let grid = u.grid();
    let n = grid.dim();
    let sp = params.reference();
    let mut out = SpectralField::zeros(grid, n + 1);
    for flat in 0..grid.len() {
        let m = full_symbol(&sp, &wave(&grid, flat));
        let v = u.mode_vector(flat);
        for i in 0..=n {
            let z: C64 = (0..=n).map(|j| m[(i, j)] * v[j]).sum();
            out.set(i, flat, z);
        }
    }
    VelocityPressureField::from_field(out)
}

/// Trace of one component of a band-limited field on the slice x_n = height,
/// returned per transverse mode.
pub fn slice_trace(f: &SpectralField, comp: usize, height: f64) -> Vec<C64> {
    let grid = f.grid();
    let np = grid.points();
    let phases: Vec<C64> = (0..np)
        .map(|j| C64::from_polar(1.0, crate::spectral::mode_of_index(j, np) as f64 * height))
        .collect();
    let data = f.component(comp);
    (0..grid.transverse_len())
        .map(|t| data[t * np..(t + 1) * np].iter().zip(&phases).map(|(a, e)| a * e).sum())
        .collect()
}

/// Trace of the velocity of U on both boundary components.
pub fn velocity_trace(params: &StokesParams, u: &VelocityPressureField) -> BoundaryDensity {
    let grid = u.grid();
    let n = grid.dim();
    let mut h = BoundaryDensity::zeros(&grid, n);
    for c in Component::BOTH {
        for i in 0..n {
            let tr = slice_trace(u.field(), i, c.height(params.strip));
            for (mode, z) in tr.into_iter().enumerate() {
                h.set(c, mode, i, z);
            }
        }
    }
    h
}

/// T_ν U = −2D_ν u + pν on one component, with ν the outer normal of Ω there.
pub fn conormal(params: &StokesParams, u: &VelocityPressureField, component: Component) -> Vec<Vec<C64>> {
    let grid = u.grid();
    let n = grid.dim();
    let s = component.normal_sign();
    let height = component.height(params.strip);
    let t = def(&u.velocity());
    let p = slice_trace(u.field(), n, height);
    let mut out: Vec<Vec<C64>> = (0..n).map(|i| slice_trace(&t, i * n + n - 1, height)).collect();
    for (i, row) in out.iter_mut().enumerate() {
        for (mode, z) in row.iter_mut().enumerate() {
            *z *= -2.0 * s;
            if i == n - 1 {
                *z += s * p[mode];
            }
        }
    }
    out
}

/// T_ν U on both components as a boundary density.
pub fn conormal_density(params: &StokesParams, u: &VelocityPressureField) -> BoundaryDensity {
    let grid = u.grid();
    let n = grid.dim();
    let mut h = BoundaryDensity::zeros(&grid, n);
    for c in Component::BOTH {
        for (i, row) in conormal(params, u, c).into_iter().enumerate() {
            for (mode, z) in row.into_iter().enumerate() {
                h.set(c, mode, i, z);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(2, 16).unwrap()
    }

    #[test]
    fn def_of_shear_and_constants() {
        let g = grid();
        let u = SpectralField::from_fn(g, 2, |x| vec![x[1].sin(), 0.0]);
        let t = apply_first_order(FirstOrder::Def, &u).unwrap().real_values();
        let len = g.len();
        for j in 0..len {
            let x = g.coordinate(j);
            assert!(t[j].abs() < 1e-13);
            assert!((t[len + j] - 0.5 * x[1].cos()).abs() < 1e-13);
            assert!((t[2 * len + j] - 0.5 * x[1].cos()).abs() < 1e-13);
        }
        let c = SpectralField::from_fn(g, 2, |_| vec![1.0, -2.0]);
        assert!(apply_first_order(FirstOrder::Def, &c).unwrap().max_coeff() < 1e-15);
    }

    #[test]
    fn grad_star_grad_is_minus_laplacian() {
        let g = grid();
        let p = SpectralField::from_fn(g, 1, |x| vec![x[0].cos()]);
        let gp = apply_first_order(FirstOrder::Grad, &p).unwrap();
        let lp = apply_first_order(FirstOrder::DivStar, &gp).unwrap();
        let mut d = lp.clone();
        d.axpy(C64::new(-1.0, 0.0), &p).unwrap();
        assert!(d.max_coeff() < 1e-14);
    }

    #[test]
    fn xi_matches_symbol_and_kills_constants() {
        let g = grid();
        let params = StokesParams::constant(g, 0.0, 0.0).unwrap();
        let k = VelocityPressureField::from_field(SpectralField::from_fn(g, 3, |_| vec![1.0, 2.0, 3.0])).unwrap();
        assert!(apply_xi(&params, &k).unwrap().field().max_coeff() < 1e-14);
        let params = StokesParams::constant(g, 0.7, 1.3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u = VelocityPressureField::random_band_limited(g, 4, &mut rng);
        let a = apply_xi(&params, &u).unwrap();
        let b = apply_xi_symbol(&params, &u).unwrap();
        assert!(a.sub(&b).unwrap().field().max_coeff() < 1e-12);
    }

    #[test]
    fn conormal_of_pressure_is_p_nu() {
        let g = grid();
        let params = StokesParams::constant(g, 1.0, 1.0).unwrap();
        let u = VelocityPressureField::from_field(SpectralField::from_fn(g, 3, |x| vec![0.0, 0.0, 2.0 + x[0].cos()]))
            .unwrap();
        let t = conormal(&params, &u, Component::Upper);
        assert!((t[1][0] - C64::new(2.0, 0.0)).norm() < 1e-13);
        assert!((t[1][1] - C64::new(0.5, 0.0)).norm() < 1e-13);
        assert!(t[0].iter().all(|z| z.norm() < 1e-13));
        let lower = conormal(&params, &u, Component::Lower);
        assert!((lower[1][0] + C64::new(2.0, 0.0)).norm() < 1e-13);
        let _ = PI;
    }
}
