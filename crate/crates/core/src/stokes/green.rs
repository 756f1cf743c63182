//! Exact integrals over the strip Ω = {0 < x_n < L} of products of
//! band-limited fields, the Green-type identities and the energy norms.

use super::ops::{apply_first_order, apply_xi, conormal_density, slice_trace, VelocityPressureField};
use super::params::{Coefficient, StokesParams};
use crate::density::{BoundaryDensity, Component};
use crate::error::{Error, Result};
use crate::spectral::{gauss_legendre, mode_of_index, SpectralField, TorusGrid};
use crate::symbols::{full_symbol, FirstOrder};
use crate::C64;

use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// ∫₀^L e^{imx} dx.
pub fn strip_moment(m: i64, strip: f64) -> C64 {
    if m == 0 {
        C64::new(strip, 0.0)
    } else {
        let mf = m as f64;
        (C64::from_polar(1.0, mf * strip) - 1.0) / (I * mf)
    }
}

/// Composite Gauss–Legendre rule on [a, b].
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(lo + 0.5 * h * (x + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

/// Integrates products of band-limited fields over Ω, optionally weighted
/// by a coefficient of x_n, using the moments ∫₀^L c(x) e^{imx} dx.
#[derive(Clone, Debug)]
pub struct StripIntegrator {
    grid: TorusGrid,
    strip: f64,
    plain: Vec<C64>,
}

impl StripIntegrator {
    pub fn new(grid: TorusGrid, strip: f64) -> Self {
        let np = grid.points() as i64;
        let plain = (-(np - 1)..np).map(|m| strip_moment(m, strip)).collect();
        Self { grid, strip, plain }
    }

    pub fn strip(&self) -> f64 {
        self.strip
    }

    /// Moments ∫₀^L c(x_n) e^{imx_n} dx_n for |m| < N.
    pub fn moments(&self, c: &Coefficient) -> Vec<C64> {
        match *c {
            Coefficient::Constant(a) => self.plain.iter().map(|z| z * a).collect(),
            _ => {
                let (xs, ws) = composite_rule(0.0, self.strip, 64, 16);
                let vals: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| c.value(*x) * w).collect();
                let np = self.grid.points() as i64;
                (-(np - 1)..np)
                    .map(|m| xs.iter().zip(&vals).map(|(x, v)| C64::from_polar(*v, m as f64 * x)).sum())
                    .collect()
            }
        }
    }

    /// ∫_Ω Σ_c f_c ḡ_c weighted by the given moments.
    pub fn pair_weighted(&self, f: &SpectralField, g: &SpectralField, moments: &[C64]) -> Result<C64> {
        if f.grid() != self.grid || g.grid() != self.grid || f.components() != g.components() {
            return Err(Error::Dimension("strip pairing needs fields of the same shape".into()));
        }
        let np = self.grid.points();
        let off = np as i64 - 1;
        let modes: Vec<i64> = (0..np).map(|j| mode_of_index(j, np)).collect();
        let mut total = C64::new(0.0, 0.0);
        for c in 0..f.components() {
            let (fc, gc) = (f.component(c), g.component(c));
            for t in 0..self.grid.transverse_len() {
                let fs = &fc[t * np..(t + 1) * np];
                let gs = &gc[t * np..(t + 1) * np];
                for (a, ka) in fs.iter().zip(&modes) {
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut row = C64::new(0.0, 0.0);
                    for (b, kb) in gs.iter().zip(&modes) {
                        row += b.conj() * moments[(ka - kb + off) as usize];
                    }
                    total += a * row;
                }
            }
        }
        Ok(total * (2.0 * PI).powi(self.grid.dim() as i32 - 1))
    }

    /// (f, g)_Ω.
    pub fn pair(&self, f: &SpectralField, g: &SpectralField) -> Result<C64> {
        self.pair_weighted(f, g, &self.plain)
    }

    /// Fourier coefficients of 1_Ω f at the grid modes.
    pub fn restrict(&self, f: &SpectralField) -> SpectralField {
        let np = self.grid.points();
        let off = np as i64 - 1;
        let modes: Vec<i64> = (0..np).map(|j| mode_of_index(j, np)).collect();
        let mut out = SpectralField::zeros(self.grid, f.components());
        for c in 0..f.components() {
            let fc = f.component(c).to_vec();
            let oc = out.component_mut(c);
            for t in 0..self.grid.transverse_len() {
                for (j, k) in modes.iter().enumerate() {
                    let z: C64 = (0..np)
                        .map(|l| fc[t * np + l] * self.plain[(modes[l] - k + off) as usize])
                        .sum();
                    oc[t * np + j] = z / (2.0 * PI);
                }
            }
        }
        out
    }
}

/// Relative residuals of the three Green-type identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenResiduals {
    /// (ΞU, W)_Ω − B_Ω(U, W) − (T_ν U, w)_Γ.
    pub first: f64,
    /// (ΞU, W)_Ω − (U, ΞW)_Ω − (T_ν U, w)_Γ + (u, T_ν W)_Γ.
    pub second: f64,
    /// ⟨Ξ(1_Ω U), W⟩ − ⟨1_Ω ΞU − (T̃_ν U)δ_Γ + T̃_ν*(Uδ_Γ), W⟩ on the torus.
    pub third: f64,
}

impl GreenResiduals {
    pub fn max(&self) -> f64 {
        self.first.max(self.second).max(self.third)
    }
}

/// B_Ω(U, W) = 2(Def u, Def w) + (p, ∇*w) + (∇*u, q) + (Vu, w) − (V₀p, q), all over Ω.
pub fn bilinear_form(
    params: &StokesParams,
    integ: &StripIntegrator,
    u: &VelocityPressureField,
    w: &VelocityPressureField,
) -> Result<C64> {
    let (uv, up) = (u.velocity(), u.pressure());
    let (wv, wq) = (w.velocity(), w.pressure());
    let du = apply_first_order(FirstOrder::Def, &uv)?;
    let dw = apply_first_order(FirstOrder::Def, &wv)?;
    let divu = apply_first_order(FirstOrder::DivStar, &uv)?;
    let divw = apply_first_order(FirstOrder::DivStar, &wv)?;
    let mv = integ.moments(&params.v);
    let mv0 = integ.moments(&params.v0);
    Ok(2.0 * integ.pair(&du, &dw)?
        + integ.pair(&up, &divw)?
        + integ.pair(&divu, &wq)?
        + integ.pair_weighted(&uv, &wv, &mv)?
        - integ.pair_weighted(&up, &wq, &mv0)?)
}

/// Coefficients on the grid modes of the distribution h δ_{Γ_c} for a
/// density of `width` components, (2π)⁻¹ ĥ(ξ′) e^{−iξ_n c}.
pub fn embed_on_grid(h: &BoundaryDensity, strip: f64) -> SpectralField {
    let grid = h.grid();
    let np = grid.points();
    let mut out = SpectralField::zeros(grid, h.width());
    for c in Component::BOTH {
        let height = c.height(strip);
        for t in 0..grid.transverse_len() {
            for j in 0..np {
                let k = mode_of_index(j, np) as f64;
                let e = C64::from_polar(1.0 / (2.0 * PI), -k * height);
                for comp in 0..h.width() {
                    let z = out.at(comp, t * np + j) + e * h.get(c, t, comp);
                    out.set(comp, t * np + j, z);
                }
            }
        }
    }
    out
}

/// Torus pairing ⟨F, G⟩ = (2π)ⁿ Σ F̂ Ĝ̄ of coefficient arrays.
fn torus_pair(f: &SpectralField, g: &SpectralField) -> Result<C64> {
    f.inner(g)
}

/// (ΞU, W)_Ω with the principal part applied spectrally and the terms
/// (Vu, w) and (V₀p, q) paired through the coefficient moments, so that a
/// variable coefficient is never multiplied on the truncated grid.
pub fn xi_pairing(
    params: &StokesParams,
    integ: &StripIntegrator,
    u: &VelocityPressureField,
    w: &VelocityPressureField,
) -> Result<C64> {
    let principal = StokesParams::constant(params.grid, 0.0, 0.0)?.with_strip(params.strip)?;
    let xu = apply_xi(&principal, u)?;
    Ok(integ.pair(xu.field(), w.field())?
        + integ.pair_weighted(&u.velocity(), &w.velocity(), &integ.moments(&params.v))?
        - integ.pair_weighted(&u.pressure(), &w.pressure(), &integ.moments(&params.v0))?)
}

/// Residuals of the Green identities for U, W on the strip.
pub fn green_residuals(
    params: &StokesParams,
    u: &VelocityPressureField,
    w: &VelocityPressureField,
) -> Result<GreenResiduals> {
    let grid = params.grid;
    let n = grid.dim();
    let integ = StripIntegrator::new(grid, params.strip);
    let tu = conormal_density(params, u);
    let tw = conormal_density(params, w);
    let wtr = super::ops::velocity_trace(params, w);
    let utr = super::ops::velocity_trace(params, u);

    let xu_w = xi_pairing(params, &integ, u, w)?;
    let u_xw = xi_pairing(params, &integ, w, u)?.conj();
    let b = bilinear_form(params, &integ, u, w)?;
    let tu_w = tu.inner(&wtr)?;
    let u_tw = utr.inner(&tw)?;
    let scale1 = xu_w.norm().max(b.norm()).max(tu_w.norm()).max(1.0);
    let first = (xu_w - b - tu_w).norm() / scale1;
    let scale2 = xu_w.norm().max(u_tw.norm()).max(tu_w.norm()).max(1.0);
    let second = (xu_w - u_xw - tu_w + u_tw).norm() / scale2;

    // Identity (3): both sides paired with W over the whole torus, the left side
    // from the coefficients of 1_Ω U and the symbol of Ξ.
    let restricted = VelocityPressureField::from_field(integ.restrict(u.field()))?;
    let lhs = {
        let mut acc = C64::new(0.0, 0.0);
        let principal = StokesParams::constant(grid, 0.0, 0.0)?;
        let sp = principal.reference();
        let mut ru = SpectralField::zeros(grid, n + 1);
        for flat in 0..grid.len() {
            let xi: Vec<f64> = grid.mode(flat).into_iter().map(|m| m as f64).collect();
            let m = full_symbol(&sp, &xi);
            let v = restricted.mode_vector(flat);
            for i in 0..=n {
                ru.set(i, flat, (0..=n).map(|j| m[(i, j)] * v[j]).sum());
            }
        }
        acc += torus_pair(&ru, w.field())?;
        acc += integ.pair_weighted(&u.velocity(), &w.velocity(), &integ.moments(&params.v))?;
        acc -= integ.pair_weighted(&u.pressure(), &w.pressure(), &integ.moments(&params.v0))?;
        acc
    };
    let term_tu = {
        let emb = embed_on_grid(&tu, params.strip);
        let mut full = SpectralField::zeros(grid, n + 1);
        for c in 0..n {
            full.component_mut(c).copy_from_slice(emb.component(c));
        }
        torus_pair(&full, w.field())?
    };
    let term_star = {
        let mut acc = SpectralField::zeros(grid, n + 1);
        for comp in Component::BOTH {
            let mut single = BoundaryDensity::zeros(&grid, n);
            single.component_mut(comp).copy_from_slice(utr.component(comp));
            let emb = embed_on_grid(&single, params.strip);
            let s = comp.normal_sign();
            for flat in 0..grid.len() {
                let xi: Vec<f64> = grid.mode(flat).into_iter().map(|m| m as f64).collect();
                let xn = s * xi[n - 1];
                for i in 0..n {
                    let mut z = I * xn * emb.at(i, flat);
                    if i == n - 1 {
                        z += I * s * (0..n).map(|j| xi[j] * emb.at(j, flat)).sum::<C64>();
                    }
                    acc.set(i, flat, acc.at(i, flat) + z);
                }
                let z = acc.at(n, flat) + s * emb.at(n - 1, flat);
                acc.set(n, flat, z);
            }
        }
        torus_pair(&acc, w.field())?
    };
    let rhs = xu_w - term_tu + term_star;
    let scale3 = lhs.norm().max(xu_w.norm()).max(term_tu.norm()).max(term_star.norm()).max(1.0);
    let third = (lhs - rhs).norm() / scale3;
    Ok(GreenResiduals { first, second, third })
}

/// The five norms of the energy identity, all over Ω.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub def_u: f64,
    pub sqrt_v_u: f64,
    pub div_u: f64,
    pub sqrt_v0_p: f64,
    pub grad_p: f64,
}

impl EnergyReport {
    pub fn max(&self) -> f64 {
        [self.def_u, self.sqrt_v_u, self.div_u, self.sqrt_v0_p, self.grad_p]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// ‖Def u‖_Ω, ‖√V u‖_Ω, ‖∇*u‖_Ω, ‖√V₀ p‖_Ω, ‖∇p‖_Ω.
pub fn energy_report(params: &StokesParams, u: &VelocityPressureField) -> Result<EnergyReport> {
    let integ = StripIntegrator::new(params.grid, params.strip);
    let (uv, up) = (u.velocity(), u.pressure());
    let norm = |f: &SpectralField, m: &[C64]| -> Result<f64> { Ok(integ.pair_weighted(f, f, m)?.re.max(0.0).sqrt()) };
    let plain = integ.moments(&Coefficient::Constant(1.0));
    Ok(EnergyReport {
        def_u: norm(&apply_first_order(FirstOrder::Def, &uv)?, &plain)?,
        sqrt_v_u: norm(&uv, &integ.moments(&params.v))?,
        div_u: norm(&apply_first_order(FirstOrder::DivStar, &uv)?, &plain)?,
        sqrt_v0_p: norm(&up, &integ.moments(&params.v0))?,
        grad_p: norm(&apply_first_order(FirstOrder::Grad, &up)?, &plain)?,
    })
}

/// Trace pairing (f, g)_Γ of one scalar slice with another, for tests.
pub fn slice_pairing(f: &SpectralField, g: &SpectralField, height: f64) -> C64 {
    let a = slice_trace(f, 0, height);
    let b = slice_trace(g, 0, height);
    let area = (2.0 * PI).powi(f.grid().dim() as i32 - 1);
    a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum::<C64>() * area
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn strip_pairing_matches_quadrature() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let f = SpectralField::from_fn(grid, 1, |x| vec![x[1].cos() + x[0].sin() * x[1].sin()]);
        let integ = StripIntegrator::new(grid, 2.0);
        let got = integ.pair(&f, &f).unwrap().re;
        // ∫₀^{2π}∫₀^2 (cos y + sin x sin y)² dy dx
        let (ys, ws) = composite_rule(0.0, 2.0, 8, 16);
        let exact: f64 = ys
            .iter()
            .zip(&ws)
            .map(|(y, w)| w * (2.0 * PI * y.cos().powi(2) + PI * y.sin().powi(2)))
            .sum();
        assert!((got - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn identities_hold_for_random_fields() {
        let grid = TorusGrid::new(2, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (v, v0) in [(0.0, 0.0), (1.0, 0.5)] {
            let params = StokesParams::constant(grid, v, v0).unwrap();
            let u = VelocityPressureField::random_band_limited(grid, 6, &mut rng);
            let w = VelocityPressureField::random_band_limited(grid, 6, &mut rng);
            let r = green_residuals(&params, &u, &w).unwrap();
            assert!(r.max() < 1e-11, "{r:?}");
        }
    }

    #[test]
    fn pressure_test_field_gives_flux_identity() {
        // W = (0, 1), V₀ = 0: (ΞU, W)_Ω = −(u, ν)_Γ.
        let grid = TorusGrid::new(2, 32).unwrap();
        let params = StokesParams::constant(grid, 1.0, 0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let u = VelocityPressureField::random_band_limited(grid, 5, &mut rng);
        let w = VelocityPressureField::from_field(SpectralField::from_fn(grid, 3, |_| vec![0.0, 0.0, 1.0])).unwrap();
        let integ = StripIntegrator::new(grid, params.strip);
        let lhs = integ.pair(apply_xi(&params, &u).unwrap().field(), w.field()).unwrap();
        let flux = super::super::ops::velocity_trace(&params, &u).inner(&BoundaryDensity::normal(&grid)).unwrap();
        assert!((lhs + flux).norm() < 1e-11 * (1.0 + flux.norm()));
    }

    #[test]
    fn energy_of_kernel_field_vanishes() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::constant(grid, 0.0, 0.0).unwrap();
        let k = VelocityPressureField::from_field(SpectralField::from_fn(grid, 3, |_| vec![1.0, -1.0, 2.0])).unwrap();
        assert!(energy_report(&params, &k).unwrap().max() < 1e-13);
    }
}
