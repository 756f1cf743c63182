//! Lateral limits on the model half-space {x_n > 0} with Γ = {x_n = 0}:
//! slice multipliers a_{s,t}, jump coefficients J±, restriction symbols
//! a₀ and one-sided symbols a_{0±}.
//!
//! Symbols may depend on x_n but not on x′. Transverse densities live on a
//! periodic surrogate box, so only multiplier actions are needed.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::{fourier_quadrature_vec, japanese_bracket, line_quadrature_vec, neville_zero, QuadratureSpec};
use crate::symbols::{double_layer_symbol, StokesSymbolParams};
use crate::{CMatrix, C64};

type SymbolFn = Box<dyn Fn(f64, &[f64]) -> CMatrix + Send + Sync>;

/// A symbol a(x_n, ξ) of order m ≤ −1 on the model half-space.
pub struct ModelSymbol {
    pub order: i32,
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    eval: SymbolFn,
    leading: Option<SymbolFn>,
}

impl std::fmt::Debug for ModelSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelSymbol")
            .field("order", &self.order)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("dim", &self.dim)
            .finish()
    }
}

impl ModelSymbol {
    pub fn new<F>(order: i32, dim: usize, rows: usize, cols: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> CMatrix + Send + Sync + 'static,
    {
        if order > -1 {
            return Err(Error::Argument(format!("model symbols need order <= -1, got {order}")));
        }
        if !(2..=3).contains(&dim) {
            return Err(Error::Argument(format!("dimension {dim} not in 2..=3")));
        }
        Ok(Self { order, rows, cols, dim, eval: Box::new(eval), leading: None })
    }

    /// Attach the homogeneous leading term σ_m(x_n, ξ).
    pub fn with_leading<F>(mut self, leading: F) -> Self
    where
        F: Fn(f64, &[f64]) -> CMatrix + Send + Sync + 'static,
    {
        self.leading = Some(Box::new(leading));
        self
    }

    pub fn eval(&self, s: f64, xi: &[f64]) -> CMatrix {
        (self.eval)(s, xi)
    }

    /// 1/⟨ξ⟩², order −2.
    pub fn inverse_bracket_squared(dim: usize) -> Self {
        Self::new(-2, dim, 1, 1, |_, xi| {
            let b = japanese_bracket(xi);
            DMatrix::from_element(1, 1, C64::new(1.0 / (b * b), 0.0))
        })
        .expect("valid order")
    }

    /// ξ_n/⟨ξ⟩², order −1 with odd leading term ξ_n/|ξ|².
    pub fn odd_order_minus_one(dim: usize) -> Self {
        Self::new(-1, dim, 1, 1, |_, xi| {
            let b = japanese_bracket(xi);
            DMatrix::from_element(1, 1, C64::new(xi[xi.len() - 1] / (b * b), 0.0))
        })
        .expect("valid order")
        .with_leading(|_, xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            DMatrix::from_element(1, 1, C64::new(xi[xi.len() - 1] / r2, 0.0))
        })
    }

    /// 1/⟨ξ⟩, order −1 and even in ξ_n, which violates the oddness condition.
    pub fn even_order_minus_one(dim: usize) -> Self {
        Self::new(-1, dim, 1, 1, |_, xi| {
            DMatrix::from_element(1, 1, C64::new(1.0 / japanese_bracket(xi), 0.0))
        })
        .expect("valid order")
        .with_leading(|_, xi| {
            let r: f64 = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            DMatrix::from_element(1, 1, C64::new(1.0 / r, 0.0))
        })
    }

    /// σ₋₁ of the Stokes double-layer operator with Γ = {x_n = 0} and outer
    /// normal ν = −e_n.
    pub fn stokes_double_layer(params: StokesSymbolParams, dim: usize) -> Self {
        let mut nu = vec![0.0; dim];
        nu[dim - 1] = -1.0;
        let nu2 = nu.clone();
        Self::new(-1, dim, dim, dim, move |_, xi| double_layer_symbol(&params, &nu, xi).expect("xi != 0").0)
            .expect("valid order")
            .with_leading(move |_, xi| double_layer_symbol(&params, &nu2, xi).expect("xi != 0").0)
    }

    /// Pointwise conjugate transpose a(x, ξ)*.
    pub fn adjoint(self) -> Self {
        let ModelSymbol { order, rows, cols, dim, eval, leading } = self;
        Self {
            order,
            rows: cols,
            cols: rows,
            dim,
            eval: Box::new(move |s, xi| eval(s, xi).adjoint()),
            leading: leading.map(|l| Box::new(move |s: f64, xi: &[f64]| l(s, xi).adjoint()) as SymbolFn),
        }
    }

    fn point(&self, xi_t: &[f64], xn: f64) -> Vec<f64> {
        let mut xi = xi_t.to_vec();
        xi.push(xn);
        xi
    }

    fn check_transverse(&self, xi_t: &[f64]) -> Result<()> {
        if xi_t.len() != self.dim - 1 {
            return Err(Error::Dimension(format!(
                "transverse frequency has {} entries, expected {}",
                xi_t.len(),
                self.dim - 1
            )));
        }
        Ok(())
    }

    fn flatten(&self, m: &CMatrix, out: &mut [C64]) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i * self.cols + j] = m[(i, j)];
            }
        }
    }

    fn unflatten(&self, v: &[C64]) -> CMatrix {
        DMatrix::from_fn(self.rows, self.cols, |i, j| v[i * self.cols + j])
    }
}

/// Default quadrature settings for slice integrals.
pub fn default_spec(xi_t: &[f64]) -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-11, scale: japanese_bracket(xi_t), ..QuadratureSpec::default() }
}

/// a_{s,t}(ξ′) = (1/2π)∫ e^{itξ_n} a(s, ξ′, ξ_n) dξ_n.
pub fn slice_symbol(a: &ModelSymbol, s: f64, t: f64, xi_t: &[f64]) -> Result<CMatrix> {
    a.check_transverse(xi_t)?;
    let dim = a.rows * a.cols;
    let f = |x: f64, out: &mut [C64]| a.flatten(&a.eval(s, &a.point(xi_t, x)), out);
    let spec = QuadratureSpec { decay_order: a.order, ..default_spec(xi_t) };
    let v = if t == 0.0 {
        if a.order == -1 {
            return Err(Error::Argument(
                "order -1 symbols have no trace at t = 0; use restriction_symbol".into(),
            ));
        }
        line_quadrature_vec(&f, dim, &spec)?
    } else {
        fourier_quadrature_vec(&f, t, dim, &spec)?
    };
    Ok(a.unflatten(&v) / C64::new(2.0 * PI, 0.0))
}

/// Jump coefficients J± and whether they agree.
#[derive(Clone, Debug)]
pub struct JumpCoefficients {
    pub plus: CMatrix,
    pub minus: CMatrix,
    pub agree: bool,
}

/// J±(x) = lim_{τ→±∞} τ·a(x, ξ′, τ) for an order −1 symbol, at x_n = s.
///
/// The limits are extrapolated from τ ∈ {10², 10³, 10⁴}; when a leading term
/// is attached, ±σ₋₁(a; ±e_n) must agree with the extrapolation.
pub fn jump_coefficients(a: &ModelSymbol, s: f64) -> Result<JumpCoefficients> {
    if a.order != -1 {
        return Err(Error::Argument("jump coefficients are defined for order -1 only".into()));
    }
    let zero = vec![0.0; a.dim - 1];
    let taus = [1e2, 1e3, 1e4];
    let hs: Vec<f64> = taus.iter().map(|t| 1.0 / t).collect();
    let extrapolate = |sign: f64| -> CMatrix {
        let samples: Vec<CMatrix> =
            taus.iter().map(|&t| a.eval(s, &a.point(&zero, sign * t)) * C64::new(sign * t, 0.0)).collect();
        crate::spectral::neville_matrix(&hs, &samples).0
    };
    let mut plus = extrapolate(1.0);
    let mut minus = extrapolate(-1.0);
    if let Some(lead) = &a.leading {
        let lp = lead(s, &a.point(&zero, 1.0));
        let lm = -lead(s, &a.point(&zero, -1.0));
        let scale = 1.0 + lp.norm().max(lm.norm());
        if (&lp - &plus).norm() > 1e-6 * scale || (&lm - &minus).norm() > 1e-6 * scale {
            return Err(Error::InconsistentSymbol(format!(
                "extrapolated jump coefficients differ from the leading term by {:.3e}",
                (&lp - &plus).norm().max((&lm - &minus).norm())
            )));
        }
        plus = lp;
        minus = lm;
    }
    let agree = (&plus - &minus).norm() <= 1e-8 * (1.0 + plus.norm());
    Ok(JumpCoefficients { plus, minus, agree })
}

/// Which restriction is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Principal,
}

/// a₀ (order < −1) or a_{0±} = ±(i/2)J₊ + a₀ (order −1), where a₀ is the
/// integral of the even part in ξ_n.
pub fn restriction_symbol(a: &ModelSymbol, xi_t: &[f64], side: Side) -> Result<CMatrix> {
    a.check_transverse(xi_t)?;
    let dim = a.rows * a.cols;
    let f = |x: f64, out: &mut [C64]| a.flatten(&a.eval(0.0, &a.point(xi_t, x)), out);
    if a.order < -1 {
        let spec = QuadratureSpec { decay_order: a.order, ..default_spec(xi_t) };
        let v = line_quadrature_vec(&f, dim, &spec)?;
        return Ok(a.unflatten(&v) / C64::new(2.0 * PI, 0.0));
    }
    let jumps = jump_coefficients(a, 0.0)?;
    if !jumps.agree {
        return Err(Error::JumpUndefined(
            "sigma_-1(a; e_n) != -sigma_-1(a; -e_n); one-sided limits are not defined".into(),
        ));
    }
    let spec = QuadratureSpec { decay_order: -2, symmetrize: true, ..default_spec(xi_t) };
    let v = line_quadrature_vec(&f, dim, &spec)?;
    let a0 = a.unflatten(&v) / C64::new(2.0 * PI, 0.0);
    let half_ij = &jumps.plus * C64::new(0.0, 0.5);
    Ok(match side {
        Side::Plus => a0 + half_ij,
        Side::Minus => a0 - half_ij,
        Side::Principal => a0,
    })
}

/// A density on the periodic surrogate of ℝⁿ⁻¹: transverse frequencies and
/// vector coefficients.
#[derive(Clone, Debug)]
pub struct SurrogateDensity {
    pub modes: Vec<Vec<f64>>,
    pub coeffs: Vec<Vec<C64>>,
}

impl SurrogateDensity {
    /// Random density with modes 2πm/P, |m_a| ≤ bandwidth, on a box of period P.
    pub fn random<R: Rng>(dim: usize, width: usize, period: f64, bandwidth: i64, rng: &mut R) -> Self {
        let mut modes = Vec::new();
        let mut coeffs = Vec::new();
        let axes = dim - 1;
        let side = 2 * bandwidth + 1;
        for flat in 0..side.pow(axes as u32) {
            let mut r = flat;
            let mut xi = Vec::with_capacity(axes);
            for _ in 0..axes {
                xi.push(2.0 * PI * ((r % side) as i64 - bandwidth) as f64 / period);
                r /= side;
            }
            modes.push(xi);
            coeffs.push((0..width).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
        }
        Self { modes, coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// [a(x, D)(hδ_Γ)]_ε = a_{ε,ε}(D′)h, mode by mode.
pub fn potential_slice(a: &ModelSymbol, h: &SurrogateDensity, eps: f64) -> Result<SurrogateDensity> {
    if a.order == -1 && eps == 0.0 {
        return Err(Error::Argument("order -1 potentials need eps != 0".into()));
    }
    let mut out = Vec::with_capacity(h.modes.len());
    for (xi, c) in h.modes.iter().zip(&h.coeffs) {
        if c.len() != a.cols {
            return Err(Error::Dimension("density width does not match the symbol".into()));
        }
        let m = slice_symbol(a, eps, eps, xi)?;
        out.push((0..a.rows).map(|i| (0..a.cols).map(|j| m[(i, j)] * c[j]).sum()).collect());
    }
    Ok(SurrogateDensity { modes: h.modes.clone(), coeffs: out })
}

fn apply_restriction(a: &ModelSymbol, h: &SurrogateDensity, side: Side) -> Result<SurrogateDensity> {
    let mut out = Vec::with_capacity(h.modes.len());
    for (xi, c) in h.modes.iter().zip(&h.coeffs) {
        let m = restriction_symbol(a, xi, side)?;
        out.push((0..a.rows).map(|i| (0..a.cols).map(|j| m[(i, j)] * c[j]).sum()).collect());
    }
    Ok(SurrogateDensity { modes: h.modes.clone(), coeffs: out })
}

fn difference(a: &SurrogateDensity, b: &SurrogateDensity) -> f64 {
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

/// Residuals of the lateral-limit theorems on random densities.
#[derive(Clone, Debug)]
pub struct LateralReport {
    pub eps: Vec<f64>,
    /// max over trials of ‖slice(+ε) − a_{0+}h‖/‖h‖.
    pub plus: Vec<f64>,
    /// max over trials of ‖slice(−ε) − a_{0−}h‖/‖h‖.
    pub minus: Vec<f64>,
    /// Same residuals after polynomial extrapolation of the slices to ε = 0.
    pub extrapolated_plus: f64,
    pub extrapolated_minus: f64,
    /// ‖(a*)₀ − (a₀)*‖ over the sampled modes.
    pub adjoint: f64,
}

impl LateralReport {
    /// Largest ratio residual(ε/2)/residual(ε) over the ladder, both sides.
    pub fn worst_ratio(&self) -> f64 {
        let ratios = |r: &[f64]| r.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        ratios(&self.plus).max(ratios(&self.minus))
    }
}

/// Verify the lateral-limit theorems for `a` on random densities with the
/// offset ladder ε = 2^{-k}, k = 3..3+levels.
pub fn verify_lateral_limits<R: Rng>(
    a: &ModelSymbol,
    adjoint: &ModelSymbol,
    trials: usize,
    levels: usize,
    rng: &mut R,
) -> Result<LateralReport> {
    let eps: Vec<f64> = (0..levels).map(|k| 2f64.powi(-(3 + k as i32))).collect();
    let mut plus = vec![0.0f64; levels];
    let mut minus = vec![0.0f64; levels];
    let mut xp: f64 = 0.0;
    let mut xm: f64 = 0.0;
    let mut adj: f64 = 0.0;
    for _ in 0..trials {
        let h = SurrogateDensity::random(a.dim, a.cols, 8.0 * PI, 2, rng);
        let hn = h.norm();
        let (sp, sm) = if a.order == -1 { (Side::Plus, Side::Minus) } else { (Side::Principal, Side::Principal) };
        let target_p = apply_restriction(a, &h, sp)?;
        let target_m = apply_restriction(a, &h, sm)?;
        let mut slices_p = Vec::new();
        let mut slices_m = Vec::new();
        for (k, &e) in eps.iter().enumerate() {
            let up = potential_slice(a, &h, e)?;
            let dn = potential_slice(a, &h, -e)?;
            plus[k] = plus[k].max(difference(&up, &target_p) / hn);
            minus[k] = minus[k].max(difference(&dn, &target_m) / hn);
            slices_p.push(up);
            slices_m.push(dn);
        }
        let extrap = |slices: &[SurrogateDensity]| -> SurrogateDensity {
            let mut out = slices[0].clone();
            for (mi, row) in out.coeffs.iter_mut().enumerate() {
                for (ci, z) in row.iter_mut().enumerate() {
                    let ys: Vec<C64> = slices.iter().map(|s| s.coeffs[mi][ci]).collect();
                    *z = neville_zero(&eps, &ys).0;
                }
            }
            out
        };
        xp = xp.max(difference(&extrap(&slices_p), &target_p) / hn);
        xm = xm.max(difference(&extrap(&slices_m), &target_m) / hn);
        for xi in &h.modes {
            let side = Side::Principal;
            let lhs = restriction_symbol(adjoint, xi, side)?;
            let rhs = restriction_symbol(a, xi, side)?.adjoint();
            adj = adj.max((lhs - rhs).norm());
        }
    }
    Ok(LateralReport { eps, plus, minus, extrapolated_plus: xp, extrapolated_minus: xm, adjoint: adj })
}

/// sup over the offsets `ts` of ‖a_{s,t}(ξ′)‖ for each transverse frequency.
pub fn slice_bounds(a: &ModelSymbol, s: f64, ts: &[f64], xis: &[Vec<f64>]) -> Result<Vec<f64>> {
    xis.iter()
        .map(|xi| {
            ts.iter().try_fold(0.0f64, |acc, &t| Ok(acc.max(slice_symbol(a, s, t, xi)?.norm())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn slice_of_inverse_bracket_squared() {
        let a = ModelSymbol::inverse_bracket_squared(2);
        let v = slice_symbol(&a, 0.0, 1.0, &[0.0]).unwrap()[(0, 0)];
        assert!((v.re - (-1.0f64).exp() / 2.0).abs() < 1e-10);
        let v0 = slice_symbol(&a, 0.0, 0.0, &[0.0]).unwrap()[(0, 0)];
        assert!((v0.re - 0.5).abs() < 1e-11);
        let xi = [1.5];
        let b = japanese_bracket(&xi);
        let v = slice_symbol(&a, 0.0, -0.7, &xi).unwrap()[(0, 0)];
        assert!((v.re - (-b * 0.7).exp() / (2.0 * b)).abs() < 1e-10);
    }

    #[test]
    fn jumps_of_test_symbols() {
        let odd = ModelSymbol::odd_order_minus_one(2);
        let j = jump_coefficients(&odd, 0.0).unwrap();
        assert!(j.agree && (j.plus[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let even = ModelSymbol::even_order_minus_one(2);
        let j = jump_coefficients(&even, 0.0).unwrap();
        assert!(!j.agree);
        assert!((j.plus[(0, 0)] + j.minus[(0, 0)]).norm() < 1e-12);
        assert!(matches!(restriction_symbol(&even, &[1.0], Side::Plus), Err(Error::JumpUndefined(_))));
        let p = StokesSymbolParams::new(0.0, 1.0).unwrap();
        let dl = ModelSymbol::stokes_double_layer(p, 3);
        let j = jump_coefficients(&dl, 0.0).unwrap();
        assert!(j.agree);
        assert!((j.plus - DMatrix::from_diagonal_element(3, 3, C64::new(0.0, -1.0))).norm() < 1e-12);
    }

    #[test]
    fn restrictions_of_test_symbols() {
        let a = ModelSymbol::inverse_bracket_squared(2);
        let a0 = restriction_symbol(&a, &[0.0], Side::Principal).unwrap()[(0, 0)];
        assert!((a0.re - 0.5).abs() < 1e-11);
        let odd = ModelSymbol::odd_order_minus_one(2);
        let p = restriction_symbol(&odd, &[0.8], Side::Plus).unwrap()[(0, 0)];
        let m = restriction_symbol(&odd, &[0.8], Side::Minus).unwrap()[(0, 0)];
        assert!((p - C64::new(0.0, 0.5)).norm() < 1e-11);
        assert!((m - C64::new(0.0, -0.5)).norm() < 1e-11);
        assert!(slice_symbol(&odd, 0.0, 0.0, &[0.8]).is_err());
    }

    #[test]
    fn one_sided_slices_converge() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let odd = ModelSymbol::odd_order_minus_one(2);
        let adj = ModelSymbol::odd_order_minus_one(2).adjoint();
        let r = verify_lateral_limits(&odd, &adj, 1, 4, &mut rng).unwrap();
        assert!(r.worst_ratio() <= 0.75, "{r:?}");
        assert!(r.adjoint < 1e-8);
    }
}
