//! Pompeiu's representation of a band-limited field on the strip:
//! 1_Ω U = Ξ^{(−1)}(1_Ω ΞU) − 𝒮(T_ν U|_Γ) + 𝒟(u|_Γ) + p_𝒩(1_Ω U),
//! checked pointwise on sub-strips of Ω and Ω₋ away from Γ.
//!
//! The volume term is evaluated per transverse mode as
//! ∫₀^L 𝒢(x − y)F(y) dy + Q F(x)1_Ω(x), where 𝒢 is the x_n-profile of
//! Ξ^{(−1)} without its point mass Q δ. The integral is split at y = x so
//! that Gauss–Legendre sees smooth integrands on each piece.

use nalgebra::DMatrix;

use super::kernel::{KernelSpace, LayerKind};
use super::potentials::LayerPotential;
use super::profile::{Evaluator, ModeOperator, Source};
use crate::error::{Error, Result};
use crate::lattice::Approach;
use crate::spectral::mode_of_index;
use crate::stokes::green::composite_rule;
use crate::stokes::{apply_xi, conormal_density, velocity_trace, StokesParams, VelocityPressureField};
use crate::{CMatrix, C64};

/// Panels and order of the Gauss–Legendre rule on each side of y = x.
const PANELS: usize = 4;
const ORDER: usize = 16;

/// Largest pointwise defect of the representation, relative to max |U|.
#[derive(Clone, Debug, PartialEq)]
pub struct PompeiuReport {
    /// On {L/8 ≤ x_n ≤ 7L/8}, where the left side is U.
    pub interior: f64,
    /// On {L + L/8 ≤ x_n ≤ 2π − L/8}, where the left side is 0.
    pub exterior: f64,
    pub scale: f64,
}

impl PompeiuReport {
    pub fn max(&self) -> f64 {
        self.interior.max(self.exterior)
    }
}

/// x_n-profile of component values of a field at one transverse mode.
fn profile_at(u: &VelocityPressureField, mode: usize, x: f64) -> Vec<C64> {
    let np = u.grid().points();
    (0..=u.dim())
        .map(|c| {
            let data = &u.field().component(c)[mode * np..(mode + 1) * np];
            data.iter().enumerate().map(|(j, a)| a * C64::from_polar(1.0, mode_of_index(j, np) as f64 * x)).sum()
        })
        .collect()
}

fn sample_heights(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| a + (b - a) * j as f64 / (count - 1) as f64).collect()
}

/// Evaluates both sides of the representation formula for U.
/// Constant coefficients only.
pub fn pompeiu_residual(params: &StokesParams, u: &VelocityPressureField) -> Result<PompeiuReport> {
    if !params.is_constant() {
        return Err(Error::Unsupported("the representation check needs constant coefficients".into()));
    }
    if u.grid() != params.grid {
        return Err(Error::Dimension("field does not match the parameters".into()));
    }
    let grid = params.grid;
    let n = params.dim();
    let strip = params.strip;
    let f = apply_xi(params, u)?;
    let traction = conormal_density(params, u);
    let trace = velocity_trace(params, u);
    let single = LayerPotential::new(params, LayerKind::Single, &traction)?;
    let double = LayerPotential::new(params, LayerKind::Double, &trace)?;
    let reference = params.reference();
    let point_mass = -2.0 * reference.g();

    // p_𝒩(1_Ω U): the ξ = 0 mean of 1_Ω U on the kernel components.
    let kernel = KernelSpace::new(params);
    let (gx, gw) = composite_rule(0.0, strip, PANELS, ORDER);
    let mut projection = vec![C64::new(0.0, 0.0); n + 1];
    for (&x, &w) in gx.iter().zip(&gw) {
        let v = profile_at(u, 0, x);
        for &c in kernel.components() {
            projection[c] += v[c] * w / (2.0 * std::f64::consts::PI);
        }
    }

    let scale = (0..grid.transverse_len())
        .flat_map(|t| sample_heights(0.0, 2.0 * std::f64::consts::PI, 65).into_iter().map(move |x| (t, x)))
        .map(|(t, x)| profile_at(u, t, x).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let inside = sample_heights(strip / 8.0, 7.0 * strip / 8.0, 9);
    let outside = sample_heights(strip * 9.0 / 8.0, 2.0 * std::f64::consts::PI - strip / 8.0, 9);
    let mut report = PompeiuReport { interior: 0.0, exterior: 0.0, scale };
    let modes: Vec<usize> = (0..grid.transverse_len()).collect();
    for &t in &modes {
        let xi: Vec<f64> = grid.transverse_mode(t).iter().map(|&m| m as f64).collect();
        let op = ModeOperator::new(reference, &xi)?;
        let green = op.kernel(Source::Volume, Evaluator::Field);
        for (heights, is_inside) in [(&inside, true), (&outside, false)] {
            for &x in heights.iter() {
                let mut rhs = DMatrix::<C64>::zeros(n + 1, 1);
                for (a, b) in [(0.0, x.min(strip)), (x.min(strip), strip)] {
                    if b <= a {
                        continue;
                    }
                    let (ys, ws) = composite_rule(a, b, PANELS, ORDER);
                    for (&y, &w) in ys.iter().zip(&ws) {
                        let g: CMatrix = green.eval(x - y, Approach::Principal);
                        let fy = DMatrix::from_vec(n + 1, 1, profile_at(&f, t, y));
                        rhs += g * fy * C64::new(w, 0.0);
                    }
                }
                if is_inside {
                    let fx = profile_at(&f, t, x);
                    rhs[(n, 0)] += fx[n] * point_mass;
                }
                let s = single.eval(t, x, Approach::Principal, Evaluator::Field)?;
                let d = double.eval(t, x, Approach::Principal, Evaluator::Field)?;
                let lhs = if is_inside { profile_at(u, t, x) } else { vec![C64::new(0.0, 0.0); n + 1] };
                let mut defect: f64 = 0.0;
                for c in 0..=n {
                    let mut r = rhs[(c, 0)] - s[c] + d[c];
                    if t == 0 {
                        r += projection[c];
                    }
                    defect = defect.max((r - lhs[c]).norm());
                }
                if is_inside {
                    report.interior = report.interior.max(defect / scale);
                } else {
                    report.exterior = report.exterior.max(defect / scale);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralField, TorusGrid};
    use rand::SeedableRng;

    #[test]
    fn representation_holds_for_random_fields() {
        let grid = TorusGrid::new(2, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (v, v0) in [(1.0, 1.0), (0.0, 0.0), (1.0, 0.0)] {
            let params = StokesParams::constant(grid, v, v0).unwrap();
            let u = VelocityPressureField::random_band_limited(grid, 4, &mut rng);
            let r = pompeiu_residual(&params, &u).unwrap();
            assert!(r.max() < 1e-9, "{v} {v0}: {r:?}");
        }
    }

    #[test]
    fn kernel_fields_reduce_to_the_projection() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::constant(grid, 0.0, 0.0).unwrap();
        let field = SpectralField::from_fn(grid, 3, |_| vec![1.0, -2.0, 0.5]);
        let u = VelocityPressureField::from_field(field).unwrap();
        let r = pompeiu_residual(&params, &u).unwrap();
        assert!(r.max() < 1e-10, "{r:?}");
    }
}
