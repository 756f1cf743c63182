//! Spectral fields and transforms with the series convention
//! f(x) = Σ f̂(ξ) e^{iξ·x}, f̂(ξ) = (2π)⁻ⁿ ∫ f e^{−iξ·x} dx.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use super::grid::{japanese_bracket, TorusGrid};
use crate::error::{Error, Result};

/// Transform direction for [`transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Grid values to coefficients.
    Forward,
    /// Coefficients to grid values.
    Inverse,
}

/// Multi-component field stored by its Fourier coefficients.
///
/// Coefficients are laid out component-major, each component in the flat
/// FFT order of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Zero field with `components` components.
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self { grid, components, coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()] }
    }

    /// Field from raw coefficients.
    pub fn from_coeffs(grid: TorusGrid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs })
    }

    /// Forward transform of complex grid values (component-major).
    pub fn from_values(grid: TorusGrid, components: usize, values: &[Complex64]) -> Result<Self> {
        if components == 0 || values.len() != components * grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} grid values, got {}",
                components * grid.len(),
                values.len()
            )));
        }
        let mut coeffs = values.to_vec();
        let scale = 1.0 / grid.len() as f64;
        for chunk in coeffs.chunks_mut(grid.len()) {
            fft_nd(chunk, &grid, false);
            chunk.iter_mut().for_each(|z| *z *= scale);
        }
        Ok(Self { grid, components, coeffs })
    }

    /// Forward transform of real grid values (component-major).
    pub fn from_real(grid: TorusGrid, components: usize, values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_values(grid, components, &v)
    }

    /// Field sampled from a closure of the coordinates.
    pub fn from_fn<F>(grid: TorusGrid, components: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let len = grid.len();
        let mut values = vec![0.0; components * len];
        for flat in 0..len {
            let v = f(&grid.coordinate(flat));
            for c in 0..components {
                values[c * len + flat] = v[c];
            }
        }
        Self::from_real(grid, components, &values).expect("sizes agree by construction")
    }

    /// Grid values (component-major) by the inverse transform.
    pub fn values(&self) -> Vec<Complex64> {
        let mut out = self.coeffs.clone();
        for chunk in out.chunks_mut(self.grid.len()) {
            fft_nd(chunk, &self.grid, true);
        }
        out
    }

    /// Real parts of the grid values.
    pub fn real_values(&self) -> Vec<f64> {
        self.values().into_iter().map(|z| z.re).collect()
    }

    /// Underlying grid.
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Number of components.
    pub fn components(&self) -> usize {
        self.components
    }

    /// All coefficients.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutable coefficients.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficients of one component.
    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    /// Mutable coefficients of one component.
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Coefficient of component `c` at flat mode index `flat`.
    pub fn at(&self, c: usize, flat: usize) -> Complex64 {
        self.coeffs[c * self.grid.len() + flat]
    }

    /// Set the coefficient of component `c` at flat mode index `flat`.
    pub fn set(&mut self, c: usize, flat: usize, z: Complex64) {
        let len = self.grid.len();
        self.coeffs[c * len + flat] = z;
    }

    /// (Σ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2}, summed over components.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let len = self.grid.len();
        let weights: Vec<f64> = (0..len)
            .map(|flat| {
                let xi: Vec<f64> = self.grid.mode(flat).iter().map(|&m| m as f64).collect();
                japanese_bracket(&xi).powf(2.0 * s)
            })
            .collect();
        self.coeffs
            .chunks(len)
            .map(|chunk| chunk.iter().zip(&weights).map(|(z, w)| w * z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// L² norm over the torus, (2π)^{n/2} (Σ |f̂|²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        self.grid.volume().sqrt() * self.sobolev_norm(0.0)
    }

    /// L²(Tⁿ) inner product (f, g) = ∫ f·ḡ, conjugate-linear in the second slot.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.volume())
    }

    /// Largest violation of f̂(−ξ) = conj f̂(ξ), excluding Nyquist planes.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let len = self.grid.len();
        let half = (self.grid.points() / 2) as i64;
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            for flat in 0..len {
                let xi = self.grid.mode(flat);
                if xi.iter().any(|&m| m == -half) {
                    continue;
                }
                let neg: Vec<i64> = xi.iter().map(|m| -m).collect();
                let j = self.grid.index_of_mode(&neg).expect("negated mode resolved");
                worst = worst.max((self.at(c, flat) - self.at(c, j).conj()).norm());
            }
        }
        worst
    }

    /// Componentwise linear combination `self + a·other`.
    pub fn axpy(&mut self, a: Complex64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        Ok(())
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Dimension("fields live on different grids or shapes".into()));
        }
        Ok(())
    }

    /// Real random field whose modes satisfy max|ξ_a| ≤ `bandwidth`.
    pub fn random_band_limited<R: Rng>(
        grid: TorusGrid,
        components: usize,
        bandwidth: usize,
        rng: &mut R,
    ) -> Self {
        let mut f = Self::zeros(grid, components);
        let b = bandwidth as i64;
        for c in 0..components {
            for flat in 0..grid.len() {
                let xi = grid.mode(flat);
                if xi.iter().any(|m| m.abs() > b) {
                    continue;
                }
                let neg: Vec<i64> = xi.iter().map(|m| -m).collect();
                let j = match grid.index_of_mode(&neg) {
                    Some(j) => j,
                    None => continue,
                };
                if j < flat {
                    continue;
                }
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if j == flat {
                    f.set(c, flat, Complex64::new(z.re, 0.0));
                } else {
                    f.set(c, flat, z);
                    f.set(c, j, z.conj());
                }
            }
        }
        f
    }
}

/// Spec-level transform entry point: forward maps grid values to a field,
/// inverse maps a field to grid values.
pub fn transform(
    grid: TorusGrid,
    components: usize,
    data: &[Complex64],
    direction: Direction,
) -> Result<Vec<Complex64>> {
    match direction {
        Direction::Forward => Ok(SpectralField::from_values(grid, components, data)?.coeffs),
        Direction::Inverse => Ok(SpectralField::from_coeffs(grid, components, data.to_vec())?.values()),
    }
}

/// Unnormalized n-dimensional FFT in place; `inverse` uses e^{+iξx}.
pub fn fft_nd(data: &mut [Complex64], grid: &TorusGrid, inverse: bool) {
    let n = grid.points();
    let dim = grid.dim();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let outer = data.len() / (n * stride);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for (j, z) in line.iter_mut().enumerate() {
                    *z = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, z) in line.iter().enumerate() {
                    data[base + j * stride] = *z;
                }
            }
        }
    }
}

/// Unnormalized 1-D FFT in place.
pub fn fft_1d(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_pure_mode() {
        let g = TorusGrid::new(2, 16).unwrap();
        let one = SpectralField::from_fn(g, 1, |_| vec![1.0]);
        assert!((one.at(0, 0) - 1.0).norm() < 1e-14);
        assert!(one.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
        let vals: Vec<Complex64> = (0..g.len())
            .map(|f| Complex64::from_polar(1.0, 2.0 * g.coordinate(f)[0]))
            .collect();
        let m = SpectralField::from_values(g, 1, &vals).unwrap();
        let j = g.index_of_mode(&[2, 0]).unwrap();
        for flat in 0..g.len() {
            let want = if flat == j { 1.0 } else { 0.0 };
            assert!((m.at(0, flat) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[16usize, 32] {
            let g = TorusGrid::new(2, n).unwrap();
            let vals: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = SpectralField::from_real(g, 1, &vals).unwrap();
            let back = f.real_values();
            let err = vals.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12);
            let grid_norm2: f64 = vals.iter().map(|x| x * x).sum::<f64>() * g.spacing().powi(2);
            assert!((grid_norm2 - f.l2_norm().powi(2)).abs() < 1e-12 * grid_norm2);
            assert!(f.conjugate_symmetry_defect() < 1e-13);
        }
    }

    #[test]
    fn sobolev_single_mode() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = SpectralField::from_fn(g, 1, |x| vec![x[0].cos()]);
        assert!((f.sobolev_norm(1.0) - 2f64.sqrt() * f.sobolev_norm(0.0)).abs() < 1e-13);
    }
}
