//! Vector-valued densities on the two boundary components Γ₀ = {x_n = 0}
//! and Γ₁ = {x_n = L}, stored per transverse Fourier mode ξ′.

use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::TorusGrid;
use crate::C64;

/// A boundary component of the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    /// Γ₀ = {x_n = 0}, outer normal −e_n.
    Lower,
    /// Γ₁ = {x_n = L}, outer normal +e_n.
    Upper,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::Lower, Component::Upper];

    pub fn index(self) -> usize {
        match self {
            Component::Lower => 0,
            Component::Upper => 1,
        }
    }

    /// Sign s with ν = s·e_n.
    pub fn normal_sign(self) -> f64 {
        match self {
            Component::Lower => -1.0,
            Component::Upper => 1.0,
        }
    }

    /// Height of the component for a strip of width `strip`.
    pub fn height(self, strip: f64) -> f64 {
        match self {
            Component::Lower => 0.0,
            Component::Upper => strip,
        }
    }
}

/// Coefficients ĥ_γ(ξ′) ∈ ℂ^width on each component.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDensity {
    dim: usize,
    points: usize,
    width: usize,
    values: [Vec<C64>; 2],
}

impl BoundaryDensity {
    pub fn zeros(grid: &TorusGrid, width: usize) -> Self {
        let len = grid.transverse_len() * width;
        Self {
            dim: grid.dim(),
            points: grid.points(),
            width,
            values: [vec![C64::new(0.0, 0.0); len], vec![C64::new(0.0, 0.0); len]],
        }
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.dim, self.points).expect("density built from a valid grid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of transverse modes.
    pub fn modes(&self) -> usize {
        self.points.pow((self.dim - 1) as u32)
    }

    pub fn get(&self, c: Component, mode: usize, comp: usize) -> C64 {
        self.values[c.index()][mode * self.width + comp]
    }

    pub fn set(&mut self, c: Component, mode: usize, comp: usize, z: C64) {
        self.values[c.index()][mode * self.width + comp] = z;
    }

    pub fn component(&self, c: Component) -> &[C64] {
        &self.values[c.index()]
    }

    pub fn component_mut(&mut self, c: Component) -> &mut [C64] {
        &mut self.values[c.index()]
    }

    /// Block vector [ĥ₀(ξ′); ĥ₁(ξ′)] of length 2·width.
    pub fn block(&self, mode: usize) -> Vec<C64> {
        let w = self.width;
        let mut v = Vec::with_capacity(2 * w);
        v.extend_from_slice(&self.values[0][mode * w..(mode + 1) * w]);
        v.extend_from_slice(&self.values[1][mode * w..(mode + 1) * w]);
        v
    }

    pub fn set_block(&mut self, mode: usize, block: &[C64]) {
        let w = self.width;
        assert_eq!(block.len(), 2 * w);
        self.values[0][mode * w..(mode + 1) * w].copy_from_slice(&block[..w]);
        self.values[1][mode * w..(mode + 1) * w].copy_from_slice(&block[w..]);
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.points != other.points || self.width != other.width {
            return Err(Error::Dimension("boundary densities have different shapes".into()));
        }
        Ok(())
    }

    /// (h, g)_Γ = ∫_Γ h·ḡ, summed over both components.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check(other)?;
        let area = (2.0 * std::f64::consts::PI).powi(self.dim as i32 - 1);
        let s: C64 = (0..2)
            .flat_map(|c| self.values[c].iter().zip(&other.values[c]).map(|(a, b)| a * b.conj()))
            .sum();
        Ok(s * area)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).expect("same shape").re.max(0.0).sqrt()
    }

    /// (Σ ⟨ξ′⟩^{2s}|ĥ|²)^{1/2} over both components.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let grid = self.grid();
        let mut acc = 0.0;
        for mode in 0..self.modes() {
            let xi: Vec<f64> = grid.transverse_mode(mode).iter().map(|&m| m as f64).collect();
            let w = crate::spectral::japanese_bracket(&xi).powf(2.0 * s);
            for c in 0..2 {
                for comp in 0..self.width {
                    acc += w * self.values[c][mode * self.width + comp].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn axpy(&mut self, a: C64, other: &Self) -> Result<()> {
        self.check(other)?;
        for c in 0..2 {
            for (x, y) in self.values[c].iter_mut().zip(&other.values[c]) {
                *x += a * y;
            }
        }
        Ok(())
    }

    pub fn scaled(&self, a: C64) -> Self {
        let mut out = self.clone();
        for c in 0..2 {
            for x in out.values[c].iter_mut() {
                *x *= a;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The outer normal field: −e_n on Γ₀, +e_n on Γ₁ (constant, so only ξ′ = 0).
    pub fn normal(grid: &TorusGrid) -> Self {
        let n = grid.dim();
        let mut h = Self::zeros(grid, n);
        for c in Component::BOTH {
            h.set(c, 0, n - 1, C64::new(c.normal_sign(), 0.0));
        }
        h
    }

    /// Real random density with transverse modes |ξ′_a| ≤ bandwidth.
    pub fn random_band_limited<R: Rng>(grid: &TorusGrid, width: usize, bandwidth: usize, rng: &mut R) -> Self {
        let mut h = Self::zeros(grid, width);
        let b = bandwidth as i64;
        for mode in 0..h.modes() {
            let xi = grid.transverse_mode(mode);
            if xi.iter().any(|m| m.abs() > b) {
                continue;
            }
            let neg: Vec<i64> = xi.iter().map(|m| -m).collect();
            let j = match grid.transverse_index(&neg) {
                Some(j) => j,
                None => continue,
            };
            if j < mode {
                continue;
            }
            for c in Component::BOTH {
                for comp in 0..width {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if j == mode {
                        h.set(c, mode, comp, C64::new(z.re, 0.0));
                    } else {
                        h.set(c, mode, comp, z);
                        h.set(c, j, comp, z.conj());
                    }
                }
            }
        }
        h
    }

    /// Transverse modes carrying nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..self.modes())
            .filter(|&m| (0..2).any(|c| (0..self.width).any(|k| self.values[c][m * self.width + k] != C64::new(0.0, 0.0))))
            .collect()
    }

    /// Remove the (·, ν)_Γ component: h − ((h, ν)/(ν, ν))ν.
    pub fn project_out_normal(&self) -> Result<Self> {
        let nu = Self::normal(&self.grid());
        let a = self.inner(&nu)? / nu.inner(&nu)?;
        let mut out = self.clone();
        out.axpy(-a, &nu)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn normal_and_norms() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let nu = BoundaryDensity::normal(&grid);
        let area = 2.0 * std::f64::consts::PI;
        assert!((nu.l2_norm() - (2.0 * area).sqrt()).abs() < 1e-14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let h = BoundaryDensity::random_band_limited(&grid, 2, 3, &mut rng);
        let p = h.project_out_normal().unwrap();
        assert!(p.inner(&nu).unwrap().norm() < 1e-13);
        assert!(h.sobolev_norm(1.0) >= h.sobolev_norm(0.0));
    }
}
