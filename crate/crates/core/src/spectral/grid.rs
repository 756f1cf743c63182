//! Uniform grids on the flat torus with period 2π per axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A uniform grid on Tⁿ with `points` samples per axis.
///
/// Flat indices run with the last axis fastest, so the normal direction
/// x_n is contiguous in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
}

impl TorusGrid {
    /// Grid of dimension `dim` ∈ {2, 3} with `points` ≥ 8 (a power of two) per axis.
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Argument(format!("dimension must be 2 or 3, got {dim}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Argument(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        Ok(Self { dim, points })
    }

    /// Spatial dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis N.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid spacing 2π/N.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    /// Total number of grid points Nⁿ.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Always false: a valid grid has at least 8ⁿ points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of transverse modes Nⁿ⁻¹.
    pub fn transverse_len(&self) -> usize {
        self.points.pow(self.dim as u32 - 1)
    }

    /// Volume (2π)ⁿ of the torus.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Per-axis indices of a flat index.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        let mut r = flat;
        for a in (0..self.dim).rev() {
            idx[a] = r % self.points;
            r /= self.points;
        }
        idx
    }

    /// Flat index of per-axis indices.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Integer wave vector ξ of a flat index in FFT ordering.
    pub fn mode(&self, flat: usize) -> Vec<i64> {
        self.multi_index(flat)
            .into_iter()
            .map(|j| mode_of_index(j, self.points))
            .collect()
    }

    /// Flat index of a wave vector, if it is resolved by the grid.
    pub fn index_of_mode(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.dim {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim);
        for &m in xi {
            idx.push(index_of_mode(m, self.points)?);
        }
        Some(self.flat_index(&idx))
    }

    /// Coordinates of a grid point.
    pub fn coordinate(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(flat).into_iter().map(|j| j as f64 * h).collect()
    }

    /// Transverse wave vector ξ′ of a transverse flat index.
    pub fn transverse_mode(&self, flat: usize) -> Vec<i64> {
        let mut idx = vec![0i64; self.dim - 1];
        let mut r = flat;
        for a in (0..self.dim - 1).rev() {
            idx[a] = mode_of_index(r % self.points, self.points);
            r /= self.points;
        }
        idx
    }

    /// Transverse flat index of ξ′, if resolved.
    pub fn transverse_index(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.dim - 1 {
            return None;
        }
        let mut flat = 0;
        for &m in xi {
            flat = flat * self.points + index_of_mode(m, self.points)?;
        }
        Some(flat)
    }
}

/// Signed mode number of FFT index `j` on an axis with `n` points.
pub fn mode_of_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT index of the signed mode `m`, if −n/2 ≤ m < n/2.
pub fn index_of_mode(m: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if m < -half || m >= half {
        return None;
    }
    Some(if m >= 0 { m as usize } else { (m + n as i64) as usize })
}

/// ⟨ξ⟩ = √(1 + |ξ|²).
pub fn japanese_bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(2, 12).is_err());
        assert!(TorusGrid::new(2, 4).is_err());
        assert!(TorusGrid::new(4, 16).is_err());
        assert!(TorusGrid::new(3, 16).is_ok());
    }

    #[test]
    fn mode_round_trip() {
        let g = TorusGrid::new(3, 8).unwrap();
        for flat in 0..g.len() {
            let xi = g.mode(flat);
            assert!(xi.iter().all(|&m| (-4..4).contains(&m)));
            assert_eq!(g.index_of_mode(&xi), Some(flat));
        }
        assert_eq!(g.index_of_mode(&[4, 0, 0]), None);
    }

    #[test]
    fn bracket_values() {
        assert_eq!(japanese_bracket(&[0.0, 0.0]), 1.0);
        assert!((japanese_bracket(&[1.0, 2.0, 2.0]) - 10f64.sqrt()).abs() < 1e-15);
    }
}
