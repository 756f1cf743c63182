//! Sums over the integer lattice ξ_n ∈ ℤ with symmetric pairing and
//! Richardson extrapolation in the cutoff.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

/// A truncated lattice sum together with an estimate of the discarded tail.
#[derive(Clone, Debug)]
pub struct ModeSum {
    pub value: CMatrix,
    pub tail_bound: f64,
}

/// Σ_{|k|≤Λ} term(k), pairing k with −k when `symmetrize` is set.
///
/// The tail bound assumes the (paired) terms decay like k⁻², so the
/// remainder is bounded by a small multiple of Λ times the last pair.
pub fn mode_sum<F>(term: F, cutoff: i64, symmetrize: bool) -> Result<ModeSum>
where
    F: Fn(i64) -> CMatrix,
{
    if cutoff < 1 {
        return Err(Error::Argument(format!("mode-sum cutoff must be >= 1, got {cutoff}")));
    }
    let mut value = term(0);
    let mut last = 0.0;
    for k in 1..=cutoff {
        let plus = term(k);
        let minus = term(-k);
        if symmetrize {
            let pair = &plus + &minus;
            last = pair.norm();
            value += pair;
        } else {
            last = plus.norm() + minus.norm();
            value += plus;
            value += minus;
        }
    }
    Ok(ModeSum { value, tail_bound: 2.0 * cutoff as f64 * last })
}

/// Symmetric lattice sum extrapolated in 1/Λ from the cutoffs Λ₀·2^j,
/// j = 0..levels. The tail bound is the change contributed by the last level.
pub fn mode_sum_richardson<F>(term: F, base_cutoff: i64, levels: usize) -> Result<ModeSum>
where
    F: Fn(i64) -> CMatrix,
{
    if base_cutoff < 1 {
        return Err(Error::Argument(format!("mode-sum cutoff must be >= 1, got {base_cutoff}")));
    }
    if levels == 0 {
        return mode_sum(term, base_cutoff, true);
    }
    let mut value = term(0);
    let mut partial = Vec::with_capacity(levels + 1);
    let mut hs = Vec::with_capacity(levels + 1);
    let mut k = 1;
    for j in 0..=levels {
        let cutoff = base_cutoff << j;
        while k <= cutoff {
            value += term(k) + term(-k);
            k += 1;
        }
        partial.push(value.clone());
        hs.push(1.0 / cutoff as f64);
    }
    let (best, previous) = neville_matrix(&hs, &partial);
    let tail_bound = (&best - &previous).norm();
    Ok(ModeSum { value: best, tail_bound })
}

/// Polynomial extrapolation to h = 0 through (h_i, y_i). Returns the value
/// using all points and the value using all but the last point.
pub fn neville_zero(hs: &[f64], ys: &[Complex64]) -> (Complex64, Complex64) {
    assert_eq!(hs.len(), ys.len());
    assert!(!hs.is_empty());
    let best = neville_value(hs, ys);
    let previous = if hs.len() >= 2 { neville_value(&hs[..hs.len() - 1], &ys[..ys.len() - 1]) } else { best };
    (best, previous)
}

fn neville_value(hs: &[f64], ys: &[Complex64]) -> Complex64 {
    let m = hs.len();
    let mut p: Vec<Complex64> = ys.to_vec();
    for level in 1..m {
        for i in 0..m - level {
            let (hi, hj) = (hs[i], hs[i + level]);
            p[i] = (p[i + 1] * hi - p[i] * hj) / (hi - hj);
        }
    }
    p[0]
}

/// Elementwise [`neville_zero`] for matrices.
pub fn neville_matrix(hs: &[f64], ys: &[CMatrix]) -> (CMatrix, CMatrix) {
    let (r, c) = ys[0].shape();
    let mut best = DMatrix::zeros(r, c);
    let mut prev = DMatrix::zeros(r, c);
    let mut column = vec![Complex64::new(0.0, 0.0); ys.len()];
    for i in 0..r {
        for j in 0..c {
            for (slot, y) in column.iter_mut().zip(ys) {
                *slot = y[(i, j)];
            }
            let (b, p) = neville_zero(hs, &column);
            best[(i, j)] = b;
            prev[(i, j)] = p;
        }
    }
    (best, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scalar(z: f64) -> CMatrix {
        DMatrix::from_element(1, 1, Complex64::new(z, 0.0))
    }

    #[test]
    fn odd_term_vanishes() {
        for cutoff in [1, 7, 100] {
            let s = mode_sum(|k| scalar(k as f64 / (1.0 + (k * k) as f64)), cutoff, true).unwrap();
            assert_eq!(s.value[(0, 0)], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn delta_term() {
        let s = mode_sum(|k| scalar(if k == 0 { 1.0 } else { 0.0 }), 5, true).unwrap();
        assert_eq!(s.value[(0, 0)].re, 1.0);
    }

    #[test]
    fn rejects_zero_cutoff() {
        assert!(mode_sum(|_| scalar(1.0), 0, true).is_err());
    }

    #[test]
    fn coth_identity() {
        let want = PI / PI.tanh();
        let s = mode_sum(|k| scalar(1.0 / (1.0 + (k * k) as f64)), 1000, true).unwrap();
        let err = (s.value[(0, 0)].re - want).abs();
        assert!(err < s.tail_bound * 1.01 && err > 1e-4);
        let r = mode_sum_richardson(|k| scalar(1.0 / (1.0 + (k * k) as f64)), 128, 4).unwrap();
        assert!((r.value[(0, 0)].re - want).abs() < 1e-10, "{}", r.value[(0, 0)].re - want);
    }

    #[test]
    fn neville_polynomial_exact() {
        let hs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<Complex64> = hs.iter().map(|h| Complex64::new(1.0 + 2.0 * h - h * h * h, *h)).collect();
        let (b, _) = neville_zero(&hs, &ys);
        assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }
}
