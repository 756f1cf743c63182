//! Dense complex factorizations built on the Hermitian eigensolver.
//!
//! The singular value decomposition is taken from the Hermitian matrix
//! [[0, B], [Bᴴ, 0]], whose eigenvalues are ±σᵢ(B) and whose eigenvectors
//! are [uᵢ; ±vᵢ]/√2. Singular values are then accurate to roundoff
//! relative to ‖B‖, and the pseudoinverse is a block of the pseudoinverse
//! of the augmented matrix.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, C64};

fn augmented(b: &CMatrix) -> CMatrix {
    let (m, n) = b.shape();
    let mut a = DMatrix::zeros(m + n, m + n);
    a.view_mut((0, m), (m, n)).copy_from(b);
    a.view_mut((m, 0), (n, m)).copy_from(&b.adjoint());
    a
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Singular values of B in ascending order.
pub fn singular_values(b: &CMatrix) -> Vec<f64> {
    let k = b.nrows().min(b.ncols());
    if k == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = augmented(b).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    let mut s: Vec<f64> = ev[..k].iter().map(|x| x.max(0.0)).collect();
    s.reverse();
    s
}

/// Moore–Penrose pseudoinverse of B, dropping singular values at or below
/// `rtol`·σ_max.
pub fn pseudo_inverse(b: &CMatrix, rtol: f64) -> CMatrix {
    let (m, n) = b.shape();
    let eig = augmented(b).symmetric_eigen();
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cut = rtol * smax;
    let mut full = DMatrix::<C64>::zeros(m + n, m + n);
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cut && lambda != 0.0 {
            let w = eig.eigenvectors.column(j);
            full += w * w.adjoint() * C64::new(1.0 / lambda, 0.0);
        }
    }
    full.view((m, 0), (n, m)).into_owned()
}

/// Pseudoinverse of a Hermitian matrix from its eigendecomposition.
pub fn hermitian_pseudo_inverse(h: &CMatrix, rtol: f64) -> CMatrix {
    let eig = hermitian_part(h).symmetric_eigen();
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let inv = eig.eigenvalues.map(|x| if x.abs() > rtol * smax && x != 0.0 { C64::new(1.0 / x, 0.0) } else { C64::new(0.0, 0.0) });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.adjoint()
}

/// Eigenvalues of a Hermitian matrix by absolute value (its singular
/// values), ascending, with the matching unit eigenvectors as columns.
pub fn hermitian_singular_pairs(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    let values = order.iter().map(|&i| eig.eigenvalues[i].abs()).collect();
    let vectors = DMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Right singular vector of the smallest singular value of B, from the
/// eigenvector of BᴴB, together with that singular value.
pub fn smallest_right_singular_vector(b: &CMatrix) -> (f64, DVector<C64>) {
    let (_, vectors) = hermitian_singular_pairs(&(b.adjoint() * b));
    let v = vectors.column(0).into_owned();
    let s = (b * &v).norm();
    (s, v)
}

/// 2-norm condition number σ_max/σ_min (infinite when singular).
pub fn condition_number(b: &CMatrix) -> f64 {
    let s = singular_values(b);
    match (s.first(), s.last()) {
        (Some(&min), Some(&max)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random(m: usize, n: usize, seed: u64) -> CMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_conditions() {
        for (m, n) in [(4, 4), (6, 3), (3, 5)] {
            let b = random(m, n, (m * 10 + n) as u64);
            let p = pseudo_inverse(&b, 1e-12);
            assert!((&b * &p * &b - &b).norm() < 1e-12);
            assert!((&p * &b * &p - &p).norm() < 1e-12);
            assert!(((&b * &p).adjoint() - &b * &p).norm() < 1e-12);
            assert!(((&p * &b).adjoint() - &p * &b).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_matrix() {
        let u = random(5, 2, 1);
        let v = random(2, 5, 2);
        let b = &u * &v;
        let s = singular_values(&b);
        assert!(s[0] < 1e-13 && s[2] < 1e-13 && s[3] > 1e-3);
        let p = pseudo_inverse(&b, 1e-10);
        assert!((&b * &p * &b - &b).norm() < 1e-12);
        let (s0, v0) = smallest_right_singular_vector(&b);
        assert!(s0 < 1e-12 && (&b * v0).norm() < 1e-12);
    }

    #[test]
    fn singular_values_match_known_diagonal() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(3.0, 0.0), C64::new(0.0, -2.0), C64::new(0.5, 0.0)]));
        let s = singular_values(&d);
        assert!((s[0] - 0.5).abs() < 1e-15 && (s[1] - 2.0).abs() < 1e-15 && (s[2] - 3.0).abs() < 1e-15);
        assert!((condition_number(&d) - 6.0).abs() < 1e-14);
    }
}
