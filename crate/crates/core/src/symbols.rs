//! Closed-form principal symbols and exact inverse symbols of the
//! generalized Stokes system and of the operators built from it.
//!
//! Vectors ξ, ν are given in the flat coordinate frame, so the musical
//! isomorphism is the identity. Symmetric tensors are flattened row-major
//! (entry (i, j) at i·n + j).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Potentials of the constant-coefficient operator and the derived
/// constants f = (V₀+1)/(2V₀+1), g = 1/(2V₀+1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesSymbolParams {
    pub v: f64,
    pub v0: f64,
}

impl StokesSymbolParams {
    pub fn new(v: f64, v0: f64) -> Result<Self> {
        if !(v >= 0.0 && v0 >= 0.0) || !v.is_finite() || !v0.is_finite() {
            return Err(Error::Argument(format!("potentials must be finite and nonnegative (V={v}, V0={v0})")));
        }
        Ok(Self { v, v0 })
    }

    pub fn f(&self) -> f64 {
        (self.v0 + 1.0) / (2.0 * self.v0 + 1.0)
    }

    pub fn g(&self) -> f64 {
        1.0 / (2.0 * self.v0 + 1.0)
    }
}

/// A matrix-valued symbol a(ξ) of order m with an optional homogeneous
/// leading term σ_m(ξ).
pub struct MatrixSymbol {
    pub order: i32,
    pub rows: usize,
    pub cols: usize,
    eval: Box<dyn Fn(&[f64]) -> CMatrix + Send + Sync>,
    leading: Option<Box<dyn Fn(&[f64]) -> CMatrix + Send + Sync>>,
}

impl std::fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixSymbol")
            .field("order", &self.order)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("has_leading", &self.leading.is_some())
            .finish()
    }
}

impl MatrixSymbol {
    pub fn new<F>(order: i32, rows: usize, cols: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    {
        Self { order, rows, cols, eval: Box::new(eval), leading: None }
    }

    pub fn with_leading<F>(mut self, leading: F) -> Self
    where
        F: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    {
        self.leading = Some(Box::new(leading));
        self
    }

    pub fn eval(&self, xi: &[f64]) -> CMatrix {
        (self.eval)(xi)
    }

    pub fn leading(&self, xi: &[f64]) -> Option<CMatrix> {
        self.leading.as_ref().map(|l| l(xi))
    }

    pub fn has_leading(&self) -> bool {
        self.leading.is_some()
    }

    /// max over the rays of |a(rω) − σ_m(rω)| / ⟨rω⟩^{m−1} for each radius r.
    /// Bounded values across radii confirm the leading-term estimate.
    pub fn leading_term_constants(&self, rays: &[Vec<f64>], radii: &[f64]) -> Result<Vec<f64>> {
        let lead = self
            .leading
            .as_ref()
            .ok_or_else(|| Error::Argument("symbol has no leading term".into()))?;
        Ok(radii
            .iter()
            .map(|&r| {
                rays.iter()
                    .map(|w| {
                        let xi: Vec<f64> = w.iter().map(|x| x * r).collect();
                        let br = crate::spectral::japanese_bracket(&xi);
                        ((self.eval)(&xi) - lead(&xi)).norm() / br.powi(self.order - 1)
                    })
                    .fold(0.0, f64::max)
            })
            .collect())
    }

    /// max over rays and multi-indices |β| ≤ 2 of |∂^β a(rω)| / ⟨rω⟩^{m−|β|}
    /// for each radius, with derivatives by central differences.
    pub fn symbol_estimate_constants(&self, rays: &[Vec<f64>], radii: &[f64]) -> Vec<f64> {
        radii
            .iter()
            .map(|&r| {
                let mut worst: f64 = 0.0;
                for w in rays {
                    let xi: Vec<f64> = w.iter().map(|x| x * r).collect();
                    let n = xi.len();
                    let br = crate::spectral::japanese_bracket(&xi);
                    let h = 1e-3 * br;
                    worst = worst.max((self.eval)(&xi).norm() / br.powi(self.order));
                    for a in 0..n {
                        let mut p = xi.clone();
                        let mut m = xi.clone();
                        p[a] += h;
                        m[a] -= h;
                        let d1 = ((self.eval)(&p) - (self.eval)(&m)) / c(2.0 * h);
                        worst = worst.max(d1.norm() / br.powi(self.order - 1));
                        for b in a..n {
                            let shift = |s1: f64, s2: f64| {
                                let mut q = xi.clone();
                                q[a] += s1 * h;
                                q[b] += s2 * h;
                                (self.eval)(&q)
                            };
                            let d2 = (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0))
                                / c(4.0 * h * h);
                            worst = worst.max(d2.norm() / br.powi(self.order - 2));
                        }
                    }
                }
                worst
            })
            .collect()
    }
}

/// ADN principal symbol [[|ξ|² + ξ⊗ξ, iξ], [−iξᵀ, −V₀]] for ξ ≠ 0; the
/// zero-frequency block diag(V·I, −V₀) at ξ = 0.
pub fn stokes_symbol(p: &StokesSymbolParams, xi: &[f64]) -> CMatrix {
    let n = xi.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    let r2 = norm2(xi);
    if r2 == 0.0 {
        for i in 0..n {
            m[(i, i)] = c(p.v);
        }
        m[(n, n)] = c(-p.v0);
        return m;
    }
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c(xi[i] * xi[j] + if i == j { r2 } else { 0.0 });
        }
        m[(i, n)] = I * xi[i];
        m[(n, i)] = -I * xi[i];
    }
    m[(n, n)] = c(-p.v0);
    m
}

/// Full per-mode matrix of the constant-coefficient operator,
/// [[|ξ|² + V + ξ⊗ξ, iξ], [−iξᵀ, −V₀]], valid for every ξ.
pub fn full_symbol(p: &StokesSymbolParams, xi: &[f64]) -> CMatrix {
    let n = xi.len();
    let mut m = stokes_symbol(p, xi);
    if norm2(xi) > 0.0 {
        for i in 0..n {
            m[(i, i)] += c(p.v);
        }
    }
    m
}

/// Exact inverse of the principal symbol for ξ ≠ 0.
pub fn stokes_symbol_inverse(p: &StokesSymbolParams, xi: &[f64]) -> Result<CMatrix> {
    let n = xi.len();
    let r2 = norm2(xi);
    if r2 == 0.0 {
        return Err(Error::SingularPoint("the inverse symbol is undefined at xi = 0".into()));
    }
    let (f, g) = (p.f(), p.g());
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c(if i == j { 1.0 / r2 } else { 0.0 } - f * xi[i] * xi[j] / (r2 * r2));
        }
        m[(i, n)] = I * (g * xi[i] / r2);
        m[(n, i)] = -I * (g * xi[i] / r2);
    }
    m[(n, n)] = c(-2.0 * g);
    Ok(m)
}

/// Moore–Penrose inverse of the zero-frequency block diag(V·I, −V₀).
pub fn zero_block_pinv(p: &StokesSymbolParams, n: usize) -> CMatrix {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    if p.v > 0.0 {
        for i in 0..n {
            m[(i, i)] = c(1.0 / p.v);
        }
    }
    if p.v0 > 0.0 {
        m[(n, n)] = c(-1.0 / p.v0);
    }
    m
}

/// Inverse of the full per-mode matrix, from the closed-form adjugate over
/// the determinant factor (|ξ|²+V)((2V₀+1)|ξ|² + V₀V). At a singular
/// frequency the Moore–Penrose inverse of the zero block is returned.
pub fn full_inverse(p: &StokesSymbolParams, xi: &[f64]) -> CMatrix {
    let n = xi.len();
    let r2 = norm2(xi);
    let q1 = r2 + p.v;
    let q2 = (2.0 * p.v0 + 1.0) * r2 + p.v0 * p.v;
    if r2 == 0.0 || q1 * q2 == 0.0 {
        return zero_block_pinv(p, n);
    }
    let mut m = DMatrix::zeros(n + 1, n + 1);
    let den = q1 * q2;
    for i in 0..n {
        for j in 0..n {
            let a = if i == j { q2 } else { 0.0 } - (p.v0 + 1.0) * xi[i] * xi[j];
            m[(i, j)] = c(a / den);
        }
        m[(i, n)] = I * (xi[i] / q2);
        m[(n, i)] = -I * (xi[i] / q2);
    }
    m[(n, n)] = c(-(2.0 * r2 + p.v) / q2);
    m
}

/// First-order operators whose principal symbols are tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstOrder {
    /// Deformation tensor, vectors → symmetric tensors.
    Def,
    /// Formal adjoint of Def, tensors → vectors.
    DefStar,
    /// Gradient, scalars → vectors.
    Grad,
    /// Formal adjoint of the gradient (−div), vectors → scalars.
    DivStar,
    /// D_ν u = Def(u)ν.
    Dnu,
    /// Formal adjoint of D_ν.
    DnuStar,
}

impl std::str::FromStr for FirstOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Def" => Ok(Self::Def),
            "DefStar" => Ok(Self::DefStar),
            "Grad" => Ok(Self::Grad),
            "DivStar" => Ok(Self::DivStar),
            "Dnu" => Ok(Self::Dnu),
            "DnuStar" => Ok(Self::DnuStar),
            other => Err(Error::Argument(format!("unknown first-order operator '{other}'"))),
        }
    }
}

/// σ₁(P; ξ) as a matrix in the flat frame.
pub fn first_order_symbol(which: FirstOrder, xi: &[f64], nu: Option<&[f64]>) -> Result<CMatrix> {
    let n = xi.len();
    let need_nu = || {
        nu.filter(|v| v.len() == n)
            .ok_or_else(|| Error::Argument("a normal vector of matching length is required".into()))
    };
    Ok(match which {
        FirstOrder::Def => {
            let mut m = DMatrix::zeros(n * n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i * n + j, j)] += I * (0.5 * xi[i]);
                    m[(i * n + j, i)] += I * (0.5 * xi[j]);
                }
            }
            m
        }
        FirstOrder::DefStar => first_order_symbol(FirstOrder::Def, xi, None)?.adjoint(),
        FirstOrder::Grad => DMatrix::from_fn(n, 1, |i, _| I * xi[i]),
        FirstOrder::DivStar => DMatrix::from_fn(1, n, |_, j| -I * xi[j]),
        FirstOrder::Dnu => {
            let nu = need_nu()?;
            let xn = dot(xi, nu);
            DMatrix::from_fn(n, n, |i, j| I * (0.5 * (if i == j { xn } else { 0.0 } + xi[i] * nu[j])))
        }
        FirstOrder::DnuStar => first_order_symbol(FirstOrder::Dnu, xi, nu)?.adjoint(),
    })
}

/// σ₂(Def*Def; ξ) = ½(|ξ|² + ξ⊗ξ).
pub fn def_star_def_symbol(xi: &[f64]) -> CMatrix {
    let n = xi.len();
    let r2 = norm2(xi);
    DMatrix::from_fn(n, n, |i, j| c(0.5 * (if i == j { r2 } else { 0.0 } + xi[i] * xi[j])))
}

/// Operators with a boundary map ∂_ν^P = −iσ₁(P; ν).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMapKind {
    Def,
    DefStar,
    Grad,
    DivStar,
}

/// ∂_ν^P = −iσ₁(P; ν).
pub fn boundary_map(which: BoundaryMapKind, nu: &[f64]) -> Result<CMatrix> {
    let unit = norm2(nu).sqrt();
    if (unit - 1.0).abs() > 1e-12 {
        return Err(Error::Argument(format!("normal must be a unit vector (|nu| = {unit})")));
    }
    let op = match which {
        BoundaryMapKind::Def => FirstOrder::Def,
        BoundaryMapKind::DefStar => FirstOrder::DefStar,
        BoundaryMapKind::Grad => FirstOrder::Grad,
        BoundaryMapKind::DivStar => FirstOrder::DivStar,
    };
    Ok(first_order_symbol(op, nu, None)? * (-I))
}

/// ∂_ν^{Def*}σ₁(Def; ξ) + σ₁(D_ν; ξ), which vanishes identically.
pub fn def_star_boundary_defect(nu: &[f64], xi: &[f64]) -> Result<f64> {
    let lhs = boundary_map(BoundaryMapKind::DefStar, nu)? * first_order_symbol(FirstOrder::Def, xi, None)?;
    let rhs = first_order_symbol(FirstOrder::Dnu, xi, Some(nu))?;
    Ok((lhs + rhs).norm())
}

/// Blocks of the inverse symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// σ₋₂(A) = 1/|ξ|² − (f/|ξ|⁴)ξ⊗ξ.
    A,
    /// σ₋₁(B) = igξ/|ξ|².
    B,
    /// σ₋₁(C) = −igξᵀ/|ξ|².
    C,
    /// σ₀(D) = −2g.
    D,
}

pub fn block_symbol(which: Block, p: &StokesSymbolParams, xi: &[f64]) -> Result<CMatrix> {
    let inv = stokes_symbol_inverse(p, xi)?;
    let n = xi.len();
    Ok(match which {
        Block::A => inv.view((0, 0), (n, n)).into_owned(),
        Block::B => inv.view((0, n), (n, 1)).into_owned(),
        Block::C => inv.view((n, 0), (1, n)).into_owned(),
        Block::D => inv.view((n, n), (1, 1)).into_owned(),
    })
}

/// σ₋₁ of the double-layer operator P = −2A D_ν* + B ν, together with the
/// jump coefficient J± = −i·I.
pub fn double_layer_symbol(p: &StokesSymbolParams, nu: &[f64], xi: &[f64]) -> Result<(CMatrix, CMatrix)> {
    let n = xi.len();
    let r2 = norm2(xi);
    if r2 == 0.0 {
        return Err(Error::SingularPoint("the double-layer symbol is undefined at xi = 0".into()));
    }
    if nu.len() != n {
        return Err(Error::Dimension("normal and frequency lengths differ".into()));
    }
    let (f, g) = (p.f(), p.g());
    let xn = dot(xi, nu);
    let m = DMatrix::from_fn(n, n, |i, j| {
        let re = if i == j { xn } else { 0.0 } + nu[i] * xi[j] - 2.0 * f * xn * xi[i] * xi[j] / r2
            + g * xi[i] * nu[j];
        I * (re / r2)
    });
    let jump = DMatrix::from_diagonal_element(n, n, -I);
    Ok((m, jump))
}

/// Principal symbols of the boundary operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    K,
    S,
    C0,
}

/// σ₀(K), σ₋₁(S) or σ₀(C₀) at a tangential frequency ξ′ ⟂ ν.
pub fn boundary_symbol(which: BoundaryKind, p: &StokesSymbolParams, nu: &[f64], xi: &[f64]) -> Result<CMatrix> {
    let n = xi.len();
    if nu.len() != n {
        return Err(Error::Dimension("normal and frequency lengths differ".into()));
    }
    let r = norm2(xi).sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint("boundary symbols are undefined at xi' = 0".into()));
    }
    if dot(xi, nu).abs() > 1e-12 * r.max(1.0) {
        return Err(Error::Argument("xi' must be orthogonal to the normal".into()));
    }
    let (f, g) = (p.f(), p.g());
    Ok(match which {
        BoundaryKind::K => {
            let s = p.v0 / (2.0 * (2.0 * p.v0 + 1.0) * r);
            DMatrix::from_fn(n, n, |i, j| I * (s * (nu[i] * xi[j] - xi[i] * nu[j])))
        }
        BoundaryKind::S => DMatrix::from_fn(n, n, |i, j| {
            let eta_i = xi[i] / r;
            let eta_j = xi[j] / r;
            c((if i == j { 2.0 } else { 0.0 } - f * nu[i] * nu[j] - f * eta_i * eta_j) / (4.0 * r))
        }),
        BoundaryKind::C0 => DMatrix::from_fn(1, n, |_, j| -I * (g * xi[j] / (2.0 * r))),
    })
}

/// Hermitian eigenvalues of a small self-adjoint matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn mat(rows: usize, cols: usize, entries: &[C64]) -> CMatrix {
        DMatrix::from_row_slice(rows, cols, entries)
    }

    #[test]
    fn zero_frequency_block() {
        let p = StokesSymbolParams::new(2.0, 3.0).unwrap();
        let m = stokes_symbol(&p, &[0.0, 0.0]);
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(2.0), c(-3.0)]));
        assert!(close(&m, &want, 0.0));
    }

    #[test]
    fn unit_frequency_symbol_and_inverse() {
        let z = c(0.0);
        let p = StokesSymbolParams::new(0.0, 0.0).unwrap();
        let m = stokes_symbol(&p, &[1.0, 0.0]);
        assert!(close(&m, &mat(3, 3, &[c(2.0), z, I, z, c(1.0), z, -I, z, z]), 0.0));
        let inv = stokes_symbol_inverse(&p, &[1.0, 0.0]).unwrap();
        assert!(close(&inv, &mat(3, 3, &[z, z, I, z, c(1.0), z, -I, z, c(-2.0)]), 1e-15));
        let p1 = StokesSymbolParams::new(0.0, 1.0).unwrap();
        let inv1 = stokes_symbol_inverse(&p1, &[1.0, 0.0]).unwrap();
        let oracle = stokes_symbol(&p1, &[1.0, 0.0]).try_inverse().unwrap();
        assert!(close(&inv1, &oracle, 1e-14));
        let third = 1.0 / 3.0;
        let want = mat(3, 3, &[c(third), z, I * third, z, c(1.0), z, -I * third, z, c(-2.0 * third)]);
        assert!(close(&inv1, &want, 1e-15));
        assert!(stokes_symbol_inverse(&p1, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn full_inverse_matches_dense_inverse() {
        for &(v, v0) in &[(1.0, 0.0), (0.0, 1.0), (2.5, 0.3), (1.0, 1.0)] {
            let p = StokesSymbolParams::new(v, v0).unwrap();
            for xi in [[0.3, -1.2], [2.0, 0.0], [0.0, 5.0]] {
                let dense = full_symbol(&p, &xi).try_inverse().unwrap();
                assert!(close(&full_inverse(&p, &xi), &dense, 1e-13 * dense.norm()));
            }
        }
        let p = StokesSymbolParams::new(1.0, 0.0).unwrap();
        let z = full_inverse(&p, &[0.0, 0.0]);
        assert_eq!(z[(0, 0)], c(1.0));
        assert_eq!(z[(2, 2)], c(0.0));
    }

    #[test]
    fn first_order_table() {
        let def = first_order_symbol(FirstOrder::Def, &[1.0, 0.0], None).unwrap();
        let x = DMatrix::from_column_slice(2, 1, &[c(0.0), c(1.0)]);
        let t = &def * &x;
        let want = DMatrix::from_column_slice(4, 1, &[c(0.0), I * 0.5, I * 0.5, c(0.0)]);
        assert!(close(&t, &want, 0.0));
        let dnu = first_order_symbol(FirstOrder::Dnu, &[1.0, 0.0], Some(&[0.0, 1.0])).unwrap();
        let want = mat(2, 2, &[c(0.0), I * 0.5, c(0.0), c(0.0)]);
        assert!(close(&dnu, &want, 0.0));
        let comp = first_order_symbol(FirstOrder::DefStar, &[1.0, 0.0], None).unwrap() * def;
        assert!(close(&comp, &mat(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.5)]), 1e-15));
        assert!(first_order_symbol(FirstOrder::Dnu, &[1.0, 0.0], None).is_err());
        assert!("Curl".parse::<FirstOrder>().is_err());
    }

    #[test]
    fn boundary_maps() {
        let nu = [0.0, 1.0];
        let g = boundary_map(BoundaryMapKind::Grad, &nu).unwrap();
        assert!(close(&g, &DMatrix::from_column_slice(2, 1, &[c(0.0), c(1.0)]), 0.0));
        let d = boundary_map(BoundaryMapKind::DivStar, &nu).unwrap();
        assert_eq!(d[(0, 1)], c(-1.0));
        assert!(def_star_boundary_defect(&nu, &[0.7, -0.2]).unwrap() < 1e-15);
        assert!(boundary_map(BoundaryMapKind::Grad, &[0.0, 2.0]).is_err());
    }

    #[test]
    fn blocks_and_double_layer() {
        let p0 = StokesSymbolParams::new(0.0, 0.0).unwrap();
        let a = block_symbol(Block::A, &p0, &[1.0, 0.0]).unwrap();
        assert!(close(&a, &mat(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]), 1e-15));
        let p1 = StokesSymbolParams::new(0.0, 1.0).unwrap();
        let d = block_symbol(Block::D, &p1, &[0.4, 7.0]).unwrap();
        assert!((d[(0, 0)] - c(-2.0 / 3.0)).norm() < 1e-15);
        let nu = [0.0, -1.0];
        let (m, j) = double_layer_symbol(&p1, &nu, &nu).unwrap();
        assert!(close(&m, &DMatrix::from_diagonal_element(2, 2, I), 1e-15));
        assert!(close(&j, &DMatrix::from_diagonal_element(2, 2, -I), 0.0));
    }

    #[test]
    fn boundary_symbols() {
        let p0 = StokesSymbolParams::new(1.0, 0.0).unwrap();
        let nu = [0.0, 0.0, 1.0];
        let k0 = boundary_symbol(BoundaryKind::K, &p0, &nu, &[1.0, 2.0, 0.0]).unwrap();
        assert_eq!(k0.norm(), 0.0);
        let p1 = StokesSymbolParams::new(1.0, 1.0).unwrap();
        let k1 = boundary_symbol(BoundaryKind::K, &p1, &[0.0, 1.0], &[3.0, 0.0]).unwrap();
        let ev = hermitian_eigenvalues(&k1);
        assert!((ev[0] + 1.0 / 6.0).abs() < 1e-15 && (ev[1] - 1.0 / 6.0).abs() < 1e-15);
        let s = boundary_symbol(BoundaryKind::S, &p0, &nu, &[0.6, 0.8, 0.0]).unwrap();
        let ev = hermitian_eigenvalues(&s);
        for (a, b) in ev.iter().zip([0.25, 0.25, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(boundary_symbol(BoundaryKind::S, &p0, &nu, &[0.6, 0.8, 0.1]).is_err());
    }
}
