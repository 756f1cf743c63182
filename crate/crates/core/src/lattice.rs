//! Closed-form lattice sums Σ_k r(k)/D(k)·e^{ikt} over k ∈ ℤ for rational
//! functions whose denominator is D(k) = c·(k²+b₁)(k²+b₂).
//!
//! The numerator is reduced modulo D; the polynomial quotient only produces
//! distributions supported at t ∈ 2πℤ and is discarded off that set. The
//! proper remainder is split into partial fractions, each summed exactly
//! through hyperbolic closed forms (b > 0) or periodic Bernoulli
//! polynomials (b = 0).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const SERIES_THRESHOLD: f64 = 0.02;

/// Polynomial in k with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    /// c·k^d.
    pub fn monomial(c: C64, d: usize) -> Self {
        let mut v = vec![ZERO; d + 1];
        v[d] = c;
        Poly(v)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|z| *z != ZERO)
    }

    pub fn eval(&self, k: f64) -> C64 {
        self.0.iter().rev().fold(ZERO, |acc, &c| acc * k + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(ZERO) + other.0.get(i).copied().unwrap_or(ZERO))
            .collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut v = vec![ZERO; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v)
    }

    pub fn scale(&self, c: C64) -> Poly {
        Poly(self.0.iter().map(|z| z * c).collect())
    }

    /// Quotient and remainder by a real polynomial with nonzero leading coefficient.
    pub fn div_rem(&self, den: &[f64]) -> (Poly, Poly) {
        let dd = den.len() - 1;
        let lead = den[dd];
        let mut rem = self.0.clone();
        let top = match self.degree() {
            Some(d) => d,
            None => return (Poly::zero(), Poly::zero()),
        };
        rem.truncate(top + 1);
        if top < dd {
            return (Poly::zero(), Poly(rem));
        }
        let mut quot = vec![ZERO; top - dd + 1];
        for i in (dd..=top).rev() {
            let q = rem[i] / lead;
            quot[i - dd] = q;
            for (j, &d) in den.iter().enumerate() {
                rem[i - dd + j] -= q * d;
            }
        }
        rem.truncate(dd);
        (Poly(quot), Poly(rem))
    }
}

/// Matrix whose entries are polynomials in k.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn from_constant(m: &CMatrix) -> Self {
        let mut p = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != ZERO {
                    p.set(i, j, Poly::constant(m[(i, j)]));
                }
            }
        }
        p
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "polynomial matrix shapes do not chain");
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero();
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = other.get(l, j);
                    if a.degree().is_some() && b.degree().is_some() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Multiply every entry by the same polynomial.
    pub fn scale_poly(&self, p: &Poly) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e.mul(p)).collect() }
    }

    pub fn eval(&self, k: f64) -> CMatrix {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(k))
    }
}

/// D(k) = lead·(k² + b₁)(k² + b₂) with lead > 0 and b₁, b₂ ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Denominator {
    pub lead: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Denominator {
    pub fn new(lead: f64, b1: f64, b2: f64) -> Result<Self> {
        if !(lead > 0.0 && b1 >= 0.0 && b2 >= 0.0) {
            return Err(Error::Argument(format!("invalid denominator lead={lead}, b1={b1}, b2={b2}")));
        }
        Ok(Self { lead, b1, b2 })
    }

    /// Coefficients of D, lowest degree first.
    pub fn coefficients(&self) -> [f64; 5] {
        let l = self.lead;
        [l * self.b1 * self.b2, 0.0, l * (self.b1 + self.b2), 0.0, l]
    }

    pub fn eval(&self, k: f64) -> f64 {
        self.lead * (k * k + self.b1) * (k * k + self.b2)
    }

    /// Whether the k = 0 term is singular and therefore excluded.
    pub fn vanishes_at_zero(&self) -> bool {
        self.b1 * self.b2 == 0.0
    }

    fn degenerate(&self) -> bool {
        (self.b1 - self.b2).abs() <= 1e-13 * self.b1.max(self.b2).max(1.0)
    }
}

/// How the point t = 0 (mod 2π) is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    /// Limit from t > 0.
    Above,
    /// Limit from t < 0.
    Below,
    /// Average of the two one-sided limits (even-part sum).
    Principal,
}

/// Bernoulli numbers B_0..=B_m (with B_1 = −1/2).
fn bernoulli_numbers(m: usize) -> Vec<f64> {
    let mut b = vec![0.0; m + 1];
    b[0] = 1.0;
    for k in 1..=m {
        let mut s = 0.0;
        let mut binom = 1.0;
        for (j, bj) in b.iter().enumerate().take(k) {
            if j > 0 {
                binom *= (k + 1 - j + 1) as f64 / j as f64;
            }
            s += binom * bj;
        }
        b[k] = -s / (k + 1) as f64;
    }
    b
}

/// Z(s, t) = Σ_{k≠0} e^{ikt}/k^s for t ∈ [0, 2π], s ≥ 1, with the endpoint
/// values of s = 1 read as one-sided limits.
pub fn periodic_zeta(s: usize, t: f64) -> C64 {
    assert!(s >= 1);
    let x = t / (2.0 * PI);
    let b = bernoulli_numbers(s);
    let mut binom = 1.0;
    let mut poly = 0.0;
    for (k, bk) in b.iter().enumerate() {
        if k > 0 {
            binom *= (s - k + 1) as f64 / k as f64;
        }
        poly += binom * bk * x.powi((s - k) as i32);
    }
    let mut fact = 1.0;
    for j in 2..=s {
        fact *= j as f64;
    }
    let twopi_i_pow = C64::new(0.0, 2.0 * PI).powu(s as u32);
    -twopi_i_pow / fact * poly
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// F(b, m, j, t) = Σ_{k≠0} k^j e^{ikt}/(k² + b)^m for m ∈ {1, 2}, j ∈ {0, 1},
/// t ∈ [0, 2π].
pub fn basis_sum(b: f64, m: u32, j: u32, t: f64) -> C64 {
    debug_assert!((1..=2).contains(&m) && j <= 1);
    if b < SERIES_THRESHOLD {
        let mut acc = ZERO;
        let mut bp = 1.0;
        for p in 0..40usize {
            let coef = binomial(m as usize + p - 1, p) * bp * if p % 2 == 0 { 1.0 } else { -1.0 };
            let term = periodic_zeta(2 * m as usize + 2 * p - j as usize, t) * coef;
            acc += term;
            if b == 0.0 || term.norm() < 1e-17 * acc.norm().max(1e-300) {
                break;
            }
            bp *= b;
        }
        return acc;
    }
    let beta = b.sqrt();
    let s = 2.0 * PI - t;
    let a = (-beta * t).exp();
    let bt = (-beta * s).exp();
    let w = (-2.0 * PI * beta).exp();
    let den = 1.0 - w;
    match (m, j) {
        (1, 0) => C64::new((PI / beta) * (a + bt) / den - 1.0 / b, 0.0),
        (1, 1) => C64::new(0.0, PI * (a - bt) / den),
        (2, 0) => {
            let d = -(PI / (beta * beta)) * (a + bt) / den + (PI / beta) * (-t * a - s * bt) / den
                - (PI / beta) * (a + bt) * 2.0 * PI * w / (den * den);
            C64::new(-d / (2.0 * beta) - 1.0 / (b * b), 0.0)
        }
        (2, 1) => {
            let d = PI * (-t * a + s * bt) / den - PI * (a - bt) * 2.0 * PI * w / (den * den);
            C64::new(0.0, -d / (2.0 * beta))
        }
        _ => unreachable!(),
    }
}

fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Precomputed partial-fraction form of a matrix of rational lattice terms
/// P(k)/D(k), ready to be evaluated at many offsets t.
#[derive(Clone, Debug)]
pub struct LatticeKernel {
    rows: usize,
    cols: usize,
    den: Denominator,
    degenerate: bool,
    /// Per entry: coefficients of the four basis sums and the constant.
    coeffs: Vec<([C64; 4], C64)>,
}

impl LatticeKernel {
    pub fn new(num: &PolyMatrix, den: Denominator) -> Self {
        let dcoef = den.coefficients();
        let degenerate = den.degenerate();
        let coeffs = num
            .entries
            .iter()
            .map(|p| {
                let (q, r) = p.div_rem(&dcoef);
                let mut r4 = [ZERO; 4];
                for (i, z) in r.0.iter().enumerate().take(4) {
                    r4[i] = z / den.lead;
                }
                let (e0, o0, e2, o2) = (r4[0], r4[1], r4[2], r4[3]);
                let parts = if degenerate {
                    let b = den.b1;
                    [e2, e0 - e2 * b, o2, o0 - o2 * b]
                } else {
                    let d = den.b1 - den.b2;
                    let beta_e = (e0 - e2 * den.b2) / d;
                    let beta_o = (o0 - o2 * den.b2) / d;
                    [e2 - beta_e, beta_e, o2 - beta_o, beta_o]
                };
                let mut constant = -q.eval(0.0);
                if !den.vanishes_at_zero() {
                    constant += p.eval(0.0) / den.eval(0.0);
                }
                (parts, constant)
            })
            .collect();
        Self { rows: num.rows, cols: num.cols, den, degenerate, coeffs }
    }

    fn basis(&self, t: f64) -> [C64; 4] {
        let d = &self.den;
        if self.degenerate {
            [basis_sum(d.b1, 1, 0, t), basis_sum(d.b1, 2, 0, t), basis_sum(d.b1, 1, 1, t), basis_sum(d.b1, 2, 1, t)]
        } else {
            [basis_sum(d.b1, 1, 0, t), basis_sum(d.b2, 1, 0, t), basis_sum(d.b1, 1, 1, t), basis_sum(d.b2, 1, 1, t)]
        }
    }

    /// Σ_k P(k)/D(k)·e^{ikt}, with k = 0 omitted when D(0) = 0 and the
    /// distributional part at t ∈ 2πℤ discarded. `approach` selects the
    /// limit taken when t ≡ 0.
    pub fn eval(&self, t: f64, approach: Approach) -> CMatrix {
        let t = reduce_angle(t);
        let basis = if t == 0.0 {
            match approach {
                Approach::Above => self.basis(0.0),
                Approach::Below => self.basis(2.0 * PI),
                Approach::Principal => {
                    let a = self.basis(0.0);
                    let b = self.basis(2.0 * PI);
                    [0, 1, 2, 3].map(|i| (a[i] + b[i]) * 0.5)
                }
            }
        } else {
            self.basis(t)
        };
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let (c, k0) = &self.coeffs[i * self.cols + j];
            c[0] * basis[0] + c[1] * basis[1] + c[2] * basis[2] + c[3] * basis[3] + k0
        })
    }
}

/// Scalar convenience wrapper around [`LatticeKernel`].
pub fn lattice_sum(num: &Poly, den: Denominator, t: f64, approach: Approach) -> C64 {
    let mut m = PolyMatrix::zeros(1, 1);
    m.set(0, 0, num.clone());
    LatticeKernel::new(&m, den).eval(t, approach)[(0, 0)]
}

/// Σ_{k≠l} P(k)/(D(k)(l − k))·e^{ikt} for an integer l with D(l) ≠ 0,
/// k = 0 omitted when D(0) = 0, off t ∈ 2πℤ.
///
/// The simple pole is split off as α/(l − k) with α = P(l)/D(l); the rest is
/// S(k)/D(k) with S = (P − αD)/(l − k) a polynomial.
pub fn lattice_sum_with_pole(num: &Poly, den: Denominator, l: i64, t: f64) -> Result<C64> {
    let lf = l as f64;
    let dl = den.eval(lf);
    if dl == 0.0 {
        return Err(Error::SingularPoint(format!("pole at k = {l} coincides with a root of the denominator")));
    }
    let t = reduce_angle(t);
    let alpha = num.eval(lf) / dl;
    let diff = num.add(&Poly::from_real(&den.coefficients()).scale(-alpha));
    let deg = diff.0.len();
    let mut quot = vec![ZERO; deg.saturating_sub(1)];
    let mut carry = ZERO;
    for i in (1..deg).rev() {
        carry = diff.0[i] + carry * lf;
        quot[i - 1] = -carry;
    }
    let s_poly = Poly(quot);
    let phase = C64::from_polar(1.0, lf * t);
    // Σ_{k≠l} e^{ikt}/(l − k) = −e^{ilt}·Σ_{m≠0} e^{imt}/m = −e^{ilt}·i(π − t).
    let pole = -alpha * phase * C64::new(0.0, PI - t);
    let smooth = lattice_sum(&s_poly, den, t, Approach::Principal) - s_poly.eval(lf) / dl * phase;
    Ok(pole + smooth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(num: &Poly, den: Denominator, t: f64, kmax: i64) -> C64 {
        let mut acc = ZERO;
        for k in -kmax..=kmax {
            if k == 0 && den.vanishes_at_zero() {
                continue;
            }
            let kf = k as f64;
            acc += num.eval(kf) / den.eval(kf) * C64::from_polar(1.0, kf * t);
        }
        acc
    }

    #[test]
    fn zeta_matches_known_forms() {
        for &t in &[0.3, 1.0, 3.0, 5.5] {
            let b2 = PI * PI / 3.0 - PI * t + t * t / 2.0;
            assert!((periodic_zeta(2, t) - C64::new(b2, 0.0)).norm() < 1e-13);
            assert!((periodic_zeta(1, t) - C64::new(0.0, PI - t)).norm() < 1e-13);
            let b4 = PI.powi(4) / 45.0 - PI * PI * t * t / 6.0 + PI * t.powi(3) / 6.0 - t.powi(4) / 24.0;
            assert!((periodic_zeta(4, t) - C64::new(b4, 0.0)).norm() < 1e-12);
            let c3 = 2.0 * (PI * PI * t / 6.0 - PI * t * t / 4.0 + t.powi(3) / 12.0);
            assert!((periodic_zeta(3, t) - C64::new(0.0, c3)).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_sums_against_brute_force() {
        for &b in &[0.0, 0.005, 0.3, 1.0, 17.0] {
            for &(m, j) in &[(1u32, 0u32), (1, 1), (2, 0), (2, 1)] {
                for &t in &[0.4, 2.0, 4.9] {
                    let mut acc = ZERO;
                    let kmax = 200_000i64;
                    for k in -kmax..=kmax {
                        if k == 0 {
                            continue;
                        }
                        let kf = k as f64;
                        acc += kf.powi(j as i32) / (kf * kf + b).powi(m as i32) * C64::from_polar(1.0, kf * t);
                    }
                    let got = basis_sum(b, m, j, t);
                    let tol = if (m, j) == (1, 1) { 1e-4 } else { 1e-9 };
                    assert!((got - acc).norm() < tol, "b={b} m={m} j={j} t={t}: {got} vs {acc}");
                }
            }
        }
    }

    #[test]
    fn rational_sums_distinct_and_degenerate() {
        let num = Poly(vec![C64::new(1.0, 0.5), C64::new(-0.3, 2.0), C64::new(0.7, 0.0), C64::new(0.0, 0.2)]);
        for den in [
            Denominator::new(3.0, 2.0, 0.4).unwrap(),
            Denominator::new(1.0, 1.5, 1.5).unwrap(),
            Denominator::new(2.0, 1.0, 0.0).unwrap(),
        ] {
            for &t in &[0.5, 3.1, 6.0] {
                let got = lattice_sum(&num, den, t, Approach::Principal);
                let want = brute(&num, den, t, 400_000);
                assert!((got - want).norm() < 2e-5, "{den:?} t={t}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn one_sided_limits() {
        let num = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let den = Denominator::new(1.0, 1.0, 2.0).unwrap();
        let above = lattice_sum(&num, den, 0.0, Approach::Above);
        let below = lattice_sum(&num, den, 0.0, Approach::Below);
        let near = lattice_sum(&num, den, 1e-7, Approach::Principal);
        assert!((above - near).norm() < 1e-6);
        // Σ k³/(...) ~ Σ 1/k jumps by 2πi across t = 0.
        assert!((above - below - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let p = lattice_sum(&num, den, 0.0, Approach::Principal);
        assert!(p.norm() < 1e-12);
    }

    #[test]
    fn quotient_part_is_discarded() {
        // (k⁴ + D)/D = 1 + k⁴/D: off t = 0 the constant contributes nothing.
        let den = Denominator::new(1.0, 1.0, 2.0).unwrap();
        let d = Poly::from_real(&den.coefficients());
        let num = d.add(&Poly::from_real(&[1.0]));
        let got = lattice_sum(&num, den, 1.3, Approach::Principal);
        let want = lattice_sum(&Poly::from_real(&[1.0]), den, 1.3, Approach::Principal);
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn pole_sum_against_brute_force() {
        let den = Denominator::new(1.0, 1.0, 0.5).unwrap();
        let num = Poly::from_real(&[1.0, 0.0, 2.0]);
        for l in [-3i64, 0, 2] {
            for &t in &[0.7, 4.0] {
                let got = lattice_sum_with_pole(&num, den, l, t).unwrap();
                let mut want = ZERO;
                for k in -300_000i64..=300_000 {
                    if k == l {
                        continue;
                    }
                    let kf = k as f64;
                    want += num.eval(kf) / (den.eval(kf) * (l as f64 - kf)) * C64::from_polar(1.0, kf * t);
                }
                assert!((got - want).norm() < 1e-4, "l={l} t={t}: {got} vs {want}");
            }
        }
    }
}
