//! Per-transverse-mode x_n-profiles of the constant-coefficient operator:
//! rational functions of ξ_n = k summed in closed form over k ∈ ℤ.
//!
//! For a fixed ξ′ the inverse of the full symbol is N(k)/D(k) with
//! D(k) = q₁q₂, q₁ = |ξ|²+V and q₂ = (2V₀+1)|ξ|² + V₀V, and N the adjugate
//! blocks written as polynomials in k.

use std::f64::consts::PI;

use crate::density::Component;
use crate::error::Result;
use crate::lattice::{Approach, Denominator, LatticeKernel, Poly, PolyMatrix};
use crate::symbols::{full_inverse, zero_block_pinv, StokesSymbolParams};
use crate::{CMatrix, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Distribution placed on a boundary component before applying Ξ^{(−1)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// (h, 0)δ_Γ.
    Single,
    /// T̃_ν*(hδ_Γ) = (−2D_ν*(hδ_Γ), (ν·h)δ_Γ) with ν the outer normal of the component.
    Double(Component),
    /// A volume source F with all n+1 components, so that the profile is Ξ^{(−1)} itself.
    Volume,
}

/// Quantity read off the potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Evaluator {
    /// The velocity and pressure, n+1 rows.
    Field,
    /// T_ν = −2D_ν u + pν with ν the outer normal of the given component, n rows.
    Conormal(Component),
    /// ∂_n^j of the velocity and pressure, n+1 rows.
    Derivative(u32),
}

impl Evaluator {
    pub fn rows(self, n: usize) -> usize {
        match self {
            Evaluator::Field | Evaluator::Derivative(_) => n + 1,
            Evaluator::Conormal(_) => n,
        }
    }
}

/// Closed-form machinery for one transverse frequency ξ′.
#[derive(Clone, Debug)]
pub struct ModeOperator {
    params: StokesSymbolParams,
    xi_t: Vec<f64>,
    n: usize,
    den: Denominator,
    inverse: PolyMatrix,
}

fn xi_poly(xi_t: &[f64], j: usize) -> Poly {
    if j < xi_t.len() {
        Poly::constant(C64::new(xi_t[j], 0.0))
    } else {
        Poly::monomial(C64::new(1.0, 0.0), 1)
    }
}

impl ModeOperator {
    pub fn new(params: StokesSymbolParams, xi_t: &[f64]) -> Result<Self> {
        let n = xi_t.len() + 1;
        let q: f64 = xi_t.iter().map(|x| x * x).sum();
        let (v, v0) = (params.v, params.v0);
        let lead = 2.0 * v0 + 1.0;
        let den = Denominator::new(lead, q + v, q + v0 * v / lead)?;
        let q1 = Poly::from_real(&[q + v, 0.0, 1.0]);
        let q2 = Poly::from_real(&[lead * q + v0 * v, 0.0, lead]);
        let mut inverse = PolyMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                let mut a = xi_poly(xi_t, i).mul(&xi_poly(xi_t, j)).scale(C64::new(-(v0 + 1.0), 0.0));
                if i == j {
                    a = a.add(&q2);
                }
                inverse.set(i, j, a);
            }
            inverse.set(i, n, xi_poly(xi_t, i).mul(&q1).scale(I));
            inverse.set(n, i, xi_poly(xi_t, i).mul(&q1).scale(-I));
        }
        inverse.set(n, n, Poly::from_real(&[2.0 * q + v, 0.0, 2.0]).mul(&q1).scale(C64::new(-1.0, 0.0)));
        Ok(Self { params, xi_t: xi_t.to_vec(), n, den, inverse })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transverse(&self) -> &[f64] {
        &self.xi_t
    }

    pub fn params(&self) -> StokesSymbolParams {
        self.params
    }

    pub fn denominator(&self) -> Denominator {
        self.den
    }

    /// Source matrix as polynomials in k, (n+1)×n, or (n+1)×(n+1) for a volume source.
    pub fn source_poly(&self, src: Source) -> PolyMatrix {
        let n = self.n;
        if src == Source::Volume {
            let mut m = PolyMatrix::zeros(n + 1, n + 1);
            for i in 0..=n {
                m.set(i, i, Poly::constant(C64::new(1.0, 0.0)));
            }
            return m;
        }
        let mut m = PolyMatrix::zeros(n + 1, n);
        match src {
            Source::Volume => unreachable!(),
            Source::Single => {
                for i in 0..n {
                    m.set(i, i, Poly::constant(C64::new(1.0, 0.0)));
                }
            }
            Source::Double(c) => {
                // i((ξ·ν)I + νξᵀ) over (ν·h) with ν = s e_n.
                let s = c.normal_sign();
                for i in 0..n {
                    for j in 0..n {
                        let mut p = Poly::zero();
                        if i == j {
                            p = p.add(&Poly::monomial(I * s, 1));
                        }
                        if i == n - 1 {
                            p = p.add(&xi_poly(&self.xi_t, j).scale(I * s));
                        }
                        m.set(i, j, p);
                    }
                }
                m.set(n, n - 1, Poly::constant(C64::new(s, 0.0)));
            }
        }
        m
    }

    /// Evaluator matrix as polynomials in k.
    pub fn evaluator_poly(&self, ev: Evaluator) -> PolyMatrix {
        let n = self.n;
        match ev {
            Evaluator::Field => {
                let mut m = PolyMatrix::zeros(n + 1, n + 1);
                for i in 0..=n {
                    m.set(i, i, Poly::constant(C64::new(1.0, 0.0)));
                }
                m
            }
            Evaluator::Derivative(j) => {
                let mut m = PolyMatrix::zeros(n + 1, n + 1);
                for i in 0..=n {
                    m.set(i, i, Poly::monomial(I.powu(j), j as usize));
                }
                m
            }
            Evaluator::Conormal(c) => {
                // −i((ξ·ν)I + ξνᵀ) on u, ν on p.
                let s = c.normal_sign();
                let mut m = PolyMatrix::zeros(n, n + 1);
                for i in 0..n {
                    for j in 0..n {
                        let mut p = Poly::zero();
                        if i == j {
                            p = p.add(&Poly::monomial(-I * s, 1));
                        }
                        if j == n - 1 {
                            p = p.add(&xi_poly(&self.xi_t, i).scale(-I * s));
                        }
                        m.set(i, j, p);
                    }
                }
                m.set(n - 1, n, Poly::constant(C64::new(s, 0.0)));
                m
            }
        }
    }

    /// Closed-form kernel of Σ_k E(k)N(k)S(k)/D(k)·e^{ikt}.
    pub fn kernel(&self, src: Source, ev: Evaluator) -> ModeKernel {
        let num = self.evaluator_poly(ev).mul(&self.inverse).mul(&self.source_poly(src));
        let lattice = LatticeKernel::new(&num, self.den);
        let zero = if self.den.vanishes_at_zero() {
            let e = self.evaluator_poly(ev).eval(0.0);
            let s = self.source_poly(src).eval(0.0);
            Some(e * zero_block_pinv(&self.params, self.n) * s)
        } else {
            None
        };
        ModeKernel { lattice, zero }
    }

    /// Full wave vector (ξ′, k).
    pub fn wave(&self, k: f64) -> Vec<f64> {
        let mut xi = self.xi_t.clone();
        xi.push(k);
        xi
    }

    /// Single lattice term (2π)⁻¹E(k)M(ξ′,k)⁺S(k), for direct mode sums.
    pub fn term(&self, src: Source, ev: Evaluator, k: i64) -> CMatrix {
        let kf = k as f64;
        let e = self.evaluator_poly(ev).eval(kf);
        let s = self.source_poly(src).eval(kf);
        e * full_inverse(&self.params, &self.wave(kf)) * s * C64::new(1.0 / (2.0 * PI), 0.0)
    }
}

/// A lattice kernel together with the k = 0 term of the pseudoinverse
/// when the denominator vanishes there.
#[derive(Clone, Debug)]
pub struct ModeKernel {
    lattice: LatticeKernel,
    zero: Option<CMatrix>,
}

impl ModeKernel {
    /// (2π)⁻¹ Σ_k E(k)M⁺(k)S(k) e^{ikt} off t ∈ 2πℤ, or its limit selected by `approach`.
    pub fn eval(&self, t: f64, approach: Approach) -> CMatrix {
        let mut m = self.lattice.eval(t, approach);
        if let Some(z) = &self.zero {
            m += z;
        }
        m * C64::new(1.0 / (2.0 * PI), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::mode_sum_richardson;

    fn brute(op: &ModeOperator, src: Source, ev: Evaluator, t: f64) -> CMatrix {
        let term = |k: i64| op.term(src, ev, k) * C64::from_polar(1.0, k as f64 * t);
        // Offsets are rational multiples of 2π with denominators dividing the
        // cutoffs, so the tails expand in powers of 1/Λ.
        mode_sum_richardson(term, 420, 4).unwrap().value
    }

    #[test]
    fn kernels_match_direct_sums() {
        let cases = [(1.0, 1.0, vec![2.0]), (1.0, 0.0, vec![0.0]), (0.0, 0.0, vec![1.0]), (0.5, 2.0, vec![1.0, -2.0])];
        for (v, v0, xi) in cases {
            let p = StokesSymbolParams::new(v, v0).unwrap();
            let op = ModeOperator::new(p, &xi).unwrap();
            for src in [Source::Single, Source::Double(Component::Lower), Source::Double(Component::Upper)] {
                for ev in [Evaluator::Field, Evaluator::Conormal(Component::Upper)] {
                    if matches!((src, ev), (Source::Double(_), Evaluator::Conormal(_))) {
                        continue;
                    }
                    for t in [2.0 * PI / 5.0, 4.0 * PI / 7.0, -2.0 * PI / 3.0] {
                        let a = op.kernel(src, ev).eval(t, Approach::Principal);
                        let b = brute(&op, src, ev, t);
                        assert!((&a - &b).norm() < 1e-8, "v={v} v0={v0} xi={xi:?} {src:?} {ev:?} t={t}: {}", (&a - &b).norm());
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_polynomials_reproduce_full_inverse() {
        let p = StokesSymbolParams::new(0.3, 1.7).unwrap();
        let op = ModeOperator::new(p, &[1.5, -0.5]).unwrap();
        for k in [-3.0, 0.0, 2.5] {
            let num = op.inverse.eval(k);
            let d = op.den.eval(k);
            let direct = full_inverse(&p, &op.wave(k));
            assert!((num / C64::new(d, 0.0) - direct).norm() < 1e-13);
        }
    }
}
