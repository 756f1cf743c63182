//! Adaptive Gauss–Kronrod quadrature over the real line, Fourier-weighted
//! integrals with cycle-wise epsilon acceleration, and Gauss–Legendre rules.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and hints for [`line_quadrature`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance.
    pub abs_tol: f64,
    /// Relative tolerance.
    pub rel_tol: f64,
    /// Maximum number of interval bisections.
    pub max_subdivisions: usize,
    /// The integrand decays like |ξ|^m.
    pub decay_order: i32,
    /// Length scale of the integrand's bulk.
    pub scale: f64,
    /// Integrate the even part f(ξ) + f(−ξ) over [0, ∞) instead of f over ℝ.
    pub symmetrize: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
            decay_order: -2,
            scale: 1.0,
            symmetrize: false,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Argument("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::Argument("at least 16 subdivisions are required".into()));
        }
        if !(self.scale > 0.0) {
            return Err(Error::Argument("quadrature scale must be positive".into()));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn gk15<F>(f: &F, a: f64, b: f64, dim: usize) -> Panel
where
    F: Fn(f64, &mut [Complex64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    let mut abs_sum = 0.0;
    f(c, &mut buf);
    for d in 0..dim {
        kron[d] += WGK[7] * buf[d];
        gauss[d] += WG[3] * buf[d];
        abs_sum += WGK[7] * buf[d].norm();
    }
    let mut buf2 = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..7 {
        let dx = h * XGK[j];
        f(c - dx, &mut buf);
        f(c + dx, &mut buf2);
        for d in 0..dim {
            let s = buf[d] + buf2[d];
            kron[d] += WGK[j] * s;
            abs_sum += WGK[j] * (buf[d].norm() + buf2[d].norm());
            if j % 2 == 1 {
                gauss[d] += WG[j / 2] * s;
            }
        }
    }
    let mut diff: f64 = 0.0;
    for d in 0..dim {
        kron[d] *= h;
        diff = diff.max((kron[d] - gauss[d] * h).norm());
    }
    let abs_sum = abs_sum * h.abs() / dim as f64;
    let mut error = diff;
    if abs_sum > 0.0 && error > 0.0 {
        error = abs_sum * (200.0 * error / abs_sum).powf(1.5).min(1.0);
        error = error.max(diff * 1e-3);
    }
    Panel { a, b, value: kron, error }
}

/// Adaptive vector-valued integral over [a, b].
pub fn integrate_interval<F>(
    f: &F,
    a: f64,
    b: f64,
    dim: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(f64, &mut [Complex64]),
{
    let mut panels = vec![gk15(f, a, b, dim)];
    let mut subdivisions = 0;
    loop {
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        let mut err = 0.0;
        for p in &panels {
            for d in 0..dim {
                total[d] += p.value[d];
            }
            err += p.error;
        }
        let size = total.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if err <= abs_tol.max(rel_tol * size) {
            return Ok((total, err));
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::Quadrature { subdivisions, estimate: err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            return Err(Error::Quadrature { subdivisions, estimate: err });
        }
        panels.push(gk15(f, p.a, mid, dim));
        panels.push(gk15(f, mid, p.b, dim));
        subdivisions += 1;
    }
}

/// Vector-valued ∫_ℝ f(ξ) dξ through the algebraic map ξ = L·u/(1−u²).
///
/// With `symmetrize`, integrates f(ξ) + f(−ξ) over [0, ∞) through
/// ξ = L·u/(1−u), which admits odd leading terms of order −1.
pub fn line_quadrature_vec<F>(f: &F, dim: usize, spec: &QuadratureSpec) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &mut [Complex64]),
{
    spec.validate()?;
    let l = spec.scale;
    if spec.symmetrize {
        if spec.decay_order > -1 {
            return Err(Error::Argument("even part must decay at least like |ξ|^-1".into()));
        }
        let g = |u: f64, out: &mut [Complex64]| {
            let one_m = 1.0 - u;
            let x = l * u / one_m;
            let jac = l / (one_m * one_m);
            let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
            f(x, out);
            f(-x, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o = (*o + *t) * jac;
            }
        };
        return integrate_interval(&g, 0.0, 1.0, dim, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
            .map(|(v, _)| v);
    }
    if spec.decay_order > -2 {
        return Err(Error::Argument(
            "integrand must decay like |ξ|^-2 unless the symmetrized form is requested".into(),
        ));
    }
    let g = |u: f64, out: &mut [Complex64]| {
        let d = 1.0 - u * u;
        let x = l * u / d;
        let jac = l * (1.0 + u * u) / (d * d);
        f(x, out);
        for o in out.iter_mut() {
            *o *= jac;
        }
    };
    integrate_interval(&g, -1.0, 1.0, dim, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
        .map(|(v, _)| v)
}

/// Scalar ∫_ℝ f(ξ) dξ.
pub fn line_quadrature<F>(f: F, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let g = |x: f64, out: &mut [Complex64]| out[0] = f(x);
    line_quadrature_vec(&g, 1, spec).map(|v| v[0])
}

/// Vector-valued ∫_ℝ e^{itξ} f(ξ) dξ for t ≠ 0.
///
/// The half-line integrals are split at multiples of the half period π/|t|;
/// the partial sums are accelerated with Wynn's epsilon algorithm.
pub fn fourier_quadrature_vec<F>(
    f: &F,
    t: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &mut [Complex64]),
{
    spec.validate()?;
    if t == 0.0 {
        return Err(Error::Argument("Fourier quadrature needs t != 0".into()));
    }
    let g = |x: f64, out: &mut [Complex64]| {
        let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
        f(x, out);
        f(-x, &mut tmp);
        let e = Complex64::from_polar(1.0, t * x);
        let ec = e.conj();
        for (o, m) in out.iter_mut().zip(&tmp) {
            *o = *o * e + *m * ec;
        }
    };
    let half = PI / t.abs();
    let cycles0 = (4.0 * spec.scale / half).ceil().max(1.0);
    let x0 = cycles0 * half;
    let sub_tol = spec.abs_tol * 0.1;
    let (first, _) = integrate_interval(&g, 0.0, x0, dim, sub_tol, spec.rel_tol * 0.1, spec.max_subdivisions)?;
    let mut partial: Vec<Vec<Complex64>> = vec![first.clone()];
    let mut running = first;
    let mut last: Option<Vec<Complex64>> = None;
    let mut stable = 0;
    let max_cycles = 400;
    for j in 0..max_cycles {
        let a = x0 + j as f64 * half;
        let (piece, _) =
            integrate_interval(&g, a, a + half, dim, sub_tol, spec.rel_tol * 0.1, spec.max_subdivisions)?;
        for d in 0..dim {
            running[d] += piece[d];
        }
        partial.push(running.clone());
        if partial.len() < 6 {
            continue;
        }
        let est: Vec<Complex64> = (0..dim)
            .map(|d| {
                let seq: Vec<Complex64> = partial.iter().map(|v| v[d]).collect();
                wynn_epsilon(&seq)
            })
            .collect();
        if let Some(prev) = &last {
            let diff = est.iter().zip(prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let size = est.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if diff <= spec.abs_tol.max(spec.rel_tol * size) {
                stable += 1;
                if stable >= 2 {
                    return Ok(est);
                }
            } else {
                stable = 0;
            }
        }
        last = Some(est);
        if partial.len() > 40 {
            partial.remove(0);
        }
    }
    let estimate = last
        .map(|v| v.iter().map(|z| z.norm()).fold(0.0, f64::max) * spec.rel_tol)
        .unwrap_or(f64::INFINITY);
    Err(Error::Quadrature { subdivisions: max_cycles, estimate })
}

/// Wynn's epsilon algorithm; returns the deepest even-column entry.
pub fn wynn_epsilon(s: &[Complex64]) -> Complex64 {
    let n = s.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut prev = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() < 1e-300 {
                return if k % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            best = *cur.last().expect("non-empty column");
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule on [a, b], graded geometrically toward
/// both ends to resolve boundary layers.
pub fn graded_rule(a: f64, b: f64, order: usize, levels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let mut cuts = vec![a];
    for l in (1..=levels).rev() {
        cuts.push(a + (mid - a) * 0.5f64.powi(l as i32));
    }
    cuts.push(mid);
    for l in 1..=levels {
        cuts.push(b - (b - mid) * 0.5f64.powi(l as i32));
    }
    cuts.push(b);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let h = 0.5 * (hi - lo);
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(lo + h * (x + 1.0));
            ws.push(h * w);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_integrals() {
        let spec = QuadratureSpec::default();
        for &a in &[0.5, 1.0, 2.0, 10.0] {
            let s = QuadratureSpec { scale: a, ..spec };
            let i1 = line_quadrature(|x| Complex64::new(x * x / (a * a + x * x).powi(2), 0.0), &s).unwrap();
            let i2 = line_quadrature(|x| Complex64::new(1.0 / (a * a + x * x).powi(2), 0.0), &s).unwrap();
            let i3 = line_quadrature(|x| Complex64::new(1.0 / (a * a + x * x), 0.0), &s).unwrap();
            assert!((i1.re - PI / (2.0 * a)).abs() < 1e-10 * PI / (2.0 * a));
            assert!((i2.re - PI / (2.0 * a.powi(3))).abs() < 1e-10 * PI / (2.0 * a.powi(3)));
            assert!((i3.re - PI / a).abs() < 1e-10 * PI / a);
        }
    }

    #[test]
    fn fourier_integral_of_lorentzian() {
        let spec = QuadratureSpec::default();
        let f = |x: f64, out: &mut [Complex64]| out[0] = Complex64::new(1.0 / (1.0 + x * x), 0.0);
        for &t in &[1.0, 0.1, -0.3] {
            let v = fourier_quadrature_vec(&f, t, 1, &spec).unwrap()[0];
            let want = PI * (-(t as f64).abs()).exp();
            assert!((v - want).norm() < 1e-9, "t={t}: {v} vs {want}");
        }
    }

    #[test]
    fn fourier_integral_of_odd_order_minus_one() {
        let spec = QuadratureSpec::default();
        let f = |x: f64, out: &mut [Complex64]| out[0] = Complex64::new(x / (1.0 + x * x), 0.0);
        for &t in &[0.5, -0.05] {
            let v = fourier_quadrature_vec(&f, t, 1, &spec).unwrap()[0];
            let want = Complex64::new(0.0, PI * t.signum() * (-t.abs()).exp());
            assert!((v - want).norm() < 1e-8, "t={t}: {v} vs {want}");
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let (x, w) = graded_rule(0.0, PI, 12, 6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-40.0 * x).exp()).sum();
        assert!((s - (1.0 - (-40.0 * PI).exp()) / 40.0).abs() < 1e-14);
    }
}
