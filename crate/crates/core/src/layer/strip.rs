//! Solver for the variable-coefficient operator at one transverse mode ξ′:
//! the x_n-dependence is discretized by Fourier collocation on nz points,
//! so multiplication by δV(x_n), δV₀(x_n) becomes a circulant in ξ_n.

use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::spectral::{fft_1d, mode_of_index};
use crate::stokes::{Coefficient, StokesParams};
use crate::{CMatrix, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative singular-value cutoff of the dense pseudoinverse.
const PINV_CUTOFF: f64 = 1e-12;

/// Discrete Fourier coefficients of the deviation c − c_base on nz points.
fn deviation_coefficients(c: &Coefficient, nz: usize) -> Option<Vec<C64>> {
    if c.is_constant() {
        return None;
    }
    let h = 2.0 * std::f64::consts::PI / nz as f64;
    let mut d: Vec<C64> = (0..nz).map(|j| C64::new(c.deviation(j as f64 * h), 0.0)).collect();
    fft_1d(&mut d, false);
    d.iter_mut().for_each(|z| *z /= nz as f64);
    Some(d)
}

/// The pressure Schur complement diag(d) + F diag(δV₀) F⁻¹, applied with
/// FFTs and inverted by preconditioned conjugate gradients. The operator
/// is Hermitian positive semidefinite because δV₀ ≥ 0 and d ≥ 0.
struct SchurOperator {
    diag: Vec<f64>,
    samples: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

/// Relative residual at which conjugate gradients stop.
const CG_TOLERANCE: f64 = 1e-14;

impl SchurOperator {
    fn new(diag: Vec<f64>, samples: Vec<f64>) -> Self {
        let nz = diag.len();
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(nz);
        let inverse = planner.plan_fft_inverse(nz);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self { diag, samples, forward, inverse, scratch: vec![ZERO; len] }
    }

    fn apply(&mut self, p: &[C64], out: &mut [C64]) {
        let nz = p.len();
        out.copy_from_slice(p);
        self.inverse.process_with_scratch(out, &mut self.scratch);
        for (o, d) in out.iter_mut().zip(&self.samples) {
            *o *= d / nz as f64;
        }
        self.forward.process_with_scratch(out, &mut self.scratch);
        for ((o, pk), d) in out.iter_mut().zip(p).zip(&self.diag) {
            *o += pk * d;
        }
    }

    fn dense(&mut self) -> CMatrix {
        let nz = self.diag.len();
        let mut m = DMatrix::zeros(nz, nz);
        let mut e = vec![ZERO; nz];
        let mut col = vec![ZERO; nz];
        for j in 0..nz {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
            e[j] = ZERO;
        }
        m
    }

    /// Jacobi-preconditioned CG; returns the solution, or None when the
    /// iteration stalls (singular or badly conditioned operator). The
    /// second value is the Lanczos estimate of the preconditioned
    /// condition number.
    fn cg(&mut self, b: &[C64]) -> (Option<Vec<C64>>, f64) {
        let nz = b.len();
        let mean = self.samples.iter().sum::<f64>() / nz as f64;
        let pre: Vec<f64> = self.diag.iter().map(|d| 1.0 / (d + mean).max(f64::MIN_POSITIVE)).collect();
        let bnorm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut x = vec![ZERO; nz];
        if bnorm == 0.0 {
            return (Some(x), 1.0);
        }
        let mut r = b.to_vec();
        let mut z: Vec<C64> = r.iter().zip(&pre).map(|(a, m)| a * m).collect();
        let mut d = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| (a.conj() * b).re).sum();
        let mut ad = vec![ZERO; nz];
        let (mut alphas, mut betas) = (Vec::new(), Vec::new());
        for _ in 0..4 * nz {
            self.apply(&d, &mut ad);
            let dad: f64 = d.iter().zip(&ad).map(|(a, b)| (a.conj() * b).re).sum();
            if dad <= 0.0 {
                return (None, f64::INFINITY);
            }
            let alpha = rz / dad;
            alphas.push(alpha);
            for k in 0..nz {
                x[k] += d[k] * alpha;
                r[k] -= ad[k] * alpha;
            }
            let rnorm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if rnorm <= CG_TOLERANCE * bnorm {
                return (Some(x), lanczos_condition(&alphas, &betas));
            }
            for k in 0..nz {
                z[k] = r[k] * pre[k];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| (a.conj() * b).re).sum();
            let beta = rz_new / rz;
            betas.push(beta);
            rz = rz_new;
            for k in 0..nz {
                d[k] = z[k] + d[k] * beta;
            }
        }
        (None, f64::INFINITY)
    }
}

/// Extreme-eigenvalue ratio of the Lanczos tridiagonal built from CG coefficients.
fn lanczos_condition(alphas: &[f64], betas: &[f64]) -> f64 {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = 1.0 / alphas[j] + if j > 0 { betas[j - 1] / alphas[j - 1] } else { 0.0 };
        if j + 1 < m {
            let off = betas[j].sqrt() / alphas[j];
            t[(j, j + 1)] = off;
            t[(j + 1, j)] = off;
        }
    }
    let ev = t.symmetric_eigenvalues();
    let max = ev.iter().copied().fold(0.0, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

enum Pressure {
    Iterative(std::sync::Mutex<SchurOperator>),
    Pinv(CMatrix),
}

impl Pressure {
    fn solve(&self, r: &CMatrix) -> CMatrix {
        match self {
            Pressure::Iterative(op) => {
                let mut op = op.lock().expect("schur operator lock");
                let b: Vec<C64> = r.iter().copied().collect();
                match op.cg(&b).0 {
                    Some(x) => DMatrix::from_column_slice(x.len(), 1, &x),
                    None => {
                        let pinv = pseudo_inverse(op.dense()).expect("pressure pseudoinverse");
                        pinv * r
                    }
                }
            }
            Pressure::Pinv(m) => m * r,
        }
    }
}

enum Factor {
    /// V constant: u eliminated mode by mode, pressure system factored.
    Schur { pressure: Pressure },
    /// V variable: pseudoinverse of the whole (n+1)nz system.
    Dense { pinv: CMatrix },
}

/// Factored collocation system for one ξ′.
pub struct StripSolver {
    n: usize,
    nz: usize,
    v: f64,
    waves: Vec<Vec<f64>>,
    factor: Factor,
    condition: f64,
}

fn a_plus(xi: &[f64], v: f64) -> CMatrix {
    let n = xi.len();
    let s: f64 = xi.iter().map(|x| x * x).sum();
    if s + v == 0.0 {
        return DMatrix::zeros(n, n);
    }
    DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        C64::new((d - xi[i] * xi[j] / (2.0 * s + v)) / (s + v), 0.0)
    })
}

fn circulant(d: &[C64], nz: usize) -> CMatrix {
    DMatrix::from_fn(nz, nz, |k, l| d[(k + nz - l) % nz])
}

/// The collocation and pressure matrices are Hermitian, so their
/// eigendecomposition gives condition numbers and pseudoinverses.
fn condition_of(m: &CMatrix) -> f64 {
    let (sv, _) = crate::linalg::hermitian_singular_pairs(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn pseudo_inverse(m: CMatrix) -> Result<CMatrix> {
    let defect = (&m - m.adjoint()).norm();
    if defect > 1e-10 * m.norm() {
        return Err(Error::Solver { message: format!("collocation matrix is not Hermitian (defect {defect:.3e})"), condition: f64::INFINITY });
    }
    Ok(crate::linalg::hermitian_pseudo_inverse(&m, PINV_CUTOFF))
}

/// Dense collocation matrix of Ξ at ξ′, ordered (component, ξ_n index).
pub fn collocation_matrix(params: &StokesParams, xi_t: &[f64], nz: usize) -> CMatrix {
    let n = xi_t.len() + 1;
    let reference = params.reference();
    let (v, v0) = (reference.v, reference.v0);
    let size = (n + 1) * nz;
    let mut m = DMatrix::zeros(size, size);
    for k in 0..nz {
        let mut xi = xi_t.to_vec();
        xi.push(mode_of_index(k, nz) as f64);
        let s: f64 = xi.iter().map(|x| x * x).sum();
        for i in 0..n {
            for j in 0..n {
                let d = if i == j { s + v } else { 0.0 };
                m[(i * nz + k, j * nz + k)] = C64::new(d + xi[i] * xi[j], 0.0);
            }
            m[(i * nz + k, n * nz + k)] = I * xi[i];
            m[(n * nz + k, i * nz + k)] = -I * xi[i];
        }
        m[(n * nz + k, n * nz + k)] = C64::new(-v0, 0.0);
    }
    if let Some(dv) = deviation_coefficients(&params.v, nz) {
        let cv = circulant(&dv, nz);
        for i in 0..n {
            for k in 0..nz {
                for l in 0..nz {
                    m[(i * nz + k, i * nz + l)] += cv[(k, l)];
                }
            }
        }
    }
    if let Some(d0) = deviation_coefficients(&params.v0, nz) {
        let c0 = circulant(&d0, nz);
        for k in 0..nz {
            for l in 0..nz {
                m[(n * nz + k, n * nz + l)] -= c0[(k, l)];
            }
        }
    }
    m
}

impl StripSolver {
    pub fn new(params: &StokesParams, xi_t: &[f64], nz: usize) -> Result<Self> {
        if !nz.is_power_of_two() || nz < 8 {
            return Err(Error::Argument(format!("collocation size {nz} must be a power of two >= 8")));
        }
        let n = xi_t.len() + 1;
        let reference = params.reference();
        let (v, v0) = (reference.v, reference.v0);
        let waves: Vec<Vec<f64>> = (0..nz)
            .map(|j| {
                let mut w = xi_t.to_vec();
                w.push(mode_of_index(j, nz) as f64);
                w
            })
            .collect();
        let dv = deviation_coefficients(&params.v, nz);
        let (factor, condition) = match dv {
            None => {
                let diag: Vec<f64> = waves
                    .iter()
                    .map(|xi| {
                        let ap = a_plus(xi, v);
                        let x = DMatrix::from_fn(n, 1, |i, _| C64::new(xi[i], 0.0));
                        (x.transpose() * &ap * &x)[(0, 0)].re + v0
                    })
                    .collect();
                let h = 2.0 * std::f64::consts::PI / nz as f64;
                let samples: Vec<f64> = (0..nz).map(|j| params.v0.deviation(j as f64 * h)).collect();
                let mut op = SchurOperator::new(diag, samples);
                // A probe solve decides between the iteration and a dense pseudoinverse.
                let probe: Vec<C64> = (0..nz).map(|k| C64::new(1.0, 0.0) / (1.0 + k as f64)).collect();
                match op.cg(&probe) {
                    (Some(_), cond) => (Factor::Schur { pressure: Pressure::Iterative(std::sync::Mutex::new(op)) }, cond),
                    (None, _) => {
                        let p = op.dense();
                        let cond = condition_of(&p);
                        (Factor::Schur { pressure: Pressure::Pinv(pseudo_inverse(p)?) }, cond)
                    }
                }
            }
            Some(_) => {
                let m = collocation_matrix(params, xi_t, nz);
                let cond = condition_of(&m);
                (Factor::Dense { pinv: pseudo_inverse(m)? }, cond)
            }
        };
        Ok(Self { n, nz, v, waves, factor, condition })
    }

    pub fn collocation(&self) -> usize {
        self.nz
    }

    /// 2-norm condition number of the factored system (pressure block on the Schur path).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Minimum-norm solution of Ξ w = r at this ξ′; `rhs` holds n+1
    /// components of nz coefficients each, in FFT order.
    pub fn solve(&self, rhs: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let (n, nz) = (self.n, self.nz);
        if rhs.len() != n + 1 || rhs.iter().any(|r| r.len() != nz) {
            return Err(Error::Dimension(format!("strip right-hand side must be {} x {nz}", n + 1)));
        }
        match &self.factor {
            Factor::Schur { pressure } => {
                let mut aps = Vec::with_capacity(nz);
                let mut rp = DMatrix::zeros(nz, 1);
                for (k, xi) in self.waves.iter().enumerate() {
                    let ap = a_plus(xi, self.v);
                    let ru = DMatrix::from_fn(n, 1, |i, _| rhs[i][k]);
                    let apr = &ap * ru;
                    let t: C64 = (0..n).map(|i| xi[i] * apr[(i, 0)]).sum();
                    rp[(k, 0)] = -rhs[n][k] - I * t;
                    aps.push((ap, apr));
                }
                let p = pressure.solve(&rp);
                let mut out = vec![vec![ZERO; nz]; n + 1];
                for (k, xi) in self.waves.iter().enumerate() {
                    let (ap, apr) = &aps[k];
                    let xv = DMatrix::from_fn(n, 1, |i, _| I * xi[i] * p[(k, 0)]);
                    let u = apr - ap * xv;
                    for i in 0..n {
                        out[i][k] = u[(i, 0)];
                    }
                    out[n][k] = p[(k, 0)];
                }
                Ok(out)
            }
            Factor::Dense { pinv } => {
                let r = DMatrix::from_fn((n + 1) * nz, 1, |i, _| rhs[i / nz][i % nz]);
                let w = pinv * r;
                Ok((0..=n).map(|c| (0..nz).map(|k| w[(c * nz + k, 0)]).collect()).collect())
            }
        }
    }

    /// Applies the collocation operator, for residual checks.
    pub fn apply(&self, params: &StokesParams, w: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let (n, nz) = (self.n, self.nz);
        let reference = params.reference();
        let mut out = vec![vec![ZERO; nz]; n + 1];
        let mult = |c: &Coefficient, f: &[C64]| -> Vec<C64> {
            match deviation_coefficients(c, nz) {
                None => vec![ZERO; nz],
                Some(d) => (0..nz).map(|k| (0..nz).map(|l| d[(k + nz - l) % nz] * f[l]).sum()).collect(),
            }
        };
        for (k, xi) in self.waves.iter().enumerate() {
            let s: f64 = xi.iter().map(|x| x * x).sum();
            let dot: C64 = (0..n).map(|j| xi[j] * w[j][k]).sum();
            for i in 0..n {
                out[i][k] = (s + reference.v) * w[i][k] + xi[i] * dot + I * xi[i] * w[n][k];
            }
            out[n][k] = -I * dot - reference.v0 * w[n][k];
        }
        for i in 0..n {
            let m = mult(&params.v, &w[i]);
            for k in 0..nz {
                out[i][k] += m[k];
            }
        }
        let m = mult(&params.v0, &w[n]);
        for k in 0..nz {
            out[n][k] -= m[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use rand::{Rng, SeedableRng};

    fn random_rhs(n: usize, nz: usize, seed: u64) -> Vec<Vec<C64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..=n)
            .map(|_| (0..nz).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect()
    }

    #[test]
    fn schur_and_dense_paths_solve_the_system() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let bump = Coefficient::exterior_bump(1.0, std::f64::consts::PI);
        let schur = StokesParams::new(grid, Coefficient::Constant(1.0), bump).unwrap();
        let dense = StokesParams::new(grid, bump, Coefficient::Constant(1.0)).unwrap();
        for params in [schur, dense] {
            for xi in [[0.0], [3.0]] {
                let solver = StripSolver::new(&params, &xi, 32).unwrap();
                let r = random_rhs(2, 32, 1);
                let w = solver.solve(&r).unwrap();
                let back = solver.apply(&params, &w);
                let err: f64 = back.iter().flatten().zip(r.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "{err}");
            }
        }
    }

    #[test]
    fn kernel_components_are_dropped() {
        // V = 0 with V₀ a bump: constant velocities span the kernel at ξ′ = 0.
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::new(
            grid,
            Coefficient::Constant(0.0),
            Coefficient::exterior_bump(1.0, std::f64::consts::PI),
        )
        .unwrap();
        let solver = StripSolver::new(&params, &[0.0], 32).unwrap();
        let mut r = random_rhs(2, 32, 2);
        r[0][0] = ZERO;
        r[1][0] = ZERO;
        let w = solver.solve(&r).unwrap();
        assert_eq!(w[0][0], ZERO);
        assert_eq!(w[1][0], ZERO);
        let back = solver.apply(&params, &w);
        let err: f64 = back.iter().flatten().zip(r.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
