//! Randomized invariants of the linear algebra, the symbols and the
//! discrete boundary operators.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stokeslp_core::bvp::{compare_solutions, solve_dirichlet, DirichletProblem, Route};
use stokeslp_core::density::BoundaryDensity;
use stokeslp_core::layer::BoundarySystem;
use stokeslp_core::linalg::{pseudo_inverse, singular_values};
use stokeslp_core::spectral::{line_quadrature, QuadratureSpec, TorusGrid};
use stokeslp_core::stokes::{Coefficient, StokesParams};
use stokeslp_core::symbols::{stokes_symbol, stokes_symbol_inverse, StokesSymbolParams};
use stokeslp_core::{CMatrix, C64};

fn constant_system() -> &'static BoundarySystem {
    static S: OnceLock<BoundarySystem> = OnceLock::new();
    S.get_or_init(|| BoundarySystem::new(&StokesParams::constant(TorusGrid::new(2, 16).unwrap(), 1.0, 1.0).unwrap()).unwrap())
}

fn bump_system() -> &'static BoundarySystem {
    static S: OnceLock<BoundarySystem> = OnceLock::new();
    S.get_or_init(|| {
        let grid = TorusGrid::new(2, 16).unwrap();
        let params = StokesParams::new(grid, Coefficient::Constant(1.0), Coefficient::exterior_bump(1.0, PI)).unwrap();
        BoundarySystem::new(&params).unwrap()
    })
}

fn density(system: &BoundarySystem, seed: u64) -> BoundaryDensity {
    let grid = system.params().grid;
    BoundaryDensity::random_band_limited(&grid, grid.dim(), 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A rows×cols complex matrix of the given rank built as a product of factors.
fn low_rank(rows: usize, cols: usize, rank: usize, entries: &[f64]) -> CMatrix {
    let mut it = entries.iter().cycle();
    let mut next = || C64::new(*it.next().unwrap(), *it.next().unwrap());
    let a = DMatrix::from_fn(rows, rank, |_, _| next());
    let b = DMatrix::from_fn(rank, cols, |_, _| next());
    a * b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pseudo_inverse_satisfies_penrose_conditions(
        rows in 1usize..6,
        cols in 1usize..6,
        rank in 1usize..6,
        entries in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let rank = rank.min(rows).min(cols);
        let b = low_rank(rows, cols, rank, &entries);
        prop_assume!(singular_values(&b).iter().rev().take(rank).all(|&s| s > 1e-3));
        let p = pseudo_inverse(&b, 1e-10);
        let scale = norm(&b).max(1.0) * norm(&p).max(1.0);
        prop_assert!(norm(&(&b * &p * &b - &b)) < 1e-10 * scale * norm(&b));
        prop_assert!(norm(&(&p * &b * &p - &p)) < 1e-10 * scale * norm(&p));
        let bp = &b * &p;
        let pb = &p * &b;
        prop_assert!(norm(&(&bp - bp.adjoint())) < 1e-10 * scale);
        prop_assert!(norm(&(&pb - pb.adjoint())) < 1e-10 * scale);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(
        rows in 1usize..6,
        cols in 1usize..6,
        entries in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let b = low_rank(rows, cols, rows.min(cols), &entries);
        let got = singular_values(&b);
        let gram = if rows >= cols { b.adjoint() * &b } else { &b * b.adjoint() };
        let mut want: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect();
        want.sort_by(f64::total_cmp);
        let top = want.last().copied().unwrap_or(0.0).max(1.0);
        prop_assert_eq!(got.len(), rows.min(cols));
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-7 * top, "{} vs {}", g, w);
        }
    }

    #[test]
    fn stokes_symbol_is_hermitian_and_exactly_inverted(
        v0 in 0.0f64..20.0,
        xi in prop::collection::vec(-30.0f64..30.0, 2..=3),
    ) {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(r > 0.1);
        let p = StokesSymbolParams::new(1.0, v0).unwrap();
        let a = stokes_symbol(&p, &xi);
        prop_assert!(norm(&(&a - a.adjoint())) == 0.0);
        let e = &a * stokes_symbol_inverse(&p, &xi).unwrap() - CMatrix::identity(xi.len() + 1, xi.len() + 1);
        prop_assert!(norm(&e) < 1e-12);
    }

    #[test]
    fn lorentzian_integral_matches_residue_value(a in 0.3f64..20.0) {
        let spec = QuadratureSpec { scale: a, ..QuadratureSpec::default() };
        let got = line_quadrature(|x| C64::new(1.0 / (a * a + x * x), 0.0), &spec).unwrap();
        prop_assert!((got.re - PI / a).abs() < 1e-10 * PI / a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn boundary_operators_are_linear(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let sys = constant_system();
        let (h, g) = (density(sys, seed), density(sys, seed ^ 0x5555));
        let alpha = C64::new(re, im);
        let mut combo = g.clone();
        combo.axpy(alpha, &h).unwrap();
        for op in [&sys.k, &sys.s, &sys.kstar] {
            let mut want = op.apply(&g).unwrap();
            want.axpy(alpha, &op.apply(&h).unwrap()).unwrap();
            let got = op.apply(&combo).unwrap();
            prop_assert!(got.sub(&want).unwrap().l2_norm() < 1e-12 * (1.0 + want.l2_norm()));
        }
    }

    #[test]
    fn single_layer_operator_is_self_adjoint(seed in any::<u64>()) {
        for sys in [constant_system(), bump_system()] {
            let (h, g) = (density(sys, seed), density(sys, seed.wrapping_add(1)));
            let lhs = sys.s.apply(&h).unwrap().inner(&g).unwrap();
            let rhs = h.inner(&sys.s.apply(&g).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn k_and_k_star_are_adjoint(seed in any::<u64>()) {
        for sys in [constant_system(), bump_system()] {
            let (h, g) = (density(sys, seed), density(sys, seed.wrapping_add(7)));
            let lhs = sys.k.apply(&h).unwrap().inner(&g).unwrap();
            let rhs = h.inner(&sys.kstar.apply(&g).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-8 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn normal_projection_is_orthogonal_and_idempotent(seed in any::<u64>()) {
        let sys = constant_system();
        let grid = sys.params().grid;
        let nu = BoundaryDensity::normal(&grid);
        let p = density(sys, seed).project_out_normal().unwrap();
        prop_assert!(p.inner(&nu).unwrap().norm() < 1e-12 * (1.0 + p.l2_norm()));
        let twice = p.project_out_normal().unwrap();
        prop_assert!(twice.sub(&p).unwrap().l2_norm() < 1e-13 * (1.0 + p.l2_norm()));
    }

    #[test]
    fn half_plus_k_range_is_orthogonal_to_the_normal_when_v0_vanishes_inside(seed in any::<u64>()) {
        let sys = bump_system();
        let nu = BoundaryDensity::normal(&sys.params().grid);
        let h = density(sys, seed);
        let image = sys.k.shifted(0.5).unwrap().apply(&h).unwrap();
        prop_assert!(image.inner(&nu).unwrap().norm() < 1e-8 * h.l2_norm() * nu.l2_norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn both_routes_give_the_same_solution(seed in any::<u64>()) {
        for sys in [constant_system(), bump_system()] {
            let params = sys.params();
            let mut f = density(sys, seed);
            if params.assumptions().v0_zero_inside {
                f = f.project_out_normal().unwrap();
            }
            let problem = DirichletProblem::new(params, f);
            let dl = solve_dirichlet(sys, &problem, Route::DoubleLayer).unwrap();
            let sl = solve_dirichlet(sys, &problem, Route::SingleLayer).unwrap();
            let cmp = compare_solutions(&dl, &sl).unwrap();
            prop_assert!(cmp.velocity < 1e-6, "{:?}", cmp.velocity);
            prop_assert!(cmp.pressure_up_to_constant < 1e-6);
            prop_assert!(dl.diagnostics.trace_error < 1e-8 && sl.diagnostics.trace_error < 1e-8);
        }
    }
}
