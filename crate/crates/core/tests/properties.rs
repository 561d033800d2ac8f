//! Structural invariants checked over random inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use nlslab::diagnostics::{self, blowup_time_bound};
use nlslab::geometry::{Manifold, RadialGrid};
use nlslab::solver::{Stepper, WaveState};
use nlslab::weight::{self, WeightFunction};

fn manifold(which: u8) -> Manifold {
    match which % 5 {
        0 => Manifold::sphere_cap(2).unwrap(),
        1 => Manifold::sphere_cap(3).unwrap(),
        2 => Manifold::hyperbolic(3, 4.0).unwrap(),
        3 => Manifold::euclidean(2, 2.0).unwrap(),
        _ => Manifold::sphere_full(2).unwrap(),
    }
}

fn setup(which: u8) -> (Manifold, RadialGrid, WeightFunction) {
    let m = manifold(which);
    let g = RadialGrid::new(&m, 32).unwrap();
    let w = weight::build(&m, &g).unwrap();
    (m, g, w)
}

fn field() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_self_adjoint(which in 0u8..5, f in field(), g in field()) {
        let (_, grid, _) = setup(which);
        let lf = grid.laplacian(&f).unwrap();
        let lg = grid.laplacian(&g).unwrap();
        let a = grid.inner_product(&lf, &g).unwrap();
        let b = grid.inner_product(&f, &lg).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn laplacian_is_negative_with_gradient_form(which in 0u8..5, f in field()) {
        let (_, grid, _) = setup(which);
        let lf = grid.laplacian(&f).unwrap();
        let q = grid.inner_product(&lf, &f).unwrap();
        let g = grid.grad_norm_sq(&f).unwrap();
        prop_assert!(q.re <= 1e-12);
        prop_assert!(rel(-q.re, g) < 1e-10);
    }

    #[test]
    fn inner_product_is_hermitian(which in 0u8..5, f in field(), g in field()) {
        let (_, grid, _) = setup(which);
        let a = grid.inner_product(&f, &g).unwrap();
        let b = grid.inner_product(&g, &f).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
    }

    #[test]
    fn diagnostics_are_phase_invariant(which in 0u8..5, f in field(), alpha in 0.0f64..std::f64::consts::TAU, p in 2.0f64..6.0) {
        let (_, grid, w) = setup(which);
        let phase = Complex64::from_polar(1.0, alpha);
        let a = diagnostics::record(&WaveState::new(f.clone(), p), &w, &grid).unwrap();
        let rotated: Vec<Complex64> = f.iter().map(|z| z * phase).collect();
        let b = diagnostics::record(&WaveState::new(rotated, p), &w, &grid).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            if x.is_finite() {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn gradient_norm_is_quadratic(which in 0u8..5, f in field(), s in -3.0f64..3.0) {
        let (_, grid, _) = setup(which);
        let scaled: Vec<Complex64> = f.iter().map(|z| z * s).collect();
        let a = grid.grad_norm_sq(&scaled).unwrap();
        let b = s * s * grid.grad_norm_sq(&f).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn one_step_conserves_mass(which in 0u8..4, f in field(), p in 2.0f64..6.0, dt in 1e-4f64..1e-2) {
        let (_, grid, _) = setup(which);
        let mut state = WaveState::new(f, p);
        let m0 = grid.norm_sq(&state.u);
        Stepper::new(&grid, p, dt, 1e-10, true).step(&mut state).unwrap();
        prop_assert!(rel(grid.norm_sq(&state.u), m0) < 1e-12);
    }

    #[test]
    fn virial_weight_increases(which in 0u8..4) {
        let (_, _, w) = setup(which);
        prop_assert!(w.rho().windows(2).all(|p| p[1] > p[0]));
        prop_assert!(w.drho().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn hessian_bound_dominates_grid(which in 0u8..5) {
        let (m, grid, w) = setup(which);
        let c = weight::hessian_bound(&w, &m, &grid);
        for (j, &r) in grid.centers().iter().enumerate() {
            let (h, dh) = m.warp_eval(r).unwrap();
            prop_assert!(w.d2rho()[j] <= c + 1e-12);
            prop_assert!(w.drho()[j] * dh / h <= c + 1e-12);
        }
    }

    #[test]
    fn existence_bound_grows_with_initial_jprime(j0 in 0.1f64..10.0, e0 in -10.0f64..-0.01,
                                                  c in 0.1f64..2.0, a in -5.0f64..5.0, d in 0.01f64..5.0) {
        let t1 = blowup_time_bound(j0, a, e0, c).unwrap();
        let t2 = blowup_time_bound(j0, a + d, e0, c).unwrap();
        prop_assert!(t1 > 0.0 && t2 > t1);
        let q = j0 + a * t1 + 2.0 * c * e0 * t1 * t1;
        prop_assert!(q.abs() <= 1e-9 * (j0 + a.abs() * t1 + 2.0 * c * e0.abs() * t1 * t1));
    }
}

#[test]
fn hessian_eigenvalues_off_grid() {
    let m = Manifold::hyperbolic(3, 4.0).unwrap();
    let grid = RadialGrid::new(&m, 32).unwrap();
    let w = weight::build(&m, &grid).unwrap();
    let c = weight::hessian_bound(&w, &m, &grid);
    for r in [0.0, 0.013, 0.5, 1.7, 3.999] {
        let (radial, tangential) = weight::hessian_eigenvalues(&w, &m, r).unwrap();
        assert!(radial <= c + 1e-12 && tangential <= c + 1e-12 && tangential >= 1.0 / 3.0 - 1e-12);
    }
}
