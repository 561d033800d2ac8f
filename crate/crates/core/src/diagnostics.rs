//! Conserved quantities, the virial functional `J = ∫ρ|u|²` and its time
//! derivatives, concavity checks and blow-up time bounds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{OuterBoundary, RadialGrid};
use crate::solver::{Outcome, WaveState};
use crate::weight::WeightFunction;

/// CSV column names, in file order.
pub const COLUMNS: [&str; 12] = [
    "t",
    "mass",
    "energy",
    "J",
    "Jprime_id",
    "Jprime_fd",
    "Jsecond_id",
    "Jsecond_fd",
    "grad_sq",
    "sup_abs_u",
    "boundary_flux",
    "tail_mass",
];

/// One time slice of the run diagnostics. The `_fd` fields are centred
/// differences of the `J` series and are `NaN` where no centred stencil
/// exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub j: f64,
    pub jprime_id: f64,
    pub jprime_fd: f64,
    pub jsecond_id: f64,
    pub jsecond_fd: f64,
    pub grad_sq: f64,
    pub sup_abs_u: f64,
    pub boundary_flux: f64,
    pub tail_mass: f64,
}

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.mass,
            self.energy,
            self.j,
            self.jprime_id,
            self.jprime_fd,
            self.jsecond_id,
            self.jsecond_fd,
            self.grad_sq,
            self.sup_abs_u,
            self.boundary_flux,
            self.tail_mass,
        ]
    }

    pub fn from_values(v: [f64; 12]) -> Self {
        Self {
            t: v[0],
            mass: v[1],
            energy: v[2],
            j: v[3],
            jprime_id: v[4],
            jprime_fd: v[5],
            jsecond_id: v[6],
            jsecond_fd: v[7],
            grad_sq: v[8],
            sup_abs_u: v[9],
            boundary_flux: v[10],
            tail_mass: v[11],
        }
    }
}

fn check(state: &WaveState, grid: &RadialGrid) -> Result<()> {
    if state.u.len() != grid.cells() {
        return Err(Error::Shape {
            expected: grid.cells(),
            got: state.u.len(),
        });
    }
    Ok(())
}

fn check_weight(w: &WeightFunction, grid: &RadialGrid) -> Result<()> {
    if w.rho().len() != grid.cells() {
        return Err(Error::Shape {
            expected: grid.cells(),
            got: w.rho().len(),
        });
    }
    let tolerance = w.provenance().tolerance();
    if !(w.residual() <= tolerance) {
        return Err(Error::WeightResidual {
            residual: w.residual(),
            tolerance,
        });
    }
    Ok(())
}

/// `∫|u|^{p+1} dV`.
pub fn potential_integral(u: &[Complex64], p: f64, grid: &RadialGrid) -> f64 {
    u.iter()
        .zip(grid.weights())
        .map(|(z, w)| z.norm().powf(p + 1.0) * w)
        .sum()
}

/// `∫|u_r|² - (2/(p+1))|u|^{p+1} dV`.
pub fn energy(state: &WaveState, grid: &RadialGrid) -> Result<f64> {
    check(state, grid)?;
    let kinetic = grid.grad_norm_sq(&state.u)?;
    Ok(kinetic - 2.0 / (state.p + 1.0) * potential_integral(&state.u, state.p, grid))
}

/// `Σ ρ_j |u_j|² w_j`.
pub fn virial_j(state: &WaveState, w: &WeightFunction, grid: &RadialGrid) -> Result<f64> {
    check(state, grid)?;
    if w.rho().len() != grid.cells() {
        return Err(Error::Shape {
            expected: grid.cells(),
            got: w.rho().len(),
        });
    }
    Ok(state
        .u
        .iter()
        .zip(w.rho())
        .zip(grid.weights())
        .map(|((z, r), m)| r * z.norm_sqr() * m)
        .sum())
}

/// `-2 Im ∫ ρ' u_r ū dV` with `ρ'`, `u_r` and `ū` all taken at cell faces.
///
/// The face values are `(ρ_k - ρ_{k-1})/Δr`, `(u_k - u_{k-1})/Δr` and the
/// face average of `u`, which makes this exactly `d/dt Σ ρ|u|² w` along the
/// semi-discrete flow.
pub fn virial_jprime(state: &WaveState, w: &WeightFunction, grid: &RadialGrid) -> Result<f64> {
    check(state, grid)?;
    let u = &state.u;
    let rho = w.rho();
    let dr = grid.dr();
    let area = grid.face_areas();
    let mut sum = 0.0;
    for k in 1..u.len() {
        let drho = (rho[k] - rho[k - 1]) / dr;
        let du = (u[k] - u[k - 1]) / dr;
        let avg = (u[k] + u[k - 1]) * 0.5;
        sum += area[k] * dr * drho * (du * avg.conj()).im;
    }
    Ok(-2.0 * sum)
}

/// Identity form of `J''` for a weight with `Δρ = 1`:
///
/// ```text
/// 4∫ρ''|u_r|² - 2((p-1)/(p+1))∫|u|^{p+1} - 2 ρ'(r_max) · boundary_flux
/// ```
///
/// The reflected full-sphere weight has a kink at the equator, which adds
/// the surface term `ρ'(π/2⁻) A [4 Re(ū Δu) - 4|u_r|² + 4((p-1)/(p+1))|u|^{p+1}]`.
pub fn virial_jsecond(state: &WaveState, w: &WeightFunction, grid: &RadialGrid) -> Result<f64> {
    check(state, grid)?;
    check_weight(w, grid)?;
    let u = &state.u;
    let p = state.p;
    let n = u.len();
    let dr = grid.dr();
    let area = grid.face_areas();
    let d2 = w.d2rho();
    let reflected = w.equator();
    let equator_face = n / 2;

    let mut hess = 0.0;
    for k in 1..n {
        hess += area[k] * 0.5 * (d2[k - 1] + d2[k]) * (u[k] - u[k - 1]).norm_sqr() / dr;
    }
    if grid.outer_boundary() == OuterBoundary::Dirichlet {
        let rho2 = 0.5 * (d2[n - 1] + w.outer().d2rho);
        hess += 2.0 * area[n] * rho2 * u[n - 1].norm_sqr() / dr;
    }
    let ratio = (p - 1.0) / (p + 1.0);
    let mut total = 4.0 * hess
        - 2.0 * ratio * potential_integral(u, p, grid)
        - 2.0 * w.outer().drho * boundary_flux(u, grid);

    if let Some(eq) = reflected {
        let k = equator_face;
        let lap = grid.laplacian(u)?;
        let ue = (u[k] + u[k - 1]) * 0.5;
        let ur = (u[k] - u[k - 1]) / dr;
        let lape = (lap[k] + lap[k - 1]) * 0.5;
        total += eq.drho
            * area[k]
            * (4.0 * (ue.conj() * lape).re - 4.0 * ur.norm_sqr()
                + 4.0 * ratio * ue.norm().powf(p + 1.0));
    }
    Ok(total)
}

/// `J''` exactly along the semi-discrete flow `i u_t = Δ_d u + |u|^{p-1}u`:
///
/// ```text
/// 2 Re Σ_j w_j conj(y_j) [ρ_j (Δ_d u)_j - (Δ_d(ρu))_j],   y = Δ_d u + |u|^{p-1} u.
/// ```
///
/// Differs from [`virial_jsecond`] by the `O(Δr²)` discretisation error
/// of the identity, and is the value finite differences of the `J` series
/// converge to as `dt → 0`.
pub fn virial_jsecond_discrete(
    state: &WaveState,
    w: &WeightFunction,
    grid: &RadialGrid,
) -> Result<f64> {
    check(state, grid)?;
    check_weight(w, grid)?;
    let u = &state.u;
    let p = state.p;
    let lap = grid.laplacian(u)?;
    let weighted: Vec<Complex64> = u.iter().zip(w.rho()).map(|(z, r)| z * *r).collect();
    let lap_weighted = grid.laplacian(&weighted)?;
    let mut sum = 0.0;
    for j in 0..u.len() {
        let y = lap[j] + u[j] * u[j].norm().powf(p - 1.0);
        let commutator = lap[j] * w.rho()[j] - lap_weighted[j];
        sum += grid.weights()[j] * (y.conj() * commutator).re;
    }
    Ok(2.0 * sum)
}

/// `ω h^{n-1}(r_max) |u_r(r_max⁻)|²`; zero for a zero-flux outer boundary.
pub fn boundary_flux(u: &[Complex64], grid: &RadialGrid) -> f64 {
    grid.face_areas()[grid.cells()] * grid.outer_gradient(u).norm_sqr()
}

/// Mass in the outer 10% of cells.
pub fn tail_mass(u: &[Complex64], grid: &RadialGrid) -> f64 {
    let n = u.len();
    let start = n - n.div_ceil(10);
    u[start..]
        .iter()
        .zip(&grid.weights()[start..])
        .map(|(z, w)| z.norm_sqr() * w)
        .sum()
}

/// All identity-side diagnostics of one state; the `_fd` fields are `NaN`.
pub fn record(
    state: &WaveState,
    w: &WeightFunction,
    grid: &RadialGrid,
) -> Result<DiagnosticsRecord> {
    check(state, grid)?;
    let u = &state.u;
    let grad_sq = grid.grad_norm_sq(u)?;
    Ok(DiagnosticsRecord {
        t: state.t,
        mass: grid.norm_sq(u),
        energy: energy(state, grid)?,
        j: virial_j(state, w, grid)?,
        jprime_id: virial_jprime(state, w, grid)?,
        jprime_fd: f64::NAN,
        jsecond_id: virial_jsecond_discrete(state, w, grid)?,
        jsecond_fd: f64::NAN,
        grad_sq,
        sup_abs_u: u.iter().map(|z| z.norm()).fold(0.0, f64::max),
        boundary_flux: boundary_flux(u, grid),
        tail_mass: tail_mass(u, grid),
    })
}

/// Fills `jprime_fd` and `jsecond_fd` with three-point differences over
/// consecutive records (nonuniform spacing allowed).
pub fn fill_finite_differences(records: &mut [DiagnosticsRecord]) {
    let n = records.len();
    for r in records.iter_mut() {
        r.jprime_fd = f64::NAN;
        r.jsecond_fd = f64::NAN;
    }
    for k in 1..n.saturating_sub(1) {
        let (a, b, c) = (records[k - 1], records[k], records[k + 1]);
        let h1 = b.t - a.t;
        let h2 = c.t - b.t;
        if !(h1 > 0.0 && h2 > 0.0) {
            continue;
        }
        let s1 = (b.j - a.j) / h1;
        let s2 = (c.j - b.j) / h2;
        records[k].jprime_fd = (h1 * s2 + h2 * s1) / (h1 + h2);
        records[k].jsecond_fd = 2.0 * (s2 - s1) / (h1 + h2);
    }
}

/// `4cE₀ - J''`, predicted non-negative for admissible data.
pub fn concavity_slack(record: &DiagnosticsRecord, e0: f64, c: f64) -> f64 {
    4.0 * c * e0 - record.jsecond_id
}

/// `max(1e-6, 0.01 |4E₀|)`.
pub fn concavity_tolerance(e0: f64) -> f64 {
    (0.01 * (4.0 * e0).abs()).max(1e-6)
}

/// First positive root of `J0 + Jp0 t + 2cE₀ t²`; `None` unless `E₀ < 0`,
/// `J0 > 0` and `c > 0`.
pub fn blowup_time_bound(j0: f64, jp0: f64, e0: f64, c: f64) -> Option<f64> {
    if !(e0 < 0.0 && j0 > 0.0 && c > 0.0) || !jp0.is_finite() {
        return None;
    }
    let a = 2.0 * c * e0;
    let b = jp0;
    let disc = b * b - 4.0 * a * j0;
    let root = disc.sqrt();
    // a < 0 < J0, so the roots have opposite signs; pick the stable formula
    Some(if b <= 0.0 {
        2.0 * j0 / (root - b)
    } else {
        (b + root) / (-2.0 * a)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupScan {
    pub outcome: Outcome,
    /// Least-squares slope of `ln grad_sq` against `ln(t_end - t)` over the
    /// records in the last order of magnitude of `grad_sq`.
    pub growth_exponent: Option<f64>,
}

/// Flags the first record with `grad_sq > threshold²` or a non-finite value.
pub fn detect_blowup(series: &[DiagnosticsRecord], threshold: f64) -> BlowupScan {
    let mut outcome = Outcome::Completed;
    for r in series {
        if !r.sup_abs_u.is_finite() || !r.grad_sq.is_finite() {
            outcome = Outcome::Overflow(r.t);
            break;
        }
        if r.grad_sq > threshold * threshold {
            outcome = Outcome::BlowupDetected(r.t);
            break;
        }
    }
    BlowupScan {
        growth_exponent: growth_exponent(series),
        outcome,
    }
}

fn growth_exponent(series: &[DiagnosticsRecord]) -> Option<f64> {
    let finite: Vec<&DiagnosticsRecord> = series
        .iter()
        .take_while(|r| r.grad_sq.is_finite() && r.grad_sq > 0.0)
        .collect();
    let last = finite.last()?;
    let t_end = last.t;
    let floor = last.grad_sq / 10.0;
    let pts: Vec<(f64, f64)> = finite
        .iter()
        .rev()
        .skip(1)
        .take_while(|r| r.grad_sq >= floor)
        .filter(|r| r.t < t_end)
        .map(|r| ((t_end - r.t).ln(), r.grad_sq.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Manifold;
    use crate::quadrature::simpson;
    use crate::weight;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn hemisphere(cells: usize) -> (RadialGrid, WeightFunction) {
        let m = Manifold::sphere_cap(2).unwrap();
        let g = RadialGrid::new(&m, cells).unwrap();
        let w = weight::build_closed_form(&m, &g).unwrap();
        (g, w)
    }

    fn state(grid: &RadialGrid, f: impl Fn(f64) -> Complex64, p: f64) -> WaveState {
        WaveState {
            u: grid.centers().iter().map(|&r| f(r)).collect(),
            t: 0.0,
            p,
        }
    }

    #[test]
    fn zero_field() {
        let (g, w) = hemisphere(64);
        let s = state(&g, |_| Complex64::new(0.0, 0.0), 5.0);
        let r = record(&s, &w, &g).unwrap();
        assert_eq!(r.mass, 0.0);
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.j, 0.0);
        assert_eq!(r.jprime_id, 0.0);
        assert_eq!(r.jsecond_id, 0.0);
        assert_eq!(virial_jsecond(&s, &w, &g).unwrap(), 0.0);
    }

    #[test]
    fn energy_of_scaled_cosine() {
        let (g, _) = hemisphere(4096);
        for &a in &[0.5, 14f64.powf(0.25), 2.5] {
            let s = state(&g, |r| Complex64::new(a * r.cos(), 0.0), 5.0);
            let expected = a * a * 4.0 * PI / 3.0 - a.powi(6) * 2.0 * PI / 21.0;
            assert!((energy(&s, &g).unwrap() - expected).abs() < 1e-5 * a.powi(6));
        }
        let a = 14f64.powf(0.25);
        let s = state(&g, |r| Complex64::new(a * r.cos(), 0.0), 5.0);
        assert!(energy(&s, &g).unwrap().abs() < 1e-5);
    }

    #[test]
    fn j_of_cosine_matches_independent_quadrature() {
        let (g, w) = hemisphere(4096);
        let s = state(&g, |r| Complex64::new(r.cos(), 0.0), 5.0);
        let oracle = 2.0
            * PI
            * simpson(0.0, FRAC_PI_2, 4000, |r| {
                -2.0 * (0.5 * r).cos().ln() * r.cos().powi(2) * r.sin()
            });
        assert!((virial_j(&s, &w, &g).unwrap() - oracle).abs() < 1e-6);
    }

    #[test]
    fn constant_weight_gives_mass() {
        let m = Manifold::sphere_cap(2).unwrap();
        let g = RadialGrid::new(&m, 128).unwrap();
        let w = weight::WeightFunction::from_fn(&m, &g, |_| (2.5, 0.0, 0.0));
        let s = state(&g, |r| Complex64::new(r.cos(), r.sin() * 0.3), 3.0);
        let mass = g.norm_sq(&s.u);
        assert!((virial_j(&s, &w, &g).unwrap() - 2.5 * mass).abs() < 1e-12 * mass);
    }

    #[test]
    fn jprime_vanishes_for_real_fields_and_is_phase_invariant() {
        let (g, w) = hemisphere(256);
        let real = state(&g, |r| Complex64::new(r.cos() * (1.0 + r), 0.0), 5.0);
        assert_eq!(virial_jprime(&real, &w, &g).unwrap(), 0.0);
        let s = state(&g, |r| Complex64::from_polar(r.cos(), 3.0 * r * r), 5.0);
        let rotated = WaveState {
            u: s.u.iter().map(|z| z * Complex64::i()).collect(),
            ..s.clone()
        };
        let a = virial_jprime(&s, &w, &g).unwrap();
        let b = virial_jprime(&rotated, &w, &g).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn jprime_is_the_semidiscrete_derivative() {
        let (g, w) = hemisphere(256);
        let s = state(&g, |r| Complex64::from_polar(r.cos(), 2.0 * r.sin()), 5.0);
        let lap = g.laplacian(&s.u).unwrap();
        let direct: f64 = 2.0
            * (0..g.cells())
                .map(|j| w.rho()[j] * g.weights()[j] * (s.u[j].conj() * lap[j]).im)
                .sum::<f64>();
        let face = virial_jprime(&s, &w, &g).unwrap();
        assert!((direct - face).abs() < 1e-12 * direct.abs());
    }

    #[test]
    fn jsecond_forms_agree_to_grid_accuracy() {
        let (g, w) = hemisphere(2048);
        let s = state(
            &g,
            |r| Complex64::from_polar(1.2 * r.cos(), 0.5 * r * r),
            5.0,
        );
        let a = virial_jsecond(&s, &w, &g).unwrap();
        let b = virial_jsecond_discrete(&s, &w, &g).unwrap();
        assert!((a - b).abs() < 1e-3 * a.abs(), "{a} {b}");
    }

    #[test]
    fn jsecond_bounded_by_four_energy_for_gaussian() {
        let (g, w) = hemisphere(1024);
        let s = state(
            &g,
            |r| {
                Complex64::new(
                    1.5 * (-((r - FRAC_PI_2 / 2.0) / 0.2).powi(2) / 2.0).exp(),
                    0.0,
                )
            },
            5.0,
        );
        let e = energy(&s, &g).unwrap();
        assert!(virial_jsecond(&s, &w, &g).unwrap() <= 4.0 * e);
    }

    #[test]
    fn jsecond_refuses_bad_weight() {
        let m = Manifold::euclidean(2, 1.0).unwrap();
        let g = RadialGrid::new(&m, 64).unwrap();
        let w = weight::WeightFunction::from_fn(&m, &g, |r| (r * r, 2.0 * r, 2.0));
        let s = state(&g, |r| Complex64::new(1.0 - r * r, 0.0), 3.0);
        assert!(matches!(
            virial_jsecond(&s, &w, &g),
            Err(Error::WeightResidual { .. })
        ));
        assert!(virial_jsecond_discrete(&s, &w, &g).is_err());
    }

    #[test]
    fn time_bound() {
        let t = blowup_time_bound(1.0, 0.0, -1.0, 1.0).unwrap();
        assert!((t - 0.5f64.sqrt()).abs() < 1e-15);
        let shorter = blowup_time_bound(1.0, -0.5, -1.0, 1.0).unwrap();
        assert!(shorter < t);
        let longer = blowup_time_bound(1.0, 0.5, -1.0, 1.0).unwrap();
        assert!(longer > t);
        // root of 1 + 0.5t - 2t²
        assert!((longer - (0.5 + 8.25f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!(blowup_time_bound(1.0, 0.0, 0.0, 1.0).is_none());
        assert!(blowup_time_bound(1.0, 0.0, 1.0, 1.0).is_none());
        assert!(blowup_time_bound(0.0, 0.0, -1.0, 1.0).is_none());
    }

    #[test]
    fn finite_differences_of_a_quadratic_are_exact() {
        let times = [0.0, 0.1, 0.25, 0.3, 0.5];
        let mut recs: Vec<DiagnosticsRecord> = times
            .iter()
            .map(|&t| {
                let mut v = [0.0; 12];
                v[0] = t;
                v[3] = 1.0 + 2.0 * t - 3.0 * t * t;
                DiagnosticsRecord::from_values(v)
            })
            .collect();
        fill_finite_differences(&mut recs);
        assert!(recs[0].jprime_fd.is_nan() && recs[4].jsecond_fd.is_nan());
        for r in &recs[1..4] {
            assert!((r.jprime_fd - (2.0 - 6.0 * r.t)).abs() < 1e-12);
            assert!((r.jsecond_fd + 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn blowup_detection() {
        let mk = |t: f64, g: f64| {
            let mut v = [0.0; 12];
            v[0] = t;
            v[8] = g;
            v[9] = g.sqrt();
            DiagnosticsRecord::from_values(v)
        };
        let flat: Vec<_> = (0..10).map(|k| mk(k as f64, 4.0)).collect();
        assert_eq!(detect_blowup(&flat, 10.0).outcome, Outcome::Completed);

        let mut ovf = flat.clone();
        ovf[6].sup_abs_u = f64::INFINITY;
        assert_eq!(detect_blowup(&ovf, 10.0).outcome, Outcome::Overflow(6.0));

        // grad_sq = (1 - t)^{-1}
        let blow: Vec<_> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.005;
                mk(t, 1.0 / (1.0 - t))
            })
            .collect();
        // grad_sq > 49 first at t = 0.98
        let scan = detect_blowup(&blow, 7.0);
        match scan.outcome {
            Outcome::BlowupDetected(t) => assert!((t - 0.98).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(scan.growth_exponent.unwrap() < 0.0);
    }

    #[test]
    fn tail_mass_counts_outer_cells() {
        let (g, _) = hemisphere(100);
        let mut u = vec![Complex64::new(0.0, 0.0); 100];
        u[89] = Complex64::new(1.0, 0.0);
        assert_eq!(tail_mass(&u, &g), 0.0);
        u[90] = Complex64::new(1.0, 0.0);
        assert!((tail_mass(&u, &g) - g.weights()[90]).abs() < 1e-15);
    }

    #[test]
    fn concavity_helpers() {
        assert_eq!(concavity_tolerance(0.0), 1e-6);
        assert!((concavity_tolerance(-10.0) - 0.4).abs() < 1e-15);
        let mut v = [0.0; 12];
        v[6] = -50.0;
        let r = DiagnosticsRecord::from_values(v);
        assert_eq!(concavity_slack(&r, -10.0, 1.0), 10.0);
    }
}
