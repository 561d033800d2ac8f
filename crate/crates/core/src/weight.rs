//! Virial weights `ρ` with `Δρ = 1`, their Hessian eigenvalues, and the
//! `τ`/`κ` thresholds that decide which power nonlinearities blow up.
//!
//! On a warped product the radial Laplacian is `ρ'' + (n-1)(h'/h)ρ'`, so
//! `Δρ = 1` integrates to
//!
//! ```text
//! ρ'(r) = (∫₀ʳ h^{n-1}) / h^{n-1}(r),     ρ(r) = ∫₀ʳ ρ'(s) ds,
//! ```
//!
//! and `D²ρ` has eigenvalue `ρ''` in the radial direction and `ρ' h'/h` on
//! the fibre.

use std::f64::consts::FRAC_PI_2;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Manifold, ManifoldKind, RadialGrid};
use crate::quadrature::{cumulative_gauss, cumulative_simpson, gauss_composite};

/// Residual tolerance for closed-form weights.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;
/// Residual tolerance for quadrature weights.
pub const QUADRATURE_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Provenance::ClosedForm => CLOSED_FORM_TOLERANCE,
            Provenance::Quadrature => QUADRATURE_TOLERANCE,
        }
    }
}

/// `(ρ, ρ', ρ'')` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPoint {
    pub rho: f64,
    pub drho: f64,
    pub d2rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ClosedForm {
    SphereCap2,
    Hyperbolic2,
    Euclidean,
}

impl ClosedForm {
    fn for_manifold(m: &Manifold) -> Option<Self> {
        match (m.kind(), m.dim()) {
            (ManifoldKind::SphereCap, 2) => Some(ClosedForm::SphereCap2),
            (ManifoldKind::Hyperbolic, 2) => Some(ClosedForm::Hyperbolic2),
            (ManifoldKind::Euclidean, _) => Some(ClosedForm::Euclidean),
            _ => None,
        }
    }

    fn eval(self, m: &Manifold, r: f64) -> WeightPoint {
        let n = m.dim() as f64;
        match self {
            // ρ = -2 log cos(r/2)
            ClosedForm::SphereCap2 => {
                let (_, cos_r) = m.warp_unchecked(r);
                WeightPoint {
                    rho: -2.0 * (0.5 * r).cos().ln(),
                    drho: (0.5 * r).tan(),
                    d2rho: 1.0 / (1.0 + cos_r),
                }
            }
            // ρ = 2 log cosh(r/2)
            ClosedForm::Hyperbolic2 => WeightPoint {
                rho: 2.0 * (0.5 * r).cosh().ln(),
                drho: (0.5 * r).tanh(),
                d2rho: 1.0 / (1.0 + r.cosh()),
            },
            ClosedForm::Euclidean => WeightPoint {
                rho: r * r / (2.0 * n),
                drho: r / n,
                d2rho: 1.0 / n,
            },
        }
    }
}

/// Weight sampled on a grid, plus its value at the outer radius.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    provenance: Provenance,
    dim: usize,
    rho: Vec<f64>,
    drho: Vec<f64>,
    d2rho: Vec<f64>,
    outer: WeightPoint,
    /// Sample at the equator when the weight is the reflected hemisphere
    /// weight on the full sphere.
    equator: Option<WeightPoint>,
    closed: Option<ClosedForm>,
    hessian_bound: f64,
    residual: f64,
}

impl WeightFunction {
    /// Weight from caller-supplied `(ρ, ρ', ρ'')`, e.g. for negative controls.
    pub fn from_fn<F>(m: &Manifold, grid: &RadialGrid, f: F) -> Self
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let mut w = Self::empty(Provenance::ClosedForm, m.dim());
        for &r in grid.centers() {
            let (a, b, c) = f(r);
            w.rho.push(a);
            w.drho.push(b);
            w.d2rho.push(c);
        }
        let (a, b, c) = f(m.r_max());
        w.outer = WeightPoint {
            rho: a,
            drho: b,
            d2rho: c,
        };
        w.finish(m, grid);
        w
    }

    fn empty(provenance: Provenance, dim: usize) -> Self {
        Self {
            provenance,
            dim,
            rho: Vec::new(),
            drho: Vec::new(),
            d2rho: Vec::new(),
            outer: WeightPoint {
                rho: 0.0,
                drho: 0.0,
                d2rho: 0.0,
            },
            equator: None,
            closed: None,
            hessian_bound: f64::NAN,
            residual: f64::NAN,
        }
    }

    fn finish(&mut self, m: &Manifold, grid: &RadialGrid) {
        self.residual = analytic_residual(self, m, grid);
        self.hessian_bound = hessian_bound(self, m, grid);
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn drho(&self) -> &[f64] {
        &self.drho
    }

    pub fn d2rho(&self) -> &[f64] {
        &self.d2rho
    }

    /// Values at `r_max`.
    pub fn outer(&self) -> WeightPoint {
        self.outer
    }

    /// One-sided values at the equator for the reflected full-sphere weight.
    pub fn equator(&self) -> Option<WeightPoint> {
        self.equator
    }

    pub fn is_reflected(&self) -> bool {
        self.equator.is_some()
    }

    /// Smallest certified `c` with `D²ρ ≤ c g`.
    pub fn hessian_bound(&self) -> f64 {
        self.hessian_bound
    }

    /// Unit-Laplacian residual `max |ρ'' + (n-1)(h'/h)ρ' - 1|` at the grid
    /// points; for quadrature weights `ρ''` here is a finite difference of
    /// the sampled `ρ'`, not the ODE value.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `(ρ, ρ', ρ'')` at an arbitrary radius in `[0, r_max]`.
    pub fn point_at(&self, m: &Manifold, r: f64) -> Result<WeightPoint> {
        m.warp_eval(r)?;
        let r = r.clamp(0.0, m.r_max());
        if self.is_reflected() && r > FRAC_PI_2 {
            let mut p = self.point_at(&Manifold::sphere_cap(m.dim())?, m.r_max() - r)?;
            p.drho = -p.drho;
            return Ok(p);
        }
        if r == 0.0 {
            return Ok(WeightPoint {
                rho: 0.0,
                drho: 0.0,
                d2rho: 1.0 / m.dim() as f64,
            });
        }
        if let Some(cf) = self.closed {
            return Ok(cf.eval(m, r));
        }
        Ok(quadrature_point(m, r))
    }
}

fn quadrature_point(m: &Manifold, r: f64) -> WeightPoint {
    let n = m.dim();
    let nodes = 16385;
    let delta = r / (nodes - 1) as f64;
    let s: Vec<f64> = (0..nodes)
        .map(|k| if k + 1 == nodes { r } else { k as f64 * delta })
        .collect();
    let density: Vec<f64> = s.iter().map(|&x| m.area_density(x)).collect();
    let inner = cumulative_gauss(&s, |x| m.area_density(x));
    let slope: Vec<f64> = (0..nodes)
        .map(|k| if k == 0 { 0.0 } else { inner[k] / density[k] })
        .collect();
    let rho = cumulative_simpson(&slope, delta)[nodes - 1];
    let drho = slope[nodes - 1];
    let (h, dh) = m.warp_unchecked(r);
    WeightPoint {
        rho,
        drho,
        d2rho: 1.0 - (n as f64 - 1.0) * dh / h * drho,
    }
}

/// Exact weight on `S²₊` (`-2 log cos(r/2)`), `H²` (`2 log cosh(r/2)`),
/// or `ℝⁿ` (`r²/2n`).
pub fn build_closed_form(m: &Manifold, grid: &RadialGrid) -> Result<WeightFunction> {
    let cf = ClosedForm::for_manifold(m).ok_or(Error::UnsupportedClosedForm {
        kind: m.kind(),
        dim: m.dim(),
    })?;
    let mut w = WeightFunction::empty(Provenance::ClosedForm, m.dim());
    w.closed = Some(cf);
    for &r in grid.centers() {
        let p = cf.eval(m, r);
        w.rho.push(p.rho);
        w.drho.push(p.drho);
        w.d2rho.push(p.d2rho);
    }
    w.outer = cf.eval(m, m.r_max());
    w.finish(m, grid);
    Ok(w)
}

/// Quadrature nodes per cell; cell centres and faces are both even nodes.
const NODES_PER_CELL: usize = 16;

/// Nested-quadrature weight for any warp.
///
/// The integrands are sampled on nodes spaced `Δr/16`. The inner integral
/// `∫₀ˢ h^{n-1}` is accumulated once over all nodes by per-interval
/// Gauss–Legendre (Simpson would miss the `s^{n-1}` behaviour at the pole
/// for `n ≥ 5`); `ρ = ∫ ρ'` is a running Simpson sum; `ρ'` is that integral
/// divided by `h^{n-1}` (extended by its limit 0 at the pole) and `ρ''`
/// follows from the ODE. The stored residual is computed independently, from
/// a fourth-order difference of the sampled `ρ'`.
pub fn build_quadrature(m: &Manifold, grid: &RadialGrid) -> Result<WeightFunction> {
    let n = m.dim();
    let n1 = n as f64 - 1.0;
    let cells = grid.cells();
    let nodes = NODES_PER_CELL * cells + 1;
    let delta = grid.dr() / NODES_PER_CELL as f64;
    let s: Vec<f64> = (0..nodes)
        .map(|k| {
            if k + 1 == nodes {
                m.r_max()
            } else {
                k as f64 * delta
            }
        })
        .collect();
    let density: Vec<f64> = s.iter().map(|&x| m.area_density(x)).collect();
    if let Some(k) = (1..nodes).find(|&k| !(density[k] > 0.0) || !density[k].is_finite()) {
        return Err(Error::Manifold(format!(
            "warp invariant violated: h^(n-1) = {} at r = {}",
            density[k], s[k]
        )));
    }
    let inner = cumulative_gauss(&s, |x| m.area_density(x));
    let slope: Vec<f64> = (0..nodes)
        .map(|k| if k == 0 { 0.0 } else { inner[k] / density[k] })
        .collect();
    let outer_int = cumulative_simpson(&slope, delta);

    let point = |k: usize| {
        let (h, dh) = m.warp_unchecked(s[k]);
        let drho = slope[k];
        WeightPoint {
            rho: outer_int[k],
            drho,
            d2rho: 1.0 - n1 * dh / h * drho,
        }
    };
    let mut w = WeightFunction::empty(Provenance::Quadrature, n);
    let mut residual: f64 = 0.0;
    let half = NODES_PER_CELL / 2;
    for j in 0..cells {
        let k = NODES_PER_CELL * j + half;
        let p = point(k);
        let d2_fd = (slope[k - 2] - 8.0 * slope[k - 1] + 8.0 * slope[k + 1] - slope[k + 2])
            / (12.0 * delta);
        let (h, dh) = m.warp_unchecked(s[k]);
        residual = residual.max((d2_fd + n1 * dh / h * p.drho - 1.0).abs());
        w.rho.push(p.rho);
        w.drho.push(p.drho);
        w.d2rho.push(p.d2rho);
    }
    w.outer = point(nodes - 1);
    w.residual = residual;
    w.hessian_bound = hessian_bound(&w, m, grid);
    Ok(w)
}

/// Closed form when one exists, quadrature otherwise. On the full sphere the
/// hemisphere weight is reflected across the equator, `ρ(π - r) = ρ(r)`.
pub fn build(m: &Manifold, grid: &RadialGrid) -> Result<WeightFunction> {
    if m.kind() == ManifoldKind::SphereFull {
        return build_reflected(m, grid);
    }
    match build_closed_form(m, grid) {
        Ok(w) => Ok(w),
        Err(Error::UnsupportedClosedForm { .. }) => build_quadrature(m, grid),
        Err(e) => Err(e),
    }
}

fn build_reflected(m: &Manifold, grid: &RadialGrid) -> Result<WeightFunction> {
    let cells = grid.cells();
    if !cells.is_multiple_of(2) {
        return Err(Error::Manifold(
            "full-sphere grid needs an even cell count so the equator is a face".into(),
        ));
    }
    let cap = Manifold::sphere_cap(m.dim())?;
    let cap_grid = RadialGrid::new(&cap, cells / 2)?;
    let half = build(&cap, &cap_grid)?;
    let mut w = half.clone();
    w.rho.clear();
    w.drho.clear();
    w.d2rho.clear();
    for j in 0..cells {
        let (k, sign) = if j < cells / 2 {
            (j, 1.0)
        } else {
            (cells - 1 - j, -1.0)
        };
        w.rho.push(half.rho[k]);
        w.drho.push(sign * half.drho[k]);
        w.d2rho.push(half.d2rho[k]);
    }
    w.equator = Some(half.outer);
    w.outer = WeightPoint {
        rho: 0.0,
        drho: 0.0,
        d2rho: 1.0 / m.dim() as f64,
    };
    w.residual = half.residual;
    w.hessian_bound = half.hessian_bound;
    Ok(w)
}

fn analytic_residual(w: &WeightFunction, m: &Manifold, grid: &RadialGrid) -> f64 {
    let n1 = m.dim() as f64 - 1.0;
    grid.centers()
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let (h, dh) = m.warp_unchecked(r);
            (w.d2rho[j] + n1 * dh / h * w.drho[j] - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Both unit-Laplacian residuals of a weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// [`WeightFunction::residual`].
    pub analytic: f64,
    /// `max_j |(Δ_d ρ)_j - 1|` over cells not touching the outer face (or
    /// the equator of a reflected weight).
    pub discrete: f64,
}

pub fn unit_laplacian_residual(
    w: &WeightFunction,
    m: &Manifold,
    grid: &RadialGrid,
) -> Result<Residual> {
    if w.dim != m.dim() {
        return Err(Error::Manifold(format!(
            "weight built for dimension {} used on dimension {}",
            w.dim,
            m.dim()
        )));
    }
    if w.rho.len() != grid.cells() {
        return Err(Error::Shape {
            expected: grid.cells(),
            got: w.rho.len(),
        });
    }
    let lap = grid.laplacian(&w.rho)?;
    let cells = grid.cells();
    let skip =
        |j: usize| j + 1 == cells || (w.is_reflected() && (j + 1 == cells / 2 || j == cells / 2));
    let discrete = lap
        .iter()
        .enumerate()
        .filter(|(j, _)| !skip(*j))
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Residual {
        analytic: w.residual,
        discrete,
    })
}

/// `(λ_radial, λ_tangential) = (ρ'', ρ' h'/h)`; at the pole both equal `1/n`.
pub fn hessian_eigenvalues(w: &WeightFunction, m: &Manifold, r: f64) -> Result<(f64, f64)> {
    let p = w.point_at(m, r)?;
    if r == 0.0 {
        return Ok((p.d2rho, p.d2rho));
    }
    let (h, dh) = m.warp_unchecked(r);
    Ok((p.d2rho, p.drho * dh / h))
}

/// Certified `c` with `D²ρ ≤ c g`.
///
/// On truncated non-compact manifolds the supremum is approached as
/// `r → ∞`, so the analytic value is returned (`1/(n-1)` on `Hⁿ`, `1/n` on
/// `ℝⁿ`); elsewhere it is the maximum over the grid and the outer radius.
pub fn hessian_bound(w: &WeightFunction, m: &Manifold, grid: &RadialGrid) -> f64 {
    let n = m.dim() as f64;
    match m.kind() {
        ManifoldKind::Hyperbolic => 1.0 / (n - 1.0),
        ManifoldKind::Euclidean => 1.0 / n,
        _ => grid_hessian_max(w, m, grid),
    }
}

/// Largest Hessian eigenvalue over grid points and the outer radius.
pub fn grid_hessian_max(w: &WeightFunction, m: &Manifold, grid: &RadialGrid) -> f64 {
    let mut c = f64::NEG_INFINITY;
    for (j, &r) in grid.centers().iter().enumerate() {
        let (h, dh) = m.warp_unchecked(r);
        c = c.max(w.d2rho[j]).max(w.drho[j] * dh / h);
    }
    if let Some(eq) = w.equator {
        c = c.max(eq.d2rho);
    }
    if !w.is_reflected() {
        let (h, dh) = m.warp_unchecked(m.r_max());
        c = c.max(w.outer.d2rho);
        if h > 0.0 {
            c = c.max(w.outer.drho * dh / h);
        }
    }
    c
}

const PHI_PANELS: usize = 400;
/// Gauss–Legendre panels for the gap integrals. The integrands are
/// positive, so their sign never depends on the resolution; this only sets
/// the accuracy of the reported margins.
const GAP_PANELS: usize = 120;

/// `(sinh s / sinh r)^m` without overflow.
fn sinh_ratio_pow(s: f64, r: f64, m: i32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if s == 0.0 {
        return 0.0;
    }
    let shape = (-2.0 * s).exp_m1() / (-2.0 * r).exp_m1();
    (m as f64 * (s - r)).exp() * shape.powi(m)
}

/// `(cosh r - cosh s) / sinh r` for `0 ≤ s ≤ r`, free of cancellation.
fn cosh_gap(s: f64, r: f64) -> f64 {
    let a = 0.5 * (r + s);
    let b = 0.5 * (r - s);
    (-2.0 * a).exp_m1() * (-2.0 * b).exp_m1() / -(-2.0 * r).exp_m1()
}

/// `φ(r) = cosh r ∫₀ʳ sinh^{n-1} / sinhⁿ r`, the tangential Hessian
/// eigenvalue of the hyperbolic weight.
pub fn phi_ratio(n: usize, r: f64) -> Result<f64> {
    check_phi_args(n, r)?;
    if n == 2 {
        let c = r.cosh();
        return Ok(c / (1.0 + c));
    }
    let integral = gauss_composite(0.0, r, PHI_PANELS, |s| sinh_ratio_pow(s, r, n as i32 - 1));
    Ok(integral / r.tanh())
}

fn check_phi_args(n: usize, r: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Manifold(format!("dimension must be >= 2, got {n}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain {
            r,
            r_max: f64::INFINITY,
        });
    }
    Ok(())
}

/// `(φ(r) - 1/n, 1/(n-1) - φ(r))`, each written as an integral of a
/// non-negative integrand so that strict positivity survives rounding even
/// where `φ` is within an ulp of a bound.
///
/// The lower gap is `∫₀ʳ sinh^{n-1}s (cosh r - cosh s) ds / sinhⁿ r`. The
/// upper gap follows from `(n-1)∫ sinh^{n-1} = sinh^{n-2} cosh - (n-2)∫
/// sinh^{n-3}` and reads `(n-2)∫₀ʳ sinh^{n-3}s (cosh r - cosh s) ds /
/// ((n-1) sinhⁿ r)`, or `1/(1 + cosh r)` for `n = 2`.
pub fn phi_gaps(n: usize, r: f64) -> Result<(f64, f64)> {
    check_phi_args(n, r)?;
    if n == 2 {
        // φ = cosh r / (1 + cosh r)
        return Ok((0.5 * (0.5 * r).tanh().powi(2), 1.0 / (1.0 + r.cosh())));
    }
    let lower = gauss_composite(0.0, r, GAP_PANELS, |s| {
        sinh_ratio_pow(s, r, n as i32 - 1) * cosh_gap(s, r)
    });
    let integral = gauss_composite(0.0, r, GAP_PANELS, |s| {
        sinh_ratio_pow(s, r, n as i32 - 3) * cosh_gap(s, r)
    });
    let upper = (n as f64 - 2.0) / (n as f64 - 1.0) * integral / r.sinh().powi(2);
    Ok((lower, upper))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimReport {
    pub dim: usize,
    pub passed: bool,
    /// Smallest distance from `φ` to either bound over the samples.
    pub min_margin: f64,
    /// Radius where the smallest margin occurred.
    pub r_at_min: f64,
    /// First radius where a bound failed, if any.
    pub offending_r: Option<f64>,
}

/// Checks `1/n < φ(r) < 1/(n-1)` at every radius.
pub fn claim_check(n: usize, radii: &[f64]) -> Result<ClaimReport> {
    let mut report = ClaimReport {
        dim: n,
        passed: true,
        min_margin: f64::INFINITY,
        r_at_min: f64::NAN,
        offending_r: None,
    };
    let gaps: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| phi_gaps(n, r))
        .collect::<Result<_>>()?;
    for (&r, &(lo, hi)) in radii.iter().zip(&gaps) {
        let margin = lo.min(hi);
        if margin < report.min_margin {
            report.min_margin = margin;
            report.r_at_min = r;
        }
        if !(lo > 0.0 && hi > 0.0) && report.offending_r.is_none() {
            report.passed = false;
            report.offending_r = Some(r);
        }
    }
    Ok(report)
}

/// `count` log-spaced radii in `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub dim: usize,
    /// `inf q` with `q = h' ∫₀ʳ h^{n-1} / hⁿ` (the tangential eigenvalue).
    pub tau1: f64,
    /// `sup q`.
    pub tau2: f64,
    /// `2 max{1 - (n-1)τ₁, τ₂} + 1`.
    pub kappa_min: f64,
    /// Power with `(p+1)/2 = κ_min`.
    pub p_min: f64,
    /// `(r, q)` where `q` left `[0, 1]`.
    pub violation: Option<(f64, f64)>,
}

/// Pinching constants of `q(r) = h'(r) ∫₀ʳ h^{n-1} / h(r)ⁿ` from the grid,
/// the outer radius, the pole limit `1/n`, and for truncated non-compact
/// manifolds the `r → ∞` limit.
pub fn tau_bounds(m: &Manifold, grid: &RadialGrid) -> Result<ThresholdReport> {
    let w = build(m, grid)?;
    let n = m.dim();
    let nf = n as f64;
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(grid.cells() + 3);
    samples.push((0.0, 1.0 / nf));
    let (centers, half) = if w.is_reflected() {
        (&grid.centers()[..grid.cells() / 2], true)
    } else {
        (grid.centers(), false)
    };
    for (j, &r) in centers.iter().enumerate() {
        let (h, dh) = m.warp_unchecked(r);
        samples.push((r, w.drho[j] * dh / h));
    }
    match m.kind() {
        ManifoldKind::Hyperbolic => samples.push((f64::INFINITY, 1.0 / (nf - 1.0))),
        ManifoldKind::Euclidean => samples.push((f64::INFINITY, 1.0 / nf)),
        // h' vanishes at the equator
        _ if half => samples.push((FRAC_PI_2, 0.0)),
        _ => {
            let (h, dh) = m.warp_unchecked(m.r_max());
            samples.push((m.r_max(), w.outer.drho * dh / h));
        }
    }
    let violation = samples
        .iter()
        .find(|(_, q)| !(0.0..=1.0).contains(q))
        .copied();
    let tau1 = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let tau2 = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let kappa_min = 2.0 * (1.0 - (nf - 1.0) * tau1).max(tau2) + 1.0;
    Ok(ThresholdReport {
        dim: n,
        tau1,
        tau2,
        kappa_min,
        p_min: power_for_kappa(kappa_min),
        violation,
    })
}

/// `κ(p) = (p+1)/2`, the best constant in `s F(s) ≥ κ G(s)` for
/// `F(s) = s^{(p-1)/2}`.
pub fn kappa_for_power(p: f64) -> f64 {
    0.5 * (p + 1.0)
}

/// Inverse of [`kappa_for_power`].
pub fn power_for_kappa(kappa: f64) -> f64 {
    2.0 * kappa - 1.0
}

pub fn kappa_for_power_exact(p: Rational64) -> Rational64 {
    (p + 1) / 2
}

pub fn power_for_kappa_exact(kappa: Rational64) -> Rational64 {
    kappa * 2 - 1
}

/// Critical power `1 + 4/(n-1)` on `Hⁿ`.
pub fn hyperbolic_critical_power(n: usize) -> Rational64 {
    Rational64::from_integer(1) + Rational64::new(4, n as i64 - 1)
}

/// Critical `κ = 1 + 2/(n-1)` on `Hⁿ`.
pub fn hyperbolic_critical_kappa(n: usize) -> Rational64 {
    Rational64::from_integer(1) + Rational64::new(2, n as i64 - 1)
}

pub fn nonlinearity_admissible(p: f64, kappa_min: f64) -> bool {
    kappa_for_power(p) >= kappa_min - 1e-12
}

/// Default resolution of [`certify`].
pub const CERTIFICATE_CELLS: usize = 4096;

/// Everything `verify` reports for one manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub manifold: ManifoldKind,
    pub dim: usize,
    pub provenance: Provenance,
    pub residual: Residual,
    pub tolerance: f64,
    pub c: f64,
    pub thresholds: ThresholdReport,
    /// Only run on hyperbolic space.
    pub claim: Option<ClaimReport>,
}

impl Certificate {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.residual.analytic <= self.tolerance) {
            out.push(format!(
                "unit-Laplacian residual {:e} exceeds {:e}",
                self.residual.analytic, self.tolerance
            ));
        }
        if let Some((r, q)) = self.thresholds.violation {
            out.push(format!(
                "tangential eigenvalue {q} outside [0, 1] at r = {r}"
            ));
        }
        if let Some(claim) = &self.claim {
            if !claim.passed {
                out.push(format!(
                    "1/n < phi < 1/(n-1) fails at r = {}",
                    claim.offending_r.unwrap_or(f64::NAN)
                ));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Builds the weight on `cells` cells and checks its residual, Hessian
/// bound, thresholds and, on `Hⁿ`, the bounds on `φ` over 2000 radii in
/// `[1e-3, 20]`.
pub fn certify(m: &Manifold, cells: usize) -> Result<Certificate> {
    let grid = RadialGrid::new(m, cells)?;
    let w = build(m, &grid)?;
    let residual = unit_laplacian_residual(&w, m, &grid)?;
    let claim = match m.kind() {
        ManifoldKind::Hyperbolic => Some(claim_check(m.dim(), &log_spaced(1e-3, 20.0, 2000))?),
        _ => None,
    };
    Ok(Certificate {
        manifold: m.kind(),
        dim: m.dim(),
        provenance: w.provenance(),
        residual,
        tolerance: w.provenance().tolerance(),
        c: hessian_bound(&w, m, &grid),
        thresholds: tau_bounds(m, &grid)?,
        claim,
    })
}
