//! Warped-product manifolds `g = dr² + h(r)² dθ²`, their cell-centred radial
//! grids, and the radial Laplace–Beltrami operator in flux form.
//!
//! Only radial fields are represented. The grid never samples the pole
//! `r = 0`: cell `j` sits at `r_j = (j + ½)Δr` and the face at the pole has
//! zero area, which is how regularity enters the operator. The discrete
//! Laplacian is symmetric in the weighted inner product by construction, and
//! `⟨-Δf, f⟩` equals [`RadialGrid::grad_norm_sq`] exactly.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre5, unit_sphere_area};
use crate::tridiag::Tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    /// Upper hemisphere `Sⁿ₊`, `r ∈ (0, π/2]`, Dirichlet at the equator.
    SphereCap,
    /// Whole sphere `Sⁿ`, `r ∈ (0, π)`, regular at both poles.
    SphereFull,
    /// Hyperbolic space `Hⁿ(-1)` truncated at a finite radius.
    Hyperbolic,
    /// Flat `ℝⁿ` truncated at a finite radius.
    Euclidean,
    /// User-supplied tabulated warp.
    Custom,
}

impl ManifoldKind {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::SphereCap => "sphere_cap",
            ManifoldKind::SphereFull => "sphere_full",
            ManifoldKind::Hyperbolic => "hyperbolic",
            ManifoldKind::Euclidean => "euclidean",
            ManifoldKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sphere_cap" | "hemisphere" => Ok(ManifoldKind::SphereCap),
            "sphere_full" | "sphere" => Ok(ManifoldKind::SphereFull),
            "hyperbolic" => Ok(ManifoldKind::Hyperbolic),
            "euclidean" => Ok(ManifoldKind::Euclidean),
            "custom" | "custom_warp" => Ok(ManifoldKind::Custom),
            other => Err(Error::Manifold(format!("unknown manifold kind `{other}`"))),
        }
    }
}

/// Boundary condition at the outer face `r = r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBoundary {
    /// `u(r_max) = 0`, imposed through an odd ghost cell.
    Dirichlet,
    /// No flux through the outer face (antipodal pole or Neumann wall).
    ZeroFlux,
}

impl FromStr for OuterBoundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dirichlet" => Ok(OuterBoundary::Dirichlet),
            "zero_flux" | "neumann" | "regular" => Ok(OuterBoundary::ZeroFlux),
            other => Err(Error::Manifold(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Tabulated warp `(r, h, h')` with cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpTable {
    r: Vec<f64>,
    h: Vec<f64>,
    dh: Vec<f64>,
}

impl WarpTable {
    pub fn new(r: Vec<f64>, h: Vec<f64>, dh: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::WarpTable(msg));
        if r.len() != h.len() || r.len() != dh.len() {
            return bad("columns have different lengths".into());
        }
        if r.len() < 2 {
            return bad("need at least two rows".into());
        }
        if r.iter().chain(&h).chain(&dh).any(|v| !v.is_finite()) {
            return bad("non-finite entry".into());
        }
        if r[0] != 0.0 {
            return bad(format!("first radius must be 0, got {}", r[0]));
        }
        if let Some(k) = r.windows(2).position(|w| w[1] <= w[0]) {
            return bad(format!("radii not strictly increasing at row {}", k + 2));
        }
        if h[0].abs() > 1e-12 {
            return bad(format!("h(0) must vanish, got {}", h[0]));
        }
        if dh[0] <= 0.0 {
            return bad(format!("h'(0) must be positive, got {}", dh[0]));
        }
        if let Some(k) = h.iter().skip(1).position(|&v| v <= 0.0) {
            return bad(format!("h must be positive for r > 0 (row {})", k + 2));
        }
        Ok(Self { r, h, dh })
    }

    /// Parses whitespace- or comma-separated rows `r h h'`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut r, mut h, mut dh) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 3 {
                return Err(Error::WarpTable(format!(
                    "line {}: expected 3 columns (r, h, h'), found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::WarpTable(format!("line {}: cannot parse `{s}`", lineno + 1))
                })
            };
            r.push(parse(cols[0])?);
            h.push(parse(cols[1])?);
            dh.push(parse(cols[2])?);
        }
        Self::new(r, h, dh)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn r_end(&self) -> f64 {
        *self.r.last().expect("validated non-empty")
    }

    /// Hermite interpolant value and derivative at `r` (clamped to the table).
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let k = match self.r.partition_point(|&x| x <= r) {
            0 => 0,
            p if p >= self.r.len() => self.r.len() - 2,
            p => p - 1,
        };
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        let d = r1 - r0;
        let t = (r - r0) / d;
        let (y0, y1, m0, m1) = (self.h[k], self.h[k + 1], self.dh[k], self.dh[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d * m1;
        let slope = (6.0 * t2 - 6.0 * t) * y0 / d
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1 / d
            + (3.0 * t2 - 2.0 * t) * m1;
        (value, slope)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Warp {
    Sin,
    Sinh,
    Identity,
    Table(Arc<WarpTable>),
}

/// A radially symmetric warped product of dimension `n ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    kind: ManifoldKind,
    dim: usize,
    r_max: f64,
    warp: Warp,
}

impl Manifold {
    /// Generic constructor used by configuration parsing.
    pub fn new(
        kind: ManifoldKind,
        dim: usize,
        r_max: Option<f64>,
        table: Option<WarpTable>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Manifold(format!(
                "dimension must be >= 2, got {dim}"
            )));
        }
        let fixed = |expected: f64| -> Result<f64> {
            match r_max {
                None => Ok(expected),
                Some(r) if (r - expected).abs() <= 1e-12 => Ok(expected),
                Some(r) => Err(Error::Manifold(format!(
                    "{kind} has r_max = {expected}, cannot override with {r}"
                ))),
            }
        };
        let truncated = |r: Option<f64>| -> Result<f64> {
            match r {
                Some(r) if r.is_finite() && r > 0.0 => Ok(r),
                Some(r) => Err(Error::Manifold(format!("r_max must be positive, got {r}"))),
                None => Err(Error::Manifold(format!(
                    "{kind} needs a truncation radius r_max"
                ))),
            }
        };
        let (r_max, warp) = match kind {
            ManifoldKind::SphereCap => (fixed(FRAC_PI_2)?, Warp::Sin),
            ManifoldKind::SphereFull => (fixed(PI)?, Warp::Sin),
            ManifoldKind::Hyperbolic => (truncated(r_max)?, Warp::Sinh),
            ManifoldKind::Euclidean => (truncated(r_max)?, Warp::Identity),
            ManifoldKind::Custom => {
                let table = table
                    .ok_or_else(|| Error::Manifold("custom manifold needs a warp table".into()))?;
                let r_end = table.r_end();
                let r_max = match r_max {
                    None => r_end,
                    Some(r) if r > 0.0 && r <= r_end + 1e-12 => r.min(r_end),
                    Some(r) => {
                        return Err(Error::Manifold(format!(
                            "r_max {r} outside the tabulated range (0, {r_end}]"
                        )))
                    }
                };
                (r_max, Warp::Table(Arc::new(table)))
            }
        };
        Ok(Self {
            kind,
            dim,
            r_max,
            warp,
        })
    }

    pub fn sphere_cap(dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::SphereCap, dim, None, None)
    }

    pub fn sphere_full(dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::SphereFull, dim, None, None)
    }

    pub fn hyperbolic(dim: usize, r_max: f64) -> Result<Self> {
        Self::new(ManifoldKind::Hyperbolic, dim, Some(r_max), None)
    }

    pub fn euclidean(dim: usize, r_max: f64) -> Result<Self> {
        Self::new(ManifoldKind::Euclidean, dim, Some(r_max), None)
    }

    pub fn custom(dim: usize, table: WarpTable, r_max: Option<f64>) -> Result<Self> {
        Self::new(ManifoldKind::Custom, dim, r_max, Some(table))
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `ω_{n-1}`, area of the unit `(n-1)`-sphere fibre.
    pub fn fibre_area(&self) -> f64 {
        unit_sphere_area(self.dim)
    }

    /// Whether the manifold is non-compact and only truncated numerically.
    pub fn is_truncated(&self) -> bool {
        matches!(
            self.kind,
            ManifoldKind::Hyperbolic | ManifoldKind::Euclidean
        )
    }

    pub fn default_outer_boundary(&self) -> OuterBoundary {
        match self.kind {
            ManifoldKind::SphereFull => OuterBoundary::ZeroFlux,
            _ => OuterBoundary::Dirichlet,
        }
    }

    /// `(h(r), h'(r))` for `0 ≤ r ≤ r_max`.
    pub fn warp_eval(&self, r: f64) -> Result<(f64, f64)> {
        let slack = 1e-12 * self.r_max.max(1.0);
        if !(r >= -slack && r <= self.r_max + slack) {
            return Err(Error::Domain {
                r,
                r_max: self.r_max,
            });
        }
        Ok(self.warp_unchecked(r.clamp(0.0, self.r_max)))
    }

    pub(crate) fn warp_unchecked(&self, r: f64) -> (f64, f64) {
        match &self.warp {
            Warp::Sin => {
                // exact values at the equator and the antipode
                if r == FRAC_PI_2 {
                    (1.0, 0.0)
                } else if r == PI {
                    (0.0, -1.0)
                } else {
                    (r.sin(), r.cos())
                }
            }
            Warp::Sinh => (r.sinh(), r.cosh()),
            Warp::Identity => (r, 1.0),
            Warp::Table(t) => t.eval(r),
        }
    }

    /// `h(r)^{n-1}`.
    pub(crate) fn area_density(&self, r: f64) -> f64 {
        self.warp_unchecked(r).0.powi(self.dim as i32 - 1)
    }
}

/// Cell-centred radial discretisation of `(0, r_max)`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    manifold: Manifold,
    dr: f64,
    centers: Vec<f64>,
    /// `w_j = ω ∫_{cell j} h^{n-1} dr`.
    weights: Vec<f64>,
    /// `A_k = ω h^{n-1}(k Δr)` for faces `k = 0..=N`; `A_0 = 0`.
    face_area: Vec<f64>,
    outer: OuterBoundary,
    laplacian: Tridiagonal,
}

impl RadialGrid {
    pub const MIN_CELLS: usize = 4;

    /// Grid with the manifold's natural outer boundary.
    pub fn new(manifold: &Manifold, cells: usize) -> Result<Self> {
        Self::with_boundary(manifold, cells, manifold.default_outer_boundary())
    }

    pub fn with_boundary(manifold: &Manifold, cells: usize, outer: OuterBoundary) -> Result<Self> {
        if cells < Self::MIN_CELLS {
            return Err(Error::Manifold(format!(
                "grid needs at least {} cells, got {cells}",
                Self::MIN_CELLS
            )));
        }
        let r_max = manifold.r_max();
        let dr = r_max / cells as f64;
        let omega = manifold.fibre_area();
        let centers: Vec<f64> = (0..cells).map(|j| (j as f64 + 0.5) * dr).collect();
        let weights: Vec<f64> = (0..cells)
            .map(|j| {
                let a = j as f64 * dr;
                let b = if j + 1 == cells {
                    r_max
                } else {
                    (j + 1) as f64 * dr
                };
                omega * gauss_legendre5(a, b, |r| manifold.area_density(r))
            })
            .collect();
        if let Some(j) = weights.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Manifold(format!(
                "non-positive cell measure at r = {} (warp must be positive on (0, r_max])",
                centers[j]
            )));
        }
        let mut face_area: Vec<f64> = (0..=cells)
            .map(|k| {
                let r = if k == cells { r_max } else { k as f64 * dr };
                omega * manifold.area_density(r)
            })
            .collect();
        face_area[0] = 0.0;
        if manifold.kind() == ManifoldKind::SphereFull {
            face_area[cells] = 0.0;
        }

        let mut lower = vec![0.0; cells];
        let mut diag = vec![0.0; cells];
        let mut upper = vec![0.0; cells];
        for j in 0..cells {
            let scale = 1.0 / (dr * weights[j]);
            if j > 0 {
                lower[j] = face_area[j] * scale;
            }
            if j + 1 < cells {
                upper[j] = face_area[j + 1] * scale;
            }
            diag[j] = -(lower[j] + upper[j]);
        }
        if outer == OuterBoundary::Dirichlet {
            // ghost u_N = -u_{N-1} puts the zero on the outer face
            diag[cells - 1] -= 2.0 * face_area[cells] / (dr * weights[cells - 1]);
        }
        Ok(Self {
            manifold: manifold.clone(),
            dr,
            centers,
            weights,
            face_area,
            outer,
            laplacian: Tridiagonal { lower, diag, upper },
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn r_max(&self) -> f64 {
        self.manifold.r_max()
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_area
    }

    pub fn outer_boundary(&self) -> OuterBoundary {
        self.outer
    }

    /// Discrete Laplacian as a tridiagonal matrix acting on cell values.
    pub fn laplacian_matrix(&self) -> &Tridiagonal {
        &self.laplacian
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.centers.iter().map(|&r| f(r)).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.cells() {
            return Err(Error::Shape {
                expected: self.cells(),
                got: len,
            });
        }
        Ok(())
    }

    /// `(1/h^{n-1}) (h^{n-1} f')'` discretised with face fluxes.
    pub fn laplacian<T>(&self, f: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Default + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        self.check_len(f.len())?;
        let mut out = vec![T::default(); f.len()];
        self.laplacian.apply(f, &mut out);
        Ok(out)
    }

    /// `Σ_j f_j conj(g_j) w_j`.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        self.check_len(f.len())?;
        self.check_len(g.len())?;
        Ok(f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum())
    }

    /// `∫ |f|² dV`.
    pub fn norm_sq(&self, f: &[Complex64]) -> f64 {
        f.iter()
            .zip(&self.weights)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum()
    }

    /// `∫ |f_r|² dV` from face differences; the Dirichlet half-cell next to
    /// the outer face is included so that `⟨-Δf, f⟩ = grad_norm_sq(f)`.
    pub fn grad_norm_sq(&self, f: &[Complex64]) -> Result<f64> {
        self.check_len(f.len())?;
        let n = f.len();
        let mut sum = 0.0;
        for k in 1..n {
            sum += self.face_area[k] * (f[k] - f[k - 1]).norm_sqr();
        }
        sum /= self.dr;
        if self.outer == OuterBoundary::Dirichlet {
            sum += 2.0 * self.face_area[n] * f[n - 1].norm_sqr() / self.dr;
        }
        Ok(sum)
    }

    /// Radial derivative at the outer face, second order from the two outermost
    /// cells and the boundary zero. Zero for a zero-flux boundary.
    pub fn outer_gradient(&self, f: &[Complex64]) -> Complex64 {
        let n = f.len();
        match self.outer {
            OuterBoundary::Dirichlet => -(f[n - 1] * 9.0 - f[n - 2]) / (3.0 * self.dr),
            OuterBoundary::ZeroFlux => Complex64::new(0.0, 0.0),
        }
    }
}

/// Convenience wrapper over [`Manifold::warp_eval`].
pub fn warp_eval(manifold: &Manifold, r: f64) -> Result<(f64, f64)> {
    manifold.warp_eval(r)
}
