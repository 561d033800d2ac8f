//! Strang-split Crank–Nicolson integration of `i u_t = Δu + |u|^{p-1} u`
//! for radial fields, and the run loop that drives it.
//!
//! The nonlinear half steps are the exact flow `u ↦ u·exp(-i|u|^{p-1}τ)`;
//! the linear step is the Cayley transform of the discrete Laplacian, which
//! is unitary in the weighted inner product because `Δ_d` is self-adjoint
//! there. Both pieces conserve the discrete mass exactly.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::geometry::{Manifold, OuterBoundary, RadialGrid};
use crate::tridiag::{ShiftedFactor, Tridiagonal};
use crate::weight::{self, ThresholdReport, WeightFunction};

/// Complex radial field at time `t` for the power `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub u: Vec<Complex64>,
    pub t: f64,
    pub p: f64,
}

impl WaveState {
    pub fn new(u: Vec<Complex64>, p: f64) -> Self {
        Self { u, t: 0.0, p }
    }

    pub fn from_real(v: &[f64], amplitude: f64, p: f64) -> Self {
        Self::new(
            v.iter()
                .map(|&x| Complex64::new(amplitude * x, 0.0))
                .collect(),
            p,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Two-column `(r, v)` table, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl ProfileTable {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() || r.len() < 2 {
            return Err(Error::Profile(
                "table needs at least two (r, v) rows".into(),
            ));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Profile(
                "table radii must be strictly increasing".into(),
            ));
        }
        if r.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Profile("table contains non-finite values".into()));
        }
        Ok(Self { r, v })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Profile(format!(
                    "line {}: expected 2 columns, found {}",
                    no + 1,
                    cols.len()
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Profile(format!("line {}: bad number {s:?}", no + 1)))
            };
            r.push(num(cols[0])?);
            v.push(num(cols[1])?);
        }
        Self::new(r, v)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self
            .r
            .partition_point(|&ri| ri <= x)
            .clamp(1, self.r.len() - 1);
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let s = (x - r0) / (r1 - r0);
        self.v[k - 1] + s * (self.v[k] - self.v[k - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `cos r`, odd about `π/2`.
    ZonalCos,
    /// `exp(-(r - center)² / (2 width²))`.
    GaussianBump {
        center: f64,
        width: f64,
    },
    Table(ProfileTable),
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::ZonalCos => "zonal_cos",
            Profile::GaussianBump { .. } => "gaussian_bump",
            Profile::Table(_) => "table",
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::ZonalCos => r.cos(),
            Profile::GaussianBump { center, width } => {
                let z = (r - center) / width;
                (-0.5 * z * z).exp()
            }
            Profile::Table(t) => t.eval(r),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::GaussianBump { center, width } => {
                write!(f, "gaussian_bump(center={center}, width={width})")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Samples `profile` at the cell centres, rejecting data that does not
/// vanish on a Dirichlet boundary.
pub fn initial_profile(profile: &Profile, grid: &RadialGrid) -> Result<Vec<f64>> {
    if let Profile::GaussianBump { width, .. } = profile {
        if !(*width > 0.0) {
            return Err(Error::Profile(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
    }
    if let Profile::Table(t) = profile {
        let (a, b) = t.r_range();
        if a > 0.0 || b < grid.r_max() {
            return Err(Error::Profile(format!(
                "table covers [{a}, {b}] but the grid needs [0, {}]",
                grid.r_max()
            )));
        }
    }
    let v = grid.sample(|r| profile.eval(r));
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Profile("profile is not finite on the grid".into()));
    }
    if grid.outer_boundary() == OuterBoundary::Dirichlet {
        let edge = profile.eval(grid.r_max()).abs();
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
        if edge > 1e-8 * scale {
            return Err(Error::Profile(format!(
                "{profile} is {edge:e} at the Dirichlet boundary r = {}",
                grid.r_max()
            )));
        }
    }
    Ok(v)
}

/// Amplitude at which a profile's energy changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyScaling {
    /// `K = ∫|v_r|² dV`.
    pub kinetic: f64,
    /// `P = ∫|v|^{p+1} dV`.
    pub potential: f64,
    /// `A* = ((p+1)K / (2P))^{1/(p-1)}`, where `E(A*v) = 0`.
    pub threshold: f64,
    /// `(1 + margin) A*`.
    pub amplitude: f64,
}

pub fn scale_to_negative_energy(
    v: &[f64],
    p: f64,
    grid: &RadialGrid,
    margin: f64,
) -> Result<EnergyScaling> {
    if !(p > 1.0) {
        return Err(Error::Config(format!("power must exceed 1, got {p}")));
    }
    let field: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let kinetic = grid.grad_norm_sq(&field)?;
    let potential = diagnostics::potential_integral(&field, p, grid);
    if !(potential > 0.0) {
        return Err(Error::NoScaling);
    }
    let threshold = ((p + 1.0) * kinetic / (2.0 * potential)).powf(1.0 / (p - 1.0));
    Ok(EnergyScaling {
        kinetic,
        potential,
        threshold,
        amplitude: (1.0 + margin) * threshold,
    })
}

/// One Strang step: nonlinear half step, Crank–Nicolson linear step,
/// nonlinear half step.
#[derive(Debug, Clone)]
pub struct Stepper {
    matrix: Tridiagonal,
    factor: ShiftedFactor,
    dt: f64,
    tol: f64,
    p: f64,
    nonlinear: bool,
}

/// Refinement sweeps allowed before a solve is declared failed.
const REFINEMENTS: usize = 3;

impl Stepper {
    pub fn new(grid: &RadialGrid, p: f64, dt: f64, tol: f64, nonlinear: bool) -> Self {
        let matrix = grid.laplacian_matrix().clone();
        let factor = ShiftedFactor::new(&matrix, 0.5 * dt);
        Self {
            matrix,
            factor,
            dt,
            tol,
            p,
            nonlinear,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn phase(&self, u: &mut [Complex64], tau: f64) {
        if !self.nonlinear {
            return;
        }
        for z in u.iter_mut() {
            let rate = z.norm().powf(self.p - 1.0);
            *z *= Complex64::from_polar(1.0, -rate * tau);
        }
    }

    /// `(I + iαL) x`.
    fn apply_implicit(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.matrix.apply(x, out);
        let ia = Complex64::new(0.0, self.factor.alpha());
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi + ia * *o;
        }
    }

    /// Advances `state` by `dt`. On a solve failure `state` is untouched.
    pub fn step(&self, state: &mut WaveState) -> Result<()> {
        let n = state.u.len();
        let mut u = state.u.clone();
        self.phase(&mut u, 0.5 * self.dt);

        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        self.matrix.apply(&u, &mut rhs);
        let ia = Complex64::new(0.0, self.factor.alpha());
        for (r, ui) in rhs.iter_mut().zip(&u) {
            *r = ui - ia * *r;
        }
        let mut x = rhs.clone();
        self.factor.solve_in_place(&mut x);

        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            let scale = rhs.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            let mut ax = vec![Complex64::new(0.0, 0.0); n];
            let mut residual = f64::INFINITY;
            for sweep in 0..=REFINEMENTS {
                self.apply_implicit(&x, &mut ax);
                let mut res: Vec<Complex64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
                residual = if scale > 0.0 {
                    res.iter().fold(0.0_f64, |m, z| m.max(z.norm())) / scale
                } else {
                    0.0
                };
                if residual <= self.tol || sweep == REFINEMENTS {
                    break;
                }
                self.factor.solve_in_place(&mut res);
                for (xi, d) in x.iter_mut().zip(&res) {
                    *xi += d;
                }
            }
            if !(residual <= self.tol) {
                return Err(Error::LinearSolve {
                    t: state.t + self.dt,
                    residual,
                    tol: self.tol,
                });
            }
        }
        self.phase(&mut x, 0.5 * self.dt);
        state.u = x;
        state.t += self.dt;
        Ok(())
    }
}

/// Single Strang step of length `dt` with the nonlinearity on.
pub fn strang_step(state: &WaveState, dt: f64, grid: &RadialGrid, tol: f64) -> Result<WaveState> {
    if state.u.len() != grid.cells() {
        return Err(Error::Shape {
            expected: grid.cells(),
            got: state.u.len(),
        });
    }
    let mut next = state.clone();
    Stepper::new(grid, state.p, dt, tol, true).step(&mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    Fixed(f64),
    /// `(1 + margin)` times the zero-energy amplitude.
    AutoScale {
        margin: f64,
    },
}

/// Everything needed for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifold: Manifold,
    /// Overrides the manifold's natural outer boundary.
    pub outer_boundary: Option<OuterBoundary>,
    pub cells: usize,
    pub p: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Relative residual accepted from each linear solve.
    pub tol: f64,
    /// Halve `dt` whenever `‖∇u‖` doubles (floor `dt/1024`).
    pub adaptive_dt: bool,
    /// `false` drops the nonlinear phase, leaving the linear flow.
    pub nonlinear: bool,
    /// Blow-up is flagged once `‖∇u‖₂` exceeds this.
    pub blowup_threshold: f64,
    /// Steps between diagnostics records.
    pub stride: usize,
    pub profile: Profile,
    pub amplitude: Amplitude,
}

impl RunConfig {
    pub const MIN_CELLS: usize = 16;
    /// Number of times `dt` may be halved.
    pub const MAX_HALVINGS: u32 = 10;

    pub fn new(manifold: Manifold, profile: Profile) -> Self {
        Self {
            manifold,
            outer_boundary: None,
            cells: 512,
            p: 5.0,
            dt: 1e-4,
            t_max: 1.0,
            tol: 1e-10,
            adaptive_dt: true,
            nonlinear: true,
            blowup_threshold: 50.0,
            stride: 10,
            profile,
            amplitude: Amplitude::AutoScale { margin: 0.1 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.cells < Self::MIN_CELLS {
            return bad(format!(
                "need at least {} cells, got {}",
                Self::MIN_CELLS,
                self.cells
            ));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return bad(format!("t_max must be non-negative, got {}", self.t_max));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return bad(format!("power must exceed 1, got {}", self.p));
        }
        if !(self.tol > 0.0) {
            return bad(format!(
                "solver tolerance must be positive, got {}",
                self.tol
            ));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!(
                "blow-up threshold must be positive, got {}",
                self.blowup_threshold
            ));
        }
        if self.stride == 0 {
            return bad("output stride must be at least 1".into());
        }
        match self.amplitude {
            Amplitude::Fixed(a) if !a.is_finite() => bad(format!("amplitude {a} is not finite")),
            Amplitude::AutoScale { margin } if !(margin > -1.0) => {
                bad(format!("margin must exceed -1, got {margin}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    BlowupDetected(f64),
    Overflow(f64),
    StepFailure(f64),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::BlowupDetected(_) => "blowup_detected",
            Outcome::Overflow(_) => "overflow",
            Outcome::StepFailure(_) => "step_failure",
        }
    }

    /// Time attached to the outcome, if any.
    pub fn time(&self) -> Option<f64> {
        match *self {
            Outcome::Completed => None,
            Outcome::BlowupDetected(t) | Outcome::Overflow(t) | Outcome::StepFailure(t) => Some(t),
        }
    }

    /// Blow-up detected or overflow.
    pub fn is_blowup(&self) -> bool {
        matches!(self, Outcome::BlowupDetected(_) | Outcome::Overflow(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.time() {
            Some(t) => write!(f, "{}({t})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// A configured run: grid, weight, initial state and thresholds.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: RunConfig,
    grid: RadialGrid,
    weight: WeightFunction,
    state: WaveState,
    amplitude: f64,
    scaling: Option<EnergyScaling>,
    thresholds: Option<ThresholdReport>,
    warnings: Vec<String>,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let outer = config
            .outer_boundary
            .unwrap_or_else(|| config.manifold.default_outer_boundary());
        let grid = RadialGrid::with_boundary(&config.manifold, config.cells, outer)?;
        let weight = weight::build(&config.manifold, &grid)?;
        let v = initial_profile(&config.profile, &grid)?;
        let scaling = match config.amplitude {
            Amplitude::AutoScale { margin } => {
                Some(scale_to_negative_energy(&v, config.p, &grid, margin)?)
            }
            Amplitude::Fixed(_) => scale_to_negative_energy(&v, config.p, &grid, 0.0).ok(),
        };
        let amplitude = match config.amplitude {
            Amplitude::Fixed(a) => a,
            Amplitude::AutoScale { .. } => scaling.expect("auto-scale computed above").amplitude,
        };
        let state = WaveState::from_real(&v, amplitude, config.p);
        let grad = grid.grad_norm_sq(&state.u)?.sqrt();
        if !(config.blowup_threshold > grad) {
            return Err(Error::Config(format!(
                "blow-up threshold {} must exceed the initial gradient norm {grad}",
                config.blowup_threshold
            )));
        }

        let mut warnings = Vec::new();
        let thresholds = match weight::tau_bounds(&config.manifold, &grid) {
            Ok(t) => Some(t),
            Err(e) => {
                warnings.push(format!("threshold analysis unavailable: {e}"));
                None
            }
        };
        if let Some(t) = &thresholds {
            if let Some((r, q)) = t.violation {
                warnings.push(format!("pinching ratio q = {q} leaves [0, 1] at r = {r}"));
            }
            if !weight::nonlinearity_admissible(config.p, t.kappa_min) {
                warnings.push(format!(
                    "p = {} gives kappa = {} below kappa_min = {}; blow-up is not predicted",
                    config.p,
                    weight::kappa_for_power(config.p),
                    t.kappa_min
                ));
            }
        }
        Ok(Self {
            config,
            grid,
            weight,
            state,
            amplitude,
            scaling,
            thresholds,
            warnings,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn state(&self) -> &WaveState {
        &self.state
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn scaling(&self) -> Option<EnergyScaling> {
        self.scaling
    }

    pub fn thresholds(&self) -> Option<&ThresholdReport> {
        self.thresholds.as_ref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `κ(p) ≥ κ_min` for this manifold.
    pub fn admissible(&self) -> bool {
        self.thresholds
            .as_ref()
            .is_some_and(|t| weight::nonlinearity_admissible(self.config.p, t.kappa_min))
    }

    pub fn run(self) -> Result<RunResult> {
        let cfg = &self.config;
        let grid = &self.grid;
        let w = &self.weight;
        let mut state = self.state.clone();

        let first = diagnostics::record(&state, w, grid)?;
        let mut records = vec![first];
        let threshold_sq = cfg.blowup_threshold * cfg.blowup_threshold;
        let dt_min = cfg.dt / 2f64.powi(Self::halvings());
        let eps = 1e-9 * cfg.dt;

        let mut dt = cfg.dt;
        let mut stepper = Stepper::new(grid, cfg.p, dt, cfg.tol, cfg.nonlinear);
        let mut t_seg = 0.0;
        let mut k_seg: u64 = 0;
        let mut g_ref = first.grad_sq.sqrt();
        let mut steps: u64 = 0;
        let mut outcome = Outcome::Completed;

        while state.t < cfg.t_max - eps {
            let remaining = cfg.t_max - state.t;
            let clipped = remaining < dt - eps;
            let result = if clipped {
                Stepper::new(grid, cfg.p, remaining, cfg.tol, cfg.nonlinear).step(&mut state)
            } else {
                stepper.step(&mut state)
            };
            match result {
                Ok(()) => {}
                Err(Error::LinearSolve { t, .. }) => {
                    outcome = Outcome::StepFailure(t);
                    break;
                }
                Err(e) => return Err(e),
            }
            steps += 1;
            k_seg += 1;
            state.t = if clipped {
                cfg.t_max
            } else {
                t_seg + k_seg as f64 * dt
            };

            if !state.is_finite() {
                records.push(diagnostics::record(&state, w, grid)?);
                outcome = Outcome::Overflow(state.t);
                break;
            }
            let grad_sq = grid.grad_norm_sq(&state.u)?;
            if !grad_sq.is_finite() {
                records.push(diagnostics::record(&state, w, grid)?);
                outcome = Outcome::Overflow(state.t);
                break;
            }
            if grad_sq > threshold_sq {
                records.push(diagnostics::record(&state, w, grid)?);
                outcome = Outcome::BlowupDetected(state.t);
                break;
            }
            if steps.is_multiple_of(cfg.stride as u64) || state.t >= cfg.t_max - eps {
                records.push(diagnostics::record(&state, w, grid)?);
            }
            let g = grad_sq.sqrt();
            if cfg.adaptive_dt && g >= 2.0 * g_ref && 0.5 * dt >= dt_min * (1.0 - 1e-12) {
                dt *= 0.5;
                stepper = Stepper::new(grid, cfg.p, dt, cfg.tol, cfg.nonlinear);
                t_seg = state.t;
                k_seg = 0;
                g_ref = g;
            }
        }
        diagnostics::fill_finite_differences(&mut records);

        let e0 = first.energy;
        let c = w.hessian_bound();
        let t_star = diagnostics::blowup_time_bound(first.j, first.jprime_id, e0, c);
        let mass0 = first.mass;
        let max_mass_drift = records
            .iter()
            .map(|r| {
                if mass0 > 0.0 {
                    (r.mass - mass0).abs() / mass0
                } else {
                    r.mass.abs()
                }
            })
            .fold(0.0, f64::max);
        let min_slack = records
            .iter()
            .map(|r| diagnostics::concavity_slack(r, e0, c))
            .fold(f64::INFINITY, f64::min);
        let growth_exponent =
            diagnostics::detect_blowup(&records, cfg.blowup_threshold).growth_exponent;
        let admissible = self.admissible();
        Ok(RunResult {
            records,
            outcome,
            e0,
            j0: first.j,
            jp0: first.jprime_id,
            c,
            t_star,
            amplitude: self.amplitude,
            scaling: self.scaling,
            thresholds: self.thresholds.clone(),
            admissible,
            warnings: self.warnings.clone(),
            steps,
            final_dt: dt,
            max_mass_drift,
            min_slack,
            concavity_tolerance: diagnostics::concavity_tolerance(e0),
            growth_exponent,
            final_state: state,
        })
    }

    fn halvings() -> i32 {
        RunConfig::MAX_HALVINGS as i32
    }
}

/// Output of [`Simulation::run`].
#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<DiagnosticsRecord>,
    pub outcome: Outcome,
    pub e0: f64,
    pub j0: f64,
    pub jp0: f64,
    /// Hessian bound of the weight.
    pub c: f64,
    /// Upper bound on the existence time, when `E₀ < 0`.
    pub t_star: Option<f64>,
    pub amplitude: f64,
    pub scaling: Option<EnergyScaling>,
    pub thresholds: Option<ThresholdReport>,
    /// `κ(p) ≥ κ_min`.
    pub admissible: bool,
    pub warnings: Vec<String>,
    pub steps: u64,
    pub final_dt: f64,
    /// Largest relative mass deviation over the records.
    pub max_mass_drift: f64,
    /// Smallest `4cE₀ - J''` over the records.
    pub min_slack: f64,
    pub concavity_tolerance: f64,
    pub growth_exponent: Option<f64>,
    pub final_state: WaveState,
}

impl RunResult {
    /// Mass drift allowed for a run of `steps` steps.
    pub fn mass_tolerance(&self) -> f64 {
        1e-10 * (self.steps as f64 / 1000.0).max(1.0)
    }

    /// Whether the concavity prediction applies: admissible power and
    /// negative energy.
    pub fn concavity_applies(&self) -> bool {
        self.admissible && self.e0 < 0.0
    }

    /// Reasons the run violates a conservation law or the concavity chain.
    pub fn identity_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.max_mass_drift <= self.mass_tolerance()) {
            out.push(format!(
                "relative mass drift {:e} exceeds {:e}",
                self.max_mass_drift,
                self.mass_tolerance()
            ));
        }
        if self.concavity_applies() && !(self.min_slack >= -self.concavity_tolerance) {
            out.push(format!(
                "concavity slack {:e} below -{:e}",
                self.min_slack, self.concavity_tolerance
            ));
        }
        out
    }
}
