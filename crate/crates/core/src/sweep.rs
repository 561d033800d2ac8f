//! Parallel parameter sweeps over `(p, amplitude factor, cells, dt)`.
//!
//! Each point is an isolated, single-threaded run; results come back in
//! axis order (p outermost, dt innermost) whatever order they finish in,
//! so the phase table is reproducible byte for byte.

use rayon::prelude::*;

use crate::config::SweepAxes;
use crate::error::{Error, Result};
use crate::output::PhaseRow;
use crate::solver::{Amplitude, RunConfig, RunResult, Simulation};

/// Environment variable capping the number of sweep threads.
pub const THREADS_ENV: &str = "NLSLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    /// Multiple of the zero-energy amplitude `A*`.
    pub factor: f64,
    pub cells: usize,
    pub dt: f64,
}

impl SweepPoint {
    pub fn config(&self, base: &RunConfig) -> RunConfig {
        let mut c = base.clone();
        c.p = self.p;
        c.cells = self.cells;
        c.dt = self.dt;
        c.amplitude = Amplitude::AutoScale {
            margin: self.factor - 1.0,
        };
        c
    }
}

pub fn points(axes: &SweepAxes) -> Vec<SweepPoint> {
    let mut out = Vec::with_capacity(axes.len());
    for &p in &axes.p {
        for &factor in &axes.amplitude {
            for &cells in &axes.cells {
                for &dt in &axes.dt {
                    out.push(SweepPoint {
                        p,
                        factor,
                        cells,
                        dt,
                    });
                }
            }
        }
    }
    out
}

/// Result for one sweep point.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub point: SweepPoint,
    pub row: PhaseRow,
    /// `None` when the run failed; the reason is in `row.error`.
    pub result: Option<RunResult>,
}

fn run_point(base: &RunConfig, point: SweepPoint) -> SweepRun {
    let failed = |e: Error| SweepRun {
        point,
        row: PhaseRow {
            p: point.p,
            amplitude: f64::NAN,
            e0: f64::NAN,
            outcome: "error".into(),
            time: f64::NAN,
            cells: point.cells,
            dt: point.dt,
            error: Some(e.to_string()),
        },
        result: None,
    };
    let sim = match Simulation::new(point.config(base)) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let amplitude = sim.amplitude();
    match sim.run() {
        Ok(res) => SweepRun {
            point,
            row: PhaseRow {
                p: point.p,
                amplitude,
                e0: res.e0,
                outcome: res.outcome.name().into(),
                time: res.outcome.time().unwrap_or(res.final_state.t),
                cells: point.cells,
                dt: point.dt,
                error: None,
            },
            result: Some(res),
        },
        Err(e) => {
            let mut r = failed(e);
            r.row.amplitude = amplitude;
            r
        }
    }
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Runs every point of `axes`. Failures are recorded per row; the sweep
/// itself only fails on an empty axis or a thread-pool error.
pub fn run_sweep(
    base: &RunConfig,
    axes: &SweepAxes,
    threads: Option<usize>,
) -> Result<Vec<SweepRun>> {
    if axes.is_empty() {
        return Err(Error::Config("sweep has an empty axis".into()));
    }
    let pts = points(axes);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| pts.par_iter().map(|&pt| run_point(base, pt)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Manifold;
    use crate::solver::Profile;

    fn axes() -> SweepAxes {
        SweepAxes {
            p: vec![3.0, 5.0],
            amplitude: vec![0.5, 1.1],
            cells: vec![32],
            dt: vec![1e-3],
        }
    }

    #[test]
    fn order_and_determinism() {
        let mut base = RunConfig::new(Manifold::sphere_cap(2).unwrap(), Profile::ZonalCos);
        base.t_max = 0.02;
        let a = run_sweep(&base, &axes(), Some(3)).unwrap();
        let b = run_sweep(&base, &axes(), Some(1)).unwrap();
        assert_eq!(a.len(), 4);
        let ps: Vec<f64> = a.iter().map(|r| r.point.p).collect();
        assert_eq!(ps, vec![3.0, 3.0, 5.0, 5.0]);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.row, y.row);
        }
        assert!(a[0].row.e0 > 0.0 && a[1].row.e0 < 0.0);
    }

    #[test]
    fn empty_axis_and_bad_points() {
        let base = RunConfig::new(Manifold::sphere_cap(2).unwrap(), Profile::ZonalCos);
        let mut ax = axes();
        ax.amplitude.clear();
        assert!(run_sweep(&base, &ax, None).is_err());
        let ax = SweepAxes {
            p: vec![5.0],
            amplitude: vec![1.0],
            cells: vec![4],
            dt: vec![1e-3],
        };
        let runs = run_sweep(&base, &ax, None).unwrap();
        assert!(runs[0].result.is_none() && runs[0].row.error.is_some());
    }
}
