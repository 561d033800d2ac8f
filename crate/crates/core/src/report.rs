//! Post-hoc analysis of a diagnostics series.

use std::fmt;

use crate::diagnostics::{
    blowup_time_bound, concavity_slack, concavity_tolerance, DiagnosticsRecord,
};
use crate::error::{Error, Result};
use crate::output::Summary;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: usize,
    pub t_first: f64,
    pub t_last: f64,
    /// `max |M(t) - M(0)| / M(0)`, absolute when `M(0) = 0`.
    pub mass_drift: f64,
    /// Same for the energy.
    pub energy_drift: f64,
    /// Over records where the difference quotient exists.
    pub max_jprime_gap: f64,
    pub max_jsecond_gap: f64,
    /// Hessian bound, from the summary.
    pub c: Option<f64>,
    /// `min (4cE₀ - J'')`, needs `c`.
    pub min_slack: Option<f64>,
    pub concavity_tolerance: f64,
    pub t_star: Option<f64>,
    /// Blow-up time recorded in the summary.
    pub blowup_time: Option<f64>,
    /// Every functional is identically zero.
    pub zero_field: bool,
}

fn relative_drift(values: impl Iterator<Item = f64>, first: f64) -> f64 {
    let scale = if first != 0.0 { first.abs() } else { 1.0 };
    values
        .map(|v| (v - first).abs() / scale)
        .fold(0.0, f64::max)
}

fn max_gap(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> (f64, f64)) -> f64 {
    records
        .iter()
        .map(&f)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Analyses `records`, optionally using the run summary for `c` and the
/// detected blow-up time.
pub fn analyze(records: &[DiagnosticsRecord], summary: Option<&Summary>) -> Result<Report> {
    let first = records
        .first()
        .ok_or_else(|| Error::Malformed("empty diagnostics series".into()))?;
    let last = records.last().unwrap_or(first);
    let e0 = first.energy;
    let c = match summary {
        Some(s) => s.number("c")?,
        None => None,
    };
    let blowup_time = match summary {
        Some(s) => s.number("blowup_time")?,
        None => None,
    };
    let min_slack = c.map(|c| {
        records
            .iter()
            .map(|r| concavity_slack(r, e0, c))
            .fold(f64::INFINITY, f64::min)
    });
    let t_star = c.and_then(|c| blowup_time_bound(first.j, first.jprime_id, e0, c));
    let zero_field = records
        .iter()
        .all(|r| r.values()[1..].iter().all(|&x| x == 0.0 || x.is_nan()));
    Ok(Report {
        records: records.len(),
        t_first: first.t,
        t_last: last.t,
        mass_drift: relative_drift(records.iter().map(|r| r.mass), first.mass),
        energy_drift: relative_drift(records.iter().map(|r| r.energy), e0),
        max_jprime_gap: max_gap(records, |r| (r.jprime_id, r.jprime_fd)),
        max_jsecond_gap: max_gap(records, |r| (r.jsecond_id, r.jsecond_fd)),
        c,
        min_slack,
        concavity_tolerance: concavity_tolerance(e0),
        t_star,
        blowup_time,
        zero_field,
    })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        writeln!(
            f,
            "records            {} (t = {} .. {})",
            self.records, self.t_first, self.t_last
        )?;
        if self.zero_field {
            writeln!(f, "zero field         all functionals identically 0")?;
        }
        writeln!(f, "mass drift         {:.3e}", self.mass_drift)?;
        writeln!(f, "energy drift       {:.3e}", self.energy_drift)?;
        writeln!(f, "max |J'_id - J'_fd|   {:.3e}", self.max_jprime_gap)?;
        writeln!(f, "max |J''_id - J''_fd| {:.3e}", self.max_jsecond_gap)?;
        writeln!(f, "c                  {}", opt(self.c))?;
        writeln!(
            f,
            "min slack          {} (tolerance {:.3e})",
            opt(self.min_slack),
            self.concavity_tolerance
        )?;
        writeln!(f, "T_star             {}", opt(self.t_star))?;
        write!(f, "blow-up time       {}", opt(self.blowup_time))?;
        if let (Some(tb), Some(ts)) = (self.blowup_time, self.t_star) {
            write!(
                f,
                " ({} T_star)",
                if tb < ts { "before" } else { "NOT before" }
            )?;
        }
        writeln!(f)
    }
}
