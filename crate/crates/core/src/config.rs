//! Flat `key = value` experiment files with dotted section names.
//!
//! ```text
//! # flagship hemisphere run
//! manifold.kind = sphere_cap
//! manifold.dim = 2
//! grid.cells = 512
//! solver.p = 5
//! solver.dt = 2e-5
//! profile.name = zonal_cos
//! profile.margin = 0.1
//! ```
//!
//! Relative paths (`manifold.warp_table`, `profile.table`) resolve against
//! the directory holding the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Manifold, ManifoldKind, OuterBoundary, WarpTable};
use crate::solver::{Amplitude, Profile, ProfileTable, RunConfig};

/// Every key the parser understands.
pub const KEYS: &[&str] = &[
    "manifold.kind",
    "manifold.dim",
    "manifold.rmax",
    "manifold.warp_table",
    "manifold.outer_bc",
    "grid.cells",
    "solver.p",
    "solver.dt",
    "solver.t_max",
    "solver.tol",
    "solver.adaptive_dt",
    "solver.nonlinear",
    "solver.blowup_threshold",
    "output.stride",
    "profile.name",
    "profile.center",
    "profile.width",
    "profile.table",
    "profile.amplitude",
    "profile.auto_scale",
    "profile.margin",
    "sweep.p",
    "sweep.amplitude",
    "sweep.cells",
    "sweep.dt",
];

/// Raw key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
    base_dir: Option<PathBuf>,
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    no + 1
                ))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{key}`",
                    no + 1
                )));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::Config(format!(
                    "line {}: duplicate key `{key}`",
                    no + 1
                )));
            }
        }
        Ok(Self {
            entries,
            base_dir: None,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut map = Self::parse(&text)?;
        map.base_dir = path.parent().map(Path::to_path_buf);
        Ok(map)
    }

    /// Sets or overrides a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let p = PathBuf::from(self.get(key)?);
        Some(match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p,
        })
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse {v:?}"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(Error::Config(format!(
                    "`{key}`: expected a boolean, got {v:?}"
                ))),
            },
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let items: Vec<&str> = v
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(Error::Config(format!("`{key}`: sweep axis is empty")));
        }
        items
            .iter()
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::Config(format!("`{key}`: cannot parse {s:?}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// The manifold described by the `manifold.*` keys.
    pub fn manifold(&self) -> Result<Manifold> {
        let kind: ManifoldKind = self
            .get("manifold.kind")
            .ok_or_else(|| Error::Config("`manifold.kind` is required".into()))?
            .parse()?;
        let dim: usize = self.or("manifold.dim", 2)?;
        let r_max: Option<f64> = self.parsed("manifold.rmax")?;
        let table = match self.path("manifold.warp_table") {
            Some(p) => Some(WarpTable::from_file(&p)?),
            None => None,
        };
        if table.is_some() && kind != ManifoldKind::Custom {
            return Err(Error::Config(
                "`manifold.warp_table` only applies to custom manifolds".into(),
            ));
        }
        Manifold::new(kind, dim, r_max, table)
    }

    fn profile(&self) -> Result<Profile> {
        match self.get("profile.name").unwrap_or("zonal_cos") {
            "zonal_cos" => Ok(Profile::ZonalCos),
            "gaussian_bump" => Ok(Profile::GaussianBump {
                center: self.or("profile.center", 0.0)?,
                width: self
                    .parsed("profile.width")?
                    .ok_or_else(|| Error::Config("gaussian_bump needs `profile.width`".into()))?,
            }),
            "table" => {
                let p = self
                    .path("profile.table")
                    .ok_or_else(|| Error::Config("table profile needs `profile.table`".into()))?;
                Ok(Profile::Table(ProfileTable::from_file(&p)?))
            }
            other => Err(Error::Config(format!("unknown profile `{other}`"))),
        }
    }

    fn amplitude(&self) -> Result<Amplitude> {
        let fixed: Option<f64> = self.parsed("profile.amplitude")?;
        let auto = self.flag("profile.auto_scale", fixed.is_none())?;
        match (auto, fixed) {
            (true, Some(_)) => Err(Error::Config(
                "`profile.amplitude` conflicts with `profile.auto_scale = true`".into(),
            )),
            (true, None) => Ok(Amplitude::AutoScale {
                margin: self.or("profile.margin", 0.1)?,
            }),
            (false, Some(a)) => Ok(Amplitude::Fixed(a)),
            (false, None) => Err(Error::Config(
                "`profile.auto_scale = false` needs `profile.amplitude`".into(),
            )),
        }
    }

    /// Run configuration, with defaults from [`RunConfig::new`].
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut c = RunConfig::new(self.manifold()?, self.profile()?);
        if let Some(bc) = self.get("manifold.outer_bc") {
            c.outer_boundary = Some(OuterBoundary::from_str(bc)?);
        }
        c.cells = self.or("grid.cells", c.cells)?;
        c.p = self.or("solver.p", c.p)?;
        c.dt = self.or("solver.dt", c.dt)?;
        c.t_max = self.or("solver.t_max", c.t_max)?;
        c.tol = self.or("solver.tol", c.tol)?;
        c.adaptive_dt = self.flag("solver.adaptive_dt", c.adaptive_dt)?;
        c.nonlinear = self.flag("solver.nonlinear", c.nonlinear)?;
        c.blowup_threshold = self.or("solver.blowup_threshold", c.blowup_threshold)?;
        c.stride = self.or("output.stride", c.stride)?;
        c.amplitude = self.amplitude()?;
        c.validate()?;
        Ok(c)
    }
}

/// Sweep axes. Amplitudes are multiples of the zero-energy amplitude `A*`
/// of the profile for each power.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub p: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub cells: Vec<usize>,
    pub dt: Vec<f64>,
}

impl SweepAxes {
    pub fn len(&self) -> usize {
        self.p.len() * self.amplitude.len() * self.cells.len() * self.dt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A parsed experiment file.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub run: RunConfig,
    pub sweep: Option<SweepAxes>,
}

impl ExperimentSpec {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let run = map.run_config()?;
        let any_sweep = KEYS
            .iter()
            .any(|k| k.starts_with("sweep.") && map.contains(k));
        let sweep = if any_sweep {
            let amplitude = map.list("sweep.amplitude")?.ok_or_else(|| {
                Error::Config("a sweep needs `sweep.amplitude` (multiples of A*)".into())
            })?;
            if let Some(f) = amplitude.iter().find(|&&f: &&f64| !(f > 0.0)) {
                return Err(Error::Config(format!(
                    "amplitude factor {f} must be positive"
                )));
            }
            Some(SweepAxes {
                p: map.list("sweep.p")?.unwrap_or_else(|| vec![run.p]),
                amplitude,
                cells: map.list("sweep.cells")?.unwrap_or_else(|| vec![run.cells]),
                dt: map.list("sweep.dt")?.unwrap_or_else(|| vec![run.dt]),
            })
        } else {
            None
        };
        Ok(Self { run, sweep })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_map(&ConfigMap::from_file(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAGSHIP: &str = "
        # hemisphere
        manifold.kind = sphere_cap
        grid.cells = 256
        solver.p = 5
        solver.dt = 2e-5   # small
        profile.name = zonal_cos
        profile.margin = 0.1
    ";

    #[test]
    fn parses_flagship() {
        let spec = ExperimentSpec::from_map(&ConfigMap::parse(FLAGSHIP).unwrap()).unwrap();
        assert_eq!(spec.run.cells, 256);
        assert_eq!(spec.run.dt, 2e-5);
        assert_eq!(spec.run.amplitude, Amplitude::AutoScale { margin: 0.1 });
        assert_eq!(spec.run.manifold.kind(), ManifoldKind::SphereCap);
        assert!(spec.sweep.is_none());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigMap::parse("manifold.kind sphere_cap").is_err());
        assert!(ConfigMap::parse("solver.q = 3").is_err());
        assert!(ConfigMap::parse("solver.p = 3\nsolver.p = 4").is_err());
        let m = ConfigMap::parse("manifold.kind = sphere_cap\nsolver.p = five").unwrap();
        assert!(m.run_config().is_err());
        let m = ConfigMap::parse("manifold.kind = hyperbolic").unwrap();
        assert!(m.run_config().is_err());
        let m = ConfigMap::parse("grid.cells = 64").unwrap();
        assert!(m.run_config().is_err());
    }

    #[test]
    fn amplitude_modes() {
        let m = ConfigMap::parse("manifold.kind = sphere_cap\nprofile.amplitude = 0.1").unwrap();
        assert_eq!(m.run_config().unwrap().amplitude, Amplitude::Fixed(0.1));
        let m = ConfigMap::parse(
            "manifold.kind = sphere_cap\nprofile.amplitude = 0.1\nprofile.auto_scale = true",
        )
        .unwrap();
        assert!(m.run_config().is_err());
    }

    #[test]
    fn overrides_and_sweeps() {
        let mut m = ConfigMap::parse(FLAGSHIP).unwrap();
        m.set("sweep.p", "4, 5, 6").unwrap();
        m.set("sweep.amplitude", "1.1,1.3").unwrap();
        let s = ExperimentSpec::from_map(&m).unwrap().sweep.unwrap();
        assert_eq!(s.p, vec![4.0, 5.0, 6.0]);
        assert_eq!(s.cells, vec![256]);
        assert_eq!(s.len(), 6);
        m.set("sweep.amplitude", "").unwrap();
        assert!(ExperimentSpec::from_map(&m).is_err());
        assert!(m.set("nope", "1").is_err());

        let mut h = ConfigMap::new();
        h.set("manifold.kind", "hyperbolic").unwrap();
        h.set("manifold.dim", "3").unwrap();
        h.set("manifold.rmax", "15").unwrap();
        let man = h.manifold().unwrap();
        assert_eq!((man.dim(), man.r_max()), (3, 15.0));
    }

    #[test]
    fn gaussian_needs_width() {
        let m =
            ConfigMap::parse("manifold.kind = sphere_cap\nprofile.name = gaussian_bump").unwrap();
        assert!(m.run_config().is_err());
    }
}
