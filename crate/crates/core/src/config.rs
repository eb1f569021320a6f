//! Flat `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Recognized keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `n` | ambient dimension, 3 or 4 | 3 |
//! | `points` | tangential samples per axis `N` | desk grid |
//! | `period` | torus period `L` | `16π` |
//! | `slabs` | vertical slabs `M` | desk grid |
//! | `height` | slab stack height `X_max` | 8 |
//! | `p`, `q`, `r` | exponents (`inf` allowed) | 2, 2, 2 |
//! | `tol`, `max_iter` | Picard stopping rule | `1e-10`, 100 |
//! | `enforce_smallness` | apply the `δ̂₀` gate | false |
//! | `calibration` | calibration file path | none |
//! | `preset` | data preset name | `zero` |
//! | `amplitude` | preset amplitude (fraction of the gate radius) | 0.5 |
//! | `boundary`, `force` | field files replacing the preset | none |
//! | `seed` | RNG seed | 0 |
//! | `format` | `csv` or `json-lines` | `csv` |
//! | `out` | output directory | `.` |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Parse `key=value` lines into `key → (line, value)`; duplicate keys are
/// rejected.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Config { line, message: format!("expected key=value, found `{s}`") })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config { line, message: "empty key".into() });
        }
        if out.insert(k.to_string(), (line, v.trim().to_string())).is_some() {
            return Err(Error::Config { line, message: format!("duplicate key `{k}`") });
        }
    }
    Ok(out)
}

/// A real number, with `inf`/`infinity`/`∞` for `+∞`.
pub fn parse_exponent(v: &str) -> std::result::Result<f64, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        s => s.parse::<f64>().map_err(|_| format!("`{v}` is not a number")),
    }
}

/// Report format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    JsonLines,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json-lines" => Ok(Self::JsonLines),
            _ => Err(format!("unknown format `{s}` (csv, json-lines)")),
        }
    }
}

/// Everything a CLI run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub points: usize,
    pub period: f64,
    pub slabs: usize,
    pub height: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub enforce_smallness: bool,
    pub calibration: Option<PathBuf>,
    pub preset: String,
    pub amplitude: f64,
    pub boundary: Option<PathBuf>,
    pub force: Option<PathBuf>,
    pub seed: u64,
    pub format: ReportFormat,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::for_dimension(3)
    }
}

impl RunConfig {
    /// Defaults on the desk grid of dimension `n` (3 unless `n == 4`).
    pub fn for_dimension(n: usize) -> Self {
        let (points, slabs) = if n == 4 { (32, 32) } else { (64, 64) };
        Self {
            n,
            points,
            period: 16.0 * PI,
            slabs,
            height: 8.0,
            p: 2.0,
            q: 2.0,
            r: 2.0,
            tol: 1e-10,
            max_iter: 100,
            enforce_smallness: false,
            calibration: None,
            preset: "zero".into(),
            amplitude: 0.5,
            boundary: None,
            force: None,
            seed: 0,
            format: ReportFormat::Csv,
            out: PathBuf::from("."),
        }
    }

    /// Parse and validate a config text.
    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_kv(text)?;
        let n = match map.get("n") {
            Some((line, v)) => v.parse().map_err(|_| Error::Config { line: *line, message: format!("n: `{v}` is not an integer") })?,
            None => 3,
        };
        let mut cfg = Self::for_dimension(n);
        for (key, (line, v)) in &map {
            let line = *line;
            let err = |m: String| Error::Config { line, message: format!("{key}: {m}") };
            let int = || v.parse::<u64>().map_err(|_| err(format!("`{v}` is not a nonnegative integer")));
            let real = || parse_exponent(v).map_err(err);
            match key.as_str() {
                "n" => {}
                "points" => cfg.points = int()? as usize,
                "period" => cfg.period = real()?,
                "slabs" => cfg.slabs = int()? as usize,
                "height" => cfg.height = real()?,
                "p" => cfg.p = real()?,
                "q" => cfg.q = real()?,
                "r" => cfg.r = real()?,
                "tol" => cfg.tol = real()?,
                "max_iter" => cfg.max_iter = int()? as usize,
                "enforce_smallness" => {
                    cfg.enforce_smallness = match v.as_str() {
                        "true" | "1" | "yes" => true,
                        "false" | "0" | "no" => false,
                        _ => return Err(err(format!("`{v}` is not a boolean"))),
                    }
                }
                "calibration" => cfg.calibration = Some(PathBuf::from(v)),
                "preset" => cfg.preset = v.clone(),
                "amplitude" => cfg.amplitude = real()?,
                "boundary" => cfg.boundary = Some(PathBuf::from(v)),
                "force" => cfg.force = Some(PathBuf::from(v)),
                "seed" => cfg.seed = int()?,
                "format" => cfg.format = v.parse().map_err(err)?,
                "out" => cfg.out = PathBuf::from(v),
                _ => return Err(err("unknown key".into())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        if !(3..=4).contains(&self.n) {
            return Err(Error::InvalidGrid(format!("n = {} not in {{3, 4}}", self.n)));
        }
        Grid::new(self.n - 1, self.points, self.period, self.slabs, self.height)
    }

    /// Module-level preconditions, checked before any compute.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        crate::besov::check_exponents(self.n, self.p, self.q, self.r)?;
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument("tol and max_iter must be positive".into()));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::InvalidArgument(format!("amplitude {} must be finite and nonnegative", self.amplitude)));
        }
        if !crate::presets::PRESETS.contains(&self.preset.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown preset `{}`", self.preset)));
        }
        Ok(())
    }

    pub fn solver_config(&self) -> Result<crate::fixed_point::SolverConfig> {
        let mut s = crate::fixed_point::SolverConfig::new(self.grid()?, self.p, self.q, self.r)?;
        s.tol = self.tol;
        s.max_iter = self.max_iter;
        s.enforce_smallness = self.enforce_smallness;
        Ok(s)
    }
}
