use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial_data::InitialData;
use crate::oracle::{REFERENCE_M, REFERENCE_TAU};
use crate::stepper::{step_count, ModelParams};

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StudyKind {
    Spatial,
    Temporal,
    Single,
    OracleCheck,
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
            StudyKind::Single => "single",
            StudyKind::OracleCheck => "oracle-check",
        })
    }
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spatial" => Ok(StudyKind::Spatial),
            "temporal" => Ok(StudyKind::Temporal),
            "single" => Ok(StudyKind::Single),
            "oracle-check" | "oracle_check" => Ok(StudyKind::OracleCheck),
            other => Err(Error::Config(format!("unknown study kind `{other}`"))),
        }
    }
}

/// Everything a study run needs.
///
/// `m_list` and `tau_list` default per study kind: the spatial study sweeps
/// `M` at `tau = ref_tau`, the temporal study sweeps `tau` at `M = ref_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub alpha: f64,
    pub p: u32,
    pub horizon: f64,
    pub betas: Vec<f64>,
    pub eps: Vec<f64>,
    pub m_list: Option<Vec<usize>>,
    pub tau_list: Option<Vec<f64>>,
    pub ref_m: usize,
    pub ref_tau: f64,
    pub a: f64,
    pub b: f64,
    /// Domain the reference is computed on; must equal `(a, b)`.
    pub ref_domain: Option<(f64, f64)>,
    /// Overrides `T / eps^beta` for `single` runs.
    pub t_final: Option<f64>,
    pub initial_data: InitialData,
    /// Emit conserved quantities every this many steps in `single` runs.
    pub series_every: u64,
    /// Maximum allowed H1 disagreement in `oracle-check`.
    pub oracle_threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(kind: StudyKind) -> Self {
        let (betas, eps) = match kind {
            StudyKind::Single => (vec![0.0], vec![1.0]),
            StudyKind::OracleCheck => (vec![0.0], default_eps()),
            _ => (vec![0.0, 1.0, 2.0], default_eps()),
        };
        Self {
            kind,
            alpha: 1.0,
            p: 1,
            horizon: 1.0,
            betas,
            eps,
            m_list: None,
            tau_list: None,
            ref_m: REFERENCE_M,
            ref_tau: REFERENCE_TAU,
            a: -std::f64::consts::PI,
            b: std::f64::consts::PI,
            ref_domain: None,
            t_final: None,
            initial_data: InitialData::Standard,
            series_every: 0,
            oracle_threshold: None,
            out: None,
            cache: None,
        }
    }

    /// Reads a `key = value` file; `#` starts a comment.
    pub fn from_file(kind: StudyKind, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::new(kind);
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Sets one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => self.kind = value.parse()?,
            "alpha" => self.alpha = parse_number(key, value)?,
            "p" => self.p = parse_integer(key, value)? as u32,
            "T" => self.horizon = parse_number(key, value)?,
            "beta" => self.betas = parse_list(key, value, parse_number)?,
            "eps" => self.eps = parse_list(key, value, parse_number)?,
            "M" => self.m_list = Some(parse_list(key, value, parse_integer)?),
            "tau" => self.tau_list = Some(parse_list(key, value, parse_number)?),
            "ref_M" => self.ref_m = parse_integer(key, value)?,
            "ref_tau" => self.ref_tau = parse_number(key, value)?,
            "a" => self.a = parse_number(key, value)?,
            "b" => self.b = parse_number(key, value)?,
            "ref_a" => {
                let b = self.ref_domain.map_or(self.b, |d| d.1);
                self.ref_domain = Some((parse_number(key, value)?, b));
            }
            "ref_b" => {
                let a = self.ref_domain.map_or(self.a, |d| d.0);
                self.ref_domain = Some((a, parse_number(key, value)?));
            }
            "t_final" => self.t_final = Some(parse_number(key, value)?),
            "series_every" => self.series_every = parse_integer(key, value)? as u64,
            "oracle_threshold" => self.oracle_threshold = Some(parse_number(key, value)?),
            "initial_data" => self.initial_data = self.load_samples(Path::new(value))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "cache" => self.cache = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Rows `re0 im0 re1 im1` (comma or whitespace separated) sampled at the
    /// nodes of `(a, b)`.
    fn load_samples(&self, path: &Path) -> Result<InitialData> {
        let text = fs::read_to_string(path)?;
        let mut pos = Vec::new();
        let mut vel = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let vals = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| parse_number("initial_data", s))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != 4 {
                return Err(Error::Config(format!(
                    "initial data rows need 4 columns, got {}",
                    vals.len()
                )));
            }
            pos.push(Complex64::new(vals[0], vals[1]));
            vel.push(Complex64::new(vals[2], vals[3]));
        }
        let grid = GridSpec::new(self.a, self.b, pos.len())?;
        InitialData::from_samples(&grid, &pos, &vel)
    }

    pub fn m_values(&self) -> Vec<usize> {
        match (&self.m_list, self.kind) {
            (Some(m), _) => m.clone(),
            (None, StudyKind::Spatial) => vec![8, 16, 32, 64],
            (None, StudyKind::Single) => vec![32],
            (None, _) => vec![self.ref_m],
        }
    }

    pub fn tau_values(&self) -> Vec<f64> {
        match (&self.tau_list, self.kind) {
            (Some(t), _) => t.clone(),
            (None, StudyKind::Temporal) => (0..5).map(|k| 0.1 / f64::from(1u32 << k)).collect(),
            (None, StudyKind::Single) => vec![1e-3],
            (None, _) => vec![self.ref_tau],
        }
    }

    pub fn grid(&self, m: usize) -> Result<GridSpec> {
        GridSpec::new(self.a, self.b, m)
    }

    pub fn reference_grid(&self) -> Result<GridSpec> {
        let (a, b) = self.ref_domain.unwrap_or((self.a, self.b));
        GridSpec::new(a, b, self.ref_m)
    }

    pub fn params(&self, beta: f64, eps: f64) -> Result<ModelParams> {
        ModelParams::new(self.alpha, eps, self.p, beta, self.horizon)
    }

    /// Final time of the point `(beta, eps)`.
    pub fn final_time(&self, beta: f64, eps: f64) -> Result<f64> {
        match (self.kind, self.t_final) {
            (StudyKind::Single, Some(t)) => Ok(t),
            _ => Ok(self.params(beta, eps)?.final_time()),
        }
    }

    /// Checks every invariant before any compute.
    pub fn validate(&self) -> Result<()> {
        if let Some((ra, rb)) = self.ref_domain {
            if ra != self.a || rb != self.b {
                return Err(Error::Grid(format!(
                    "mismatched domains: study on ({}, {}), reference on ({ra}, {rb})",
                    self.a, self.b
                )));
            }
        }
        self.reference_grid()?;
        if self.betas.is_empty() || self.eps.is_empty() {
            return Err(Error::Config("beta and eps lists must be non-empty".into()));
        }
        if !(self.ref_tau > 0.0 && self.ref_tau.is_finite()) {
            return Err(Error::Config(format!("ref_tau must be positive, got {}", self.ref_tau)));
        }
        for &beta in &self.betas {
            for &eps in &self.eps {
                if eps == 0.0 && matches!(self.kind, StudyKind::Spatial | StudyKind::Temporal) {
                    return Err(Error::Config("eps = 0 is only allowed for single and oracle-check".into()));
                }
                self.params(beta, eps)?;
                let t = self.final_time(beta, eps)?;
                if self.kind != StudyKind::Single || self.t_final.is_none() {
                    step_count(t, self.ref_tau)?;
                }
                if self.kind != StudyKind::OracleCheck {
                    for tau in self.tau_values() {
                        step_count(t, tau)?;
                    }
                }
            }
        }
        if self.kind != StudyKind::OracleCheck {
            for m in self.m_values() {
                self.grid(m)?;
                if m > self.ref_m {
                    return Err(Error::Config(format!("M = {m} exceeds ref_M = {}", self.ref_m)));
                }
            }
            for tau in self.tau_values() {
                if tau < self.ref_tau * (1.0 - 1e-12) {
                    return Err(Error::Config(format!("tau = {tau} is below ref_tau = {}", self.ref_tau)));
                }
            }
        }
        Ok(())
    }
}

fn default_eps() -> Vec<f64> {
    vec![1.0, 0.5, 0.25, 0.125, 0.0625]
}

/// Accepts plain floats and fractions such as `1/16`.
pub fn parse_number(key: &str, value: &str) -> Result<f64> {
    let bad = || Error::Config(format!("`{key}`: cannot parse `{value}` as a number"));
    let v = value.trim();
    match v.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            Ok(n / d)
        }
        None => v.parse().map_err(|_| bad()),
    }
}

fn parse_integer(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}` as an integer")))
}

fn parse_list<T>(key: &str, value: &str, item: fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_kind() {
        let s = StudyConfig::new(StudyKind::Spatial);
        assert_eq!(s.m_values(), vec![8, 16, 32, 64]);
        assert_eq!(s.tau_values(), vec![5e-4]);
        let t = StudyConfig::new(StudyKind::Temporal);
        assert_eq!(t.m_values(), vec![128]);
        assert_eq!(t.tau_values(), vec![0.1, 0.05, 0.025, 0.0125, 0.00625]);
        assert!(s.validate().is_ok());
        assert!(t.validate().is_ok());
    }

    #[test]
    fn parses_file_text() {
        let mut c = StudyConfig::new(StudyKind::Single);
        c.apply_text("# comment\neps = 1/2, 1/4\nM=16,32\nbeta=1 # trailing\nkind = temporal\n")
            .unwrap();
        assert_eq!(c.eps, vec![0.5, 0.25]);
        assert_eq!(c.m_list, Some(vec![16, 32]));
        assert_eq!(c.betas, vec![1.0]);
        assert_eq!(c.kind, StudyKind::Temporal);
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("alpha 1").is_err());
    }

    #[test]
    fn rejects_bad_points() {
        let mut c = StudyConfig::new(StudyKind::Single);
        c.betas = vec![3.0];
        assert!(matches!(c.validate(), Err(Error::Parameter { field: "beta", .. })));

        let mut c = StudyConfig::new(StudyKind::Spatial);
        c.m_list = Some(vec![256]);
        assert!(c.validate().is_err());

        let mut c = StudyConfig::new(StudyKind::Temporal);
        c.tau_list = Some(vec![1e-4]);
        assert!(c.validate().is_err());

        let mut c = StudyConfig::new(StudyKind::OracleCheck);
        c.set("ref_a", "0").unwrap();
        assert!(matches!(c.validate(), Err(Error::Grid(_))));
    }
}
