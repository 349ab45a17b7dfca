use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::pinney::PinneyTriple;
use crate::reduction::{DEFAULT_THETA0, AUDIT_GRID_POINTS, TURNING_GUARD};
use crate::systems::{CartesianState, ErmakovSystem, SystemDefinition};
use crate::dynamics::DEFAULT_TOL;
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_IC: [f64; 4] = [1.0, 1.0, 0.1, -0.1];
pub const DEFAULT_TSPAN: [f64; 2] = [0.0, 1.0];

/// A system given inline or as a path to a definition file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Inline(SystemDefinition),
    Path(PathBuf),
}

/// `"all"`, a comma-separated string, or a list of ids.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(into = "String")]
pub enum ClaimSelection {
    #[default]
    All,
    Ids(Vec<String>),
}

impl From<ClaimSelection> for String {
    fn from(c: ClaimSelection) -> String {
        match c {
            ClaimSelection::All => "all".into(),
            ClaimSelection::Ids(ids) => ids.join(","),
        }
    }
}

impl std::str::FromStr for ClaimSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ids: Vec<String> = s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect();
        if ids.is_empty() {
            return Err(Error::Config("empty claim selection".into()));
        }
        if ids.iter().any(|i| i == "all") {
            return Ok(ClaimSelection::All);
        }
        Ok(ClaimSelection::Ids(ids))
    }
}

impl<'de> Deserialize<'de> for ClaimSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(String),
            Many(Vec<String>),
        }
        match Raw::deserialize(d)? {
            Raw::One(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Many(v) => v.join(",").parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub system: SystemSpec,
    #[serde(default = "default_ic")]
    pub ic: [f64; 4],
    #[serde(default = "default_tspan")]
    pub tspan: [f64; 2],
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_theta0")]
    pub theta0: f64,
    #[serde(default)]
    pub pinney: PinneyTriple,
    #[serde(default)]
    pub claims: ClaimSelection,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_guard")]
    pub turning_guard: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub csv: Option<PathBuf>,
}

fn default_ic() -> [f64; 4] {
    DEFAULT_IC
}
fn default_tspan() -> [f64; 2] {
    DEFAULT_TSPAN
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_theta0() -> f64 {
    DEFAULT_THETA0
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_grid() -> usize {
    AUDIT_GRID_POINTS
}
fn default_guard() -> f64 {
    TURNING_GUARD
}

impl AuditConfig {
    pub fn new(system: SystemSpec) -> Self {
        AuditConfig {
            system,
            ic: DEFAULT_IC,
            tspan: DEFAULT_TSPAN,
            tol: DEFAULT_TOL,
            theta0: DEFAULT_THETA0,
            pinney: PinneyTriple::default(),
            claims: ClaimSelection::All,
            seed: DEFAULT_SEED,
            grid_points: AUDIT_GRID_POINTS,
            turning_guard: TURNING_GUARD,
            registry: None,
            out: None,
            csv: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Loads a config file; a relative system path is taken relative to the file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = AuditConfig::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let SystemSpec::Path(p) = &cfg.system {
            if p.is_relative() {
                cfg.system = SystemSpec::Path(base.join(p));
            }
        }
        if let Some(p) = &cfg.registry {
            if p.is_relative() {
                cfg.registry = Some(base.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn initial_state(&self) -> CartesianState {
        let [x, y, vx, vy] = self.ic;
        CartesianState::new(self.tspan[0], x, y, vx, vy)
    }

    /// Loads the system and checks the numeric settings.
    pub fn resolve_system(&self) -> Result<ErmakovSystem> {
        match &self.system {
            SystemSpec::Inline(def) => ErmakovSystem::from_definition(def),
            SystemSpec::Path(p) => ErmakovSystem::from_file(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.tspan[1] > self.tspan[0]) || !self.tspan.iter().all(|t| t.is_finite()) {
            return Err(Error::Config(format!("time span {:?} must be finite and increasing", self.tspan)));
        }
        if !self.ic.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("initial condition must be finite".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::Config("grid needs at least 3 points".into()));
        }
        if !(self.turning_guard > 0.0 && self.turning_guard < 1.0) {
            return Err(Error::Config("turning guard must lie in (0, 1)".into()));
        }
        if let Some(p) = &self.registry {
            if !p.exists() {
                return Err(Error::Config(format!("registry file {} does not exist", p.display())));
            }
        }
        if let SystemSpec::Path(p) = &self.system {
            if !p.exists() {
                return Err(Error::Config(format!("system file {} does not exist", p.display())));
            }
        }
        self.initial_state().check_off_axes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = AuditConfig::from_json(r#"{"system": {"class": "toy"}}"#).unwrap();
        assert_eq!(cfg.ic, DEFAULT_IC);
        assert_eq!(cfg.claims, ClaimSelection::All);
        assert_eq!(cfg.seed, 42);
        cfg.validate().unwrap();
        let cfg = AuditConfig::from_json(
            r#"{"system": "toy.json", "claims": ["eq2.3", "reduced_full"], "pinney": {"A": 2, "B": 0, "C": "auto"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.system, SystemSpec::Path("toy.json".into()));
        assert_eq!(cfg.claims, ClaimSelection::Ids(vec!["eq2.3".into(), "reduced_full".into()]));
        assert_eq!(cfg.pinney.a, 2.0);
        assert!(AuditConfig::from_json(r#"{"system": {"class": "toy"}, "bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = AuditConfig::new(SystemSpec::Inline(ErmakovSystem::toy().definition()));
        cfg.ic = [1.0, 0.0, 0.0, 0.0];
        assert!(matches!(cfg.validate(), Err(Error::Pole(_))));
        cfg.ic = DEFAULT_IC;
        cfg.tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-9;
        cfg.tspan = [1.0, 0.0];
        assert!(cfg.validate().is_err());
        assert_eq!("a, b".parse::<ClaimSelection>().unwrap(), ClaimSelection::Ids(vec!["a".into(), "b".into()]));
        assert_eq!("all".parse::<ClaimSelection>().unwrap(), ClaimSelection::All);
    }
}
