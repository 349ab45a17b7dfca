use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::verdict::ClaimMode;
use crate::{Error, Result};

/// One registered claim: how it is judged and against what bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSpec {
    pub id: String,
    #[serde(default)]
    pub description: String,
    /// `None` keeps the bound the claim computes for itself.
    #[serde(default)]
    pub tolerance: Option<f64>,
    pub mode: ClaimMode,
}

/// Every claim id the audit knows how to evaluate.
pub fn known_ids() -> Vec<String> {
    let mut ids: Vec<String> = [
        "eq2.3",
        "reduced_full",
        "reduced_paper",
        "polar_force",
        "polar_printed",
        "omega_printed",
        "pinney_constraint",
        "wronskian_abel",
        "pinney_residual",
        "ELI_reduced",
        "ELI_original_printed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ids.extend((1..=9).map(|i| format!("gamma_{i}")));
    ids.extend((1..=9).map(|i| format!("gamma_{i}_profile")));
    ids.push("closure_sl2".into());
    ids.extend((1..=10).map(|i| format!("substitution_V{i}")));
    ids
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Registry {
    claims: Vec<ClaimSpec>,
}

fn spec(id: &str, description: &str, tolerance: Option<f64>, mode: ClaimMode) -> ClaimSpec {
    ClaimSpec { id: id.into(), description: description.into(), tolerance, mode }
}

impl Default for Registry {
    fn default() -> Self {
        use ClaimMode::{Assert, Report};
        let mut claims = vec![
            spec("eq2.3", "angular momentum law L^2 = L0 + mu(theta)", Some(1e-7), Assert),
            spec("reduced_full", "reduced equation with the L'/L u' term", Some(1e-6), Assert),
            spec("reduced_paper", "reduced oscillator u'' + omega^2 u = 0", None, Report),
            spec("polar_force", "Cartesian to polar force map", Some(1e-10), Assert),
            spec("polar_printed", "displayed polar force components", None, Report),
            spec("omega_printed", "displayed omega^2(theta)", None, Report),
            spec("pinney_constraint", "AC - B^2 = W^-2", Some(1e-10), Assert),
            spec("wronskian_abel", "constant Wronskian", Some(1e-9), Assert),
            spec("pinney_residual", "sigma solves the Pinney equation", Some(1e-7), Assert),
            spec("ELI_reduced", "conservation of I* along the reduced oscillator", Some(1e-8), Assert),
            spec("ELI_original_printed", "displayed invariant in (t, r)", None, Report),
        ];
        for i in 1..=9 {
            let mode = if i == 1 { Report } else { Assert };
            claims.push(spec(&format!("gamma_{i}"), &format!("flow test of Gamma{i}, omega^2 = 1, sigma = 1"), None, mode));
        }
        for i in 1..=9 {
            claims.push(spec(&format!("gamma_{i}_profile"), &format!("flow test of Gamma{i} on the system profile"), None, Report));
        }
        claims.push(spec("closure_sl2", "{Gamma2, Gamma3, Gamma6} closes, omega^2 = 1", Some(1e-6), Assert));
        for i in 1..=10 {
            claims.push(spec(&format!("substitution_V{i}"), &format!("V{i} against both pushforward conventions"), None, Report));
        }
        Registry { claims }
    }
}

impl Registry {
    /// Checks ids against the known set and for duplicates.
    pub fn new(claims: Vec<ClaimSpec>) -> Result<Self> {
        let known = known_ids();
        let mut seen = std::collections::HashSet::new();
        for c in &claims {
            if !known.contains(&c.id) {
                return Err(Error::UnknownClaim(c.id.clone()));
            }
            if !seen.insert(c.id.clone()) {
                return Err(Error::Config(format!("claim {:?} registered twice", c.id)));
            }
            if let Some(t) = c.tolerance {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("claim {:?}: tolerance must be positive", c.id)));
                }
            }
        }
        Ok(Registry { claims })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Registry::new(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Registry::from_json(&text)
    }

    pub fn claims(&self) -> &[ClaimSpec] {
        &self.claims
    }

    pub fn get(&self, id: &str) -> Option<&ClaimSpec> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    /// Keeps the listed ids, in registry order. Unknown or unregistered ids are refused.
    pub fn select(&self, ids: &[String]) -> Result<Registry> {
        let known = known_ids();
        for id in ids {
            if !known.contains(id) || !self.contains(id) {
                return Err(Error::UnknownClaim(id.clone()));
            }
        }
        Ok(Registry { claims: self.claims.iter().filter(|c| ids.contains(&c.id)).cloned().collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_is_complete_and_valid() {
        let r = Registry::default();
        assert_eq!(r.claims().len(), known_ids().len());
        assert!(Registry::new(r.claims().to_vec()).is_ok());
        assert_eq!(r.get("gamma_1").unwrap().mode, ClaimMode::Report);
        assert_eq!(r.get("gamma_2").unwrap().mode, ClaimMode::Assert);
    }

    #[test]
    fn file_format_and_refusals() {
        let r = Registry::from_json(r#"[{"id": "eq2.3", "description": "x", "tolerance": 1e-6, "mode": "assert"},
                                        {"id": "reduced_paper", "mode": "report"}]"#)
        .unwrap();
        assert_eq!(r.claims().len(), 2);
        assert_eq!(r.get("reduced_paper").unwrap().tolerance, None);
        assert!(matches!(
            Registry::from_json(r#"[{"id": "eq9.9", "mode": "assert"}]"#),
            Err(Error::UnknownClaim(_))
        ));
        assert!(Registry::from_json(r#"[{"id": "eq2.3", "mode": "assert"}, {"id": "eq2.3", "mode": "report"}]"#).is_err());
        assert!(Registry::from_json(r#"[{"id": "eq2.3", "mode": "sometimes"}]"#).is_err());
        let sel = Registry::default().select(&["reduced_full".into(), "eq2.3".into()]).unwrap();
        let ids: Vec<&str> = sel.claims().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["eq2.3", "reduced_full"]);
        assert!(r.select(&["gamma_3".into()]).is_err());
    }
}
