use serde::Serialize;
use serde_json::json;

use super::{BackGenerator, OriginalPoint, PointGenerator, ReducedField};
use crate::exec::{try_collect, Exec};
use crate::pinney::SigmaPhase;
use crate::reduction::Pushforward;
use crate::verdict::{ClaimMode, ClaimVerdict};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `∂u → −r⁻²∂r`, `∂θ → r⁻²L∂t`
    PaperLiteral,
    /// `∂u → −r²∂r`, `∂θ → (r²/L)∂t`
    Standard,
}

impl Convention {
    /// Maps reduced coefficients `(ξ, η)` at `u = 1/r` to `(τ, ρ)`.
    pub fn push(self, xi: f64, eta: f64, r: f64, l: f64) -> [f64; 2] {
        let ri = 1.0 / r;
        match self {
            Convention::PaperLiteral => [xi * (ri * ri) * l, -eta * (ri * ri)],
            Convention::Standard => [xi * (r * r) / l, -eta * (r * r)],
        }
    }
}

/// Componentwise agreement of one convention with a displayed `Vᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubstitutionRow {
    pub convention: Convention,
    pub tau_max: f64,
    pub rho_max: f64,
}

impl SubstitutionRow {
    pub fn max(&self) -> f64 {
        self.tau_max.max(self.rho_max)
    }
}

/// Compares the displayed `Vᵢ` with both pushforwards of `Γᵢ` along the simulated
/// motion. `σ̇` inside `Vᵢ` is `θ̇·dσ/dθ`; `α` is the phase composed with θ(t).
pub fn substitution_audit(v: &BackGenerator, sp: &dyn SigmaPhase, pf: &Pushforward, exec: Exec) -> Result<ClaimVerdict> {
    let claim = format!("substitution_{}", v.name());
    let Some(partner) = v.partner() else {
        return Ok(ClaimVerdict::new(
            &claim,
            &format!("{} arises from the change of independent variable", v.name()),
            ClaimMode::Report,
            None,
        )
        .with_details(json!({
            "introduced_generator": true,
            "locality": v.locality(),
            "coefficients": v.eval(&OriginalPoint { r: 1.0, l: 1.0, sigma: 1.0, sigma_dot: 0.0, alpha: 0.0 }),
        })));
    };
    let gamma = PointGenerator::new(partner, sp)?;
    let conventions = [Convention::PaperLiteral, Convention::Standard];
    let diffs = try_collect(exec.map(&pf.grid, |g| -> Result<[[f64; 2]; 2]> {
        let (th, r) = (g.polar.theta, g.polar.r);
        let l = g.cart.angular_momentum();
        let [s, s1, ..] = sp.sigma_derivatives(th)?;
        let point = OriginalPoint { r, l, sigma: s, sigma_dot: g.polar.thetadot * s1, alpha: sp.alpha(th)? };
        let printed = v.eval(&point);
        let [xi, eta] = gamma.eval(th, 1.0 / r)?;
        let mut out = [[0.0; 2]; 2];
        for (k, c) in conventions.iter().enumerate() {
            let pushed = c.push(xi, eta, r, l);
            out[k] = [(pushed[0] - printed[0]).abs(), (pushed[1] - printed[1]).abs()];
        }
        Ok(out)
    }))?;
    let rows: Vec<SubstitutionRow> = conventions
        .iter()
        .enumerate()
        .map(|(k, &convention)| SubstitutionRow {
            convention,
            tau_max: diffs.iter().map(|d| d[k][0]).fold(0.0, f64::max),
            rho_max: diffs.iter().map(|d| d[k][1]).fold(0.0, f64::max),
        })
        .collect();
    let literal: Vec<f64> = diffs.iter().map(|d| d[0][0].max(d[0][1])).collect();
    let reproduces: Vec<Convention> = rows.iter().filter(|r| r.max() == 0.0).map(|r| r.convention).collect();
    Ok(ClaimVerdict::new(
        &claim,
        &format!("{} is the pushforward of {}", v.name(), gamma.name()),
        ClaimMode::Report,
        None,
    )
    .with_residuals(Some(pf.grid_descriptor()), &literal)
    .with_details(json!({
        "partner": gamma.name(),
        "locality": v.locality(),
        "agreement": rows,
        "exact_under": reproduces,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_pushforwards() {
        // Γ₇ = u∂u at u = 1/r
        let r = 1.7f64;
        let u = 1.0 / r;
        let v7 = BackGenerator::new(7).unwrap();
        let printed = v7.eval(&OriginalPoint { r, l: 0.3, sigma: 1.0, sigma_dot: 0.0, alpha: 0.0 });
        assert_eq!(Convention::PaperLiteral.push(0.0, u, r, 0.3), printed);
        let std = Convention::Standard.push(0.0, u, r, 0.3);
        assert!((std[1] + r).abs() < 1e-15);
        assert!(std[1] != printed[1]);
    }
}
