use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{commutator, ReducedField};
use crate::verdict::{ClaimMode, ClaimVerdict};
use crate::{Error, Result};

pub const TOL_CLOSURE: f64 = 1e-6;
const RANK_TOL: f64 = 1e-10;

/// `[X, Y]` as a field of its own (derivatives by differences).
pub struct Commutator<'a> {
    pub x: &'a dyn ReducedField,
    pub y: &'a dyn ReducedField,
}

impl ReducedField for Commutator<'_> {
    fn name(&self) -> String {
        format!("[{},{}]", self.x.name(), self.y.name())
    }

    fn eval(&self, theta: f64, u: f64) -> Result<[f64; 2]> {
        commutator(self.x, self.y, theta, u)
    }
}

/// `n` points with θ uniform in the middle 80% of `domain` and `u ∈ [0.5, 1.5]`.
pub fn sample_points(domain: (f64, f64), n: usize, seed: u64) -> Vec<(f64, f64)> {
    let (lo, hi) = domain;
    let (a, b) = (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.random_range(a..=b), rng.random_range(0.5..=1.5)))
        .collect()
}

/// Least-squares structure constants `[Fᵢ, Fⱼ] = Σ c_ij^k F_k` over the sample points.
pub fn closure_check(claim: &str, fields: &[&dyn ReducedField], points: &[(f64, f64)], mode: ClaimMode) -> Result<ClaimVerdict> {
    let m = fields.len();
    if points.len() < 3 {
        return Err(Error::Precondition(format!("closure needs at least 3 sample points, got {}", points.len())));
    }
    let rows = 2 * points.len();
    let mut basis = DMatrix::<f64>::zeros(rows, m);
    for (k, f) in fields.iter().enumerate() {
        for (p, &(th, u)) in points.iter().enumerate() {
            let v = f.eval(th, u)?;
            basis[(2 * p, k)] = v[0];
            basis[(2 * p + 1, k)] = v[1];
        }
    }
    let svd = basis.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax.max(1.0)).count();
    if rank < m {
        return Err(Error::RankDeficient { rank, needed: m });
    }

    let names: Vec<String> = fields.iter().map(|f| f.name()).collect();
    let mut table = Vec::new();
    let mut residuals = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mut b = DVector::<f64>::zeros(rows);
            for (p, &(th, u)) in points.iter().enumerate() {
                let c = commutator(fields[i], fields[j], th, u)?;
                b[2 * p] = c[0];
                b[2 * p + 1] = c[1];
            }
            let coeffs = svd.solve(&b, RANK_TOL).map_err(|e| Error::Precondition(e.to_string()))?;
            let fit = &basis * &coeffs - &b;
            let residual = fit.amax();
            residuals.push(residual);
            let constants: serde_json::Map<String, serde_json::Value> = names
                .iter()
                .zip(coeffs.iter())
                .map(|(n, c)| (n.clone(), json!(c)))
                .collect();
            table.push(json!({
                "bracket": [names[i], names[j]],
                "constants": constants,
                "residual": residual,
            }));
        }
    }
    Ok(ClaimVerdict::new(
        claim,
        &format!("{{{}}} closes under the bracket", names.join(", ")),
        mode,
        Some(TOL_CLOSURE),
    )
    .with_residuals(None, &residuals)
    .with_details(json!({ "fields": names, "sample_points": points.len(), "rank": rank, "structure_constants": table })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinney::UnitSigma;
    use crate::symmetry::point_generators;
    use crate::verdict::Verdict;

    const UNIT: UnitSigma = UnitSigma { theta0: 0.0, domain: (0.0, 3.0) };

    fn constant(v: &ClaimVerdict, a: &str, b: &str, k: &str) -> f64 {
        let row = v.details["structure_constants"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["bracket"][0] == a && r["bracket"][1] == b)
            .unwrap();
        row["constants"][k].as_f64().unwrap()
    }

    #[test]
    fn brackets_against_hand_computation() {
        let g = point_generators(&UNIT);
        for (th, u) in sample_points((0.0, 3.0), 5, 11) {
            assert_eq!(commutator(&g[3], &g[4], th, u).unwrap(), [0.0, 0.0]);
            let c = commutator(&g[5], &g[1], th, u).unwrap();
            assert!((c[0] - 2.0 * (2.0 * th).cos()).abs() < 1e-6);
            assert!((c[1] + 2.0 * u * (2.0 * th).sin()).abs() < 1e-6);
        }
        let (th, u) = (std::f64::consts::FRAC_PI_3, 0.8);
        let c = commutator(&g[6], &g[3], th, u).unwrap();
        assert!(c[0].abs() < 1e-15 && (c[1] + th.cos()).abs() < 1e-15);
    }

    #[test]
    fn antisymmetry_and_jacobi() {
        let g = point_generators(&UNIT);
        let pts = sample_points((0.0, 3.0), 6, 3);
        for (th, u) in &pts {
            for x in &g {
                for y in &g {
                    let a = commutator(x, y, *th, *u).unwrap();
                    let b = commutator(y, x, *th, *u).unwrap();
                    assert!((a[0] + b[0]).abs() < 1e-9 && (a[1] + b[1]).abs() < 1e-9);
                }
            }
            let (x, y, z) = (&g[1], &g[2], &g[5]);
            let yz = Commutator { x: y, y: z };
            let zx = Commutator { x: z, y: x };
            let xy = Commutator { x, y };
            let j1 = commutator(x, &yz, *th, *u).unwrap();
            let j2 = commutator(y, &zx, *th, *u).unwrap();
            let j3 = commutator(z, &xy, *th, *u).unwrap();
            for c in 0..2 {
                assert!((j1[c] + j2[c] + j3[c]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn sl2_closes() {
        let g = point_generators(&UNIT);
        let fields: [&dyn ReducedField; 3] = [&g[1], &g[2], &g[5]];
        let v = closure_check("closure_sl2", &fields, &sample_points((0.0, 3.0), 8, 42), ClaimMode::Assert).unwrap();
        assert_eq!(v.verdict, Verdict::Pass, "{:?}", v);
        assert!((constant(&v, "Gamma2", "Gamma6", "Gamma3") + 2.0).abs() < 1e-6);
        assert!((constant(&v, "Gamma3", "Gamma6", "Gamma2") - 2.0).abs() < 1e-6);
        assert!((constant(&v, "Gamma2", "Gamma3", "Gamma6") + 2.0).abs() < 1e-6);
    }

    #[test]
    fn abelian_and_singleton() {
        let g = point_generators(&UNIT);
        let pts = sample_points((0.0, 3.0), 6, 1);
        let fields: [&dyn ReducedField; 3] = [&g[3], &g[4], &g[6]];
        let v = closure_check("c", &fields, &pts, ClaimMode::Assert).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
        assert!((constant(&v, "Gamma4", "Gamma7", "Gamma4") - 1.0).abs() < 1e-9);
        assert!((constant(&v, "Gamma5", "Gamma7", "Gamma5") - 1.0).abs() < 1e-9);
        assert!(constant(&v, "Gamma4", "Gamma5", "Gamma7").abs() < 1e-9);
        let single: [&dyn ReducedField; 1] = [&g[6]];
        let v = closure_check("c", &single, &pts, ClaimMode::Assert).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
        assert_eq!(v.residual_max, Some(0.0));
    }

    #[test]
    fn rank_deficiency_and_too_few_points() {
        let g = point_generators(&UNIT);
        // Γ₁ = Γ₆ when σ ≡ 1
        let fields: [&dyn ReducedField; 2] = [&g[0], &g[5]];
        assert!(matches!(
            closure_check("c", &fields, &sample_points((0.0, 3.0), 5, 2), ClaimMode::Assert),
            Err(Error::RankDeficient { rank: 1, needed: 2 })
        ));
        assert!(closure_check("c", &fields[..1], &[(0.1, 1.0)], ClaimMode::Assert).is_err());
    }
}
