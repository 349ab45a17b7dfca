//! Pinney partners of the reduced oscillator, the associated phase and the
//! Ermakov–Lewis invariant.
//!
//! For two solutions `ν, v` of `u'' + ω²u = 0` with Wronskian `W`, the
//! quadratic form `σ² = Aν² + 2Bνv + Cv²` solves `σ'' + ω²σ = σ⁻³` whenever
//! `AC − B² = W⁻²`. The phase is `α(θ) = ∫ dθ/σ²`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dynamics::{integrate_through, CumulativeIntegral, IntegratorOptions, Trajectory};
use crate::jet::Jet;
use crate::exec::{try_collect, Exec};
use crate::reduction::{Frequency, Pushforward};
use crate::systems::PolarState;
use crate::verdict::{residual_norms, ClaimMode, ClaimVerdict, GridDescriptor};
use crate::{Error, Result};

pub const TOL_CONSTRAINT: f64 = 1e-10;
pub const TOL_ABEL: f64 = 1e-9;
pub const TOL_PINNEY: f64 = 1e-7;
pub const TOL_ELI: f64 = 1e-8;
const PHASE_PANELS: usize = 64;
const PHASE_QUAD_TOL: f64 = 1e-12;
const POSITIVITY_SAMPLES: usize = 512;

/// `ν` from `(1, 0)` and `v` from `(0, 1)` at `θ₀`, integrated together.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub theta0: f64,
    /// Columns `(ν, ν', v, v')`.
    pub trajectory: Trajectory,
    /// Nominal Wronskian `νv' − ν'v`; 1 by construction.
    pub wronskian: f64,
}

impl FundamentalPair {
    pub fn domain(&self) -> (f64, f64) {
        (self.trajectory.start(), self.trajectory.end())
    }

    /// `(ν, ν', v, v')` at θ.
    pub fn eval(&self, theta: f64) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        self.trajectory.eval_into(theta, &mut out)?;
        Ok(out)
    }

    pub fn wronskian_at(&self, theta: f64) -> Result<f64> {
        let [n, dn, v, dv] = self.eval(theta)?;
        Ok(n * dv - dn * v)
    }
}

pub fn fundamental_pair<F: Frequency + ?Sized>(freq: &F, theta0: f64, tol: f64) -> Result<FundamentalPair> {
    let rhs = |th: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let w2 = freq.omega_squared(th)?;
        out[0] = y[1];
        out[1] = -w2 * y[0];
        out[2] = y[3];
        out[3] = -w2 * y[2];
        Ok(())
    };
    let trajectory = integrate_through(rhs, &[1.0, 0.0, 0.0, 1.0], theta0, freq.domain(), IntegratorOptions::with_tol(tol))?;
    Ok(FundamentalPair { theta0, trajectory, wronskian: 1.0 })
}

/// `(A, B, C)` with `C = None` meaning `C = (W⁻² + B²)/A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinneyTriple {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C", with = "auto_or_real")]
    pub c: Option<f64>,
}

impl Default for PinneyTriple {
    fn default() -> Self {
        PinneyTriple { a: 1.0, b: 0.0, c: None }
    }
}

impl PinneyTriple {
    pub fn resolve(&self, wronskian: f64) -> Result<(f64, f64, f64)> {
        match self.c {
            Some(c) => Ok((self.a, self.b, c)),
            None if self.a != 0.0 => Ok((self.a, self.b, (wronskian.powi(-2) + self.b * self.b) / self.a)),
            None => Err(Error::Precondition("C = auto needs A ≠ 0".into())),
        }
    }
}

impl std::str::FromStr for PinneyTriple {
    type Err = Error;

    /// `A,B,C` or `A,B,auto`, or just `auto` for the default triple.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            return Ok(PinneyTriple::default());
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("expected A,B,C or A,B,auto; got {s:?}")));
        }
        let a = crate::expr::parse_number(parts[0])?;
        let b = crate::expr::parse_number(parts[1])?;
        let c = match parts[2] {
            "auto" => None,
            other => Some(crate::expr::parse_number(other)?),
        };
        Ok(PinneyTriple { a, b, c })
    }
}

mod auto_or_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match c {
            Some(v) => s.serialize_f64(*v),
            None => s.serialize_str("auto"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Real(f64),
        Word(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Real(v) => Ok(Some(v)),
            Raw::Word(w) if w == "auto" => Ok(None),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("expected a number or \"auto\", got {w:?}"))),
        }
    }
}

/// `σ = √(Aν² + 2Bνv + Cv²)` over a fundamental pair.
#[derive(Debug, Clone)]
pub struct PinneySolution<F> {
    freq: F,
    pair: FundamentalPair,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn pinney_sigma<F: Frequency>(freq: F, pair: FundamentalPair, a: f64, b: f64, c: f64) -> Result<PinneySolution<F>> {
    let rhs = pair.wronskian.powi(-2);
    let lhs = a * c - b * b;
    if !(((lhs - rhs) / rhs).abs() < TOL_CONSTRAINT) {
        return Err(Error::PinneyConstraint { lhs, rhs });
    }
    let ps = PinneySolution { freq, pair, a, b, c };
    let (lo, hi) = ps.domain();
    let probes = ps
        .pair
        .trajectory
        .times()
        .iter()
        .copied()
        .chain((0..=POSITIVITY_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / POSITIVITY_SAMPLES as f64));
    for th in probes {
        if !(ps.sigma_squared(th)? > 0.0) {
            return Err(Error::SigmaNotPositive { theta: th });
        }
    }
    Ok(ps)
}

impl<F: Frequency> PinneySolution<F> {
    pub fn with_triple(freq: F, pair: FundamentalPair, triple: &PinneyTriple) -> Result<Self> {
        let (a, b, c) = triple.resolve(pair.wronskian)?;
        pinney_sigma(freq, pair, a, b, c)
    }

    pub fn frequency(&self) -> &F {
        &self.freq
    }

    pub fn pair(&self) -> &FundamentalPair {
        &self.pair
    }

    pub fn domain(&self) -> (f64, f64) {
        self.pair.domain()
    }

    pub fn theta0(&self) -> f64 {
        self.pair.theta0
    }

    pub fn constraint_residual(&self) -> f64 {
        let rhs = self.pair.wronskian.powi(-2);
        ((self.a * self.c - self.b * self.b - rhs) / rhs).abs()
    }

    pub fn sigma_squared(&self, theta: f64) -> Result<f64> {
        let [n, _, v, _] = self.pair.eval(theta)?;
        Ok(self.a * n * n + 2.0 * self.b * n * v + self.c * v * v)
    }

    pub fn sigma(&self, theta: f64) -> Result<f64> {
        let q = self.sigma_squared(theta)?;
        if !(q > 0.0) {
            return Err(Error::SigmaNotPositive { theta });
        }
        Ok(q.sqrt())
    }

    /// `σ, σ', σ'', σ'''` from the derivatives of `Q = σ²`:
    /// `Q'' = 2(Aν'² + 2Bν'v' + Cv'²) − 2ω²Q`, `Q''' = −4ω²Q' − 2(ω²)'Q`.
    pub fn sigma_derivatives(&self, theta: f64) -> Result<[f64; 4]> {
        let [n, dn, v, dv] = self.pair.eval(theta)?;
        let (a, b, c) = (self.a, self.b, self.c);
        let w2 = self.freq.omega_squared_jet(theta)?;
        let q = a * n * n + 2.0 * b * n * v + c * v * v;
        if !(q > 0.0) {
            return Err(Error::SigmaNotPositive { theta });
        }
        let q1 = 2.0 * (a * n * dn + b * (n * dv + dn * v) + c * v * dv);
        let q2 = 2.0 * (a * dn * dn + 2.0 * b * dn * dv + c * dv * dv) - 2.0 * w2.v * q;
        let q3 = -4.0 * w2.v * q1 - 2.0 * w2.d1 * q;
        let s = q.sqrt();
        let s1 = q1 / (2.0 * s);
        let s2 = (q2 - 2.0 * s1 * s1) / (2.0 * s);
        let s3 = (q3 - 6.0 * s1 * s2) / (2.0 * s);
        Ok([s, s1, s2, s3])
    }

    /// `σ'' + ω²σ − σ⁻³`
    pub fn pinney_residual(&self, theta: f64) -> Result<f64> {
        let [s, _, s2, _] = self.sigma_derivatives(theta)?;
        Ok(s2 + self.freq.omega_squared(theta)? * s - s.powi(-3))
    }

    /// `W(θ) − W`
    pub fn wronskian_deviation(&self, theta: f64) -> Result<f64> {
        Ok(self.pair.wronskian_at(theta)? - self.pair.wronskian)
    }

    /// `α(θ) = ∫_{θ₀}^{θ} ds/σ²(s)`, tabulated over the domain.
    pub fn phase(&self, theta0: f64) -> Result<Phase> {
        let (lo, hi) = self.domain();
        let table = CumulativeIntegral::build(&|s| self.inverse_sigma_squared(s), theta0, lo, hi, PHASE_PANELS, PHASE_QUAD_TOL)?;
        Ok(Phase { table })
    }

    fn inverse_sigma_squared(&self, theta: f64) -> Result<f64> {
        let q = self.sigma_squared(theta)?;
        if !(q > 0.0) {
            return Err(Error::SigmaNotPositive { theta });
        }
        Ok(1.0 / q)
    }
}

#[derive(Debug, Clone)]
pub struct Phase {
    table: CumulativeIntegral,
}

impl Phase {
    pub fn theta0(&self) -> f64 {
        self.table.origin()
    }

    pub fn alpha<F: Frequency>(&self, ps: &PinneySolution<F>, theta: f64) -> Result<f64> {
        self.table.eval(&|s| ps.inverse_sigma_squared(s), theta)
    }
}

/// A positive `σ` with three derivatives and its phase `α`, as consumed by the generators.
pub trait SigmaPhase: Send + Sync {
    /// `[σ, σ', σ'', σ''']`
    fn sigma_derivatives(&self, theta: f64) -> Result<[f64; 4]>;

    fn alpha(&self, theta: f64) -> Result<f64>;

    fn domain(&self) -> (f64, f64);

    /// `(α, σ⁻², −2σ'σ⁻³)`
    fn alpha_jet(&self, theta: f64) -> Result<Jet> {
        let [s, s1, ..] = self.sigma_derivatives(theta)?;
        Ok(Jet::new(self.alpha(theta)?, s.powi(-2), -2.0 * s1 * s.powi(-3)))
    }

    /// `σ` and `σ'` as jets in θ.
    fn sigma_jets(&self, theta: f64) -> Result<(Jet, Jet)> {
        let [s, s1, s2, s3] = self.sigma_derivatives(theta)?;
        Ok((Jet::new(s, s1, s2), Jet::new(s1, s2, s3)))
    }
}

/// `σ ≡ 1`, `α = θ − θ₀`: the Pinney partner of `ω² ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSigma {
    pub theta0: f64,
    pub domain: (f64, f64),
}

impl SigmaPhase for UnitSigma {
    fn sigma_derivatives(&self, _theta: f64) -> Result<[f64; 4]> {
        Ok([1.0, 0.0, 0.0, 0.0])
    }

    fn alpha(&self, theta: f64) -> Result<f64> {
        Ok(theta - self.theta0)
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// A numerical Pinney solution together with its phase.
#[derive(Debug, Clone)]
pub struct PhasedPinney<F> {
    pub solution: PinneySolution<F>,
    pub phase: Phase,
}

impl<F: Frequency> PhasedPinney<F> {
    pub fn new(solution: PinneySolution<F>, theta0: f64) -> Result<Self> {
        let phase = solution.phase(theta0)?;
        Ok(PhasedPinney { solution, phase })
    }
}

impl<F: Frequency> SigmaPhase for PhasedPinney<F> {
    fn sigma_derivatives(&self, theta: f64) -> Result<[f64; 4]> {
        self.solution.sigma_derivatives(theta)
    }

    fn alpha(&self, theta: f64) -> Result<f64> {
        self.phase.alpha(&self.solution, theta)
    }

    fn domain(&self) -> (f64, f64) {
        self.solution.domain()
    }
}

/// `I* = ½[u²/σ² + (σu' − σ'u)²]`
pub fn ermakov_lewis_reduced(u: f64, du: f64, sigma: f64, dsigma: f64) -> f64 {
    0.5 * (u * u / (sigma * sigma) + (sigma * du - dsigma * u).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginalInvariant {
    /// `½[σ⁻²r⁻² − (σL⁻¹ṙ + σ̇r⁻¹)²]` with `σ̇ = θ̇σ'`.
    pub printed: f64,
    /// The reduced invariant evaluated at `u = 1/r`, `u' = −ṙ/L`.
    pub pullback: f64,
}

/// `dsigma` is `dσ/dθ`; `l` the signed angular momentum.
pub fn ermakov_lewis_original(st: &PolarState, sigma: f64, dsigma: f64, l: f64) -> Result<OriginalInvariant> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("σ = {sigma} must be positive")));
    }
    if l == 0.0 || !(st.r > 0.0) {
        return Err(Error::Precondition("need r > 0 and L ≠ 0".into()));
    }
    let sigma_dot = st.thetadot * dsigma;
    let base = 1.0 / (sigma * sigma * st.r * st.r);
    let printed = 0.5 * (base - (sigma * st.rdot / l + sigma_dot / st.r).powi(2));
    let pullback = ermakov_lewis_reduced(1.0 / st.r, -st.rdot / l, sigma, dsigma);
    Ok(OriginalInvariant { printed, pullback })
}

/// `n` evenly spaced points over `[lo, hi]`.
pub fn uniform_grid(domain: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = domain;
    let n = n.max(2);
    let mut g: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    g[n - 1] = hi;
    g
}

/// Constraint, Abel and Pinney-residual claims on `grid`.
pub fn pinney_claims<F: Frequency>(ps: &PinneySolution<F>, grid: &[f64], exec: Exec) -> Result<Vec<ClaimVerdict>> {
    let desc = Some(GridDescriptor::over(grid));
    let rows = try_collect(exec.map(grid, |&th| -> Result<(f64, f64)> { Ok((ps.wronskian_deviation(th)?, ps.pinney_residual(th)?)) }))?;
    let abel: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let pinney: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(vec![
        ClaimVerdict::new("pinney_constraint", "AC - B^2 = W^-2 (relative)", ClaimMode::Assert, Some(TOL_CONSTRAINT))
            .with_residuals(None, &[ps.constraint_residual()])
            .with_details(json!({ "A": ps.a, "B": ps.b, "C": ps.c, "W": ps.pair.wronskian })),
        ClaimVerdict::new("wronskian_abel", "W = nu v' - nu' v is constant in theta", ClaimMode::Assert, Some(TOL_ABEL))
            .with_residuals(desc, &abel),
        ClaimVerdict::new("pinney_residual", "sigma'' + omega^2 sigma = sigma^-3", ClaimMode::Assert, Some(TOL_PINNEY))
            .with_residuals(desc, &pinney),
    ])
}

/// Drift of the reduced invariant along `base`, a solution `(u, u')` of the oscillator `sp` belongs to.
pub fn invariant_claim_reduced<S: SigmaPhase + ?Sized>(sp: &S, base: &Trajectory, grid: &[f64], exec: Exec) -> Result<ClaimVerdict> {
    let values = try_collect(exec.map(grid, |&th| -> Result<f64> {
        let y = base.eval(th)?;
        let [s, s1, ..] = sp.sigma_derivatives(th)?;
        Ok(ermakov_lewis_reduced(y[0], y[1], s, s1))
    }))?;
    let i0 = values[0];
    let drift: Vec<f64> = values.iter().map(|v| v - i0).collect();
    Ok(ClaimVerdict::new(
        "ELI_reduced",
        "I* = 1/2[u^2/sigma^2 + (sigma u' - sigma' u)^2] is constant along solutions",
        ClaimMode::Assert,
        Some(TOL_ELI),
    )
    .with_residuals(Some(GridDescriptor::over(grid)), &drift)
    .with_details(json!({ "I_star_start": i0 })))
}

/// Drift of the printed original-chart invariant along the simulated motion; the
/// pullback of the reduced invariant is reported alongside.
pub fn invariant_claim_original<S: SigmaPhase + ?Sized>(sp: &S, pf: &Pushforward, exec: Exec) -> Result<ClaimVerdict> {
    let values = try_collect(exec.map(&pf.grid, |g| -> Result<OriginalInvariant> {
        let [s, s1, ..] = sp.sigma_derivatives(g.polar.theta)?;
        ermakov_lewis_original(&g.polar, s, s1, g.cart.angular_momentum())
    }))?;
    let (p0, q0) = (values[0].printed, values[0].pullback);
    let printed: Vec<f64> = values.iter().map(|v| v.printed - p0).collect();
    let pullback: Vec<f64> = values.iter().map(|v| v.pullback - q0).collect();
    let (pull_max, pull_l2) = residual_norms(&pullback);
    Ok(ClaimVerdict::new(
        "ELI_original_printed",
        "1/2[sigma^-2 r^-2 - (sigma L^-1 rdot + sigmadot r^-1)^2] is constant along the motion",
        ClaimMode::Report,
        None,
    )
    .with_residuals(Some(pf.grid_descriptor()), &printed)
    .with_details(json!({
        "printed_start": p0,
        "pullback_start": q0,
        "pullback_drift_max": pull_max,
        "pullback_drift_l2": pull_l2,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::ConstantFrequency;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit(domain: (f64, f64)) -> ConstantFrequency {
        ConstantFrequency { omega_squared: 1.0, domain }
    }

    #[test]
    fn fundamental_pairs_of_constant_frequencies() {
        let p = fundamental_pair(&unit((-1.0, 3.0)), 0.0, 1e-11).unwrap();
        assert_eq!(p.domain(), (-1.0, 3.0));
        for th in [-1.0f64, 0.4, 2.9] {
            let [n, dn, v, dv] = p.eval(th).unwrap();
            assert!((n - th.cos()).abs() < 1e-8 && (v - th.sin()).abs() < 1e-8);
            assert!((dn + th.sin()).abs() < 1e-8 && (dv - th.cos()).abs() < 1e-8);
            assert!((p.wronskian_at(th).unwrap() - 1.0).abs() < 1e-9);
        }
        let four = ConstantFrequency { omega_squared: 4.0, domain: (0.0, 2.0) };
        let p = fundamental_pair(&four, 0.0, 1e-11).unwrap();
        let [n, _, v, _] = p.eval(1.3).unwrap();
        assert!((n - 2.6f64.cos()).abs() < 1e-8 && (v - 0.5 * 2.6f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn unit_sigma_from_cos_sin() {
        let p = fundamental_pair(&unit((0.0, 2.0)), 0.0, 1e-12).unwrap();
        let ps = pinney_sigma(unit((0.0, 2.0)), p, 1.0, 0.0, 1.0).unwrap();
        for th in [0.0, 0.7, 2.0] {
            let [s, s1, s2, _] = ps.sigma_derivatives(th).unwrap();
            assert!((s - 1.0).abs() < 1e-9 && s1.abs() < 1e-9 && s2.abs() < 1e-8);
            assert!(ps.pinney_residual(th).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn half_wronskian_example() {
        let freq = unit((0.0, FRAC_PI_2));
        // ν = cos, v = sin (W = 1): σ² = 4cos²θ + ¼sin²θ
        let pair = fundamental_pair(&freq, 0.0, 1e-12).unwrap();
        let ps = pinney_sigma(freq, pair, 4.0, 0.0, 0.25).unwrap();
        let [s, _, s2, _] = ps.sigma_derivatives(0.0).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert!((s2 + 15.0 / 8.0).abs() < 1e-9, "{s2}");
        assert!((s2 + s - 0.125).abs() < 1e-9);
        // α(π/2) − α(0) = π/2, against a Riemann sum of the closed-form integrand
        let phase = ps.phase(0.0).unwrap();
        let alpha = phase.alpha(&ps, FRAC_PI_2).unwrap();
        let n = 1_000_000;
        let h = FRAC_PI_2 / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                h / (4.0 * x.cos().powi(2) + 0.25 * x.sin().powi(2))
            })
            .sum();
        assert!((riemann - FRAC_PI_2).abs() < 1e-8);
        assert!((alpha - riemann).abs() < 1e-8, "{alpha}");
    }

    #[test]
    fn constraint_is_enforced() {
        let freq = unit((0.0, 1.0));
        let pair = fundamental_pair(&freq, 0.0, 1e-10).unwrap();
        match pinney_sigma(freq, pair.clone(), 1.0, 0.0, 2.0) {
            Err(Error::PinneyConstraint { lhs, rhs }) => assert_eq!((lhs, rhs), (2.0, 1.0)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            pinney_sigma(freq, pair.clone(), -1.0, 0.0, -1.0),
            Err(Error::SigmaNotPositive { .. })
        ));
        let auto = PinneySolution::with_triple(freq, pair, &"2,0.5,auto".parse().unwrap()).unwrap();
        assert!((auto.c - 0.625).abs() < 1e-15);
        assert!(auto.constraint_residual() < 1e-15);
    }

    #[test]
    fn triple_parsing_and_serde() {
        assert_eq!("auto".parse::<PinneyTriple>().unwrap(), PinneyTriple::default());
        let t: PinneyTriple = "1, 0, 1".parse().unwrap();
        assert_eq!(t.c, Some(1.0));
        assert!("1,2".parse::<PinneyTriple>().is_err());
        let j = serde_json::to_string(&PinneyTriple::default()).unwrap();
        assert_eq!(j, r#"{"A":1.0,"B":0.0,"C":"auto"}"#);
        let back: PinneyTriple = serde_json::from_str(r#"{"A":2,"B":1,"C":1}"#).unwrap();
        assert_eq!(back.c, Some(1.0));
        assert!(serde_json::from_str::<PinneyTriple>(r#"{"A":2,"B":1,"C":"x"}"#).is_err());
    }

    #[test]
    fn phase_examples() {
        let u = UnitSigma { theta0: 0.3, domain: (0.0, 1.0) };
        assert!((u.alpha(0.8).unwrap() - 0.5).abs() < 1e-15);
        // σ ≡ 2 solves the Pinney equation for ω² = 1/16: 4cos²(θ/4) + ¼(4 sin(θ/4))²
        let freq = ConstantFrequency { omega_squared: 1.0 / 16.0, domain: (0.0, 2.0) };
        let pair = fundamental_pair(&freq, 0.0, 1e-12).unwrap();
        let ps = pinney_sigma(freq, pair, 4.0, 0.0, 0.25).unwrap();
        assert!((ps.sigma(1.3).unwrap() - 2.0).abs() < 1e-10);
        let ph = ps.phase(0.5).unwrap();
        assert_eq!(ph.alpha(&ps, 0.5).unwrap(), 0.0);
        assert!((ph.alpha(&ps, 1.7).unwrap() - 0.3).abs() < 1e-10);
    }

    #[test]
    fn alpha_derivative_is_inverse_sigma_squared() {
        let freq = ConstantFrequency { omega_squared: 2.5, domain: (0.0, 2.0) };
        let pair = fundamental_pair(&freq, 0.4, 1e-12).unwrap();
        let ps = PhasedPinney::new(PinneySolution::with_triple(freq, pair, &"1.5,0.3,auto".parse().unwrap()).unwrap(), 0.4).unwrap();
        let h = 1e-3;
        let a = |x: f64| ps.alpha(x).unwrap();
        for th in [0.2, 0.9, 1.6] {
            let j = ps.alpha_jet(th).unwrap();
            let fd = (8.0 * (a(th + h) - a(th - h)) - (a(th + 2.0 * h) - a(th - 2.0 * h))) / (12.0 * h);
            assert!((fd - j.d1).abs() < 1e-8, "{th} {fd} {}", j.d1);
            let s = ps.sigma_derivatives(th).unwrap()[0];
            assert!((j.d1 * s * s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_derivatives_against_differences() {
        let freq = ConstantFrequency { omega_squared: 3.0, domain: (0.0, 2.0) };
        let pair = fundamental_pair(&freq, 1.0, 1e-12).unwrap();
        let ps = PinneySolution::with_triple(freq, pair, &"0.7,-0.2,auto".parse().unwrap()).unwrap();
        let h = 1e-4;
        for th in [0.3, 1.0, 1.7] {
            let d = ps.sigma_derivatives(th).unwrap();
            let p = ps.sigma_derivatives(th + h).unwrap();
            let m = ps.sigma_derivatives(th - h).unwrap();
            for k in 0..3 {
                assert!(((p[k] - m[k]) / (2.0 * h) - d[k + 1]).abs() < 1e-6, "{th} {k}");
            }
            assert!(ps.pinney_residual(th).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn scaling_the_pair_leaves_sigma_unchanged() {
        use rand::{Rng, SeedableRng};
        let freq = ConstantFrequency { omega_squared: 1.7, domain: (0.0, 3.0) };
        let pair = fundamental_pair(&freq, 0.0, 1e-12).unwrap();
        let ps = pinney_sigma(freq, pair.clone(), 2.0, 0.4, (1.0 + 0.16) / 2.0).unwrap();
        let c = 1.9;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let th: f64 = rng.random_range(0.0..3.0);
            let [n, _, v, _] = pair.eval(th).unwrap();
            let (n2, v2) = (c * n, v / c);
            let (a, b, cc) = (ps.a / (c * c), ps.b, ps.c * c * c);
            let q = a * n2 * n2 + 2.0 * b * n2 * v2 + cc * v2 * v2;
            assert!((q.sqrt() - ps.sigma(th).unwrap()).abs() < 1e-13);
        }
    }

    /// Independent check: integrate σ'' = σ⁻³ − ω²σ directly.
    #[test]
    fn agrees_with_direct_pinney_integration() {
        let freq = ConstantFrequency { omega_squared: 0.8, domain: (0.0, 4.0) };
        let pair = fundamental_pair(&freq, 0.0, 1e-12).unwrap();
        let ps = PinneySolution::with_triple(freq, pair, &"1.3,0.2,auto".parse().unwrap()).unwrap();
        let [s0, s1, ..] = ps.sigma_derivatives(0.0).unwrap();
        let direct = crate::dynamics::integrate(
            |_t, y: &[f64], out: &mut [f64]| {
                out[0] = y[1];
                out[1] = y[0].powi(-3) - 0.8 * y[0];
                Ok(())
            },
            &[s0, s1],
            (0.0, 4.0),
            IntegratorOptions::with_tol(1e-12),
        )
        .unwrap();
        for th in [0.5, 2.0, 4.0] {
            assert!((direct.eval(th).unwrap()[0] - ps.sigma(th).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn invariant_examples() {
        assert!((ermakov_lewis_reduced(0.3f64.sin(), 0.3f64.cos(), 1.0, 0.0) - 0.5).abs() < 1e-15);
        assert_eq!(ermakov_lewis_reduced(0.0, 0.0, 1.3, 0.2), 0.0);
        // σ ≡ 1, r = 1, ṙ = −L: the printed form gives 0, the pullback 1
        let l = 1.7;
        let st = PolarState { t: 0.0, r: 1.0, theta: 0.5, rdot: -l, thetadot: l };
        let inv = ermakov_lewis_original(&st, 1.0, 0.0, l).unwrap();
        assert!(inv.printed.abs() < 1e-15 && (inv.pullback - 1.0).abs() < 1e-15);
        // with ṙ = 0 the two forms agree
        let st = PolarState { rdot: 0.0, r: 2.0, thetadot: l / 4.0, ..st };
        let inv = ermakov_lewis_original(&st, 1.0, 0.0, l).unwrap();
        assert_eq!(inv.printed, 0.125);
        assert_eq!(inv.pullback, 0.125);
        // pullback equals the reduced form on the matching reduced state
        let st = PolarState { t: 0.0, r: 1.4, theta: 0.9, rdot: 0.3, thetadot: 2.0 / 1.96 };
        let inv = ermakov_lewis_original(&st, 1.2, -0.4, 2.0).unwrap();
        assert_eq!(inv.pullback, ermakov_lewis_reduced(1.0 / 1.4, -0.3 / 2.0, 1.2, -0.4));
        assert!(ermakov_lewis_original(&st, 0.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn invariant_conserved_on_constant_profile() {
        let freq = ConstantFrequency { omega_squared: 2.0, domain: (0.0, PI) };
        let pair = fundamental_pair(&freq, 0.0, 1e-12).unwrap();
        let ps = PinneySolution::with_triple(freq, pair, &PinneyTriple::default()).unwrap();
        let u = crate::reduction::integrate_oscillator(&freq, 0.0, [0.4, -1.1], (0.0, PI), 1e-12).unwrap();
        let inv = |th: f64| {
            let y = u.eval(th).unwrap();
            let [s, s1, ..] = ps.sigma_derivatives(th).unwrap();
            ermakov_lewis_reduced(y[0], y[1], s, s1)
        };
        let i0 = inv(0.0);
        for th in [0.5, 1.5, PI] {
            assert!((inv(th) - i0).abs() < 1e-9);
        }
    }

    #[test]
    fn toy_profile_claims() {
        use crate::reduction::{integrate_reduced, reduce_state, AuditOptions, FrequencyProfile};
        use crate::systems::{to_polar, CartesianState, ErmakovSystem};
        let ic = CartesianState::new(0.0, 1.0, 1.0, 0.1, -0.1);
        let pf = Pushforward::build(&ErmakovSystem::toy(), &ic, (0.0, 1.0), &AuditOptions::default(), Exec::Parallel).unwrap();
        let prof: FrequencyProfile = pf.profile.clone();
        let theta0 = pf.law.theta0();
        let pair = fundamental_pair(&prof, theta0, 1e-10).unwrap();
        let ps = PinneySolution::with_triple(prof.clone(), pair, &PinneyTriple::default()).unwrap();
        let grid = uniform_grid(ps.domain(), 201);
        for c in pinney_claims(&ps, &grid, Exec::Parallel).unwrap() {
            eprintln!("{} {:?} {:?}", c.claim, c.residual_max, c.verdict);
            assert_eq!(c.verdict, crate::verdict::Verdict::Pass);
        }
        let rs0 = reduce_state(&to_polar(&ic).unwrap(), &pf.law).unwrap();
        let base = integrate_reduced(&prof, &rs0, ps.domain(), 1e-10).unwrap();
        let sp = PhasedPinney::new(ps, theta0).unwrap();
        let c = invariant_claim_reduced(&sp, &base.trajectory, &grid, Exec::Parallel).unwrap();
        eprintln!("{} {:?} {:?} {}", c.claim, c.residual_max, c.verdict, c.details);
        assert_eq!(c.verdict, crate::verdict::Verdict::Pass);
        let c = invariant_claim_original(&sp, &pf, Exec::Parallel).unwrap();
        eprintln!("{} {:?} {:?} {}", c.claim, c.residual_max, c.verdict, c.details);
        eprintln!("domain {:?}", sp.domain());
    }
}
