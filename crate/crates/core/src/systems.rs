//! The three Ermakov classes: Cartesian equations of motion, their polar
//! components, and the coordinate maps between the two charts.
//!
//! Every class has forces homogeneous of degree −3 in r (apart from the
//! Kepler `¼C r³` term), so the polar components are written as
//! `F_r = Ψ(θ)/r³` and `F_θ = Φ(θ)/r³`. [`ErmakovSystem::force_profile`]
//! returns `(Ψ, Φ)` as jets in θ; the reduction builds `ω²` and the momentum
//! law from them.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::exec::{try_collect, Exec};
use crate::expr::{parse, Expression};
use crate::verdict::{ClaimMode, ClaimVerdict};
use crate::jet::Jet;
use crate::{Error, Result};

/// Half-width of the excluded band around multiples of π/2.
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemClass {
    KeplerErmakov,
    Generalized,
    Toy,
}

impl SystemClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemClass::KeplerErmakov => "kepler_ermakov",
            SystemClass::Generalized => "generalized",
            SystemClass::Toy => "toy",
        }
    }
}

/// On-disk system definition. Omitted expressions default to `"0"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDefinition {
    pub class: SystemClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub kepler_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmakovSystem {
    pub class: SystemClass,
    /// Function of ρ = y/x.
    pub f: Expression,
    /// Function of ρ = y/x.
    pub g: Expression,
    /// Function of cot θ (Kepler–Ermakov only).
    pub h: Expression,
    /// Angular frequency as a function of t.
    pub w: Expression,
    pub kepler_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub rdot: f64,
    pub thetadot: f64,
}

/// Angular profiles of the polar force components: `F_r = Ψ/r³`, `F_θ = Φ/r³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceProfile {
    pub radial: Jet,
    pub transversal: Jet,
}

impl CartesianState {
    pub fn new(t: f64, x: f64, y: f64, vx: f64, vy: f64) -> Self {
        CartesianState { t, x, y, vx, vy }
    }

    pub fn from_slice(t: f64, s: &[f64]) -> Self {
        CartesianState::new(t, s[0], s[1], s[2], s[3])
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.x, self.y, self.vx, self.vy]
    }

    pub fn check_off_axes(&self) -> Result<()> {
        if self.x == 0.0 || self.y == 0.0 {
            return Err(Error::Pole(format!(
                "state on a coordinate axis (x = {}, y = {})",
                self.x, self.y
            )));
        }
        Ok(())
    }

    pub fn angular_momentum(&self) -> f64 {
        self.x * self.vy - self.y * self.vx
    }

    /// Quadrant index 0..4 counted anticlockwise from the positive x axis.
    pub fn quadrant(&self) -> u8 {
        match (self.x > 0.0, self.y > 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    }
}

impl PolarState {
    pub fn angular_momentum(&self) -> f64 {
        self.r * self.r * self.thetadot
    }
}

pub fn to_polar(st: &CartesianState) -> Result<PolarState> {
    let r = st.x.hypot(st.y);
    if r == 0.0 {
        return Err(Error::Origin);
    }
    Ok(PolarState {
        t: st.t,
        r,
        theta: st.y.atan2(st.x),
        rdot: (st.x * st.vx + st.y * st.vy) / r,
        thetadot: (st.x * st.vy - st.y * st.vx) / (r * r),
    })
}

pub fn from_polar(st: &PolarState) -> CartesianState {
    let (s, c) = st.theta.sin_cos();
    let vt = st.r * st.thetadot;
    CartesianState {
        t: st.t,
        x: st.r * c,
        y: st.r * s,
        vx: st.rdot * c - vt * s,
        vy: st.rdot * s + vt * c,
    }
}

/// Rejects angles within [`POLE_GUARD`] of a multiple of π/2.
pub fn check_pole_band(theta: f64) -> Result<()> {
    let m = theta.rem_euclid(FRAC_PI_2);
    if m < POLE_GUARD || FRAC_PI_2 - m < POLE_GUARD {
        return Err(Error::Pole(format!(
            "theta = {theta} lies within {POLE_GUARD} of a multiple of pi/2"
        )));
    }
    Ok(())
}

fn trig(theta: Jet) -> (Jet, Jet, Jet, Jet) {
    let s = theta.sin();
    let c = theta.cos();
    (s, c, s / c, c / s)
}

impl ErmakovSystem {
    pub fn new(class: SystemClass, f: Expression, g: Expression, h: Expression, w: Expression, kepler_c: f64) -> Self {
        ErmakovSystem { class, f, g, h, w, kepler_c }
    }

    pub fn toy() -> Self {
        Self::new(SystemClass::Toy, Expression::zero(), Expression::zero(), Expression::zero(), Expression::zero(), 0.0)
    }

    pub fn generalized(f: Expression, g: Expression) -> Self {
        Self::new(SystemClass::Generalized, f, g, Expression::zero(), Expression::zero(), 0.0)
    }

    pub fn kepler_ermakov(f: Expression, g: Expression, h: Expression, kepler_c: f64) -> Self {
        Self::new(SystemClass::KeplerErmakov, f, g, h, Expression::zero(), kepler_c)
    }

    pub fn with_frequency(mut self, w: Expression) -> Self {
        self.w = w;
        self
    }

    pub fn from_definition(def: &SystemDefinition) -> Result<Self> {
        let field = |s: &Option<String>| -> Result<Expression> {
            Ok(parse(s.as_deref().unwrap_or("0"))?)
        };
        Ok(ErmakovSystem {
            class: def.class,
            f: field(&def.f)?,
            g: field(&def.g)?,
            h: field(&def.h)?,
            w: field(&def.w)?,
            kepler_c: def.kepler_c.unwrap_or(0.0),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let def: SystemDefinition = serde_json::from_str(text)?;
        Self::from_definition(&def)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn definition(&self) -> SystemDefinition {
        SystemDefinition {
            class: self.class,
            f: Some(self.f.to_string()),
            g: Some(self.g.to_string()),
            h: Some(self.h.to_string()),
            w: Some(self.w.to_string()),
            kepler_c: Some(self.kepler_c),
        }
    }

    /// Polar and reduced pipelines have no `w²r` term; they need `w ≡ 0`.
    pub fn require_static_frequency(&self) -> Result<()> {
        if self.w.is_identically_zero() {
            Ok(())
        } else {
            Err(Error::Precondition("w ≠ 0".into()))
        }
    }

    pub fn cartesian_rhs(&self, st: &CartesianState) -> Result<(f64, f64)> {
        st.check_off_axes()?;
        let w = self.w.evaluate(st.t)?;
        let w2 = w * w;
        let (x, y) = (st.x, st.y);
        let (ax, ay) = match self.class {
            SystemClass::Toy => (1.0 / (x * x * x), 1.0 / (y * y * y)),
            SystemClass::Generalized => {
                let rho = y / x;
                let f = self.f.evaluate(rho)?;
                let g = self.g.evaluate(rho)?;
                (f / (y * x * x), g / (x * y * y))
            }
            SystemClass::KeplerErmakov => {
                let rho = y / x;
                let r = x.hypot(y);
                let f = self.f.evaluate(rho)?;
                let g = self.g.evaluate(rho)?;
                // H = ¼ C r³ − h(cot θ)/(r cos θ), and r cos θ = x
                let big_h = 0.25 * self.kepler_c * r * r * r - self.h.evaluate(x / y)? / x;
                let r3 = r * r * r;
                (
                    -x * big_h / r3 + f / (x * x * x),
                    -y * big_h / r3 + g / (y * y * y),
                )
            }
        };
        Ok((ax - w2 * x, ay - w2 * y))
    }

    /// `(Ψ, Φ)` as jets in θ, consistent with [`Self::cartesian_rhs`].
    pub fn force_profile(&self, theta: Jet) -> Result<ForceProfile> {
        check_pole_band(theta.v)?;
        let (s, c, t, ct) = trig(theta);
        let sec2 = t * t + 1.0;
        let csc2 = ct * ct + 1.0;
        let profile = match self.class {
            SystemClass::Toy => ForceProfile {
                radial: (t + ct) * (t + ct),
                transversal: ct * csc2 - t * sec2,
            },
            SystemClass::Generalized => {
                let f = self.f.evaluate_jet(t)?;
                let g = self.g.evaluate_jet(t)?;
                ForceProfile {
                    radial: (f + g) / (s * c),
                    transversal: g * csc2 - f * sec2,
                }
            }
            SystemClass::KeplerErmakov => {
                let f = self.f.evaluate_jet(t)?;
                let g = self.g.evaluate_jet(t)?;
                let h = self.h.evaluate_jet(ct)?;
                ForceProfile {
                    radial: h / c + f * sec2 + g * csc2,
                    transversal: g * ct * csc2 - f * t * sec2,
                }
            }
        };
        Ok(profile)
    }

    /// Residual forces `(r̈ − rθ̇², rθ̈ + 2ṙθ̇)` of the motion. Requires `w ≡ 0`.
    pub fn polar_rhs(&self, st: &PolarState) -> Result<(f64, f64)> {
        self.require_static_frequency()?;
        if !(st.r > 0.0) {
            return Err(Error::Origin);
        }
        let p = self.force_profile(Jet::constant(st.theta))?;
        let r3 = st.r.powi(3);
        let kepler = if self.class == SystemClass::KeplerErmakov {
            -0.25 * self.kepler_c * st.r
        } else {
            0.0
        };
        Ok((p.radial.v / r3 + kepler, p.transversal.v / r3))
    }

    /// The polar components in the literal displayed forms, kept apart from
    /// [`Self::polar_rhs`] so the two can be compared.
    pub fn printed_polar_rhs(&self, st: &PolarState) -> Result<(f64, f64)> {
        self.require_static_frequency()?;
        check_pole_band(st.theta)?;
        let th = st.theta;
        let (t, ct) = (th.tan(), 1.0 / th.tan());
        let (sec2, csc2) = (1.0 / th.cos().powi(2), 1.0 / th.sin().powi(2));
        let r3 = st.r.powi(3);
        let (fr, ft) = match self.class {
            SystemClass::Toy => {
                let prime = parse("tan(x) - cot(x)")?.differentiate().evaluate(th)?;
                ((t + ct).powi(2), -0.5 * prime)
            }
            SystemClass::Generalized | SystemClass::KeplerErmakov => {
                let f = self.f.evaluate(t)?;
                let g = self.g.evaluate(t)?;
                let mut fr = sec2 * f + csc2 * g;
                if self.class == SystemClass::KeplerErmakov {
                    fr += self.h.evaluate(ct)? / th.cos();
                }
                (fr, -(sec2 * t * f - csc2 * ct * g))
            }
        };
        Ok((fr / r3, ft / r3))
    }

    /// Polar components of the Cartesian acceleration at `st` (with `w ≡ 0`).
    pub fn cartesian_force_in_polar(&self, st: &CartesianState) -> Result<(f64, f64)> {
        let (ax, ay) = self.cartesian_rhs(st)?;
        let r = st.x.hypot(st.y);
        let (c, s) = (st.x / r, st.y / r);
        Ok((c * ax + s * ay, -s * ax + c * ay))
    }

    /// `|polar_rhs − Cartesian force mapped to polar|` per component.
    pub fn polar_identity_residual(&self, st: &CartesianState) -> Result<(f64, f64)> {
        let (ar, at) = self.cartesian_force_in_polar(st)?;
        let (fr, ft) = self.polar_rhs(&to_polar(st)?)?;
        Ok(((ar - fr).abs(), (at - ft).abs()))
    }

    /// First-order form `[x, y, vx, vy]' = [vx, vy, ax, ay]` for the integrator.
    pub fn first_order_rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
        move |t, s, out| {
            let (ax, ay) = self.cartesian_rhs(&CartesianState::from_slice(t, s))?;
            out[0] = s[2];
            out[1] = s[3];
            out[2] = ax;
            out[3] = ay;
            Ok(())
        }
    }
}

pub const TOL_POLAR_FORCE: f64 = 1e-10;

/// `n` seeded states with `r ∈ [0.5, 2]`, θ at least 0.1 from the axes in any
/// quadrant, and velocities in `[−1, 1]`.
pub fn random_states(n: usize, seed: u64) -> Vec<CartesianState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r: f64 = rng.random_range(0.5..=2.0);
            let q = rng.random_range(0..4) as f64;
            let theta = q * FRAC_PI_2 + rng.random_range(0.1..=FRAC_PI_2 - 0.1);
            let mut st = from_polar(&PolarState { t: 0.0, r, theta, rdot: 0.0, thetadot: 0.0 });
            st.vx = rng.random_range(-1.0..=1.0);
            st.vy = rng.random_range(-1.0..=1.0);
            st
        })
        .collect()
}

/// The polar force components against the Cartesian forces rotated into the
/// polar frame, on seeded random states.
pub fn polar_identity_audit(system: &ErmakovSystem, n: usize, seed: u64, exec: Exec) -> Result<ClaimVerdict> {
    system.require_static_frequency()?;
    let states = random_states(n, seed);
    let res = try_collect(exec.map(&states, |st| -> Result<f64> {
        let (a, b) = system.polar_identity_residual(st)?;
        Ok(a.max(b))
    }))?;
    Ok(ClaimVerdict::new(
        "polar_force",
        "(F_r, F_theta) = (Psi/r^3, Phi/r^3) is the polar image of the Cartesian forces",
        ClaimMode::Assert,
        Some(TOL_POLAR_FORCE),
    )
    .with_residuals(None, &res)
    .with_details(json!({ "states": n, "seed": seed })))
}
