use serde::Serialize;

use super::ReducedField;
use crate::jet::Jet;
use crate::pinney::SigmaPhase;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `(θ, u)`
    Reduced,
    /// `(t, r)`
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Point,
    Nonlocal,
}

/// `Γ₁ … Γ₉` over a Pinney solution and its phase; `σ̇` is `dσ/dθ`.
#[derive(Clone, Copy)]
pub struct PointGenerator<'a> {
    index: u8,
    sp: &'a dyn SigmaPhase,
}

pub fn point_generators(sp: &dyn SigmaPhase) -> Vec<PointGenerator<'_>> {
    (1..=9).map(|index| PointGenerator { index, sp }).collect()
}

fn coefficient_jets(index: u8, s: Jet, sd: Jet, a: Jet, u: Jet) -> (Jet, Jet) {
    let zero = Jet::constant(0.0);
    let one = Jet::constant(1.0);
    let a2 = a.scale(2.0);
    match index {
        1 => (one, zero),
        2 => (s * s * a2.sin(), u * (s * sd * a2.sin() + a2.cos())),
        3 => (s * s * a2.cos(), u * (s * sd * a2.cos() - a2.sin())),
        4 => (zero, s * a.cos()),
        5 => (zero, s * a.sin()),
        6 => (s * s, s * sd * u),
        7 => (zero, u),
        8 => (s * u * a.sin(), u * u * (sd * a.sin() + a.cos() / s)),
        9 => (s * u * a.cos(), u * u * (sd * a.cos() - a.sin() / s)),
        _ => unreachable!("generator index checked at construction"),
    }
}

impl<'a> PointGenerator<'a> {
    pub fn new(index: u8, sp: &'a dyn SigmaPhase) -> Result<Self> {
        if !(1..=9).contains(&index) {
            return Err(Error::OutOfRange(format!("no generator Γ{index}")));
        }
        Ok(PointGenerator { index, sp })
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    /// Whether the field is `0·∂θ + (linear in u)∂u`.
    pub fn is_vertical_linear(&self) -> bool {
        matches!(self.index, 4 | 5 | 7)
    }

    /// `(ξ, η)` along a curve `u(θ)` given as a jet, with exact first and second θ-derivatives.
    pub fn along(&self, theta: f64, u: Jet) -> Result<(Jet, Jet)> {
        let (s, sd) = self.sp.sigma_jets(theta)?;
        let a = self.sp.alpha_jet(theta)?;
        Ok(coefficient_jets(self.index, s, sd, a, u))
    }
}

impl ReducedField for PointGenerator<'_> {
    fn name(&self) -> String {
        format!("Gamma{}", self.index)
    }

    fn eval(&self, theta: f64, u: f64) -> Result<[f64; 2]> {
        let (x, e) = self.along(theta, Jet::constant(u))?;
        Ok([x.v, e.v])
    }

    /// Exact partials: θ-jets with `u` frozen, then a `u`-jet with θ frozen.
    fn jacobian(&self, theta: f64, u: f64) -> Result<[[f64; 2]; 2]> {
        let (s, sd) = self.sp.sigma_jets(theta)?;
        let a = self.sp.alpha_jet(theta)?;
        let (xt, et) = coefficient_jets(self.index, s, sd, a, Jet::constant(u));
        let c = |j: Jet| Jet::constant(j.v);
        let (xu, eu) = coefficient_jets(self.index, c(s), c(sd), c(a), Jet::variable(u));
        Ok([[xt.d1, xu.d1], [et.d1, eu.d1]])
    }
}

/// Everything the original-chart coefficients reference at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginalPoint {
    pub r: f64,
    /// Signed angular momentum `r²θ̇`.
    pub l: f64,
    pub sigma: f64,
    /// `dσ/dt`
    pub sigma_dot: f64,
    pub alpha: f64,
}

/// `V₁ … V₁₀`, coefficients `τ∂t + ρ∂r` exactly as displayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackGenerator {
    index: u8,
}

pub fn back_generators() -> Vec<BackGenerator> {
    (1..=10).map(|index| BackGenerator { index }).collect()
}

impl BackGenerator {
    pub fn new(index: u8) -> Result<Self> {
        if !(1..=10).contains(&index) {
            return Err(Error::OutOfRange(format!("no generator V{index}")));
        }
        Ok(BackGenerator { index })
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn name(&self) -> String {
        format!("V{}", self.index)
    }

    pub fn chart(&self) -> Chart {
        Chart::Original
    }

    /// Point fields reference neither `L` nor `α` (nor `σ`, which is composed with θ(t)).
    pub fn locality(&self) -> Locality {
        match self.index {
            7 | 10 => Locality::Point,
            _ => Locality::Nonlocal,
        }
    }

    /// The reduced-chart partner, if any.
    pub fn partner(&self) -> Option<u8> {
        (self.index <= 9).then_some(self.index)
    }

    /// `[τ, ρ]`. Powers of `1/r` are built as repeated products of `1/r`.
    pub fn eval(&self, p: &OriginalPoint) -> [f64; 2] {
        let ri = 1.0 / p.r;
        let (r2, r3) = (ri * ri, ri * ri * ri);
        let r4 = r3 * ri;
        let (s, sd, a, l) = (p.sigma, p.sigma_dot, p.alpha, p.l);
        let (s2a, c2a) = ((2.0 * a).sin(), (2.0 * a).cos());
        match self.index {
            1 => [r2 * l, 0.0],
            2 => [s * s * r2 * l * s2a, -r3 * (s * sd * s2a + c2a)],
            3 => [s * s * r2 * l * c2a, -r3 * (s * sd * c2a - s2a)],
            4 => [0.0, -s * r2 * a.cos()],
            5 => [0.0, -s * r2 * a.sin()],
            6 => [s * s * r2 * l, -s * sd * r3],
            7 => [0.0, -r3],
            8 => [s * r3 * l * a.sin(), -r4 * (sd * a.sin() + a.cos() / s)],
            9 => [s * r3 * l * a.cos(), -r4 * (sd * a.cos() - a.sin() / s)],
            _ => [1.0, 0.0],
        }
    }
}
