//! Reduction of the planar motion to a θ-dependent oscillator plus a
//! conservation law, and residual audits of the reduced equations.
//!
//! With `L = r²θ̇` and `u = 1/r`, the transversal equation gives
//! `d(L²)/dθ = 2Φ(θ)`, so `L² = L₀ + μ(θ)` with `μ(θ₀) = 0`. The radial
//! equation becomes
//!
//! ```text
//! u'' + (L'/L) u' + ω²(θ) u = 0,     ω² = 1 + Ψ(θ)/L²
//! ```
//!
//! The oscillator without the `(L'/L) u'` term is what the reduced system
//! states; both forms are measured along simulated trajectories.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde_json::json;

use crate::dynamics::{integrate, integrate_through, CumulativeIntegral, IntegratorOptions, Trajectory, DEFAULT_TOL};
use crate::exec::{try_collect, Exec};
use crate::jet::Jet;
use crate::systems::{check_pole_band, to_polar, CartesianState, ErmakovSystem, PolarState, SystemClass};
use crate::verdict::{ClaimMode, ClaimVerdict, GridDescriptor};
use crate::{Error, Result};

pub const DEFAULT_THETA0: f64 = FRAC_PI_4;
pub const AUDIT_GRID_POINTS: usize = 201;
/// Relative mismatch allowed between `r²θ̇` and the momentum law in [`reduce_state`].
pub const MOMENTUM_CONSISTENCY: f64 = 1e-6;
/// Audit grids stop where `|L|` first falls below this fraction of its running maximum.
pub const TURNING_GUARD: f64 = 0.5;
const MU_PANELS: usize = 64;
const MU_QUAD_TOL: f64 = 1e-13;

pub const TOL_MOMENTUM_LAW: f64 = 1e-7;
pub const TOL_REDUCED_FULL: f64 = 1e-6;

/// An oscillator frequency `ω²(θ)` with first two derivatives.
pub trait Frequency: Send + Sync {
    fn omega_squared_jet(&self, theta: f64) -> Result<Jet>;

    fn omega_squared(&self, theta: f64) -> Result<f64> {
        Ok(self.omega_squared_jet(theta)?.v)
    }

    /// Interval on which `ω²` is defined.
    fn domain(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFrequency {
    pub omega_squared: f64,
    pub domain: (f64, f64),
}

impl Frequency for ConstantFrequency {
    fn omega_squared_jet(&self, _theta: f64) -> Result<Jet> {
        Ok(Jet::constant(self.omega_squared))
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

#[derive(Debug, Clone)]
enum Mu {
    /// μ = c₀ − (tan²θ + cot²θ)
    Toy { c0: f64 },
    Tabulated(CumulativeIntegral),
}

fn quadrant_of(theta: f64) -> i64 {
    (theta / FRAC_PI_2).floor() as i64
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo <= hi) {
        return Err(Error::Precondition(format!("empty interval [{lo}, {hi}]")));
    }
    check_pole_band(lo)?;
    check_pole_band(hi)?;
    if quadrant_of(lo) != quadrant_of(hi) {
        return Err(Error::Precondition(format!("interval [{lo}, {hi}] spans a quadrant boundary")));
    }
    Ok(())
}

/// `L² = L₀ + μ(θ)` with `μ(θ₀) = 0`, on a pole-free working interval.
#[derive(Debug, Clone)]
pub struct MomentumLaw {
    system: ErmakovSystem,
    theta0: f64,
    l0_squared: f64,
    orientation: f64,
    interval: (f64, f64),
    mu: Mu,
}

impl MomentumLaw {
    /// `orientation` is the sign of `L` (the sense of rotation).
    pub fn new(system: &ErmakovSystem, theta0: f64, l0_squared: f64, interval: (f64, f64), orientation: f64) -> Result<Self> {
        let law = Self::unchecked(system, theta0, interval, orientation)?;
        if !(l0_squared > 0.0) {
            return Err(Error::Precondition(format!("L0^2 = {l0_squared} must be positive")));
        }
        let law = MomentumLaw { l0_squared, ..law };
        law.check_positive()?;
        Ok(law)
    }

    /// Fixes `L₀` so that the law passes through `reference`.
    pub fn through_state(system: &ErmakovSystem, theta0: f64, interval: (f64, f64), reference: &PolarState) -> Result<Self> {
        let l = reference.angular_momentum();
        if l == 0.0 {
            return Err(Error::Precondition("angular momentum vanishes; θ is not a valid independent variable".into()));
        }
        let law = Self::unchecked(system, theta0, interval, l.signum())?;
        let l0_squared = l * l - law.mu(reference.theta)?;
        if !(l0_squared > 0.0) {
            return Err(Error::MomentumZero { theta: theta0 });
        }
        let law = MomentumLaw { l0_squared, ..law };
        law.check_positive()?;
        Ok(law)
    }

    fn unchecked(system: &ErmakovSystem, theta0: f64, interval: (f64, f64), orientation: f64) -> Result<Self> {
        system.require_static_frequency()?;
        if system.class == SystemClass::KeplerErmakov && system.kepler_c != 0.0 {
            return Err(Error::Precondition("C ≠ 0 adds a non-homogeneous radial term".into()));
        }
        let (lo, hi) = (interval.0.min(theta0), interval.1.max(theta0));
        check_interval(lo, hi)?;
        let mu = match system.class {
            SystemClass::Toy => {
                let t = theta0.tan();
                Mu::Toy { c0: t * t + 1.0 / (t * t) }
            }
            _ => {
                let f = |s: f64| -> Result<f64> { Ok(2.0 * system.force_profile(Jet::constant(s))?.transversal.v) };
                Mu::Tabulated(CumulativeIntegral::build(&f, theta0, lo, hi, MU_PANELS, MU_QUAD_TOL)?)
            }
        };
        Ok(MomentumLaw {
            system: system.clone(),
            theta0,
            l0_squared: 1.0,
            orientation: if orientation < 0.0 { -1.0 } else { 1.0 },
            interval: (lo, hi),
            mu,
        })
    }

    /// Scans outward from θ₀, where `L² = L₀ > 0`, for the first zero.
    fn check_positive(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        let n = 256;
        for end in [lo, hi] {
            let mut prev = self.theta0;
            for i in 1..=n {
                let th = self.theta0 + (end - self.theta0) * i as f64 / n as f64;
                if self.l_squared(th)? <= 0.0 {
                    return Err(Error::MomentumZero { theta: self.bisect_zero(prev, th)? });
                }
                prev = th;
            }
        }
        Ok(())
    }

    fn bisect_zero(&self, mut a: f64, mut b: f64) -> Result<f64> {
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.l_squared(m)? > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn system(&self) -> &ErmakovSystem {
        &self.system
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn l0_squared(&self) -> f64 {
        self.l0_squared
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn mu(&self, theta: f64) -> Result<f64> {
        match &self.mu {
            Mu::Toy { c0 } => {
                check_pole_band(theta)?;
                let t = theta.tan();
                Ok(c0 - (t * t + 1.0 / (t * t)))
            }
            Mu::Tabulated(table) => {
                let f = |s: f64| -> Result<f64> { Ok(2.0 * self.system.force_profile(Jet::constant(s))?.transversal.v) };
                table.eval(&f, theta)
            }
        }
    }

    /// `(μ, μ', μ'') = (μ, 2Φ, 2Φ')`.
    pub fn mu_jet(&self, theta: f64) -> Result<Jet> {
        let phi = self.system.force_profile(Jet::variable(theta))?.transversal;
        Ok(Jet::new(self.mu(theta)?, 2.0 * phi.v, 2.0 * phi.d1))
    }

    pub fn l_squared(&self, theta: f64) -> Result<f64> {
        Ok(self.l0_squared + self.mu(theta)?)
    }

    pub fn l_squared_jet(&self, theta: f64) -> Result<Jet> {
        Ok(self.mu_jet(theta)? + self.l0_squared)
    }

    /// Signed `L(θ)`.
    pub fn l(&self, theta: f64) -> Result<f64> {
        let l2 = self.l_squared(theta)?;
        if l2 <= 0.0 {
            return Err(Error::MomentumZero { theta });
        }
        Ok(self.orientation * l2.sqrt())
    }
}

/// `ω²(θ) = 1 + Ψ(θ)/L²(θ)` for a system and its momentum law.
#[derive(Debug, Clone)]
pub struct FrequencyProfile {
    law: MomentumLaw,
}

impl FrequencyProfile {
    pub fn new(law: MomentumLaw) -> Self {
        FrequencyProfile { law }
    }

    pub fn law(&self) -> &MomentumLaw {
        &self.law
    }

    pub fn system(&self) -> &ErmakovSystem {
        &self.law.system
    }

    /// The class formula in its literal displayed form (report-only comparisons).
    pub fn printed_omega_squared(&self, theta: f64) -> Result<f64> {
        check_pole_band(theta)?;
        let sys = &self.law.system;
        let l2 = self.law.l_squared(theta)?;
        let (t, ct) = (theta.tan(), 1.0 / theta.tan());
        let (sec2, csc2) = (1.0 + t * t, 1.0 + ct * ct);
        Ok(match sys.class {
            SystemClass::Toy => 1.0 + (t + ct).powi(2) / l2,
            SystemClass::Generalized => 1.0 + (sec2 * sys.f.evaluate(t)? + csc2 * sys.g.evaluate(t)?) / l2,
            SystemClass::KeplerErmakov => {
                1.0 + sys.h.evaluate(ct)? / theta.sin()
                    + (sec2 * sys.f.evaluate(t)? + csc2 * sys.g.evaluate(t)?) / l2
            }
        })
    }
}

impl Frequency for FrequencyProfile {
    fn omega_squared_jet(&self, theta: f64) -> Result<Jet> {
        let psi = self.law.system.force_profile(Jet::variable(theta))?.radial;
        let l2 = self.law.l_squared_jet(theta)?;
        if l2.v <= 0.0 {
            return Err(Error::MomentumZero { theta });
        }
        Ok(psi / l2 + 1.0)
    }

    fn domain(&self) -> (f64, f64) {
        self.law.interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub theta: f64,
    pub u1: f64,
    /// du₁/dθ
    pub du1: f64,
    /// The conserved L₀.
    pub u2: f64,
}

pub fn reduce_state(st: &PolarState, law: &MomentumLaw) -> Result<ReducedState> {
    if !(st.r > 0.0) {
        return Err(Error::Origin);
    }
    let l_law = law.l(st.theta)?;
    let l_state = st.angular_momentum();
    let relative = ((l_state - l_law) / l_law).abs();
    if !(relative < MOMENTUM_CONSISTENCY) {
        return Err(Error::MomentumInconsistent { relative });
    }
    Ok(ReducedState { theta: st.theta, u1: 1.0 / st.r, du1: -st.rdot / l_law, u2: law.l0_squared })
}

pub fn lift_state(rs: &ReducedState, law: &MomentumLaw, t: f64) -> Result<PolarState> {
    if !(rs.u1 > 0.0) {
        return Err(Error::Precondition(format!("u1 = {} must be positive", rs.u1)));
    }
    let l = law.l(rs.theta)?;
    Ok(PolarState {
        t,
        r: 1.0 / rs.u1,
        theta: rs.theta,
        rdot: -l * rs.du1,
        thetadot: l * rs.u1 * rs.u1,
    })
}

/// A solution `(u, u')` of `u'' + ω²u = 0`, with the untouched `u₂`.
#[derive(Debug, Clone)]
pub struct ReducedSolution {
    pub trajectory: Trajectory,
    pub u2: f64,
}

impl ReducedSolution {
    pub fn state_at(&self, theta: f64) -> Result<ReducedState> {
        let y = self.trajectory.eval(theta)?;
        Ok(ReducedState { theta, u1: y[0], du1: y[1], u2: self.u2 })
    }
}

/// Integrates `u'' + ω²(θ)u = 0` from `rs0` over `span`, which must contain `rs0.theta`.
/// Integrates `u'' + ω²(θ)u = 0` from `(θ₀, y0)` over `span`, which must contain `θ₀`.
pub fn integrate_oscillator<F: Frequency + ?Sized>(freq: &F, theta0: f64, y0: [f64; 2], span: (f64, f64), tol: f64) -> Result<Trajectory> {
    let rhs = |th: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        out[0] = y[1];
        out[1] = -freq.omega_squared(th)? * y[0];
        Ok(())
    };
    integrate_through(rhs, &y0, theta0, span, IntegratorOptions::with_tol(tol))
}

pub fn integrate_reduced<F: Frequency + ?Sized>(freq: &F, rs0: &ReducedState, span: (f64, f64), tol: f64) -> Result<ReducedSolution> {
    let (lo, hi) = freq.domain();
    if span.0.min(span.1) < lo || span.0.max(span.1) > hi {
        return Err(Error::Precondition(format!("span {span:?} outside working interval [{lo}, {hi}]")));
    }
    let trajectory = integrate_oscillator(freq, rs0.theta, [rs0.u1, rs0.du1], span, tol)?;
    Ok(ReducedSolution { trajectory, u2: rs0.u2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub tol: f64,
    pub theta0: f64,
    pub grid_points: usize,
    pub turning_guard: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            tol: DEFAULT_TOL,
            theta0: DEFAULT_THETA0,
            grid_points: AUDIT_GRID_POINTS,
            turning_guard: TURNING_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub cart: CartesianState,
    pub polar: PolarState,
    pub accel: (f64, f64),
}

/// Everything measured at one grid point of a pushforward trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionSample {
    pub t: f64,
    pub theta: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub l: f64,
    pub dl_dtheta: f64,
    pub omega_squared: f64,
    pub momentum_residual: f64,
    pub full_residual: f64,
    pub printed_residual: f64,
    pub dropped_term: f64,
}

/// A simulated Cartesian trajectory, its polar image on a θ-grid, and the
/// momentum law through its initial state.
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub system: ErmakovSystem,
    pub ic: CartesianState,
    pub trajectory: Trajectory,
    /// Time window on which θ is monotone and `|L|` stays above the turning guard.
    pub window: (f64, f64),
    pub grid: Vec<GridPoint>,
    pub law: MomentumLaw,
    pub profile: FrequencyProfile,
}

fn state_at(tr: &Trajectory, t: f64) -> Result<CartesianState> {
    Ok(CartesianState::from_slice(t, &tr.eval(t)?))
}

fn bisect(mut a: f64, mut b: f64, mut positive_at: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    let pa = positive_at(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if positive_at(m)? == pa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

impl Pushforward {
    pub fn build(system: &ErmakovSystem, ic: &CartesianState, tspan: (f64, f64), opts: &AuditOptions, exec: Exec) -> Result<Self> {
        system.require_static_frequency()?;
        ic.check_off_axes()?;
        if !(tspan.1 > tspan.0) || ic.t != tspan.0 {
            return Err(Error::Precondition(format!("time span {tspan:?} must start at the initial time and increase")));
        }
        let trajectory = integrate(system.first_order_rhs(), &ic.to_vec(), tspan, IntegratorOptions::with_tol(opts.tol))?;
        let quadrant = ic.quadrant();
        for (i, &t) in trajectory.times().iter().enumerate() {
            let st = CartesianState::from_slice(t, trajectory.state(i));
            if st.quadrant() != quadrant {
                return Err(Error::QuadrantExit { t });
            }
            check_pole_band(st.y.atan2(st.x))?;
        }

        let l_of = |t: f64| -> Result<f64> { Ok(state_at(&trajectory, t)?.angular_momentum()) };
        let l0 = ic.angular_momentum();
        if l0 == 0.0 {
            return Err(Error::Precondition("angular momentum vanishes at the initial state".into()));
        }
        let sign = l0.signum();
        let times = trajectory.times();
        let mut t_turn = tspan.1;
        for w in times.windows(2) {
            if l_of(w[1])? * sign <= 0.0 {
                t_turn = bisect(w[0], w[1], |t| Ok(l_of(t)? * sign > 0.0))?;
                break;
            }
        }
        let mut l_max = 0.0f64;
        let mut t_end = t_turn;
        let mut prev = tspan.0;
        for &t in times.iter().filter(|&&t| t <= t_turn).chain(std::iter::once(&t_turn)) {
            let l = l_of(t)?.abs();
            l_max = l_max.max(l);
            if l < opts.turning_guard * l_max {
                let threshold = opts.turning_guard * l_max;
                t_end = bisect(prev, t, |s| Ok(l_of(s)?.abs() >= threshold))?;
                break;
            }
            prev = t;
        }
        if !(t_end > tspan.0) {
            return Err(Error::Precondition("no usable monotone θ window".into()));
        }

        let theta_of = |t: f64| -> Result<f64> {
            let s = state_at(&trajectory, t)?;
            Ok(s.y.atan2(s.x))
        };
        let (th_a, th_b) = (theta_of(tspan.0)?, theta_of(t_end)?);
        let n = opts.grid_points.max(2);
        let increasing = th_b > th_a;
        let targets: Vec<f64> = (0..n).map(|k| th_a + (th_b - th_a) * k as f64 / (n - 1) as f64).collect();
        let grid = try_collect(exec.map_range(n, |k| -> Result<GridPoint> {
            let t = if k == 0 {
                tspan.0
            } else if k == n - 1 {
                t_end
            } else {
                let target = targets[k];
                bisect(tspan.0, t_end, |t| Ok((theta_of(t)? < target) == increasing))?
            };
            let cart = state_at(&trajectory, t)?;
            Ok(GridPoint { cart, polar: to_polar(&cart)?, accel: system.cartesian_rhs(&cart)? })
        }))?;

        let lo = th_a.min(th_b);
        let hi = th_a.max(th_b);
        let law = MomentumLaw::through_state(system, opts.theta0, (lo, hi), &to_polar(ic)?)?;
        let profile = FrequencyProfile::new(law.clone());
        Ok(Pushforward {
            system: system.clone(),
            ic: *ic,
            trajectory,
            window: (tspan.0, t_end),
            grid,
            law,
            profile,
        })
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.grid.iter().map(|g| g.polar.theta).collect()
    }

    pub fn grid_descriptor(&self) -> GridDescriptor {
        GridDescriptor::over(&self.thetas())
    }

    /// θ-range covered by the audit grid.
    pub fn theta_range(&self) -> (f64, f64) {
        let g = self.grid_descriptor();
        (g.theta_min, g.theta_max)
    }

    pub fn samples(&self, exec: Exec) -> Result<Vec<ReductionSample>> {
        try_collect(exec.map(&self.grid, |g| self.sample(g)))
    }

    fn sample(&self, g: &GridPoint) -> Result<ReductionSample> {
        let (c, p) = (&g.cart, &g.polar);
        let (ax, ay) = g.accel;
        let r = p.r;
        let l = c.angular_momentum();
        let ldot = c.x * ay - c.y * ax;
        let rddot = (c.vx * c.vx + c.vy * c.vy + c.x * ax + c.y * ay) / r - p.rdot * p.rdot / r;
        let u = 1.0 / r;
        let du = -p.rdot / l;
        let d2u = (-rddot + p.rdot * ldot / l) * r * r / (l * l);
        let dl_dtheta = ldot * r * r / l;
        let omega_squared = self.profile.omega_squared(p.theta)?;
        let dropped_term = dl_dtheta / l * du;
        let printed_residual = d2u + omega_squared * u;
        Ok(ReductionSample {
            t: c.t,
            theta: p.theta,
            u,
            du,
            d2u,
            l,
            dl_dtheta,
            omega_squared,
            momentum_residual: (l * l - self.law.l_squared(p.theta)?).abs(),
            full_residual: printed_residual + dropped_term,
            printed_residual,
            dropped_term,
        })
    }

    pub fn reduction_claims(&self, exec: Exec) -> Result<Vec<ClaimVerdict>> {
        let samples = self.samples(exec)?;
        let grid = Some(self.grid_descriptor());
        let col = |f: fn(&ReductionSample) -> f64| samples.iter().map(f).collect::<Vec<f64>>();

        let momentum = ClaimVerdict::new(
            "eq2.3",
            "r^4 thetadot^2 = L0 + mu(theta) along the motion",
            ClaimMode::Assert,
            Some(TOL_MOMENTUM_LAW),
        )
        .with_residuals(grid, &col(|s| s.momentum_residual))
        .with_details(json!({ "L0_squared": self.law.l0_squared(), "theta0": self.law.theta0() }));

        let full = ClaimVerdict::new(
            "reduced_full",
            "u'' + (L'/L) u' + omega^2(theta) u = 0 along the motion",
            ClaimMode::Assert,
            Some(TOL_REDUCED_FULL),
        )
        .with_residuals(grid, &col(|s| s.full_residual));

        let agreement: Vec<f64> = samples
            .iter()
            .map(|s| s.printed_residual.abs() - s.dropped_term.abs())
            .collect();
        let (dropped_max, _) = crate::verdict::residual_norms(&col(|s| s.dropped_term));
        let (agreement_max, _) = crate::verdict::residual_norms(&agreement);
        let printed = ClaimVerdict::new(
            "reduced_paper",
            "u'' + omega^2(theta) u = 0 along the motion (no L'/L term)",
            ClaimMode::Report,
            None,
        )
        .with_residuals(grid, &col(|s| s.printed_residual))
        .with_details(json!({
            "dropped_term_max": dropped_max,
            "residual_vs_dropped_term_max": agreement_max,
        }));
        Ok(vec![momentum, full, printed])
    }

    /// Printed polar components and printed `ω²` against the ones the motion obeys.
    pub fn printed_form_claims(&self, exec: Exec) -> Result<Vec<ClaimVerdict>> {
        let grid = Some(self.grid_descriptor());
        let rows = try_collect(exec.map(&self.grid, |g| -> Result<[f64; 3]> {
            let (fr, ft) = self.system.polar_rhs(&g.polar)?;
            let (pr, pt) = self.system.printed_polar_rhs(&g.polar)?;
            let th = g.polar.theta;
            let dw = self.profile.printed_omega_squared(th)? - self.profile.omega_squared(th)?;
            Ok([pr - fr, pt - ft, dw])
        }))?;
        let radial: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let transversal: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let both: Vec<f64> = rows.iter().map(|r| r[0].abs().max(r[1].abs())).collect();
        let omega: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let (rmax, _) = crate::verdict::residual_norms(&radial);
        let (tmax, _) = crate::verdict::residual_norms(&transversal);
        Ok(vec![
            ClaimVerdict::new(
                "polar_printed",
                "displayed polar force components equal the polar image of the Cartesian forces",
                ClaimMode::Report,
                None,
            )
            .with_residuals(grid, &both)
            .with_details(json!({ "radial_max": rmax, "transversal_max": tmax })),
            ClaimVerdict::new(
                "omega_printed",
                "displayed omega^2(theta) equals 1 + Psi(theta)/L^2",
                ClaimMode::Report,
                None,
            )
            .with_residuals(grid, &omega),
        ])
    }
}

/// Integrates the system, maps to polar, and audits the momentum law and both reduced forms.
pub fn audit_reduction(system: &ErmakovSystem, ic: &CartesianState, tspan: (f64, f64), opts: &AuditOptions, exec: Exec) -> Result<Vec<ClaimVerdict>> {
    Pushforward::build(system, ic, tspan, opts, exec)?.reduction_claims(exec)
}
