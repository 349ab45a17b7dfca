//! Point symmetries of the reduced oscillator, their back-transformed
//! counterparts in `(t, r)`, and numerical checks of both.

mod closure;
mod flow;
mod generators;
mod substitution;

pub use closure::{closure_check, sample_points, Commutator, TOL_CLOSURE};
pub use flow::{flow_claim, flow_symmetry_test, FlowOutcome, FlowRun, DEFAULT_EPSILONS, EXACT_RESIDUAL, MIN_ORDER};
pub use generators::{back_generators, point_generators, BackGenerator, Chart, Locality, OriginalPoint, PointGenerator};
pub use substitution::{substitution_audit, Convention, SubstitutionRow};

use crate::Result;

const FD_STEP: f64 = 1e-5;

/// A vector field `ξ(θ,u)∂θ + η(θ,u)∂u`.
pub trait ReducedField: Send + Sync {
    fn name(&self) -> String;

    /// `[ξ, η]`
    fn eval(&self, theta: f64, u: f64) -> Result<[f64; 2]>;

    /// `[[ξ_θ, ξ_u], [η_θ, η_u]]`, by central differences unless overridden.
    fn jacobian(&self, theta: f64, u: f64) -> Result<[[f64; 2]; 2]> {
        let ht = FD_STEP * (1.0 + theta.abs());
        let hu = FD_STEP * (1.0 + u.abs());
        let (tp, tm) = (self.eval(theta + ht, u)?, self.eval(theta - ht, u)?);
        let (up, um) = (self.eval(theta, u + hu)?, self.eval(theta, u - hu)?);
        let mut j = [[0.0; 2]; 2];
        for c in 0..2 {
            j[c][0] = (tp[c] - tm[c]) / (2.0 * ht);
            j[c][1] = (up[c] - um[c]) / (2.0 * hu);
        }
        Ok(j)
    }
}

/// `[X, Y] = X(Y^c) − Y(X^c)` per component at `(θ, u)`.
pub fn commutator(x: &dyn ReducedField, y: &dyn ReducedField, theta: f64, u: f64) -> Result<[f64; 2]> {
    let (xv, yv) = (x.eval(theta, u)?, y.eval(theta, u)?);
    let (xj, yj) = (x.jacobian(theta, u)?, y.jacobian(theta, u)?);
    let mut out = [0.0; 2];
    for c in 0..2 {
        out[c] = xv[0] * yj[c][0] + xv[1] * yj[c][1] - (yv[0] * xj[c][0] + yv[1] * xj[c][1]);
    }
    Ok(out)
}
