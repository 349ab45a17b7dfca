//! Initial-value integration with dense output, and one-dimensional quadrature.

mod dopri;
mod quadrature;
mod rk4;
mod trajectory;

pub use dopri::{integrate, IntegratorOptions, DEFAULT_MAX_STEPS, DEFAULT_TOL};
pub use quadrature::{quadrature, CumulativeIntegral, MAX_DEPTH};
pub use rk4::integrate_rk4;
pub use trajectory::{IntegratorMeta, Trajectory};

use crate::{Error, Result};

pub(crate) fn call_rhs<F>(rhs: &mut F, x: f64, y: &[f64], out: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    rhs(x, y, out).map_err(|e| match e {
        Error::RhsDomain { .. } => e,
        other => Error::RhsDomain { at: x, reason: other.to_string() },
    })?;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::RhsDomain { at: x, reason: "non-finite derivative".into() });
    }
    Ok(())
}

/// Integrates from `x0` to both ends of `span` (or to the far end when `x0`
/// is an endpoint) and returns one trajectory covering the whole span.
pub fn integrate_through<F>(mut rhs: F, y0: &[f64], x0: f64, span: (f64, f64), opts: IntegratorOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (a, b) = (span.0.min(span.1), span.0.max(span.1));
    if !(a <= x0 && x0 <= b) || a == b {
        return Err(Error::Precondition(format!("start {x0} outside span [{a}, {b}]")));
    }
    if x0 == a {
        integrate(rhs, y0, (a, b), opts)
    } else if x0 == b {
        integrate(rhs, y0, (b, a), opts)
    } else {
        let back = integrate(&mut rhs, y0, (x0, a), opts)?;
        let fwd = integrate(&mut rhs, y0, (x0, b), opts)?;
        Trajectory::join(back, fwd)
    }
}
