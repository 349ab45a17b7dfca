use super::call_rhs;
use super::trajectory::{IntegratorMeta, Segment, Trajectory};
use crate::{Error, Result};

/// Classical fixed-step RK4 with cubic-Hermite dense output.
pub fn integrate_rk4<F>(mut rhs: F, y0: &[f64], span: (f64, f64), steps: usize) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (a, b) = span;
    if steps == 0 || a == b {
        return Err(Error::Precondition("RK4 needs a non-empty span and at least one step".into()));
    }
    let n = y0.len();
    let h = (b - a) / steps as f64;
    let mut y = y0.to_vec();
    let mut f0 = vec![0.0; n];
    call_rhs(&mut rhs, a, &y, &mut f0)?;
    let (mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut xs = vec![a];
    let mut states = y.clone();
    let mut segments = Vec::with_capacity(steps);
    let mut evals = 1;
    for step in 0..steps {
        let x = a + step as f64 * h;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * f0[i];
        }
        call_rhs(&mut rhs, x + 0.5 * h, &tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        call_rhs(&mut rhs, x + 0.5 * h, &tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        call_rhs(&mut rhs, x + h, &tmp, &mut k4)?;
        let y1: Vec<f64> = (0..n)
            .map(|i| y[i] + h / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let x1 = if step + 1 == steps { b } else { a + (step + 1) as f64 * h };
        let mut f1 = vec![0.0; n];
        call_rhs(&mut rhs, x1, &y1, &mut f1)?;
        evals += 4;
        segments.push(Segment::Hermite { x0: x, h, y0: y.clone(), y1: y1.clone(), f0: f0.clone(), f1: f1.clone() });
        xs.push(x1);
        states.extend_from_slice(&y1);
        y = y1;
        f0 = f1;
    }
    let meta = IntegratorMeta {
        method: "rk4",
        order: 4,
        rtol: 0.0,
        atol: 0.0,
        accepted_steps: steps,
        rejected_steps: 0,
        rhs_evaluations: evals,
    };
    Ok(Trajectory::from_parts(n, xs, states, segments, meta))
}
