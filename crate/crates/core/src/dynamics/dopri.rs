//! Dormand–Prince 5(4) with step-size control and the 4th-order continuous extension.

use super::trajectory::{IntegratorMeta, Segment, Trajectory};
use super::call_rhs;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorOptions { rtol: tol, atol: tol, ..Default::default() }
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: DEFAULT_TOL,
            atol: DEFAULT_TOL,
            max_steps: DEFAULT_MAX_STEPS,
            initial_step: None,
        }
    }
}

fn rms(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

/// Integrates `y' = rhs(x, y)` from `span.0` to `span.1` (either direction).
pub fn integrate<F>(mut rhs: F, y0: &[f64], span: (f64, f64), opts: IntegratorOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (a, b) = span;
    let n = y0.len();
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if a == b || !a.is_finite() || !b.is_finite() {
        return Err(Error::Precondition(format!("degenerate span [{a}, {b}]")));
    }
    let dir = (b - a).signum();
    let scale = |y: &[f64], y1: &[f64], i: usize| opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());

    let mut meta = IntegratorMeta {
        method: "dopri5",
        order: 5,
        rtol: opts.rtol,
        atol: opts.atol,
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evaluations: 0,
    };

    let mut x = a;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    call_rhs(&mut rhs, x, &y, &mut k[0])?;
    meta.rhs_evaluations += 1;

    let mut h = match opts.initial_step {
        Some(h) => h.abs() * dir,
        None => initial_step(&mut rhs, x, &y, &k[0], dir, &opts, &mut meta)?,
    };

    let mut xs = vec![x];
    let mut states = y.clone();
    let mut segments = Vec::new();
    let mut ytmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut steps = 0usize;

    while (b - x) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { at: x, max_steps: opts.max_steps });
        }
        steps += 1;
        let h_min = 16.0 * f64::EPSILON * x.abs().max(1.0);
        if h.abs() < h_min {
            return Err(Error::StepUnderflow { at: x });
        }
        if (x + h - b) * dir > 0.0 {
            h = b - x;
        }

        let mut stage_error = None;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if let Err(e) = call_rhs(&mut rhs, x + C[s] * h, &ytmp, &mut tail[0]) {
                stage_error = Some(e);
                break;
            }
            meta.rhs_evaluations += 1;
        }
        if let Some(e) = stage_error {
            meta.rejected_steps += 1;
            h *= 0.25;
            if h.abs() < h_min {
                return Err(e);
            }
            continue;
        }
        // stage 7 was evaluated at y1 = ytmp (FSAL)
        y1.copy_from_slice(&ytmp);

        let err = rms(
            (0..n).map(|i| {
                let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum();
                h * e / scale(&y, &y1, i)
            }),
            n,
        );

        if !err.is_finite() || err > 1.0 {
            meta.rejected_steps += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            continue;
        }

        let mut cont = vec![0.0; 5 * n];
        for i in 0..n {
            let ydiff = y1[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            cont[i] = y[i];
            cont[n + i] = ydiff;
            cont[2 * n + i] = bspl;
            cont[3 * n + i] = ydiff - h * k[6][i] - bspl;
            cont[4 * n + i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
        }
        let x_new = if (x + h - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0) { b } else { x + h };
        segments.push(Segment::Dopri { x0: x, h, cont });
        x = x_new;
        y.copy_from_slice(&y1);
        let last = k[6].clone();
        k[0].copy_from_slice(&last);
        xs.push(x);
        states.extend_from_slice(&y);
        meta.accepted_steps += 1;

        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }

    Ok(Trajectory::from_parts(n, xs, states, segments, meta))
}

fn initial_step<F>(
    rhs: &mut F,
    x: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    opts: &IntegratorOptions,
    meta: &mut IntegratorMeta,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let sk: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let d0 = rms(y.iter().zip(&sk).map(|(v, s)| v / s), n);
    let d1 = rms(f0.iter().zip(&sk).map(|(v, s)| v / s), n);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = (0..n).map(|i| y[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    if call_rhs(rhs, x + dir * h0, &y1, &mut f1).is_err() {
        return Ok(dir * h0 * 1e-3);
    }
    meta.rhs_evaluations += 1;
    let d2 = rms((0..n).map(|i| (f1[i] - f0[i]) / sk[i]), n) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok(dir * (100.0 * h0).min(h1))
}
