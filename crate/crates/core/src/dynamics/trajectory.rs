use std::io::Write;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorMeta {
    pub method: &'static str,
    pub order: u32,
    pub rtol: f64,
    pub atol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Segment {
    /// Dormand–Prince continuous extension: five coefficient vectors.
    Dopri { x0: f64, h: f64, cont: Vec<f64> },
    /// Cubic Hermite through both end values and slopes.
    Hermite { x0: f64, h: f64, y0: Vec<f64>, y1: Vec<f64>, f0: Vec<f64>, f1: Vec<f64> },
}

impl Segment {
    fn eval_into(&self, x: f64, out: &mut [f64]) {
        match self {
            Segment::Dopri { x0, h, cont } => {
                let n = out.len();
                let s = (x - x0) / h;
                let s1 = 1.0 - s;
                for i in 0..n {
                    let c = |k: usize| cont[k * n + i];
                    out[i] = c(0) + s * (c(1) + s1 * (c(2) + s * (c(3) + s1 * c(4))));
                }
            }
            Segment::Hermite { x0, h, y0, y1, f0, f1 } => {
                let s = (x - x0) / h;
                let (s2, s3) = (s * s, s * s * s);
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                for i in 0..out.len() {
                    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
                }
            }
        }
    }
}

/// Samples of an initial-value solution with per-interval interpolants.
///
/// Samples are stored in strictly increasing order of the independent
/// variable regardless of the integration direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    xs: Vec<f64>,
    states: Vec<f64>,
    segments: Vec<Segment>,
    pub meta: IntegratorMeta,
}

impl Trajectory {
    pub(crate) fn from_parts(
        dim: usize,
        mut xs: Vec<f64>,
        states: Vec<f64>,
        mut segments: Vec<Segment>,
        meta: IntegratorMeta,
    ) -> Self {
        let mut states = states;
        if xs.len() > 1 && xs[1] < xs[0] {
            xs.reverse();
            segments.reverse();
            let mut rev = Vec::with_capacity(states.len());
            for chunk in states.chunks(dim).rev() {
                rev.extend_from_slice(chunk);
            }
            states = rev;
        }
        Trajectory { dim, xs, states, segments, meta }
    }

    /// Joins a solution integrated backward from a point with one integrated
    /// forward from the same point.
    pub fn join(backward: Trajectory, forward: Trajectory) -> Result<Trajectory> {
        if backward.dim != forward.dim || backward.end() != forward.start() {
            return Err(Error::Precondition("trajectories do not meet at a common point".into()));
        }
        let mut xs = backward.xs;
        let mut states = backward.states;
        let mut segments = backward.segments;
        xs.extend_from_slice(&forward.xs[1..]);
        states.extend_from_slice(&forward.states[forward.dim..]);
        segments.extend(forward.segments);
        let a = backward.meta;
        let b = forward.meta;
        let meta = IntegratorMeta {
            accepted_steps: a.accepted_steps + b.accepted_steps,
            rejected_steps: a.rejected_steps + b.rejected_steps,
            rhs_evaluations: a.rhs_evaluations + b.rhs_evaluations,
            ..a
        };
        Ok(Trajectory { dim: forward.dim, xs, states, segments, meta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.xs
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    pub fn end(&self) -> f64 {
        *self.xs.last().expect("non-empty trajectory")
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start() && x <= self.end()
    }

    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::OutOfRange(format!(
                "{x} outside trajectory span [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => out.copy_from_slice(self.state(i)),
            Err(i) => self.segments[i - 1].eval_into(x, out),
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes a CSV with the independent variable in column 1 and floats at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, headers: &[&str]) -> std::io::Result<()> {
        writeln!(w, "{}", headers.join(","))?;
        for (i, x) in self.xs.iter().enumerate() {
            write!(w, "{x:.16e}")?;
            for v in self.state(i) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
