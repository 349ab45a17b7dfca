use crate::{Error, Result};

pub const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson estimate of `∫_a^b f` with absolute error target `tol`.
///
/// Returns an oriented integral, so `b < a` gives the negated value.
pub fn quadrature<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("quadrature tolerance must be positive".into()));
    }
    let (fa, fb) = (f(a)?, f(b)?);
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // the first levels always refine so periodic integrands cannot fool the coarse estimate
    let settled = depth >= 2
        && (delta.abs() <= 15.0 * tol || delta.abs() <= 64.0 * f64::EPSILON * (left + right).abs());
    if settled {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature { a, b, depth });
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
}

/// `∫_{x0}^{x} f` tabulated on a fixed node grid, with on-demand refinement
/// between nodes.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    origin: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    tol: f64,
}

impl CumulativeIntegral {
    /// Tabulates over `[lo, hi]` (which must contain `origin`) with `panels` panels.
    pub fn build<F>(f: &F, origin: f64, lo: f64, hi: f64, panels: usize, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if !(lo <= origin && origin <= hi) || panels == 0 {
            return Err(Error::Precondition(format!(
                "integration origin {origin} outside [{lo}, {hi}]"
            )));
        }
        let mut nodes: Vec<f64> = (0..=panels)
            .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
            .collect();
        nodes[panels] = hi;
        // splice the origin in as an exact node
        let pos = nodes.partition_point(|&x| x < origin);
        if nodes.get(pos) != Some(&origin) {
            nodes.insert(pos, origin);
        }
        let k0 = pos;
        let panel_tol = tol / (nodes.len() as f64);
        let mut values = vec![0.0; nodes.len()];
        for k in k0 + 1..nodes.len() {
            values[k] = values[k - 1] + quadrature(f, nodes[k - 1], nodes[k], panel_tol)?;
        }
        for k in (0..k0).rev() {
            values[k] = values[k + 1] - quadrature(f, nodes[k], nodes[k + 1], panel_tol)?;
        }
        Ok(CumulativeIntegral { origin, nodes, values, tol: panel_tol })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval<F>(&self, f: &F, x: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfRange(format!("{x} outside [{lo}, {hi}]")));
        }
        let k = match self.nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(k) => return Ok(self.values[k]),
            Err(k) => k,
        };
        // integrate from the nearer neighbouring node
        let (node, value) = if x - self.nodes[k - 1] <= self.nodes[k] - x {
            (self.nodes[k - 1], self.values[k - 1])
        } else {
            (self.nodes[k], self.values[k])
        };
        Ok(value + quadrature(f, node, x, self.tol)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_over_half_period() {
        let v = quadrature(|x| Ok(x.sin()), 0.0, PI, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial() {
        let v = quadrature(|x| Ok(x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn momentum_integrand_against_riemann_sum() {
        // csc²s·cot s − sec²s·tan s on [π/4, π/3]
        let f = |s: f64| (s.cos() / s.sin().powi(3)) - (s.sin() / s.cos().powi(3));
        let (a, b) = (PI / 4.0, PI / 3.0);
        let n = 1_000_000;
        let h = (b - a) / n as f64;
        let riemann: f64 = (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((riemann + 2.0 / 3.0).abs() < 1e-9, "{riemann}");
        let v = quadrature(|s| Ok(f(s)), a, b, 1e-10).unwrap();
        assert!((v + 2.0 / 3.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn reports_non_convergence() {
        let r = quadrature(|x: f64| Ok((1.0 / x).sin()), 1e-14, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::Quadrature { .. })), "{r:?}");
    }

    #[test]
    fn oriented_and_cumulative() {
        let v = quadrature(Ok, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
        let f = |x: f64| Ok(x.cos());
        let ci = CumulativeIntegral::build(&f, 0.3, -1.0, 2.0, 16, 1e-12).unwrap();
        assert_eq!(ci.eval(&f, 0.3).unwrap(), 0.0);
        for x in [-1.0f64, -0.4, 0.9, 1.77, 2.0] {
            let expected = x.sin() - 0.3f64.sin();
            assert!((ci.eval(&f, x).unwrap() - expected).abs() < 1e-12, "{x}");
        }
        assert!(ci.eval(&f, 2.5).is_err());
    }
}
