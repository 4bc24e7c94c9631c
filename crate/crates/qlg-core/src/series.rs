//! Uniform time grids, finite-difference stencils, and interval extraction
//! shared by the analysis modules.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Uniformly sampled time axis: t_k = t0 + k * dt for k in 0..n.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() || !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs finite t0 and dt > 0, got t0={t0}, dt={dt}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("time grid needs n > 0".into()));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid covering [0, t_max] in steps of dt, endpoint included when it
    /// lands on the grid.
    pub fn from_span(t_max: f64, dt: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max >= dt) {
            return Err(Error::InvalidParameter(format!(
                "span needs t_max >= dt, got t_max={t_max}, dt={dt}"
            )));
        }
        let n = (t_max / dt + 1.0 + 1e-9).floor() as usize;
        Self::new(0.0, dt, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.t(k))
    }
}

/// Second-order finite-difference derivative of a uniformly sampled complex
/// series: central stencil in the interior, one-sided three-point stencils at
/// both endpoints. Exact on polynomials of degree <= 2.
pub fn differentiate_uniform(values: &[C64], dt: f64) -> Result<Vec<C64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    let h = C64::new(2.0 * dt, 0.0);
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / h);
    for k in 1..n - 1 {
        out.push((values[k + 1] - values[k - 1]) / h);
    }
    out.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / h);
    Ok(out)
}

/// Real-valued variant of [`differentiate_uniform`].
pub fn differentiate_uniform_real(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    let complex: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    Ok(differentiate_uniform(&complex, dt)?
        .into_iter()
        .map(|z| z.re)
        .collect())
}

/// Maximal intervals on which `margin` is strictly positive, scanned on the
/// grid and with each boundary refined by bisection down to `refine_tol`
/// seconds. Samples where `margin` returns `None` (singular points) break
/// intervals. Returned intervals are disjoint and sorted.
pub fn positive_intervals(
    margin: impl Fn(f64) -> Option<f64>,
    grid: &TimeGrid,
    refine_tol: f64,
) -> Vec<(f64, f64)> {
    let samples: Vec<(f64, Option<f64>)> = grid.times().map(|t| (t, margin(t))).collect();
    let bisect = |mut lo: f64, mut hi: f64| -> f64 {
        // Invariant kept by the caller: margin(lo) and margin(hi) lie on
        // opposite sides of zero (None counts as non-positive).
        let sign_at = |t: f64| margin(t).map(|v| v > 0.0).unwrap_or(false);
        let lo_pos = sign_at(lo);
        while hi - lo > refine_tol {
            let mid = 0.5 * (lo + hi);
            if sign_at(mid) == lo_pos {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut intervals = Vec::new();
    let mut start: Option<f64> = None;
    for w in samples.windows(2) {
        let (t_a, m_a) = w[0];
        let (t_b, m_b) = w[1];
        let pos_a = m_a.map(|v| v > 0.0).unwrap_or(false);
        let pos_b = m_b.map(|v| v > 0.0).unwrap_or(false);
        if start.is_none() && pos_a {
            // Positive from the very first sample of a run.
            start = Some(t_a);
        }
        match (pos_a, pos_b) {
            (false, true) => start = Some(bisect(t_a, t_b)),
            (true, false) => {
                let end = bisect(t_a, t_b);
                if let Some(s) = start.take() {
                    intervals.push((s, end));
                }
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let (t_last, m_last) = *samples.last().unwrap();
        if m_last.map(|v| v > 0.0).unwrap_or(false) {
            intervals.push((s, t_last));
        }
    }
    intervals
}
