//! Trace analytics: convergence time, steady-state statistics and the
//! negligible / bounded / divergent classification.

use std::fmt;

use crate::dynamics::{self, AdaptiveCoefficientSpec};
use crate::error::{Error, Result};
use crate::integrator::{Termination, Trace};
use crate::problem::TimeVaryingSystem;

pub const DEFAULT_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;
/// Steady-state maxima below this are classified negligible.
pub const NEGLIGIBLE_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Negligible,
    Bounded,
    Divergent,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Negligible => "negligible",
            Classification::Bounded => "bounded",
            Classification::Divergent => "divergent",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    /// First recorded time after which the series stays below the threshold.
    pub convergence_time: Option<f64>,
    pub steady_state_max: f64,
    pub steady_state_mean: f64,
    pub classification: Classification,
    pub terminated: Termination,
}

/// Summarizes the residual norms of a trace.
pub fn summarize(tr: &Trace, threshold: f64, tail_fraction: f64) -> Result<RunSummary> {
    let mut s = summarize_series(&tr.times, &tr.residual_norms, threshold, tail_fraction)?;
    if tr.terminated == Termination::Diverged {
        s.classification = Classification::Divergent;
    }
    s.terminated = tr.terminated;
    Ok(s)
}

/// Summarizes an arbitrary error series (e.g. position errors of a tracker).
pub fn summarize_series(times: &[f64], values: &[f64], threshold: f64, tail_fraction: f64) -> Result<RunSummary> {
    if times.is_empty() || values.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            actual: values.len(),
        });
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction must lie in (0, 1), got {tail_fraction}"
        )));
    }

    let convergence_time = match values.iter().rposition(|&v| !(v < threshold)) {
        None => Some(times[0]),
        Some(last_above) if last_above + 1 < values.len() => Some(times[last_above + 1]),
        Some(_) => None,
    };

    let tail = tail_window(times, values, tail_fraction);
    let steady_state_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let steady_state_mean = tail.iter().sum::<f64>() / tail.len() as f64;

    let classification = if tail.iter().any(|v| !v.is_finite()) || is_growing(tail) {
        Classification::Divergent
    } else if steady_state_max < NEGLIGIBLE_CUTOFF {
        Classification::Negligible
    } else {
        Classification::Bounded
    };

    Ok(RunSummary {
        convergence_time,
        steady_state_max,
        steady_state_mean,
        classification,
        terminated: Termination::Completed,
    })
}

/// Samples in the final `fraction` of the recorded span (never empty).
pub fn tail_window<'a>(times: &[f64], values: &'a [f64], fraction: f64) -> &'a [f64] {
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let start_time = t1 - fraction * (t1 - t0);
    let start = times.iter().position(|&t| t >= start_time).unwrap_or(times.len() - 1);
    &values[start..]
}

/// Descent statistics of the per-component Lyapunov function along a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovReport {
    /// Recorded steps checked.
    pub steps: usize,
    /// Fraction of (step, component) pairs with `-ξ εᵢ² <= 0`.
    pub analytic_fraction: f64,
    /// Worst component's fraction of steps where `yᵢ` does not increase,
    /// with `κ` frozen at the value of the step start.
    pub discrete_fraction: f64,
}

/// Checks Lyapunov descent along a recorded adaptive-model trace.
pub fn lyapunov_descent<S: TimeVaryingSystem + ?Sized>(
    tr: &Trace,
    sys: &S,
    spec: &AdaptiveCoefficientSpec,
) -> Result<LyapunovReport> {
    if tr.len() < 2 {
        return Err(Error::EmptyTrace);
    }
    let eps = tr
        .states
        .iter()
        .zip(&tr.times)
        .map(|(z, &t)| sys.residual(z, t))
        .collect::<Result<Vec<_>>>()?;
    let n = eps[0].len();
    let steps = tr.len() - 1;
    let mut analytic = 0usize;
    let mut descending = vec![0usize; n];
    for k in 0..steps {
        let (xi, kappa) = dynamics::coefficients(spec, &eps[k], &tr.integrals[k])?;
        for i in 0..n {
            if dynamics::lyapunov_rate(eps[k][i], xi) <= 0.0 {
                analytic += 1;
            }
            let y0 = dynamics::lyapunov_value(eps[k][i], tr.integrals[k][i], kappa);
            let y1 = dynamics::lyapunov_value(eps[k + 1][i], tr.integrals[k + 1][i], kappa);
            if y1 <= y0 {
                descending[i] += 1;
            }
        }
    }
    let worst = descending.iter().copied().min().unwrap_or(steps);
    Ok(LyapunovReport {
        steps,
        analytic_fraction: analytic as f64 / (steps * n) as f64,
        discrete_fraction: worst as f64 / steps as f64,
    })
}

/// Largest `|‖ε(t)‖₂ - ‖A(t)(z - z*(t))‖₂|` over the recorded steps.
pub fn oracle_gap<S: TimeVaryingSystem + ?Sized>(tr: &Trace, sys: &S) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (z, &t) in tr.states.iter().zip(&tr.times) {
        let Some(star) = sys.reference(t) else {
            return Err(Error::InvalidParameter("system has no reference solution".into()));
        };
        let via_reference = sys.matrix(t).mat_vec(&(z - &star))?.norm2();
        worst = worst.max((sys.residual(z, t)?.norm2() - via_reference).abs());
    }
    Ok(worst)
}

/// Strictly increasing over the window and ending above ten times its start.
fn is_growing(tail: &[f64]) -> bool {
    tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]) && tail[tail.len() - 1] > 10.0 * tail[0]
}
