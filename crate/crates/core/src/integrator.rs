//! Fixed-step integration of the augmented state `(z, w)` with `ẇ = ε`.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{self, ModelKind, ModelSpec, SolverState};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::noise::{self, NoiseModel};
use crate::problem::TimeVaryingSystem;

/// Any state entry beyond this magnitude ends the run as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            _ => Err(Error::InvalidParameter(format!("unknown integration method '{s}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step size in seconds.
    pub step: f64,
    /// Simulated span in seconds.
    pub horizon: f64,
    /// Keep every `record_every`-th step in the trace.
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            step: 1e-3,
            horizon: 10.0,
            record_every: 10,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be > 0, got {}", self.step)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.step > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "step {} exceeds horizon {}",
                self.step, self.horizon
            )));
        }
        if self.horizon / self.step > u32::MAX as f64 {
            return Err(Error::InvalidParameter("too many steps".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        (self.horizon / self.step).round().max(1.0) as u64
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    Diverged,
    SingularMatrix,
    PredefinedTimeExceeded,
    Overflow,
}

impl Termination {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::SingularMatrix { .. } => Termination::SingularMatrix,
            Error::PredefinedTimeExceeded { .. } => Termination::PredefinedTimeExceeded,
            Error::Overflow { .. } => Termination::Overflow,
            _ => Termination::Diverged,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Diverged => "diverged",
            Termination::SingularMatrix => "singular_matrix",
            Termination::PredefinedTimeExceeded => "predefined_time_exceeded",
            Termination::Overflow => "overflow",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recorded samples of one run. All per-sample lists have equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub model: ModelKind,
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    /// Accumulated residual integral `w` at each sample.
    pub integrals: Vec<Vector>,
    pub residual_norms: Vec<f64>,
    /// `‖z - z*(t)‖₂`, present when the system has a reference solution.
    pub solution_errors: Option<Vec<f64>>,
    /// `(ξ, κ)` for the adaptive model.
    pub coefficients: Option<Vec<(f64, f64)>>,
    pub terminated: Termination,
}

impl Trace {
    fn new(model: &ModelSpec, has_reference: bool) -> Self {
        Trace {
            model: model.kind,
            times: Vec::new(),
            states: Vec::new(),
            integrals: Vec::new(),
            residual_norms: Vec::new(),
            solution_errors: has_reference.then(Vec::new),
            coefficients: (model.kind == ModelKind::Aztnd).then(Vec::new),
            terminated: Termination::Completed,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn final_state(&self) -> Option<&Vector> {
        self.states.last()
    }

    fn push<S: TimeVaryingSystem + ?Sized>(&mut self, model: &ModelSpec, sys: &S, s: &SolverState) -> Result<()> {
        if self.times.last() == Some(&s.t) {
            return Ok(());
        }
        let eps = sys.residual(&s.z, s.t)?;
        let coeff = match self.coefficients {
            Some(_) => Some(dynamics::coefficients(&model.adaptive, &eps, &s.w)?),
            None => None,
        };
        self.times.push(s.t);
        self.states.push(s.z.clone());
        self.integrals.push(s.w.clone());
        self.residual_norms.push(eps.norm2());
        if let Some(errs) = self.solution_errors.as_mut() {
            let e = sys.reference(s.t).map_or(f64::NAN, |r| (&s.z - &r).norm2());
            errs.push(e);
        }
        if let (Some(cs), Some(c)) = (self.coefficients.as_mut(), coeff) {
            cs.push(c);
        }
        Ok(())
    }
}

fn augmented_rate<S: TimeVaryingSystem + ?Sized>(
    model: &ModelSpec,
    sys: &S,
    s: &SolverState,
    noise: &Vector,
) -> Result<(Vector, Vector)> {
    let zdot = dynamics::model_derivative(model, sys, s, noise)?;
    let wdot = sys.residual(&s.z, s.t)?;
    Ok((zdot, wdot))
}

fn shifted(s: &SolverState, dt: f64, (dz, dw): &(Vector, Vector)) -> SolverState {
    SolverState {
        z: s.z.axpy(dt, dz),
        w: s.w.axpy(dt, dw),
        t: s.t + dt,
    }
}

/// One step of size `h`. The noise value is held for all stages.
pub fn step<S: TimeVaryingSystem + ?Sized>(
    method: Method,
    model: &ModelSpec,
    sys: &S,
    s: &SolverState,
    h: f64,
    noise: &Vector,
) -> Result<SolverState> {
    match method {
        Method::Euler => Ok(shifted(s, h, &augmented_rate(model, sys, s, noise)?)),
        Method::Rk4 => {
            let k1 = augmented_rate(model, sys, s, noise)?;
            let k2 = augmented_rate(model, sys, &shifted(s, 0.5 * h, &k1), noise)?;
            let k3 = augmented_rate(model, sys, &shifted(s, 0.5 * h, &k2), noise)?;
            let k4 = augmented_rate(model, sys, &shifted(s, h, &k3), noise)?;
            let combine = |a: &Vector, b: &Vector, c: &Vector, d: &Vector| {
                Vector::new(
                    (0..a.len())
                        .map(|i| (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]) / 6.0)
                        .collect(),
                )
            };
            let dz = combine(&k1.0, &k2.0, &k3.0, &k4.0);
            let dw = combine(&k1.1, &k2.1, &k3.1, &k4.1);
            Ok(shifted(s, h, &(dz, dw)))
        }
    }
}

fn diverged(s: &SolverState) -> bool {
    !s.is_finite() || s.z.norm_inf() > DIVERGENCE_LIMIT || s.w.norm_inf() > DIVERGENCE_LIMIT
}

/// Integrates `model` on `sys` from `init` at `t = 0` with an empty integral.
///
/// Precondition violations (bad config, wrong init length) are returned as
/// errors; anything that goes wrong during the run ends the trace early and
/// is reported in [`Trace::terminated`].
pub fn simulate<S: TimeVaryingSystem + ?Sized>(
    model: &ModelSpec,
    sys: &S,
    noise_model: &NoiseModel,
    init: &Vector,
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    cfg.validate()?;
    model.validate()?;
    noise_model.validate()?;
    let equations = sys.equations();
    noise_model.check_dim(equations)?;
    if init.len() != sys.unknowns() {
        return Err(Error::DimensionMismatch {
            expected: sys.unknowns(),
            actual: init.len(),
        });
    }

    let h = cfg.step;
    let steps = cfg.steps();
    let every = cfg.record_every as u64;
    let ptc_stop = (model.kind == ModelKind::Ptcznn).then_some(model.t_c - 10.0 * h);

    let mut trace = Trace::new(model, sys.reference(0.0).is_some());
    let mut state = SolverState::initial(init.clone(), equations);

    for k in 0..=steps {
        state.t = k as f64 * h;
        if k % every == 0 || k == steps {
            if let Err(e) = trace.push(model, sys, &state) {
                trace.terminated = Termination::from_error(&e);
                break;
            }
        }
        if k == steps {
            break;
        }
        if let Some(stop) = ptc_stop {
            if state.t >= stop - 1e-9 * h {
                trace.terminated = Termination::PredefinedTimeExceeded;
                let _ = trace.push(model, sys, &state);
                break;
            }
        }
        let disturbance = noise::sample(noise_model, equations, state.t, k);
        match step(cfg.method, model, sys, &state, h, &disturbance) {
            Ok(next) if diverged(&next) => {
                trace.terminated = Termination::Diverged;
                let _ = trace.push(model, sys, &state);
                break;
            }
            Ok(next) => state = next,
            Err(e) => {
                trace.terminated = Termination::from_error(&e);
                let _ = trace.push(model, sys, &state);
                break;
            }
        }
    }
    Ok(trace)
}

/// Coarse step used by [`richardson_order_check`].
pub const RICHARDSON_STEP: f64 = 0.01;
/// Span integrated by [`richardson_order_check`].
pub const RICHARDSON_HORIZON: f64 = 1.0;

fn final_augmented<S: TimeVaryingSystem + ?Sized>(
    model: &ModelSpec,
    sys: &S,
    init: &Vector,
    method: Method,
    h: f64,
) -> Option<Vector> {
    let cfg = IntegratorConfig {
        method,
        step: h,
        horizon: RICHARDSON_HORIZON,
        record_every: usize::MAX,
    };
    let tr = simulate(model, sys, &NoiseModel::None, init, &cfg).ok()?;
    if tr.terminated != Termination::Completed {
        return None;
    }
    let mut v = tr.states.last()?.clone().into_inner();
    v.extend_from_slice(tr.integrals.last()?.as_slice());
    Some(Vector::new(v))
}

/// Empirical convergence order of `method`: runs at `h` and `h/2`, measures
/// both final states against an `h/8` reference and returns
/// `log₂(err(h) / err(h/2))`.
///
/// Returns `None` when a run fails or the coarse error already sits at the
/// rounding floor (e.g. starting on an exact stationary solution).
pub fn richardson_order_check<S: TimeVaryingSystem + ?Sized>(
    model: &ModelSpec,
    sys: &S,
    init: &Vector,
    method: Method,
) -> Option<f64> {
    let h = RICHARDSON_STEP;
    let coarse = final_augmented(model, sys, init, method, h)?;
    let fine = final_augmented(model, sys, init, method, h / 2.0)?;
    let reference = final_augmented(model, sys, init, method, h / 8.0)?;
    let e_coarse = (&coarse - &reference).norm2();
    let e_fine = (&fine - &reference).norm2();
    let floor = 1e-13 * reference.norm2().max(1.0);
    if e_coarse <= floor || e_fine <= floor {
        return None;
    }
    Some((e_coarse / e_fine).log2())
}
