//! Right-hand sides of the solver dynamics.
//!
//! Every model except the gradient network is written in mass-matrix form
//! `A(t) ẋ = -Ȧ(t)x - ċ(t) - feedback + noise`, where the feedback term is
//! what distinguishes the models:
//!
//! | model  | feedback                                  |
//! |--------|-------------------------------------------|
//! | AZTND  | `ξ(ε)·ε + κ(w)·w`, `w = ∫₀ᵗ ε`             |
//! | OZNN   | `γ·ε`                                     |
//! | PTCZNN | `γ (eᵗ-1)/((t_c-t)eᵗ) · ε`                |
//! | NCZNN  | `γ·R(ε)` with `R` an elementwise clamp     |
//!
//! The gradient network is explicit: `ẋ = -γ Aᵀ ε + noise`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::problem::TimeVaryingSystem;

/// Largest value the exponential feedback coefficient may take before the
/// run is declared wound up.
pub const FEEDBACK_LIMIT: f64 = 1e12;

/// Ceiling on the predefined-time gain near `t_c`.
pub const PTC_GAIN_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedbackForm {
    /// `‖w‖₂^exponent + c`
    Power { exponent: f64 },
    /// `base^‖w‖₂ + c`
    Exponential { base: f64 },
}

/// Parameters of the adaptive scale `ξ(ε) = ‖ε‖₂^η + a` and the adaptive
/// feedback coefficient `κ(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveCoefficientSpec {
    pub scale_exponent: f64,
    pub scale_offset: f64,
    pub feedback_form: FeedbackForm,
    pub feedback_offset: f64,
}

impl Default for AdaptiveCoefficientSpec {
    fn default() -> Self {
        AdaptiveCoefficientSpec {
            scale_exponent: 3.0,
            scale_offset: 5.0,
            feedback_form: FeedbackForm::Exponential { base: 5.0 },
            feedback_offset: 5.0,
        }
    }
}

impl AdaptiveCoefficientSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.scale_exponent > 0.0) {
            return bad(format!("scale exponent must be > 0, got {}", self.scale_exponent));
        }
        if !(self.scale_offset > 1.0) {
            return bad(format!("scale offset must be > 1, got {}", self.scale_offset));
        }
        if !(self.feedback_offset > 0.0) {
            return bad(format!("feedback offset must be > 0, got {}", self.feedback_offset));
        }
        match self.feedback_form {
            FeedbackForm::Power { exponent } if !(exponent > 0.0) => {
                bad(format!("feedback exponent must be > 0, got {exponent}"))
            }
            FeedbackForm::Exponential { base } if !(base > 1.0) => {
                bad(format!("feedback base must be > 1, got {base}"))
            }
            _ => Ok(()),
        }
    }
}

/// `‖ε‖₂^η + a`
pub fn adaptive_scale(eps: &Vector, spec: &AdaptiveCoefficientSpec) -> f64 {
    eps.norm2().powf(spec.scale_exponent) + spec.scale_offset
}

/// Feedback gain on the accumulated residual `w`.
pub fn adaptive_feedback(w: &Vector, spec: &AdaptiveCoefficientSpec) -> Result<f64> {
    let norm = w.norm2();
    match spec.feedback_form {
        FeedbackForm::Power { exponent } => Ok(norm.powf(exponent) + spec.feedback_offset),
        FeedbackForm::Exponential { base } => {
            let value = base.powf(norm) + spec.feedback_offset;
            if !(value <= FEEDBACK_LIMIT) {
                return Err(Error::Overflow {
                    value,
                    limit: FEEDBACK_LIMIT,
                });
            }
            Ok(value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Aztnd,
    Oznn,
    Gnn,
    Ptcznn,
    Ncznn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Aztnd,
        ModelKind::Oznn,
        ModelKind::Gnn,
        ModelKind::Ptcznn,
        ModelKind::Ncznn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Aztnd => "aztnd",
            ModelKind::Oznn => "oznn",
            ModelKind::Gnn => "gnn",
            ModelKind::Ptcznn => "ptcznn",
            ModelKind::Ncznn => "ncznn",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model '{s}'")))
    }
}

/// Which dynamics to run, with the parameters of every model. Fields that do
/// not apply to `kind` are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub gamma: f64,
    pub adaptive: AdaptiveCoefficientSpec,
    pub t_c: f64,
    pub saturation_bound: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            gamma: 5.0,
            adaptive: AdaptiveCoefficientSpec::default(),
            t_c: 10.0,
            saturation_bound: 10.0,
        }
    }

    pub fn aztnd(adaptive: AdaptiveCoefficientSpec) -> Self {
        ModelSpec {
            adaptive,
            ..Self::new(ModelKind::Aztnd)
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::Aztnd => self.adaptive.validate(),
            _ if !(self.gamma > 0.0) => Err(Error::InvalidParameter(format!(
                "gamma must be > 0, got {}",
                self.gamma
            ))),
            ModelKind::Ptcznn if !(self.t_c > 0.0) => {
                Err(Error::InvalidParameter(format!("t_c must be > 0, got {}", self.t_c)))
            }
            ModelKind::Ncznn if !(self.saturation_bound > 0.0) => Err(Error::InvalidParameter(format!(
                "saturation bound must be > 0, got {}",
                self.saturation_bound
            ))),
            _ => Ok(()),
        }
    }
}

/// Augmented integration state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Current estimate.
    pub z: Vector,
    /// `∫₀ᵗ ε(δ) dδ`
    pub w: Vector,
    pub t: f64,
}

impl SolverState {
    /// State at `t = 0` with an empty integral.
    pub fn initial(z: Vector, equations: usize) -> Self {
        SolverState {
            z,
            w: Vector::zeros(equations),
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite() && self.t.is_finite()
    }
}

/// Elementwise clamp to `[-bound, bound]`.
pub fn ncznn_activation(x: &Vector, bound: f64) -> Vector {
    x.map(|v| v.clamp(-bound, bound))
}

/// `γ (eᵗ - 1) / ((t_c - t) eᵗ)`, capped at [`PTC_GAIN_CAP`].
pub fn ptcznn_gain(gamma: f64, t: f64, t_c: f64) -> Result<f64> {
    if t >= t_c {
        return Err(Error::PredefinedTimeExceeded { t, t_c });
    }
    // (eᵗ-1)/eᵗ = 1 - e⁻ᵗ, which stays finite for large t
    let gain = gamma * (-(-t).exp_m1()) / (t_c - t);
    Ok(gain.min(PTC_GAIN_CAP))
}

/// `εᵢ² + κ wᵢ² / 2`
pub fn lyapunov_value(eps_i: f64, w_i: f64, kappa: f64) -> f64 {
    eps_i * eps_i + 0.5 * kappa * w_i * w_i
}

/// Analytic rate of the per-component Lyapunov function with `κ` frozen:
/// `-ξ(ε) εᵢ²`.
pub fn lyapunov_rate(eps_i: f64, xi: f64) -> f64 {
    -xi * eps_i * eps_i
}

/// `(ξ, κ)` at the given residual and integral.
pub fn coefficients(spec: &AdaptiveCoefficientSpec, eps: &Vector, w: &Vector) -> Result<(f64, f64)> {
    Ok((adaptive_scale(eps, spec), adaptive_feedback(w, spec)?))
}

/// Time derivative of the estimate for the model in `spec`.
pub fn model_derivative<S: TimeVaryingSystem + ?Sized>(
    spec: &ModelSpec,
    sys: &S,
    s: &SolverState,
    noise: &Vector,
) -> Result<Vector> {
    let t = s.t;
    let a = sys.matrix(t);
    let eps = &a.mat_vec(&s.z)? + &sys.offset(t);
    if noise.len() != eps.len() {
        return Err(Error::DimensionMismatch {
            expected: eps.len(),
            actual: noise.len(),
        });
    }

    let feedback = match spec.kind {
        ModelKind::Gnn => {
            if sys.unknowns() != sys.equations() {
                return Err(Error::DimensionMismatch {
                    expected: sys.unknowns(),
                    actual: sys.equations(),
                });
            }
            let descent = a.transpose().mat_vec(&eps)?;
            return Ok(noise.axpy(-spec.gamma, &descent));
        }
        ModelKind::Aztnd => {
            if s.w.len() != eps.len() {
                return Err(Error::DimensionMismatch {
                    expected: eps.len(),
                    actual: s.w.len(),
                });
            }
            let (xi, kappa) = coefficients(&spec.adaptive, &eps, &s.w)?;
            eps.scale(xi).axpy(kappa, &s.w)
        }
        ModelKind::Oznn => eps.scale(spec.gamma),
        ModelKind::Ptcznn => eps.scale(ptcznn_gain(spec.gamma, t, spec.t_c)?),
        ModelKind::Ncznn => ncznn_activation(&eps, spec.saturation_bound).scale(spec.gamma),
    };

    // -Ȧx - ċ - feedback + noise
    let drift = &sys.matrix_rate(t).mat_vec(&s.z)? + &sys.offset_rate(t);
    let rhs = &(noise - &drift) - &feedback;
    if a.is_square() {
        linalg::solve(&a, &rhs)
    } else {
        linalg::least_squares_solve(&a, &rhs)
    }
}
