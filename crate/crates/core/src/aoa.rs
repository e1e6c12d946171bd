//! Angle-of-arrival target tracking.
//!
//! Each station `i` at `(xᵢ, yᵢ)` observes the bearing to the target
//! `u(t) = (x, y)` through `tan θᵢ = (y - yᵢ)/(x - xᵢ)`. Rearranged, every
//! bearing is one linear equation in the target position,
//!
//! ```text
//! -tan θᵢ · x + y = yᵢ - xᵢ tan θᵢ
//! ```
//!
//! so stacking them gives `F(t) g(t) = h(t)`. The scenario exposes the
//! residual `ε = F g - h` as a [`TimeVaryingSystem`] and the regular solver
//! dynamics track the target by zeroing it.

use crate::dynamics::{ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::integrator::{self, IntegratorConfig, Trace};
use crate::linalg::{self, Matrix, Vector};
use crate::noise::NoiseModel;
use crate::problem::TimeVaryingSystem;

/// Minimum horizontal clearance between the target and any station.
pub const DEFAULT_MARGIN: f64 = 0.2;

/// Samples per unit time used when validating geometry over a horizon.
const GEOMETRY_SAMPLES_PER_SECOND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub x: f64,
    pub y: f64,
}

impl Station {
    pub fn new(x: f64, y: f64) -> Self {
        Station { x, y }
    }
}

/// Ground-truth target motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trajectory {
    /// `center + radius·(cos ωt, sin ωt)`
    Circle {
        center: (f64, f64),
        radius: f64,
        frequency: f64,
    },
    /// `center + (aₓ sin ωₓt, a_y sin ω_y t)`
    Lissajous {
        center: (f64, f64),
        amplitude: (f64, f64),
        frequency: (f64, f64),
    },
}

impl Default for Trajectory {
    fn default() -> Self {
        Trajectory::Circle {
            center: (0.0, 2.0),
            radius: 2.0,
            frequency: 0.5,
        }
    }
}

impl Trajectory {
    pub fn pos_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Trajectory::Circle {
                center,
                radius,
                frequency,
            } => {
                let (s, c) = (frequency * t).sin_cos();
                (center.0 + radius * c, center.1 + radius * s)
            }
            Trajectory::Lissajous {
                center,
                amplitude,
                frequency,
            } => (
                center.0 + amplitude.0 * (frequency.0 * t).sin(),
                center.1 + amplitude.1 * (frequency.1 * t).sin(),
            ),
        }
    }

    pub fn vel_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Trajectory::Circle { radius, frequency, .. } => {
                let (s, c) = (frequency * t).sin_cos();
                (-radius * frequency * s, radius * frequency * c)
            }
            Trajectory::Lissajous {
                amplitude, frequency, ..
            } => (
                amplitude.0 * frequency.0 * (frequency.0 * t).cos(),
                amplitude.1 * frequency.1 * (frequency.1 * t).cos(),
            ),
        }
    }

    pub fn pos_vector(&self, t: f64) -> Vector {
        let (x, y) = self.pos_at(t);
        Vector::from([x, y])
    }
}

/// `(u.y - s.y) / (u.x - s.x)`, refusing targets closer than `margin` in x.
pub fn bearing_tangent(s: &Station, u: (f64, f64), margin: f64) -> Result<f64> {
    let dx = u.0 - s.x;
    if !(dx.abs() >= margin) {
        return Err(Error::GeometryDegenerate(format!(
            "target at x = {} is within {margin} of station at x = {}",
            u.0, s.x
        )));
    }
    Ok((u.1 - s.y) / dx)
}

pub fn default_stations() -> Vec<Station> {
    vec![Station::new(-5.0, -1.0), Station::new(5.0, -1.0)]
}

/// Stations plus ground truth, viewed as the time-varying system
/// `ε(g, t) = F(t) g - h(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AoAScenario {
    stations: Vec<Station>,
    truth: Trajectory,
    margin: f64,
}

/// Validates the geometry over `[0, horizon]` and builds the scenario.
pub fn build_scenario(stations: Vec<Station>, truth: Trajectory, margin: f64, horizon: f64) -> Result<AoAScenario> {
    if stations.len() < 2 {
        return Err(Error::GeometryDegenerate(format!(
            "need at least two stations, got {}",
            stations.len()
        )));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be > 0, got {margin}")));
    }
    let sc = AoAScenario {
        stations,
        truth,
        margin,
    };
    let samples = ((horizon.max(0.0) * GEOMETRY_SAMPLES_PER_SECOND).ceil() as usize).max(1);
    for k in 0..=samples {
        let t = horizon * k as f64 / samples as f64;
        let u = truth.pos_at(t);
        for s in &sc.stations {
            bearing_tangent(s, u, margin).map_err(|e| match e {
                Error::GeometryDegenerate(msg) => Error::GeometryDegenerate(format!("{msg} at t = {t}")),
                other => other,
            })?;
        }
        let f = sc.f_at(t);
        let normal = f.transpose().mat_mul(&f)?;
        // relative determinant of FᵀF; zero when every bearing line is parallel
        let det = normal.determinant()?;
        if !(det > 1e-9 * normal.max_abs().powi(2)) {
            return Err(Error::GeometryDegenerate(format!(
                "bearing lines are parallel at t = {t}"
            )));
        }
    }
    Ok(sc)
}

impl AoAScenario {
    /// Two stations at `(±5, -1)` watching a circle of radius 2 around
    /// `(0, 2)`. The baseline sits below the circle so the target is never
    /// collinear with both stations.
    pub fn default_scenario(horizon: f64) -> Result<Self> {
        build_scenario(default_stations(), Trajectory::default(), DEFAULT_MARGIN, horizon)
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn truth(&self) -> &Trajectory {
        &self.truth
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    fn tangents(&self, t: f64) -> Vec<f64> {
        let (x, y) = self.truth.pos_at(t);
        self.stations.iter().map(|s| (y - s.y) / (x - s.x)).collect()
    }

    /// `d/dt tan θᵢ = [ẏ(x - xᵢ) - (y - yᵢ)ẋ] / (x - xᵢ)²`
    fn tangent_rates(&self, t: f64) -> Vec<f64> {
        let (x, y) = self.truth.pos_at(t);
        let (vx, vy) = self.truth.vel_at(t);
        self.stations
            .iter()
            .map(|s| {
                let dx = x - s.x;
                (vy * dx - (y - s.y) * vx) / (dx * dx)
            })
            .collect()
    }

    pub fn f_at(&self, t: f64) -> Matrix {
        let rows: Vec<[f64; 2]> = self.tangents(t).into_iter().map(|k| [-k, 1.0]).collect();
        Matrix::from_rows(&rows)
    }

    pub fn h_at(&self, t: f64) -> Vector {
        Vector::new(
            self.tangents(t)
                .into_iter()
                .zip(&self.stations)
                .map(|(k, s)| s.y - s.x * k)
                .collect(),
        )
    }

    pub fn df_at(&self, t: f64) -> Matrix {
        let rows: Vec<[f64; 2]> = self.tangent_rates(t).into_iter().map(|k| [-k, 0.0]).collect();
        Matrix::from_rows(&rows)
    }

    pub fn dh_at(&self, t: f64) -> Vector {
        Vector::new(
            self.tangent_rates(t)
                .into_iter()
                .zip(&self.stations)
                .map(|(k, s)| -s.x * k)
                .collect(),
        )
    }

    /// Static position fix from the bearings at `t` (least squares when
    /// there are more than two stations).
    pub fn triangulate(&self, t: f64) -> Result<Vector> {
        let f = self.f_at(t);
        if f.is_square() {
            linalg::solve(&f, &self.h_at(t))
        } else {
            linalg::least_squares_solve(&f, &self.h_at(t))
        }
    }
}

impl TimeVaryingSystem for AoAScenario {
    fn unknowns(&self) -> usize {
        2
    }

    fn equations(&self) -> usize {
        self.stations.len()
    }

    fn matrix(&self, t: f64) -> Matrix {
        self.f_at(t)
    }

    fn matrix_rate(&self, t: f64) -> Matrix {
        self.df_at(t)
    }

    fn offset(&self, t: f64) -> Vector {
        -&self.h_at(t)
    }

    fn offset_rate(&self, t: f64) -> Vector {
        -&self.dh_at(t)
    }

    fn reference(&self, t: f64) -> Option<Vector> {
        Some(self.truth.pos_vector(t))
    }
}

/// Tracks the target with the adaptive or the original zeroing dynamics.
/// `solution_errors` in the returned trace is the position error.
pub fn track(
    model: &ModelSpec,
    sc: &AoAScenario,
    noise: &NoiseModel,
    init: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    if !matches!(model.kind, ModelKind::Aztnd | ModelKind::Oznn) {
        return Err(Error::InvalidParameter(format!(
            "tracking supports aztnd and oznn, not {}",
            model.kind
        )));
    }
    for s in &sc.stations {
        bearing_tangent(s, init, sc.margin)?;
    }
    integrator::simulate(model, sc, noise, &Vector::from([init.0, init.1]), cfg)
}
