//! Time-varying quadratic minimization problems.
//!
//! A problem minimizes `½ zᵀM(t)z + b(t)ᵀz` at every instant. Its gradient
//! `M(t)z + b(t)` doubles as the error function that the solver dynamics
//! drive to zero, so the whole solver stack only ever sees the affine map
//! `z ↦ A(t)z + c(t)` through [`TimeVaryingSystem`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// A time-varying affine error map `ε(x, t) = A(t)x + c(t)` together with
/// the analytic time derivatives of `A` and `c`.
///
/// `A` may be rectangular (more equations than unknowns); the dynamics then
/// reduce through the normal equations.
pub trait TimeVaryingSystem: Send + Sync {
    /// Length of the unknown vector.
    fn unknowns(&self) -> usize;
    /// Length of the residual vector.
    fn equations(&self) -> usize;
    fn matrix(&self, t: f64) -> Matrix;
    fn matrix_rate(&self, t: f64) -> Matrix;
    fn offset(&self, t: f64) -> Vector;
    fn offset_rate(&self, t: f64) -> Vector;
    /// The exact zero of the residual at `t`, when one is known.
    fn reference(&self, t: f64) -> Option<Vector>;

    fn residual(&self, x: &Vector, t: f64) -> Result<Vector> {
        Ok(&self.matrix(t).mat_vec(x)? + &self.offset(t))
    }
}

type MatrixFn = Arc<dyn Fn(f64) -> Matrix + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;

/// Hessian `M(t)` and linear term `b(t)` of a TVQM instance, with their
/// analytic derivatives.
#[derive(Clone)]
pub struct TimeVaryingLinearProblem {
    name: String,
    dim: usize,
    m_at: MatrixFn,
    b_at: VectorFn,
    dm_at: MatrixFn,
    db_at: VectorFn,
}

impl fmt::Debug for TimeVaryingLinearProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeVaryingLinearProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl TimeVaryingLinearProblem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        m_at: impl Fn(f64) -> Matrix + Send + Sync + 'static,
        b_at: impl Fn(f64) -> Vector + Send + Sync + 'static,
        dm_at: impl Fn(f64) -> Matrix + Send + Sync + 'static,
        db_at: impl Fn(f64) -> Vector + Send + Sync + 'static,
    ) -> Self {
        TimeVaryingLinearProblem {
            name: name.into(),
            dim,
            m_at: Arc::new(m_at),
            b_at: Arc::new(b_at),
            dm_at: Arc::new(dm_at),
            db_at: Arc::new(db_at),
        }
    }

    /// A problem whose data does not change with time.
    pub fn constant(name: impl Into<String>, m: Matrix, b: Vector) -> Result<Self> {
        if !m.is_square() || m.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                actual: b.len(),
            });
        }
        let n = b.len();
        Ok(Self::new(
            name,
            n,
            move |_| m.clone(),
            move |_| b.clone(),
            move |_| Matrix::zeros(n, n),
            move |_| Vector::zeros(n),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m_at(&self, t: f64) -> Matrix {
        (self.m_at)(t)
    }

    pub fn b_at(&self, t: f64) -> Vector {
        (self.b_at)(t)
    }

    pub fn dm_at(&self, t: f64) -> Matrix {
        (self.dm_at)(t)
    }

    pub fn db_at(&self, t: f64) -> Vector {
        (self.db_at)(t)
    }

    fn check_dim(&self, z: &Vector) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: z.len(),
            });
        }
        Ok(())
    }
}

impl TimeVaryingSystem for TimeVaryingLinearProblem {
    fn unknowns(&self) -> usize {
        self.dim
    }

    fn equations(&self) -> usize {
        self.dim
    }

    fn matrix(&self, t: f64) -> Matrix {
        self.m_at(t)
    }

    fn matrix_rate(&self, t: f64) -> Matrix {
        self.dm_at(t)
    }

    fn offset(&self, t: f64) -> Vector {
        self.b_at(t)
    }

    fn offset_rate(&self, t: f64) -> Vector {
        self.db_at(t)
    }

    fn reference(&self, t: f64) -> Option<Vector> {
        theoretical_solution(self, t).ok()
    }
}

/// `½ zᵀM(t)z + b(t)ᵀz`
pub fn objective(p: &TimeVaryingLinearProblem, z: &Vector, t: f64) -> Result<f64> {
    p.check_dim(z)?;
    let mz = p.m_at(t).mat_vec(z)?;
    Ok(0.5 * z.dot(&mz) + p.b_at(t).dot(z))
}

/// `M(t)z + b(t)`
pub fn gradient(p: &TimeVaryingLinearProblem, z: &Vector, t: f64) -> Result<Vector> {
    p.check_dim(z)?;
    Ok(&p.m_at(t).mat_vec(z)? + &p.b_at(t))
}

/// The error function the dynamics zero. Identical to [`gradient`] for TVQM
/// instances.
pub fn residual(p: &TimeVaryingLinearProblem, z: &Vector, t: f64) -> Result<Vector> {
    gradient(p, z, t)
}

/// Instantaneous minimizer `-M(t)⁻¹ b(t)`.
pub fn theoretical_solution(p: &TimeVaryingLinearProblem, t: f64) -> Result<Vector> {
    linalg::solve(&p.m_at(t), &-&p.b_at(t))
}

/// Scalar knobs of the two-dimensional benchmark instance.
///
/// ```text
/// M(t) = [[r·sin ωt + d, c·cos ωt], [c·cos ωt, r·cos ωt + d]]
/// b(t) = s·[sin ωt, cos ωt]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    /// ω
    pub frequency: f64,
    /// r
    pub ripple: f64,
    /// d
    pub diagonal: f64,
    /// c
    pub coupling: f64,
    /// s
    pub rhs_amplitude: f64,
}

impl Default for Example1Params {
    fn default() -> Self {
        Example1Params {
            frequency: 1.0,
            ripple: 0.5,
            diagonal: 2.0,
            coupling: 1.0,
            rhs_amplitude: 1.0,
        }
    }
}

/// The two-dimensional benchmark instance with its default parameters.
pub fn example1() -> TimeVaryingLinearProblem {
    example1_with(Example1Params::default())
}

pub fn example1_with(params: Example1Params) -> TimeVaryingLinearProblem {
    let Example1Params {
        frequency: w,
        ripple: r,
        diagonal: d,
        coupling: c,
        rhs_amplitude: s,
    } = params;
    TimeVaryingLinearProblem::new(
        "example1",
        2,
        move |t| {
            let (sn, cs) = (w * t).sin_cos();
            Matrix::from_rows(&[[r * sn + d, c * cs], [c * cs, r * cs + d]])
        },
        move |t| {
            let (sn, cs) = (w * t).sin_cos();
            Vector::from([s * sn, s * cs])
        },
        move |t| {
            let (sn, cs) = (w * t).sin_cos();
            Matrix::from_rows(&[[r * w * cs, -c * w * sn], [-c * w * sn, -r * w * sn]])
        },
        move |t| {
            let (sn, cs) = (w * t).sin_cos();
            Vector::from([s * w * cs, -s * w * sn])
        },
    )
}

/// `M = I`, `b = 0`: the solution is the origin for all time.
pub fn constant_problem(dim: usize) -> TimeVaryingLinearProblem {
    TimeVaryingLinearProblem::constant("constant_problem", Matrix::identity(dim), Vector::zeros(dim))
        .expect("identity problem is well formed")
}

/// Central-difference step used by [`derivative_mismatch`].
pub const FD_STEP: f64 = 1e-5;

/// Largest elementwise gap between the analytic derivatives of `sys` and
/// central differences of its data, over `samples` points in `[0, horizon]`.
pub fn derivative_mismatch<S: TimeVaryingSystem + ?Sized>(sys: &S, horizon: f64, samples: usize) -> f64 {
    let mut worst = 0.0_f64;
    for k in 0..=samples {
        let t = horizon * k as f64 / samples as f64;
        let (lo, hi) = (t - FD_STEP, t + FD_STEP);
        let fd_m = linalg::mat_scale(
            0.5 / FD_STEP,
            &linalg::mat_add(&sys.matrix(hi), &linalg::mat_scale(-1.0, &sys.matrix(lo))).unwrap(),
        );
        let dm = sys.matrix_rate(t);
        for (a, b) in fd_m.as_slice().iter().zip(dm.as_slice()) {
            worst = worst.max((a - b).abs());
        }
        let fd_c = (&sys.offset(hi) - &sys.offset(lo)).scale(0.5 / FD_STEP);
        for (a, b) in fd_c.iter().zip(sys.offset_rate(t).iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Checks the structural invariants of a TVQM instance over `[0, horizon]`:
/// symmetric Hessian and derivative evaluators consistent with finite
/// differences.
pub fn check_consistency(p: &TimeVaryingLinearProblem, horizon: f64, samples: usize) -> Result<()> {
    for k in 0..=samples {
        let t = horizon * k as f64 / samples as f64;
        let asym = p.m_at(t).asymmetry();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "Hessian of '{}' is not symmetric at t = {t} (gap {asym:e})",
                p.name
            )));
        }
    }
    let gap = derivative_mismatch(p, horizon, samples);
    if gap > 1e-5 {
        return Err(Error::InvalidParameter(format!(
            "derivative evaluators of '{}' disagree with finite differences by {gap:e}",
            p.name
        )));
    }
    Ok(())
}

/// Named scenario lookup used by configuration front-ends.
pub fn by_name(name: &str) -> Option<TimeVaryingLinearProblem> {
    match name {
        "example1" => Some(example1()),
        "constant_problem" => Some(constant_problem(2)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn example1_data() {
        let p = example1();
        assert_eq!(p.m_at(0.0), Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.5]]));
        let b = p.b_at(PI);
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn objective_values() {
        let p = example1();
        assert_eq!(objective(&p, &Vector::from([0.0, 0.0]), 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            objective(&p, &Vector::from([1.0, 0.0]), 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            objective(&p, &Vector::from([0.0, 1.0]), 0.0).unwrap(),
            2.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn gradient_at_origin_is_b() {
        let g = gradient(&example1(), &Vector::zeros(2), 0.0).unwrap();
        assert_eq!(g, Vector::from([0.0, 1.0]));
        assert_eq!(residual(&example1(), &Vector::zeros(2), 0.0).unwrap(), g);
    }

    #[test]
    fn dimension_mismatch() {
        let p = example1();
        let z = Vector::zeros(3);
        assert!(matches!(objective(&p, &z, 0.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(gradient(&p, &z, 0.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(residual(&p, &z, 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn theoretical_solution_values() {
        let p = example1();
        let z0 = theoretical_solution(&p, 0.0).unwrap();
        assert_abs_diff_eq!(z0[0], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(z0[1], -0.5, epsilon = 1e-14);
        let zq = theoretical_solution(&p, PI / 2.0).unwrap();
        assert_abs_diff_eq!(zq[0], -0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(zq[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_solution() {
        let p = TimeVaryingLinearProblem::constant(
            "diag",
            Matrix::diagonal(&[2.0, -4.0, 0.5]),
            Vector::from([1.0, 2.0, 3.0]),
        )
        .unwrap();
        let z = theoretical_solution(&p, 3.0).unwrap();
        assert_abs_diff_eq!(z[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z[2], -6.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_hessian() {
        let p = TimeVaryingLinearProblem::constant(
            "singular",
            Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]),
            Vector::from([1.0, 0.0]),
        )
        .unwrap();
        assert!(matches!(
            theoretical_solution(&p, 0.0),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(p.reference(0.0).is_none());
    }

    #[test]
    fn solution_zeroes_residual_over_horizon() {
        let p = example1();
        for k in 0..=1000 {
            let t = 10.0 * k as f64 / 1000.0;
            let z = theoretical_solution(&p, t).unwrap();
            assert!(residual(&p, &z, t).unwrap().norm2() <= 1e-10);
        }
    }

    #[test]
    fn example1_consistent() {
        check_consistency(&example1(), 10.0, 2000).unwrap();
        check_consistency(&constant_problem(3), 10.0, 10).unwrap();
        let fast = example1_with(Example1Params {
            frequency: 2.0,
            ..Default::default()
        });
        check_consistency(&fast, 10.0, 2000).unwrap();
    }

    #[test]
    fn inconsistent_derivative_detected() {
        let p = TimeVaryingLinearProblem::new(
            "bad",
            1,
            |t| Matrix::from_rows(&[[1.0 + t]]),
            |_| Vector::from([0.0]),
            |_| Matrix::from_rows(&[[0.0]]),
            |_| Vector::from([0.0]),
        );
        assert!(check_consistency(&p, 1.0, 10).is_err());
    }

    #[test]
    fn example1_hessian_nonsingular() {
        let p = example1();
        for k in 0..10_000 {
            let t = 10.0 * k as f64 / 10_000.0;
            assert!(p.m_at(t).determinant().unwrap() > 0.1);
        }
    }

    #[test]
    fn named_lookup() {
        assert_eq!(by_name("example1").unwrap().dim(), 2);
        assert_eq!(by_name("constant_problem").unwrap().name(), "constant_problem");
        assert!(by_name("nope").is_none());
    }

    proptest! {
        #[test]
        fn gradient_matches_central_differences(
            z in prop::collection::vec(-3.0..3.0_f64, 2),
            t in 0.0..10.0_f64,
        ) {
            let p = example1();
            let z = Vector::new(z);
            let g = gradient(&p, &z, t).unwrap();
            let d = 1e-5;
            for i in 0..2 {
                let mut up = z.clone();
                let mut dn = z.clone();
                up[i] += d;
                dn[i] -= d;
                let fd = (objective(&p, &up, t).unwrap() - objective(&p, &dn, t).unwrap()) / (2.0 * d);
                prop_assert!((fd - g[i]).abs() <= 1e-6);
            }
        }
    }
}
