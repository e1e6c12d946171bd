//! Additive measurement-noise generators.
//!
//! Random noise is counter-based: the value drawn for a step is a pure
//! function of `(seed, step_index, component)`, so replaying, decimating or
//! reordering calls never changes the realization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum NoiseModel {
    #[default]
    None,
    /// A fixed offset.
    Constant(Vector),
    /// `slope · t`, componentwise.
    Linear(Vector),
    /// Independent uniform draws on `[lower, upper]` per component and step.
    BoundedRandom { lower: f64, upper: f64, seed: u64 },
}

impl NoiseModel {
    pub fn constant(level: impl Into<Vector>) -> Self {
        NoiseModel::Constant(level.into())
    }

    pub fn linear(slope: impl Into<Vector>) -> Self {
        NoiseModel::Linear(slope.into())
    }

    pub fn bounded_random(lower: f64, upper: f64, seed: u64) -> Result<Self> {
        let nm = NoiseModel::BoundedRandom { lower, upper, seed };
        nm.validate()?;
        Ok(nm)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::BoundedRandom { lower, upper, .. } if !(lower < upper) => Err(Error::InvalidParameter(
                format!("noise bounds need lower < upper, got [{lower}, {upper}]"),
            )),
            NoiseModel::Constant(v) | NoiseModel::Linear(v) if !v.is_finite() => {
                Err(Error::InvalidParameter("noise vector must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Checks that a fixed-vector noise matches the residual dimension.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            NoiseModel::Constant(v) | NoiseModel::Linear(v) if v.len() != n => Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseModel::None)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseModel::None => "none",
            NoiseModel::Constant(_) => "constant",
            NoiseModel::Linear(_) => "linear",
            NoiseModel::BoundedRandom { .. } => "random",
        }
    }
}

/// Noise value of dimension `n` at time `t`, step `step_index`.
pub fn sample(nm: &NoiseModel, n: usize, t: f64, step_index: u64) -> Vector {
    match nm {
        NoiseModel::None => Vector::zeros(n),
        NoiseModel::Constant(level) => level.clone(),
        NoiseModel::Linear(slope) => slope.scale(t),
        &NoiseModel::BoundedRandom { lower, upper, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(step_index);
            Vector::new((0..n).map(|_| rng.random_range(lower..=upper)).collect())
        }
    }
}

/// Seeded initial state drawn uniformly from `[lower, upper]ⁿ`.
pub fn uniform_vector(n: usize, lower: f64, upper: f64, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Vector::new((0..n).map(|_| rng.random_range(lower..=upper)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        let c = NoiseModel::constant([5.0, 5.0]);
        assert_eq!(sample(&c, 2, 0.0, 0), Vector::from([5.0, 5.0]));
        assert_eq!(sample(&c, 2, 7.3, 42), Vector::from([5.0, 5.0]));
        let l = NoiseModel::linear([0.4, 0.4]);
        let v = sample(&l, 2, 2.5, 2500);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert_eq!(sample(&NoiseModel::None, 3, 1.0, 1), Vector::zeros(3));
    }

    #[test]
    fn random_in_bounds_and_repeatable() {
        let nm = NoiseModel::bounded_random(0.5, 3.0, 17).unwrap();
        for step in 0..1000 {
            let v = sample(&nm, 2, 0.0, step);
            assert!(v.iter().all(|&x| (0.5..=3.0).contains(&x)));
            assert_eq!(v, sample(&nm, 2, 99.0, step));
        }
        let other = NoiseModel::bounded_random(0.5, 3.0, 18).unwrap();
        assert_ne!(sample(&nm, 2, 0.0, 0), sample(&other, 2, 0.0, 0));
    }

    #[test]
    fn out_of_order_sampling() {
        let nm = NoiseModel::bounded_random(-1.0, 1.0, 3).unwrap();
        let forward: Vec<_> = (0..200).map(|k| sample(&nm, 3, 0.0, k)).collect();
        let backward: Vec<_> = (0..200).rev().map(|k| sample(&nm, 3, 0.0, k)).collect();
        for (k, v) in backward.into_iter().rev().enumerate() {
            assert_eq!(v, forward[k]);
        }
    }

    #[test]
    fn million_draws_bounded_with_centered_mean() {
        let (lo, hi) = (0.5, 3.0);
        let nm = NoiseModel::bounded_random(lo, hi, 2024).unwrap();
        let draws = 1_000_000u64;
        let mut sum = 0.0;
        for k in 0..draws / 2 {
            for &x in sample(&nm, 2, 0.0, k).iter() {
                assert!((lo..=hi).contains(&x));
                sum += x;
            }
        }
        let mean = sum / draws as f64;
        let sigma = (hi - lo) / 12f64.sqrt() / (draws as f64).sqrt();
        assert!((mean - 0.5 * (lo + hi)).abs() <= 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn invalid_bounds() {
        assert!(NoiseModel::bounded_random(3.0, 0.5, 1).is_err());
        assert!(NoiseModel::bounded_random(1.0, 1.0, 1).is_err());
        assert!(NoiseModel::constant([1.0, 2.0]).check_dim(3).is_err());
        assert!(NoiseModel::None.check_dim(3).is_ok());
    }
}
