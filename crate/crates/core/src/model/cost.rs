use std::fmt;
use std::sync::Arc;

use super::curve::{QualityCurve, CONVEXITY_SAMPLES, SLOPE_SLACK};
use crate::error::{Error, Result};

pub type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type PlaneGradFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Production cost `c(z1, z2)` with its gradient.
#[derive(Clone)]
pub struct CostModel {
    eval: PlaneFn,
    grad: PlaneGradFn,
}

impl fmt::Debug for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostModel").finish_non_exhaustive()
    }
}

impl CostModel {
    pub fn new(eval: PlaneFn, grad: PlaneGradFn) -> Result<Self> {
        let model = Self { eval, grad };
        let c0 = model.c(0.0, 0.0);
        if c0 != 0.0 {
            return Err(Error::InvalidModel(format!("c(0, 0) must be exactly 0, got {c0}")));
        }
        Ok(model)
    }

    /// `c(z) = |z|^2 / 2`.
    pub fn half_squared_norm() -> Self {
        Self {
            eval: Arc::new(|a, b| 0.5 * (a * a + b * b)),
            grad: Arc::new(|a, b| [a, b]),
        }
    }

    pub fn zero() -> Self {
        Self { eval: Arc::new(|_, _| 0.0), grad: Arc::new(|_, _| [0.0, 0.0]) }
    }

    pub fn c(&self, z1: f64, z2: f64) -> f64 {
        (self.eval)(z1, z2)
    }

    pub fn c_at(&self, z: [f64; 2]) -> f64 {
        self.c(z[0], z[1])
    }

    pub fn gradient(&self, z1: f64, z2: f64) -> [f64; 2] {
        (self.grad)(z1, z2)
    }

    /// Checks that `y -> c(z(y))` is nondecreasing and convex on a sampling grid.
    pub fn validate_against(&self, curve: &QualityCurve) -> Result<()> {
        let n = CONVEXITY_SAMPLES;
        let h = curve.y_max() / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|k| self.c_at(curve.z(k as f64 * h))).collect();
        let slopes: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        if let Some(k) = slopes.iter().position(|s| *s < -SLOPE_SLACK) {
            return Err(Error::NonConvex(format!("c(z(y)) decreases near y = {}", k as f64 * h)));
        }
        if let Some(k) = slopes.windows(2).position(|w| w[1] < w[0] - SLOPE_SLACK) {
            return Err(Error::NonConvex(format!(
                "c(z(y)) is not convex near y = {}",
                (k + 1) as f64 * h
            )));
        }
        Ok(())
    }
}
