use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of sample points used by the sampled convexity checks.
pub const CONVEXITY_SAMPLES: usize = 1000;
/// Slack allowed on finite-difference slope monotonicity.
pub const SLOPE_SLACK: f64 = 1e-10;

/// The quality curve `y -> F(y)` on `[0, y_max]`; products embed as
/// `z(y) = (y, F(y))`.
#[derive(Clone)]
pub struct QualityCurve {
    eval: ScalarFn,
    deriv: ScalarFn,
    y_max: f64,
}

impl fmt::Debug for QualityCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QualityCurve").field("y_max", &self.y_max).finish_non_exhaustive()
    }
}

impl QualityCurve {
    /// Builds a curve from black-box callables. Checks `F(0) = 0` and sampled
    /// monotonicity/convexity.
    pub fn new(eval: ScalarFn, deriv: ScalarFn, y_max: f64) -> Result<Self> {
        if !(y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::InvalidModel(format!("y_max must be positive, got {y_max}")));
        }
        let curve = Self { eval, deriv, y_max };
        let f0 = curve.f(0.0);
        if f0 != 0.0 {
            return Err(Error::InvalidModel(format!("F(0) must be exactly 0, got {f0}")));
        }
        curve.check_shape()?;
        Ok(curve)
    }

    /// `F(y) = a y^2`.
    pub fn quadratic(a: f64, y_max: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidModel(format!("quadratic coefficient must be positive, got {a}")));
        }
        Self::new(Arc::new(move |y| a * y * y), Arc::new(move |y| 2.0 * a * y), y_max)
    }

    /// `F(y) = slope * y`; useful as a degenerate (not strictly convex) case.
    pub fn linear(slope: f64, y_max: f64) -> Result<Self> {
        Self::new(Arc::new(move |y| slope * y), Arc::new(move |_| slope), y_max)
    }

    /// Piecewise-linear interpolation of `(y, F)` samples. The first sample
    /// must be `(0, 0)`; `y_max` is the last abscissa.
    pub fn from_table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidModel("table needs at least two points".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::InvalidModel("table must start at (0, 0)".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidModel("table abscissas must be strictly increasing".into()));
        }
        let y_max = points[points.len() - 1].0;
        let table: Arc<[(f64, f64)]> = points.into();
        let t2 = table.clone();
        let locate = |table: &[(f64, f64)], y: f64| -> usize {
            let k = table.partition_point(|p| p.0 <= y);
            k.clamp(1, table.len() - 1)
        };
        let eval = move |y: f64| {
            let k = locate(&table, y);
            let (y0, f0) = table[k - 1];
            let (y1, f1) = table[k];
            f0 + (f1 - f0) * (y - y0) / (y1 - y0)
        };
        let deriv = move |y: f64| {
            let k = locate(&t2, y);
            let (y0, f0) = t2[k - 1];
            let (y1, f1) = t2[k];
            (f1 - f0) / (y1 - y0)
        };
        Self::new(Arc::new(eval), Arc::new(deriv), y_max)
    }

    pub fn f(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn f_prime(&self, y: f64) -> f64 {
        (self.deriv)(y)
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    /// Embedded point `z(y) = (y, F(y))`.
    pub fn z(&self, y: f64) -> [f64; 2] {
        [y, self.f(y)]
    }

    fn check_shape(&self) -> Result<()> {
        let n = CONVEXITY_SAMPLES;
        let h = self.y_max / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|k| self.f(k as f64 * h)).collect();
        let slopes: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        if let Some(k) = slopes.iter().position(|s| *s < -SLOPE_SLACK) {
            return Err(Error::NonConvex(format!("F decreases near y = {}", k as f64 * h)));
        }
        if let Some(k) = slopes.windows(2).position(|w| w[1] < w[0] - SLOPE_SLACK) {
            return Err(Error::NonConvex(format!("F is not convex near y = {}", (k + 1) as f64 * h)));
        }
        Ok(())
    }

    /// Arclength of the embedded curve between `a` and `b`.
    pub fn arclength(&self, a: f64, b: f64) -> f64 {
        crate::quadrature::adaptive(
            |y| {
                let d = self.f_prime(y);
                (1.0 + d * d).sqrt()
            },
            a,
            b,
            1e-13,
        )
    }
}
