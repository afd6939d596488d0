//! Problem data and the checks that gate the solvers.

mod cost;
mod curve;
mod density;
mod grid;
mod hypotheses;

pub use cost::{CostModel, PlaneFn, PlaneGradFn};
pub use curve::{QualityCurve, ScalarFn, CONVEXITY_SAMPLES, SLOPE_SLACK};
pub use density::{
    Affine, BoundsAudit, Density, DensityBounds, DensityFn, DensityGradFn, DensityModel, FnDensity,
    TruncatedGaussian, Uniform,
};
pub use grid::{build_grid, ProductGrid, Spacing};
pub use hypotheses::{
    check_h1, check_h2, check_h3, check_premium, check_uniqueness, exclusion_margins, market_size,
    H1Report, HypothesisRow, InteriorReport, UniquenessReport,
};

use crate::error::{Error, Result};
use crate::geometry::MassRule;

/// The full problem datum: consumer distribution, product grid and cost.
#[derive(Debug, Clone)]
pub struct ScreeningInstance {
    pub curve: QualityCurve,
    pub cost: CostModel,
    pub density: DensityModel,
    pub grid: ProductGrid,
    /// Quadrature used for every region mass and segment integral.
    pub rule: MassRule,
}

impl ScreeningInstance {
    pub fn new(curve: QualityCurve, cost: CostModel, density: DensityModel, grid: ProductGrid) -> Result<Self> {
        for (i, (y, z)) in grid.ys.iter().zip(&grid.zs).enumerate() {
            let f = curve.f(*y);
            if (z[0] - y).abs() > 1e-12 || (z[1] - f).abs() > 1e-12 {
                return Err(Error::InvalidGrid(format!("grid point {i} is not on the curve")));
            }
        }
        Ok(Self { curve, cost, density, grid, rule: MassRule::default() })
    }

    /// Convenience constructor: builds the grid from the curve and cost.
    pub fn build(
        curve: QualityCurve,
        cost: CostModel,
        density: DensityModel,
        spacing: &Spacing,
        n: usize,
    ) -> Result<Self> {
        let grid = build_grid(&curve, &cost, spacing, n)?;
        Self::new(curve, cost, density, grid)
    }

    pub fn with_rule(mut self, rule: MassRule) -> Self {
        self.rule = rule;
        self
    }

    /// Same data with the grid truncated to products `0..=n`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Ok(Self { grid: self.grid.truncate(n)?, ..self.clone() })
    }
}
