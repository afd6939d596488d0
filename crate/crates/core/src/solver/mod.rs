//! Prices, regions and profit from breakpoints, the decoupled first-order
//! conditions and the two optimizers.

mod closed;
mod limit;
mod numeric;
mod tariff;
mod validate;

pub use closed::{closed_form_t, solve_uniform};
pub use limit::{continuous_limit_t, refinement_study, RefineGrid, RefineRow, RefinementTable};
pub use numeric::{dprofit_dti, gap_profile, solve_numeric, NumericOptions, SCAN_POINTS};
pub use tariff::{
    choice_regions, payoff, prices_from_breakpoints, profit, profit_of_regions, regions_from_breakpoints, Payoff,
};
pub use validate::{validate_nested, NestedReport, Violation, MIN_REGION_MASS};

use crate::error::{Error, Result};
use crate::geometry::{ConvexRegion, IndiffLine};
use crate::model::{check_premium, market_size, ScreeningInstance};

/// Upper-edge abscissas `t_0..t_{M-1}` of the indifference lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    ts: Vec<f64>,
}

impl Breakpoints {
    pub fn new(ts: Vec<f64>) -> Result<Self> {
        if let Some((i, t)) = ts.iter().enumerate().find(|(_, t)| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidModel(format!("breakpoint t_{i} = {t} outside [0, 1]")));
        }
        Ok(Self { ts })
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    /// Market size `M`.
    pub fn m(&self) -> usize {
        self.ts.len()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.ts.windows(2).all(|w| w[0] < w[1])
    }

    pub fn lines(&self, instance: &ScreeningInstance) -> Vec<IndiffLine> {
        self.ts.iter().enumerate().map(|(i, t)| IndiffLine::for_gap(&instance.grid, i, *t)).collect()
    }
}

/// Prices `v_0 = 0 < v_1 < ... < v_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tariff {
    pub vs: Vec<f64>,
}

impl Tariff {
    pub fn m(&self) -> usize {
        self.vs.len() - 1
    }
}

/// Regions `X_0..X_M` with their masses.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSet {
    pub regions: Vec<ConvexRegion>,
    pub masses: Vec<f64>,
}

impl RegionSet {
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Numeric => "numeric",
        })
    }
}

/// How a single breakpoint was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDiagnostic {
    /// The maximiser sits at `t = 0` or `t = 1`.
    pub boundary: bool,
    /// Stationary points found on the scan (numeric method only).
    pub roots: usize,
    /// The closed-form value fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

/// A candidate solution. When the lines cross inside the square the regions
/// are the exact choice regions of the tariff and `nested` reports why the
/// candidate is not a nested solution.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub breakpoints: Breakpoints,
    pub tariff: Tariff,
    pub regions: RegionSet,
    pub profit: f64,
    pub nested: NestedReport,
    pub method: Method,
    pub gaps: Vec<GapDiagnostic>,
}

impl SolutionBundle {
    pub fn is_nested(&self) -> bool {
        self.nested.is_nested()
    }

    pub fn masses(&self) -> &[f64] {
        &self.regions.masses
    }

    /// Prices, regions, profit and validation for a breakpoint vector.
    pub fn assemble(
        instance: &ScreeningInstance,
        breakpoints: Breakpoints,
        method: Method,
        gaps: Vec<GapDiagnostic>,
    ) -> Result<Self> {
        let tariff = prices_from_breakpoints(&instance.grid, &breakpoints);
        let crossing_free = validate::crossings(instance, &breakpoints).is_empty();
        let regions = if crossing_free {
            regions_from_breakpoints(instance, &breakpoints, false)?
        } else {
            choice_regions(instance, &tariff)
        };
        let nested = validate::report(instance, &breakpoints, &regions);
        let profit = profit_of_regions(instance, &tariff, &regions);
        Ok(Self { breakpoints, tariff, regions, profit, nested, method, gaps })
    }
}

/// Premium condition and market size shared by both solvers.
fn prepare(instance: &ScreeningInstance) -> Result<usize> {
    if !check_premium(instance) {
        return Err(Error::NoPremium);
    }
    market_size(instance)
}
