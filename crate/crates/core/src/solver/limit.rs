use super::{closed_form_t, solve_numeric, solve_uniform, NumericOptions};
use crate::error::{Error, Result};
use crate::geometry::MassRule;
use crate::model::{build_grid, CostModel, DensityModel, QualityCurve, ScreeningInstance, Spacing};

/// Limit of the breakpoints at quality `y` as the grid is refined: the
/// closed form with `F'(y)` for the chord slope and `c_x1 + F' c_x2` for the
/// cost slope.
pub fn continuous_limit_t(instance: &ScreeningInstance, y: f64) -> f64 {
    limit_t(&instance.curve, &instance.cost, y)
}

fn limit_t(curve: &QualityCurve, cost: &CostModel, y: f64) -> f64 {
    let s = curve.f_prime(y);
    let [c1, c2] = cost.gradient(y, curve.f(y));
    closed_form_t(s, c1 + s * c2)
}

/// Grid family used by a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefineGrid {
    /// Chord length `total / N`.
    EqualChord { total: f64 },
    EqualArclength,
}

impl RefineGrid {
    fn spacing(&self, n: usize) -> Spacing {
        match self {
            RefineGrid::EqualChord { total } => Spacing::EqualChord { chord: total / n as f64 },
            RefineGrid::EqualArclength => Spacing::EqualArclength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineRow {
    pub n: usize,
    pub y_i: f64,
    pub t_i: f64,
    pub t_y: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementTable {
    pub rows: Vec<RefineRow>,
}

impl RefinementTable {
    /// Errors strictly decrease from the second row on.
    pub fn eventually_decreasing(&self) -> bool {
        self.rows.iter().skip(1).collect::<Vec<_>>().windows(2).all(|w| w[1].abs_err < w[0].abs_err)
    }
}

/// For each `N`, solves on the refined grid and compares the breakpoint of
/// the grid point nearest `y` with the continuous limit.
pub fn refinement_study(
    curve: &QualityCurve,
    cost: &CostModel,
    density: &DensityModel,
    grid: RefineGrid,
    rule: MassRule,
    y: f64,
    ns: &[usize],
) -> Result<RefinementTable> {
    let t_y = limit_t(curve, cost, y);
    let rows = ns
        .iter()
        .map(|&n| {
            let g = build_grid(curve, cost, &grid.spacing(n), n)?;
            let inst = ScreeningInstance::new(curve.clone(), cost.clone(), density.clone(), g)?.with_rule(rule);
            let bundle = if density.is_uniform() {
                solve_uniform(&inst)?
            } else {
                solve_numeric(&inst, &NumericOptions::default())?
            };
            let ts = bundle.breakpoints.ts();
            let i = (0..ts.len())
                .min_by(|a, b| (inst.grid.ys[*a] - y).abs().total_cmp(&(inst.grid.ys[*b] - y).abs()))
                .ok_or_else(|| Error::InvalidModel(format!("no product is sold at N = {n}")))?;
            Ok(RefineRow { n, y_i: inst.grid.ys[i], t_i: ts[i], t_y, abs_err: (ts[i] - t_y).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RefinementTable { rows })
}
