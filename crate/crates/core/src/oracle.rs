//! Brute-force checks independent of the geometry module: consumer choice
//! simulated cell by cell on a dense grid, and exhaustive price search for
//! tiny instances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{market_size, ScreeningInstance};
use crate::solver::{SolutionBundle, Tariff};

pub const COMPARE_RESOLUTION: usize = 1024;
pub const SEARCH_RESOLUTION: usize = 512;
pub const PROFIT_TOLERANCE: f64 = 1e-3;
pub const SEARCH_SLACK: f64 = 5e-3;
pub const MAX_SEARCH_GOODS: usize = 3;
pub const MAX_SEARCH_GRID: usize = 64;
const TIE_MARGIN: f64 = 1e-10;

/// Midpoint-rule cell weights `f(center) h^2`, reused across tariffs.
#[derive(Debug, Clone)]
pub struct CellGrid {
    pub resolution: usize,
    weights: Vec<f64>,
}

impl CellGrid {
    pub fn new(instance: &ScreeningInstance, resolution: usize) -> Self {
        let h = 1.0 / resolution as f64;
        let weights = (0..resolution * resolution)
            .into_par_iter()
            .map(|c| {
                let (row, col) = (c / resolution, c % resolution);
                instance.density.f((col as f64 + 0.5) * h, (row as f64 + 0.5) * h) * h * h
            })
            .collect();
        Self { resolution, weights }
    }

    fn center(&self, row: usize, col: usize) -> (f64, f64) {
        let h = 1.0 / self.resolution as f64;
        ((col as f64 + 0.5) * h, (row as f64 + 0.5) * h)
    }
}

#[derive(Debug, Clone)]
pub struct ChoiceGridReport {
    pub resolution: usize,
    /// Chosen good per cell, row-major from the bottom row.
    pub assignment: Vec<u32>,
    pub masses: Vec<f64>,
    pub profit_estimate: f64,
    /// Cells whose best three utilities agree within the tie margin.
    pub triple_ties: usize,
}

struct RowResult {
    assignment: Vec<u32>,
    masses: Vec<f64>,
    triple_ties: usize,
}

fn sweep_row(instance: &ScreeningInstance, cells: &CellGrid, vs: &[f64], row: usize, keep: bool) -> RowResult {
    let zs = &instance.grid.zs;
    let mut masses = vec![0.0; vs.len()];
    let mut assignment = Vec::with_capacity(if keep { cells.resolution } else { 0 });
    let mut triple_ties = 0;
    for col in 0..cells.resolution {
        let (x1, x2) = cells.center(row, col);
        let (mut best, mut second, mut third) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut chosen = 0;
        for (j, v) in vs.iter().enumerate() {
            let u = x1 * zs[j][0] + x2 * zs[j][1] - v;
            if u > best {
                third = second;
                second = best;
                best = u;
                chosen = j;
            } else if u > second {
                third = second;
                second = u;
            } else if u > third {
                third = u;
            }
        }
        if best - third <= TIE_MARGIN {
            triple_ties += 1;
        }
        masses[chosen] += cells.weights[row * cells.resolution + col];
        if keep {
            assignment.push(chosen as u32);
        }
    }
    RowResult { assignment, masses, triple_ties }
}

fn partition(instance: &ScreeningInstance, cells: &CellGrid, tariff: &Tariff, keep: bool) -> ChoiceGridReport {
    let vs = &tariff.vs;
    let rows: Vec<RowResult> =
        (0..cells.resolution).into_par_iter().map(|r| sweep_row(instance, cells, vs, r, keep)).collect();
    let mut masses = vec![0.0; vs.len()];
    let mut assignment = Vec::new();
    let mut triple_ties = 0;
    for r in rows {
        masses.iter_mut().zip(&r.masses).for_each(|(a, b)| *a += b);
        assignment.extend(r.assignment);
        triple_ties += r.triple_ties;
    }
    let costs = &instance.grid.costs;
    let profit_estimate = (1..vs.len()).map(|j| (vs[j] - costs[j]) * masses[j]).sum();
    ChoiceGridReport { resolution: cells.resolution, assignment, masses, profit_estimate, triple_ties }
}

/// Every cell centre picks `argmax_j (x . z_j - v_j)` over all goods, ties to
/// the lowest index.
pub fn choice_partition(instance: &ScreeningInstance, tariff: &Tariff, resolution: usize) -> ChoiceGridReport {
    partition(instance, &CellGrid::new(instance, resolution), tariff, true)
}

#[derive(Debug, Clone)]
pub struct BruteForce {
    pub best_tariff: Tariff,
    pub best_profit: f64,
    pub evaluated: usize,
}

/// Exhaustive search over prices `v_j` on `per_good_grid` equispaced values in
/// `[c_j, y_j + F(y_j)]`, scored by the choice simulation.
pub fn brute_force_prices(instance: &ScreeningInstance, per_good_grid: usize, resolution: usize) -> Result<BruteForce> {
    let m = market_size(instance)?;
    if m > MAX_SEARCH_GOODS {
        return Err(Error::TooLarge(format!("market size {m} exceeds {MAX_SEARCH_GOODS}")));
    }
    if !(2..=MAX_SEARCH_GRID).contains(&per_good_grid) {
        return Err(Error::TooLarge(format!("search grid {per_good_grid} outside 2..={MAX_SEARCH_GRID}")));
    }
    if m == 0 {
        return Ok(BruteForce { best_tariff: Tariff { vs: vec![0.0] }, best_profit: 0.0, evaluated: 0 });
    }
    let g = &instance.grid;
    let axes: Vec<Vec<f64>> = (1..=m)
        .map(|j| {
            let (lo, hi) = (g.costs[j], g.zs[j][0] + g.zs[j][1]);
            (0..per_good_grid).map(|k| lo + (hi - lo) * k as f64 / (per_good_grid - 1) as f64).collect()
        })
        .collect();
    let cells = CellGrid::new(instance, resolution);
    let total = per_good_grid.pow(m as u32);
    let (best_profit, best) = (0..total)
        .map(|code| {
            let mut vs = vec![0.0];
            let mut c = code;
            for axis in &axes {
                vs.push(axis[c % per_good_grid]);
                c /= per_good_grid;
            }
            let p = partition(instance, &cells, &Tariff { vs: vs.clone() }, false).profit_estimate;
            (p, vs)
        })
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    Ok(BruteForce { best_tariff: Tariff { vs: best }, best_profit, evaluated: total })
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub oracle_profit: f64,
    pub bundle_profit: f64,
    pub max_mass_deviation: f64,
    pub opt_out_mass: f64,
    pub brute: Option<BruteForce>,
    pub pass: bool,
}

impl Verdict {
    pub fn profit_delta(&self) -> f64 {
        self.oracle_profit - self.bundle_profit
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    pub resolution: usize,
    pub search_grid: usize,
    pub search_resolution: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { resolution: COMPARE_RESOLUTION, search_grid: 32, search_resolution: SEARCH_RESOLUTION }
    }
}

/// Oracle profit of the bundle tariff against the bundle profit, plus the
/// exhaustive search when the market is small enough.
pub fn compare(instance: &ScreeningInstance, bundle: &SolutionBundle, opts: &CompareOptions) -> Result<Verdict> {
    let report = choice_partition(instance, &bundle.tariff, opts.resolution);
    let max_mass_deviation =
        report.masses.iter().zip(bundle.masses()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let brute = if bundle.breakpoints.m() <= MAX_SEARCH_GOODS {
        Some(brute_force_prices(instance, opts.search_grid, opts.search_resolution)?)
    } else {
        None
    };
    let profit_ok = (report.profit_estimate - bundle.profit).abs() < PROFIT_TOLERANCE;
    let search_ok = brute.as_ref().is_none_or(|b| b.best_profit <= bundle.profit + SEARCH_SLACK);
    Ok(Verdict {
        oracle_profit: report.profit_estimate,
        bundle_profit: bundle.profit,
        max_mass_deviation,
        opt_out_mass: report.masses[0],
        brute,
        pass: profit_ok && search_ok,
    })
}
