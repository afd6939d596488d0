//! Semi-discrete optimal transport between the consumer density and a
//! discrete measure on the product grid: splitting levels, discrete
//! nestedness, dual potentials and the induced map.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{polygon_mass, ConvexRegion, HalfPlane, Point, BOUNDARY_TOL};
use crate::model::ScreeningInstance;
use crate::roots::bisect;

/// Weights `nu_0..nu_N` on the grid atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidModel("measure weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("measure weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Rescales non-negative weights to unit mass; tiny negative values from
    /// quadrature are clamped to zero.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let w: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidModel("measure has no mass".into()));
        }
        Self::new(w.iter().map(|x| x / total).collect())
    }

    /// Market-size padding: atoms beyond the given weights get zero mass.
    pub fn padded(mut self, len: usize) -> Self {
        self.weights.resize(len.max(self.weights.len()), 0.0);
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `nu({y_k : a < k <= b})`.
    pub fn between(&self, a: usize, b: usize) -> f64 {
        self.weights[a + 1..=b].iter().sum()
    }
}

/// Splitting levels `k_0..k_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSchedule {
    pub ks: Vec<f64>,
}

fn direction(instance: &ScreeningInstance, i: usize) -> [f64; 2] {
    instance.grid.step(i)
}

/// Range of `x . d` over the square for `d >= 0`.
fn level_range(d: [f64; 2]) -> (f64, f64) {
    let corners = [0.0, d[0], d[1], d[0] + d[1]];
    (corners.iter().cloned().fold(f64::INFINITY, f64::min), corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

fn sublevel(instance: &ScreeningInstance, i: usize, k: f64) -> ConvexRegion {
    ConvexRegion::unit_square().clip(&HalfPlane::new(direction(instance, i), k))
}

fn square_mass(instance: &ScreeningInstance) -> f64 {
    polygon_mass(&ConvexRegion::unit_square(), instance.density.density(), &instance.rule)
}

fn mass_of(instance: &ScreeningInstance, r: &ConvexRegion) -> f64 {
    polygon_mass(r, instance.density.density(), &instance.rule)
}

/// Level `k` with `mu{x : x . (z_{i+1} - z_i) <= k} = cum`.
pub fn level_for(instance: &ScreeningInstance, i: usize, cum: f64) -> Result<f64> {
    let (lo, hi) = level_range(direction(instance, i));
    if cum <= 0.0 {
        return Ok(lo);
    }
    if cum >= 1.0 {
        return Ok(hi);
    }
    let total = square_mass(instance);
    let h = |k: f64| mass_of(instance, &sublevel(instance, i, k)) - cum * total;
    bisect(h, lo, hi, 1e-15 * (hi - lo).max(1.0))
}

/// Levels for the partial sums of `nu`.
pub fn level_schedule(instance: &ScreeningInstance, nu: &DiscreteMeasure) -> Result<LevelSchedule> {
    let n = instance.grid.n();
    if nu.weights().len() != n + 1 {
        return Err(Error::InvalidModel(format!("measure has {} atoms, grid has {}", nu.weights().len(), n + 1)));
    }
    let cums: Vec<f64> = nu
        .weights()
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .take(n)
        .collect();
    let ks = cums.par_iter().enumerate().map(|(i, c)| level_for(instance, i, *c)).collect::<Result<_>>()?;
    Ok(LevelSchedule { ks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestednessReport {
    pub pass: bool,
    /// Pairs `(i, j)` whose sublevel sets fail strict containment.
    pub violations: Vec<(usize, usize)>,
}

/// `X_<=(i) subset X_<(j)` for every `i < j` with `nu` mass strictly between.
/// Checked geometrically: every vertex of the `i`-sublevel polygon lies
/// strictly inside the `j` half-plane, and the two level lines do not meet
/// in the closed square.
pub fn check_discrete_nestedness(
    instance: &ScreeningInstance,
    schedule: &LevelSchedule,
    nu: &DiscreteMeasure,
) -> NestednessReport {
    let n = schedule.ks.len();
    let polys: Vec<ConvexRegion> = (0..n).map(|i| sublevel(instance, i, schedule.ks[i])).collect();
    let planes: Vec<HalfPlane> = (0..n).map(|i| HalfPlane::new(direction(instance, i), schedule.ks[i])).collect();
    let mut violations = Vec::new();
    for i in 0..n {
        if polys[i].is_empty() {
            continue;
        }
        for j in i + 1..n {
            if !(nu.between(i, j) > 0.0) {
                continue;
            }
            let pj = &planes[j];
            let scale = pj.normal[0].hypot(pj.normal[1]);
            let inside = polys[i].vertices().iter().all(|v| pj.eval(*v) < -BOUNDARY_TOL * scale);
            let crossing = crate::geometry::boundaries_cross(&planes[i], pj).crosses;
            if !inside || crossing {
                violations.push((i, j));
            }
        }
    }
    NestednessReport { pass: violations.is_empty(), violations }
}

/// Dual pair: `v_i = sum_{k<i} k_k` and `u(x) = max_i (x . z_i - v_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    pub v_list: Vec<f64>,
    zs: Vec<[f64; 2]>,
}

impl PotentialPair {
    pub fn u(&self, x: Point) -> f64 {
        self.zs.iter().zip(&self.v_list).map(|(z, v)| x.dot(*z) - v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `u(x) + v_i - x . z_i`; non-negative by construction.
    pub fn slack(&self, x: Point, i: usize) -> f64 {
        self.u(x) + self.v_list[i] - x.dot(self.zs[i])
    }
}

/// Refuses schedules that are not discretely nested.
pub fn potentials(instance: &ScreeningInstance, schedule: &LevelSchedule, nu: &DiscreteMeasure) -> Result<PotentialPair> {
    let report = check_discrete_nestedness(instance, schedule, nu);
    if let Some(&(i, j)) = report.violations.first() {
        return Err(Error::NotDiscretelyNested(i, j));
    }
    let mut v_list = vec![0.0];
    for k in &schedule.ks {
        v_list.push(v_list.last().unwrap() + k);
    }
    Ok(PotentialPair { v_list, zs: instance.grid.zs.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapResult {
    pub index: usize,
    /// `x` lies on a level line (within tolerance); the lower index is
    /// returned.
    pub boundary: bool,
}

/// Atom receiving `x`: the number of level lines strictly below `x`.
pub fn optimal_map(instance: &ScreeningInstance, schedule: &LevelSchedule, x: Point) -> MapResult {
    let mut index = 0;
    let mut boundary = false;
    for (i, k) in schedule.ks.iter().enumerate() {
        let d = direction(instance, i);
        let e = (x.dot(d) - k) / d[0].hypot(d[1]);
        if e > BOUNDARY_TOL {
            index += 1;
        } else if e >= -BOUNDARY_TOL {
            boundary = true;
        }
    }
    MapResult { index, boundary }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardReport {
    pub masses: Vec<f64>,
    pub max_deviation: f64,
}

/// Masses of the slabs between consecutive levels compared atomwise with `nu`.
pub fn pushforward_check(instance: &ScreeningInstance, schedule: &LevelSchedule, nu: &DiscreteMeasure) -> PushforwardReport {
    let n = schedule.ks.len();
    let total = square_mass(instance);
    let masses: Vec<f64> = (0..=n)
        .map(|i| {
            let mut r = ConvexRegion::unit_square();
            if i > 0 {
                r = r.clip(&HalfPlane::new(direction(instance, i - 1), schedule.ks[i - 1]).complement());
            }
            if i < n {
                r = r.clip(&HalfPlane::new(direction(instance, i), schedule.ks[i]));
            }
            mass_of(instance, &r) / total
        })
        .collect();
    let max_deviation = masses.iter().zip(nu.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    PushforwardReport { masses, max_deviation }
}

#[cfg(test)]
mod tests;
