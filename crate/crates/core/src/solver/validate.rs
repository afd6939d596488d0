use super::{choice_regions, prices_from_breakpoints, regions_from_breakpoints, Breakpoints, RegionSet};
use crate::geometry::{lines_cross_in_closed_square, Point};
use crate::model::ScreeningInstance;

pub const MIN_REGION_MASS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotIncreasing { i: usize, t_i: f64, t_next: f64 },
    Crossing { i: usize, j: usize, point: Point },
    SmallMass { i: usize, mass: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedReport {
    pub monotone: bool,
    pub no_crossings: bool,
    pub positive_masses: bool,
    pub violations: Vec<Violation>,
}

impl NestedReport {
    pub fn is_nested(&self) -> bool {
        self.monotone && self.no_crossings && self.positive_masses
    }

    pub fn crossing_count(&self) -> usize {
        self.violations.iter().filter(|v| matches!(v, Violation::Crossing { .. })).count()
    }
}

pub(super) fn crossings(instance: &ScreeningInstance, bp: &Breakpoints) -> Vec<Violation> {
    let lines = bp.lines(instance);
    let mut out = Vec::new();
    for (i, a) in lines.iter().enumerate() {
        for (j, b) in lines.iter().enumerate().skip(i + 1) {
            let c = lines_cross_in_closed_square(a, b);
            if c.crosses {
                out.push(Violation::Crossing { i, j, point: c.point.unwrap_or_default() });
            }
        }
    }
    out
}

pub(super) fn report(instance: &ScreeningInstance, bp: &Breakpoints, regions: &RegionSet) -> NestedReport {
    let mut violations: Vec<Violation> = bp
        .ts()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !(w[0] < w[1]))
        .map(|(i, w)| Violation::NotIncreasing { i, t_i: w[0], t_next: w[1] })
        .collect();
    let monotone = violations.is_empty();
    let cross = crossings(instance, bp);
    let no_crossings = cross.is_empty();
    violations.extend(cross);
    let small: Vec<Violation> = regions
        .masses
        .iter()
        .enumerate()
        .filter(|(_, m)| !(**m > MIN_REGION_MASS))
        .map(|(i, m)| Violation::SmallMass { i, mass: *m })
        .collect();
    let positive_masses = small.is_empty();
    violations.extend(small);
    NestedReport { monotone, no_crossings, positive_masses, violations }
}

/// Strict monotonicity of `t`, no pair of lines crossing in the closed
/// square, and every region carrying mass.
pub fn validate_nested(instance: &ScreeningInstance, bp: &Breakpoints) -> NestedReport {
    let regions = match regions_from_breakpoints(instance, bp, false) {
        Ok(r) => r,
        Err(_) => choice_regions(instance, &prices_from_breakpoints(&instance.grid, bp)),
    };
    report(instance, bp, &regions)
}
