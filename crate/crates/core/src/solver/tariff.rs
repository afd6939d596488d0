use super::{Breakpoints, RegionSet, SolutionBundle, Tariff};
use crate::error::{Error, Result};
use crate::geometry::{
    clip_halfplane, lines_cross_in_closed_square, polygon_mass, ConvexRegion, HalfPlane, IndiffLine, Point, Side,
};
use crate::model::{ProductGrid, ScreeningInstance};

/// `v_i = sum_{k<i} (t_k dy_k + dF_k)`.
pub fn prices_from_breakpoints(grid: &ProductGrid, bp: &Breakpoints) -> Tariff {
    let mut vs = Vec::with_capacity(bp.m() + 1);
    vs.push(0.0);
    let mut v = 0.0;
    for (k, t) in bp.ts().iter().enumerate() {
        v += t * grid.dy(k) + grid.df(k);
        vs.push(v);
    }
    Tariff { vs }
}

/// Regions between consecutive indifference lines. Unless `permissive`,
/// crossing lines are an error; with it the slabs are clipped as if the
/// lines were ordered, which can overlap or leave gaps.
pub fn regions_from_breakpoints(instance: &ScreeningInstance, bp: &Breakpoints, permissive: bool) -> Result<RegionSet> {
    let lines = bp.lines(instance);
    if !permissive {
        for (i, a) in lines.iter().enumerate() {
            for (j, b) in lines.iter().enumerate().skip(i + 1) {
                if lines_cross_in_closed_square(a, b).crosses {
                    return Err(Error::NonNested { first: i, second: j });
                }
            }
        }
    }
    let square = ConvexRegion::unit_square();
    let m = lines.len();
    let regions: Vec<ConvexRegion> = (0..=m)
        .map(|i| {
            let mut r = square.clone();
            if i > 0 {
                r = clip_halfplane(&r, &lines[i - 1], Side::Above);
            }
            if i < m {
                r = clip_halfplane(&r, &lines[i], Side::Below);
            }
            r
        })
        .collect();
    Ok(with_masses(instance, regions))
}

fn with_masses(instance: &ScreeningInstance, regions: Vec<ConvexRegion>) -> RegionSet {
    let density = instance.density.density();
    let masses = regions.iter().map(|r| polygon_mass(r, density, &instance.rule)).collect();
    RegionSet { regions, masses }
}

/// Exact argmax regions `{x : x.z_j - v_j >= x.z_k - v_k for all k}` of a
/// tariff over goods `0..=M`, whether or not the tariff is nested.
pub fn choice_regions(instance: &ScreeningInstance, tariff: &Tariff) -> RegionSet {
    let zs = &instance.grid.zs;
    let vs = &tariff.vs;
    let regions = (0..vs.len())
        .map(|j| {
            (0..vs.len()).filter(|&k| k != j).fold(ConvexRegion::unit_square(), |r, k| {
                let h = HalfPlane::new([zs[k][0] - zs[j][0], zs[k][1] - zs[j][1]], vs[k] - vs[j]);
                r.clip(&h)
            })
        })
        .collect();
    with_masses(instance, regions)
}

/// `sum_{i>=1} (v_i - c_i) mass_i`.
pub fn profit_of_regions(instance: &ScreeningInstance, tariff: &Tariff, regions: &RegionSet) -> f64 {
    let costs = &instance.grid.costs;
    (1..tariff.vs.len()).map(|i| (tariff.vs[i] - costs[i]) * regions.masses[i]).sum()
}

/// Profit of a nested breakpoint vector.
pub fn profit(instance: &ScreeningInstance, bp: &Breakpoints) -> Result<f64> {
    let tariff = prices_from_breakpoints(&instance.grid, bp);
    let regions = regions_from_breakpoints(instance, bp, false)?;
    Ok(profit_of_regions(instance, &tariff, &regions))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoff {
    pub u: f64,
    /// Argmax good, ties to the lowest index.
    pub chosen: usize,
    /// Good whose region contains `x` by the piecewise formula; only for
    /// nested bundles.
    pub region: Option<usize>,
    /// `x.z_i - v_i` for that region.
    pub region_u: Option<f64>,
}

/// Consumer utility `max_j (x.z_j - v_j)` and choice.
pub fn payoff(instance: &ScreeningInstance, bundle: &SolutionBundle, x: Point) -> Payoff {
    let zs = &instance.grid.zs;
    let vs = &bundle.tariff.vs;
    let (chosen, u) = vs
        .iter()
        .enumerate()
        .map(|(j, v)| (j, x.dot(zs[j]) - v))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let (region, region_u) = if bundle.is_nested() {
        let lines: Vec<IndiffLine> = bundle.breakpoints.lines(instance);
        let i = lines.iter().filter(|l| !l.half_plane(Side::Below).contains(x, 0.0)).count();
        (Some(i), Some(x.dot(zs[i]) - vs[i]))
    } else {
        (None, None)
    };
    Payoff { u, chosen, region, region_u }
}
