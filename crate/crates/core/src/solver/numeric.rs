use rayon::prelude::*;

use super::{prepare, Breakpoints, GapDiagnostic, Method, SolutionBundle};
use crate::error::Result;
use crate::geometry::{clip_halfplane, polygon_mass, segment_density_integral, ConvexRegion, IndiffLine, Side};
use crate::model::ScreeningInstance;
use crate::roots::bisect;

pub const SCAN_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub scan_points: usize,
    pub xtol: f64,
    /// Shift of the interior scan nodes as a fraction of the scan step, in
    /// `[0, 1)`. The endpoints 0 and 1 are always scanned.
    pub scan_offset: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { scan_points: SCAN_POINTS, xtol: 1e-10, scan_offset: 0.0 }
    }
}

fn upper_region(instance: &ScreeningInstance, line: &IndiffLine) -> f64 {
    let d = clip_halfplane(&ConvexRegion::unit_square(), line, Side::Above);
    polygon_mass(&d, instance.density.density(), &instance.rule)
}

/// Derivative of the profit in `t_i`. Depends on `t_i` alone:
/// `dy mu(D_i) + (dc - t dy - dF) int_{l_i} f`.
pub fn dprofit_dti(instance: &ScreeningInstance, i: usize, t: f64) -> f64 {
    let g = &instance.grid;
    let line = IndiffLine::for_gap(g, i, t);
    let mass = upper_region(instance, &line);
    let seg = segment_density_integral(&line, instance.density.density(), &instance.rule).value;
    g.dy(i) * mass + seg * (g.dc(i) - t * g.dy(i) - g.df(i))
}

/// Profit contributed by gap `i`: `mu(D_i(t)) (t dy + dF - dc)`. The total
/// profit of nested breakpoints is the sum of these profiles.
pub fn gap_profile(instance: &ScreeningInstance, i: usize, t: f64) -> f64 {
    let g = &instance.grid;
    let line = IndiffLine::for_gap(g, i, t);
    upper_region(instance, &line) * (t * g.dy(i) + g.df(i) - g.dc(i))
}

fn scan_nodes(opts: &NumericOptions) -> Vec<f64> {
    let n = opts.scan_points.max(2);
    let h = 1.0 / (n - 1) as f64;
    let mut nodes = vec![0.0];
    nodes.extend((0..n).map(|k| (k as f64 + opts.scan_offset) * h).filter(|t| *t > 0.0 && *t < 1.0));
    nodes.push(1.0);
    nodes
}

fn solve_gap(instance: &ScreeningInstance, i: usize, nodes: &[f64], opts: &NumericOptions) -> Result<(f64, GapDiagnostic)> {
    let d: Vec<f64> = nodes.iter().map(|t| dprofit_dti(instance, i, *t)).collect();
    let mut candidates = vec![0.0];
    let mut roots = 0;
    for k in 0..nodes.len() - 1 {
        let (a, b) = (nodes[k], nodes[k + 1]);
        if d[k] == 0.0 && k > 0 {
            candidates.push(a);
            roots += 1;
        } else if d[k] * d[k + 1] < 0.0 {
            candidates.push(bisect(|t| dprofit_dti(instance, i, t), a, b, opts.xtol)?);
            roots += 1;
        }
    }
    candidates.push(1.0);
    let (t, _) = candidates
        .iter()
        .map(|t| (*t, gap_profile(instance, i, *t)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok((t, GapDiagnostic { boundary: t == 0.0 || t == 1.0, roots, clamped: false }))
}

/// Maximises each gap profile independently: scan the derivative, bisect
/// every sign change, keep the best stationary point or endpoint (ties go to
/// the smaller `t`).
pub fn solve_numeric(instance: &ScreeningInstance, opts: &NumericOptions) -> Result<SolutionBundle> {
    let m = prepare(instance)?;
    let nodes = scan_nodes(opts);
    let solved: Vec<(f64, GapDiagnostic)> =
        (0..m).into_par_iter().map(|i| solve_gap(instance, i, &nodes, opts)).collect::<Result<_>>()?;
    let (ts, gaps): (Vec<f64>, Vec<GapDiagnostic>) = solved.into_iter().unzip();
    SolutionBundle::assemble(instance, Breakpoints::new(ts)?, Method::Numeric, gaps)
}
