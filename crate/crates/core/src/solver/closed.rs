use super::{prepare, Breakpoints, GapDiagnostic, Method, SolutionBundle};
use crate::error::{Error, Result};
use crate::model::ScreeningInstance;

/// Stationary point of the uniform-density gap profile for chord slope `s`
/// and cost slope `dc = dc/dy`. The first branch assumes the line leaves
/// through the bottom edge (`t + s < 1`), the second through the right edge.
pub fn closed_form_t(s: f64, dc: f64) -> f64 {
    let t = 0.5 - 0.75 * s + 0.5 * dc;
    if t + s < 1.0 {
        t
    } else {
        1.0 / 3.0 - 2.0 / 3.0 * (s - dc)
    }
}

/// Closed-form breakpoints for the uniform density. Non-nested outcomes come
/// back as diagnostic bundles.
pub fn solve_uniform(instance: &ScreeningInstance) -> Result<SolutionBundle> {
    if !instance.density.is_uniform() {
        return Err(Error::WrongMethod("closed form requires the uniform density".into()));
    }
    let m = prepare(instance)?;
    let g = &instance.grid;
    let mut gaps = Vec::with_capacity(m);
    let ts = (0..m)
        .map(|i| {
            let raw = closed_form_t(g.chord_slopes[i], g.dc(i) / g.dy(i));
            let t = raw.clamp(0.0, 1.0);
            gaps.push(GapDiagnostic { boundary: t == 0.0 || t == 1.0, roots: 1, clamped: t != raw });
            t
        })
        .collect();
    SolutionBundle::assemble(instance, Breakpoints::new(ts)?, Method::ClosedForm, gaps)
}
