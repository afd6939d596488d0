//! Sufficient conditions for nestedness, the premium condition, the
//! market-size rule and the uniqueness test.

use super::ScreeningInstance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct H1Report {
    pub pass: bool,
    /// `(k, i, j)` attaining the smallest margin.
    pub worst_triple: Option<(usize, usize, usize)>,
    /// `min (c_j - c_i)/(F_j - F_i) - (c_i - c_k)/(F_i - F_k)` over `k < i < j`.
    pub margin: f64,
}

/// "More convex than": cost increments per unit of `F` increase strictly
/// along the grid, for every triple `k < i < j`.
pub fn check_h1(instance: &ScreeningInstance) -> H1Report {
    let g = &instance.grid;
    let n = g.n();
    let q = |a: usize, b: usize| (g.costs[b] - g.costs[a]) / (g.zs[b][1] - g.zs[a][1]);
    let mut worst: Option<(usize, usize, usize)> = None;
    let mut margin = f64::INFINITY;
    // min over j of q(i, j) minus max over k of q(k, i) is the worst triple
    // through middle index i.
    for i in 1..n {
        let (k, qk) = (0..i)
            .map(|k| (k, q(k, i)))
            .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        let (j, qj) = (i + 1..=n)
            .map(|j| (j, q(i, j)))
            .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        let m = qj - qk;
        if m < margin || m.is_nan() {
            margin = m;
            worst = Some((k, i, j));
        }
    }
    H1Report { pass: worst.is_some() && margin > 0.0, worst_triple: worst, margin }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisRow {
    pub i: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Per-interior-index report. Endpoints `0` and `N` are skipped because the
/// conditions reference both neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorReport {
    pub rows: Vec<HypothesisRow>,
    pub skipped: Vec<usize>,
    pub pass: bool,
}

impl InteriorReport {
    fn from_rows(rows: Vec<HypothesisRow>, n: usize) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self { rows, skipped: vec![0, n], pass }
    }

    pub fn failing(&self) -> impl Iterator<Item = &HypothesisRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Smallest `lhs - rhs` for "lhs > rhs" conditions.
    pub fn worst_margin(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.lhs - r.rhs).reduce(f64::min)
    }
}

fn chord_slope_gap(instance: &ScreeningInstance, i: usize) -> Result<f64> {
    let s = &instance.grid.chord_slopes;
    let d = s[i] - s[i - 1];
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InvalidGrid(format!("chord slopes {} and {} coincide", i - 1, i)));
    }
    Ok(d)
}

/// Local convexity gap of `c` versus `F` against the density bound.
pub fn check_h2(instance: &ScreeningInstance) -> Result<InteriorReport> {
    let g = &instance.grid;
    let b = instance.density.bounds();
    let n = g.n();
    let mut rows = Vec::new();
    for i in 1..n {
        let dc_prev = g.dc(i - 1) / g.dy(i - 1);
        let dc_next = g.dc(i) / g.dy(i);
        let lhs = (dc_next - dc_prev) / chord_slope_gap(instance, i)?;
        let rhs = (1.5 * b.f_sup + 0.5 * b.fx1_sup * (1.0 + g.chord_slopes[i] + dc_next)) / b.alpha;
        rows.push(HypothesisRow { i, lhs, rhs, pass: lhs > rhs });
    }
    Ok(InteriorReport::from_rows(rows, n))
}

/// Local bound on the chord slope of `F`.
pub fn check_h3(instance: &ScreeningInstance) -> Result<InteriorReport> {
    let g = &instance.grid;
    let b = instance.density.bounds();
    let n = g.n();
    let mut rows = Vec::new();
    for i in 1..n {
        chord_slope_gap(instance, i)?;
        let s_prev = g.chord_slopes[i - 1];
        let s_next = g.chord_slopes[i];
        if s_prev <= 0.0 {
            return Err(Error::InvalidGrid(format!("chord slope {} is not positive", i - 1)));
        }
        let cf_prev = g.dc(i - 1) / g.df(i - 1);
        let cf_next = g.dc(i) / g.df(i);
        let denom = b.f_sup * (2.0 + s_next / s_prev) + b.fx2_sup * (1.0 + 2.0 / s_prev + cf_next);
        let factor = 1.0 + (cf_next - cf_prev) / (1.0 / s_prev - 1.0 / s_next);
        let rhs = 2.0 * b.alpha / denom * factor;
        rows.push(HypothesisRow { i, lhs: s_next, rhs, pass: s_next < rhs });
    }
    Ok(InteriorReport::from_rows(rows, n))
}

/// `c(z_1) > F(y_1)`.
pub fn check_premium(instance: &ScreeningInstance) -> bool {
    let g = &instance.grid;
    g.costs[1] > g.zs[1][1]
}

/// `1 + (F_i - F_{i-1})/(y_i - y_{i-1}) - (c_i - c_{i-1})/(y_i - y_{i-1})` for
/// `i = 1..=N`; positive exactly when the top type prefers good `i` to good
/// `i - 1` at cost.
pub fn exclusion_margins(instance: &ScreeningInstance) -> Vec<f64> {
    let g = &instance.grid;
    (1..=g.n())
        .map(|i| 1.0 + g.chord_slopes[i - 1] - g.dc(i - 1) / g.dy(i - 1))
        .collect()
}

/// Largest `i` whose exclusion margin is positive (0 when none is). The
/// goods with positive margin must be `1..=M`; a positive margin after a
/// non-positive one is rejected.
pub fn market_size(instance: &ScreeningInstance) -> Result<usize> {
    let e = exclusion_margins(instance);
    let m = e.iter().take_while(|v| **v > 0.0).count();
    if let Some(k) = e[m..].iter().position(|v| *v > 0.0) {
        let index = m + k + 1;
        return Err(Error::NonMonotoneExclusion { index, prev: e[index - 2], next: e[index - 1] });
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub pass: bool,
    /// `||f_x1|| <= alpha`.
    pub gradient_condition: bool,
    /// Right-edge inequality at every sample.
    pub edge_condition: bool,
    /// Smallest `lhs - ||f_x1x1||` along the right edge.
    pub edge_margin: f64,
    pub worst_x2: f64,
}

const EDGE_SAMPLES: usize = 1000;

/// Sufficient conditions for a unique maximiser of the breakpoint profit.
pub fn check_uniqueness(instance: &ScreeningInstance) -> Result<UniquenessReport> {
    let b = instance.density.bounds();
    let fx1x1 = b
        .fx1x1_sup
        .ok_or_else(|| Error::InvalidModel("uniqueness check needs fx1x1_sup".into()))?;
    let slope = instance.curve.f_prime(instance.curve.y_max());
    if slope == 0.0 || !slope.is_finite() {
        return Err(Error::InvalidModel(format!("F'(y_max) must be positive, got {slope}")));
    }
    let density = instance.density.density();
    let mut edge_margin = f64::INFINITY;
    let mut worst_x2 = 0.0;
    for k in 0..EDGE_SAMPLES {
        let x2 = k as f64 / (EDGE_SAMPLES - 1) as f64;
        let [g1, g2] = density.gradient(1.0, x2);
        let lhs = g2 / (slope * slope) + g1 / slope;
        let m = lhs - fx1x1;
        if m < edge_margin {
            edge_margin = m;
            worst_x2 = x2;
        }
    }
    let gradient_condition = b.fx1_sup <= b.alpha;
    let edge_condition = edge_margin >= 0.0;
    Ok(UniquenessReport {
        pass: gradient_condition && edge_condition,
        gradient_condition,
        edge_condition,
        edge_margin,
        worst_x2,
    })
}
