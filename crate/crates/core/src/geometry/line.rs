use super::{Point, BOUNDARY_TOL};
use crate::model::ProductGrid;

/// Closed half-plane `{x : normal . x <= offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: [f64; 2],
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(normal: [f64; 2], offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed distance scaled by `|normal|`; negative inside.
    pub fn eval(&self, p: Point) -> f64 {
        p.dot(self.normal) - self.offset
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.eval(p) <= tol * norm(self.normal)
    }

    pub fn complement(&self) -> Self {
        Self { normal: [-self.normal[0], -self.normal[1]], offset: -self.offset }
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Toward the origin: the lower good of the pair.
    Below,
    Above,
}

/// Indifference line between goods `seg_index` and `seg_index + 1`:
/// `x2 = slope (x1 - anchor_t) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndiffLine {
    pub anchor_t: f64,
    pub seg_index: usize,
    pub slope: f64,
    chord: f64,
}

impl IndiffLine {
    /// Line through `(t, 1)` with the given chord slope `s = dF/dy > 0`,
    /// so that its own slope is `-1/s`.
    pub fn new(anchor_t: f64, seg_index: usize, chord: f64) -> Self {
        debug_assert!(chord > 0.0 && chord.is_finite(), "chord slope must be positive");
        Self { anchor_t, seg_index, slope: -1.0 / chord, chord }
    }

    pub fn for_gap(grid: &ProductGrid, i: usize, t: f64) -> Self {
        Self::new(t, i, grid.chord_slopes[i])
    }

    /// Chord slope of the curve on this gap.
    pub fn chord(&self) -> f64 {
        self.chord
    }

    /// `x1 + s x2 <= t + s` is the side toward the origin.
    pub fn half_plane(&self, side: Side) -> HalfPlane {
        let below = HalfPlane::new([1.0, self.chord], self.anchor_t + self.chord);
        match side {
            Side::Below => below,
            Side::Above => below.complement(),
        }
    }

    pub fn x2_at(&self, x1: f64) -> f64 {
        self.slope * (x1 - self.anchor_t) + 1.0
    }

    /// `x2` where the line leaves the square through the right edge, or 0
    /// when it reaches the bottom edge first.
    pub fn exit_x2(&self) -> f64 {
        (1.0 - (1.0 - self.anchor_t) / self.chord).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub crosses: bool,
    pub point: Option<Point>,
    pub parallel: bool,
}

/// Intersection of two half-plane boundaries, classified against the closed
/// square.
pub fn boundaries_cross(a: &HalfPlane, b: &HalfPlane) -> Crossing {
    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
    let scale = norm(a.normal) * norm(b.normal);
    if det.abs() <= 1e-15 * scale {
        return Crossing { crosses: false, point: None, parallel: true };
    }
    let x1 = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
    let x2 = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
    let p = Point::new(x1, x2);
    Crossing { crosses: p.in_closed_square(BOUNDARY_TOL), point: Some(p), parallel: false }
}

pub fn lines_cross_in_closed_square(a: &IndiffLine, b: &IndiffLine) -> Crossing {
    boundaries_cross(&a.half_plane(Side::Below), &b.half_plane(Side::Below))
}
