//! Convex polygons in the unit square, indifference lines and the density
//! integrals over both.

mod integrate;
mod line;
mod polygon;

pub use integrate::{polygon_mass, segment_density_integral, MassRule, SegmentIntegral};
pub use line::{boundaries_cross, lines_cross_in_closed_square, Crossing, HalfPlane, IndiffLine, Side};
pub use polygon::{clip_halfplane, slab, ConvexRegion};

/// Absolute tolerance for comparisons against the square boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Polygons with smaller area are treated as empty.
pub const MIN_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, z: [f64; 2]) -> f64 {
        self.x1 * z[0] + self.x2 * z[1]
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn in_closed_square(self, tol: f64) -> bool {
        (-tol..=1.0 + tol).contains(&self.x1) && (-tol..=1.0 + tol).contains(&self.x2)
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Self::new(p[0], p[1])
    }
}
