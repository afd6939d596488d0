use super::{lines_cross_in_closed_square, HalfPlane, IndiffLine, Point, Side, BOUNDARY_TOL, MIN_AREA};
use crate::error::{Error, Result};
use crate::model::ProductGrid;

/// Convex polygon inside the closed unit square, vertices counterclockwise.
/// The empty polygon has no vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexRegion {
    vertices: Vec<Point>,
}

impl ConvexRegion {
    pub fn unit_square() -> Self {
        Self {
            vertices: vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)],
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates convexity, orientation and containment in the square.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|p| !p.in_closed_square(BOUNDARY_TOL)) {
            return Err(Error::InvalidModel("polygon vertex outside the unit square".into()));
        }
        let n = vertices.len();
        for k in 0..n {
            let (a, b, c) = (vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]);
            if cross(a, b, c) < -1e-12 {
                return Err(Error::InvalidModel("polygon is not convex and counterclockwise".into()));
            }
        }
        Ok(Self::normalized(vertices))
    }

    fn normalized(mut vertices: Vec<Point>) -> Self {
        vertices.dedup_by(|a, b| (a.x1 - b.x1).abs() < 1e-15 && (a.x2 - b.x2).abs() < 1e-15);
        while vertices.len() > 1 {
            let (f, l) = (vertices[0], vertices[vertices.len() - 1]);
            if (f.x1 - l.x1).abs() < 1e-15 && (f.x2 - l.x2).abs() < 1e-15 {
                vertices.pop();
            } else {
                break;
            }
        }
        let region = Self { vertices };
        if region.vertices.len() < 3 || region.area() < MIN_AREA {
            Self::empty()
        } else {
            region
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|k| {
                let (a, b) = (self.vertices[k], self.vertices[(k + 1) % n]);
                a.x1 * b.x2 - b.x1 * a.x2
            })
            .sum();
        0.5 * twice
    }

    /// Vertex average; an interior point of any non-empty convex polygon.
    pub fn vertex_mean(&self) -> Option<Point> {
        if self.is_empty() {
            return None;
        }
        let n = self.vertices.len() as f64;
        let (s1, s2) = self.vertices.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.x1, acc.1 + p.x2));
        Some(Point::new(s1 / n, s2 / n))
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let n = self.vertices.len();
        n > 0 && (0..n).all(|k| cross(self.vertices[k], self.vertices[(k + 1) % n], p) >= -tol)
    }

    /// Intersection with a closed half-plane.
    pub fn clip(&self, h: &HalfPlane) -> Self {
        let n = self.vertices.len();
        if n == 0 {
            return Self::empty();
        }
        let scale = h.normal[0].hypot(h.normal[1]);
        let d: Vec<f64> = self.vertices.iter().map(|p| h.eval(*p) / scale).collect();
        if d.iter().all(|v| *v <= BOUNDARY_TOL) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..n {
            let prev = (k + n - 1) % n;
            let (dp, dc) = (d[prev], d[k]);
            let (p, c) = (self.vertices[prev], self.vertices[k]);
            if (dp < -BOUNDARY_TOL && dc > BOUNDARY_TOL) || (dp > BOUNDARY_TOL && dc < -BOUNDARY_TOL) {
                let s = dp / (dp - dc);
                out.push(Point::new(p.x1 + s * (c.x1 - p.x1), p.x2 + s * (c.x2 - p.x2)));
            }
            if dc <= BOUNDARY_TOL {
                out.push(c);
            }
        }
        Self::normalized(out)
    }
}

fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x1 - a.x1) * (c.x2 - a.x2) - (b.x2 - a.x2) * (c.x1 - a.x1)
}

pub fn clip_halfplane(region: &ConvexRegion, line: &IndiffLine, side: Side) -> ConvexRegion {
    region.clip(&line.half_plane(side))
}

/// Part of the square above line `(i_low, t_low)` and below line
/// `(i_high, t_high)`.
pub fn slab(grid: &ProductGrid, t_low: f64, i_low: usize, t_high: f64, i_high: usize) -> Result<ConvexRegion> {
    let low = IndiffLine::for_gap(grid, i_low, t_low);
    let high = IndiffLine::for_gap(grid, i_high, t_high);
    if lines_cross_in_closed_square(&low, &high).crosses {
        return Err(Error::NonNested { first: i_low, second: i_high });
    }
    let square = ConvexRegion::unit_square();
    Ok(clip_halfplane(&clip_halfplane(&square, &low, Side::Above), &high, Side::Below))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(t: f64, slope: f64) -> IndiffLine {
        IndiffLine::new(t, 0, -1.0 / slope)
    }

    #[test]
    fn corner_line_keeps_square() {
        let sq = ConvexRegion::unit_square();
        assert_eq!(clip_halfplane(&sq, &line(1.0, -1.0), Side::Below), sq);
    }

    #[test]
    fn above_diagonal_keeps_upper_triangle() {
        let r = clip_halfplane(&ConvexRegion::unit_square(), &line(0.0, -1.0), Side::Above);
        assert!((r.area() - 0.5).abs() < 1e-15);
        let r = clip_halfplane(&ConvexRegion::unit_square(), &line(1.0, -1.0), Side::Above);
        assert!(r.is_empty());
    }

    #[test]
    fn pentagon_area_by_shoelace() {
        // x2 = 1 - (x1 - 0.5)/2 exits the right edge at 0.75
        let cut = clip_halfplane(&ConvexRegion::unit_square(), &line(0.5, -0.5), Side::Below);
        assert_eq!(cut.vertices().len(), 5);
        assert!((cut.area() - 0.9375).abs() < 1e-15);
        // x2 = -2 (x1 - 0.5) + 1 reaches the bottom corner (1, 0)
        let r = clip_halfplane(&ConvexRegion::unit_square(), &line(0.5, -2.0), Side::Below);
        assert!((r.area() - 0.75).abs() < 1e-15);
        assert_eq!(r.vertices().len(), 4);
    }

    #[test]
    fn clip_is_idempotent() {
        let h = line(0.3, -0.7).half_plane(Side::Below);
        let once = ConvexRegion::unit_square().clip(&h);
        let twice = once.clip(&h);
        assert_eq!(once.vertices().len(), twice.vertices().len());
        for (a, b) in once.vertices().iter().zip(twice.vertices()) {
            assert!((a.x1 - b.x1).abs() < 1e-12 && (a.x2 - b.x2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_convex() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.2, 0.2), Point::new(0.0, 1.0)];
        assert!(ConvexRegion::new(pts).is_err());
        assert!(ConvexRegion::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 1.0)]).is_err());
    }

    #[test]
    fn slab_between_lines() {
        let grid = crate::model::ProductGrid::from_ys(
            &crate::model::QualityCurve::linear(1.0, 1.0).unwrap(),
            &crate::model::CostModel::zero(),
            vec![0.0, 0.5, 1.0],
        )
        .unwrap();
        let s = slab(&grid, 0.2, 0, 0.6, 1).unwrap();
        // parallel diagonals x1 + x2 = 1.2 and 1.6 inside the square
        let expected = 0.5 * 0.8 * 0.8 - 0.5 * 0.4 * 0.4;
        assert!((s.area() - expected).abs() < 1e-14);
    }
}
