use super::{ConvexRegion, IndiffLine};
use crate::model::Density;
use crate::quadrature::{GaussLegendre, TriangleRule};

/// Fixed-order quadrature settings for region masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MassRule {
    /// Polynomial degree integrated exactly on each triangle.
    pub degree: u32,
    /// Midpoint subdivision levels (4^refine sub-triangles) used for
    /// densities that are not polynomials of degree at most `degree`.
    pub refine: u32,
    /// Gauss-Legendre nodes for segment integrals.
    pub segment_nodes: usize,
}

impl Default for MassRule {
    fn default() -> Self {
        Self { degree: 7, refine: 3, segment_nodes: 32 }
    }
}

impl MassRule {
    fn levels_for(&self, density: &dyn Density) -> u32 {
        match density.polynomial_degree() {
            Some(d) if d <= self.degree => 0,
            _ => self.refine,
        }
    }
}

/// Integral of the density over a convex polygon: fan triangulation from the
/// vertex mean, then a symmetric triangle rule on each (sub)triangle.
pub fn polygon_mass(region: &ConvexRegion, density: &dyn Density, rule: &MassRule) -> f64 {
    let Some(g) = region.vertex_mean() else {
        return 0.0;
    };
    if density.is_uniform() {
        return region.area();
    }
    let tri = TriangleRule::exact_to(rule.degree);
    let levels = rule.levels_for(density);
    let v = region.vertices();
    let f = |x1: f64, x2: f64| density.value(x1, x2);
    (0..v.len())
        .map(|k| subdivided(&tri, g.to_array(), v[k].to_array(), v[(k + 1) % v.len()].to_array(), levels, &f))
        .sum()
}

fn subdivided<F: Fn(f64, f64) -> f64>(tri: &TriangleRule, a: [f64; 2], b: [f64; 2], c: [f64; 2], level: u32, f: &F) -> f64 {
    if level == 0 {
        return tri.integrate(a, b, c, f);
    }
    let mid = |p: [f64; 2], q: [f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    subdivided(tri, a, ab, ca, level - 1, f)
        + subdivided(tri, ab, b, bc, level - 1, f)
        + subdivided(tri, ca, bc, c, level - 1, f)
        + subdivided(tri, ab, bc, ca, level - 1, f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentIntegral {
    pub value: f64,
    /// False when the line misses the square (value is then 0).
    pub intersects: bool,
    /// Lower end `r` of the `x2` range; positive when the segment leaves
    /// through the right edge.
    pub x2_low: f64,
}

/// `int_r^1 f(t + (1 - x2) s, x2) dx2`: the density integral along the part of
/// the line inside the square, parametrised by `x2`.
pub fn segment_density_integral(line: &IndiffLine, density: &dyn Density, rule: &MassRule) -> SegmentIntegral {
    let t = line.anchor_t;
    let s = line.chord();
    if !(0.0..=1.0).contains(&t) {
        return SegmentIntegral { value: 0.0, intersects: false, x2_low: 1.0 };
    }
    let r = line.exit_x2();
    if r >= 1.0 {
        return SegmentIntegral { value: 0.0, intersects: true, x2_low: 1.0 };
    }
    let value = if density.is_uniform() {
        1.0 - r
    } else {
        GaussLegendre::get(rule.segment_nodes).integrate(r, 1.0, |x2| {
            density.value((t + (1.0 - x2) * s).min(1.0), x2)
        })
    };
    SegmentIntegral { value, intersects: true, x2_low: r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{clip_halfplane, Side};
    use crate::model::{Affine, FnDensity, TruncatedGaussian, Uniform};
    use std::sync::Arc;

    fn line(t: f64, slope: f64) -> IndiffLine {
        IndiffLine::new(t, 0, -1.0 / slope)
    }

    #[test]
    fn uniform_masses() {
        let rule = MassRule::default();
        assert_eq!(polygon_mass(&ConvexRegion::unit_square(), &Uniform, &rule), 1.0);
        let tri = clip_halfplane(&ConvexRegion::unit_square(), &line(0.0, -1.0), Side::Below);
        assert!((polygon_mass(&tri, &Uniform, &rule) - 0.5).abs() < 1e-15);
        assert_eq!(polygon_mass(&ConvexRegion::empty(), &Uniform, &rule), 0.0);
    }

    #[test]
    fn pentagon_linear_density_against_midpoint_rule() {
        let pent = clip_halfplane(&ConvexRegion::unit_square(), &line(0.5, -0.5), Side::Below);
        let f = FnDensity { value: Arc::new(|x1, _| 2.0 * x1), gradient: None, d2_x1: None };
        let q = polygon_mass(&pent, &f, &MassRule::default());
        let n = 1000;
        let h = 1.0 / n as f64;
        let mut reference = 0.0;
        for a in 0..n {
            for b in 0..n {
                let (x1, x2) = ((a as f64 + 0.5) * h, (b as f64 + 0.5) * h);
                if x2 <= 1.0 - 0.5 * (x1 - 0.5) {
                    reference += 2.0 * x1 * h * h;
                }
            }
        }
        assert!((q - reference).abs() < 1e-6, "{q} vs {reference}");
        // closed form: 1 - int over the cut triangle of 2 x1
        let exact = 1.0 - 2.0 * 0.0625 * (0.5 + 1.0 + 1.0) / 3.0;
        assert!((q - exact).abs() < 1e-14);
    }

    #[test]
    fn affine_is_exact_without_refinement() {
        let a = Affine::normalized(1.0, 0.5, 0.25).unwrap();
        let rule = MassRule { refine: 0, ..Default::default() };
        assert!((polygon_mass(&ConvexRegion::unit_square(), &a, &rule) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_square_mass_is_one() {
        let g = TruncatedGaussian::new([0.5, 0.5], 0.25).unwrap();
        let m = polygon_mass(&ConvexRegion::unit_square(), &g, &MassRule::default());
        assert!((m - 1.0).abs() < 1e-10, "{m}");
    }

    #[test]
    fn uniform_segment_is_x2_extent() {
        let rule = MassRule::default();
        let full = segment_density_integral(&line(0.0, -2.0), &Uniform, &rule);
        assert_eq!(full.value, 1.0);
        let part = segment_density_integral(&line(0.5, -1.0), &Uniform, &rule);
        assert!((part.value - 0.5).abs() < 1e-15);
        assert!((part.x2_low - 0.5).abs() < 1e-15);
        let corner = segment_density_integral(&line(1.0, -1.0), &Uniform, &rule);
        assert_eq!(corner.value, 0.0);
        assert!(corner.intersects);
        assert!(!segment_density_integral(&line(1.5, -1.0), &Uniform, &rule).intersects);
    }

    #[test]
    fn gaussian_segment_against_trapezoid() {
        let g = TruncatedGaussian::new([0.5, 0.5], 0.25).unwrap();
        let l = line(0.3, -1.3);
        let r = l.exit_x2();
        let q = segment_density_integral(&l, &g, &MassRule::default()).value;
        let n = 100_000;
        let h = (1.0 - r) / n as f64;
        let f = |x2: f64| g.value(0.3 + (1.0 - x2) * l.chord(), x2);
        let mut trap = 0.5 * (f(r) + f(1.0));
        for k in 1..n {
            trap += f(r + k as f64 * h);
        }
        trap *= h;
        assert!((q - trap).abs() < 1e-8, "{q} vs {trap}");
    }
}
