use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, GaussLegendre};

/// A probability density on the unit square.
pub trait Density: Send + Sync + fmt::Debug {
    fn value(&self, x1: f64, x2: f64) -> f64;

    /// `(f_x1, f_x2)`; defaults to central differences.
    fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        let h = 1e-6;
        [
            (self.value(x1 + h, x2) - self.value(x1 - h, x2)) / (2.0 * h),
            (self.value(x1, x2 + h) - self.value(x1, x2 - h)) / (2.0 * h),
        ]
    }

    /// `f_x1x1`; defaults to a second central difference.
    fn d2_x1(&self, x1: f64, x2: f64) -> f64 {
        let h = 1e-4;
        (self.value(x1 + h, x2) - 2.0 * self.value(x1, x2) + self.value(x1 - h, x2)) / (h * h)
    }

    /// Total degree when the density is a polynomial; lets the mass
    /// quadrature skip refinement.
    fn polynomial_degree(&self) -> Option<u32> {
        None
    }

    fn is_uniform(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Uniform;

impl Density for Uniform {
    fn value(&self, _: f64, _: f64) -> f64 {
        1.0
    }
    fn gradient(&self, _: f64, _: f64) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn d2_x1(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn polynomial_degree(&self) -> Option<u32> {
        Some(0)
    }
    fn is_uniform(&self) -> bool {
        true
    }
}

/// `f(x) = c0 + c1 x1 + c2 x2`, rescaled so that it integrates to one.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    c: [f64; 3],
}

impl Affine {
    pub fn normalized(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        let total = c0 + 0.5 * c1 + 0.5 * c2;
        if !(total > 0.0) {
            return Err(Error::InvalidModel("affine density has non-positive mass".into()));
        }
        let c = [c0 / total, c1 / total, c2 / total];
        let corners = [c[0], c[0] + c[1], c[0] + c[2], c[0] + c[1] + c[2]];
        if corners.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidModel("affine density must be positive on the square".into()));
        }
        Ok(Self { c })
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.c
    }
}

impl Density for Affine {
    fn value(&self, x1: f64, x2: f64) -> f64 {
        self.c[0] + self.c[1] * x1 + self.c[2] * x2
    }
    fn gradient(&self, _: f64, _: f64) -> [f64; 2] {
        [self.c[1], self.c[2]]
    }
    fn d2_x1(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn polynomial_degree(&self) -> Option<u32> {
        Some(1)
    }
}

/// Isotropic Gaussian restricted to the square and renormalised there.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedGaussian {
    mean: [f64; 2],
    sigma: f64,
    norm: f64,
}

impl TruncatedGaussian {
    pub fn new(mean: [f64; 2], sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidModel(format!("sigma must be positive, got {sigma}")));
        }
        let mass = |m: f64| adaptive(|u| gauss1(u, m, sigma), 0.0, 1.0, 1e-15);
        let norm = mass(mean[0]) * mass(mean[1]);
        Ok(Self { mean, sigma, norm })
    }

    pub fn mean(&self) -> [f64; 2] {
        self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Points of `[0, 1]` where the one-dimensional factor or its first two
    /// derivatives attain extreme absolute values.
    fn candidates(&self, m: f64) -> Vec<f64> {
        let s = self.sigma;
        let r3 = 3f64.sqrt();
        [0.0, 1.0, m, m - s, m + s, m - r3 * s, m + r3 * s]
            .into_iter()
            .filter(|u| (0.0..=1.0).contains(u))
            .collect()
    }

    fn extreme<F: Fn(f64) -> f64>(&self, m: f64, g: F, take_max: bool) -> f64 {
        let vals = self.candidates(m).into_iter().map(g);
        if take_max {
            vals.fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.fold(f64::INFINITY, f64::min)
        }
    }

    /// Exact bounds from the separable structure.
    pub fn bounds(&self) -> DensityBounds {
        let s2 = self.sigma * self.sigma;
        let [m1, m2] = self.mean;
        let g = |m: f64| move |u: f64| gauss1(u, m, self.sigma);
        let dg = |m: f64| move |u: f64| ((u - m) / s2 * gauss1(u, m, self.sigma)).abs();
        let ddg = |m: f64| move |u: f64| (((u - m).powi(2) / s2 - 1.0) / s2 * gauss1(u, m, self.sigma)).abs();
        let gmax1 = self.extreme(m1, g(m1), true);
        let gmax2 = self.extreme(m2, g(m2), true);
        let gmin1 = self.extreme(m1, g(m1), false);
        let gmin2 = self.extreme(m2, g(m2), false);
        DensityBounds {
            alpha: gmin1 * gmin2 / self.norm,
            f_sup: gmax1 * gmax2 / self.norm,
            fx1_sup: self.extreme(m1, dg(m1), true) * gmax2 / self.norm,
            fx2_sup: gmax1 * self.extreme(m2, dg(m2), true) / self.norm,
            fx1x1_sup: Some(self.extreme(m1, ddg(m1), true) * gmax2 / self.norm),
        }
    }
}

fn gauss1(u: f64, m: f64, sigma: f64) -> f64 {
    let d = (u - m) / sigma;
    (-0.5 * d * d).exp()
}

impl Density for TruncatedGaussian {
    fn value(&self, x1: f64, x2: f64) -> f64 {
        gauss1(x1, self.mean[0], self.sigma) * gauss1(x2, self.mean[1], self.sigma) / self.norm
    }
    fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        let f = self.value(x1, x2);
        let s2 = self.sigma * self.sigma;
        [-(x1 - self.mean[0]) / s2 * f, -(x2 - self.mean[1]) / s2 * f]
    }
    fn d2_x1(&self, x1: f64, x2: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d = x1 - self.mean[0];
        (d * d / s2 - 1.0) / s2 * self.value(x1, x2)
    }
}

pub type DensityFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type DensityGradFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Density backed by closures (expression densities, tests).
#[derive(Clone)]
pub struct FnDensity {
    pub value: DensityFn,
    pub gradient: Option<DensityGradFn>,
    pub d2_x1: Option<DensityFn>,
}

impl fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDensity").finish_non_exhaustive()
    }
}

impl Density for FnDensity {
    fn value(&self, x1: f64, x2: f64) -> f64 {
        (self.value)(x1, x2)
    }
    fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        match &self.gradient {
            Some(g) => g(x1, x2),
            None => {
                let h = 1e-6;
                [
                    (self.value(x1 + h, x2) - self.value(x1 - h, x2)) / (2.0 * h),
                    (self.value(x1, x2 + h) - self.value(x1, x2 - h)) / (2.0 * h),
                ]
            }
        }
    }
    fn d2_x1(&self, x1: f64, x2: f64) -> f64 {
        match &self.d2_x1 {
            Some(g) => g(x1, x2),
            None => {
                let h = 1e-4;
                (self.value(x1 + h, x2) - 2.0 * self.value(x1, x2) + self.value(x1 - h, x2)) / (h * h)
            }
        }
    }
}

/// Declared bounds `alpha <= f <= f_sup` and sup-norms of the derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBounds {
    pub alpha: f64,
    pub f_sup: f64,
    pub fx1_sup: f64,
    pub fx2_sup: f64,
    /// Only needed by the uniqueness check.
    pub fx1x1_sup: Option<f64>,
}

impl DensityBounds {
    pub fn uniform() -> Self {
        Self { alpha: 1.0, f_sup: 1.0, fx1_sup: 0.0, fx2_sup: 0.0, fx1x1_sup: Some(0.0) }
    }
}

/// A density together with its declared bounds.
#[derive(Debug, Clone)]
pub struct DensityModel {
    density: Arc<dyn Density>,
    bounds: DensityBounds,
}

/// Outcome of cross-checking declared bounds against samples.
#[derive(Debug, Clone, Default)]
pub struct BoundsAudit {
    pub min_sample: f64,
    pub max_sample: f64,
    pub max_fx1: f64,
    pub max_fx2: f64,
    pub integral: f64,
    pub contradictions: Vec<String>,
}

impl BoundsAudit {
    pub fn ok(&self) -> bool {
        self.contradictions.is_empty()
    }
}

impl DensityModel {
    pub fn new(density: Arc<dyn Density>, bounds: DensityBounds) -> Result<Self> {
        if !(bounds.alpha > 0.0) {
            return Err(Error::InvalidModel(format!("alpha must be positive, got {}", bounds.alpha)));
        }
        if bounds.f_sup < bounds.alpha {
            return Err(Error::InvalidModel("f_sup must be at least alpha".into()));
        }
        if bounds.fx1_sup < 0.0 || bounds.fx2_sup < 0.0 || bounds.fx1x1_sup.is_some_and(|v| v < 0.0) {
            return Err(Error::InvalidModel("sup-norms must be non-negative".into()));
        }
        Ok(Self { density, bounds })
    }

    pub fn uniform() -> Self {
        Self { density: Arc::new(Uniform), bounds: DensityBounds::uniform() }
    }

    pub fn gaussian(mean: [f64; 2], sigma: f64) -> Result<Self> {
        let g = TruncatedGaussian::new(mean, sigma)?;
        let bounds = g.bounds();
        Self::new(Arc::new(g), bounds)
    }

    /// Normalised affine density with exact bounds (`fx1x1 = 0`).
    pub fn affine(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        let a = Affine::normalized(c0, c1, c2)?;
        let c = a.coefficients();
        let corners = [c[0], c[0] + c[1], c[0] + c[2], c[0] + c[1] + c[2]];
        let bounds = DensityBounds {
            alpha: corners.iter().cloned().fold(f64::INFINITY, f64::min),
            f_sup: corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            fx1_sup: c[1].abs(),
            fx2_sup: c[2].abs(),
            fx1x1_sup: Some(0.0),
        };
        Self::new(Arc::new(a), bounds)
    }

    pub fn density(&self) -> &dyn Density {
        self.density.as_ref()
    }

    pub fn bounds(&self) -> &DensityBounds {
        &self.bounds
    }

    pub fn is_uniform(&self) -> bool {
        self.density.is_uniform()
    }

    pub fn f(&self, x1: f64, x2: f64) -> f64 {
        self.density.value(x1, x2)
    }

    /// Integral over the square by tensor Gauss-Legendre (64 x 64 nodes).
    pub fn total_mass(&self) -> f64 {
        let gl = GaussLegendre::get(64);
        gl.integrate(0.0, 1.0, |x1| gl.integrate(0.0, 1.0, |x2| self.f(x1, x2)))
    }

    /// Samples a 100 x 100 grid and reports every place where the declared
    /// bounds are contradicted, plus the unit-mass check.
    pub fn validate_bounds(&self) -> BoundsAudit {
        let n = 100;
        let mut audit = BoundsAudit {
            min_sample: f64::INFINITY,
            max_sample: f64::NEG_INFINITY,
            ..Default::default()
        };
        let tol = 1e-9;
        for a in 0..n {
            for b in 0..n {
                let x1 = a as f64 / (n - 1) as f64;
                let x2 = b as f64 / (n - 1) as f64;
                let v = self.f(x1, x2);
                let [g1, g2] = self.density.gradient(x1, x2);
                audit.min_sample = audit.min_sample.min(v);
                audit.max_sample = audit.max_sample.max(v);
                audit.max_fx1 = audit.max_fx1.max(g1.abs());
                audit.max_fx2 = audit.max_fx2.max(g2.abs());
            }
        }
        let b = &self.bounds;
        let scale = |v: f64| tol * v.abs().max(1.0);
        if audit.min_sample < b.alpha - scale(b.alpha) {
            audit.contradictions.push(format!("sampled minimum {} below alpha {}", audit.min_sample, b.alpha));
        }
        if audit.max_sample > b.f_sup + scale(b.f_sup) {
            audit.contradictions.push(format!("sampled maximum {} above f_sup {}", audit.max_sample, b.f_sup));
        }
        // derivative samples may come from finite differences
        let dtol = 1e-5;
        if audit.max_fx1 > b.fx1_sup * (1.0 + dtol) + dtol {
            audit.contradictions.push(format!("sampled |f_x1| {} above fx1_sup {}", audit.max_fx1, b.fx1_sup));
        }
        if audit.max_fx2 > b.fx2_sup * (1.0 + dtol) + dtol {
            audit.contradictions.push(format!("sampled |f_x2| {} above fx2_sup {}", audit.max_fx2, b.fx2_sup));
        }
        audit.integral = self.total_mass();
        if (audit.integral - 1.0).abs() > 1e-6 {
            audit.contradictions.push(format!("density integrates to {} instead of 1", audit.integral));
        }
        audit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_passes_audit() {
        let d = DensityModel::uniform();
        let audit = d.validate_bounds();
        assert!(audit.ok(), "{:?}", audit.contradictions);
        assert!((audit.integral - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_is_normalized_and_bounds_hold() {
        let d = DensityModel::gaussian([0.5, 0.5], 0.25).unwrap();
        let audit = d.validate_bounds();
        assert!(audit.ok(), "{:?}", audit.contradictions);
        assert!((audit.integral - 1.0).abs() < 1e-12);
        let b = d.bounds();
        // the peak sits on a sample point, the minimum at the corners
        assert!((audit.max_sample - b.f_sup).abs() < 1e-3 * b.f_sup);
        assert!((d.f(0.0, 0.0) - b.alpha).abs() < 1e-14);
    }

    #[test]
    fn gaussian_gradient_matches_differences() {
        let g = TruncatedGaussian::new([0.3, 0.6], 0.2).unwrap();
        let h = 1e-6;
        let (x1, x2) = (0.41, 0.27);
        let fd1 = (g.value(x1 + h, x2) - g.value(x1 - h, x2)) / (2.0 * h);
        let fd2 = (g.value(x1, x2 + h) - g.value(x1, x2 - h)) / (2.0 * h);
        let [a, b] = g.gradient(x1, x2);
        assert!((a - fd1).abs() < 1e-6 && (b - fd2).abs() < 1e-6);
        let h = 1e-4;
        let fdd = (g.value(x1 + h, x2) - 2.0 * g.value(x1, x2) + g.value(x1 - h, x2)) / (h * h);
        assert!((g.d2_x1(x1, x2) - fdd).abs() < 1e-5);
    }

    #[test]
    fn affine_bounds_are_closed_form() {
        // f = (1 + 0.5 x1) / 1.25
        let d = DensityModel::affine(1.0, 0.5, 0.0).unwrap();
        let b = d.bounds();
        assert!((b.alpha - 0.8).abs() < 1e-15);
        assert!((b.f_sup - 1.2).abs() < 1e-15);
        assert!((b.fx1_sup - 0.4).abs() < 1e-15);
        assert!(d.validate_bounds().ok());
    }

    #[test]
    fn audit_flags_false_bounds() {
        let bounds = DensityBounds { alpha: 1.5, f_sup: 2.0, fx1_sup: 0.0, fx2_sup: 0.0, fx1x1_sup: None };
        let d = DensityModel::new(Arc::new(Uniform), bounds).unwrap();
        assert!(!d.validate_bounds().ok());
    }

    #[test]
    fn bad_bounds_are_rejected() {
        let bounds = DensityBounds { alpha: 0.0, f_sup: 1.0, fx1_sup: 0.0, fx2_sup: 0.0, fx1x1_sup: None };
        assert!(DensityModel::new(Arc::new(Uniform), bounds).is_err());
    }
}
