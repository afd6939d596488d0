//! Quadrature tables: Gauss-Legendre on an interval, symmetric rules on a
//! triangle and an adaptive 1-D integrator.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared table for `n` nodes; tables are computed once per process.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(rule) = cache.read().expect("quadrature cache poisoned").get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(Self::compute(n));
        cache
            .write()
            .expect("quadrature cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Quadrature rule on a triangle in barycentric form; weights sum to one and
/// are scaled by the triangle's area at use.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub degree: u32,
    pub points: Vec<([f64; 3], f64)>,
}

fn orbit3(a: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    let b = 1.0 - 2.0 * a;
    out.push(([a, a, b], w));
    out.push(([a, b, a], w));
    out.push(([b, a, a], w));
}

fn orbit6(a: f64, b: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    let c = 1.0 - a - b;
    for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        out.push((p, w));
    }
}

impl TriangleRule {
    fn degree1() -> Self {
        Self { degree: 1, points: vec![([1.0 / 3.0; 3], 1.0)] }
    }

    fn degree2() -> Self {
        let mut points = Vec::new();
        orbit3(1.0 / 6.0, 1.0 / 3.0, &mut points);
        Self { degree: 2, points }
    }

    // Radon's seven-point rule.
    fn degree5() -> Self {
        let r15 = 15f64.sqrt();
        let mut points = vec![([1.0 / 3.0; 3], 9.0 / 40.0)];
        orbit3((6.0 - r15) / 21.0, (155.0 - r15) / 1200.0, &mut points);
        orbit3((6.0 + r15) / 21.0, (155.0 + r15) / 1200.0, &mut points);
        Self { degree: 5, points }
    }

    // Thirteen-point rule (one negative weight); coefficients polished against
    // the monomial moment equations in extended precision.
    #[allow(clippy::excessive_precision)]
    fn degree7() -> Self {
        let mut points = vec![([1.0 / 3.0; 3], -0.149_570_044_467_681_74)];
        orbit3(0.260_345_966_079_039_8, 0.175_615_257_433_207_8, &mut points);
        orbit3(0.065_130_102_902_215_81, 0.053_347_235_608_838_49, &mut points);
        orbit6(
            0.048_690_315_425_316_41,
            0.312_865_496_004_873_84,
            0.077_113_760_890_257_14,
            &mut points,
        );
        Self { degree: 7, points }
    }

    /// Collapsed (conical product) Gauss rule, exact to `degree`; used when no
    /// tabulated symmetric rule is that accurate.
    fn conical(degree: u32) -> Self {
        let n = (degree as usize + 2).div_ceil(2);
        let gl = GaussLegendre::get(n);
        let mut points = Vec::with_capacity(n * n);
        for (xu, wu) in gl.nodes.iter().zip(&gl.weights) {
            let u = 0.5 * (xu + 1.0);
            for (xv, wv) in gl.nodes.iter().zip(&gl.weights) {
                let v = 0.5 * (xv + 1.0);
                let l1 = u;
                let l2 = v * (1.0 - u);
                // reference area 1/2; quarter from the two interval maps
                let w = 0.25 * wu * wv * (1.0 - u) * 2.0;
                points.push(([1.0 - l1 - l2, l1, l2], w));
            }
        }
        Self { degree, points }
    }

    /// The cheapest rule available that integrates polynomials of total
    /// degree `degree` exactly.
    pub fn exact_to(degree: u32) -> Arc<TriangleRule> {
        static CACHE: OnceLock<RwLock<HashMap<u32, Arc<TriangleRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(rule) = cache.read().expect("quadrature cache poisoned").get(&degree) {
            return rule.clone();
        }
        let rule = Arc::new(match degree {
            0 | 1 => Self::degree1(),
            2 => Self::degree2(),
            3..=5 => Self::degree5(),
            6 | 7 => Self::degree7(),
            d => Self::conical(d),
        });
        cache
            .write()
            .expect("quadrature cache poisoned")
            .entry(degree)
            .or_insert(rule)
            .clone()
    }

    /// Integral of `f` over the triangle `(a, b, c)`.
    pub fn integrate<F: FnMut(f64, f64) -> f64>(
        &self,
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        mut f: F,
    ) -> f64 {
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
        let mut acc = 0.0;
        for (l, w) in &self.points {
            let x = l[0] * a[0] + l[1] * b[0] + l[2] * c[0];
            let y = l[0] * a[1] + l[1] * b[1] + l[2] * c[1];
            acc += w * f(x, y);
        }
        acc * area
    }
}

/// Adaptive Gauss-Legendre integration: a panel is accepted when the
/// 15-point estimate agrees with the sum over its two halves.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = GaussLegendre::get(15);
    fn recurse<F: FnMut(f64) -> f64>(
        rule: &GaussLegendre,
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = rule.integrate(a, mid, &mut *f);
        let right = rule.integrate(mid, b, &mut *f);
        if depth == 0 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(rule, f, a, mid, left, 0.5 * tol, depth - 1)
            + recurse(rule, f, mid, b, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = rule.integrate(a, b, &mut f);
    recurse(&rule, &mut f, a, b, whole, tol, 40)
}
