use super::cost::CostModel;
use super::curve::{QualityCurve, SLOPE_SLACK};
use crate::error::{Error, Result};
use crate::roots::{bisect, brent};

/// How grid points are placed along the curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Spacing {
    /// Consecutive embedded points are `chord` apart: `|z_{i+1} - z_i| = chord`.
    EqualChord { chord: f64 },
    /// `n` pieces of equal arclength covering `[0, y_max]`.
    EqualArclength,
    /// Explicit abscissas, starting at 0.
    Explicit(Vec<f64>),
}

/// The finite product line `y_0 = 0 < y_1 < ... < y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    pub ys: Vec<f64>,
    pub zs: Vec<[f64; 2]>,
    pub costs: Vec<f64>,
    /// `s_i = (F(y_{i+1}) - F(y_i)) / (y_{i+1} - y_i)`.
    pub chord_slopes: Vec<f64>,
}

impl ProductGrid {
    /// Assembles a grid from abscissas, checking ordering and slope
    /// monotonicity (nondecreasing within `SLOPE_SLACK`).
    pub fn from_ys(curve: &QualityCurve, cost: &CostModel, ys: Vec<f64>) -> Result<Self> {
        if ys.len() < 2 {
            return Err(Error::InvalidGrid("need at least one non-trivial product".into()));
        }
        if ys[0] != 0.0 {
            return Err(Error::InvalidGrid(format!("y_0 must be 0, got {}", ys[0])));
        }
        if let Some(k) = ys.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!("ys not strictly increasing at index {}", k + 1)));
        }
        let y_max = curve.y_max();
        if let Some(k) = ys.iter().position(|y| *y > y_max * (1.0 + 1e-12)) {
            return Err(Error::CurveTooShort { index: k, y_max });
        }
        let zs: Vec<[f64; 2]> = ys.iter().map(|y| curve.z(*y)).collect();
        let costs: Vec<f64> = zs.iter().map(|z| cost.c_at(*z)).collect();
        let chord_slopes: Vec<f64> =
            zs.windows(2).map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).collect();
        if let Some(k) = chord_slopes.windows(2).position(|w| w[1] < w[0] - SLOPE_SLACK) {
            return Err(Error::NonConvex(format!("chord slopes decrease at gap {}", k + 1)));
        }
        Ok(Self { ys, zs, costs, chord_slopes })
    }

    /// Number of non-trivial products `N`.
    pub fn n(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn dy(&self, i: usize) -> f64 {
        self.ys[i + 1] - self.ys[i]
    }

    pub fn df(&self, i: usize) -> f64 {
        self.zs[i + 1][1] - self.zs[i][1]
    }

    pub fn dc(&self, i: usize) -> f64 {
        self.costs[i + 1] - self.costs[i]
    }

    /// `z_{i+1} - z_i`.
    pub fn step(&self, i: usize) -> [f64; 2] {
        [self.dy(i), self.df(i)]
    }

    pub fn chord_length(&self, i: usize) -> f64 {
        self.dy(i).hypot(self.df(i))
    }

    /// True when the chord slopes are strictly increasing, so that
    /// indifference lines of different gaps are never parallel.
    pub fn is_strictly_convex(&self) -> bool {
        self.chord_slopes.windows(2).all(|w| w[1] > w[0])
    }

    /// Truncated copy keeping products `0..=n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n() {
            return Err(Error::InvalidGrid(format!("cannot truncate to {n} products")));
        }
        Ok(Self {
            ys: self.ys[..=n].to_vec(),
            zs: self.zs[..=n].to_vec(),
            costs: self.costs[..=n].to_vec(),
            chord_slopes: self.chord_slopes[..n].to_vec(),
        })
    }
}

/// Builds the grid for `n` non-trivial products.
pub fn build_grid(curve: &QualityCurve, cost: &CostModel, mode: &Spacing, n: usize) -> Result<ProductGrid> {
    if n == 0 {
        return Err(Error::InvalidGrid("n must be at least 1".into()));
    }
    let ys = match mode {
        Spacing::Explicit(ys) => {
            if ys.len() != n + 1 {
                return Err(Error::InvalidGrid(format!(
                    "explicit grid has {} points, expected {}",
                    ys.len(),
                    n + 1
                )));
            }
            ys.clone()
        }
        Spacing::EqualChord { chord } => equal_chord(curve, *chord, n)?,
        Spacing::EqualArclength => equal_arclength(curve, n)?,
    };
    ProductGrid::from_ys(curve, cost, ys)
}

fn equal_chord(curve: &QualityCurve, chord: f64, n: usize) -> Result<Vec<f64>> {
    if !(chord > 0.0 && chord.is_finite()) {
        return Err(Error::InvalidGrid(format!("chord must be positive, got {chord}")));
    }
    let y_max = curve.y_max();
    let mut ys = Vec::with_capacity(n + 1);
    ys.push(0.0);
    for index in 1..=n {
        let y0 = ys[index - 1];
        let f0 = curve.f(y0);
        let g = |y: f64| {
            let (a, b) = (y - y0, curve.f(y) - f0);
            a * a + b * b - chord * chord
        };
        // |z(y) - z(y0)| >= y - y0, so the root lies in (y0, y0 + chord].
        let hi = (y0 + chord).min(y_max);
        if g(hi) < 0.0 {
            return Err(Error::CurveTooShort { index, y_max });
        }
        let y = brent(g, y0, hi, 1e-16)?;
        ys.push(y);
    }
    Ok(ys)
}

fn equal_arclength(curve: &QualityCurve, n: usize) -> Result<Vec<f64>> {
    let y_max = curve.y_max();
    let total = curve.arclength(0.0, y_max);
    let piece = total / n as f64;
    let mut ys = Vec::with_capacity(n + 1);
    ys.push(0.0);
    for k in 1..n {
        let y0 = ys[k - 1];
        let y = bisect(|y| curve.arclength(y0, y) - piece, y0, y_max, 1e-15)?;
        ys.push(y);
    }
    ys.push(y_max);
    Ok(ys)
}
