//! JSON run configuration.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};
use crate::expr::{env, Expr, Var};
use crate::geometry::MassRule;
use crate::model::{
    CostModel, DensityBounds, DensityModel, FnDensity, QualityCurve, ScreeningInstance, Spacing,
};
use crate::solver::RefineGrid;

/// An expression parsed while the document is deserialized, so that syntax
/// errors carry the JSON position.
#[derive(Debug, Clone)]
pub struct ExprField<const VARS: u8> {
    pub src: String,
    pub expr: Expr,
}

pub const Y_VARS: u8 = 1;
pub const Z_VARS: u8 = 2;
pub const X_VARS: u8 = 3;

fn allowed(kind: u8) -> &'static [Var] {
    match kind {
        Y_VARS => &[Var::Y],
        Z_VARS => &[Var::Z1, Var::Z2],
        _ => &[Var::X1, Var::X2],
    }
}

impl<'de, const VARS: u8> Deserialize<'de> for ExprField<VARS> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let src = String::deserialize(d)?;
        let expr = Expr::parse(&src, allowed(VARS)).map_err(serde::de::Error::custom)?;
        Ok(Self { src, expr })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Quadratic { a: f64, y_max: f64 },
    Table { points: Vec<(f64, f64)> },
    Expression { f: ExprField<Y_VARS>, y_max: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CostSpec {
    HalfSquaredNorm {},
    Expression { c: ExprField<Z_VARS> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub alpha: f64,
    pub f_sup: f64,
    pub fx1_sup: f64,
    pub fx2_sup: f64,
    #[serde(default)]
    pub fx1x1_sup: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {},
    Gaussian {
        mean: [f64; 2],
        sigma: f64,
        #[serde(default = "yes")]
        normalized: bool,
    },
    Expression { f: ExprField<X_VARS>, bounds: BoundsSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    /// Either a chord length or a total length split into `n` chords.
    EqualChord { n: usize, chord: Option<f64>, total: Option<f64> },
    EqualArclength { n: usize },
    Explicit { ys: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSpec {
    #[default]
    Auto,
    Closed,
    Numeric,
}

impl FromStr for MethodSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "closed" => Ok(Self::Closed),
            "numeric" => Ok(Self::Numeric),
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub degree: u32,
    pub refine: u32,
    pub segment_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        let r = MassRule::default();
        Self { degree: r.degree, refine: r.refine, segment_nodes: r.segment_nodes }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub method: MethodSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    pub resolution: usize,
    pub search_grid: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { resolution: crate::oracle::COMPARE_RESOLUTION, search_grid: 32 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineOptions {
    pub y: Option<f64>,
    pub ns: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub cost: CostSpec,
    pub density: DensitySpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub solve: SolveOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default)]
    pub refine: RefineOptions,
}

impl FromStr for RunConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn curve(&self) -> Result<QualityCurve> {
        match &self.curve {
            CurveSpec::Quadratic { a, y_max } => QualityCurve::quadratic(*a, *y_max),
            CurveSpec::Table { points } => QualityCurve::from_table(points),
            CurveSpec::Expression { f, y_max } => {
                let d = f.expr.diff(Var::Y)?;
                let e = f.expr.clone();
                QualityCurve::new(
                    Arc::new(move |y| e.eval(&env(&[(Var::Y, y)]))),
                    Arc::new(move |y| d.eval(&env(&[(Var::Y, y)]))),
                    *y_max,
                )
            }
        }
    }

    pub fn cost(&self) -> Result<CostModel> {
        match &self.cost {
            CostSpec::HalfSquaredNorm {} => Ok(CostModel::half_squared_norm()),
            CostSpec::Expression { c } => {
                let d1 = c.expr.diff(Var::Z1)?;
                let d2 = c.expr.diff(Var::Z2)?;
                let e = c.expr.clone();
                let at = |a: f64, b: f64| env(&[(Var::Z1, a), (Var::Z2, b)]);
                CostModel::new(
                    Arc::new(move |a, b| e.eval(&at(a, b))),
                    Arc::new(move |a, b| [d1.eval(&at(a, b)), d2.eval(&at(a, b))]),
                )
            }
        }
    }

    pub fn density(&self) -> Result<DensityModel> {
        match &self.density {
            DensitySpec::Uniform {} => Ok(DensityModel::uniform()),
            DensitySpec::Gaussian { mean, sigma, normalized } => {
                if !normalized {
                    return Err(Error::Config("gaussian density must be normalized on the square".into()));
                }
                DensityModel::gaussian(*mean, *sigma)
            }
            DensitySpec::Expression { f, bounds } => {
                let at = |a: f64, b: f64| env(&[(Var::X1, a), (Var::X2, b)]);
                let e = f.expr.clone();
                let g1 = f.expr.diff(Var::X1)?;
                let g2 = f.expr.diff(Var::X2)?;
                let h = g1.diff(Var::X1)?;
                let density = FnDensity {
                    value: Arc::new(move |a, b| e.eval(&at(a, b))),
                    gradient: Some(Arc::new(move |a, b| [g1.eval(&at(a, b)), g2.eval(&at(a, b))])),
                    d2_x1: Some(Arc::new(move |a, b| h.eval(&at(a, b)))),
                };
                let b = DensityBounds {
                    alpha: bounds.alpha,
                    f_sup: bounds.f_sup,
                    fx1_sup: bounds.fx1_sup,
                    fx2_sup: bounds.fx2_sup,
                    fx1x1_sup: bounds.fx1x1_sup,
                };
                DensityModel::new(Arc::new(density), b)
            }
        }
    }

    pub fn spacing(&self) -> Result<(Spacing, usize)> {
        match &self.grid {
            GridSpec::EqualChord { n, chord, total } => {
                let chord = match (chord, total) {
                    (Some(c), None) => *c,
                    (None, Some(t)) => t / *n as f64,
                    _ => return Err(Error::Config("equal-chord grid needs exactly one of 'chord' or 'total'".into())),
                };
                Ok((Spacing::EqualChord { chord }, *n))
            }
            GridSpec::EqualArclength { n } => Ok((Spacing::EqualArclength, *n)),
            GridSpec::Explicit { ys } => Ok((Spacing::Explicit(ys.clone()), ys.len().saturating_sub(1))),
        }
    }

    /// Grid family for refinement studies: equal-chord grids keep their
    /// total length `n * chord`.
    pub fn refine_grid(&self) -> Result<RefineGrid> {
        match (&self.grid, self.spacing()?) {
            (GridSpec::EqualChord { .. }, (Spacing::EqualChord { chord }, n)) => {
                Ok(RefineGrid::EqualChord { total: chord * n as f64 })
            }
            (GridSpec::EqualArclength { .. }, _) => Ok(RefineGrid::EqualArclength),
            _ => Err(Error::Config("refinement needs an equal-chord or equal-arclength grid".into())),
        }
    }

    pub fn mass_rule(&self) -> MassRule {
        let q = &self.quadrature;
        MassRule { degree: q.degree, refine: q.refine, segment_nodes: q.segment_nodes }
    }

    pub fn instance(&self) -> Result<ScreeningInstance> {
        let curve = self.curve()?;
        let cost = self.cost()?;
        cost.validate_against(&curve)?;
        let (spacing, n) = self.spacing()?;
        Ok(ScreeningInstance::build(curve, cost, self.density()?, &spacing, n)?.with_rule(self.mass_rule()))
    }
}
