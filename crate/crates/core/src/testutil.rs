use crate::model::{CostModel, DensityModel, QualityCurve, ScreeningInstance, Spacing};

/// `F = a y^2`, `c = |z|^2 / 2`, chord `1/n`.
pub fn example1(a: f64, n: usize) -> ScreeningInstance {
    chord_instance(a, 1.0 / n as f64, n, DensityModel::uniform())
}

pub fn chord_instance(a: f64, chord: f64, n: usize, density: DensityModel) -> ScreeningInstance {
    ScreeningInstance::build(
        QualityCurve::quadratic(a, 3.0).unwrap(),
        CostModel::half_squared_norm(),
        density,
        &Spacing::EqualChord { chord },
        n,
    )
    .unwrap()
}
