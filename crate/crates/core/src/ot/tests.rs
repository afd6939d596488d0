use super::*;
use crate::model::{CostModel, DensityModel, ProductGrid, QualityCurve};
use crate::solver::{solve_numeric, solve_uniform, NumericOptions, SolutionBundle};
use crate::testutil::{chord_instance, example1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Linear curve with slope one: every step is along the diagonal.
fn diagonal(density: DensityModel) -> ScreeningInstance {
    let curve = QualityCurve::linear(1.0, 2.0).unwrap();
    let cost = CostModel::half_squared_norm();
    let grid = ProductGrid::from_ys(&curve, &cost, vec![0.0, 0.4, 0.8]).unwrap();
    ScreeningInstance::new(curve, cost, density, grid).unwrap()
}

fn round_trip(inst: &ScreeningInstance, b: &SolutionBundle) -> (LevelSchedule, DiscreteMeasure) {
    let nu = DiscreteMeasure::normalized(b.masses()).unwrap().padded(inst.grid.n() + 1);
    let sched = level_schedule(inst, &nu).unwrap();
    (sched, nu)
}

#[test]
fn diagonal_half_mass() {
    let inst = diagonal(DensityModel::uniform());
    let k = level_for(&inst, 0, 0.5).unwrap();
    assert!((k - 0.4).abs() < 1e-12);
    assert_eq!(level_for(&inst, 0, 1.0).unwrap(), 0.8);
    assert_eq!(level_for(&inst, 0, 0.0).unwrap(), 0.0);
}

#[test]
fn gaussian_level_self_consistent() {
    let inst = chord_instance(1.0 / 6.0, 0.1, 6, DensityModel::gaussian([0.5, 0.5], 0.25).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let i = rng.random_range(0..6);
    let k = level_for(&inst, i, 0.3).unwrap();
    let m = mass_of(&inst, &sublevel(&inst, i, k)) / square_mass(&inst);
    assert!((m - 0.3).abs() < 1e-8);
}

#[test]
fn levels_monotone_in_cum() {
    let inst = example1(0.25, 8);
    for i in [0, 3, 7] {
        let ks: Vec<f64> = (0..10).map(|c| level_for(&inst, i, c as f64 / 9.0).unwrap()).collect();
        assert!(ks.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn single_atom_is_vacuously_nested() {
    let inst = example1(1.0 / 6.0, 4);
    let nu = DiscreteMeasure::new(vec![0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    let s = level_schedule(&inst, &nu).unwrap();
    assert!(check_discrete_nestedness(&inst, &s, &nu).pass);
}

#[test]
fn round_trip_reproduces_tariff() {
    let inst = example1(1.0 / 6.0, 28);
    let b = solve_uniform(&inst).unwrap();
    let (sched, nu) = round_trip(&inst, &b);
    assert!(check_discrete_nestedness(&inst, &sched, &nu).pass);
    let pot = potentials(&inst, &sched, &nu).unwrap();
    for (i, k) in sched.ks.iter().enumerate() {
        let inc = b.tariff.vs[i + 1] - b.tariff.vs[i];
        assert!((k - inc).abs() < 1e-8, "gap {i}: {k} vs {inc}");
    }
    for (a, b) in pot.v_list.iter().zip(&b.tariff.vs) {
        assert!((a - b).abs() < 1e-8);
    }
    let push = pushforward_check(&inst, &sched, &nu);
    assert!(push.max_deviation < 1e-8);
}

#[test]
fn gaussian_round_trip() {
    let inst = chord_instance(1.0 / 6.0, 1.0 / 18.0, 18, DensityModel::gaussian([0.5, 0.5], 0.25).unwrap());
    let b = solve_numeric(&inst, &NumericOptions::default()).unwrap();
    assert!(b.is_nested());
    let (sched, nu) = round_trip(&inst, &b);
    assert!(check_discrete_nestedness(&inst, &sched, &nu).pass);
    for (i, k) in sched.ks.iter().enumerate() {
        assert!((k - (b.tariff.vs[i + 1] - b.tariff.vs[i])).abs() < 1e-8);
    }
}

#[test]
fn crossing_levels_reported() {
    let inst = example1(0.5, 28);
    let b = solve_uniform(&inst).unwrap();
    let (sched, nu) = round_trip(&inst, &b);
    let r = check_discrete_nestedness(&inst, &sched, &nu);
    assert!(!r.pass && !r.violations.is_empty());
    assert!(matches!(potentials(&inst, &sched, &nu), Err(Error::NotDiscretelyNested(..))));
}

#[test]
fn map_and_duality() {
    let inst = example1(1.0 / 6.0, 28);
    let b = solve_uniform(&inst).unwrap();
    let (sched, nu) = round_trip(&inst, &b);
    let pot = potentials(&inst, &sched, &nu).unwrap();
    assert_eq!(optimal_map(&inst, &sched, Point::new(0.0, 0.0)).index, 0);
    assert_eq!(optimal_map(&inst, &sched, Point::new(1.0, 1.0)).index, 28);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let x = Point::new(rng.random(), rng.random());
        let m = optimal_map(&inst, &sched, x);
        for i in 0..pot.v_list.len() {
            assert!(pot.slack(x, i) >= -1e-10);
        }
        if !m.boundary {
            assert!(pot.slack(x, m.index) <= 1e-9);
            let argmax = (0..pot.v_list.len())
                .min_by(|a, b| pot.slack(x, *a).total_cmp(&pot.slack(x, *b)))
                .unwrap();
            assert_eq!(argmax, m.index);
        }
    }
}

#[test]
fn measure_validation() {
    assert!(DiscreteMeasure::new(vec![0.5, 0.6]).is_err());
    assert!(DiscreteMeasure::new(vec![-0.1, 1.1]).is_err());
    let nu = DiscreteMeasure::normalized(&[1.0, 3.0]).unwrap();
    assert_eq!(nu.weights(), &[0.25, 0.75]);
}
