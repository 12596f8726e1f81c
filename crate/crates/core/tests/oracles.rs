//! Linear oracles, nearest points and separation against brute force.

mod common;

use proptest::prelude::*;
use rand::Rng;
use zonosvm::linalg::{dot, norm};
use zonosvm::nearest::{nearest_point_with, Method, NearestPointOptions, SeparationOracle};
use zonosvm::reference::BruteBody;
use zonosvm::{
    brute_lmo, brute_nearest, hull_extreme, nearest_point, zonotope_extreme, DifferenceBody,
    LabeledDataset, LinearOracle, OracleConfig, PointSet, ReducedHull, Separation, Zonotope,
};

use common::{random_dataset, random_points, random_vec, rng};

fn points_strategy(max_m: usize, d: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), 1..=max_m)
        .prop_map(move |rows| PointSet::from_rows(d, &rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_extreme_is_the_enumerated_maximum(
        points in points_strategy(7, 2),
        w in prop::collection::vec(-1.0f64..1.0, 2),
        k_seed in 0usize..100,
    ) {
        let k = 1 + k_seed % points.len();
        let hull = ReducedHull::new(points, 1.0 / k as f64).unwrap();
        prop_assume!(norm(&w) > 1e-6);
        let fast = hull_extreme(&hull, &w).unwrap().value(&w);
        let slow = brute_lmo(BruteBody::Hull(&hull), &w, &OracleConfig::default()).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-9, "{} vs {}", fast, slow);
    }

    #[test]
    fn hull_support_grows_with_mu(
        points in points_strategy(9, 3),
        w in prop::collection::vec(-1.0f64..1.0, 3),
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        prop_assume!(norm(&w) > 1e-6);
        let lo = 1.0 / points.len() as f64;
        let (mu1, mu2) = (lo + (1.0 - lo) * a.min(b), lo + (1.0 - lo) * a.max(b));
        let v1 = hull_extreme(&ReducedHull::new(points.clone(), mu1).unwrap(), &w).unwrap().value(&w);
        let v2 = hull_extreme(&ReducedHull::new(points, mu2).unwrap(), &w).unwrap().value(&w);
        prop_assert!(v2 >= v1 - 1e-12);
    }

    #[test]
    fn witnesses_are_feasible(
        points in points_strategy(12, 3),
        w in prop::collection::vec(-1.0f64..1.0, 3),
        t in 0.0f64..1.0,
    ) {
        prop_assume!(norm(&w) > 1e-6);
        let lo = 1.0 / points.len() as f64;
        let mu = lo + (1.0 - lo) * t;
        let hull = ReducedHull::new(points.clone(), mu).unwrap();
        let v = hull_extreme(&hull, &w).unwrap();
        prop_assert!(v.weights.iter().all(|&a| (0.0..=mu).contains(&a)));
        prop_assert!((v.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let p = points.combine(&v.weights);
        prop_assert!(p.iter().zip(&v.point).all(|(a, b)| (a - b).abs() <= 1e-12));
    }

    #[test]
    fn zonotope_support_is_sublinear(
        gens in points_strategy(8, 3),
        w1 in prop::collection::vec(-1.0f64..1.0, 3),
        w2 in prop::collection::vec(-1.0f64..1.0, 3),
        s in 0.01f64..10.0,
    ) {
        let z = Zonotope::with_uniform_bound(gens, 1.5).unwrap();
        let h = |w: &[f64]| {
            if norm(w) == 0.0 { return 0.0; }
            dot(w, &zonotope_extreme(&z, w).unwrap().0)
        };
        let sum: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        prop_assert!(h(&sum) <= h(&w1) + h(&w2) + 1e-9);
        let scaled: Vec<f64> = w1.iter().map(|a| s * a).collect();
        prop_assert!((h(&scaled) - s * h(&w1)).abs() <= 1e-9 * (1.0 + s * h(&w1).abs()));
    }
}

#[test]
fn zonotope_matches_enumeration() {
    let mut rng = rng(11);
    let cfg = OracleConfig::default();
    for _ in 0..200 {
        let m = rng.gen_range(1..=8);
        let d = rng.gen_range(1..=3);
        let bounds: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
        let z = Zonotope::new(random_points(&mut rng, m, d, 2.0), bounds).unwrap();
        let w = random_vec(&mut rng, d, 1.0);
        let (p, _) = zonotope_extreme(&z, &w).unwrap();
        let slow = brute_lmo(BruteBody::Zonotope(&z), &w, &cfg).unwrap();
        assert!((dot(&w, &p) - slow).abs() <= 1e-9);
    }
}

#[test]
fn nearest_point_matches_brute_force_on_segments() {
    let ds = LabeledDataset::from_classes(&[[2.0, 0.0], [3.0, 1.0]], &[[0.0, 0.0], [-1.0, 1.0]])
        .unwrap();
    let body = DifferenceBody::from_dataset(&ds, 1.0).unwrap();
    let res = nearest_point(&body, &[0.0, 0.0], 1e-12).unwrap();
    let (brute, _) = brute_nearest(&ds, 1.0, &OracleConfig::default()).unwrap();
    assert!((res.squared_norm - brute).abs() <= 1e-8);
}

#[test]
fn iterates_stay_feasible_and_objective_decreases() {
    let mut rng = rng(12);
    for method in [Method::Wolfe, Method::AwayStep] {
        for _ in 0..20 {
            let ds = random_dataset(&mut rng, 12, 9, 3, 1.0);
            let body = DifferenceBody::from_dataset(&ds, 0.3).unwrap();
            let opts = NearestPointOptions {
                tol: 1e-10,
                method,
                trace: true,
                ..Default::default()
            };
            let res = nearest_point_with(&body, &[0.0; 3], &opts).unwrap();
            assert!(res
                .trace
                .windows(2)
                .all(|p| p[1] <= p[0] * (1.0 + 1e-12) + 1e-15));
            let (a, b) = body.split_weights(&res.weights);
            for class in [a, b] {
                assert!(class.iter().all(|&x| (-1e-12..=0.3 + 1e-12).contains(&x)));
                assert!((class.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
            let p = body.point_from_weights(&res.weights);
            assert!(p.iter().zip(&res.point).all(|(x, y)| (x - y).abs() <= 1e-9));
        }
    }
}

#[test]
fn away_step_agrees_with_wolfe() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let ds = random_dataset(&mut rng, 10, 10, 2, 2.0);
        let body = DifferenceBody::from_dataset(&ds, 0.25).unwrap();
        let run = |method| {
            let opts = NearestPointOptions {
                tol: 1e-12,
                method,
                ..Default::default()
            };
            nearest_point_with(&body, &[0.0, 0.0], &opts)
                .unwrap()
                .squared_norm
        };
        let (a, b) = (run(Method::Wolfe), run(Method::AwayStep));
        assert!((a - b).abs() <= 1e-8 * (1.0 + a), "{a} vs {b}");
    }
}

#[test]
fn separating_hyperplanes_hold_against_one_more_oracle_call() {
    let mut rng = rng(14);
    for early in [false, true] {
        let ds = random_dataset(&mut rng, 15, 15, 3, 1.0);
        let body = DifferenceBody::from_dataset(&ds, 0.2).unwrap();
        let mut oracle = SeparationOracle::new(&body, 1e-9).early_exit(early);
        for _ in 0..100 {
            let q = random_vec(&mut rng, 3, 4.0);
            match oracle.separate(&q).unwrap() {
                Separation::Hyperplane { normal, offset } => {
                    assert!(dot(&normal, &q) > offset);
                    let top = body.maximize(&normal).unwrap().point;
                    assert!(dot(&normal, &top) <= offset + 1e-9);
                }
                Separation::Inside { point, .. } => {
                    let dist = point
                        .iter()
                        .zip(&q)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    assert!(dist <= 1e-9);
                }
            }
        }
    }
}
