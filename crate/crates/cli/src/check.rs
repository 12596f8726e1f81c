//! Randomized agreement checks between the solvers and the brute-force
//! reference on instances small enough to enumerate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use zonosvm::reference::BruteBody;
use zonosvm::{
    brute_hard_margin, brute_lmo, brute_nearest, hull_extreme, kkt_check, train_with,
    zonotope_extreme, Label, LabeledDataset, OracleConfig, ReducedHull, Solver, TrainOptions,
    Zonotope,
};

use crate::report::Failure;

pub const SEED_VAR: &str = "ZONOSVM_SEED";
const DEFAULT_SEED: u64 = 0;
const TOL: f64 = 1e-6;
const DIRECTIONS: usize = 5;

pub fn seed_from_env() -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| {
            Failure::Usage(format!("{SEED_VAR} must be an unsigned integer, got '{s}'"))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Default, Serialize)]
pub struct CheckTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub max_discrepancy: f64,
}

impl CheckTally {
    fn new(name: &'static str) -> Self {
        CheckTally {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, discrepancy: f64, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if discrepancy.is_nan() {
            self.max_discrepancy = f64::INFINITY;
        } else {
            self.max_discrepancy = self.max_discrepancy.max(discrepancy);
        }
    }

    fn compare(&mut self, got: f64, want: f64, scale: f64) {
        let diff = (got - want).abs() / scale.max(1.0);
        self.record(diff, diff <= TOL);
    }
}

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckTally>,
    pub passed: usize,
    pub failed: usize,
    pub max_discrepancy: f64,
}

fn random_dataset(rng: &mut ChaCha8Rng) -> LabeledDataset {
    let d = rng.gen_range(1..=3);
    let np = rng.gen_range(2..=4);
    let nm = rng.gen_range(2..=4);
    let shift: f64 = rng.gen_range(0.0..2.5);
    let dir: Vec<f64> = {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
        v.into_iter().map(|x| x / n).collect()
    };
    let mut cloud = |m: usize, offset: f64| -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| {
                (0..d)
                    .map(|k| rng.gen_range(-1.0..1.0) + offset * dir[k])
                    .collect()
            })
            .collect()
    };
    let pos = cloud(np, shift);
    let neg = cloud(nm, 0.0);
    LabeledDataset::from_classes(&pos, &neg).expect("generated dataset is valid")
}

fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().any(|x| x.abs() > 1e-3) {
            return v;
        }
    }
}

pub fn run(seed: u64, trials: usize) -> CheckSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = OracleConfig::default();
    let mut hull = CheckTally::new("hull_extreme");
    let mut zono = CheckTally::new("zonotope_extreme");
    let mut nearest = CheckTally::new("nearest_point");
    let mut kkt = CheckTally::new("kkt");
    let mut hard = CheckTally::new("hard_margin");

    for _ in 0..trials {
        let ds = random_dataset(&mut rng);
        let d = ds.dim();
        let scale = (0..ds.len())
            .map(|i| ds.point(i).iter().map(|x| x * x).sum::<f64>())
            .fold(1.0, f64::max);

        for label in [Label::Positive, Label::Negative] {
            let pts = ds.class_points(label);
            let k = rng.gen_range(1..=pts.len());
            let h = ReducedHull::new(pts.clone(), 1.0 / k as f64).expect("valid hull");
            let bounds: Vec<f64> = (0..pts.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
            let z = Zonotope::new(pts, bounds).expect("valid zonotope");
            for _ in 0..DIRECTIONS {
                let w = random_direction(&mut rng, d);
                let got = hull_extreme(&h, &w).map(|v| v.value(&w));
                let want = brute_lmo(BruteBody::Hull(&h), &w, &cfg);
                match (got, want) {
                    (Ok(g), Ok(b)) => hull.compare(g, b, scale.sqrt()),
                    _ => hull.record(f64::INFINITY, false),
                }
                let got = zonotope_extreme(&z, &w).map(|(p, _)| dot(&p, &w));
                let want = brute_lmo(BruteBody::Zonotope(&z), &w, &cfg);
                match (got, want) {
                    (Ok(g), Ok(b)) => zono.compare(g, b, scale.sqrt()),
                    _ => zono.record(f64::INFINITY, false),
                }
            }
        }

        let (np, nm) = ds.class_counts();
        let lo = 1.0 / np.min(nm) as f64;
        let mu = if lo >= 1.0 {
            1.0
        } else {
            rng.gen_range(lo..=1.0)
        };
        let solver = if rng.gen_bool(0.5) {
            Solver::Ellipsoid
        } else {
            Solver::NearestPoint
        };
        match (
            train_with(&ds, &TrainOptions::new(mu).solver(solver)),
            brute_nearest(&ds, mu, &cfg),
        ) {
            (Ok(clf), Ok((want, _))) => {
                nearest.compare(clf.squared_distance(), want, scale);
                let report = kkt_check(&clf, &ds, 1e-5);
                kkt.record(if report.all_pass() { 0.0 } else { 1.0 }, report.all_pass());
            }
            _ => {
                nearest.record(f64::INFINITY, false);
                kkt.record(f64::INFINITY, false);
            }
        }

        match brute_hard_margin(&ds, &cfg) {
            Ok(Some(hm)) => match train_with(&ds, &TrainOptions::new(1.0)) {
                Ok(clf) => hard.compare(clf.margin, hm.margin, scale.sqrt()),
                Err(_) => hard.record(f64::INFINITY, false),
            },
            Ok(None) => {}
            Err(_) => hard.record(f64::INFINITY, false),
        }
    }

    let checks = vec![hull, zono, nearest, kkt, hard];
    CheckSummary {
        seed,
        trials,
        passed: checks.iter().map(|c| c.passed).sum(),
        failed: checks.iter().map(|c| c.failed).sum(),
        max_discrepancy: checks.iter().map(|c| c.max_discrepancy).fold(0.0, f64::max),
        checks,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_summary() {
        let a = run(7, 3);
        let b = run(7, 3);
        assert_eq!(a.passed, b.passed);
        assert_eq!(a.max_discrepancy.to_bits(), b.max_discrepancy.to_bits());
    }

    #[test]
    fn all_checks_agree() {
        let s = run(11, 10);
        assert_eq!(s.failed, 0, "{s:?}");
        assert!(s.passed > 0);
    }
}
