#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zonosvm::{LabeledDataset, PointSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut impl Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_points(rng: &mut impl Rng, m: usize, d: usize, scale: f64) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..m).map(|_| random_vec(rng, d, scale)).collect();
    PointSet::from_rows(d, &rows)
}

/// Two uniform clouds in `[-1, 1]^d`, the positive one moved by `shift`
/// along a random direction.
pub fn random_dataset(
    rng: &mut impl Rng,
    n_pos: usize,
    n_neg: usize,
    d: usize,
    shift: f64,
) -> LabeledDataset {
    let dir = {
        let v = random_vec(rng, d, 1.0);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
        v.into_iter().map(|x| x / n).collect::<Vec<_>>()
    };
    let pos: Vec<Vec<f64>> = (0..n_pos)
        .map(|_| {
            let mut x = random_vec(rng, d, 1.0);
            x.iter_mut()
                .zip(&dir)
                .for_each(|(xi, di)| *xi += shift * di);
            x
        })
        .collect();
    let neg: Vec<Vec<f64>> = (0..n_neg).map(|_| random_vec(rng, d, 1.0)).collect();
    LabeledDataset::from_classes(&pos, &neg).unwrap()
}

/// Uniform in the feasible range `[1/min(|I₊|, |I₋|), 1]`.
pub fn feasible_mu(rng: &mut impl Rng, ds: &LabeledDataset) -> f64 {
    let (p, m) = ds.class_counts();
    let lo = 1.0 / p.min(m) as f64;
    if lo >= 1.0 {
        1.0
    } else {
        rng.gen_range(lo..=1.0)
    }
}
