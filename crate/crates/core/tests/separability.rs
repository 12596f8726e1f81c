mod common;

use rand::Rng;
use zonosvm::{margin_at_mu, zero_margin_mu, LabeledDataset};

use common::{random_dataset, rng};

#[test]
fn witness_satisfies_the_lifted_equations() {
    let mut rng = rng(41);
    let mut overlapping = 0;
    for _ in 0..20 {
        let d = rng.gen_range(1..=3);
        let ds = random_dataset(&mut rng, 8, 8, d, 0.8);
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        if r.separable_flag {
            continue;
        }
        overlapping += 1;
        let mut sides = [vec![0.0; d + 1], vec![0.0; d + 1]];
        for i in 0..ds.len() {
            let a = r.witness.alpha[i];
            assert!((-1e-12..=1.0 + 1e-12).contains(&a));
            let side = &mut sides[(ds.label(i) == zonosvm::Label::Negative) as usize];
            for (s, x) in side.iter_mut().zip(ds.point(i)) {
                *s += a * x;
            }
            side[d] += a;
        }
        for j in 0..=d {
            assert!((sides[0][j] - sides[1][j]).abs() <= 1e-7, "{sides:?}");
        }
        assert!((1.0 / r.mu_zero - sides[0][d]).abs() <= 1e-7);
        let star = r.mu_star.unwrap();
        assert!((-1e-6..=1.0 + 1e-6).contains(&star));
    }
    assert!(overlapping >= 10);
}

#[test]
fn margin_closes_at_the_zero_margin_mu() {
    let mut rng = rng(42);
    for _ in 0..8 {
        let ds = random_dataset(&mut rng, 7, 7, 2, 1.0);
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        if r.separable_flag {
            continue;
        }
        assert!(margin_at_mu(&ds, r.mu_zero).unwrap() <= 1e-4);
        let below = r.mu_zero - 0.02;
        if below >= 1.0 / 7.0 {
            assert!(margin_at_mu(&ds, below).unwrap() > 0.0);
        }
    }
}

#[test]
fn scaling_the_points_keeps_mu_zero() {
    let mut rng = rng(43);
    for _ in 0..8 {
        let ds = random_dataset(&mut rng, 6, 6, 2, 0.7);
        let lambda = rng.gen_range(0.1..10.0);
        let scaled = ds
            .map_points(|x| x.iter().map(|v| v * lambda).collect())
            .unwrap();
        let a = zero_margin_mu(&ds, 1e-7).unwrap();
        let b = zero_margin_mu(&scaled, 1e-7).unwrap();
        assert!(
            (a.mu_zero - b.mu_zero).abs() <= 1e-4,
            "{} vs {}",
            a.mu_zero,
            b.mu_zero
        );
    }
}

#[test]
fn unbalanced_classes_have_no_normalized_measure() {
    let ds = LabeledDataset::from_classes(&[[0.0], [2.0], [1.5]], &[[1.0], [3.0]]).unwrap();
    let r = zero_margin_mu(&ds, 1e-7).unwrap();
    assert!(r.mu_star.is_none());
    assert!(r.mu_zero >= 0.5 - 1e-9 && r.mu_zero <= 1.0);
}

#[test]
fn separable_classes_are_flagged() {
    let mut rng = rng(44);
    for _ in 0..5 {
        let ds = random_dataset(&mut rng, 5, 5, 2, 6.0);
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        assert!(r.separable_flag);
        assert_eq!(r.mu_star, Some(1.0));
        assert!(r.hard_margin.unwrap() > 0.0);
    }
}
