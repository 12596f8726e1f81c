//! The zero-margin μ: the largest cap at which the reduced hulls of the two
//! classes can still be separated by a hyperplane.
//!
//! Lifting `x ↦ (x, 1)` turns the question into a linear program over the
//! intersection of two zonotopes: maximize the last coordinate `s` of a
//! point `Σ_{I+} αᵢvᵢ = Σ_{I−} αᵢvᵢ` with `0 <= αᵢ <= 1`. Rescaling such a
//! point by `1/s` is a common point of the reduced hulls at cap `1/s`, so
//! the zero-margin μ is `1/s*`.

use serde::{Deserialize, Serialize};

use crate::dataset::{lift_dataset, LabeledDataset};
use crate::ellipsoid::{ellipsoid_max_coordinate, EllipsoidOptions};
use crate::error::{Error, Result};
use crate::linalg::PointSet;
use crate::lmo::Zonotope;
use crate::trainer::{train_with, Solver, TrainOptions, DEFAULT_EPS};

/// Weight sums at most this far above 1 still count as touching hulls.
const SEPARABLE_SLACK: f64 = 1e-6;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparabilityMethod {
    /// Ellipsoid over the zonotope intersection.
    Ellipsoid,
    /// The intersection is only the origin: the convex hulls are disjoint.
    Disjoint,
    /// Bisection on μ with the trainer, used when the intersection is too
    /// thin for the ellipsoid to find an interior point.
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityWitness {
    /// Dataset-order weights in `[0, 1]`.
    pub alpha: Vec<f64>,
    /// The common point in the lifted space.
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityResult {
    pub mu_zero: f64,
    /// `(μ₀ - 2/n)/(1 - 2/n)`, only for balanced classes with `n > 2`.
    pub mu_star: Option<f64>,
    pub witness: SeparabilityWitness,
    /// True when the convex hulls have disjoint interiors.
    pub separable_flag: bool,
    /// Largest weight sum found, `1/μ₀` unless separable.
    pub weight_sum: f64,
    /// Certified upper bound on the weight sum (ellipsoid method only).
    pub weight_sum_bound: Option<f64>,
    pub method: SeparabilityMethod,
    pub iterations: usize,
    /// Margin of the full convex hulls, when they are separable.
    pub hard_margin: Option<f64>,
}

/// `(μ - 2/n)/(1 - 2/n)` for balanced classes.
pub fn normalized_mu(mu: f64, ds: &LabeledDataset) -> Option<f64> {
    let (np, nm) = ds.class_counts();
    let n = ds.len() as f64;
    (np == nm && ds.len() > 2).then(|| (mu - 2.0 / n) / (1.0 - 2.0 / n))
}

pub fn zero_margin_mu(ds: &LabeledDataset, eps: f64) -> Result<SeparabilityResult> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let (plus, minus) = lift_dataset(ds);
    let k = ds.dim() + 1;
    let z = |vs: &[crate::dataset::LiftedVector]| {
        Zonotope::with_uniform_bound(PointSet::from_rows(k, vs), 1.0)
    };
    let (zp, zm) = (z(&plus)?, z(&minus)?);
    let opts = EllipsoidOptions::new(zp.norm_bound().min(zm.norm_bound()) + 1.0).eps(eps);

    match ellipsoid_max_coordinate(&zp, &zm, k - 1, Some(opts)) {
        Ok(report) if report.best_value > 1.0 + SEPARABLE_SLACK => {
            let s = report.best_value;
            let mut alpha = vec![0.0; ds.len()];
            for (idx, w) in [
                (ds.positive(), &report.witnesses[0]),
                (ds.negative(), &report.witnesses[1]),
            ] {
                for (&i, &a) in idx.iter().zip(&w.weights) {
                    alpha[i] = a;
                }
            }
            let mu_zero = 1.0 / s;
            Ok(SeparabilityResult {
                mu_zero,
                mu_star: normalized_mu(mu_zero, ds),
                witness: SeparabilityWitness {
                    alpha,
                    point: report.witnesses[0].point.clone(),
                },
                separable_flag: false,
                weight_sum: s,
                weight_sum_bound: Some(report.bound),
                method: SeparabilityMethod::Ellipsoid,
                iterations: report.iterations,
                hard_margin: None,
            })
        }
        Ok(_) | Err(Error::Infeasible(_) | Error::Conditioning(_)) => resolve_thin(ds, eps),
        Err(e) => Err(e),
    }
}

// The intersection has no interior: either the hulls are disjoint (or just
// touch), or the data is degenerate and the overlap is flat.
fn resolve_thin(ds: &LabeledDataset, eps: f64) -> Result<SeparabilityResult> {
    let margin = |mu: f64| -> Result<(f64, Vec<f64>)> {
        let clf = train_with(
            ds,
            &TrainOptions::new(mu).eps(eps).solver(Solver::NearestPoint),
        )?;
        Ok((clf.margin, clf.alpha))
    };
    let (hard, alpha_hard) = margin(1.0)?;
    let lifted_dim = ds.dim() + 1;
    if hard > eps {
        return Ok(SeparabilityResult {
            mu_zero: 1.0,
            mu_star: normalized_mu(1.0, ds),
            witness: SeparabilityWitness {
                alpha: vec![0.0; ds.len()],
                point: vec![0.0; lifted_dim],
            },
            separable_flag: true,
            weight_sum: 0.0,
            weight_sum_bound: None,
            method: SeparabilityMethod::Disjoint,
            iterations: 0,
            hard_margin: Some(hard),
        });
    }

    let (np, nm) = ds.class_counts();
    let mut lo = 1.0 / np.min(nm) as f64;
    let mut hi = 1.0;
    let mut alpha = alpha_hard;
    let (m_lo, a_lo) = margin(lo)?;
    let mut steps = 0;
    if m_lo <= eps {
        hi = lo;
        alpha = a_lo;
    } else {
        while steps < BISECTION_STEPS && hi - lo > eps * hi {
            let mid = 0.5 * (lo + hi);
            let (m, a) = margin(mid)?;
            if m > eps {
                lo = mid;
            } else {
                hi = mid;
                alpha = a;
            }
            steps += 1;
        }
    }
    let mu_zero = hi;
    let s = 1.0 / mu_zero;
    let alpha: Vec<f64> = alpha.iter().map(|a| (a * s).min(1.0)).collect();
    let mut point = vec![0.0; lifted_dim];
    for &i in ds.positive() {
        for (p, x) in point.iter_mut().zip(ds.point(i)) {
            *p += alpha[i] * x;
        }
        point[lifted_dim - 1] += alpha[i];
    }
    let touching = mu_zero >= 1.0 - eps;
    Ok(SeparabilityResult {
        mu_zero,
        mu_star: normalized_mu(mu_zero, ds),
        witness: SeparabilityWitness { alpha, point },
        separable_flag: touching,
        weight_sum: s,
        weight_sum_bound: None,
        method: SeparabilityMethod::Bisection,
        iterations: steps,
        hard_margin: touching.then_some(hard),
    })
}

/// Trainer margin at cap `mu`.
pub fn margin_at_mu(ds: &LabeledDataset, mu: f64) -> Result<f64> {
    Ok(train_with(ds, &TrainOptions::new(mu).eps(DEFAULT_EPS))?.margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_classes() {
        let ds = LabeledDataset::from_classes(&[[0.0], [2.0]], &[[1.0], [3.0]]).unwrap();
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        assert_eq!(r.method, SeparabilityMethod::Ellipsoid);
        assert!((r.mu_zero - 0.75).abs() < 1e-4, "{}", r.mu_zero);
        assert!((r.mu_star.unwrap() - 0.5).abs() < 1e-4);
        assert!(!r.separable_flag);
    }

    #[test]
    fn coincident_centroids() {
        let ds = LabeledDataset::from_classes(&[[-1.0], [1.0]], &[[-2.0], [2.0]]).unwrap();
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        assert!((r.mu_zero - 0.5).abs() < 1e-6, "{}", r.mu_zero);
        assert!(r.mu_star.unwrap().abs() < 1e-6);
    }

    #[test]
    fn separable_classes() {
        let ds =
            LabeledDataset::from_classes(&[[2.0, 0.0], [3.0, 1.0]], &[[0.0, 0.0], [-1.0, 1.0]])
                .unwrap();
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        assert!(r.separable_flag);
        assert_eq!(r.mu_zero, 1.0);
        assert_eq!(r.mu_star, Some(1.0));
        assert!((r.hard_margin.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_overlap_falls_back_to_bisection() {
        // the 1D interval instance embedded on a line in the plane
        let ds = LabeledDataset::from_classes(&[[0.0, 0.0], [2.0, 2.0]], &[[1.0, 1.0], [3.0, 3.0]])
            .unwrap();
        let r = zero_margin_mu(&ds, 1e-7).unwrap();
        assert!(
            (r.mu_zero - 0.75).abs() < 1e-4,
            "{} via {:?}",
            r.mu_zero,
            r.method
        );
    }

    #[test]
    fn margin_vanishes_at_zero_margin_mu() {
        let ds = LabeledDataset::from_classes(&[[0.0], [2.0]], &[[1.0], [3.0]]).unwrap();
        assert!(margin_at_mu(&ds, 0.75).unwrap() <= 1e-4);
        assert!(margin_at_mu(&ds, 0.7).unwrap() > 0.0);
    }
}
