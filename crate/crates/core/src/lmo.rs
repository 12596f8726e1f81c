//! Linear optimization over zonotopes, reduced convex hulls and the
//! difference body `P = H₊ ⊖ H₋`.
//!
//! Every oracle here maximizes `w·z`. A zonotope `Σ [0, u_i]·v_i` is
//! optimized generator by generator; a reduced hull is optimized by the
//! greedy fill in decreasing projection order.

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, PointSet};

/// An extreme point together with the weights that express it.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: Vec<f64>,
    pub weights: Vec<f64>,
}

/// A convex body known only through linear maximization.
pub trait LinearOracle: Sync {
    /// Ambient dimension of the body.
    fn dim(&self) -> usize;

    /// Length of the weight vector attached to each returned vertex.
    fn witness_len(&self) -> usize;

    /// A point of the body maximizing `direction · z`.
    fn maximize(&self, direction: &[f64]) -> Result<Vertex>;
}

impl<T: LinearOracle + ?Sized> LinearOracle for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn witness_len(&self) -> usize {
        (**self).witness_len()
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        (**self).maximize(direction)
    }
}

/// Adapter turning a closure into a [`LinearOracle`].
pub struct FnOracle<F> {
    dim: usize,
    witness_len: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&[f64]) -> Result<Vertex> + Sync,
{
    pub fn new(dim: usize, witness_len: usize, f: F) -> Self {
        FnOracle {
            dim,
            witness_len,
            f,
        }
    }
}

impl<F> LinearOracle for FnOracle<F>
where
    F: Fn(&[f64]) -> Result<Vertex> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn witness_len(&self) -> usize {
        self.witness_len
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        (self.f)(direction)
    }
}

pub(crate) fn check_direction(w: &[f64], dim: usize) -> Result<()> {
    if w.len() != dim {
        return Err(Error::invalid(format!(
            "direction has length {}, expected {dim}",
            w.len()
        )));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("direction has a non-finite coordinate"));
    }
    if norm(w) == 0.0 {
        return Err(Error::invalid("zero direction"));
    }
    Ok(())
}

/// Minkowski sum of segments `{α v_i : 0 <= α <= u_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    generators: PointSet,
    upper_bounds: Vec<f64>,
}

impl Zonotope {
    pub fn new(generators: PointSet, upper_bounds: Vec<f64>) -> Result<Self> {
        if generators.is_empty() || generators.dim() == 0 {
            return Err(Error::invalid("a zonotope needs at least one generator"));
        }
        if generators.len() != upper_bounds.len() {
            return Err(Error::invalid("one upper bound per generator required"));
        }
        if upper_bounds.iter().any(|&u| !(u >= 0.0) || !u.is_finite()) {
            return Err(Error::invalid(
                "upper bounds must be finite and nonnegative",
            ));
        }
        Ok(Zonotope {
            generators,
            upper_bounds,
        })
    }

    pub fn with_uniform_bound(generators: PointSet, bound: f64) -> Result<Self> {
        let m = generators.len();
        Zonotope::new(generators, vec![bound; m])
    }

    pub fn generators(&self) -> &PointSet {
        &self.generators
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `Σ u_i ‖v_i‖`, a bound on the norm of every point of the zonotope.
    pub fn norm_bound(&self) -> f64 {
        self.generators
            .rows()
            .zip(&self.upper_bounds)
            .map(|(v, u)| u * norm(v))
            .sum()
    }

    pub fn point_from_weights(&self, weights: &[f64]) -> Vec<f64> {
        self.generators.combine(weights)
    }
}

/// Vertex of `Z` extreme in direction `w`.
///
/// `α_i = u_i` when `w·v_i > 0` and `0` otherwise (ties go to zero).
pub fn zonotope_extreme(z: &Zonotope, w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_direction(w, z.dim())?;
    let weights: Vec<f64> = z
        .generators
        .rows()
        .zip(&z.upper_bounds)
        .map(|(v, &u)| if dot(v, w) > 0.0 { u } else { 0.0 })
        .collect();
    let point = z.generators.combine(&weights);
    Ok((point, weights))
}

impl LinearOracle for Zonotope {
    fn dim(&self) -> usize {
        self.generators.dim()
    }
    fn witness_len(&self) -> usize {
        self.generators.len()
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        let (point, weights) = zonotope_extreme(self, direction)?;
        Ok(Vertex { point, weights })
    }
}

/// Reduced convex hull `{Σ α_i x_i : Σ α_i = 1, 0 <= α_i <= μ}`.
///
/// Internally the total mass may differ from one; that generalization is
/// used to optimize over faces of a reduced hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedHull {
    points: PointSet,
    mu: f64,
    mass: f64,
}

const MASS_SLACK: f64 = 1e-12;

impl ReducedHull {
    pub fn new(points: PointSet, mu: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a reduced hull needs at least one point"));
        }
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::invalid(format!("mu = {mu} is outside (0, 1]")));
        }
        let m = points.len();
        if mu * (m as f64) < 1.0 - MASS_SLACK {
            return Err(Error::Infeasible(format!(
                "reduced hull of {m} points is empty for mu = {mu} < 1/{m}"
            )));
        }
        Ok(ReducedHull {
            points,
            mu,
            mass: 1.0,
        })
    }

    /// Capped simplex `{Σ α_i x_i : Σ α_i = mass, 0 <= α_i <= μ}`.
    pub(crate) fn with_mass(points: PointSet, mu: f64, mass: f64) -> Result<Self> {
        let m = points.len() as f64;
        if points.is_empty() || !(mu > 0.0) || mass < 0.0 || mass > mu * m * (1.0 + MASS_SLACK) {
            return Err(Error::Infeasible(format!(
                "capped simplex with mass {mass} and cap {mu} over {m} points is empty"
            )));
        }
        Ok(ReducedHull { points, mu, mass })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Number of fully capped weights and the leftover transitional weight.
    fn fill_counts(&self) -> (usize, f64) {
        let m = self.points.len();
        if self.mass == 0.0 {
            return (0, 0.0);
        }
        let mut full = (self.mass / self.mu).floor().max(0.0) as usize;
        let mut rem = self.mass - full as f64 * self.mu;
        if rem < 0.0 && full > 0 {
            full -= 1;
            rem += self.mu;
        }
        if rem <= 1e-13 * self.mass {
            rem = 0.0;
        } else if rem >= self.mu * (1.0 - 1e-13) {
            full += 1;
            rem = 0.0;
        }
        if full >= m {
            (m, 0.0)
        } else {
            (full, rem)
        }
    }

    /// Greedy fill for scores `s_i`: weights `μ` in decreasing score order
    /// (ties by ascending index) until the mass is used up.
    ///
    /// Returns the weights and the filled indices in fill order.
    pub(crate) fn greedy(&self, scores: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let m = self.points.len();
        let (full, rem) = self.fill_counts();
        let k = (full + usize::from(rem > 0.0)).min(m);
        let order = top_k(scores, k);
        let mut weights = vec![0.0; m];
        for (j, &i) in order.iter().enumerate() {
            weights[i] = if j < full { self.mu } else { rem };
        }
        (weights, order)
    }
}

// Indices of the k largest scores, sorted by (score desc, index asc).
pub(crate) fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| {
        scores[*b]
            .partial_cmp(&scores[*a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(b))
    };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Extreme point of a reduced hull with its weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullVertexWitness {
    pub weights: Vec<f64>,
    pub point: Vec<f64>,
    /// Index of the last filled point, whose weight may be partial.
    pub transitional: Option<usize>,
}

impl HullVertexWitness {
    pub fn value(&self, w: &[f64]) -> f64 {
        dot(&self.point, w)
    }
}

/// Vertex of `H_μ` maximizing `w·x`, built by the sorted-projection greedy.
pub fn hull_extreme(h: &ReducedHull, w: &[f64]) -> Result<HullVertexWitness> {
    check_direction(w, h.dim())?;
    let scores = h.points.project(w);
    let (weights, order) = h.greedy(&scores);
    let point = h.points.combine(&weights);
    Ok(HullVertexWitness {
        weights,
        point,
        transitional: order.last().copied(),
    })
}

impl LinearOracle for ReducedHull {
    fn dim(&self) -> usize {
        self.points.dim()
    }
    fn witness_len(&self) -> usize {
        self.points.len()
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        let v = hull_extreme(self, direction)?;
        Ok(Vertex {
            point: v.point,
            weights: v.weights,
        })
    }
}

/// Extreme point `v₊ - v₋` of `P = H₊ ⊖ H₋` in direction `w`.
pub fn difference_extreme(
    plus: &ReducedHull,
    minus: &ReducedHull,
    w: &[f64],
) -> Result<(Vec<f64>, HullVertexWitness, HullVertexWitness)> {
    if plus.dim() != minus.dim() {
        return Err(Error::invalid("hulls live in different dimensions"));
    }
    let neg: Vec<f64> = w.iter().map(|v| -v).collect();
    let vp = hull_extreme(plus, w)?;
    let vm = hull_extreme(minus, &neg)?;
    let point = vp.point.iter().zip(&vm.point).map(|(a, b)| a - b).collect();
    Ok((point, vp, vm))
}

/// The difference body `P = H₊ ⊖ H₋` as a linear oracle. Witness weights
/// are `α₊` followed by `α₋`.
#[derive(Debug, Clone)]
pub struct DifferenceBody {
    pub plus: ReducedHull,
    pub minus: ReducedHull,
}

impl DifferenceBody {
    pub fn new(plus: ReducedHull, minus: ReducedHull) -> Result<Self> {
        if plus.dim() != minus.dim() {
            return Err(Error::invalid("hulls live in different dimensions"));
        }
        Ok(DifferenceBody { plus, minus })
    }

    /// Training-set difference body at cap `mu`.
    pub fn from_dataset(ds: &LabeledDataset, mu: f64) -> Result<Self> {
        DifferenceBody::new(
            ReducedHull::new(ds.class_points(Label::Positive), mu)?,
            ReducedHull::new(ds.class_points(Label::Negative), mu)?,
        )
    }

    /// `max ‖z‖` over the body is at most this.
    pub fn norm_bound(&self) -> f64 {
        self.plus.points.max_norm() + self.minus.points.max_norm()
    }

    pub fn split_weights<'a>(&self, weights: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        weights.split_at(self.plus.len())
    }

    pub fn point_from_weights(&self, weights: &[f64]) -> Vec<f64> {
        let (a, b) = self.split_weights(weights);
        let mut p = self.plus.points.combine(a);
        let q = self.minus.points.combine(b);
        p.iter_mut().zip(&q).for_each(|(x, y)| *x -= y);
        p
    }
}

impl LinearOracle for DifferenceBody {
    fn dim(&self) -> usize {
        self.plus.dim()
    }
    fn witness_len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        let (point, vp, vm) = difference_extreme(&self.plus, &self.minus, direction)?;
        let mut weights = vp.weights;
        weights.extend(vm.weights);
        Ok(Vertex { point, weights })
    }
}

/// One class's split at the transition of the greedy order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTransition {
    /// Dataset indices in fill order (wrong side first).
    pub order: Vec<usize>,
    /// Normalized transition level `t / ‖w‖`.
    pub transition: f64,
    pub zero: Vec<usize>,
    pub transitional: Vec<usize>,
    pub capped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub plus: ClassTransition,
    pub minus: ClassTransition,
}

/// Relative tolerance for calling a projection transitional.
pub const TRANSITION_TOL: f64 = 1e-7;

/// Transition levels `(t₊, t₋)` in units of `w·x`: the projection of the
/// last point filled by the greedy that minimizes `w·x` over `H₊` and
/// maximizes it over `H₋`.
pub fn transition_levels(ds: &LabeledDataset, mu: f64, w: &[f64]) -> Result<(f64, f64)> {
    check_direction(w, ds.dim())?;
    let level = |label: Label, sign: f64| -> Result<f64> {
        let hull = ReducedHull::new(ds.class_points(label), mu)?;
        let proj = hull.points.project(w);
        let scores: Vec<f64> = proj.iter().map(|p| sign * p).collect();
        let (_, order) = hull.greedy(&scores);
        Ok(proj[*order.last().expect("nonempty fill")])
    };
    Ok((level(Label::Positive, -1.0)?, level(Label::Negative, 1.0)?))
}

/// Splits each class into zero / transitional / capped index sets relative
/// to the slab normal `w` (pointing from the negative toward the positive
/// class) and transition levels `t_plus`, `t_minus` in units of `w·x`.
///
/// A point is transitional when its normalized projection lies within
/// `1e-7·(1 + |t|)` of the normalized level. Capped points lie on the wrong
/// side: below `t₊` for positives and above `t₋` for negatives.
pub fn transition_decompose(
    ds: &LabeledDataset,
    mu: f64,
    w: &[f64],
    t_plus: f64,
    t_minus: f64,
) -> Result<TransitionReport> {
    transition_decompose_with_tol(ds, mu, w, t_plus, t_minus, TRANSITION_TOL)
}

pub(crate) fn transition_decompose_with_tol(
    ds: &LabeledDataset,
    mu: f64,
    w: &[f64],
    t_plus: f64,
    t_minus: f64,
    tol: f64,
) -> Result<TransitionReport> {
    check_direction(w, ds.dim())?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::invalid(format!("mu = {mu} is outside (0, 1]")));
    }
    let wn = norm(w);
    let class = |label: Label, t: f64| {
        // wrong side is toward the other class: low projections for
        // positives, high for negatives
        let sign = if label == Label::Positive { -1.0 } else { 1.0 };
        let idx = ds.indices(label);
        let t = t / wn;
        let band = tol * (1.0 + t.abs());
        let proj: Vec<f64> = idx.iter().map(|&i| dot(ds.point(i), w) / wn).collect();
        let scores: Vec<f64> = proj.iter().map(|p| sign * p).collect();
        let order = top_k(&scores, scores.len())
            .into_iter()
            .map(|j| idx[j])
            .collect();
        let mut out = ClassTransition {
            order,
            transition: t,
            zero: Vec::new(),
            transitional: Vec::new(),
            capped: Vec::new(),
        };
        for (&i, &p) in idx.iter().zip(&proj) {
            let wrong = sign * (p - t);
            if wrong > band {
                out.capped.push(i);
            } else if wrong < -band {
                out.zero.push(i);
            } else {
                out.transitional.push(i);
            }
        }
        out
    };
    Ok(TransitionReport {
        plus: class(Label::Positive, t_plus),
        minus: class(Label::Negative, t_minus),
    })
}
