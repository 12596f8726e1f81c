//! Fixed-μ soft-margin training.
//!
//! The dual problem is the squared distance between the reduced convex
//! hulls of the two classes, `min ‖v‖²` over `P = H₊ ⊖ H₋`. The ellipsoid
//! engine locates the optimum approximately; the exact solution is then
//! recovered on the face of `P` singled out by the transition levels of
//! the approximate normal, and certified by a Frank-Wolfe gap over all of
//! `P`. When certification fails the minimum-norm-point solver finishes the
//! job from the approximate solution.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledDataset};
use crate::ellipsoid::{ellipsoid_minimize, ConvexObjective, EllipsoidOptions};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_sq};
use crate::lmo::{
    transition_decompose_with_tol, transition_levels, DifferenceBody, LinearOracle, ReducedHull,
    TransitionReport, Vertex,
};
use crate::nearest::{
    nearest_point, nearest_point_warm, ActiveSet, NearestPointOptions, SeparationOracle,
};

pub const DEFAULT_EPS: f64 = 1e-7;
pub const SLACK_TOL: f64 = 1e-6;
/// Support threshold relative to `μ`.
pub const SUPPORT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasStrategy {
    /// Halfway between the two supporting hyperplanes.
    #[default]
    Halfway,
    /// Fewest training errors along `w`, ties toward halfway.
    MinErrorsLineSearch,
}

impl FromStr for BiasStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "halfway" => Ok(BiasStrategy::Halfway),
            "line-search" | "min-errors" | "min_errors_line_search" => {
                Ok(BiasStrategy::MinErrorsLineSearch)
            }
            other => Err(Error::invalid(format!("unknown bias strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    Ellipsoid,
    NearestPoint,
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ellipsoid" => Ok(Solver::Ellipsoid),
            "nearest-point" | "nearest_point" | "wolfe" => Ok(Solver::NearestPoint),
            other => Err(Error::invalid(format!("unknown solver '{other}'"))),
        }
    }
}

/// How the final weights were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recovery {
    /// Exact solve on the face picked out by the transition levels.
    Face,
    /// Minimum-norm-point iterations from the approximate solution.
    Polish,
    /// Minimum-norm-point from scratch.
    Direct,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub mu: f64,
    pub bias: BiasStrategy,
    pub eps: f64,
    pub solver: Solver,
}

impl TrainOptions {
    pub fn new(mu: f64) -> Self {
        TrainOptions {
            mu,
            bias: BiasStrategy::Halfway,
            eps: DEFAULT_EPS,
            solver: Solver::Ellipsoid,
        }
    }

    pub fn bias(mut self, bias: BiasStrategy) -> Self {
        self.bias = bias;
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub solver: Solver,
    pub recovery: Recovery,
    pub ellipsoid_iterations: usize,
    /// Certified objective gap reported by the ellipsoid engine.
    pub ellipsoid_gap: Option<f64>,
    /// Set when the ellipsoid engine failed and training fell back to the
    /// minimum-norm-point solver.
    pub fallback: Option<String>,
    pub nearest_point_iterations: usize,
    /// Frank-Wolfe gap of the final `w` over the whole difference body.
    pub duality_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub w: Vec<f64>,
    /// `w·v₊`, the support of the reduced positive hull.
    pub b_plus: f64,
    /// `w·v₋`, the support of the reduced negative hull.
    pub b_minus: f64,
    /// Decision threshold chosen by the bias strategy.
    pub b: f64,
    /// Level of the last point the greedy fills on the positive side; the
    /// primal slab boundary against which slacks are measured.
    pub t_plus: f64,
    pub t_minus: f64,
    pub alpha: Vec<f64>,
    pub support_indices: Vec<usize>,
    /// Distance between the reduced hulls; 0 when they intersect.
    pub margin: f64,
    pub xi: Vec<f64>,
    pub mu: f64,
    pub bias: BiasStrategy,
    pub diagnostics: TrainDiagnostics,
}

impl TrainedClassifier {
    /// Squared distance between the reduced hulls.
    pub fn squared_distance(&self) -> f64 {
        norm_sq(&self.w)
    }

    /// True when the reduced hulls intersect and no slab exists.
    pub fn is_degenerate(&self) -> bool {
        self.margin == 0.0
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(if decision_value(self, x)? > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        })
    }
}

pub fn train(
    ds: &LabeledDataset,
    mu: f64,
    bias: BiasStrategy,
    eps: f64,
) -> Result<TrainedClassifier> {
    train_with(ds, &TrainOptions::new(mu).bias(bias).eps(eps))
}

struct Solution {
    alpha: Vec<f64>,
    gap: f64,
    iterations: usize,
    recovery: Recovery,
}

pub fn train_with(ds: &LabeledDataset, opts: &TrainOptions) -> Result<TrainedClassifier> {
    let (np, nm) = ds.class_counts();
    let mu = opts.mu;
    let smallest = np.min(nm) as f64;
    if !(mu <= 1.0 && mu * smallest >= 1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "mu = {mu} is outside [1/{}, 1]",
            np.min(nm)
        )));
    }
    if !(opts.eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let body = DifferenceBody::from_dataset(ds, mu)?;
    let r = body.norm_bound();
    let gap_tol = 1e-11 * (1.0 + r * r);
    let origin = vec![0.0; ds.dim()];

    let mut diag = TrainDiagnostics {
        solver: opts.solver,
        recovery: Recovery::Direct,
        ellipsoid_iterations: 0,
        ellipsoid_gap: None,
        fallback: None,
        nearest_point_iterations: 0,
        duality_gap: 0.0,
    };

    let direct = |diag: &mut TrainDiagnostics| -> Result<Solution> {
        let res = nearest_point(&body, &origin, gap_tol)?;
        diag.recovery = Recovery::Direct;
        Ok(Solution {
            alpha: scatter(ds, &res.weights),
            gap: res.duality_gap,
            iterations: res.iterations,
            recovery: Recovery::Direct,
        })
    };

    let sol = match opts.solver {
        Solver::NearestPoint => direct(&mut diag)?,
        Solver::Ellipsoid => {
            let flat = AffineRestriction::new(ds, mu, &body)?;
            if flat.dim() == 0 {
                // P is a single point
                direct(&mut diag)?
            } else {
                let mut oracle = SeparationOracle::new(&flat, 1e-9).early_exit(true);
                let objective = ShiftedSquaredNorm { restriction: &flat };
                let eopts = EllipsoidOptions::new(2.0 * r + 1.0).eps(opts.eps);
                match ellipsoid_minimize(&mut [&mut oracle], &objective, &eopts) {
                    Ok(report) => {
                        diag.ellipsoid_iterations = report.iterations;
                        diag.ellipsoid_gap = Some(report.gap);
                        let weights = &report.witnesses[0].weights;
                        let v0 = body.point_from_weights(weights);
                        refine(ds, &body, mu, &v0, weights, report.gap, gap_tol)?
                    }
                    Err(
                        e @ (Error::Conditioning(_)
                        | Error::NonConvergence { .. }
                        | Error::Infeasible(_)),
                    ) => {
                        diag.fallback = Some(e.to_string());
                        direct(&mut diag)?
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    };
    diag.recovery = sol.recovery;
    diag.nearest_point_iterations = sol.iterations;
    diag.duality_gap = sol.gap;
    Ok(assemble(ds, mu, opts, sol.alpha, diag))
}

/// `P` in orthonormal coordinates of its affine hull, `z = base + U y`.
/// The ellipsoid needs a body with interior; `P` is flat whenever a class
/// is pinned (`μ·m = 1`) or the classes span fewer than `d` directions.
struct AffineRestriction<'a> {
    body: &'a DifferenceBody,
    base: Vec<f64>,
    basis: DMatrix<f64>,
}

impl<'a> AffineRestriction<'a> {
    fn new(ds: &LabeledDataset, mu: f64, body: &'a DifferenceBody) -> Result<Self> {
        let d = ds.dim();
        // span of within-class differences, for classes that are not pinned
        let mut gram = DMatrix::<f64>::zeros(d, d);
        for label in [Label::Positive, Label::Negative] {
            let idx = ds.indices(label);
            if mu * idx.len() as f64 <= 1.0 + 1e-12 {
                continue;
            }
            let first = DVector::from_column_slice(ds.point(idx[0]));
            for &i in &idx[1..] {
                let diff = DVector::from_column_slice(ds.point(i)) - &first;
                gram.ger(1.0, &diff, &diff, 1.0);
            }
        }
        let eig = gram.symmetric_eigen();
        let top = eig.eigenvalues.amax();
        let keep: Vec<usize> = (0..d)
            .filter(|&j| eig.eigenvalues[j] > 1e-18 * top && top > 0.0)
            .collect();
        let basis = DMatrix::from_fn(d, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
        let mut start = vec![0.0; d];
        start[0] = 1.0;
        let base = body.maximize(&start)?.point;
        Ok(AffineRestriction { body, base, basis })
    }

    fn lift(&self, y: &[f64]) -> Vec<f64> {
        let z = &self.basis * DVector::from_column_slice(y);
        z.iter().zip(&self.base).map(|(a, b)| a + b).collect()
    }
}

impl LinearOracle for AffineRestriction<'_> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }
    fn witness_len(&self) -> usize {
        self.body.witness_len()
    }
    fn maximize(&self, direction: &[f64]) -> Result<Vertex> {
        let dir = &self.basis * DVector::from_column_slice(direction);
        let v = self.body.maximize(dir.as_slice())?;
        let offset = DVector::from_column_slice(&v.point) - DVector::from_column_slice(&self.base);
        let point = self.basis.tr_mul(&offset).iter().copied().collect();
        Ok(Vertex {
            point,
            weights: v.weights,
        })
    }
}

/// `‖base + U y‖²`.
struct ShiftedSquaredNorm<'a, 'b> {
    restriction: &'b AffineRestriction<'a>,
}

impl ConvexObjective for ShiftedSquaredNorm<'_, '_> {
    fn value(&self, y: &[f64]) -> f64 {
        norm_sq(&self.restriction.lift(y))
    }
    fn subgradient(&self, y: &[f64]) -> Vec<f64> {
        let z = DVector::from_vec(self.restriction.lift(y));
        (self.restriction.basis.tr_mul(&z) * 2.0)
            .iter()
            .copied()
            .collect()
    }
}

// Dataset-order weights from body-order weights (positives, then negatives).
fn scatter(ds: &LabeledDataset, body_weights: &[f64]) -> Vec<f64> {
    let mut alpha = vec![0.0; ds.len()];
    let order = ds.positive().iter().chain(ds.negative());
    for (&i, &a) in order.zip(body_weights) {
        alpha[i] = a;
    }
    alpha
}

fn gather(ds: &LabeledDataset, alpha: &[f64]) -> Vec<f64> {
    ds.positive()
        .iter()
        .chain(ds.negative())
        .map(|&i| alpha[i])
        .collect()
}

fn reconstruct(ds: &LabeledDataset, alpha: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; ds.dim()];
    for (i, (&a, l)) in alpha.iter().zip(ds.labels()).enumerate() {
        if a != 0.0 {
            let s = a * l.sign();
            w.iter_mut()
                .zip(ds.point(i))
                .for_each(|(wj, x)| *wj += s * x);
        }
    }
    w
}

/// `‖v‖² - min_{z in P} v·z`.
fn global_gap(body: &DifferenceBody, v: &[f64]) -> Result<f64> {
    if v.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let s = body.maximize(&neg)?;
    Ok((norm_sq(v) - dot(v, &s.point)).max(0.0))
}

fn refine(
    ds: &LabeledDataset,
    body: &DifferenceBody,
    mu: f64,
    v0: &[f64],
    alpha0: &[f64],
    ellipsoid_gap: f64,
    gap_tol: f64,
) -> Result<Solution> {
    let origin = vec![0.0; ds.dim()];
    let radius = ds.points().max_norm();
    let v0n = norm(v0);
    // ‖v0 - v*‖² <= objective gap, so the direction is usable once
    // ‖v0‖ clears that radius
    let err = ellipsoid_gap.max(0.0).sqrt();
    if v0n > 2.0 * err && v0n > 0.0 {
        let tol = 1e-7 + 4.0 * radius * err / v0n;
        let (tp, tm) = transition_levels(ds, mu, v0)?;
        let faces = transition_decompose_with_tol(ds, mu, v0, tp, tm, tol)?;
        if let Ok((alpha, iterations)) = solve_face(ds, mu, &faces, gap_tol) {
            let v = reconstruct(ds, &alpha);
            let gap = global_gap(body, &v)?;
            if gap <= 10.0 * gap_tol {
                return Ok(Solution {
                    alpha,
                    gap,
                    iterations,
                    recovery: Recovery::Face,
                });
            }
        }
    }
    let warm = ActiveSet::from_vertex(Vertex {
        point: v0.to_vec(),
        weights: gather(ds, alpha0),
    });
    let opts = NearestPointOptions {
        tol: gap_tol,
        ..Default::default()
    };
    let (res, _) = nearest_point_warm(body, &origin, &opts, Some(warm))?;
    Ok(Solution {
        alpha: scatter(ds, &res.weights),
        gap: res.duality_gap,
        iterations: res.iterations,
        recovery: Recovery::Polish,
    })
}

// Minimum norm over the face: capped weights fixed at μ, zero weights at
// 0, transitional weights free with whatever mass remains.
fn solve_face(
    ds: &LabeledDataset,
    mu: f64,
    faces: &TransitionReport,
    gap_tol: f64,
) -> Result<(Vec<f64>, usize)> {
    let mut alpha = vec![0.0; ds.len()];
    let mut offset = vec![0.0; ds.dim()];
    let mut hulls = Vec::with_capacity(2);
    for (label, class) in [
        (Label::Positive, &faces.plus),
        (Label::Negative, &faces.minus),
    ] {
        for &i in &class.capped {
            alpha[i] = mu;
            let s = mu * label.sign();
            offset
                .iter_mut()
                .zip(ds.point(i))
                .for_each(|(o, x)| *o += s * x);
        }
        let mass = 1.0 - mu * class.capped.len() as f64;
        let free = &class.transitional;
        if mass < -1e-12 || mass > mu * free.len() as f64 * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::Infeasible("face has the wrong mass".into()));
        }
        let hull = if free.is_empty() {
            // empty free set: a massless stand-in keeps the body well formed
            ReducedHull::with_mass(ds.points().select(&ds.indices(label)[..1]), mu, 0.0)?
        } else {
            ReducedHull::with_mass(ds.points().select(free), mu, mass.max(0.0))?
        };
        hulls.push(hull);
    }
    let minus = hulls.pop().expect("two hulls");
    let plus = hulls.pop().expect("two hulls");
    let face = DifferenceBody::new(plus, minus)?;
    let target: Vec<f64> = offset.iter().map(|x| -x).collect();
    let res = nearest_point(&face, &target, gap_tol)?;
    let (wp, wm) = face.split_weights(&res.weights);
    for (free, weights) in [
        (&faces.plus.transitional, wp),
        (&faces.minus.transitional, wm),
    ] {
        for (&i, &a) in free.iter().zip(weights) {
            alpha[i] = a;
        }
    }
    Ok((alpha, res.iterations))
}

fn assemble(
    ds: &LabeledDataset,
    mu: f64,
    opts: &TrainOptions,
    alpha: Vec<f64>,
    diagnostics: TrainDiagnostics,
) -> TrainedClassifier {
    let w = reconstruct(ds, &alpha);
    let proj = ds.points().project(&w);
    let side =
        |label: Label| -> f64 { ds.indices(label).iter().map(|&i| alpha[i] * proj[i]).sum() };
    let (b_plus, b_minus) = (side(Label::Positive), side(Label::Negative));
    let wn = norm(&w);
    let support_indices: Vec<usize> = (0..ds.len())
        .filter(|&i| alpha[i] > SUPPORT_TOL * mu)
        .collect();
    let mut clf = TrainedClassifier {
        b: 0.5 * (b_plus + b_minus),
        w,
        b_plus,
        b_minus,
        t_plus: b_plus,
        t_minus: b_minus,
        alpha,
        support_indices,
        margin: 0.0,
        xi: vec![0.0; ds.len()],
        mu,
        bias: opts.bias,
        diagnostics,
    };
    if wn <= opts.eps {
        // reduced hulls intersect: no slab
        return clf;
    }
    clf.margin = (b_plus - b_minus) / wn;
    if let Ok((tp, tm)) = transition_levels(ds, mu, &clf.w) {
        clf.t_plus = tp;
        clf.t_minus = tm;
    }
    clf.xi = (0..ds.len())
        .map(|i| match ds.label(i) {
            Label::Positive => (clf.t_plus - proj[i]).max(0.0),
            Label::Negative => (proj[i] - clf.t_minus).max(0.0),
        })
        .collect();
    if opts.bias == BiasStrategy::MinErrorsLineSearch {
        clf.b = best_bias(ds, &proj, clf.b);
    }
    clf
}

/// `w·x - b`; its sign is the predicted class.
pub fn decision_value(clf: &TrainedClassifier, x: &[f64]) -> Result<f64> {
    if x.len() != clf.w.len() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, classifier expects {}",
            x.len(),
            clf.w.len()
        )));
    }
    if clf.is_degenerate() || norm(&clf.w) == 0.0 {
        return Err(Error::UndefinedClassifier(
            "reduced hulls intersect; lower mu to obtain a slab".into(),
        ));
    }
    Ok(dot(&clf.w, x) - clf.b)
}

/// Bias minimizing training errors along `w`. Candidates are the
/// projections, midpoints between consecutive distinct projections, and the
/// halfway bias; ties go to the candidate nearest the halfway bias.
pub fn line_search_bias(clf: &TrainedClassifier, ds: &LabeledDataset) -> Result<f64> {
    if clf.is_degenerate() || norm(&clf.w) == 0.0 {
        return Err(Error::UndefinedClassifier(
            "zero margin classifier has no direction".into(),
        ));
    }
    if ds.dim() != clf.w.len() {
        return Err(Error::invalid(
            "dataset dimension does not match the classifier",
        ));
    }
    let proj = ds.points().project(&clf.w);
    Ok(best_bias(ds, &proj, 0.5 * (clf.b_plus + clf.b_minus)))
}

fn best_bias(ds: &LabeledDataset, proj: &[f64], halfway: f64) -> f64 {
    // sweep candidates in increasing order, counting errors incrementally;
    // a point is predicted positive iff its projection exceeds the bias
    let mut sorted: Vec<(f64, Label)> = proj
        .iter()
        .copied()
        .zip(ds.labels().iter().copied())
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut candidates: Vec<f64> = Vec::with_capacity(2 * sorted.len() + 1);
    for (k, &(p, _)) in sorted.iter().enumerate() {
        candidates.push(p);
        if let Some(&(q, _)) = sorted.get(k + 1) {
            if q > p {
                candidates.push(0.5 * (p + q));
            }
        }
    }
    candidates.push(halfway);
    candidates.sort_by(f64::total_cmp);

    let (np, _) = ds.class_counts();
    // bias below everything: every negative is an error
    let mut errors = sorted.len() - np;
    let mut j = 0;
    let mut best = (usize::MAX, f64::INFINITY, halfway);
    for &b in &candidates {
        while j < sorted.len() && sorted[j].0 <= b {
            match sorted[j].1 {
                Label::Positive => errors += 1,
                Label::Negative => errors -= 1,
            }
            j += 1;
        }
        let key = (errors, (b - halfway).abs());
        if key.0 < best.0 || (key.0 == best.0 && key.1 < best.1) {
            best = (key.0, key.1, b);
        }
    }
    best.2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub violation: f64,
}

impl Check {
    fn new(violation: f64, limit: f64) -> Self {
        Check {
            pass: violation <= limit,
            violation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// Box and per-class mass constraints on `α`.
    pub dual_feasibility: Check,
    /// Every point on its side of the slab up to its slack.
    pub primal_feasibility: Check,
    /// `w = Σ₊ αᵢxᵢ − Σ₋ αᵢxᵢ`.
    pub reconstruction: Check,
    pub complementary_slackness: Check,
    /// Frank-Wolfe gap of `w` over the difference body.
    pub optimality: Check,
}

impl KktReport {
    pub fn all_pass(&self) -> bool {
        [
            self.dual_feasibility,
            self.primal_feasibility,
            self.reconstruction,
            self.complementary_slackness,
            self.optimality,
        ]
        .iter()
        .all(|c| c.pass)
    }
}

/// Verifies the optimality conditions of a trained classifier against its
/// training set. Position tolerances scale with the data radius.
pub fn kkt_check(clf: &TrainedClassifier, ds: &LabeledDataset, tol: f64) -> KktReport {
    let mu = clf.mu;
    let scale = ds.points().max_norm().max(1.0);
    let wn = norm(&clf.w);
    let pos_tol = tol * scale * wn.max(tol);

    let mut dual = 0.0f64;
    let mut sums = [0.0, 0.0];
    for (i, &a) in clf.alpha.iter().enumerate() {
        dual = dual.max(-a).max(a - mu);
        sums[(ds.label(i) == Label::Negative) as usize] += a;
    }
    dual = dual.max((sums[0] - 1.0).abs()).max((sums[1] - 1.0).abs());

    let w_alpha = reconstruct(ds, &clf.alpha);
    let recon = clf
        .w
        .iter()
        .zip(&w_alpha)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let proj = ds.points().project(&clf.w);
    let mut primal = 0.0f64;
    let mut slack = 0.0f64;
    let mut capped_gap = 0.0f64;
    if !clf.is_degenerate() {
        for (i, &p) in proj.iter().enumerate() {
            // distance past the boundary toward the other class, so that
            // positive means "wrong side"
            let (over, xi) = match ds.label(i) {
                Label::Positive => (clf.t_plus - p, clf.xi[i]),
                Label::Negative => (p - clf.t_minus, clf.xi[i]),
            };
            primal = primal.max(-xi).max(over - xi);
            let a = clf.alpha[i];
            if a > tol * mu {
                // carries weight: on or beyond the boundary
                slack = slack.max(-over);
            }
            if a < mu * (1.0 - tol) {
                // not capped: on or inside the boundary
                slack = slack.max(over);
            }
            if xi > pos_tol {
                capped_gap = capped_gap.max(mu - a);
            }
        }
    }

    let optimality = DifferenceBody::from_dataset(ds, mu)
        .and_then(|body| global_gap(&body, &clf.w))
        .unwrap_or(f64::INFINITY);

    KktReport {
        dual_feasibility: Check::new(dual, tol),
        primal_feasibility: Check::new(primal, pos_tol),
        reconstruction: Check::new(recon, tol * scale),
        complementary_slackness: Check {
            pass: slack <= pos_tol && capped_gap <= tol * mu,
            violation: slack.max(capped_gap),
        },
        optimality: Check::new(optimality, tol * scale * scale),
    }
}
