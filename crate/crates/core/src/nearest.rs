//! Nearest point of a convex body to a target, given only a linear oracle.
//!
//! The default method is Wolfe's minimum-norm-point scheme: the iterate is
//! kept as a convex combination of oracle vertices (the corral) and, after
//! each new vertex, moved to the affine minimizer of the corral, backing
//! off toward the current iterate whenever that leaves the simplex. An
//! away-step Frank–Wolfe variant with exact line search is also provided.
//!
//! Both routes expose the Frank–Wolfe duality gap `(x - q)·(x - s)` where
//! `s` is the oracle answer for direction `q - x`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dist_sq, dot, norm, norm_sq, sub};
use crate::lmo::{LinearOracle, Vertex};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Wolfe,
    AwayStep,
}

#[derive(Debug, Clone, Copy)]
pub struct NearestPointOptions {
    /// Absolute bound on the duality gap.
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    /// Record `‖x - q‖²` after every iteration.
    pub trace: bool,
}

impl Default for NearestPointOptions {
    fn default() -> Self {
        NearestPointOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            method: Method::Wolfe,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NearestPointResult {
    pub point: Vec<f64>,
    /// `‖point - q‖²`.
    pub squared_norm: f64,
    pub weights: Vec<f64>,
    pub duality_gap: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<f64>,
}

/// Convex combination of oracle vertices; reusable as a warm start.
#[derive(Debug, Clone, Default)]
pub struct ActiveSet {
    atoms: Vec<Vertex>,
    lambda: Vec<f64>,
}

impl ActiveSet {
    pub fn from_vertex(v: Vertex) -> Self {
        ActiveSet {
            atoms: vec![v],
            lambda: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.atoms[0].point.len()];
        for (a, &l) in self.atoms.iter().zip(&self.lambda) {
            axpy(l, &a.point, &mut x);
        }
        x
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.atoms[0].weights.len()];
        for (a, &l) in self.atoms.iter().zip(&self.lambda) {
            axpy(l, &a.weights, &mut w);
        }
        w
    }

    fn prune(&mut self, eps: f64) {
        let mut k = 0;
        while k < self.atoms.len() {
            if self.lambda[k] <= eps && self.atoms.len() > 1 {
                self.atoms.swap_remove(k);
                self.lambda.swap_remove(k);
            } else {
                k += 1;
            }
        }
        let s: f64 = self.lambda.iter().sum();
        self.lambda.iter_mut().for_each(|l| *l /= s);
    }

    fn position(&self, v: &Vertex) -> Option<usize> {
        self.atoms.iter().position(|a| a.point == v.point)
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    /// Duality gap at most the tolerance.
    Converged,
    /// `‖x - q‖` at most the membership tolerance.
    Inside,
    /// A strictly separating hyperplane was found (early exit mode).
    Separated,
    /// No further progress possible in floating point.
    Stalled,
    IterationCap,
}

pub(crate) struct Run {
    pub set: ActiveSet,
    pub x: Vec<f64>,
    pub gap: f64,
    /// Last oracle vertex, for direction `q - x`.
    pub last: Option<Vertex>,
    pub iterations: usize,
    pub stop: Stop,
    pub trace: Vec<f64>,
}

pub(crate) struct StopRule {
    pub gap_tol: f64,
    /// Stop as soon as `‖x - q‖` drops to this.
    pub inside_tol: Option<f64>,
    /// Stop as soon as `a·q - max_z a·z` reaches this, `a = (q-x)/‖q-x‖`.
    pub separation: Option<f64>,
}

const WEIGHT_EPS: f64 = 1e-12;

pub(crate) fn run<L: LinearOracle + ?Sized>(
    lmo: &L,
    q: &[f64],
    warm: Option<ActiveSet>,
    rule: &StopRule,
    opts: &NearestPointOptions,
) -> Result<Run> {
    if q.len() != lmo.dim() {
        return Err(Error::invalid(format!(
            "target has length {}, body lives in dimension {}",
            q.len(),
            lmo.dim()
        )));
    }
    if !(rule.gap_tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let set = match warm {
        Some(s) if !s.is_empty() => s,
        _ => {
            // any direction will do for the first vertex
            let mut dir = q.to_vec();
            if norm(&dir) == 0.0 {
                dir[0] = 1.0;
            }
            ActiveSet::from_vertex(lmo.maximize(&dir)?)
        }
    };
    match opts.method {
        Method::Wolfe => wolfe(lmo, q, set, rule, opts),
        Method::AwayStep => away_step(lmo, q, set, rule, opts),
    }
}

// Oracle call in direction q - x; returns vertex, gap and separation.
fn probe<L: LinearOracle + ?Sized>(
    lmo: &L,
    q: &[f64],
    x: &[f64],
) -> Result<Option<(Vertex, f64, f64)>> {
    let r = sub(q, x);
    let rn = norm(&r);
    if rn == 0.0 {
        return Ok(None);
    }
    let s = lmo.maximize(&r)?;
    // gap = (x-q)·(x-s) = (q-x)·(s-x)
    let gap = dot(&r, &sub(&s.point, x)).max(0.0);
    let sep = rn - gap / rn;
    Ok(Some((s, gap, sep)))
}

fn check_stop(rule: &StopRule, dist: f64, gap: f64, sep: f64) -> Option<Stop> {
    if let Some(t) = rule.inside_tol {
        if dist <= t {
            return Some(Stop::Inside);
        }
    }
    if let Some(t) = rule.separation {
        if sep >= t {
            return Some(Stop::Separated);
        }
    }
    if gap <= rule.gap_tol {
        return Some(Stop::Converged);
    }
    None
}

fn wolfe<L: LinearOracle + ?Sized>(
    lmo: &L,
    q: &[f64],
    mut set: ActiveSet,
    rule: &StopRule,
    opts: &NearestPointOptions,
) -> Result<Run> {
    let mut trace = Vec::new();
    // a warm corral need not be affinely optimal yet
    let mut x = set.point();
    if set.len() > 1 {
        minor_cycles(q, &mut set, &mut x);
    }
    let mut f = dist_sq(&x, q);
    let mut iterations = 0;
    loop {
        let Some((s, gap, sep)) = probe(lmo, q, &x)? else {
            return Ok(Run {
                set,
                x,
                gap: 0.0,
                last: None,
                iterations,
                stop: Stop::Inside,
                trace,
            });
        };
        let dist = f.sqrt();
        if let Some(stop) = check_stop(rule, dist, gap, sep) {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop,
                trace,
            });
        }
        if iterations >= opts.max_iter {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop: Stop::IterationCap,
                trace,
            });
        }
        iterations += 1;
        if set.position(&s).is_none() {
            set.atoms.push(s.clone());
            set.lambda.push(0.0);
        }
        minor_cycles(q, &mut set, &mut x);
        let f_new = dist_sq(&x, q);
        if opts.trace {
            trace.push(f_new);
        }
        if !(f_new < f) {
            // no progress left in floating point
            return Ok(Run {
                set,
                x,
                gap,
                last: None,
                iterations,
                stop: Stop::Stalled,
                trace,
            });
        }
        f = f_new;
    }
}

// Minor cycles: move toward the affine minimizer of the corral, dropping
// atoms whose weight hits zero, until the minimizer is strictly inside.
fn minor_cycles(q: &[f64], set: &mut ActiveSet, x: &mut Vec<f64>) {
    loop {
        let Some(beta) = affine_minimizer(q, &set.atoms) else {
            // affinely dependent corral: drop the lightest atom
            if set.len() <= 1 {
                *x = set.point();
                return;
            }
            let k = argmin(&set.lambda);
            set.lambda[k] = 0.0;
            set.prune(0.0);
            *x = set.point();
            continue;
        };
        if beta.iter().all(|&b| b > WEIGHT_EPS) {
            set.lambda = beta;
            *x = set.point();
            return;
        }
        let mut theta = 1.0f64;
        for (&l, &b) in set.lambda.iter().zip(&beta) {
            if b <= WEIGHT_EPS && l - b > 0.0 {
                theta = theta.min(l / (l - b));
            }
        }
        for (l, &b) in set.lambda.iter_mut().zip(&beta) {
            *l = (theta * b + (1.0 - theta) * *l).max(0.0);
        }
        let before = set.len();
        set.prune(WEIGHT_EPS);
        if set.len() == before {
            // numerical corner: force out the smallest
            let k = argmin(&set.lambda);
            set.lambda[k] = 0.0;
            set.prune(0.0);
        }
        *x = set.point();
        if set.len() == 1 {
            return;
        }
    }
}

fn argmin(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

// Coefficients (summing to one) of the point of aff(atoms) nearest to q.
fn affine_minimizer(q: &[f64], atoms: &[Vertex]) -> Option<Vec<f64>> {
    let k = atoms.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let shifted: Vec<Vec<f64>> = atoms.iter().map(|a| sub(&a.point, q)).collect();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..=i {
            let g = dot(&shifted[i], &shifted[j]);
            m[(i, j)] = g;
            m[(j, i)] = g;
        }
        scale = scale.max(m[(i, i)]);
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    for i in 0..k {
        m[(i, k)] = scale;
        m[(k, i)] = scale;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = scale;
    let sol = m.clone().lu().solve(&rhs)?;
    let beta: Vec<f64> = sol.iter().take(k).copied().collect();
    if beta.iter().any(|b| !b.is_finite()) {
        return None;
    }
    // reject near-singular solves: the point must actually be affine
    let sum: f64 = beta.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return None;
    }
    let residual = (&m * &sol - &rhs).amax();
    if residual > 1e-8 * scale {
        return None;
    }
    Some(beta.iter().map(|b| b / sum).collect())
}

fn away_step<L: LinearOracle + ?Sized>(
    lmo: &L,
    q: &[f64],
    mut set: ActiveSet,
    rule: &StopRule,
    opts: &NearestPointOptions,
) -> Result<Run> {
    let mut trace = Vec::new();
    let mut x = set.point();
    let mut iterations = 0;
    loop {
        let Some((s, gap, sep)) = probe(lmo, q, &x)? else {
            return Ok(Run {
                set,
                x,
                gap: 0.0,
                last: None,
                iterations,
                stop: Stop::Inside,
                trace,
            });
        };
        let dist = dist_sq(&x, q).sqrt();
        if let Some(stop) = check_stop(rule, dist, gap, sep) {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop,
                trace,
            });
        }
        if iterations >= opts.max_iter {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop: Stop::IterationCap,
                trace,
            });
        }
        iterations += 1;
        let r = sub(&x, q);
        // away vertex: the active atom worst for the linearization
        let (away, away_gap) = set
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (i, dot(&r, &sub(&a.point, &x))))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty active set");
        let (dir, gamma_max, toward) = if gap >= away_gap {
            (sub(&s.point, &x), 1.0, true)
        } else {
            let l = set.lambda[away];
            (
                sub(&x, &set.atoms[away].point),
                l / (1.0 - l).max(f64::MIN_POSITIVE),
                false,
            )
        };
        let dd = norm_sq(&dir);
        if dd == 0.0 {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop: Stop::Stalled,
                trace,
            });
        }
        let gamma = (-dot(&r, &dir) / dd).clamp(0.0, gamma_max);
        if gamma == 0.0 {
            return Ok(Run {
                set,
                x,
                gap,
                last: Some(s),
                iterations,
                stop: Stop::Stalled,
                trace,
            });
        }
        if toward {
            set.lambda.iter_mut().for_each(|l| *l *= 1.0 - gamma);
            match set.position(&s) {
                Some(k) => set.lambda[k] += gamma,
                None => {
                    set.atoms.push(s.clone());
                    set.lambda.push(gamma);
                }
            }
            if gamma >= 1.0 {
                set.atoms = vec![s];
                set.lambda = vec![1.0];
            }
        } else {
            set.lambda.iter_mut().for_each(|l| *l *= 1.0 + gamma);
            set.lambda[away] -= gamma;
            if gamma >= gamma_max {
                set.lambda[away] = 0.0;
            }
        }
        set.prune(0.0);
        x = set.point();
        if opts.trace {
            trace.push(dist_sq(&x, q));
        }
    }
}

fn finish(run: Run, q: &[f64], tol: f64) -> Result<NearestPointResult> {
    let converged = match run.stop {
        Stop::Converged | Stop::Inside => true,
        Stop::Stalled => run.gap <= tol,
        _ => false,
    };
    if !converged {
        return Err(Error::NonConvergence {
            iterations: run.iterations,
            gap: run.gap,
            best: run.x,
        });
    }
    Ok(NearestPointResult {
        squared_norm: dist_sq(&run.x, q),
        weights: run.set.weights(),
        point: run.x,
        duality_gap: run.gap,
        iterations: run.iterations,
        trace: run.trace,
    })
}

/// Point of the body nearest to `target`, with duality gap at most `tol`.
pub fn nearest_point<L: LinearOracle + ?Sized>(
    lmo: &L,
    target: &[f64],
    tol: f64,
) -> Result<NearestPointResult> {
    nearest_point_with(
        lmo,
        target,
        &NearestPointOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn nearest_point_with<L: LinearOracle + ?Sized>(
    lmo: &L,
    target: &[f64],
    opts: &NearestPointOptions,
) -> Result<NearestPointResult> {
    nearest_point_warm(lmo, target, opts, None).map(|(r, _)| r)
}

/// Like [`nearest_point_with`], starting from (and returning) an active set.
pub fn nearest_point_warm<L: LinearOracle + ?Sized>(
    lmo: &L,
    target: &[f64],
    opts: &NearestPointOptions,
    warm: Option<ActiveSet>,
) -> Result<(NearestPointResult, ActiveSet)> {
    let rule = StopRule {
        gap_tol: opts.tol,
        inside_tol: None,
        separation: None,
    };
    let run = run(lmo, target, warm, &rule, opts)?;
    let set = run.set.clone();
    Ok((finish(run, target, opts.tol)?, set))
}

/// Outcome of a separation query.
#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    /// The query point is within tolerance of the body; `point` is its
    /// projection and `weights` the witness.
    Inside { point: Vec<f64>, weights: Vec<f64> },
    /// `normal · q > offset >= max_z normal · z`, with a unit normal.
    Hyperplane { normal: Vec<f64>, offset: f64 },
}

impl Separation {
    pub fn is_inside(&self) -> bool {
        matches!(self, Separation::Inside { .. })
    }
}

/// Separation oracle for a body given by its linear oracle.
///
/// A query `q` is answered by projecting it onto the body. If the
/// projection `v` is within `tol` of `q` the answer is `Inside`; otherwise
/// the normal is `(q - v)/‖q - v‖` and the offset is the support value of
/// the body in that direction, obtained from one more oracle call, so the
/// hyperplane is valid exactly rather than up to the solver tolerance.
///
/// In early-exit mode the first iterate already yielding a strictly
/// separating normal is returned, which is all a central cut needs.
/// Successive calls reuse the previous active set.
pub struct SeparationOracle<L> {
    lmo: L,
    tol: f64,
    early_exit: bool,
    opts: NearestPointOptions,
    warm: Option<ActiveSet>,
    calls: usize,
    lmo_iterations: usize,
}

pub fn make_separation_oracle<L: LinearOracle>(lmo: L, tol: f64) -> SeparationOracle<L> {
    SeparationOracle::new(lmo, tol)
}

impl<L: LinearOracle> SeparationOracle<L> {
    pub fn new(lmo: L, tol: f64) -> Self {
        SeparationOracle {
            lmo,
            tol,
            early_exit: false,
            opts: NearestPointOptions::default(),
            warm: None,
            calls: 0,
            lmo_iterations: 0,
        }
    }

    pub fn early_exit(mut self, yes: bool) -> Self {
        self.early_exit = yes;
        self
    }

    pub fn with_options(mut self, opts: NearestPointOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn body(&self) -> &L {
        &self.lmo
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn solver_iterations(&self) -> usize {
        self.lmo_iterations
    }

    pub fn separate(&mut self, q: &[f64]) -> Result<Separation> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        self.calls += 1;
        let scale = 1.0 + norm(q);
        let rule = StopRule {
            // exact projection: drive the gap far below the membership scale
            gap_tol: (self.tol * self.tol).max(1e-15 * scale * scale),
            inside_tol: Some(self.tol),
            separation: if self.early_exit {
                Some(0.5 * self.tol)
            } else {
                None
            },
        };
        let run = run(&self.lmo, q, self.warm.take(), &rule, &self.opts)?;
        self.lmo_iterations += run.iterations;
        let dist = dist_sq(&run.x, q).sqrt();
        let out = if dist <= self.tol {
            Separation::Inside {
                point: run.x.clone(),
                weights: run.set.weights(),
            }
        } else {
            let normal: Vec<f64> = sub(q, &run.x).iter().map(|v| v / dist).collect();
            // support value in the normal direction
            let top = match &run.last {
                Some(v) => v.point.clone(),
                None => self.lmo.maximize(&normal)?.point,
            };
            let offset = dot(&normal, &top);
            if dot(&normal, q) <= offset {
                if matches!(run.stop, Stop::IterationCap) {
                    return Err(Error::NonConvergence {
                        iterations: run.iterations,
                        gap: run.gap,
                        best: run.x,
                    });
                }
                // numerically on the boundary
                Separation::Inside {
                    point: run.x.clone(),
                    weights: run.set.weights(),
                }
            } else {
                Separation::Hyperplane { normal, offset }
            }
        };
        self.warm = Some(run.set);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PointSet;
    use crate::lmo::{DifferenceBody, FnOracle, ReducedHull, Zonotope};

    fn segment(a: [f64; 2], b: [f64; 2]) -> ReducedHull {
        ReducedHull::new(PointSet::from_rows(2, &[a, b]), 1.0).unwrap()
    }

    fn dataset_a_body() -> DifferenceBody {
        DifferenceBody::new(
            segment([2.0, 0.0], [3.0, 1.0]),
            segment([0.0, 0.0], [-1.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn projection_onto_segment() {
        let body = segment([0.0, 0.0], [2.0, 0.0]);
        let r = nearest_point(&body, &[1.0, 5.0], 1e-9).unwrap();
        assert!((r.point[0] - 1.0).abs() < 1e-9 && r.point[1].abs() < 1e-12);
        assert!((r.squared_norm - 25.0).abs() < 1e-9);
        assert!((r.weights[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn difference_body_distance() {
        // segment-pair distances: the closest pair is (2,0) and (0,0)
        let r = nearest_point(&dataset_a_body(), &[0.0, 0.0], 1e-9).unwrap();
        assert!((r.squared_norm - 4.0).abs() < 1e-8);
        assert!((r.point[0] - 2.0).abs() < 1e-8 && r.point[1].abs() < 1e-8);
        assert!(r.duality_gap <= 1e-9);
    }

    #[test]
    fn target_inside() {
        let body =
            Zonotope::with_uniform_bound(PointSet::from_rows(2, &[[1.0, 0.0], [0.0, 1.0]]), 1.0)
                .unwrap();
        let r = nearest_point(&body, &[0.25, 0.5], 1e-9).unwrap();
        assert!(r.squared_norm <= 1e-9);
    }

    #[test]
    fn away_step_agrees() {
        let opts = NearestPointOptions {
            method: Method::AwayStep,
            tol: 1e-10,
            ..Default::default()
        };
        let r = nearest_point_with(&dataset_a_body(), &[0.0, 0.0], &opts).unwrap();
        assert!((r.squared_norm - 4.0).abs() < 1e-8);
        let body = segment([0.0, 0.0], [2.0, 0.0]);
        let r = nearest_point_with(&body, &[1.0, 5.0], &opts).unwrap();
        assert!((r.squared_norm - 25.0).abs() < 1e-8);
    }

    #[test]
    fn objective_never_increases() {
        let pts: Vec<[f64; 3]> = (0..30)
            .map(|i| {
                let t = i as f64;
                [
                    (t * 0.7).sin() * 3.0 + 4.0,
                    (t * 1.3).cos() * 2.0,
                    (t * 0.37).sin(),
                ]
            })
            .collect();
        let hull = ReducedHull::new(PointSet::from_rows(3, &pts), 0.1).unwrap();
        for method in [Method::Wolfe, Method::AwayStep] {
            let opts = NearestPointOptions {
                method,
                trace: true,
                tol: 1e-10,
                ..Default::default()
            };
            let r = nearest_point_with(&hull, &[0.0, 0.0, 0.0], &opts).unwrap();
            for w in r.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{method:?}: {} -> {}", w[0], w[1]);
            }
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(r
                .weights
                .iter()
                .all(|&a| (-1e-15..=0.1 + 1e-15).contains(&a)));
        }
    }

    #[test]
    fn closure_oracle_and_size_check() {
        let disk = FnOracle::new(2, 0, |w: &[f64]| {
            let n = norm(w);
            Ok(Vertex {
                point: vec![w[0] / n, w[1] / n],
                weights: vec![],
            })
        });
        let r = nearest_point(&disk, &[3.0, 4.0], 1e-10).unwrap();
        assert!((r.squared_norm - 16.0).abs() < 1e-6);
        assert!(nearest_point(&disk, &[1.0], 1e-9).is_err());
        assert!(nearest_point(&disk, &[1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let disk = FnOracle::new(2, 0, |w: &[f64]| {
            let n = norm(w);
            Ok(Vertex {
                point: vec![2.0 + w[0] / n, 1.0 + w[1] / n],
                weights: vec![],
            })
        });
        let opts = NearestPointOptions {
            max_iter: 2,
            tol: 1e-14,
            ..Default::default()
        };
        // projection onto a curved boundary is never exact after two atoms
        match nearest_point_with(&disk, &[6.0, 5.0], &opts) {
            Err(Error::NonConvergence { best, .. }) => assert_eq!(best.len(), 2),
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn separation_membership_and_cut() {
        let z =
            Zonotope::with_uniform_bound(PointSet::from_rows(2, &[[1.0, 2.0], [3.0, -1.0]]), 1.0)
                .unwrap();
        let mut oracle = make_separation_oracle(&z, 1e-9);
        assert!(oracle.separate(&[1.0, 2.0]).unwrap().is_inside());
        assert!(oracle.separate(&[4.0, 1.0]).unwrap().is_inside());

        let mut seg = make_separation_oracle(segment([0.0, 0.0], [1.0, 0.0]), 1e-9);
        match seg.separate(&[0.0, 1.0]).unwrap() {
            Separation::Hyperplane { normal, offset } => {
                assert!(normal[0].abs() < 1e-9 && (normal[1] - 1.0).abs() < 1e-9);
                assert!(offset.abs() < 1e-12);
            }
            s => panic!("expected a cut, got {s:?}"),
        }
    }

    #[test]
    fn separation_from_difference_body() {
        let body = dataset_a_body();
        let mut oracle = make_separation_oracle(&body, 1e-9);
        match oracle.separate(&[0.0, 0.0]).unwrap() {
            Separation::Hyperplane { normal, offset } => {
                assert!((normal[0] + 1.0).abs() < 1e-8 && normal[1].abs() < 1e-8);
                assert!((offset + 2.0).abs() < 1e-8);
                // one more oracle call confirms validity
                let z = body.maximize(&normal).unwrap().point;
                assert!(dot(&normal, &z) <= offset + 1e-9);
            }
            s => panic!("expected a cut, got {s:?}"),
        }
    }

    #[test]
    fn early_exit_cuts_are_valid() {
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| [((i * 7) % 11) as f64 - 5.0, ((i * 5) % 13) as f64 - 6.0])
            .collect();
        let hull = ReducedHull::new(PointSet::from_rows(2, &pts), 0.1).unwrap();
        let mut oracle = make_separation_oracle(&hull, 1e-9).early_exit(true);
        for q in [
            [10.0, 0.0],
            [0.0, -9.0],
            [3.0, 3.0],
            [0.1, 0.2],
            [-4.0, 5.5],
        ] {
            match oracle.separate(&q).unwrap() {
                Separation::Hyperplane { normal, offset } => {
                    assert!(dot(&normal, &q) > offset);
                    let z = hull.maximize(&normal).unwrap().point;
                    assert!(dot(&normal, &z) <= offset + 1e-12);
                }
                Separation::Inside { point, weights } => {
                    assert!(dist_sq(&point, &q).sqrt() <= 1e-9);
                    assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
