//! Central-cut ellipsoid method driven by separation oracles.
//!
//! The localizing ellipsoid is `{x : (x - c)ᵀ Q⁻¹ (x - c) <= 1}`. At each
//! step the center is tested against every oracle; the first violated one
//! supplies a feasibility cut, otherwise the objective subgradient at the
//! center supplies an objective cut. Either way the half-ellipsoid
//! `{a·x <= a·c}` is enclosed by
//!
//! ```text
//! c' = c - b / (k+1),   Q' = σ (Q - 2/(k+1) b bᵀ),   b = Q a / sqrt(aᵀ Q a)
//! ```
//!
//! with `σ` chosen so that `det Q' = e^{-1/(k+1)} det Q` exactly: the
//! minimum-volume factor `k²/(k²-1)` inflated to the classical rate, which
//! also absorbs rounding. In one dimension the update is bisection with the
//! same inflation.
//!
//! Every objective cut certifies the lower bound `f(c) - sqrt(gᵀ Q g)`, so
//! the reported gap is an upper bound on the suboptimality of the best
//! feasible center.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::lmo::{LinearOracle, Zonotope};
use crate::nearest::{Separation, SeparationOracle};

pub const DEFAULT_EPS: f64 = 1e-7;
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// A convex set presented through membership-or-cut queries.
pub trait Separator {
    fn dim(&self) -> usize;
    fn separate(&mut self, point: &[f64]) -> Result<Separation>;
}

impl<L: LinearOracle> Separator for SeparationOracle<L> {
    fn dim(&self) -> usize {
        self.body().dim()
    }
    fn separate(&mut self, point: &[f64]) -> Result<Separation> {
        SeparationOracle::separate(self, point)
    }
}

/// Closure adapter for [`Separator`].
pub struct FnSeparator<F> {
    dim: usize,
    f: F,
}

impl<F: FnMut(&[f64]) -> Result<Separation>> FnSeparator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSeparator { dim, f }
    }
}

impl<F: FnMut(&[f64]) -> Result<Separation>> Separator for FnSeparator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn separate(&mut self, point: &[f64]) -> Result<Separation> {
        (self.f)(point)
    }
}

pub trait ConvexObjective {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

/// `‖x‖²`
pub struct SquaredNorm;

impl ConvexObjective for SquaredNorm {
    fn value(&self, x: &[f64]) -> f64 {
        dot(x, x)
    }
    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 2.0 * v).collect()
    }
}

/// `c·x`
pub struct Linear(pub Vec<f64>);

impl ConvexObjective for Linear {
    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }
    fn subgradient(&self, _x: &[f64]) -> Vec<f64> {
        self.0.clone()
    }
}

#[derive(Debug, Clone)]
pub struct EllipsoidOptions {
    /// The feasible region must lie in the ball of this radius about `center`.
    pub radius: f64,
    pub center: Option<Vec<f64>>,
    /// Target gap on the objective.
    pub eps: f64,
    /// Defaults to `2k(k+1)·ln(R/eps) + 1000`.
    pub max_iter: Option<usize>,
    /// Record `ln det Q` after every step.
    pub trace: bool,
}

impl EllipsoidOptions {
    pub fn new(radius: f64) -> Self {
        EllipsoidOptions {
            radius,
            center: None,
            eps: DEFAULT_EPS,
            max_iter: None,
            trace: false,
        }
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn trace(mut self, yes: bool) -> Self {
        self.trace = yes;
        self
    }

    pub fn max_iter(mut self, n: usize) -> Self {
        self.max_iter = Some(n);
        self
    }

    pub fn iteration_cap(&self, k: usize) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let k = k as f64;
            let ratio = (self.radius / self.eps).max(std::f64::consts::E);
            (2.0 * k * (k + 1.0) * ratio.ln()).ceil() as usize + 1000
        })
    }
}

/// Ellipsoid `{c + L u : ‖u‖ <= 1}`, so that `Q = L Lᵀ`. Updating the
/// factor rather than `Q` keeps `Q` symmetric positive semidefinite by
/// construction and loses far less precision as the ellipsoid flattens.
#[derive(Debug, Clone)]
pub struct EllipsoidState {
    pub center: DVector<f64>,
    pub factor: DMatrix<f64>,
    pub iterations: usize,
}

impl EllipsoidState {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        let k = center.len();
        EllipsoidState {
            center: DVector::from_vec(center),
            factor: DMatrix::identity(k, k) * radius,
            iterations: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// The shape matrix `Q = L Lᵀ`.
    pub fn shape(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }

    /// `ln det Q`, from a QR factorization of `L`.
    pub fn log_det(&self) -> f64 {
        let r = self.factor.clone().qr().r();
        (0..self.dim()).map(|i| 2.0 * r[(i, i)].abs().ln()).sum()
    }

    /// `max {a·x : x in E} - a·c = ‖Lᵀa‖`.
    pub fn width(&self, a: &[f64]) -> f64 {
        (self.factor.tr_mul(&DVector::from_column_slice(a))).norm()
    }

    /// Keep `{a·x <= a·c}`.
    pub fn cut(&mut self, a: &[f64]) -> Result<()> {
        let k = self.dim();
        let lta = self.factor.tr_mul(&DVector::from_column_slice(a));
        let width = lta.norm();
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Conditioning(format!(
                "cut direction has width {width:e}"
            )));
        }
        let g = lta / width;
        let b = &self.factor * &g;
        let kf = k as f64;
        let rate = (-1.0 / (kf + 1.0)).exp();
        if k == 1 {
            self.center -= &b * 0.5;
            self.factor *= rate.sqrt();
        } else {
            // L' = sqrt(σ) (L - β b gᵀ) gives Q' = σ (Q - τ b bᵀ) with
            // 2β - β² = τ
            let tau = 2.0 / (kf + 1.0);
            let sigma = (rate / (1.0 - tau)).powf(1.0 / kf);
            let beta = 1.0 - (1.0 - tau).sqrt();
            self.center -= &b / (kf + 1.0);
            self.factor.ger(-beta, &b, &g, 1.0);
            self.factor *= sigma.sqrt();
        }
        if !self.factor.iter().all(|v| v.is_finite()) || !self.center.iter().all(|v| v.is_finite())
        {
            return Err(Error::Conditioning(
                "ellipsoid left the floating-point range".into(),
            ));
        }
        self.iterations += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    VolumeExhausted,
    IterationCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    Feasibility,
    Objective,
}

/// Projection of the best center onto one oracle's body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    /// Best center that passed every oracle.
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Certified bound on the optimum (a lower bound when minimizing).
    pub bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// One per oracle, at `best_point`.
    pub witnesses: Vec<Witness>,
    pub feasibility_cuts: usize,
    pub objective_cuts: usize,
    /// `ln det Q` before the first step and after every step, if traced.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub log_det_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub cut_trace: Vec<CutKind>,
}

/// Minimizes a convex objective over the intersection of the oracles'
/// sets, which must lie in the ball of `opts.radius` about the start center.
pub fn ellipsoid_minimize(
    oracles: &mut [&mut dyn Separator],
    objective: &dyn ConvexObjective,
    opts: &EllipsoidOptions,
) -> Result<SolveReport> {
    let k = oracles
        .first()
        .map(|o| o.dim())
        .ok_or_else(|| Error::invalid("at least one separation oracle is required"))?;
    if oracles.iter().any(|o| o.dim() != k) {
        return Err(Error::invalid("oracles disagree on dimension"));
    }
    if k == 0 {
        return Err(Error::invalid("zero-dimensional problem"));
    }
    if !(opts.eps > 0.0) || !(opts.radius > 0.0) {
        return Err(Error::invalid("radius and eps must be positive"));
    }
    let center = opts.center.clone().unwrap_or_else(|| vec![0.0; k]);
    if center.len() != k {
        return Err(Error::invalid("start center has the wrong dimension"));
    }
    let mut state = EllipsoidState::ball(center, opts.radius);
    let cap = opts.iteration_cap(k);
    // stop once the volume is below that of an eps-ball
    let log_det_floor = 2.0 * k as f64 * opts.eps.ln();
    // each step shrinks the volume by exactly e^{-1/(k+1)}
    let mut log_det = 2.0 * k as f64 * opts.radius.ln();
    let step_decrease = 1.0 / (k as f64 + 1.0);

    let mut best: Option<(Vec<f64>, f64, Vec<Witness>)> = None;
    let mut bound = f64::NEG_INFINITY;
    let mut log_det_trace = Vec::new();
    let mut cut_trace = Vec::new();
    let (mut feas_cuts, mut obj_cuts) = (0, 0);
    if opts.trace {
        log_det_trace.push(state.log_det());
    }

    let termination = loop {
        let c: Vec<f64> = state.center.iter().copied().collect();
        let mut witnesses = Vec::with_capacity(oracles.len());
        let mut cut = None;
        for oracle in oracles.iter_mut() {
            match oracle.separate(&c)? {
                Separation::Inside { point, weights } => witnesses.push(Witness { point, weights }),
                Separation::Hyperplane { normal, .. } => {
                    cut = Some(normal);
                    break;
                }
            }
        }
        let (a, kind) = match cut {
            Some(normal) => (normal, CutKind::Feasibility),
            None => {
                let f = objective.value(&c);
                let g = objective.subgradient(&c);
                if best.as_ref().is_none_or(|b| f < b.1) {
                    best = Some((c.clone(), f, witnesses));
                }
                if norm(&g) == 0.0 {
                    // unconstrained minimizer is feasible
                    bound = f;
                    break Termination::ToleranceMet;
                }
                bound = bound.max(f - state.width(&g));
                (g, CutKind::Objective)
            }
        };
        if let Some((_, f, _)) = &best {
            if f - bound <= opts.eps {
                break Termination::ToleranceMet;
            }
        }
        if state.iterations >= cap {
            break Termination::IterationCap;
        }
        if log_det <= log_det_floor {
            break Termination::VolumeExhausted;
        }
        state.cut(&a)?;
        log_det -= step_decrease;
        match kind {
            CutKind::Feasibility => feas_cuts += 1,
            CutKind::Objective => obj_cuts += 1,
        }
        if opts.trace {
            log_det_trace.push(state.log_det());
            cut_trace.push(kind);
        }
    };

    let Some((best_point, best_value, witnesses)) = best else {
        return Err(Error::Infeasible(format!(
            "no feasible center after {} iterations; final ellipsoid centered at {:?} with ln det {:.3}",
            state.iterations,
            state.center.as_slice(),
            state.log_det()
        )));
    };
    Ok(SolveReport {
        best_point,
        best_value,
        bound,
        gap: (best_value - bound).max(0.0),
        iterations: state.iterations,
        termination,
        witnesses,
        feasibility_cuts: feas_cuts,
        objective_cuts: obj_cuts,
        log_det_trace,
        cut_trace,
    })
}

/// Maximizes coordinate `coord` over `Z₁ ∩ Z₂`. Membership in the
/// intersection is decided by separating against each zonotope in turn.
///
/// The report is in the maximization sense: `best_value` is the largest
/// coordinate found and `bound` an upper bound on the optimum.
pub fn ellipsoid_max_coordinate(
    z1: &Zonotope,
    z2: &Zonotope,
    coord: usize,
    opts: Option<EllipsoidOptions>,
) -> Result<SolveReport> {
    if z1.dim() != z2.dim() {
        return Err(Error::invalid("zonotopes live in different dimensions"));
    }
    let k = z1.dim();
    if coord >= k {
        return Err(Error::invalid(format!(
            "coordinate {coord} out of range for dimension {k}"
        )));
    }
    let opts =
        opts.unwrap_or_else(|| EllipsoidOptions::new(z1.norm_bound().min(z2.norm_bound()) + 1.0));
    let mut o1 = SeparationOracle::new(z1, DEFAULT_FEASIBILITY_TOL).early_exit(true);
    let mut o2 = SeparationOracle::new(z2, DEFAULT_FEASIBILITY_TOL).early_exit(true);
    let mut objective = vec![0.0; k];
    objective[coord] = -1.0;
    let mut report = ellipsoid_minimize(&mut [&mut o1, &mut o2], &Linear(objective), &opts)?;
    report.best_value = -report.best_value;
    report.bound = -report.bound;
    Ok(report)
}
