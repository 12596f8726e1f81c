//! Brute-force solvers for tiny instances.
//!
//! Nothing here calls into the greedy oracles or the iterative solvers, so
//! agreement between the two sides is meaningful. Everything is exhaustive
//! enumeration plus small dense solves.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::{dot, PointSet};
use crate::lmo::{ReducedHull, Zonotope};

/// Hard ceiling on instance size, whatever the config says.
pub const MAX_POINTS: usize = 10;

const FEAS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_n: usize,
    pub max_d: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_n: 8, max_d: 3 }
    }
}

impl OracleConfig {
    pub fn new(max_n: usize, max_d: usize) -> Result<Self> {
        if max_n > MAX_POINTS {
            return Err(Error::SizeLimit(format!(
                "max_n = {max_n} exceeds the enumeration limit of {MAX_POINTS}"
            )));
        }
        Ok(OracleConfig { max_n, max_d })
    }

    fn admit(&self, n: usize, d: usize) -> Result<()> {
        if n > self.max_n.min(MAX_POINTS) || d > self.max_d {
            return Err(Error::SizeLimit(format!(
                "instance with {n} points in dimension {d} exceeds limits ({} points, dimension {})",
                self.max_n, self.max_d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedVertex {
    /// Indices of the `k` points averaged into this vertex.
    pub subset: Vec<usize>,
    pub point: Vec<f64>,
}

/// Solves `A x = b` for a matrix with full column rank; `None` if the rank
/// is deficient or the system is inconsistent.
fn solve_exact(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if a.ncols() > a.nrows() || svd.singular_values.min() <= 1e-10 * smax.max(1.0) {
        return None;
    }
    let x = svd.solve(b, 1e-12).ok()?;
    let resid = (a * &x - b).amax();
    (resid <= 1e-9 * (1.0 + b.amax())).then_some(x)
}

/// Pairs `(A, B)` of disjoint index sets whose convex hulls meet, with
/// `|A| + |B| <= d + 2`. By Kirchberger's theorem two finite sets are
/// strictly separable iff no such pair splits across them. Pairs whose
/// system is rank deficient are skipped: a smaller pair already covers them.
fn intersecting_pairs(points: &PointSet) -> Vec<(u32, u32)> {
    let m = points.len();
    let d = points.dim();
    let mut pairs = Vec::new();
    for t in 1u32..(1 << m) {
        let size = t.count_ones() as usize;
        if size < 2 || size > d + 2 {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&i| t >> i & 1 == 1).collect();
        // each unordered split once: the lowest member always lands in A
        let rest_bits = size - 1;
        for sub in 0u32..(1 << rest_bits) {
            let mut a_mask = 1u32 << members[0];
            for (j, &i) in members[1..].iter().enumerate() {
                if sub >> j & 1 == 1 {
                    a_mask |= 1 << i;
                }
            }
            let b_mask = t & !a_mask;
            if b_mask == 0 {
                continue;
            }
            let mut mat = DMatrix::zeros(d + 2, size);
            for (col, &i) in members.iter().enumerate() {
                let in_a = a_mask >> i & 1 == 1;
                let sign = if in_a { 1.0 } else { -1.0 };
                for r in 0..d {
                    mat[(r, col)] = sign * points.row(i)[r];
                }
                mat[(if in_a { d } else { d + 1 }, col)] = 1.0;
            }
            let mut rhs = DVector::zeros(d + 2);
            rhs[d] = 1.0;
            rhs[d + 1] = 1.0;
            if let Some(x) = solve_exact(&mat, &rhs) {
                if x.iter().all(|&v| v >= -1e-12) {
                    pairs.push((a_mask, b_mask));
                }
            }
        }
    }
    pairs
}

fn strictly_separable(s: u32, rest: u32, pairs: &[(u32, u32)]) -> bool {
    !pairs
        .iter()
        .any(|&(a, b)| (a & !s == 0 && b & !rest == 0) || (b & !s == 0 && a & !rest == 0))
}

fn integer_inverse(mu: f64) -> Result<usize> {
    let k = (1.0 / mu).round();
    if k < 1.0 || (k * mu - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "1/μ must be an integer, got μ = {mu}"
        )));
    }
    Ok(k as usize)
}

/// All vertices of `H` for `μ = 1/k`: averages of the `k`-subsets that are
/// strictly separable from the remaining points.
pub fn enumerate_hull_vertices(
    h: &ReducedHull,
    cfg: &OracleConfig,
) -> Result<Vec<EnumeratedVertex>> {
    let points = h.points();
    let m = points.len();
    cfg.admit(m, points.dim())?;
    let k = integer_inverse(h.mu())?;
    if k > m {
        return Err(Error::invalid(format!(
            "μ = 1/{k} needs at least {k} points, have {m}"
        )));
    }
    let pairs = intersecting_pairs(points);
    let all = (1u32 << m) - 1;
    let mut out = Vec::new();
    for s in 1u32..=all {
        if s.count_ones() as usize != k || !strictly_separable(s, all & !s, &pairs) {
            continue;
        }
        let subset: Vec<usize> = (0..m).filter(|&i| s >> i & 1 == 1).collect();
        let mut point = vec![0.0; points.dim()];
        for &i in &subset {
            for (p, x) in point.iter_mut().zip(points.row(i)) {
                *p += x / k as f64;
            }
        }
        out.push(EnumeratedVertex { subset, point });
    }
    Ok(out)
}

/// A body the brute-force linear oracle understands.
#[derive(Debug, Clone, Copy)]
pub enum BruteBody<'a> {
    Zonotope(&'a Zonotope),
    /// Requires `μ = 1/k`.
    Hull(&'a ReducedHull),
}

/// `max {w·x : x in body}` by enumerating every vertex candidate.
pub fn brute_lmo(body: BruteBody<'_>, w: &[f64], cfg: &OracleConfig) -> Result<f64> {
    match body {
        BruteBody::Zonotope(z) => {
            let gens = z.generators();
            cfg.admit(gens.len(), gens.dim())?;
            if w.len() != gens.dim() {
                return Err(Error::invalid("direction has the wrong dimension"));
            }
            let m = gens.len();
            let mut best = f64::NEG_INFINITY;
            for pattern in 0u32..(1 << m) {
                let mut x = vec![0.0; gens.dim()];
                for i in (0..m).filter(|&i| pattern >> i & 1 == 1) {
                    for (xj, g) in x.iter_mut().zip(gens.row(i)) {
                        *xj += z.upper_bounds()[i] * g;
                    }
                }
                best = best.max(dot(w, &x));
            }
            Ok(best)
        }
        BruteBody::Hull(h) => {
            if w.len() != h.dim() {
                return Err(Error::invalid("direction has the wrong dimension"));
            }
            let vertices = enumerate_hull_vertices(h, cfg)?;
            Ok(vertices
                .iter()
                .map(|v| dot(w, &v.point))
                .fold(f64::NEG_INFINITY, f64::max))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Zero,
    Capped,
    Free,
}

/// Minimum of `‖Σ_{I+} αᵢxᵢ − Σ_{I−} αᵢxᵢ‖²` over `0 <= α <= μ` with unit
/// mass per class. Every assignment of each weight to {0, μ, free} with at
/// most `d + 2` free weights is solved as an equality-constrained least
/// squares problem; the best feasible candidate wins. Some optimal basic
/// solution always has this shape.
pub fn brute_nearest(ds: &LabeledDataset, mu: f64, cfg: &OracleConfig) -> Result<(f64, Vec<f64>)> {
    let n = ds.len();
    let d = ds.dim();
    cfg.admit(n, d)?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::invalid(format!("μ = {mu} is outside (0, 1]")));
    }
    let sign: Vec<f64> = ds.labels().iter().map(|l| l.sign()).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut slots = vec![Slot::Zero; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for s in slots.iter_mut() {
            *s = match c % 3 {
                0 => Slot::Zero,
                1 => Slot::Capped,
                _ => Slot::Free,
            };
            c /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| slots[i] == Slot::Free).collect();
        if free.len() > d + 2 {
            continue;
        }
        let mut residual_mass = [1.0, 1.0];
        let mut base = vec![0.0; d];
        for i in (0..n).filter(|&i| slots[i] == Slot::Capped) {
            let cls = (ds.label(i) == Label::Negative) as usize;
            residual_mass[cls] -= mu;
            for (b, x) in base.iter_mut().zip(ds.point(i)) {
                *b += sign[i] * mu * x;
            }
        }
        let has_free = |cls: usize| {
            free.iter()
                .any(|&i| (ds.label(i) == Label::Negative) as usize == cls)
        };
        let mut feasible = true;
        let mut rows = Vec::new();
        for (cls, &mass) in residual_mass.iter().enumerate() {
            if has_free(cls) {
                feasible &= mass > FEAS_TOL;
                rows.push(cls);
            } else {
                feasible &= mass.abs() <= FEAS_TOL;
            }
        }
        if !feasible {
            continue;
        }
        let mut alpha: Vec<f64> = slots
            .iter()
            .map(|s| if *s == Slot::Capped { mu } else { 0.0 })
            .collect();
        if !free.is_empty() {
            // [MᵀM Eᵀ; E 0] [z; λ] = [-Mᵀc; r]
            let f = free.len();
            let e = rows.len();
            let m = DMatrix::from_fn(d, f, |r, j| sign[free[j]] * ds.point(free[j])[r]);
            let c = DVector::from_column_slice(&base);
            let mut kkt = DMatrix::zeros(f + e, f + e);
            kkt.view_mut((0, 0), (f, f))
                .copy_from(&(m.transpose() * &m));
            let mut rhs = DVector::zeros(f + e);
            rhs.rows_mut(0, f).copy_from(&(-(m.transpose() * &c)));
            for (row, &cls) in rows.iter().enumerate() {
                for (j, &i) in free.iter().enumerate() {
                    if (ds.label(i) == Label::Negative) as usize == cls {
                        kkt[(f + row, j)] = 1.0;
                        kkt[(j, f + row)] = 1.0;
                    }
                }
                rhs[f + row] = residual_mass[cls];
            }
            let Some(sol) = solve_exact(&kkt, &rhs) else {
                continue;
            };
            if (0..f).any(|j| sol[j] < -FEAS_TOL || sol[j] > mu + FEAS_TOL) {
                continue;
            }
            for (j, &i) in free.iter().enumerate() {
                alpha[i] = sol[j].clamp(0.0, mu);
            }
        }
        let mut v = vec![0.0; d];
        for i in 0..n {
            for (vj, x) in v.iter_mut().zip(ds.point(i)) {
                *vj += sign[i] * alpha[i] * x;
            }
        }
        let value = dot(&v, &v);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, alpha));
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no feasible weights at μ = {mu}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardMargin {
    pub w: Vec<f64>,
    pub b: f64,
    /// Slab width `2/‖w‖`.
    pub margin: f64,
}

/// The standard hard-margin SVM, `min ‖w‖²` subject to `yᵢ(w·xᵢ − b) >= 1`,
/// by enumerating active constraint sets of size at most `d + 1`. Returns
/// `None` when no feasible `(w, b)` exists.
pub fn brute_hard_margin(ds: &LabeledDataset, cfg: &OracleConfig) -> Result<Option<HardMargin>> {
    let n = ds.len();
    let d = ds.dim();
    cfg.admit(n, d)?;
    let y: Vec<f64> = ds.labels().iter().map(|l| l.sign()).collect();
    let mut best: Option<HardMargin> = None;
    for set in 1u32..(1 << n) {
        let size = set.count_ones() as usize;
        if size > d + 1 {
            continue;
        }
        let active: Vec<usize> = (0..n).filter(|&i| set >> i & 1 == 1).collect();
        if !active.iter().any(|&i| y[i] > 0.0) || !active.iter().any(|&i| y[i] < 0.0) {
            continue;
        }
        // unknowns (w, b, λ): w - Σ λᵢyᵢxᵢ = 0, Σ λᵢyᵢ = 0, yᵢ(w·xᵢ - b) = 1
        let a = active.len();
        let dim = d + 1 + a;
        let mut mat = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for r in 0..d {
            mat[(r, r)] = 1.0;
            for (j, &i) in active.iter().enumerate() {
                mat[(r, d + 1 + j)] = -y[i] * ds.point(i)[r];
            }
        }
        for (j, &i) in active.iter().enumerate() {
            mat[(d, d + 1 + j)] = y[i];
            let row = d + 1 + j;
            for r in 0..d {
                mat[(row, r)] = y[i] * ds.point(i)[r];
            }
            mat[(row, d)] = -y[i];
            rhs[row] = 1.0;
        }
        let Some(sol) = solve_exact(&mat, &rhs) else {
            continue;
        };
        let w: Vec<f64> = sol.rows(0, d).iter().copied().collect();
        let b = sol[d];
        let ok = (0..n).all(|i| y[i] * (dot(&w, ds.point(i)) - b) >= 1.0 - 1e-9);
        if !ok {
            continue;
        }
        let wn = dot(&w, &w).sqrt();
        if best.as_ref().is_none_or(|h| wn < 2.0 / h.margin) {
            best = Some(HardMargin {
                margin: 2.0 / wn,
                w,
                b,
            });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hull(rows: &[[f64; 2]], mu: f64) -> ReducedHull {
        ReducedHull::new(PointSet::from_rows(2, rows), mu).unwrap()
    }

    fn dataset_a() -> LabeledDataset {
        LabeledDataset::from_classes(&[[2.0, 0.0], [3.0, 1.0]], &[[0.0, 0.0], [-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn triangle_midpoints() {
        let h = hull(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]], 0.5);
        let v = enumerate_hull_vertices(&h, &OracleConfig::default()).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|v| v.point == vec![2.0, 1.5]));
    }

    #[test]
    fn interior_point_never_a_vertex_at_mu_one() {
        let h = hull(&[[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [1.0, 1.0]], 1.0);
        let v = enumerate_hull_vertices(&h, &OracleConfig::default()).unwrap();
        let subsets: Vec<_> = v.iter().map(|v| v.subset.clone()).collect();
        assert_eq!(subsets, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn square_pairs() {
        // only the 4 edges are separable 2-subsets, not the diagonals
        let h = hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.5);
        let v = enumerate_hull_vertices(&h, &OracleConfig::default()).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn smallest_mu_gives_centroid() {
        let h = hull(&[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]], 1.0 / 3.0);
        let v = enumerate_hull_vertices(&h, &OracleConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].point[0] - 1.0).abs() < 1e-15 && (v[0].point[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_integer_inverse_rejected() {
        let h = hull(&[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]], 0.4);
        assert!(enumerate_hull_vertices(&h, &OracleConfig::default()).is_err());
    }

    #[test]
    fn size_limits() {
        assert!(OracleConfig::new(11, 3).is_err());
        let rows: Vec<[f64; 2]> = (0..9).map(|i| [i as f64, (i * i) as f64]).collect();
        let h = hull(&rows, 1.0);
        assert!(matches!(
            enumerate_hull_vertices(&h, &OracleConfig::default()),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn zonotope_single_generator() {
        let z = Zonotope::new(PointSet::from_rows(2, &[[1.0, -2.0]]), vec![3.0]).unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(
            brute_lmo(BruteBody::Zonotope(&z), &[1.0, 0.0], &cfg).unwrap(),
            3.0
        );
        assert_eq!(
            brute_lmo(BruteBody::Zonotope(&z), &[-1.0, 0.0], &cfg).unwrap(),
            0.0
        );
    }

    #[test]
    fn nearest_dataset_a() {
        let (v, alpha) = brute_nearest(&dataset_a(), 1.0, &OracleConfig::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        for (a, e) in alpha.iter().zip([1.0, 0.0, 1.0, 0.0]) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_coincident_centroids() {
        let ds = LabeledDataset::from_classes(&[[-1.0], [1.0]], &[[-2.0], [2.0]]).unwrap();
        let (v, _) = brute_nearest(&ds, 0.5, &OracleConfig::default()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn nearest_one_dimensional_touching() {
        let ds = LabeledDataset::from_classes(&[[0.0], [2.0]], &[[1.0], [3.0]]).unwrap();
        let cfg = OracleConfig::default();
        let (touch, _) = brute_nearest(&ds, 0.75, &cfg).unwrap();
        assert!(touch.abs() < 1e-12);
        // intervals [2(1-μ), 2μ] and [3-2μ, 1+2μ]: gap 3 - 4μ below 3/4
        let (gap, _) = brute_nearest(&ds, 0.6, &cfg).unwrap();
        assert!((gap - 0.6 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn hard_margin_dataset_a() {
        let hm = brute_hard_margin(&dataset_a(), &OracleConfig::default())
            .unwrap()
            .unwrap();
        assert!((hm.margin - 2.0).abs() < 1e-12);
        assert!((hm.w[0] - 1.0).abs() < 1e-12 && hm.w[1].abs() < 1e-12);
        assert!((hm.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hard_margin_inseparable() {
        let ds = LabeledDataset::from_classes(&[[0.0], [2.0]], &[[1.0], [3.0]]).unwrap();
        assert!(brute_hard_margin(&ds, &OracleConfig::default())
            .unwrap()
            .is_none());
    }
}
