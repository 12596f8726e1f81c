//! Labeled training data, the `(x, 1)` lift and explicit polynomial features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn opposite(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// Training vectors `x_i ∈ R^d` with labels in `{+1, -1}`.
///
/// Points are stored row-major. The positive and negative index sets are
/// computed once at construction and always cover `0..n` disjointly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledDataset {
    points: PointSet,
    labels: Vec<Label>,
    #[serde(skip)]
    positive: Vec<usize>,
    #[serde(skip)]
    negative: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(points: PointSet, labels: Vec<Label>) -> Result<Self> {
        if points.dim() == 0 {
            return Err(Error::Validation(
                "points must have dimension d >= 1".into(),
            ));
        }
        if points.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.len() < 2 {
            return Err(Error::Validation("need at least two points".into()));
        }
        if let Some(i) = points.rows().position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(Error::Validation(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        let positive: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == Label::Positive)
            .collect();
        let negative: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == Label::Negative)
            .collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(Error::Validation(
                "both classes must be present (single-class data)".into(),
            ));
        }
        Ok(LabeledDataset {
            points,
            labels,
            positive,
            negative,
        })
    }

    /// Builds a dataset from explicit rows; `labels[i]` is `+1` or `-1`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: &[f64]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if let Some(i) = rows.iter().position(|r| r.as_ref().len() != dim) {
            return Err(Error::Validation(format!(
                "row {i} has dimension {} (expected {dim})",
                rows[i].as_ref().len()
            )));
        }
        let labels = labels
            .iter()
            .map(|&y| label_from_value(y))
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(PointSet::from_rows(dim, rows), labels)
    }

    /// Positive points first, then negative.
    pub fn from_classes<R: AsRef<[f64]>>(positive: &[R], negative: &[R]) -> Result<Self> {
        let rows: Vec<&[f64]> = positive
            .iter()
            .chain(negative)
            .map(|r| r.as_ref())
            .collect();
        let labels: Vec<f64> = std::iter::repeat_n(1.0, positive.len())
            .chain(std::iter::repeat_n(-1.0, negative.len()))
            .collect();
        LabeledDataset::from_rows(&rows, &labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    pub fn negative(&self) -> &[usize] {
        &self.negative
    }

    pub fn indices(&self, label: Label) -> &[usize] {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }

    pub fn class_points(&self, label: Label) -> PointSet {
        self.points.select(self.indices(label))
    }

    pub fn class_counts(&self) -> (usize, usize) {
        (self.positive.len(), self.negative.len())
    }

    /// Same labels, every point replaced by `f(x_i)`.
    pub fn map_points<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mapped: Vec<Vec<f64>> = self.points.rows().map(&mut f).collect();
        let dim = mapped[0].len();
        if mapped.iter().any(|r| r.len() != dim) {
            return Err(Error::Validation(
                "mapped points disagree in dimension".into(),
            ));
        }
        LabeledDataset::new(PointSet::from_rows(dim, &mapped), self.labels.clone())
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        self.map_points(|x| x.iter().zip(t).map(|(a, b)| a + b).collect())
            .expect("translation preserves validity")
    }
}

impl<'de> Deserialize<'de> for LabeledDataset {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            points: PointSet,
            labels: Vec<Label>,
        }
        let raw = Raw::deserialize(de)?;
        LabeledDataset::new(raw.points, raw.labels).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn label_from_value(y: f64) -> Result<Label> {
    if y == 1.0 {
        Ok(Label::Positive)
    } else if y == -1.0 {
        Ok(Label::Negative)
    } else {
        Err(Error::Validation(format!("label {y} is not +1 or -1")))
    }
}

/// `v = (x, 1) ∈ R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector(Vec<f64>);

impl LiftedVector {
    pub fn new(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::invalid("cannot lift an empty vector"));
        }
        let mut v = Vec::with_capacity(x.len() + 1);
        v.extend_from_slice(x);
        v.push(1.0);
        Ok(LiftedVector(v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The original `x`, i.e. all but the trailing 1.
    pub fn base(&self) -> &[f64] {
        &self.0[..self.0.len() - 1]
    }
}

impl AsRef<[f64]> for LiftedVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Lifted vectors of the positive and negative classes, in index order.
pub fn lift_dataset(ds: &LabeledDataset) -> (Vec<LiftedVector>, Vec<LiftedVector>) {
    let lift = |idx: &[usize]| {
        idx.iter()
            .map(|&i| LiftedVector::new(ds.point(i)).expect("d >= 1"))
            .collect::<Vec<_>>()
    };
    (lift(ds.positive()), lift(ds.negative()))
}

/// Homogeneous polynomial feature map of degree `p` on `R^d`.
///
/// Coordinates are the degree-`p` monomials in graded-lexicographic order of
/// their index multisets `i_1 <= ... <= i_p`, each scaled by the square root
/// of its multinomial coefficient so that `Φ(v)·Φ(w) = (v·w)^p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub degree: u32,
    pub input_dim: usize,
    pub lifted_dim: usize,
}

impl FeatureMapSpec {
    pub fn new(input_dim: usize, degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("polynomial degree must be >= 1"));
        }
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be >= 1"));
        }
        let lifted_dim = binomial(input_dim as u64 + degree as u64 - 1, degree as u64)
            .and_then(|b| usize::try_from(b).ok())
            .ok_or_else(|| Error::invalid("lifted dimension overflows"))?;
        Ok(FeatureMapSpec {
            degree,
            input_dim,
            lifted_dim,
        })
    }

    /// Index multisets and their scale factors, in output order.
    pub fn monomials(&self) -> Vec<(Vec<usize>, f64)> {
        let p = self.degree as usize;
        let d = self.input_dim;
        let mut out = Vec::with_capacity(self.lifted_dim);
        let mut idx = vec![0usize; p];
        loop {
            out.push((idx.clone(), multinomial(&idx).sqrt()));
            // next non-decreasing sequence in lex order
            let mut k = p;
            while k > 0 && idx[k - 1] == d - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            let v = idx[k - 1];
            for slot in idx.iter_mut().skip(k) {
                *slot = v;
            }
        }
        out
    }

    pub fn map(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::invalid(format!(
                "expected a vector of length {}, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(self
            .monomials()
            .iter()
            .map(|(idx, c)| c * idx.iter().map(|&i| x[i]).product::<f64>())
            .collect())
    }

    pub fn map_dataset(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        if ds.dim() != self.input_dim {
            return Err(Error::invalid(
                "dataset dimension does not match feature map",
            ));
        }
        let monomials = self.monomials();
        ds.map_points(|x| {
            monomials
                .iter()
                .map(|(idx, c)| c * idx.iter().map(|&i| x[i]).product::<f64>())
                .collect()
        })
    }
}

/// `Φ(x)` for the degree-`p` polynomial kernel `(v·w)^p`.
pub fn polynomial_feature_map(x: &[f64], degree: u32) -> Result<Vec<f64>> {
    FeatureMapSpec::new(x.len(), degree)?.map(x)
}

pub fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

// p! / Π c_j! for the run lengths c_j of a sorted index sequence
fn multinomial(sorted_idx: &[usize]) -> f64 {
    let mut result = 1.0;
    let mut seen = 0usize;
    let mut run = 0usize;
    for (k, &i) in sorted_idx.iter().enumerate() {
        if k > 0 && i == sorted_idx[k - 1] {
            run += 1;
        } else {
            run = 1;
        }
        seen += 1;
        result *= seen as f64 / run as f64;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use proptest::prelude::*;

    #[test]
    fn lift_appends_one() {
        let v = LiftedVector::new(&[3.0, -1.0]).unwrap();
        assert_eq!(v.as_slice(), &[3.0, -1.0, 1.0]);
        assert_eq!(v.base(), &[3.0, -1.0]);
        assert!(LiftedVector::new(&[]).is_err());
    }

    #[test]
    fn lift_dataset_partitions() {
        let ds = LabeledDataset::from_rows(
            &[[0.0, 1.0], [1.0, 1.0], [2.0, 0.0], [3.0, 3.0]],
            &[1.0, -1.0, 1.0, -1.0],
        )
        .unwrap();
        let (p, n) = lift_dataset(&ds);
        assert_eq!(p.len(), 2);
        assert_eq!(n.len(), 2);
        assert_eq!(p[1].as_slice(), &[2.0, 0.0, 1.0]);
        assert_eq!(n[0].as_slice(), &[1.0, 1.0, 1.0]);
        assert!(p.iter().chain(&n).all(|v| v.as_slice()[2] == 1.0));
    }

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::from_rows(&[[0.0], [1.0]], &[1.0, 1.0]).is_err());
        assert!(LabeledDataset::from_rows(&[[0.0]], &[1.0]).is_err());
        assert!(LabeledDataset::from_rows(&[[0.0], [1.0]], &[1.0, 0.5]).is_err());
        let empty: [[f64; 0]; 2] = [[], []];
        assert!(LabeledDataset::from_rows(&empty, &[1.0, -1.0]).is_err());
        assert!(LabeledDataset::from_rows(&[vec![0.0], vec![1.0, 2.0]], &[1.0, -1.0]).is_err());
        assert!(LabeledDataset::from_rows(&[[f64::NAN], [1.0]], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn duplicate_points_kept_distinct() {
        let ds = LabeledDataset::from_rows(&[[1.0], [1.0], [2.0]], &[1.0, 1.0, -1.0]).unwrap();
        assert_eq!(ds.positive(), &[0, 1]);
    }

    #[test]
    fn quadratic_map_in_the_plane() {
        let (a, b) = (1.5, -0.5);
        let phi = polynomial_feature_map(&[a, b], 2).unwrap();
        assert_eq!(phi.len(), 3);
        assert!((phi[0] - a * a).abs() < 1e-15);
        assert!((phi[1] - 2f64.sqrt() * a * b).abs() < 1e-15);
        assert!((phi[2] - b * b).abs() < 1e-15);
    }

    #[test]
    fn kernel_identity_small_case() {
        let pv = polynomial_feature_map(&[1.0, 2.0], 2).unwrap();
        let pw = polynomial_feature_map(&[3.0, 1.0], 2).unwrap();
        assert!((dot(&pv, &pw) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_dimension_formula() {
        for d in 1..6usize {
            for p in 1..5u32 {
                let map = FeatureMapSpec::new(d, p).unwrap();
                assert_eq!(
                    map.lifted_dim as u64,
                    binomial((d + p as usize - 1) as u64, p as u64).unwrap()
                );
                assert_eq!(map.monomials().len(), map.lifted_dim);
            }
        }
        assert_eq!(FeatureMapSpec::new(2, 2).unwrap().lifted_dim, 3);
        assert_eq!(FeatureMapSpec::new(3, 3).unwrap().lifted_dim, 10);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(matches!(
            polynomial_feature_map(&[1.0], 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn kernel_identity(
            v in prop::collection::vec(-3.0f64..3.0, 1..5),
            w_seed in prop::collection::vec(-3.0f64..3.0, 5),
            p in 1u32..4,
        ) {
            let w = &w_seed[..v.len()];
            let lhs = dot(
                &polynomial_feature_map(&v, p).unwrap(),
                &polynomial_feature_map(w, p).unwrap(),
            );
            let rhs = dot(&v, w).powi(p as i32);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }
    }
}
