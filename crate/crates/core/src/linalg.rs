//! Small dense-vector helpers shared by the solvers.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += s * x`
#[inline]
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn scale(s: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Row-major dense point set with a fixed dimension.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet {
            dim,
            data: Vec::new(),
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Self {
        let mut set = PointSet::new(dim);
        for r in rows {
            set.push(r.as_ref());
        }
        set
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.dim, "point dimension mismatch");
        self.data.extend_from_slice(row);
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// `w · x_i` for every row.
    pub fn project(&self, w: &[f64]) -> Vec<f64> {
        self.rows().map(|r| dot(r, w)).collect()
    }

    /// `Σ weights[i] · x_i`, skipping zero weights.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (r, &a) in self.rows().zip(weights) {
            if a != 0.0 {
                axpy(a, r, &mut out);
            }
        }
        out
    }

    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut out = PointSet::new(self.dim);
        for &i in idx {
            out.push(self.row(i));
        }
        out
    }

    pub fn max_norm(&self) -> f64 {
        self.rows().map(norm).fold(0.0, f64::max)
    }
}
