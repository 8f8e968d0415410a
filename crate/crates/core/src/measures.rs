//! Point clouds, discrete measures, mini-batch index sets, cost matrices and
//! sparse transport plans.
//!
//! All types validate their invariants on construction and are immutable
//! afterwards, so they can be shared freely across threads.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{invalid, Result};

/// Absolute tolerance for "weights lie on the probability simplex".
pub const SIMPLEX_TOL: f64 = 1e-12;

/// `n` points in `N`-dimensional space, one point per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Array2<f64>,
}

impl PointCloud {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let (n, dim) = points.dim();
        if n == 0 {
            return invalid("point cloud has no points");
        }
        if dim == 0 {
            return invalid("point cloud has zero ambient dimension");
        }
        if let Some(((i, j), v)) = points.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("coordinate ({i}, {j}) is not finite: {v}"));
        }
        Ok(Self { points })
    }

    /// Builds a cloud from row vectors, which must all have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return invalid(format!(
                "row {bad} has {} coordinates, expected {dim}",
                rows[bad].len()
            ));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let points = Array2::from_shape_vec((rows.len(), dim), flat)
            .map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
        Self::new(points)
    }

    /// A one-dimensional cloud.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let points = Array2::from_shape_vec((values.len(), 1), values.to_vec())
            .map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    /// Always false; a cloud holds at least one point.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.points
    }

    /// Rows `indices` of this cloud, in that order.
    pub fn gather(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return invalid(format!(
                "index {bad} out of range for {} points",
                self.len()
            ));
        }
        Self::new(self.points.select(Axis(0), indices))
    }
}

/// A point cloud with a weight vector on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    support: PointCloud,
    weights: Array1<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: PointCloud, weights: Array1<f64>) -> Result<Self> {
        if weights.len() != support.len() {
            return invalid(format!(
                "{} weights for {} support points",
                weights.len(),
                support.len()
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return invalid("weights must be finite and nonnegative");
        }
        let total: f64 = weights.sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return invalid(format!("weights sum to {total}, expected 1"));
        }
        Ok(Self { support, weights })
    }

    /// Uniform weights `1/n` on `support`.
    pub fn uniform(support: PointCloud) -> Self {
        let n = support.len();
        Self {
            support,
            weights: Array1::from_elem(n, 1.0 / n as f64),
        }
    }

    pub fn support(&self) -> &PointCloud {
        &self.support
    }

    pub fn weights(&self) -> ArrayView1<'_, f64> {
        self.weights.view()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| (x - w).abs() <= SIMPLEX_TOL)
    }
}

/// The empirical measure `(1/n) Σ δ_{x_i}` of a cloud.
pub fn empirical_measure(points: &PointCloud) -> DiscreteMeasure {
    DiscreteMeasure::uniform(points.clone())
}

/// Indices of one mini-batch into a parent cloud. Indices are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MiniBatchIndex {
    indices: Vec<usize>,
}

impl MiniBatchIndex {
    /// Validates that `indices` is non-empty, within `[0, n)` and free of repeats.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return invalid("mini-batch is empty");
        }
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return invalid(format!("batch index {i} out of range for {n} points"));
            }
            if std::mem::replace(&mut seen[i], true) {
                return invalid(format!("batch index {i} repeated within one batch"));
            }
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// The uniform measure on the points of `data` selected by `batch`.
pub fn batch_measure(data: &PointCloud, batch: &MiniBatchIndex) -> Result<DiscreteMeasure> {
    Ok(DiscreteMeasure::uniform(data.gather(batch.indices())?))
}

/// Dense matrix of finite nonnegative pairwise costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    values: Array2<f64>,
}

impl CostMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if let Some(((i, j), v)) = values
            .indexed_iter()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return invalid(format!(
                "cost ({i}, {j}) = {v} is not a finite nonnegative value"
            ));
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cloud_like = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cloud_like) {
            return invalid("ragged cost matrix");
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let values = Array2::from_shape_vec((rows.len(), cloud_like), flat)
            .map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
        Self::new(values)
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn transpose(&self) -> Self {
        Self {
            values: self.values.t().to_owned(),
        }
    }
}

/// A sparse coupling stored as `(row, col, mass)` triplets, together with the
/// marginals it is meant to have.
///
/// Triplets are kept sorted by `(row, col)`, without duplicates and without
/// exact zeros. Construction does not reject negative masses or marginal
/// violations; [`validate_plan`] reports those.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl TransportPlan {
    /// Builds a plan from triplets. Entries at repeated `(row, col)` pairs accumulate.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
        row_marginal: Vec<f64>,
        col_marginal: Vec<f64>,
    ) -> Result<Self> {
        if row_marginal.len() != rows || col_marginal.len() != cols {
            return invalid(format!(
                "marginal lengths ({}, {}) do not match plan shape ({rows}, {cols})",
                row_marginal.len(),
                col_marginal.len()
            ));
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, c, m) in entries {
            if r >= rows || c >= cols {
                return invalid(format!("entry ({r}, {c}) outside a {rows}x{cols} plan"));
            }
            if !m.is_finite() {
                return invalid(format!("entry ({r}, {c}) has non-finite mass {m}"));
            }
            *acc.entry((r, c)).or_insert(0.0) += m;
        }
        let entries = acc
            .into_iter()
            .filter(|&(_, m)| m != 0.0)
            .map(|((r, c), m)| (r, c, m))
            .collect();
        Ok(Self {
            rows,
            cols,
            entries,
            row_marginal,
            col_marginal,
        })
    }

    /// Sparse view of a dense matrix; exact zeros are dropped.
    pub fn from_dense(
        dense: ArrayView2<'_, f64>,
        row_marginal: Vec<f64>,
        col_marginal: Vec<f64>,
    ) -> Result<Self> {
        let (rows, cols) = dense.dim();
        let entries = dense
            .indexed_iter()
            .map(|((r, c), &m)| (r, c, m))
            .collect::<Vec<_>>();
        Self::from_triplets(rows, cols, entries, row_marginal, col_marginal)
    }

    /// `(1/a)` times the permutation matrix sending row `i` to column `perm[i]`.
    pub fn scaled_permutation(perm: &[usize]) -> Result<Self> {
        let a = perm.len();
        let w = 1.0 / a as f64;
        Self::from_triplets(
            a,
            a,
            perm.iter().enumerate().map(|(i, &j)| (i, j, w)),
            vec![w; a],
            vec![w; a],
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.2).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(r, _, m) in &self.entries {
            s[r] += m;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for &(_, c, m) in &self.entries {
            s[c] += m;
        }
        s
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(r, c)))
            .map_or(0.0, |k| self.entries[k].2)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.rows, self.cols));
        for &(r, c, m) in &self.entries {
            d[[r, c]] = m;
        }
        d
    }

    /// `⟨π, C⟩` for a cost matrix of matching shape.
    pub fn cost(&self, cost: &CostMatrix) -> f64 {
        debug_assert_eq!((cost.rows(), cost.cols()), (self.rows, self.cols));
        self.entries
            .iter()
            .map(|&(r, c, m)| m * cost.get(r, c))
            .sum()
    }
}

/// Residuals of a plan against its constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanCheck {
    pub valid: bool,
    /// Magnitude of the most negative entry, 0 if none.
    pub negativity: f64,
    /// `|Σ π − 1|`.
    pub mass: f64,
    /// L1 distance between realized and declared row sums.
    pub row: f64,
    /// L1 distance between realized and declared column sums.
    pub col: f64,
}

/// Checks nonnegativity, unit mass and both marginals of `plan` against `tol`.
pub fn validate_plan(plan: &TransportPlan, tol: f64) -> PlanCheck {
    let negativity = plan
        .entries
        .iter()
        .map(|e| e.2)
        .fold(0.0_f64, |acc, m| acc.max(-m));
    let mass = (plan.total_mass() - 1.0).abs();
    let l1 = |real: Vec<f64>, want: &[f64]| -> f64 {
        real.iter().zip(want).map(|(a, b)| (a - b).abs()).sum()
    };
    let row = l1(plan.row_sums(), &plan.row_marginal);
    let col = l1(plan.col_sums(), &plan.col_marginal);
    PlanCheck {
        valid: negativity == 0.0 && mass <= tol && row <= tol && col <= tol,
        negativity,
        mass,
        row,
        col,
    }
}
