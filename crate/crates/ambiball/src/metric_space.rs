//! Finite metric spaces with validated distance matrices.
//!
//! A space is a list of labelled points and a symmetric distance matrix with
//! zero diagonal, positive off-diagonal entries, and the triangle inequality
//! (checked within 1e-12). Spaces are immutable after construction and shared
//! behind `Arc` by measures and couplings.

use std::collections::BTreeSet;
use thiserror::Error;

/// Tolerance for the symmetry and triangle checks at construction.
pub const METRIC_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("{labels} labels but {rows} matrix rows")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("duplicate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("non-finite distance at ({i},{j})")]
    NonFinite { i: usize, j: usize },
    #[error("negative distance {value} at ({i},{j})")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal entry {value} at ({i},{i})")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("zero distance between distinct points ({i},{j})")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("asymmetry at ({i},{j}): {dij} vs {dji}")]
    Asymmetry {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },
    #[error(
        "triangle violation ({i},{j},{k}): d({i},{j}) = {dij} > {detour} = d({i},{k}) + d({k},{j})"
    )]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        dij: f64,
        detour: f64,
    },
    #[error("duplicate point coordinates at indices {i} and {j}")]
    DuplicatePoint { i: usize, j: usize },
    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("space has no points")]
    Empty,
    #[error("point index {index} out of range for space of size {size}")]
    UnknownPoint { index: usize, size: usize },
}

/// Norm used to build a metric from point coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMetric {
    Euclidean,
    Manhattan,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates every metric axiom and reports the first violation found.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = dist.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    rows: n,
                    row,
                    len: r.len(),
                });
            }
        }
        if labels.len() != n {
            return Err(MetricError::LabelCountMismatch {
                labels: labels.len(),
                rows: n,
            });
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(MetricError::DuplicateLabel { label: l.clone() });
            }
        }
        for (i, r) in dist.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
                if v < 0.0 {
                    return Err(MetricError::NegativeEntry { i, j, value: v });
                }
            }
        }
        for (i, row) in dist.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal { i, value: row[i] });
            }
        }
        for (i, row) in dist.iter().enumerate() {
            for j in (i + 1)..n {
                if row[j] == 0.0 {
                    return Err(MetricError::ZeroOffDiagonal { i, j });
                }
                if (row[j] - dist[j][i]).abs() > METRIC_TOL {
                    return Err(MetricError::Asymmetry {
                        i,
                        j,
                        dij: row[j],
                        dji: dist[j][i],
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let detour = dist[i][k] + dist[k][j];
                    if dist[i][j] > detour + METRIC_TOL {
                        return Err(MetricError::TriangleViolation {
                            i,
                            j,
                            k,
                            dij: dist[i][j],
                            detour,
                        });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Builds the metric induced by a norm on a finite point cloud.
    /// Labels default to `p0, p1, ...` when `labels` is `None`.
    pub fn from_points(
        points: &[Vec<f64>],
        metric: PointMetric,
        labels: Option<Vec<String>>,
    ) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::Empty);
        }
        let dim = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        let n = points.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if points[i] == points[j] {
                    return Err(MetricError::DuplicatePoint { i, j });
                }
            }
        }
        let d = |p: &[f64], q: &[f64]| -> f64 {
            match metric {
                PointMetric::Euclidean => p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
                PointMetric::Manhattan => p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum(),
                PointMetric::Chebyshev => p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            }
        };
        let dist: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| d(&points[i], &points[j])).collect())
            .collect();
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("p{i}")).collect());
        Self::new(labels, dist)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Sorted distinct pairwise distances, zero included.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.dist.iter().flatten().copied().collect();
        v.push(0.0);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Point pairs whose distance lies within `tol` of `eps`. The strict
    /// comparison `d > eps` flips on either side of these pairs, so callers
    /// surface them as threshold-sensitivity warnings.
    pub fn distances_near(&self, eps: f64, tol: f64) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.dist[i][j] - eps).abs() <= tol {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A subset of the points of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: BTreeSet<usize>,
}

impl PointSet {
    pub fn new<I: IntoIterator<Item = usize>>(
        space: &FiniteMetricSpace,
        points: I,
    ) -> Result<Self, MetricError> {
        let mut set = BTreeSet::new();
        for p in points {
            if p >= space.size() {
                return Err(MetricError::UnknownPoint {
                    index: p,
                    size: space.size(),
                });
            }
            set.insert(p);
        }
        Ok(PointSet { points: set })
    }

    pub fn full(space: &FiniteMetricSpace) -> Self {
        PointSet {
            points: (0..space.size()).collect(),
        }
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.is_subset(&other.points)
    }
}

/// ε-inflation of a set: points within distance ε of the set, with a strict
/// comparison for the open variant and `<=` for the closed one. Distance
/// comparisons are exact floating point; ties sit exactly on the boundary
/// between the two variants.
pub fn inflate(space: &FiniteMetricSpace, set: &PointSet, eps: f64, closed: bool) -> PointSet {
    let mut out = BTreeSet::new();
    for x in 0..space.size() {
        let dx = set
            .iter()
            .map(|a| space.d(x, a))
            .fold(f64::INFINITY, f64::min);
        let inside = if closed { dx <= eps } else { dx < eps };
        if inside {
            out.insert(x);
        }
    }
    PointSet { points: out }
}
