//! Discrete probability measures and couplings in canonical form.
//!
//! Canonical form: atoms sorted by point index, duplicate atoms merged,
//! weights strictly positive after dropping anything below 1e-15, and the
//! total renormalized to exactly one when the raw sum is within 1e-9 of one.
//! Two measures over the same space are equal as measures iff their
//! canonical atom lists are equal.

use crate::metric_space::FiniteMetricSpace;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Raw weights below this are treated as exact zeros.
pub const WEIGHT_DROP: f64 = 1e-15;
/// Allowed deviation of a raw weight sum from one at construction.
pub const WEIGHT_SUM_SLACK: f64 = 1e-9;
/// Deviation of the canonical weight sum from one after renormalization.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("point index {index} out of range for space of size {size}")]
    UnknownPoint { index: usize, size: usize },
    #[error("negative weight {weight} at atom {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("non-finite weight at atom {index}")]
    NonFiniteWeight { index: usize },
    #[error("weights sum to {sum}, not within {slack} of 1")]
    WeightSum { sum: f64, slack: f64 },
    #[error("measure has empty support")]
    EmptySupport,
    #[error("operands live on different spaces")]
    SpaceMismatch,
}

fn canonical<K: Ord + Copy>(
    atoms: impl IntoIterator<Item = (K, f64)>,
    check: impl Fn(K) -> Result<(), MeasureError>,
) -> Result<Vec<(K, f64)>, MeasureError> {
    let mut merged: BTreeMap<K, f64> = BTreeMap::new();
    for (index, (k, w)) in atoms.into_iter().enumerate() {
        if !w.is_finite() {
            return Err(MeasureError::NonFiniteWeight { index });
        }
        if w < 0.0 {
            return Err(MeasureError::NegativeWeight { index, weight: w });
        }
        check(k)?;
        *merged.entry(k).or_insert(0.0) += w;
    }
    let mut out: Vec<(K, f64)> = merged
        .into_iter()
        .filter(|&(_, w)| w >= WEIGHT_DROP)
        .collect();
    let sum: f64 = out.iter().map(|&(_, w)| w).sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
        return Err(MeasureError::WeightSum {
            sum,
            slack: WEIGHT_SUM_SLACK,
        });
    }
    if out.is_empty() {
        return Err(MeasureError::EmptySupport);
    }
    // Renormalize only when needed so canonicalization is exactly
    // idempotent: a canonical list re-enters with sum within 1e-12 and is
    // left untouched.
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        for (_, w) in out.iter_mut() {
            *w /= sum;
        }
    }
    debug_assert!({
        let s: f64 = out.iter().map(|&(_, w)| w).sum();
        (s - 1.0).abs() <= WEIGHT_SUM_TOL
    });
    Ok(out)
}

/// A probability measure with finitely many atoms on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    space: Arc<FiniteMetricSpace>,
    atoms: Vec<(usize, f64)>,
}

impl DiscreteMeasure {
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        atoms: Vec<(usize, f64)>,
    ) -> Result<Self, MeasureError> {
        let size = space.size();
        let atoms = canonical(atoms, |i| {
            if i >= size {
                Err(MeasureError::UnknownPoint { index: i, size })
            } else {
                Ok(())
            }
        })?;
        Ok(DiscreteMeasure { space, atoms })
    }

    pub fn dirac(space: Arc<FiniteMetricSpace>, point: usize) -> Self {
        assert!(point < space.size(), "dirac point in range");
        DiscreteMeasure {
            space,
            atoms: vec![(point, 1.0)],
        }
    }

    /// Dense weight vector over all points of the space.
    pub fn from_dense(
        space: Arc<FiniteMetricSpace>,
        weights: &[f64],
    ) -> Result<Self, MeasureError> {
        let atoms = weights.iter().copied().enumerate().collect();
        Self::new(space, atoms)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<usize> {
        self.atoms.iter().map(|&(i, _)| i).collect()
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.atoms
            .iter()
            .find(|&&(i, _)| i == point)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.space.size()];
        for &(i, w) in &self.atoms {
            v[i] = w;
        }
        v
    }

    /// Mass of a point subset given as indices.
    pub fn mass_of<I: IntoIterator<Item = usize>>(&self, set: I) -> f64 {
        let mut total = 0.0;
        for p in set {
            total += self.weight(p);
        }
        total
    }

    pub fn same_space(&self, other: &DiscreteMeasure) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    /// Supremum-norm distance between weight vectors; measures on different
    /// spaces are never close.
    pub fn is_close(&self, other: &DiscreteMeasure, tol: f64) -> bool {
        if !self.same_space(other) {
            return false;
        }
        self.dense()
            .iter()
            .zip(other.dense())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A probability measure on the product of one space with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    space: Arc<FiniteMetricSpace>,
    atoms: Vec<((usize, usize), f64)>,
}

impl Coupling {
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        atoms: Vec<((usize, usize), f64)>,
    ) -> Result<Self, MeasureError> {
        let size = space.size();
        let atoms = canonical(atoms, |(i, j)| {
            let bad = if i >= size {
                Some(i)
            } else if j >= size {
                Some(j)
            } else {
                None
            };
            match bad {
                Some(index) => Err(MeasureError::UnknownPoint { index, size }),
                None => Ok(()),
            }
        })?;
        Ok(Coupling { space, atoms })
    }

    /// The coupling that keeps every atom of `mu` in place.
    pub fn diagonal(mu: &DiscreteMeasure) -> Self {
        Coupling {
            space: mu.space().clone(),
            atoms: mu.atoms().iter().map(|&(i, w)| ((i, i), w)).collect(),
        }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[((usize, usize), f64)] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn marginal_first(&self) -> DiscreteMeasure {
        let atoms = self.atoms.iter().map(|&((i, _), w)| (i, w)).collect();
        DiscreteMeasure::new(self.space.clone(), atoms).expect("marginal of a coupling")
    }

    pub fn marginal_second(&self) -> DiscreteMeasure {
        let atoms = self.atoms.iter().map(|&((_, j), w)| (j, w)).collect();
        DiscreteMeasure::new(self.space.clone(), atoms).expect("marginal of a coupling")
    }

    /// Mass on atom pairs selected by `pred`.
    pub fn mass_where(&self, pred: impl Fn(usize, usize) -> bool) -> f64 {
        self.atoms
            .iter()
            .filter(|&&((i, j), _)| pred(i, j))
            .map(|&(_, w)| w)
            .sum()
    }

    /// Mass on pairs strictly farther apart than `eps`. The comparison is
    /// exact floating point: pairs at distance exactly `eps` never count.
    pub fn mass_above(&self, eps: f64) -> f64 {
        let space = self.space.clone();
        self.mass_where(|i, j| space.d(i, j) > eps)
    }

    /// Transport cost under per-pair costs.
    pub fn cost(&self, cost: impl Fn(usize, usize) -> f64) -> f64 {
        self.atoms.iter().map(|&((i, j), w)| w * cost(i, j)).sum()
    }

    /// Transport cost under the space's own distance.
    pub fn distance_cost(&self) -> f64 {
        let space = self.space.clone();
        self.cost(|i, j| space.d(i, j))
    }

    pub fn is_close(&self, other: &Coupling, tol: f64) -> bool {
        if !(Arc::ptr_eq(&self.space, &other.space) || self.space == other.space) {
            return false;
        }
        let mut all: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for &(k, w) in &self.atoms {
            all.entry(k).or_default().0 = w;
        }
        for &(k, w) in &other.atoms {
            all.entry(k).or_default().1 = w;
        }
        all.values().all(|&(a, b)| (a - b).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_space::FiniteMetricSpace;
    use proptest::prelude::*;

    fn two_points() -> Arc<FiniteMetricSpace> {
        Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn canonicalize_merges_sorts_drops() {
        let s = two_points();
        let m = DiscreteMeasure::new(s, vec![(1, 0.3), (0, 0.35), (0, 0.35), (1, 1e-17)]).unwrap();
        assert_eq!(m.atoms(), &[(0, 0.7), (1, 0.3)]);
        assert_eq!(m.support_size(), 2);
    }

    #[test]
    fn rejects_bad_weights() {
        let s = two_points();
        let err = DiscreteMeasure::new(s.clone(), vec![(0, -0.1), (1, 1.1)]).unwrap_err();
        assert!(matches!(err, MeasureError::NegativeWeight { index: 0, .. }));
        let err = DiscreteMeasure::new(s.clone(), vec![(0, 0.4)]).unwrap_err();
        assert!(matches!(err, MeasureError::WeightSum { .. }));
        let err = DiscreteMeasure::new(s, vec![(5, 1.0)]).unwrap_err();
        assert!(matches!(
            err,
            MeasureError::UnknownPoint { index: 5, size: 2 }
        ));
    }

    #[test]
    fn marginals_of_coupling() {
        let s = two_points();
        let c = Coupling::new(s, vec![((0, 1), 0.5), ((1, 1), 0.5)]).unwrap();
        let first = c.marginal_first();
        assert_eq!(first.atoms(), &[(0, 0.5), (1, 0.5)]);
        let second = c.marginal_second();
        assert_eq!(second.atoms(), &[(1, 1.0)]);
    }

    #[test]
    fn mass_above_strict_at_tie() {
        let s = two_points();
        let c = Coupling::new(s, vec![((0, 1), 0.4), ((0, 0), 0.6)]).unwrap();
        // d(a,b) = 1: mass above 1 is zero because the comparison is strict.
        assert_eq!(c.mass_above(1.0), 0.0);
        assert!((c.mass_above(0.5) - 0.4).abs() < 1e-15);
        assert!((c.distance_cost() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn diagonal_coupling_keeps_marginals() {
        let s = two_points();
        let m = DiscreteMeasure::new(s, vec![(0, 0.25), (1, 0.75)]).unwrap();
        let c = Coupling::diagonal(&m);
        assert_eq!(c.marginal_first(), m);
        assert_eq!(c.marginal_second(), m);
        assert_eq!(c.mass_above(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(raw in proptest::collection::vec((0usize..2, 0.0f64..1.0), 1..6)) {
            let total: f64 = raw.iter().map(|&(_, w)| w).sum();
            prop_assume!(total > 1e-6);
            let s = two_points();
            let scaled: Vec<(usize, f64)> =
                raw.iter().map(|&(i, w)| (i, w / total)).collect();
            let m1 = DiscreteMeasure::new(s.clone(), scaled).unwrap();
            let m2 = DiscreteMeasure::new(s, m1.atoms().to_vec()).unwrap();
            prop_assert_eq!(m1.atoms(), m2.atoms());
            let sum: f64 = m1.atoms().iter().map(|&(_, w)| w).sum();
            prop_assert!((sum - 1.0).abs() <= WEIGHT_SUM_TOL);
        }

        #[test]
        fn marginals_sum_to_one(raw in proptest::collection::vec(((0usize..2, 0usize..2), 0.01f64..1.0), 1..5)) {
            let total: f64 = raw.iter().map(|&(_, w)| w).sum();
            let s = two_points();
            let scaled: Vec<((usize, usize), f64)> =
                raw.iter().map(|&(k, w)| (k, w / total)).collect();
            let c = Coupling::new(s, scaled).unwrap();
            let m1: f64 = c.marginal_first().atoms().iter().map(|&(_, w)| w).sum();
            let m2: f64 = c.marginal_second().atoms().iter().map(|&(_, w)| w).sum();
            prop_assert!((m1 - 1.0).abs() <= 1e-9);
            prop_assert!((m2 - 1.0).abs() <= 1e-9);
        }
    }
}
