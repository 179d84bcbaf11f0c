//! Worst-case optimization over metric balls of measures.
//!
//! Two routes to the same maximum. The LP route optimizes a linear
//! functional directly over the polytope of couplings with first marginal
//! at the center and bounded transport cost; projecting the optimal vertex
//! gives a worst-case measure with small support. The enumeration route
//! walks the explicit candidate families of [`crate::extreme_sets`],
//! where the objective is affine in the family parameter, so each family
//! is settled by checking its region corners. The two must agree whenever
//! the candidate set is the whole space, and the agreement is one of this
//! crate's main verified claims.
//!
//! General convex objectives are handled by evaluating the callback on the
//! deduplicated corner candidates: a maximum of a convex function over the
//! ball is attained at an extreme point, and every extreme point is among
//! the candidates.

use crate::distances::BallMetric;
use crate::extreme_sets::{
    constrained_families, filtered_families, CenterSpec, CostKind, CouplingFamily, ExtremeSetError,
    FamilyClass, GammaRegion,
};
use crate::lp::{Cmp, LpError, LpProblem, Scalar};
use crate::measures::{Coupling, DiscreteMeasure};
use crate::metric_space::{FiniteMetricSpace, PointSet};
use num::BigRational;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("objective has {got} entries for a space of size {expected}")]
    ObjectiveLength { expected: usize, got: usize },
    #[error("objective entry {index} is not finite")]
    NonFiniteObjective { index: usize },
    #[error("no candidate points to enumerate over")]
    EmptyCandidates,
    #[error("ball optimization failed: {0}")]
    Lp(#[from] LpError),
    #[error(transparent)]
    Center(#[from] ExtremeSetError),
}

/// A linear functional μ ↦ ∫f dμ, given by the values of f on the space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearObjective {
    pub values: Vec<f64>,
}

impl LinearObjective {
    pub fn new(values: Vec<f64>) -> Self {
        LinearObjective { values }
    }

    fn validate(&self, space: &FiniteMetricSpace) -> Result<(), OptimizerError> {
        if self.values.len() != space.size() {
            return Err(OptimizerError::ObjectiveLength {
                expected: space.size(),
                got: self.values.len(),
            });
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(OptimizerError::NonFiniteObjective { index: i });
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self, mu: &DiscreteMeasure) -> f64 {
        mu.atoms().iter().map(|&(p, w)| w * self.values[p]).sum()
    }
}

/// Which route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Coupling-polytope linear program.
    Lp,
    /// Candidate-family corner enumeration.
    Superset,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Lp => write!(f, "lp"),
            Method::Superset => write!(f, "superset"),
        }
    }
}

/// Worst-case optimization outcome: the value, a measure attaining it, and
/// the coupling certifying that the measure lies in the ball.
#[derive(Debug, Clone)]
pub struct RobustResult {
    pub value: f64,
    pub argmax: DiscreteMeasure,
    pub witness: Coupling,
    pub mode: BallMetric,
    pub method: Method,
    /// Set when the objective's convexity was not declared, so the value
    /// is only a lower bound on the worst case.
    pub heuristic: bool,
}

fn degenerate_result(
    center: &CenterSpec,
    value: f64,
    mode: BallMetric,
    method: Method,
) -> RobustResult {
    let mu = center.measure();
    RobustResult {
        value,
        witness: Coupling::diagonal(&mu),
        argmax: mu,
        mode,
        method,
        heuristic: false,
    }
}

/// Builds the coupling-polytope program: variables ν(yᵢ, x) over sources
/// and all target points, marginal rows fixing each source's mass, and one
/// cost-budget row. Generic in the scalar so the same construction runs in
/// floating point and in exact rational arithmetic; weights and radius
/// come in as scalars so the exact path is not tied to float inputs.
/// Distances are lifted exactly from their float representations, keeping
/// the far-pair comparison order-consistent with the float path.
fn ball_lp<T: Scalar>(
    center: &CenterSpec,
    f: &[T],
    cost: CostKind,
    beta: &[T],
    eps: &T,
) -> LpProblem<T> {
    let space = center.space();
    let n = center.n();
    let size = space.size();
    let idx = |i: usize, x: usize| i * size + x;
    let mut lp = LpProblem::<T>::maximize(n * size);
    let mut obj = vec![T::zero(); n * size];
    for i in 0..n {
        for x in 0..size {
            obj[idx(i, x)] = f[x].clone();
        }
    }
    lp.set_objective(obj);
    for i in 0..n {
        let mut row = vec![T::zero(); n * size];
        for x in 0..size {
            row[idx(i, x)] = T::one();
        }
        lp.add_row(row, Cmp::Eq, beta[i].clone());
    }
    let mut budget = vec![T::zero(); n * size];
    for i in 0..n {
        for x in 0..size {
            let dist = T::from_f64(space.d(center.y()[i], x));
            let c = match cost {
                CostKind::Indicator => {
                    if dist > *eps {
                        T::one()
                    } else {
                        T::zero()
                    }
                }
                CostKind::Distance => dist,
            };
            budget[idx(i, x)] = c;
        }
    }
    lp.add_row(budget, Cmp::Le, eps.clone());
    lp
}

/// Maximizes ∫f dμ over the ball via the coupling polytope. The optimum is
/// attained at a polytope vertex, so the argmax has at most n+1 atoms.
pub fn maximize_linear_lp(
    center: &Arc<CenterSpec>,
    f: &LinearObjective,
    mode: BallMetric,
) -> Result<RobustResult, OptimizerError> {
    f.validate(center.space())?;
    if center.eps() == 0.0 {
        let value = f.integral(&center.measure());
        return Ok(degenerate_result(center, value, mode, Method::Lp));
    }
    let lp = ball_lp::<f64>(center, &f.values, mode.into(), center.beta(), &center.eps());
    let sol = lp.solve()?;
    let size = center.space().size();
    let mut atoms = Vec::new();
    for i in 0..center.n() {
        for x in 0..size {
            let w = sol.x[i * size + x];
            if w > 1e-15 {
                atoms.push(((center.y()[i], x), w));
            }
        }
    }
    let witness = Coupling::new(center.space().clone(), atoms).expect("LP solution is a coupling");
    let argmax = witness.marginal_second();
    debug_assert!(argmax.support_size() <= center.n() + 2);
    Ok(RobustResult {
        value: sol.value,
        argmax,
        witness,
        mode,
        method: Method::Lp,
        heuristic: false,
    })
}

/// Exact-rational variant of [`maximize_linear_lp`]: returns the optimal
/// value and the dense argmax vector over the space, both as rationals.
/// The center supplies the support points and the space; the weights and
/// radius are taken exactly from the rational arguments, and distances are
/// lifted exactly from their float representations.
pub fn maximize_linear_lp_exact(
    center: &CenterSpec,
    f: &[BigRational],
    beta: &[BigRational],
    eps: &BigRational,
    mode: BallMetric,
) -> Result<(BigRational, Vec<BigRational>), OptimizerError> {
    if f.len() != center.space().size() {
        return Err(OptimizerError::ObjectiveLength {
            expected: center.space().size(),
            got: f.len(),
        });
    }
    if beta.len() != center.n() {
        return Err(OptimizerError::ObjectiveLength {
            expected: center.n(),
            got: beta.len(),
        });
    }
    let lp = ball_lp::<BigRational>(center, f, mode.into(), beta, eps);
    let sol = lp.solve()?;
    let size = center.space().size();
    let mut dense = vec![<BigRational as Scalar>::zero(); size];
    for i in 0..center.n() {
        for (x, total) in dense.iter_mut().enumerate() {
            *total = total.clone() + sol.x[i * size + x].clone();
        }
    }
    Ok((sol.value, dense))
}

fn lex_smaller(a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    for (&(pa, wa), &(pb, wb)) in a.atoms().iter().zip(b.atoms()) {
        match pa.cmp(&pb).then(wa.total_cmp(&wb)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    a.atoms().len() < b.atoms().len()
}

struct Best {
    value: f64,
    argmax: DiscreteMeasure,
    witness: Coupling,
}

impl Best {
    /// Keeps the larger value; near-ties (within 1e-12) go to the
    /// lexicographically smaller measure for deterministic output.
    fn offer(&mut self, value: f64, make: impl FnOnce() -> (DiscreteMeasure, Coupling)) {
        if value > self.value + 1e-12 {
            let (argmax, witness) = make();
            *self = Best {
                value,
                argmax,
                witness,
            };
        } else if value >= self.value - 1e-12 {
            let (argmax, witness) = make();
            if lex_smaller(&argmax, &self.argmax) {
                *self = Best {
                    value: value.max(self.value),
                    argmax,
                    witness,
                };
            }
        }
    }
}

fn enumerate_families(
    center: &Arc<CenterSpec>,
    mode: BallMetric,
    candidates: &PointSet,
) -> Vec<(CouplingFamily, GammaRegion)> {
    match mode {
        BallMetric::Prokhorov => filtered_families(center, candidates)
            .iter()
            .flat_map(FamilyClass::expand)
            .collect(),
        BallMetric::Kantorovich => constrained_families(center, candidates, CostKind::Distance),
    }
}

/// Maximizes ∫f dμ by corner enumeration over the candidate families. The
/// objective is affine in the family parameter, so per-family maxima sit
/// at region corners. Equals [`maximize_linear_lp`] when `candidates` is
/// the whole space.
pub fn maximize_linear_superset(
    center: &Arc<CenterSpec>,
    f: &LinearObjective,
    mode: BallMetric,
    candidates: &PointSet,
) -> Result<RobustResult, OptimizerError> {
    f.validate(center.space())?;
    if candidates.is_empty() {
        return Err(OptimizerError::EmptyCandidates);
    }
    if center.eps() == 0.0 {
        let value = f.integral(&center.measure());
        return Ok(degenerate_result(center, value, mode, Method::Superset));
    }
    let mut best: Option<Best> = None;
    for (family, region) in enumerate_families(center, mode, candidates) {
        let affine = family.objective_affine(&f.values);
        for corner in &region.corners {
            let value = affine.eval(corner);
            let make = || {
                let witness = family
                    .element(corner, true)
                    .expect("region corners satisfy closed bounds");
                (witness.marginal_second(), witness)
            };
            match &mut best {
                None => {
                    let (argmax, witness) = make();
                    best = Some(Best {
                        value,
                        argmax,
                        witness,
                    });
                }
                Some(b) => b.offer(value, make),
            }
        }
    }
    let best = best.ok_or(OptimizerError::EmptyCandidates)?;
    debug_assert!(best.argmax.support_size() <= center.n() + 2);
    Ok(RobustResult {
        value: best.value,
        argmax: best.argmax,
        witness: best.witness,
        mode,
        method: Method::Superset,
        heuristic: false,
    })
}

/// Deduplicated corner candidates with one generating coupling each.
fn candidate_pairs(
    center: &Arc<CenterSpec>,
    mode: BallMetric,
    candidates: &PointSet,
) -> Vec<(DiscreteMeasure, Coupling)> {
    let mut pairs: Vec<(DiscreteMeasure, Coupling)> = Vec::new();
    for (family, region) in enumerate_families(center, mode, candidates) {
        for corner in &region.corners {
            let nu = family
                .element(corner, true)
                .expect("region corners satisfy closed bounds");
            pairs.push((nu.marginal_second(), nu));
        }
    }
    pairs.sort_by(|a, b| {
        if lex_smaller(&a.0, &b.0) {
            std::cmp::Ordering::Less
        } else if lex_smaller(&b.0, &a.0) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    pairs.dedup_by(|a, b| a.0.is_close(&b.0, 1e-12));
    pairs
}

/// Maximizes a general objective by evaluating it on every corner
/// candidate. Exact for convex objectives (their ball maximum is attained
/// at an extreme point, and the candidates cover the extreme points);
/// otherwise a lower bound, flagged as heuristic.
pub fn maximize_convex(
    center: &Arc<CenterSpec>,
    objective: impl Fn(&DiscreteMeasure) -> f64,
    declared_convex: bool,
    mode: BallMetric,
    candidates: &PointSet,
) -> Result<RobustResult, OptimizerError> {
    if candidates.is_empty() {
        return Err(OptimizerError::EmptyCandidates);
    }
    if center.eps() == 0.0 {
        let mu = center.measure();
        let value = objective(&mu);
        let mut res = degenerate_result(center, value, mode, Method::Superset);
        res.heuristic = !declared_convex;
        return Ok(res);
    }
    let mut best: Option<Best> = None;
    for (mu, nu) in candidate_pairs(center, mode, candidates) {
        let value = objective(&mu);
        let make = || (mu.clone(), nu.clone());
        match &mut best {
            None => {
                best = Some(Best {
                    value,
                    argmax: mu,
                    witness: nu,
                })
            }
            Some(b) => b.offer(value, make),
        }
    }
    let best = best.ok_or(OptimizerError::EmptyCandidates)?;
    Ok(RobustResult {
        value: best.value,
        argmax: best.argmax,
        witness: best.witness,
        mode,
        method: Method::Superset,
        heuristic: !declared_convex,
    })
}

/// Merges a sample list into a weighted center: each distinct point gets
/// weight multiplicity / sample count.
pub fn empirical_center(
    samples: &[usize],
    space: Arc<FiniteMetricSpace>,
    eps: f64,
) -> Result<CenterSpec, OptimizerError> {
    if samples.is_empty() {
        return Err(ExtremeSetError::EmptyCenter.into());
    }
    let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    let total = samples.len() as f64;
    let (y, beta): (Vec<usize>, Vec<f64>) = counts
        .into_iter()
        .map(|(p, c)| (p, c as f64 / total))
        .unzip();
    Ok(CenterSpec::new(space, y, beta, eps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances;
    use crate::lp::ratio;
    use crate::metric_space::PointMetric;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn golden_center(eps: f64) -> Arc<CenterSpec> {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .unwrap(),
        );
        Arc::new(CenterSpec::new(space, vec![0], vec![1.0], eps).unwrap())
    }

    fn random_center(rng: &mut ChaCha8Rng, size: usize, n: usize) -> Arc<CenterSpec> {
        let space = loop {
            let pts: Vec<Vec<f64>> = (0..size)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            if let Ok(s) = FiniteMetricSpace::from_points(&pts, PointMetric::Euclidean, None) {
                break Arc::new(s);
            }
        };
        let mut y: Vec<usize> = (0..size).collect();
        y.shuffle(rng);
        y.truncate(n);
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = raw.iter().sum();
        let beta = raw.into_iter().map(|w| w / total).collect();
        Arc::new(CenterSpec::new(space, y, beta, rng.random::<f64>()).unwrap())
    }

    fn random_objective(rng: &mut ChaCha8Rng, size: usize) -> LinearObjective {
        LinearObjective::new((0..size).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn lp_golden_two_point() {
        let center = golden_center(0.3);
        let f = LinearObjective::new(vec![0.0, 1.0]);
        for mode in [BallMetric::Prokhorov, BallMetric::Kantorovich] {
            let res = maximize_linear_lp(&center, &f, mode).unwrap();
            assert!((res.value - 0.3).abs() < 1e-12, "{mode}: {}", res.value);
            assert_eq!(res.argmax.atoms(), &[(0, 0.7), (1, 0.3)]);
        }
    }

    #[test]
    fn superset_golden_two_point() {
        let center = golden_center(0.3);
        let f = LinearObjective::new(vec![0.0, 1.0]);
        let all = PointSet::full(center.space());
        for mode in [BallMetric::Prokhorov, BallMetric::Kantorovich] {
            let res = maximize_linear_superset(&center, &f, mode, &all).unwrap();
            assert!((res.value - 0.3).abs() < 1e-12, "{mode}: {}", res.value);
            assert_eq!(res.argmax.atoms(), &[(0, 0.7), (1, 0.3)]);
        }
    }

    #[test]
    fn exact_rational_golden() {
        let center = golden_center(0.3);
        let f = vec![ratio(0, 1), ratio(1, 1)];
        let beta = vec![ratio(1, 1)];
        let eps = ratio(3, 10);
        for mode in [BallMetric::Prokhorov, BallMetric::Kantorovich] {
            let (value, dense) = maximize_linear_lp_exact(&center, &f, &beta, &eps, mode).unwrap();
            assert_eq!(value, ratio(3, 10));
            assert_eq!(dense, vec![ratio(7, 10), ratio(3, 10)]);
        }
    }

    #[test]
    fn constant_objective_stays_constant() {
        let center = golden_center(0.3);
        let f = LinearObjective::new(vec![2.5, 2.5]);
        let res = maximize_linear_lp(&center, &f, BallMetric::Prokhorov).unwrap();
        assert!((res.value - 2.5).abs() < 1e-9);
    }

    #[test]
    fn penalized_moves_keep_center() {
        // f drops off the center; with a small radius the best play is to
        // stay, reached through a no-split family.
        let center = golden_center(0.2);
        let f = LinearObjective::new(vec![1.0, -5.0]);
        let all = PointSet::full(center.space());
        let res = maximize_linear_superset(&center, &f, BallMetric::Prokhorov, &all).unwrap();
        assert!((res.value - 1.0).abs() < 1e-12);
        assert_eq!(res.argmax.atoms(), &[(0, 1.0)]);
    }

    #[test]
    fn methods_agree_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..15 {
            let size = rng.random_range(3..=5);
            let n = rng.random_range(1..=3.min(size));
            let center = random_center(&mut rng, size, n);
            let f = random_objective(&mut rng, size);
            let all = PointSet::full(center.space());
            let lp = maximize_linear_lp(&center, &f, BallMetric::Prokhorov).unwrap();
            let sup = maximize_linear_superset(&center, &f, BallMetric::Prokhorov, &all).unwrap();
            assert!(
                (lp.value - sup.value).abs() < 1e-9,
                "lp {} superset {} (eps {})",
                lp.value,
                sup.value,
                center.eps()
            );
        }
    }

    #[test]
    fn argmax_is_ball_member_with_small_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        for _ in 0..10 {
            let size = rng.random_range(3..=5);
            let n = rng.random_range(1..=2);
            let center = random_center(&mut rng, size, n);
            let f = random_objective(&mut rng, size);
            let mu_n = center.measure();
            for mode in [BallMetric::Prokhorov, BallMetric::Kantorovich] {
                let res = maximize_linear_lp(&center, &f, mode).unwrap();
                assert!(res.argmax.support_size() <= n + 2);
                match mode {
                    BallMetric::Prokhorov => {
                        assert!(
                            distances::strassen_feasible(&mu_n, &res.argmax, center.eps())
                                .unwrap()
                                .is_some()
                        );
                    }
                    BallMetric::Kantorovich => {
                        let (d, _) = distances::kantorovich(&mu_n, &res.argmax).unwrap();
                        assert!(d <= center.eps() + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn value_is_monotone_in_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for _ in 0..10 {
            let size = rng.random_range(3..=5);
            let n = rng.random_range(1..=2);
            let base = random_center(&mut rng, size, n);
            let f = random_objective(&mut rng, size);
            let mut eps_grid: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            eps_grid.push(0.0);
            eps_grid.sort_by(f64::total_cmp);
            let mut last = f64::NEG_INFINITY;
            for &eps in &eps_grid {
                let center = Arc::new(
                    CenterSpec::new(
                        base.space().clone(),
                        base.y().to_vec(),
                        base.beta().to_vec(),
                        eps,
                    )
                    .unwrap(),
                );
                let res = maximize_linear_lp(&center, &f, BallMetric::Prokhorov).unwrap();
                assert!(res.value >= last - 1e-9, "value dropped as radius grew");
                last = res.value;
                if eps == 0.0 {
                    assert!((res.value - f.integral(&base.measure())).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn convex_max_of_linears_matches_linear_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        let center = random_center(&mut rng, 4, 2);
        let f1 = random_objective(&mut rng, 4);
        let f2 = random_objective(&mut rng, 4);
        let all = PointSet::full(center.space());
        let combined = maximize_convex(
            &center,
            |mu| f1.integral(mu).max(f2.integral(mu)),
            true,
            BallMetric::Prokhorov,
            &all,
        )
        .unwrap();
        let v1 = maximize_linear_superset(&center, &f1, BallMetric::Prokhorov, &all)
            .unwrap()
            .value;
        let v2 = maximize_linear_superset(&center, &f2, BallMetric::Prokhorov, &all)
            .unwrap()
            .value;
        assert!((combined.value - v1.max(v2)).abs() < 1e-9);
        assert!(!combined.heuristic);
    }

    #[test]
    fn quadratic_concentration_peaks_at_dirac() {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 0.4], vec![0.4, 0.0]],
            )
            .unwrap(),
        );
        let center = Arc::new(CenterSpec::new(space, vec![0], vec![1.0], 0.3).unwrap());
        let all = PointSet::full(center.space());
        let res = maximize_convex(
            &center,
            |mu| mu.atoms().iter().map(|&(_, w)| w * w).sum(),
            true,
            BallMetric::Prokhorov,
            &all,
        )
        .unwrap();
        assert!((res.value - 1.0).abs() < 1e-12);
        assert_eq!(res.argmax.atoms(), &[(0, 1.0)]);
    }

    #[test]
    fn unconvex_callback_is_flagged() {
        let center = golden_center(0.3);
        let all = PointSet::full(center.space());
        let res = maximize_convex(
            &center,
            |mu| -(mu.atoms().len() as f64),
            false,
            BallMetric::Prokhorov,
            &all,
        )
        .unwrap();
        assert!(res.heuristic);
    }

    #[test]
    fn empirical_center_merges_duplicates() {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .unwrap(),
        );
        let c = empirical_center(&[0, 1], space.clone(), 0.3).unwrap();
        assert_eq!(c.y(), &[0, 1]);
        assert_eq!(c.beta(), &[0.5, 0.5]);
        let c = empirical_center(&[0, 0, 1], space.clone(), 0.3).unwrap();
        assert_eq!(c.y(), &[0, 1]);
        assert!((c.beta()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.beta()[1] - 1.0 / 3.0).abs() < 1e-15);
        let c = empirical_center(&[1], space, 0.3).unwrap();
        assert_eq!(c.y(), &[1]);
        assert_eq!(c.beta(), &[1.0]);
        assert!(empirical_center(&[], c.space().clone(), 0.3).is_err());
    }

    #[test]
    fn objective_validation() {
        let center = golden_center(0.3);
        let short = LinearObjective::new(vec![1.0]);
        assert!(matches!(
            maximize_linear_lp(&center, &short, BallMetric::Prokhorov).unwrap_err(),
            OptimizerError::ObjectiveLength { .. }
        ));
        let bad = LinearObjective::new(vec![1.0, f64::NAN]);
        assert!(matches!(
            maximize_linear_lp(&center, &bad, BallMetric::Prokhorov).unwrap_err(),
            OptimizerError::NonFiniteObjective { index: 1 }
        ));
    }
}
