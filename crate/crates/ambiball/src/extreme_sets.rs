//! Parametrized coupling families whose corner projections cover the
//! extreme points of a metric ball around a finitely supported center.
//!
//! A center μ = Σ βᵢ δ_{yᵢ} and a radius ε induce a polytope of couplings
//! with first marginal μ and bounded transport cost; the second marginals
//! of that polytope form the ball. Every coupling with first marginal μ
//! and at most n+2 atoms arises from a small family: keep each source yₖ
//! on a chosen target xₖ and let at most two sources split mass toward
//! extra targets, with split sizes γ as free parameters. The cost budget
//! carves a convex region out of the γ domain ([`GammaRegion`]); the
//! region's closed corners are the only γ values that can project to ball
//! vertices, so enumerating families and corners yields an explicit finite
//! superset of the extreme points.
//!
//! Two prunings keep the enumeration small without losing extreme points:
//! a swap filter dropping families whose splits do not toggle the
//! indicator cost (their elements are interior to cheaper families), and
//! grouping of target tuples by adjacency matrix, which determines the
//! region and the filters, so each group is analyzed once.

use crate::distances::BallMetric;
use crate::measures::{Coupling, DiscreteMeasure};
use crate::metric_space::{FiniteMetricSpace, PointSet};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

/// Slack accepted when checking closed bounds and budget inequalities on
/// floating-point corner values.
pub const CORNER_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremeSetError {
    #[error("center has no support points")]
    EmptyCenter,
    #[error("point index {index} out of range for space of size {size}")]
    UnknownPoint { index: usize, size: usize },
    #[error("center points at positions {i} and {j} coincide")]
    DuplicateCenterPoint { i: usize, j: usize },
    #[error("weight count {got} does not match {expected} center points")]
    WeightCount { expected: usize, got: usize },
    #[error("center weight {weight} at position {index} is not positive and finite")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("center weights sum to {sum}, too far from 1")]
    WeightSum { sum: f64 },
    #[error("radius {eps} is not finite and nonnegative")]
    InvalidEpsilon { eps: f64 },
    #[error("family index {index} out of range for a center with {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("pair index ({i},{j}) is not ordered i <= j")]
    UnorderedPair { i: usize, j: usize },
    #[error("pair filter requires i < j, got ({i},{j})")]
    PairIndexError { i: usize, j: usize },
    #[error("target tuple has length {got}, family needs {expected}")]
    TupleLength { expected: usize, got: usize },
    #[error("gamma {gamma:?} violates the family bounds")]
    GammaOutOfBounds { gamma: Vec<f64> },
}

/// The ball center: distinct support points with positive weights, and the
/// radius the families are built for.
#[derive(Debug, Clone)]
pub struct CenterSpec {
    space: Arc<FiniteMetricSpace>,
    y: Vec<usize>,
    beta: Vec<f64>,
    eps: f64,
}

impl CenterSpec {
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        y: Vec<usize>,
        beta: Vec<f64>,
        eps: f64,
    ) -> Result<Self, ExtremeSetError> {
        if y.is_empty() {
            return Err(ExtremeSetError::EmptyCenter);
        }
        for &p in &y {
            if p >= space.size() {
                return Err(ExtremeSetError::UnknownPoint {
                    index: p,
                    size: space.size(),
                });
            }
        }
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                if y[i] == y[j] {
                    return Err(ExtremeSetError::DuplicateCenterPoint { i, j });
                }
            }
        }
        if beta.len() != y.len() {
            return Err(ExtremeSetError::WeightCount {
                expected: y.len(),
                got: beta.len(),
            });
        }
        for (i, &w) in beta.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(ExtremeSetError::NonPositiveWeight {
                    index: i,
                    weight: w,
                });
            }
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ExtremeSetError::WeightSum { sum });
        }
        let mut beta = beta;
        if (sum - 1.0).abs() > CORNER_TOL {
            for w in &mut beta {
                *w /= sum;
            }
        }
        if !eps.is_finite() || eps < 0.0 {
            return Err(ExtremeSetError::InvalidEpsilon { eps });
        }
        Ok(CenterSpec {
            space,
            y,
            beta,
            eps,
        })
    }

    /// Builds the spec from a measure's support atoms.
    pub fn from_measure(mu: &DiscreteMeasure, eps: f64) -> Result<Self, ExtremeSetError> {
        let (y, beta) = mu.atoms().iter().copied().unzip();
        CenterSpec::new(mu.space().clone(), y, beta, eps)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }
    pub fn n(&self) -> usize {
        self.y.len()
    }
    pub fn y(&self) -> &[usize] {
        &self.y
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The center measure Σ βᵢ δ_{yᵢ}.
    pub fn measure(&self) -> DiscreteMeasure {
        DiscreteMeasure::new(
            self.space.clone(),
            self.y
                .iter()
                .copied()
                .zip(self.beta.iter().copied())
                .collect(),
        )
        .expect("center weights form a measure")
    }
}

/// Which sources split mass toward extra targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MultiIndex {
    /// No split: one target per source.
    Zero,
    /// Source i splits toward one extra target.
    Single(usize),
    /// Sources i <= j each split toward their own extra target; i == j
    /// splits the same source twice.
    Pair(usize, usize),
}

impl MultiIndex {
    /// Number of free γ parameters.
    pub fn arity(&self) -> usize {
        match self {
            MultiIndex::Zero => 0,
            MultiIndex::Single(_) => 1,
            MultiIndex::Pair(_, _) => 2,
        }
    }

    /// Length of the target tuple for a center with n points.
    pub fn tuple_len(&self, n: usize) -> usize {
        n + self.arity()
    }
}

/// One split slot: which center source moves, from which tuple position,
/// toward which tuple position.
#[derive(Debug, Clone, Copy)]
struct Slot {
    source: usize,
    from: usize,
    to: usize,
}

/// A family of couplings ν_γ = Σ βₖ δ_{(yₖ,xₖ)} + Σ_slots γₛ(δ_{(y,to)} − δ_{(y,from)}),
/// parametrized by the split sizes γ.
#[derive(Debug, Clone)]
pub struct CouplingFamily {
    center: Arc<CenterSpec>,
    index: MultiIndex,
    x: Vec<usize>,
}

impl CouplingFamily {
    pub fn new(
        center: Arc<CenterSpec>,
        index: MultiIndex,
        x: Vec<usize>,
    ) -> Result<Self, ExtremeSetError> {
        let n = center.n();
        match index {
            MultiIndex::Zero => {}
            MultiIndex::Single(i) => {
                if i >= n {
                    return Err(ExtremeSetError::IndexOutOfRange { index: i, n });
                }
            }
            MultiIndex::Pair(i, j) => {
                if i > j {
                    return Err(ExtremeSetError::UnorderedPair { i, j });
                }
                if j >= n {
                    return Err(ExtremeSetError::IndexOutOfRange { index: j, n });
                }
            }
        }
        let expected = index.tuple_len(n);
        if x.len() != expected {
            return Err(ExtremeSetError::TupleLength {
                expected,
                got: x.len(),
            });
        }
        for &p in &x {
            if p >= center.space().size() {
                return Err(ExtremeSetError::UnknownPoint {
                    index: p,
                    size: center.space().size(),
                });
            }
        }
        Ok(CouplingFamily { center, index, x })
    }

    pub fn center(&self) -> &Arc<CenterSpec> {
        &self.center
    }
    pub fn index(&self) -> MultiIndex {
        self.index
    }
    pub fn x(&self) -> &[usize] {
        &self.x
    }

    fn slots(&self) -> Vec<Slot> {
        let n = self.center.n();
        match self.index {
            MultiIndex::Zero => vec![],
            MultiIndex::Single(i) => vec![Slot {
                source: i,
                from: i,
                to: n,
            }],
            MultiIndex::Pair(i, j) => vec![
                Slot {
                    source: i,
                    from: i,
                    to: n,
                },
                Slot {
                    source: j,
                    from: j,
                    to: n + 1,
                },
            ],
        }
    }

    fn check_gamma(&self, gamma: &[f64], closed: bool) -> Result<(), ExtremeSetError> {
        let oob = || ExtremeSetError::GammaOutOfBounds {
            gamma: gamma.to_vec(),
        };
        if gamma.len() != self.index.arity() {
            return Err(oob());
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(oob());
        }
        let beta = self.center.beta();
        let within = |g: f64, hi: f64| {
            if closed {
                (-CORNER_TOL..=hi + CORNER_TOL).contains(&g)
            } else {
                g > 0.0 && g < hi
            }
        };
        let ok = match self.index {
            MultiIndex::Zero => true,
            MultiIndex::Single(i) => within(gamma[0], beta[i]),
            MultiIndex::Pair(i, j) if i != j => {
                within(gamma[0], beta[i]) && within(gamma[1], beta[j])
            }
            MultiIndex::Pair(i, _) => {
                let sum = gamma[0] + gamma[1];
                if closed {
                    gamma.iter().all(|&g| g >= -CORNER_TOL) && sum <= beta[i] + CORNER_TOL
                } else {
                    gamma.iter().all(|&g| g > 0.0) && sum < beta[i]
                }
            }
        };
        if ok {
            Ok(())
        } else {
            Err(oob())
        }
    }

    /// The coupling at parameter γ. Open bounds by default; `closed`
    /// admits the closure corners (where atoms vanish or merge).
    pub fn element(&self, gamma: &[f64], closed: bool) -> Result<Coupling, ExtremeSetError> {
        self.check_gamma(gamma, closed)?;
        let center = &self.center;
        let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
        for k in 0..center.n() {
            *weights.entry((center.y()[k], self.x[k])).or_insert(0.0) += center.beta()[k];
        }
        for (s, slot) in self.slots().iter().enumerate() {
            let g = gamma[s].clamp(0.0, center.beta()[slot.source]);
            let y = center.y()[slot.source];
            *weights.entry((y, self.x[slot.from])).or_insert(0.0) -= g;
            *weights.entry((y, self.x[slot.to])).or_insert(0.0) += g;
        }
        let mut atoms = Vec::with_capacity(weights.len());
        for (pair, w) in weights {
            if w > 0.0 {
                atoms.push((pair, w));
            } else if w < -1e-9 {
                return Err(ExtremeSetError::GammaOutOfBounds {
                    gamma: gamma.to_vec(),
                });
            }
        }
        Ok(Coupling::new(center.space().clone(), atoms).expect("family weights form a coupling"))
    }

    /// The value Σ βₖ c(yₖ,xₖ) + Σₛ γₛ (c(yₛ,toₛ) − c(yₛ,fromₛ)) of the
    /// transport cost as an affine function of γ.
    pub fn cost_affine(&self, cost: CostKind) -> AffineMap {
        let c = |a: usize, b: usize| cost.value(self.center.space(), a, b, self.center.eps());
        let mut base = 0.0;
        for k in 0..self.center.n() {
            base += self.center.beta()[k] * c(self.center.y()[k], self.x[k]);
        }
        let slopes = self
            .slots()
            .iter()
            .map(|s| {
                let y = self.center.y()[s.source];
                c(y, self.x[s.to]) - c(y, self.x[s.from])
            })
            .collect();
        AffineMap { base, slopes }
    }

    /// The integral ∫ f d(second marginal) as an affine function of γ.
    pub fn objective_affine(&self, f: &[f64]) -> AffineMap {
        let mut base = 0.0;
        for k in 0..self.center.n() {
            base += self.center.beta()[k] * f[self.x[k]];
        }
        let slopes = self
            .slots()
            .iter()
            .map(|s| f[self.x[s.to]] - f[self.x[s.from]])
            .collect();
        AffineMap { base, slopes }
    }
}

/// Affine function of the family parameter: base + slopes · γ.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub base: f64,
    pub slopes: Vec<f64>,
}

impl AffineMap {
    pub fn eval(&self, gamma: &[f64]) -> f64 {
        self.base
            + self
                .slopes
                .iter()
                .zip(gamma)
                .map(|(s, g)| s * g)
                .sum::<f64>()
    }
}

/// Transport cost defining the budget ∫c dν <= ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// Unit cost for pairs strictly farther than ε; the budget caps the
    /// mass moved far.
    Indicator,
    /// The distance itself; the budget caps the mean displacement.
    Distance,
}

impl CostKind {
    fn value(&self, space: &FiniteMetricSpace, a: usize, b: usize, eps: f64) -> f64 {
        match self {
            CostKind::Indicator => {
                if space.d(a, b) > eps {
                    1.0
                } else {
                    0.0
                }
            }
            CostKind::Distance => space.d(a, b),
        }
    }
}

impl From<BallMetric> for CostKind {
    fn from(m: BallMetric) -> Self {
        match m {
            BallMetric::Prokhorov => CostKind::Indicator,
            BallMetric::Kantorovich => CostKind::Distance,
        }
    }
}

/// Mass a coupling places on pairs strictly farther than ε apart; the left
/// side of the budget inequality in indicator mode.
pub fn constraint_value(nu: &Coupling, eps: f64) -> f64 {
    nu.mass_above(eps)
}

/// How the budget inequality cuts the γ domain.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    /// No feasible γ.
    Empty,
    /// The whole domain is feasible.
    Full,
    /// The halfspace `normal · γ <= offset` cuts the domain properly.
    HalfSpaceCut { normal: Vec<f64>, offset: f64 },
}

/// Feasible γ set of a family under the cost budget, with the corners of
/// its closure. Corners are γ vectors (empty vectors for zero-arity
/// families); an empty corner list means an empty region.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRegion {
    pub kind: RegionKind,
    pub corners: Vec<Vec<f64>>,
    pub cost: CostKind,
}

impl GammaRegion {
    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }
}

fn clip_polygon(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let dp = b - (a[0] * p[0] + a[1] * p[1]);
        let dq = b - (a[0] * q[0] + a[1] * q[1]);
        if dp >= 0.0 {
            out.push(p);
        }
        if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn dedup_corners(mut corners: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= CORNER_TOL);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in corners.drain(..) {
        if !out.iter().any(|kept| close(kept, &c)) {
            out.push(c);
        }
    }
    out
}

/// Classifies the budget-feasible γ set of a family and enumerates the
/// corners of its closure.
pub fn gamma_region(family: &CouplingFamily, cost: CostKind) -> GammaRegion {
    let eps = family.center().eps();
    let beta = family.center().beta();
    let affine = family.cost_affine(cost);
    let empty = GammaRegion {
        kind: RegionKind::Empty,
        corners: vec![],
        cost,
    };
    match family.index() {
        MultiIndex::Zero => {
            if affine.base <= eps {
                GammaRegion {
                    kind: RegionKind::Full,
                    corners: vec![vec![]],
                    cost,
                }
            } else {
                empty
            }
        }
        MultiIndex::Single(i) => {
            let hi = beta[i];
            let s = affine.slopes[0];
            let v0 = affine.base;
            let v1 = affine.base + s * hi;
            if v0 <= eps && v1 <= eps {
                return GammaRegion {
                    kind: RegionKind::Full,
                    corners: dedup_corners(vec![vec![0.0], vec![hi]]),
                    cost,
                };
            }
            if v0 > eps && v1 > eps {
                return empty;
            }
            let cut = ((eps - affine.base) / s).clamp(0.0, hi);
            let corners = if v0 <= eps {
                vec![vec![0.0], vec![cut]]
            } else {
                vec![vec![cut], vec![hi]]
            };
            GammaRegion {
                kind: RegionKind::HalfSpaceCut {
                    normal: affine.slopes.clone(),
                    offset: eps - affine.base,
                },
                corners: dedup_corners(corners),
                cost,
            }
        }
        MultiIndex::Pair(i, j) => {
            let domain: Vec<[f64; 2]> = if i != j {
                vec![
                    [0.0, 0.0],
                    [beta[i], 0.0],
                    [beta[i], beta[j]],
                    [0.0, beta[j]],
                ]
            } else {
                vec![[0.0, 0.0], [beta[i], 0.0], [0.0, beta[i]]]
            };
            let a = [affine.slopes[0], affine.slopes[1]];
            let b = eps - affine.base;
            let inside = domain
                .iter()
                .filter(|p| a[0] * p[0] + a[1] * p[1] <= b)
                .count();
            if inside == domain.len() {
                return GammaRegion {
                    kind: RegionKind::Full,
                    corners: domain.iter().map(|p| p.to_vec()).collect(),
                    cost,
                };
            }
            if inside == 0 {
                return empty;
            }
            let clipped = clip_polygon(&domain, a, b);
            let corners = dedup_corners(
                clipped
                    .iter()
                    .map(|p| vec![p[0].max(0.0), p[1].max(0.0)])
                    .collect(),
            );
            debug_assert!(corners.iter().all(|c| {
                affine.eval(c) <= eps + CORNER_TOL && family.check_gamma(c, true).is_ok()
            }));
            GammaRegion {
                kind: RegionKind::HalfSpaceCut {
                    normal: affine.slopes.clone(),
                    offset: b,
                },
                corners,
                cost,
            }
        }
    }
}

/// True iff moving source i from its base target to the extra target
/// toggles the indicator cost. Families failing this produce couplings
/// that are convex combinations within cheaper families.
pub fn single_swap_active(center: &CenterSpec, x: &[usize], i: usize) -> bool {
    let n = center.n();
    debug_assert_eq!(x.len(), n + 1);
    let far = |a: usize, b: usize| center.space().d(a, b) > center.eps();
    far(center.y()[i], x[n]) != far(center.y()[i], x[i])
}

/// Conjunction of [`single_swap_active`] for the two slots of a pair
/// family with distinct sources i < j.
pub fn pair_swap_active(
    center: &CenterSpec,
    x: &[usize],
    i: usize,
    j: usize,
) -> Result<bool, ExtremeSetError> {
    if i >= j {
        return Err(ExtremeSetError::PairIndexError { i, j });
    }
    let n = center.n();
    debug_assert_eq!(x.len(), n + 2);
    let far = |a: usize, b: usize| center.space().d(a, b) > center.eps();
    Ok(far(center.y()[i], x[n]) != far(center.y()[i], x[i])
        && far(center.y()[j], x[n + 1]) != far(center.y()[j], x[j]))
}

/// Binary matrix recording which (source, tuple slot) pairs are strictly
/// farther apart than ε. The budget region of an indicator-cost family and
/// the swap filters depend on the target tuple only through this matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    m: usize,
    bits: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.m + j]
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }
}

pub fn adjacency(center: &CenterSpec, x: &[usize]) -> AdjacencyMatrix {
    let n = center.n();
    let m = x.len();
    let mut bits = Vec::with_capacity(n * m);
    for &y in center.y() {
        for &t in x {
            bits.push(center.space().d(y, t) > center.eps());
        }
    }
    AdjacencyMatrix { n, m, bits }
}

/// Iterates tuples from `points`^m in lexicographic order.
fn for_each_tuple(points: &[usize], m: usize, mut visit: impl FnMut(&[usize])) {
    if points.is_empty() {
        return;
    }
    let mut digits = vec![0usize; m];
    let mut tuple: Vec<usize> = vec![points[0]; m];
    loop {
        visit(&tuple);
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < points.len() {
                tuple[pos] = points[digits[pos]];
                break;
            }
            digits[pos] = 0;
            tuple[pos] = points[0];
        }
    }
}

/// Partitions `candidates`^m by adjacency matrix. Classes appear in
/// lexicographic order of their first (representative) tuple; members
/// within a class are in lexicographic order.
pub fn adjacency_classes(
    center: &CenterSpec,
    candidates: &PointSet,
    m: usize,
) -> Vec<(AdjacencyMatrix, Vec<Vec<usize>>)> {
    let points: Vec<usize> = candidates.iter().collect();
    let mut order: Vec<(AdjacencyMatrix, Vec<Vec<usize>>)> = Vec::new();
    let mut seen: HashMap<AdjacencyMatrix, usize> = HashMap::new();
    for_each_tuple(&points, m, |tuple| {
        let matrix = adjacency(center, tuple);
        match seen.get(&matrix) {
            Some(&k) => order[k].1.push(tuple.to_vec()),
            None => {
                seen.insert(matrix.clone(), order.len());
                order.push((matrix, vec![tuple.to_vec()]));
            }
        }
    });
    order
}

/// One adjacency class of families sharing an index tag: the
/// lexicographically least member as representative, the shared budget
/// region, and the full member list for expansion on demand.
#[derive(Debug, Clone)]
pub struct FamilyClass {
    pub family: CouplingFamily,
    pub region: GammaRegion,
    pub matrix: AdjacencyMatrix,
    pub members: Vec<Vec<usize>>,
}

impl FamilyClass {
    /// Concrete families for every member tuple, sharing the class region.
    pub fn expand(&self) -> Vec<(CouplingFamily, GammaRegion)> {
        self.members
            .iter()
            .map(|x| {
                let family = CouplingFamily::new(
                    self.family.center().clone(),
                    self.family.index(),
                    x.clone(),
                )
                .expect("class member is a valid tuple");
                (family, self.region.clone())
            })
            .collect()
    }
}

/// Enumerates the pruned indicator-cost families: all no-split families
/// with nonempty region, and split families passing the swap filter. Pair
/// families with equal sources are never yielded (their elements are
/// interior to single-split families). Enumeration is deduplicated by
/// adjacency class.
pub fn filtered_families(center: &Arc<CenterSpec>, candidates: &PointSet) -> Vec<FamilyClass> {
    let n = center.n();
    let mut out = Vec::new();
    let mut push = |index: MultiIndex, classes: &[(AdjacencyMatrix, Vec<Vec<usize>>)]| {
        for (matrix, members) in classes {
            let rep = &members[0];
            let keep = match index {
                MultiIndex::Zero => true,
                MultiIndex::Single(i) => single_swap_active(center, rep, i),
                MultiIndex::Pair(i, j) => {
                    pair_swap_active(center, rep, i, j).expect("pair indices ordered")
                }
            };
            if !keep {
                continue;
            }
            let family = CouplingFamily::new(center.clone(), index, rep.clone())
                .expect("enumerated tuple is valid");
            let region = gamma_region(&family, CostKind::Indicator);
            if region.is_empty() {
                continue;
            }
            out.push(FamilyClass {
                family,
                region,
                matrix: matrix.clone(),
                members: members.clone(),
            });
        }
    };
    let zero_classes = adjacency_classes(center, candidates, n);
    push(MultiIndex::Zero, &zero_classes);
    if !candidates.is_empty() {
        let single_classes = adjacency_classes(center, candidates, n + 1);
        for i in 0..n {
            push(MultiIndex::Single(i), &single_classes);
        }
        if n > 1 {
            let pair_classes = adjacency_classes(center, candidates, n + 2);
            for i in 0..n {
                for j in i + 1..n {
                    push(MultiIndex::Pair(i, j), &pair_classes);
                }
            }
        }
    }
    out
}

/// Enumerates every budget-constrained family with nonempty region, with
/// no swap filter and no adjacency dedup; includes equal-source pair
/// families. This is the superset used in distance-cost mode, where the
/// region depends on actual distances rather than the adjacency matrix.
pub fn constrained_families(
    center: &Arc<CenterSpec>,
    candidates: &PointSet,
    cost: CostKind,
) -> Vec<(CouplingFamily, GammaRegion)> {
    let n = center.n();
    let points: Vec<usize> = candidates.iter().collect();
    let mut out = Vec::new();
    let mut indices = vec![MultiIndex::Zero];
    indices.extend((0..n).map(MultiIndex::Single));
    for i in 0..n {
        for j in i..n {
            indices.push(MultiIndex::Pair(i, j));
        }
    }
    for index in indices {
        for_each_tuple(&points, index.tuple_len(n), |tuple| {
            let family = CouplingFamily::new(center.clone(), index, tuple.to_vec())
                .expect("enumerated tuple is valid");
            let region = gamma_region(&family, cost);
            if !region.is_empty() {
                out.push((family, region));
            }
        });
    }
    out
}

fn measure_cmp(a: &DiscreteMeasure, b: &DiscreteMeasure) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (&(pa, wa), &(pb, wb)) in a.atoms().iter().zip(b.atoms()) {
        match pa.cmp(&pb).then(wa.total_cmp(&wb)) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.atoms().len().cmp(&b.atoms().len())
}

/// Second marginals of the corner couplings of every family, deduplicated.
/// Each output is in the ball (its generating coupling meets the budget)
/// and has support size at most n+2.
pub fn project_candidates(families: &[(CouplingFamily, GammaRegion)]) -> Vec<DiscreteMeasure> {
    let mut out: Vec<DiscreteMeasure> = Vec::new();
    for (family, region) in families {
        for corner in &region.corners {
            let nu = family
                .element(corner, true)
                .expect("region corners satisfy closed bounds");
            debug_assert!(
                {
                    let eps = family.center().eps();
                    let budget = match region.cost {
                        CostKind::Indicator => constraint_value(&nu, eps),
                        CostKind::Distance => nu.distance_cost(),
                    };
                    budget <= eps + 1e-9
                },
                "corner coupling exceeds the budget"
            );
            let mu = nu.marginal_second();
            debug_assert!(mu.support_size() <= family.center().n() + 2);
            out.push(mu);
        }
    }
    out.sort_by(measure_cmp);
    let mut deduped: Vec<DiscreteMeasure> = Vec::new();
    for mu in out {
        if deduped
            .last()
            .map(|prev| prev.is_close(&mu, CORNER_TOL))
            .unwrap_or(false)
        {
            continue;
        }
        deduped.push(mu);
    }
    deduped
}

/// Per-atom vectors of a coupling with first marginal on the center
/// points: the source indicator block, the far-pair indicator, and a
/// constant. A coupling is a corner of its family's feasible set only if
/// these are linearly independent.
pub fn independence_vectors(center: &CenterSpec, nu: &Coupling) -> Vec<Vec<i64>> {
    let n = center.n();
    nu.atoms()
        .iter()
        .map(|&((a, b), _)| {
            let mut v = vec![0i64; n + 2];
            for (k, &y) in center.y().iter().enumerate() {
                if a == y {
                    v[k] = 1;
                }
            }
            if center.space().d(a, b) > center.eps() {
                v[n] = 1;
            }
            v[n + 1] = 1;
            v
        })
        .collect()
}

/// Rank of an integer matrix by fraction-free elimination.
fn integer_rank(mut rows: Vec<Vec<i64>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    let mut col = 0;
    while rank < rows.len() && col < cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            col += 1;
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col];
        let (upper, lower) = rows.split_at_mut(rank + 1);
        let lead = &upper[rank];
        for row in lower {
            let f = row[col];
            if f != 0 {
                for (dst, &src) in row[col..].iter_mut().zip(&lead[col..]) {
                    *dst = *dst * p - src * f;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// True iff the per-atom vectors of the coupling are linearly independent.
pub fn independent_atom_vectors(center: &CenterSpec, nu: &Coupling) -> bool {
    let vectors = independence_vectors(center, nu);
    let count = vectors.len();
    integer_rank(vectors) == count
}
