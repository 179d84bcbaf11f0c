//! Brute-force polytope ground truth for small instances.
//!
//! The metric ball around a finitely supported center is a polytope in two
//! H-representations: directly in measure space (one inequality per subset
//! of the space, from the closed-inflation characterization), and as the
//! projection of the coupling polytope (marginal equalities plus one cost
//! budget row). This module enumerates the vertices of both exactly and
//! checks the structural claims the rest of the crate relies on: vertex
//! support bounds, the projection covering the ball's extreme points, and
//! the face identities behind corner enumeration.
//!
//! Vertex enumeration runs a double-description sweep: start from a seed
//! polytope with known vertices (a bounding box, or a product of
//! simplices), then cut with each constraint, replacing the vertices cut
//! off by intersections along edges. Adjacency is decided combinatorially
//! from active constraint sets. Floating-point runs escalate to exact
//! rational arithmetic whenever two candidate vertices come suspiciously
//! close, so degenerate instances cannot silently merge or split vertices.

use crate::distances::{self, BallMetric};
use crate::extreme_sets::{filtered_families, project_candidates, CenterSpec, FamilyClass};
use crate::lp::Scalar;
use crate::measures::{Coupling, DiscreteMeasure};
use crate::metric_space::{inflate, FiniteMetricSpace, PointMetric, PointSet};
use num::BigRational;
use rand::prelude::*;
use std::ops::RangeInclusive;
use std::sync::Arc;
use thiserror::Error;

/// Vertex coordinates closer than this are merged in floating point.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;
/// Any two candidate vertices closer than this trigger exact arithmetic.
pub const ESCALATION_GAP: f64 = 1e-7;
/// Largest space for the subset-inequality ball representation.
pub const MAX_BALL_SPACE: usize = 12;
/// Largest space for the coupling polytope representation.
pub const MAX_GAMMA_SPACE: usize = 8;
/// Hard cap on live vertices during enumeration.
pub const MAX_VERTICES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("space of size {size} exceeds the oracle limit {max}")]
    SpaceTooLarge { size: usize, max: usize },
    #[error("vertex budget exceeded: {count} live vertices")]
    TooManyBases { count: usize },
    #[error("polytope is unbounded (a vertex rests only on synthetic walls)")]
    Unbounded,
    #[error("polytope has no feasible point")]
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowCmp {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct HRow {
    pub coeffs: Vec<f64>,
    pub cmp: RowCmp,
    pub rhs: f64,
}

/// Seed polytope with known vertices that is guaranteed to contain the
/// target. Its facets are bookkeeping only; a real vertex must be pinned
/// by actual rows.
#[derive(Debug, Clone)]
enum Seed {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    SimplexProduct { groups: Vec<(Vec<usize>, f64)> },
}

#[derive(Debug, Clone)]
pub struct HPolytope {
    pub dim: usize,
    pub rows: Vec<HRow>,
    seed: Seed,
}

impl HPolytope {
    /// Polytope known to lie inside the box [lo, hi].
    pub fn new_boxed(dim: usize, rows: Vec<HRow>, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), dim);
        assert_eq!(hi.len(), dim);
        HPolytope {
            dim,
            rows,
            seed: Seed::Box { lo, hi },
        }
    }

    fn new_simplex_product(dim: usize, rows: Vec<HRow>, groups: Vec<(Vec<usize>, f64)>) -> Self {
        HPolytope {
            dim,
            rows,
            seed: Seed::SimplexProduct { groups },
        }
    }

    fn row_value(&self, r: usize, x: &[f64]) -> f64 {
        self.rows[r].coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Membership within a tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().enumerate().all(|(r, row)| {
            let v = self.row_value(r, x);
            match row.cmp {
                RowCmp::Le => v <= row.rhs + tol,
                RowCmp::Eq => (v - row.rhs).abs() <= tol,
            }
        })
    }

    fn tight_rows(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| (self.row_value(r, x) - self.rows[r].rhs).abs() <= tol)
            .collect()
    }
}

/// Enumerated vertices with the rows tight at each one.
#[derive(Debug, Clone)]
pub struct VertexSet {
    pub vertices: Vec<Vec<f64>>,
    pub active_sets: Vec<Vec<usize>>,
    /// Whether exact rational arithmetic was needed.
    pub exact: bool,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

type Bits = Vec<u64>;

fn bits_new(len: usize) -> Bits {
    vec![0; len.div_ceil(64)]
}
fn bit_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}
fn bits_and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}
fn bits_superset(big: &Bits, small: &Bits) -> bool {
    small.iter().zip(big).all(|(s, b)| s & !b == 0)
}

struct DdVertex<T> {
    coords: Vec<T>,
    active: Bits,
}

fn dot<T: Scalar>(a: &[T], x: &[T]) -> T {
    let mut acc = T::zero();
    for (c, v) in a.iter().zip(x) {
        acc = acc + c.clone() * v.clone();
    }
    acc
}

fn coords_close<T: Scalar>(a: &[T], b: &[T], tol: &T) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x.clone() - y.clone()).abs_val() <= *tol)
}

/// One double-description sweep in the given arithmetic. Returns the final
/// vertex coordinates; active sets are rebuilt by the caller against the
/// original rows.
fn dd_run<T: Scalar>(poly: &HPolytope, tol: T) -> Result<Vec<Vec<T>>, OracleError> {
    let dim = poly.dim;
    // Seed walls and vertices.
    let mut walls: Vec<(Vec<T>, T)> = Vec::new();
    let mut verts: Vec<DdVertex<T>> = Vec::new();
    match &poly.seed {
        Seed::Box { lo, hi } => {
            if dim > 20 {
                return Err(OracleError::TooManyBases { count: 1 << 20 });
            }
            for k in 0..dim {
                let mut low = vec![T::zero(); dim];
                low[k] = T::zero() - T::one();
                walls.push((low, T::from_f64(-lo[k])));
                let mut high = vec![T::zero(); dim];
                high[k] = T::one();
                walls.push((high, T::from_f64(hi[k])));
            }
            for mask in 0u64..(1 << dim) {
                let coords: Vec<T> = (0..dim)
                    .map(|k| T::from_f64(if mask >> k & 1 == 1 { hi[k] } else { lo[k] }))
                    .collect();
                verts.push(DdVertex {
                    coords,
                    active: bits_new(0),
                });
            }
        }
        Seed::SimplexProduct { groups } => {
            for k in 0..dim {
                let mut low = vec![T::zero(); dim];
                low[k] = T::zero() - T::one();
                walls.push((low, T::zero()));
            }
            let mut count = 1usize;
            for (g, _) in groups {
                count = count.saturating_mul(g.len());
                if count > MAX_VERTICES {
                    return Err(OracleError::TooManyBases { count });
                }
            }
            let mut choices = vec![0usize; groups.len()];
            loop {
                let mut coords = vec![T::zero(); dim];
                for (gi, (vars, mass)) in groups.iter().enumerate() {
                    coords[vars[choices[gi]]] = T::from_f64(*mass);
                }
                verts.push(DdVertex {
                    coords,
                    active: bits_new(0),
                });
                let mut pos = groups.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    choices[pos] += 1;
                    if choices[pos] < groups[pos].0.len() {
                        break;
                    }
                    choices[pos] = 0;
                }
                if choices.iter().all(|&c| c == 0) {
                    break;
                }
            }
        }
    }

    // Cuts: every real row, equalities as opposing halfspaces.
    let mut cuts: Vec<(Vec<T>, T)> = Vec::new();
    for row in &poly.rows {
        let a: Vec<T> = row.coeffs.iter().map(|&c| T::from_f64(c)).collect();
        let b = T::from_f64(row.rhs);
        match row.cmp {
            RowCmp::Le => cuts.push((a, b)),
            RowCmp::Eq => {
                let neg: Vec<T> = a.iter().map(|c| T::zero() - c.clone()).collect();
                let negb = T::zero() - b.clone();
                cuts.push((a, b));
                cuts.push((neg, negb));
            }
        }
    }
    let total_rows = walls.len() + cuts.len();
    let tight_at = |coords: &[T], upto: usize| -> Bits {
        let mut bits = bits_new(total_rows);
        for (w, (a, b)) in walls.iter().enumerate() {
            if (dot(a, coords) - b.clone()).abs_val() <= tol {
                bit_set(&mut bits, w);
            }
        }
        for (c, (a, b)) in cuts[..upto].iter().enumerate() {
            if (dot(a, coords) - b.clone()).abs_val() <= tol {
                bit_set(&mut bits, walls.len() + c);
            }
        }
        bits
    };
    // A point is a vertex of the intermediate polytope iff its tight rows
    // (walls included) span the full dimension. Guards against candidates
    // born from tolerance-noise adjacency.
    let is_vertex = |bits: &Bits| -> bool {
        let mut mat: Vec<Vec<T>> = Vec::new();
        for r in 0..total_rows {
            if bits[r / 64] >> (r % 64) & 1 == 1 {
                let coeffs = if r < walls.len() {
                    &walls[r].0
                } else {
                    &cuts[r - walls.len()].0
                };
                mat.push(coeffs.clone());
            }
        }
        matrix_rank(mat, &tol) == dim
    };
    for v in &mut verts {
        v.active = tight_at(&v.coords, 0);
    }

    for (ci, (a, b)) in cuts.iter().enumerate() {
        let gi = walls.len() + ci;
        let vals: Vec<T> = verts
            .iter()
            .map(|v| dot(a, &v.coords) - b.clone())
            .collect();
        let neg_tol = T::zero() - tol.clone();
        let is_out = |v: &T| *v > tol;
        let is_in = |v: &T| *v < neg_tol;
        if !vals.iter().any(is_out) {
            for (v, val) in verts.iter_mut().zip(&vals) {
                if !is_in(val) {
                    bit_set(&mut v.active, gi);
                }
            }
            continue;
        }
        if !vals.iter().any(|v| !is_out(v)) {
            return Err(OracleError::Infeasible);
        }
        let mut new_verts: Vec<DdVertex<T>> = Vec::new();
        for i in 0..verts.len() {
            if !is_in(&vals[i]) {
                continue;
            }
            for j in 0..verts.len() {
                if !is_out(&vals[j]) {
                    continue;
                }
                // Combinatorial adjacency: no third vertex is tight on
                // everything the pair shares.
                let common = bits_and(&verts[i].active, &verts[j].active);
                let blocked = verts
                    .iter()
                    .enumerate()
                    .any(|(k, w)| k != i && k != j && bits_superset(&w.active, &common));
                if blocked {
                    continue;
                }
                let t = (T::zero() - vals[i].clone()) / (vals[j].clone() - vals[i].clone());
                let coords: Vec<T> = verts[i]
                    .coords
                    .iter()
                    .zip(&verts[j].coords)
                    .map(|(p, q)| p.clone() + t.clone() * (q.clone() - p.clone()))
                    .collect();
                let mut active = tight_at(&coords, ci + 1);
                bit_set(&mut active, gi);
                if is_vertex(&active) {
                    new_verts.push(DdVertex { coords, active });
                }
            }
        }
        let mut kept: Vec<DdVertex<T>> = Vec::new();
        for (k, v) in verts.drain(..).enumerate() {
            if is_out(&vals[k]) {
                continue;
            }
            let mut v = v;
            if !is_in(&vals[k]) {
                bit_set(&mut v.active, gi);
            }
            kept.push(v);
        }
        for nv in new_verts {
            if kept
                .iter()
                .all(|v| !coords_close(&v.coords, &nv.coords, &tol))
            {
                kept.push(nv);
            }
        }
        if kept.len() > MAX_VERTICES {
            return Err(OracleError::TooManyBases { count: kept.len() });
        }
        verts = kept;
    }
    Ok(verts.into_iter().map(|v| v.coords).collect())
}

fn matrix_rank<T: Scalar>(mut rows: Vec<Vec<T>>, tol: &T) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < cols {
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| {
                rows[a][col]
                    .abs_val()
                    .partial_cmp(&rows[b][col].abs_val())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if rows[pivot][col].abs_val() <= *tol {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        let (upper, lower) = rows.split_at_mut(rank + 1);
        let lead = &upper[rank];
        for row in lower {
            let f = row[col].clone() / p.clone();
            for (dst, src) in row[col..].iter_mut().zip(&lead[col..]) {
                *dst = dst.clone() - f.clone() * src.clone();
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

fn min_pair_gap(verts: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let gap = verts[i]
                .iter()
                .zip(&verts[j])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            best = best.min(gap);
            if best < ESCALATION_GAP {
                return best;
            }
        }
    }
    best
}

fn finalize(
    poly: &HPolytope,
    mut verts: Vec<Vec<f64>>,
    exact: bool,
) -> Result<VertexSet, OracleError> {
    verts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut active_sets = Vec::with_capacity(verts.len());
    for v in &verts {
        let tight = poly.tight_rows(v, VERTEX_DEDUP_TOL);
        let mat: Vec<Vec<f64>> = tight.iter().map(|&r| poly.rows[r].coeffs.clone()).collect();
        if matrix_rank(mat, &1e-8) < poly.dim {
            // The point leans on seed walls that are not real constraints.
            return Err(OracleError::Unbounded);
        }
        active_sets.push(tight);
    }
    Ok(VertexSet {
        vertices: verts,
        active_sets,
        exact,
    })
}

/// All vertices of the polytope. Floating point first; exact rational
/// arithmetic when two candidates fall within the escalation gap.
pub fn enumerate_vertices(poly: &HPolytope) -> Result<VertexSet, OracleError> {
    enumerate_vertices_with_tol(poly, VERTEX_DEDUP_TOL)
}

pub fn enumerate_vertices_with_tol(
    poly: &HPolytope,
    dedup_tol: f64,
) -> Result<VertexSet, OracleError> {
    let float = dd_run::<f64>(poly, dedup_tol)?;
    if min_pair_gap(&float) >= ESCALATION_GAP {
        return finalize(poly, float, false);
    }
    let exact = dd_run::<BigRational>(poly, <BigRational as Scalar>::zero())?;
    let verts: Vec<Vec<f64>> = exact
        .iter()
        .map(|v| v.iter().map(Scalar::to_f64).collect())
        .collect();
    finalize(poly, verts, true)
}

/// True iff the point lies in the polytope with its tight rows spanning
/// the full dimension.
pub fn is_extreme_point(x: &[f64], poly: &HPolytope) -> bool {
    if !poly.contains(x, VERTEX_DEDUP_TOL) {
        return false;
    }
    let tight = poly.tight_rows(x, VERTEX_DEDUP_TOL);
    let mat: Vec<Vec<f64>> = tight.iter().map(|&r| poly.rows[r].coeffs.clone()).collect();
    matrix_rank(mat, &1e-8) == poly.dim
}

/// True iff the measure is an extreme point of the polytope, reading its
/// dense weight vector as coordinates.
pub fn is_extreme(mu: &DiscreteMeasure, poly: &HPolytope) -> bool {
    is_extreme_point(&mu.dense(), poly)
}

/// H-representation of the ball in measure space: simplex constraints plus
/// one inequality per nontrivial subset A, bounding the mass of A by the
/// center's mass of the closed ε-inflation of A plus ε.
pub fn ball_hrep_prokhorov(center: &CenterSpec) -> Result<HPolytope, OracleError> {
    ball_hrep_with_inflation(center, true)
}

/// Variant with open inflation, for recording whether the two conventions
/// carve out different polytopes on a given instance.
pub fn ball_hrep_with_inflation(
    center: &CenterSpec,
    closed_inflation: bool,
) -> Result<HPolytope, OracleError> {
    let space = center.space();
    let size = space.size();
    if size > MAX_BALL_SPACE {
        return Err(OracleError::SpaceTooLarge {
            size,
            max: MAX_BALL_SPACE,
        });
    }
    let mu_n = center.measure();
    let mut rows = Vec::new();
    for x in 0..size {
        let mut coeffs = vec![0.0; size];
        coeffs[x] = -1.0;
        rows.push(HRow {
            coeffs,
            cmp: RowCmp::Le,
            rhs: 0.0,
        });
    }
    rows.push(HRow {
        coeffs: vec![1.0; size],
        cmp: RowCmp::Eq,
        rhs: 1.0,
    });
    for mask in 1u32..(1 << size) - 1 {
        let members = (0..size).filter(|&x| mask >> x & 1 == 1);
        let subset = PointSet::new(space, members).expect("mask indices are in range");
        let inflated = inflate(space, &subset, center.eps(), closed_inflation);
        let rhs = mu_n.mass_of(inflated.iter()) + center.eps();
        let mut coeffs = vec![0.0; size];
        for x in subset.iter() {
            coeffs[x] = 1.0;
        }
        rows.push(HRow {
            coeffs,
            cmp: RowCmp::Le,
            rhs,
        });
    }
    Ok(HPolytope::new_boxed(
        size,
        rows,
        vec![0.0; size],
        vec![1.0; size],
    ))
}

/// H-representation of the coupling polytope: variables ν(yᵢ, x) with
/// fixed per-source masses and one transport-cost budget row.
pub fn gamma_hrep(center: &CenterSpec, mode: BallMetric) -> Result<HPolytope, OracleError> {
    let space = center.space();
    let size = space.size();
    if size > MAX_GAMMA_SPACE {
        return Err(OracleError::SpaceTooLarge {
            size,
            max: MAX_GAMMA_SPACE,
        });
    }
    let n = center.n();
    let dim = n * size;
    let idx = |i: usize, x: usize| i * size + x;
    let mut rows = Vec::new();
    for v in 0..dim {
        let mut coeffs = vec![0.0; dim];
        coeffs[v] = -1.0;
        rows.push(HRow {
            coeffs,
            cmp: RowCmp::Le,
            rhs: 0.0,
        });
    }
    for i in 0..n {
        let mut coeffs = vec![0.0; dim];
        for x in 0..size {
            coeffs[idx(i, x)] = 1.0;
        }
        rows.push(HRow {
            coeffs,
            cmp: RowCmp::Eq,
            rhs: center.beta()[i],
        });
    }
    rows.push(HRow {
        coeffs: vec![1.0; dim],
        cmp: RowCmp::Eq,
        rhs: 1.0,
    });
    let mut budget = vec![0.0; dim];
    for i in 0..n {
        for x in 0..size {
            budget[idx(i, x)] = match mode {
                BallMetric::Prokhorov => {
                    if space.d(center.y()[i], x) > center.eps() {
                        1.0
                    } else {
                        0.0
                    }
                }
                BallMetric::Kantorovich => space.d(center.y()[i], x),
            };
        }
    }
    rows.push(HRow {
        coeffs: budget,
        cmp: RowCmp::Le,
        rhs: center.eps(),
    });
    let groups = (0..n)
        .map(|i| ((0..size).map(|x| idx(i, x)).collect(), center.beta()[i]))
        .collect();
    Ok(HPolytope::new_simplex_product(dim, rows, groups))
}

fn coupling_from_coords(center: &CenterSpec, coords: &[f64]) -> Coupling {
    let size = center.space().size();
    let mut atoms = Vec::new();
    for i in 0..center.n() {
        for x in 0..size {
            let w = coords[i * size + x];
            if w > 1e-15 {
                atoms.push(((center.y()[i], x), w));
            }
        }
    }
    Coupling::new(center.space().clone(), atoms).expect("vertex coordinates form a coupling")
}

fn measure_from_coords(space: &Arc<FiniteMetricSpace>, coords: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::from_dense(space.clone(), coords).expect("vertex coordinates form a measure")
}

fn support_count(coords: &[f64]) -> usize {
    coords.iter().filter(|w| w.abs() > VERTEX_DEDUP_TOL).count()
}

/// Vertex support-bound check for one instance.
#[derive(Debug, Clone)]
pub struct SupportReport {
    pub mode: BallMetric,
    pub n: usize,
    pub bound: usize,
    pub gamma_vertex_count: usize,
    pub gamma_max_support: usize,
    /// Ball-side counts; absent in distance-cost mode, where only the
    /// coupling polytope has a direct H-representation.
    pub ball_vertex_count: Option<usize>,
    pub ball_max_support: Option<usize>,
    pub ok: bool,
}

/// Enumerates coupling-polytope vertices (and ball vertices in indicator
/// mode) and checks every support against the n+2 bound.
pub fn verify_support_bound(
    center: &CenterSpec,
    mode: BallMetric,
) -> Result<SupportReport, OracleError> {
    let n = center.n();
    let bound = n + 2;
    let gamma = enumerate_vertices(&gamma_hrep(center, mode)?)?;
    let gamma_max = gamma
        .vertices
        .iter()
        .map(|v| support_count(v))
        .max()
        .unwrap_or(0);
    let mut ok = gamma_max <= bound;
    let (ball_count, ball_max) = match mode {
        BallMetric::Prokhorov => {
            let ball = enumerate_vertices(&ball_hrep_prokhorov(center)?)?;
            let m = ball
                .vertices
                .iter()
                .map(|v| support_count(v))
                .max()
                .unwrap_or(0);
            ok &= m <= bound;
            (Some(ball.len()), Some(m))
        }
        BallMetric::Kantorovich => (None, None),
    };
    Ok(SupportReport {
        mode,
        n,
        bound,
        gamma_vertex_count: gamma.len(),
        gamma_max_support: gamma_max,
        ball_vertex_count: ball_count,
        ball_max_support: ball_max,
        ok,
    })
}

/// Projection-cover check for one instance (indicator mode).
#[derive(Debug, Clone)]
pub struct CoverReport {
    pub ball_vertex_count: usize,
    pub gamma_vertex_count: usize,
    /// Ball vertices with no coupling vertex projecting onto them.
    pub missing_marginal_match: usize,
    /// Ball vertices missing from the explicit candidate enumeration.
    pub missing_candidate_match: usize,
    /// Coupling-vertex projections that fail ball membership.
    pub projections_outside_ball: usize,
    /// Ball vertices with no feasible coupling back to the center.
    pub vertices_without_coupling: usize,
    /// Whether open and closed inflation carve out different ball
    /// polytopes here. Recorded, not counted as a violation.
    pub open_closed_differs: bool,
    pub ok: bool,
}

/// Checks that coupling-vertex projections cover the ball's vertices, that
/// the explicit family candidates contain every ball vertex, and that
/// projection and ball agree as sets.
pub fn verify_projection_cover(center: &Arc<CenterSpec>) -> Result<CoverReport, OracleError> {
    let space = center.space().clone();
    let ball_poly = ball_hrep_prokhorov(center)?;
    let ball = enumerate_vertices(&ball_poly)?;
    let gamma = enumerate_vertices(&gamma_hrep(center, BallMetric::Prokhorov)?)?;
    let ball_measures: Vec<DiscreteMeasure> = ball
        .vertices
        .iter()
        .map(|v| measure_from_coords(&space, v))
        .collect();
    let marginals: Vec<DiscreteMeasure> = gamma
        .vertices
        .iter()
        .map(|v| coupling_from_coords(center, v).marginal_second())
        .collect();
    let all_points = PointSet::full(&space);
    let expanded: Vec<_> = filtered_families(center, &all_points)
        .iter()
        .flat_map(FamilyClass::expand)
        .collect();
    let candidates = project_candidates(&expanded);

    let mut missing_marginal = 0;
    let mut missing_candidate = 0;
    let mut no_coupling = 0;
    for mu in &ball_measures {
        if !marginals.iter().any(|m| m.is_close(mu, 1e-9)) {
            missing_marginal += 1;
        }
        if !candidates.iter().any(|c| c.is_close(mu, 1e-9)) {
            missing_candidate += 1;
        }
        let feasible = distances::strassen_feasible(&center.measure(), mu, center.eps())
            .map(|o| o.is_some())
            .unwrap_or(false);
        if !feasible {
            no_coupling += 1;
        }
    }
    let outside = marginals
        .iter()
        .filter(|m| !ball_poly.contains(&m.dense(), 1e-9))
        .count();

    let open_ball = enumerate_vertices(&ball_hrep_with_inflation(center, false)?)?;
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9);
    let same_sets = open_ball.len() == ball.len()
        && ball
            .vertices
            .iter()
            .all(|v| open_ball.vertices.iter().any(|w| close(v, w)));

    let ok = missing_marginal == 0 && missing_candidate == 0 && outside == 0 && no_coupling == 0;
    Ok(CoverReport {
        ball_vertex_count: ball.len(),
        gamma_vertex_count: gamma.len(),
        missing_marginal_match: missing_marginal,
        missing_candidate_match: missing_candidate,
        projections_outside_ball: outside,
        vertices_without_coupling: no_coupling,
        open_closed_differs: !same_sets,
        ok,
    })
}

/// Face-identity check for one instance.
#[derive(Debug, Clone)]
pub struct FaceReport {
    pub faces_checked: usize,
    pub empty_faces: usize,
    pub mismatches: usize,
    pub ok: bool,
}

/// For every inequality row of the ball polytope, tightening the row to an
/// equality must produce exactly the ball vertices where the row was
/// already tight.
pub fn verify_face_identities(center: &CenterSpec) -> Result<FaceReport, OracleError> {
    let poly = ball_hrep_prokhorov(center)?;
    let ball = enumerate_vertices(&poly)?;
    let mut faces_checked = 0;
    let mut empty_faces = 0;
    let mut mismatches = 0;
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9);
    for r in 0..poly.rows.len() {
        if poly.rows[r].cmp != RowCmp::Le {
            continue;
        }
        faces_checked += 1;
        let mut face_poly = poly.clone();
        face_poly.rows[r].cmp = RowCmp::Eq;
        let face_vertices = match enumerate_vertices(&face_poly) {
            Ok(set) => set.vertices,
            Err(OracleError::Infeasible) => {
                empty_faces += 1;
                Vec::new()
            }
            Err(e) => return Err(e),
        };
        let tight: Vec<&Vec<f64>> = ball
            .vertices
            .iter()
            .zip(&ball.active_sets)
            .filter(|(_, act)| act.contains(&r))
            .map(|(v, _)| v)
            .collect();
        let covered = face_vertices
            .iter()
            .all(|fv| tight.iter().any(|tv| close(fv, tv)))
            && tight
                .iter()
                .all(|tv| face_vertices.iter().any(|fv| close(fv, tv)));
        if !covered || face_vertices.len() != tight.len() {
            mismatches += 1;
        }
    }
    Ok(FaceReport {
        faces_checked,
        empty_faces,
        mismatches,
        ok: mismatches == 0,
    })
}

/// Random small instance: a planar point cloud with the Euclidean metric,
/// a random sub-support center, and a radius uniform in (0,1).
pub fn sample_center<R: Rng>(
    rng: &mut R,
    sizes: RangeInclusive<usize>,
    ns: RangeInclusive<usize>,
) -> Arc<CenterSpec> {
    let size = rng.random_range(sizes);
    let space = loop {
        let pts: Vec<Vec<f64>> = (0..size)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        if let Ok(s) = FiniteMetricSpace::from_points(&pts, PointMetric::Euclidean, None) {
            break Arc::new(s);
        }
    };
    let n = rng.random_range(ns).min(size);
    let mut y: Vec<usize> = (0..size).collect();
    y.shuffle(rng);
    y.truncate(n);
    y.sort_unstable();
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = raw.iter().sum();
    let beta: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
    let eps = rng.random::<f64>().max(1e-3);
    Arc::new(CenterSpec::new(space, y, beta, eps).expect("sampled center is valid"))
}

/// Random full-support probe measure on the space.
pub fn sample_measure<R: Rng>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> DiscreteMeasure {
    let raw: Vec<f64> = (0..space.size())
        .map(|_| -(rng.random::<f64>().max(1e-12)).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
    DiscreteMeasure::from_dense(space.clone(), &weights).expect("normalized weights form a measure")
}

/// Aggregate over randomized instances, in the shape the verification
/// command reports.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub instances: usize,
    pub violations: usize,
    pub max_support: usize,
    pub support_bound: usize,
    pub open_closed_differences: usize,
    pub runtime_ms: u128,
}

/// Runs support-bound and cover checks (cover in indicator mode only) on
/// one instance; returns observed max support and violation count.
pub fn verify_instance(
    center: &Arc<CenterSpec>,
    mode: BallMetric,
) -> Result<(SupportReport, Option<CoverReport>), OracleError> {
    let support = verify_support_bound(center, mode)?;
    let cover = match mode {
        BallMetric::Prokhorov => Some(verify_projection_cover(center)?),
        BallMetric::Kantorovich => None,
    };
    Ok((support, cover))
}

/// Randomized verification sweep: independent instances derived from the
/// seed, one report across all of them. Instances are processed in
/// parallel; per-instance seeding keeps results identical regardless of
/// thread schedule.
pub fn verify_random_instances(
    seed: u64,
    trials: usize,
    mode: BallMetric,
    sizes: RangeInclusive<usize>,
    ns: RangeInclusive<usize>,
) -> Result<VerifyReport, OracleError> {
    use rayon::prelude::*;
    let start = std::time::Instant::now();
    let results: Vec<Result<(SupportReport, Option<CoverReport>), OracleError>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let center = sample_center(&mut rng, sizes.clone(), ns.clone());
            verify_instance(&center, mode)
        })
        .collect();
    let mut violations = 0;
    let mut max_support = 0;
    let mut bound = 0;
    let mut open_closed = 0;
    for r in results {
        let (support, cover) = r?;
        bound = bound.max(support.bound);
        max_support = max_support
            .max(support.gamma_max_support)
            .max(support.ball_max_support.unwrap_or(0));
        if !support.ok {
            violations += 1;
        }
        if let Some(c) = cover {
            if !c.ok {
                violations += 1;
            }
            if c.open_closed_differs {
                open_closed += 1;
            }
        }
    }
    Ok(VerifyReport {
        instances: trials,
        violations,
        max_support,
        support_bound: bound,
        open_closed_differences: open_closed,
        runtime_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn nonneg_rows(dim: usize) -> Vec<HRow> {
        (0..dim)
            .map(|k| {
                let mut coeffs = vec![0.0; dim];
                coeffs[k] = -1.0;
                HRow {
                    coeffs,
                    cmp: RowCmp::Le,
                    rhs: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn unit_simplex_vertices() {
        let mut rows = nonneg_rows(2);
        rows.push(HRow {
            coeffs: vec![1.0, 1.0],
            cmp: RowCmp::Eq,
            rhs: 1.0,
        });
        let poly = HPolytope::new_boxed(2, rows, vec![0.0; 2], vec![1.0; 2]);
        let set = enumerate_vertices(&poly).unwrap();
        assert_eq!(set.vertices, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(!set.exact);
    }

    #[test]
    fn square_has_four_vertices() {
        let mut rows = nonneg_rows(2);
        for k in 0..2 {
            let mut coeffs = vec![0.0; 2];
            coeffs[k] = 1.0;
            rows.push(HRow {
                coeffs,
                cmp: RowCmp::Le,
                rhs: 1.0,
            });
        }
        let poly = HPolytope::new_boxed(2, rows, vec![-0.5; 2], vec![1.5; 2]);
        let set = enumerate_vertices(&poly).unwrap();
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn clipped_square_is_pentagon() {
        let mut rows = nonneg_rows(2);
        for k in 0..2 {
            let mut coeffs = vec![0.0; 2];
            coeffs[k] = 1.0;
            rows.push(HRow {
                coeffs,
                cmp: RowCmp::Le,
                rhs: 1.0,
            });
        }
        rows.push(HRow {
            coeffs: vec![1.0, 1.0],
            cmp: RowCmp::Le,
            rhs: 1.5,
        });
        let poly = HPolytope::new_boxed(2, rows, vec![0.0; 2], vec![1.0; 2]);
        let set = enumerate_vertices(&poly).unwrap();
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn near_degenerate_cut_escalates_to_exact() {
        let mut rows = nonneg_rows(2);
        for k in 0..2 {
            let mut coeffs = vec![0.0; 2];
            coeffs[k] = 1.0;
            rows.push(HRow {
                coeffs,
                cmp: RowCmp::Le,
                rhs: 1.0,
            });
        }
        rows.push(HRow {
            coeffs: vec![1.0, 1.0],
            cmp: RowCmp::Le,
            rhs: 1.0 + 1e-8,
        });
        let poly = HPolytope::new_boxed(2, rows, vec![0.0; 2], vec![1.0; 2]);
        let set = enumerate_vertices(&poly).unwrap();
        assert!(set.exact);
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn infeasible_polytope_is_detected() {
        let mut rows = nonneg_rows(1);
        rows.push(HRow {
            coeffs: vec![1.0],
            cmp: RowCmp::Le,
            rhs: -1.0,
        });
        let poly = HPolytope::new_boxed(1, rows, vec![0.0], vec![1.0]);
        assert_eq!(
            enumerate_vertices(&poly).unwrap_err(),
            OracleError::Infeasible
        );
    }

    #[test]
    fn unbounded_via_synthetic_walls_is_detected() {
        // Only one real constraint in two dimensions: every seed-box
        // corner leans on synthetic walls.
        let rows = vec![HRow {
            coeffs: vec![1.0, 0.0],
            cmp: RowCmp::Le,
            rhs: 0.5,
        }];
        let poly = HPolytope::new_boxed(2, rows, vec![0.0; 2], vec![1.0; 2]);
        assert_eq!(
            enumerate_vertices(&poly).unwrap_err(),
            OracleError::Unbounded
        );
    }

    fn golden_center() -> Arc<CenterSpec> {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .unwrap(),
        );
        Arc::new(CenterSpec::new(space, vec![0], vec![1.0], 0.3).unwrap())
    }

    #[test]
    fn two_point_ball_vertices() {
        let set = enumerate_vertices(&ball_hrep_prokhorov(&golden_center()).unwrap()).unwrap();
        assert_eq!(set.vertices, vec![vec![0.7, 0.3], vec![1.0, 0.0]]);
    }

    #[test]
    fn two_point_gamma_vertices() {
        let set = enumerate_vertices(&gamma_hrep(&golden_center(), BallMetric::Prokhorov).unwrap())
            .unwrap();
        assert_eq!(set.vertices, vec![vec![0.7, 0.3], vec![1.0, 0.0]]);
    }

    #[test]
    fn wide_radius_ball_is_the_simplex() {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into(), "c".into()],
                vec![
                    vec![0.0, 0.4, 0.8],
                    vec![0.4, 0.0, 0.5],
                    vec![0.8, 0.5, 0.0],
                ],
            )
            .unwrap(),
        );
        let center = CenterSpec::new(space, vec![0], vec![1.0], 1.0).unwrap();
        let set = enumerate_vertices(&ball_hrep_prokhorov(&center).unwrap()).unwrap();
        assert_eq!(set.len(), 3);
        for v in &set.vertices {
            assert_eq!(support_count(v), 1);
        }
    }

    #[test]
    fn zero_radius_ball_degenerates_to_center() {
        let space = Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .unwrap(),
        );
        let center = CenterSpec::new(space, vec![0, 1], vec![0.25, 0.75], 0.0).unwrap();
        let set = enumerate_vertices(&ball_hrep_prokhorov(&center).unwrap()).unwrap();
        assert_eq!(set.vertices, vec![vec![0.25, 0.75]]);
    }

    #[test]
    fn extremality_test_on_simplex() {
        let mut rows = nonneg_rows(2);
        rows.push(HRow {
            coeffs: vec![1.0, 1.0],
            cmp: RowCmp::Eq,
            rhs: 1.0,
        });
        let poly = HPolytope::new_boxed(2, rows, vec![0.0; 2], vec![1.0; 2]);
        assert!(is_extreme_point(&[1.0, 0.0], &poly));
        assert!(!is_extreme_point(&[0.5, 0.5], &poly));
        assert!(!is_extreme_point(&[0.8, 0.8], &poly));
    }

    #[test]
    fn oracle_self_consistency_on_ball_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let center = sample_center(&mut rng, 3..=4, 1..=2);
            let poly = ball_hrep_prokhorov(&center).unwrap();
            let set = enumerate_vertices(&poly).unwrap();
            for v in &set.vertices {
                assert!(is_extreme_point(v, &poly));
            }
            // Midpoints of distinct vertices are never extreme.
            if set.len() >= 2 {
                let mid: Vec<f64> = set.vertices[0]
                    .iter()
                    .zip(&set.vertices[1])
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                assert!(!is_extreme_point(&mid, &poly));
            }
        }
    }

    #[test]
    fn membership_matches_coupling_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut members = 0;
        let mut outsiders = 0;
        for _ in 0..8 {
            let center = sample_center(&mut rng, 3..=4, 1..=2);
            let poly = ball_hrep_prokhorov(&center).unwrap();
            for _ in 0..25 {
                let probe = sample_measure(&mut rng, center.space());
                let inside = poly.contains(&probe.dense(), 1e-9);
                let feasible =
                    distances::strassen_feasible(&center.measure(), &probe, center.eps())
                        .unwrap()
                        .is_some();
                assert_eq!(inside, feasible);
                if inside {
                    members += 1;
                } else {
                    outsiders += 1;
                }
            }
        }
        assert!(members > 0 && outsiders > 0, "probe mix is one-sided");
    }

    #[test]
    fn support_and_cover_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let center = sample_center(&mut rng, 3..=4, 1..=2);
            let (support, cover) = verify_instance(&center, BallMetric::Prokhorov).unwrap();
            assert!(support.ok, "support bound failed: {support:?}");
            let cover = cover.unwrap();
            assert!(cover.ok, "cover failed: {cover:?}");
            let support_k = verify_support_bound(&center, BallMetric::Kantorovich).unwrap();
            assert!(support_k.ok);
        }
    }

    #[test]
    fn face_identities_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..3 {
            let center = sample_center(&mut rng, 3..=4, 1..=2);
            let report = verify_face_identities(&center).unwrap();
            assert!(report.ok, "face mismatch: {report:?}");
            assert!(report.faces_checked > 0);
        }
    }

    #[test]
    fn randomized_sweep_reports_zero_violations() {
        let report = verify_random_instances(7, 6, BallMetric::Prokhorov, 3..=4, 1..=2).unwrap();
        assert_eq!(report.instances, 6);
        assert_eq!(report.violations, 0);
        assert!(report.max_support <= report.support_bound);
    }
}
