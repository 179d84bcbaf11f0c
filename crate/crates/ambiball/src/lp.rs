//! Dense two-phase simplex kernel.
//!
//! Every linear program in this crate is small (tens of variables, tens of
//! rows): transport plans between discrete measures, their duals, and the
//! γ-polytope programs used by the optimizer. A dense tableau with Bland's
//! anti-cycling rule is enough at that scale and keeps the solver
//! deterministic, which the golden tests rely on.
//!
//! The solver is generic over [`Scalar`] so the same pivoting code runs in
//! `f64` with a small tolerance and in `BigRational` with exact arithmetic.
//! The rational instantiation is used by the oracle and by exact golden
//! tests; it uses a zero tolerance, so every comparison is exact.
//!
//! Variables are implicitly nonnegative. Callers that need a free variable
//! split it or shift it into the nonnegative orthant.

use num::BigRational;
use num::ToPrimitive;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number type the simplex kernel pivots over.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact lift of a finite `f64`. For rationals this is the exact binary
    /// value of the float, not a decimal re-reading.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    /// Pivot and feasibility tolerance. Exact types return zero.
    fn default_tol() -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn default_tol() -> Self {
        1e-11
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational in f64 range")
    }
    fn abs_val(&self) -> Self {
        num::Signed::abs(self)
    }
    fn default_tol() -> Self {
        num::Zero::zero()
    }
}

/// Convenience constructor for rational constants in tests and oracles.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Row sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "linear program is infeasible"),
            LpError::Unbounded => write!(f, "linear program is unbounded"),
        }
    }
}

impl std::error::Error for LpError {}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
}

/// A linear program over nonnegative variables.
#[derive(Debug, Clone)]
pub struct LpProblem<T> {
    n_vars: usize,
    minimize: bool,
    objective: Vec<T>,
    rows: Vec<(Vec<T>, Cmp, T)>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn minimize(n_vars: usize) -> Self {
        LpProblem {
            n_vars,
            minimize: true,
            objective: vec![T::zero(); n_vars],
            rows: Vec::new(),
        }
    }

    pub fn maximize(n_vars: usize) -> Self {
        LpProblem {
            minimize: false,
            ..Self::minimize(n_vars)
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_objective(&mut self, coeffs: Vec<T>) {
        assert_eq!(coeffs.len(), self.n_vars, "objective arity");
        self.objective = coeffs;
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, cmp: Cmp, rhs: T) {
        assert_eq!(coeffs.len(), self.n_vars, "row arity");
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution<T>, LpError> {
        self.solve_with_tol(T::default_tol())
    }

    /// Two-phase simplex with Bland's rule. A basic optimal solution is
    /// returned, so `x` is always a vertex of the feasible region.
    pub fn solve_with_tol(&self, tol: T) -> Result<LpSolution<T>, LpError> {
        let mut t = Tableau::build(self, &tol);
        t.phase_one()?;
        let min_obj: Vec<T> = if self.minimize {
            self.objective.clone()
        } else {
            self.objective.iter().map(|c| -c.clone()).collect()
        };
        t.phase_two(&min_obj)?;
        let x = t.extract(self.n_vars);
        let mut value = T::zero();
        for (c, xi) in self.objective.iter().zip(&x) {
            value = value + c.clone() * xi.clone();
        }
        Ok(LpSolution { value, x })
    }
}

struct Tableau<T> {
    tol: T,
    n_struct: usize,
    n_slack: usize,
    n_art: usize,
    /// Constraint rows, length `n_struct + n_slack + n_art` each.
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn build(p: &LpProblem<T>, tol: &T) -> Self {
        let m = p.rows.len();
        // Normalize to nonnegative right-hand sides first so the slack
        // structure below is decided on the normalized senses.
        let mut norm: Vec<(Vec<T>, Cmp, T)> = Vec::with_capacity(m);
        for (coeffs, cmp, rhs) in &p.rows {
            if *rhs < T::zero() {
                let flipped = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                norm.push((
                    coeffs.iter().map(|c| -c.clone()).collect(),
                    flipped,
                    -rhs.clone(),
                ));
            } else {
                norm.push((coeffs.clone(), *cmp, rhs.clone()));
            }
        }

        let n_slack = norm.iter().filter(|(_, c, _)| *c != Cmp::Eq).count();
        let n_art = norm.iter().filter(|(_, c, _)| *c != Cmp::Le).count();
        let total = p.n_vars + n_slack + n_art;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_at = p.n_vars;
        let mut art_at = p.n_vars + n_slack;
        for (coeffs, cmp, b) in norm {
            let mut row = vec![T::zero(); total];
            row[..p.n_vars].clone_from_slice(&coeffs);
            match cmp {
                Cmp::Le => {
                    row[slack_at] = T::one();
                    basis.push(slack_at);
                    slack_at += 1;
                }
                Cmp::Ge => {
                    row[slack_at] = -T::one();
                    slack_at += 1;
                    row[art_at] = T::one();
                    basis.push(art_at);
                    art_at += 1;
                }
                Cmp::Eq => {
                    row[art_at] = T::one();
                    basis.push(art_at);
                    art_at += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        Tableau {
            tol: tol.clone(),
            n_struct: p.n_vars,
            n_slack,
            n_art,
            rows,
            rhs,
            basis,
        }
    }

    fn n_real(&self) -> usize {
        self.n_struct + self.n_slack
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / piv;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor == T::zero() {
                continue;
            }
            for j in 0..self.rows[i].len() {
                let delta = factor.clone() * self.rows[r][j].clone();
                self.rows[i][j] = self.rows[i][j].clone() - delta;
            }
            let delta = factor * self.rhs[r].clone();
            self.rhs[i] = self.rhs[i].clone() - delta;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for the cost vector `costs` (indexed over all
    /// columns) under the current basis.
    fn reduced_costs(&self, costs: &[T]) -> Vec<T> {
        let width = self.rows.first().map_or(0, Vec::len);
        let mut red = costs.to_vec();
        red.resize(width, T::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs.get(b).cloned().unwrap_or_else(T::zero);
            if cb == T::zero() {
                continue;
            }
            for (rj, row_j) in red.iter_mut().zip(&self.rows[i]) {
                let delta = cb.clone() * row_j.clone();
                *rj = rj.clone() - delta;
            }
        }
        red
    }

    /// Bland iterations: smallest eligible entering column, smallest-ratio
    /// leaving row with ties broken by smallest basis column.
    fn iterate(&mut self, costs: &[T], allowed: usize) -> Result<(), LpError> {
        loop {
            let red = self.reduced_costs(costs);
            let entering = (0..allowed).find(|&j| red[j] < -self.tol.clone());
            let Some(e) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][e] > self.tol {
                    let ratio = self.rhs[r].clone() / self.rows[r][e].clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio.clone()
                                || (ratio == lratio.clone() && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, e);
        }
    }

    fn phase_one(&mut self) -> Result<(), LpError> {
        if self.n_art == 0 {
            return Ok(());
        }
        let width = self.n_real() + self.n_art;
        let mut costs = vec![T::zero(); width];
        for c in costs.iter_mut().skip(self.n_real()) {
            *c = T::one();
        }
        self.iterate(&costs, width)?;

        let mut infeas = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.n_real() {
                infeas = infeas + self.rhs[i].clone();
            }
        }
        if infeas > self.tol {
            return Err(LpError::Infeasible);
        }

        // Drive remaining artificials out of the basis; rows that cannot
        // pivot on any real column are redundant and dropped.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.n_real() {
                let col =
                    (0..self.n_real()).find(|&j| self.rows[r][j].clone().abs_val() > self.tol);
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        // Artificial columns are dead from here on; truncate them.
        for row in self.rows.iter_mut() {
            row.truncate(self.n_struct + self.n_slack);
        }
        self.n_art = 0;
        Ok(())
    }

    fn phase_two(&mut self, min_objective: &[T]) -> Result<(), LpError> {
        let mut costs = vec![T::zero(); self.n_real()];
        costs[..min_objective.len()].clone_from_slice(min_objective);
        self.iterate(&costs, self.n_real())
    }

    fn extract(&self, n_vars: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n_vars {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn min_with_ge_rows() {
        // min x + y s.t. x + 2y >= 4, 3x + y >= 6; optimum 2.8 at (1.6, 1.2).
        let mut lp = LpProblem::<f64>::minimize(2);
        lp.set_objective(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 2.0], Cmp::Ge, 4.0);
        lp.add_row(vec![3.0, 1.0], Cmp::Ge, 6.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 2.8).abs() < 1e-9, "value {}", sol.value);
        assert!((sol.x[0] - 1.6).abs() < 1e-9);
        assert!((sol.x[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn max_with_le_rows() {
        // max 3x + 2y s.t. x + y <= 4, x <= 2, y <= 3; optimum 10 at (2, 2).
        let mut lp = LpProblem::<f64>::maximize(2);
        lp.set_objective(vec![3.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], Cmp::Le, 4.0);
        lp.add_row(vec![1.0, 0.0], Cmp::Le, 2.0);
        lp.add_row(vec![0.0, 1.0], Cmp::Le, 3.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 10.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn equality_row() {
        let mut lp = LpProblem::<f64>::maximize(2);
        lp.set_objective(vec![1.0, 0.0]);
        lp.add_row(vec![1.0, 1.0], Cmp::Eq, 1.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // (1,1) has three tight rows; Bland's rule must not cycle.
        let mut lp = LpProblem::<f64>::maximize(2);
        lp.set_objective(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 0.0], Cmp::Le, 1.0);
        lp.add_row(vec![0.0, 1.0], Cmp::Le, 1.0);
        lp.add_row(vec![1.0, 1.0], Cmp::Le, 2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LpProblem::<f64>::minimize(1);
        lp.set_objective(vec![1.0]);
        lp.add_row(vec![1.0], Cmp::Le, 1.0);
        lp.add_row(vec![1.0], Cmp::Ge, 2.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut lp = LpProblem::<f64>::maximize(2);
        lp.set_objective(vec![1.0, 0.0]);
        lp.add_row(vec![0.0, 1.0], Cmp::Le, 1.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn negative_rhs_normalization() {
        // min x s.t. -x <= -2 is x >= 2.
        let mut lp = LpProblem::<f64>::minimize(1);
        lp.set_objective(vec![1.0]);
        lp.add_row(vec![-1.0], Cmp::Le, -2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
    }

    /// Transport instance written as a 2x2 marginal system. The four
    /// equality rows have rank three, so phase one must drop a redundant
    /// row instead of failing.
    fn transport_2x2<T: Scalar>(mu: [T; 2], nu: [T; 2], cost: [[T; 2]; 2]) -> LpProblem<T> {
        let mut lp = LpProblem::<T>::minimize(4);
        lp.set_objective(vec![
            cost[0][0].clone(),
            cost[0][1].clone(),
            cost[1][0].clone(),
            cost[1][1].clone(),
        ]);
        let one = T::one;
        let zero = T::zero;
        lp.add_row(vec![one(), one(), zero(), zero()], Cmp::Eq, mu[0].clone());
        lp.add_row(vec![zero(), zero(), one(), one()], Cmp::Eq, mu[1].clone());
        lp.add_row(vec![one(), zero(), one(), zero()], Cmp::Eq, nu[0].clone());
        lp.add_row(vec![zero(), one(), zero(), one()], Cmp::Eq, nu[1].clone());
        lp
    }

    #[test]
    fn transport_with_redundant_marginal_rows() {
        let lp = transport_2x2([0.5, 0.5], [0.25, 0.75], [[0.0, 1.0], [1.0, 0.0]]);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 0.25).abs() < 1e-9, "value {}", sol.value);
    }

    #[test]
    fn rational_solve_is_exact() {
        let lp = transport_2x2(
            [ratio(1, 2), ratio(1, 2)],
            [ratio(1, 4), ratio(3, 4)],
            [[ratio(0, 1), ratio(1, 1)], [ratio(1, 1), ratio(0, 1)]],
        );
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, ratio(1, 4));
        assert_eq!(sol.x[1], ratio(1, 4));
    }

    #[test]
    fn float_matches_rational_on_random_transport() {
        // Weights on a 1/256 grid are exact in binary floating point, so the
        // rational lift of every input is exact and the two solvers see the
        // same instance.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let grid = 256u32;
            let mut split = |parts: usize| -> Vec<f64> {
                let mut cuts: Vec<u32> =
                    (0..parts - 1).map(|_| rng.random_range(1..grid)).collect();
                cuts.sort_unstable();
                let mut out = Vec::with_capacity(parts);
                let mut prev = 0;
                for c in cuts {
                    out.push((c - prev) as f64 / grid as f64);
                    prev = c;
                }
                out.push((grid - prev) as f64 / grid as f64);
                out
            };
            let mu: Vec<f64> = split(2);
            let nu: Vec<f64> = split(2);
            let cost: Vec<f64> = (0..4)
                .map(|_| rng.random_range(0..64) as f64 / 16.0)
                .collect();

            let lp_f = transport_2x2(
                [mu[0], mu[1]],
                [nu[0], nu[1]],
                [[cost[0], cost[1]], [cost[2], cost[3]]],
            );
            let lp_q: LpProblem<BigRational> = transport_2x2(
                [Scalar::from_f64(mu[0]), Scalar::from_f64(mu[1])],
                [Scalar::from_f64(nu[0]), Scalar::from_f64(nu[1])],
                [
                    [Scalar::from_f64(cost[0]), Scalar::from_f64(cost[1])],
                    [Scalar::from_f64(cost[2]), Scalar::from_f64(cost[3])],
                ],
            );
            let vf = lp_f.solve().unwrap().value;
            let vq = Scalar::to_f64(&lp_q.solve().unwrap().value);
            assert!((vf - vq).abs() < 1e-9, "float {} vs rational {}", vf, vq);
        }
    }
}
