//! Exact rational linear programming: `A q = b, q ≥ 0`, optionally minimizing
//! `cᵀq`.
//!
//! The solver is a two-phase revised simplex over arbitrary-precision
//! rationals with Bland's rule for both the entering and leaving variable,
//! so it terminates and returns the same answer on every run. Columns are
//! stored sparsely; the basis inverse is kept dense.
//!
//! Every answer carries a certificate that [`FeasibilityResult::verify`]
//! checks exactly: a feasible point, or a Farkas vector `y` with `yᵀA ≤ 0`
//! and `yᵀb > 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mac::serialize_display_all;
use crate::Rational;

/// Refuse problems with more columns than this.
pub const MAX_LP_COLUMNS: usize = 1_000_000;

/// Sparse column: (row, coefficient) pairs with distinct rows.
pub type SparseColumn = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    rows: usize,
    columns: Vec<SparseColumn>,
    rhs: Vec<Rational>,
    objective: Option<Vec<Rational>>,
}

impl LpProblem {
    /// An empty problem with the given right-hand side; add columns next.
    pub fn new(rhs: Vec<Rational>) -> Self {
        Self { rows: rhs.len(), columns: Vec::new(), rhs, objective: None }
    }

    /// Builds a problem from a dense row-major matrix.
    pub fn from_dense(matrix: &[Vec<Rational>], rhs: Vec<Rational>) -> Result<Self> {
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch { expected: rhs.len(), found: matrix.len() });
        }
        let n = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged constraint matrix".into()));
        }
        let mut lp = Self::new(rhs);
        for j in 0..n {
            lp.add_column(
                matrix
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r[j].is_zero())
                    .map(|(i, r)| (i, r[j].clone()))
                    .collect(),
            )?;
        }
        Ok(lp)
    }

    pub fn add_column(&mut self, mut column: SparseColumn) -> Result<usize> {
        column.retain(|(_, v)| !v.is_zero());
        column.sort_by_key(|(i, _)| *i);
        if column.iter().any(|(i, _)| *i >= self.rows) || column.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("column has an out-of-range or repeated row".into()));
        }
        self.columns.push(column);
        Ok(self.columns.len() - 1)
    }

    /// Sets a cost vector to minimize.
    pub fn set_objective(&mut self, costs: Vec<Rational>) -> Result<()> {
        if costs.len() != self.columns.len() {
            return Err(Error::DimensionMismatch { expected: self.columns.len(), found: costs.len() });
        }
        self.objective = Some(costs);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseColumn {
        &self.columns[j]
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective(&self) -> Option<&[Rational]> {
        self.objective.as_deref()
    }

    /// A q, exactly.
    pub fn apply(&self, q: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows];
        for (col, qj) in self.columns.iter().zip(q) {
            if qj.is_zero() {
                continue;
            }
            for (i, v) in col {
                out[*i] += v * qj;
            }
        }
        out
    }

    /// yᵀ A_j, exactly.
    pub fn dual_product(&self, y: &[Rational], j: usize) -> Rational {
        self.columns[j].iter().map(|(i, v)| &y[*i] * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FeasibilityResult {
    Feasible {
        #[serde(serialize_with = "serialize_display_all")]
        point: Vec<Rational>,
        #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt")]
        objective: Option<Rational>,
    },
    Infeasible {
        #[serde(serialize_with = "serialize_display_all")]
        farkas: Vec<Rational>,
    },
}

fn serialize_opt<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Self::Feasible { point, .. } => Some(point),
            Self::Infeasible { .. } => None,
        }
    }

    pub fn farkas(&self) -> Option<&[Rational]> {
        match self {
            Self::Infeasible { farkas } => Some(farkas),
            Self::Feasible { .. } => None,
        }
    }

    /// Checks the certificate against the problem in exact arithmetic.
    pub fn verify(&self, lp: &LpProblem) -> bool {
        match self {
            Self::Feasible { point, objective } => {
                point.len() == lp.num_columns()
                    && point.iter().all(|q| !q.is_negative())
                    && lp.apply(point) == lp.rhs
                    && match (objective, &lp.objective) {
                        (Some(v), Some(c)) => &c.iter().zip(point).map(|(c, q)| c * q).sum::<Rational>() == v,
                        (None, None) => true,
                        _ => false,
                    }
            }
            Self::Infeasible { farkas } => {
                farkas.len() == lp.rows
                    && (0..lp.num_columns()).all(|j| !lp.dual_product(farkas, j).is_positive())
                    && farkas.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum::<Rational>().is_positive()
            }
        }
    }
}

/// Working state of the revised simplex on the sign-normalized system
/// D A q + s = D b, with artificials s and D = diag(±1) making D b ≥ 0.
struct Tableau<'a> {
    lp: &'a LpProblem,
    sign: Vec<bool>,
    /// basis[r] = variable basic in row r; artificial i is variable n + i.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<Rational>>,
    values: Vec<Rational>,
    /// Sign-normalized structural columns when every entry is a machine
    /// integer; lets pricing run on integers.
    int_columns: Option<Vec<Vec<(usize, i64)>>>,
}

/// y scaled by the lcm L of its denominators, when every L·yᵢ fits in i64.
fn integer_duals(y: &[Rational]) -> Option<(Vec<i64>, BigInt)> {
    let l = y.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled = y
        .iter()
        .map(|v| (v.numer() * (&l / v.denom())).to_i64())
        .collect::<Option<Vec<_>>>()?;
    Some((scaled, l))
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LpProblem) -> Self {
        let m = lp.rows;
        let n = lp.num_columns();
        let sign: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative()).collect();
        let rhs: Vec<Rational> = lp.rhs.iter().map(|b| b.abs()).collect();
        let mut is_basic = vec![false; n + m];
        is_basic[n..].iter_mut().for_each(|b| *b = true);
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        let int_columns = lp
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(i, v)| {
                        let v = if v.is_integer() { v.numer().to_i64() } else { None }?;
                        Some((*i, if sign[*i] { -v } else { v }))
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        Self { lp, sign, values: rhs, basis: (n..n + m).collect(), is_basic, binv, int_columns }
    }

    /// Whether c_j − yᵀa_j < 0, using integer arithmetic where possible.
    fn prices_negative(
        &self,
        y: &[Rational],
        scaled: Option<&(Vec<i64>, BigInt)>,
        j: usize,
        cost: &dyn Fn(usize) -> Rational,
    ) -> bool {
        if let (Some(cols), Some((yl, l))) = (&self.int_columns, scaled) {
            if j < self.n() {
                let dot: i128 = cols[j].iter().map(|&(i, v)| i128::from(yl[i]) * i128::from(v)).sum();
                let c = cost(j);
                return if c.is_zero() {
                    dot > 0
                } else {
                    c < Rational::new(BigInt::from(dot), l.clone())
                };
            }
        }
        self.reduced_cost(y, j, cost).is_negative()
    }

    fn n(&self) -> usize {
        self.lp.num_columns()
    }

    /// B⁻¹ a_j.
    fn direction(&self, j: usize) -> Vec<Rational> {
        let m = self.lp.rows;
        if j < self.n() {
            let col = &self.lp.columns[j];
            (0..m)
                .map(|r| {
                    col.iter()
                        .map(|(i, v)| {
                            let t = &self.binv[r][*i] * v;
                            if self.sign[*i] {
                                -t
                            } else {
                                t
                            }
                        })
                        .sum()
                })
                .collect()
        } else {
            let i = j - self.n();
            (0..m).map(|r| self.binv[r][i].clone()).collect()
        }
    }

    /// yᵀ = c_Bᵀ B⁻¹.
    fn duals(&self, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        let m = self.lp.rows;
        let cb: Vec<Rational> = self.basis.iter().map(|&v| cost(v)).collect();
        (0..m)
            .map(|k| {
                cb.iter()
                    .zip(&self.binv)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, row)| c * &row[k])
                    .sum()
            })
            .collect()
    }

    /// c_j − yᵀ a_j on the sign-normalized system.
    fn reduced_cost(&self, y: &[Rational], j: usize, cost: &dyn Fn(usize) -> Rational) -> Rational {
        let dot: Rational = if j < self.n() {
            self.lp.columns[j]
                .iter()
                .map(|(i, v)| {
                    let t = &y[*i] * v;
                    if self.sign[*i] {
                        -t
                    } else {
                        t
                    }
                })
                .sum()
        } else {
            y[j - self.n()].clone()
        };
        cost(j) - dot
    }

    fn pivot(&mut self, row: usize, entering: usize, dir: &[Rational]) {
        let m = self.lp.rows;
        let pivot = dir[row].clone();
        let scaled_row: Vec<Rational> = self.binv[row].iter().map(|v| v / &pivot).collect();
        let step = &self.values[row] / &pivot;
        for r in 0..m {
            if r == row || dir[r].is_zero() {
                continue;
            }
            for (k, v) in self.binv[r].iter_mut().enumerate() {
                if !scaled_row[k].is_zero() {
                    *v -= &dir[r] * &scaled_row[k];
                }
            }
            let delta = &dir[r] * &step;
            self.values[r] -= delta;
        }
        self.binv[row] = scaled_row;
        self.values[row] = step;
        self.is_basic[self.basis[row]] = false;
        self.is_basic[entering] = true;
        self.basis[row] = entering;
    }

    /// Runs Bland's rule over the candidate variables until optimal.
    /// Returns `Err(Unbounded)` if an improving direction has no bound.
    fn optimize(&mut self, candidates: usize, cost: &dyn Fn(usize) -> Rational) -> Result<()> {
        loop {
            let y = self.duals(cost);
            let scaled = integer_duals(&y);
            let entering = (0..candidates)
                .find(|&j| !self.is_basic[j] && self.prices_negative(&y, scaled.as_ref(), j, cost));
            let Some(entering) = entering else {
                return Ok(());
            };
            let dir = self.direction(entering);
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.lp.rows {
                if !dir[r].is_positive() {
                    continue;
                }
                let ratio = &self.values[r] / &dir[r];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, entering, &dir);
        }
    }

    /// Pivots zero-valued artificials out of the basis where some structural
    /// column allows it; rows where none does are redundant.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        for row in 0..self.lp.rows {
            if self.basis[row] < n {
                continue;
            }
            // Entry `row` of B⁻¹a_j is ρ·a_j with ρ the row of B⁻¹.
            let rho = self.binv[row].clone();
            let scaled = integer_duals(&rho);
            let replacement = (0..n)
                .filter(|&j| !self.is_basic[j])
                .find(|&j| match (&self.int_columns, &scaled) {
                    (Some(cols), Some((r, _))) => {
                        cols[j].iter().map(|&(i, v)| i128::from(r[i]) * i128::from(v)).sum::<i128>() != 0
                    }
                    _ => !self.reduced_cost(&rho, j, &|_| Rational::zero()).is_zero(),
                })
                .map(|j| (j, self.direction(j)));
            if let Some((j, dir)) = replacement {
                self.pivot(row, j, &dir);
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let mut q = vec![Rational::zero(); self.n()];
        for (r, &v) in self.basis.iter().enumerate() {
            if v < self.n() {
                q[v] = self.values[r].clone();
            }
        }
        q
    }
}

/// Solves the problem exactly. Infeasible systems yield a Farkas vector; a
/// feasible system yields a vertex, optimal when an objective is set.
pub fn simplex_solve(lp: &LpProblem) -> Result<FeasibilityResult> {
    let n = lp.num_columns();
    if n > MAX_LP_COLUMNS {
        return Err(Error::LpTooLarge { columns: n, limit: MAX_LP_COLUMNS });
    }
    if lp.rows == 0 {
        if lp.objective.as_ref().is_some_and(|c| c.iter().any(Signed::is_negative)) {
            return Err(Error::Unbounded);
        }
        return Ok(FeasibilityResult::Feasible {
            point: vec![Rational::zero(); n],
            objective: lp.objective.as_ref().map(|_| Rational::zero()),
        });
    }

    let mut t = Tableau::new(lp);
    let phase_one = |j: usize| if j >= n { Rational::one() } else { Rational::zero() };
    t.optimize(n + lp.rows, &phase_one)?;

    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.values)
        .filter(|(&v, _)| v >= n)
        .map(|(_, x)| x.clone())
        .sum();
    if infeasibility.is_positive() {
        // Phase-one optimality gives yᵀ(DA) ≤ 0 and yᵀ(Db) = infeasibility > 0.
        let y = t.duals(&phase_one);
        let farkas = y
            .into_iter()
            .zip(&t.sign)
            .map(|(v, &flip)| if flip { -v } else { v })
            .collect();
        return Ok(FeasibilityResult::Infeasible { farkas });
    }

    t.drive_out_artificials();
    let objective = match &lp.objective {
        Some(c) => {
            let phase_two = |j: usize| if j < n { c[j].clone() } else { Rational::zero() };
            t.optimize(n, &phase_two)?;
            let q = t.point();
            Some(c.iter().zip(&q).map(|(c, q)| c * q).sum())
        }
        None => None,
    };
    Ok(FeasibilityResult::Feasible { point: t.point(), objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::rational;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn simplex_feasible_sum() {
        let lp = LpProblem::from_dense(&[vec![int(1), int(1)]], vec![int(1)]).unwrap();
        let res = simplex_solve(&lp).unwrap();
        assert_eq!(res.point().unwrap(), &[int(1), int(0)]);
        assert!(res.verify(&lp));
    }

    #[test]
    fn simplex_negative_rhs_is_infeasible() {
        let lp = LpProblem::from_dense(&[vec![int(1)]], vec![int(-1)]).unwrap();
        let res = simplex_solve(&lp).unwrap();
        assert_eq!(res.farkas().unwrap(), &[int(-1)]);
        assert!(res.verify(&lp));
    }

    #[test]
    fn empty_problem_is_feasible() {
        let lp = LpProblem::new(vec![]);
        assert!(simplex_solve(&lp).unwrap().is_feasible());
    }

    #[test]
    fn objective_is_minimized() {
        // min -q0 - 2 q1  s.t. q0 + q1 + q2 = 4, q1 + q3 = 3
        let mut lp = LpProblem::from_dense(
            &[vec![int(1), int(1), int(1), int(0)], vec![int(0), int(1), int(0), int(1)]],
            vec![int(4), int(3)],
        )
        .unwrap();
        lp.set_objective(vec![int(-1), int(-2), int(0), int(0)]).unwrap();
        let res = simplex_solve(&lp).unwrap();
        assert!(res.verify(&lp));
        match res {
            FeasibilityResult::Feasible { objective, .. } => assert_eq!(objective, Some(int(-7))),
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn unbounded_objective() {
        let mut lp = LpProblem::from_dense(&[vec![int(1), int(-1)]], vec![int(0)]).unwrap();
        lp.set_objective(vec![int(-1), int(0)]).unwrap();
        assert!(matches!(simplex_solve(&lp), Err(Error::Unbounded)));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = LpProblem::from_dense(
            &[vec![int(1), int(1)], vec![int(2), int(2)], vec![int(1), int(0)]],
            vec![int(1), int(2), rational(1, 3)],
        )
        .unwrap();
        let res = simplex_solve(&lp).unwrap();
        assert_eq!(res.point().unwrap(), &[rational(1, 3), rational(2, 3)]);
        assert!(res.verify(&lp));
    }

    #[test]
    fn bad_columns_rejected() {
        let mut lp = LpProblem::new(vec![int(1)]);
        assert!(lp.add_column(vec![(1, int(1))]).is_err());
        assert!(lp.add_column(vec![(0, int(1)), (0, int(2))]).is_err());
    }
}
