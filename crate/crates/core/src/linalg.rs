//! Exact linear algebra over the field of rational functions.
//!
//! Pivots are the first entry (top to bottom) whose zero test is `NonZero`;
//! an `UnresolvedZero` candidate met before that aborts rather than guessing.
//! Every pivot is recorded as a genericity assumption.

use crate::expr::{zero_status, Expr, Genericity, ZeroStatus};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("cannot decide whether pivot candidate {expr} at ({row}, {col}) vanishes")]
    UnresolvedPivot { row: usize, col: usize, expr: Expr },
    #[error("target lies outside the span but no certificate could be confirmed nonzero")]
    UnresolvedWitness,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix of expressions.
#[derive(Clone, PartialEq)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix { rows, cols, data: vec![Expr::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExprMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    /// Build from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(ExprMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Expr>]) -> Result<Self, LinalgError> {
        Ok(ExprMatrix::from_rows(cols.to_vec())?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Expr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = ExprMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Result<Vec<Expr>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!("{} columns times vector of length {}", self.cols, v.len())));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl fmt::Debug for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|e| e.to_string()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

pub fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: ExprMatrix,
    pub pivots: Vec<usize>,
    pub genericity: Genericity,
}

pub fn rref(m: &ExprMatrix) -> Result<Rref, LinalgError> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut genericity = Genericity::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let mut found = None;
        for r in row..a.rows {
            match zero_status(a.get(r, col)) {
                ZeroStatus::Zero => {}
                ZeroStatus::NonZero => {
                    found = Some(r);
                    break;
                }
                ZeroStatus::UnresolvedZero { .. } => {
                    return Err(LinalgError::UnresolvedPivot { row: r, col, expr: a.get(r, col).clone() });
                }
            }
        }
        let Some(pr) = found else { continue };
        a.swap_rows(row, pr);
        let piv = a.get(row, col).clone();
        genericity.assume_nonzero(&piv);
        if !piv.is_one() {
            let inv = piv.recip();
            for j in col..a.cols {
                let v = a.get(row, j) * &inv;
                a.set(row, j, v);
            }
        }
        let prow: Vec<Expr> = a.row(row).to_vec();
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col).clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..a.cols {
                if prow[j].is_zero() {
                    continue;
                }
                let v = a.get(r, j) - &factor * &prow[j];
                a.set(r, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Ok(Rref { matrix: a, pivots, genericity })
}

/// Rank at a generic point.
pub fn rank(m: &ExprMatrix) -> Result<(usize, Genericity), LinalgError> {
    let r = rref(m)?;
    Ok((r.pivots.len(), r.genericity))
}

/// Basis of the right nullspace, one vector per free column.
pub fn nullspace(m: &ExprMatrix) -> Result<(Vec<Vec<Expr>>, Genericity), LinalgError> {
    let r = rref(m)?;
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !r.pivots.contains(c)) {
        let mut v = vec![Expr::zero(); m.cols];
        v[free] = Expr::one();
        for (i, &pc) in r.pivots.iter().enumerate() {
            v[pc] = -r.matrix.get(i, free);
        }
        basis.push(v);
    }
    Ok((basis, r.genericity))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// Coefficients `c` with `Σ c_i basis_i = target`.
    InSpan(Vec<Expr>),
    /// A functional `w` with `w · basis_i = 0` for all `i` and `w · target ≠ 0`.
    NotInSpan(Vec<Expr>),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::InSpan(_))
    }
}

pub fn solve_membership(basis: &[Vec<Expr>], target: &[Expr]) -> Result<(Membership, Genericity), LinalgError> {
    let n = target.len();
    if basis.iter().any(|b| b.len() != n) {
        return Err(LinalgError::Dimension("basis vectors and target differ in length".into()));
    }
    let m = basis.len();
    let mut aug = ExprMatrix::zeros(n, m + 1);
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            aug.set(i, j, b[i].clone());
        }
    }
    for (i, t) in target.iter().enumerate() {
        aug.set(i, m, t.clone());
    }
    let r = rref(&aug)?;
    let mut genericity = r.genericity.clone();
    if !r.pivots.contains(&m) {
        let mut coeffs = vec![Expr::zero(); m];
        for (i, &pc) in r.pivots.iter().enumerate() {
            coeffs[pc] = r.matrix.get(i, m).clone();
        }
        return Ok((Membership::InSpan(coeffs), genericity));
    }
    // left nullspace of the basis matrix: right nullspace of its transpose
    let bt = if m == 0 { ExprMatrix::zeros(1, n) } else { ExprMatrix::from_rows(basis.to_vec())? };
    let (left, g) = nullspace(&bt)?;
    genericity.extend(&g);
    for w in left {
        let val = dot(&w, target);
        if zero_status(&val).is_nonzero() {
            return Ok((Membership::NotInSpan(w), genericity));
        }
    }
    Err(LinalgError::UnresolvedWitness)
}
