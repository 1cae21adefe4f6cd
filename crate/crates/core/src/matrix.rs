//! Dense row-major matrices over a [`Ring`], with elimination routines for
//! [`Field`] entries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{DmodError, Result};
use crate::scalar::{Field, Gq, Ring, C64};

#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

pub type QMatrix = Matrix<Gq>;
pub type CMatrix = Matrix<C64>;

impl<R: fmt::Debug> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.entries[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<R: fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.entries[r * self.cols + c].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<R> Matrix<R> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(DmodError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &R {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[R] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<S>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Matrix<S>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl<R: Ring> Matrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<R>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(DmodError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(DmodError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<R>]) -> Self {
        Matrix::from_fn(rows, columns.len(), |r, c| columns[c][r].clone())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { R::one() } else { R::zero() })
    }

    /// Elementary matrix `E_ij` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.set(i, j, R::one());
        m
    }

    pub fn diag(values: &[R]) -> Self {
        let n = values.len();
        Matrix::from_fn(n, n, |r, c| if r == c { values[r].clone() } else { R::zero() })
    }

    pub fn scalar(n: usize, v: R) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { v.clone() } else { R::zero() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| R::from_i64(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn column(&self, c: usize) -> Vec<R> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<R>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Ring::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn trace(&self) -> R {
        (0..self.rows.min(self.cols)).fold(R::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.commutator(other).is_zero()
    }

    pub fn block_diag(blocks: &[Matrix<R>]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Is `self^rows = 0`?
    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_zero()
    }

    /// Row-major vectorisation.
    pub fn vec(&self) -> Vec<R> {
        self.entries.clone()
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(R::zero(), |acc, c| acc + self.get(r, c).clone() * v[c].clone())
            })
            .collect()
    }

    /// Linear combination `Σ coeffs[k] · mats[k]`.
    pub fn combination(coeffs: &[R], mats: &[Matrix<R>], rows: usize, cols: usize) -> Self {
        let mut acc = Matrix::zeros(rows, cols);
        for (c, m) in coeffs.iter().zip(mats) {
            acc = &acc + &m.scale(c);
        }
        acc
    }
}

impl<'a, 'b, R: Ring> Add<&'b Matrix<R>> for &'a Matrix<R> {
    type Output = Matrix<R>;
    fn add(self, rhs: &'b Matrix<R>) -> Matrix<R> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<'a, 'b, R: Ring> Sub<&'b Matrix<R>> for &'a Matrix<R> {
    type Output = Matrix<R>;
    fn sub(self, rhs: &'b Matrix<R>) -> Matrix<R> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<'a, 'b, R: Ring> Mul<&'b Matrix<R>> for &'a Matrix<R> {
    type Output = Matrix<R>;
    fn mul(self, rhs: &'b Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = R::zero();
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * b.clone();
                }
                entries.push(acc);
            }
        }
        Matrix {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        }
    }
}

impl<'a, R: Ring> Neg for &'a Matrix<R> {
    type Output = Matrix<R>;
    fn neg(self) -> Matrix<R> {
        self.map(|x| -x.clone())
    }
}

/// Result of Gauss–Jordan elimination.
pub struct Echelon<F> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    /// Largest entry magnitude, at least 1. Scales approximate tolerances.
    pub fn scale_hint(&self) -> f64 {
        self.entries.iter().map(Field::magnitude).fold(1.0, f64::max)
    }

    /// Zero test under the tolerance policy (exact in exact mode).
    pub fn negligible(&self, tol: f64) -> bool {
        let t = tol * self.scale_hint();
        self.entries.iter().all(|x| x.negligible(t))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> CMatrix {
        self.map(Field::to_c64)
    }

    /// Reduced row echelon form. In approximate mode pivots below
    /// `tol·scale` are treated as zero and partial pivoting by magnitude is
    /// used; in exact mode the first nonzero entry is the pivot.
    pub fn rref(&self, tol: f64) -> Echelon<F> {
        let mut m = self.clone();
        let thresh = tol * self.scale_hint();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let candidate = if F::EXACT {
                (row..m.rows).find(|&r| !m.get(r, col).is_zero())
            } else {
                (row..m.rows)
                    .filter(|&r| m.get(r, col).magnitude() > thresh)
                    .max_by(|&a, &b| {
                        m.get(a, col)
                            .magnitude()
                            .partial_cmp(&m.get(b, col).magnitude())
                            .unwrap()
                    })
            };
            let Some(p) = candidate else {
                if !F::EXACT {
                    for r in row..m.rows {
                        m.set(r, col, F::zero());
                    }
                }
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv();
            for c in col..m.cols {
                let v = m.get(row, c).clone() * inv.clone();
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c).clone() - factor.clone() * m.get(row, c).clone();
                    m.set(r, c, v);
                }
                if !F::EXACT {
                    m.set(r, col, F::zero());
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).pivots.len()
    }

    /// Basis of the right null space `{v : self·v = 0}`, one vector per free
    /// column, with a 1 in that free position.
    pub fn kernel(&self, tol: f64) -> Vec<Vec<F>> {
        let Echelon { reduced, pivots } = self.rref(tol);
        let mut basis = Vec::new();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        for &f in &free {
            let mut v = vec![F::zero(); self.cols];
            v[f] = F::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -reduced.get(prow, f).clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self, tol: f64) -> Result<Self> {
        let n = self.ensure_square()?;
        if n == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, F::one());
        }
        let Echelon { reduced, pivots } = aug.rref(tol);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(DmodError::Singular);
        }
        Ok(Matrix::from_fn(n, n, |r, c| reduced.get(r, n + c).clone()))
    }

    /// Determinant by elimination.
    pub fn det(&self) -> Result<F> {
        let n = self.ensure_square()?;
        let mut m = self.clone();
        let mut det = F::one();
        for col in 0..n {
            let p = if F::EXACT {
                (col..n).find(|&r| !m.get(r, col).is_zero())
            } else {
                (col..n).max_by(|&a, &b| {
                    m.get(a, col)
                        .magnitude()
                        .partial_cmp(&m.get(b, col).magnitude())
                        .unwrap()
                })
            };
            let Some(p) = p else { return Ok(F::zero()) };
            if m.get(p, col).is_zero() {
                return Ok(F::zero());
            }
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = det * pivot.clone();
            let inv = pivot.inv();
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone() * inv.clone();
                for c in col..n {
                    let v = m.get(r, c).clone() - factor.clone() * m.get(col, c).clone();
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Solves `self · X = rhs`; `None` when inconsistent.
    pub fn solve(&self, rhs: &Matrix<F>, tol: f64) -> Option<Matrix<F>> {
        assert_eq!(self.rows, rhs.rows);
        let (n, k) = (self.cols, rhs.cols);
        let mut aug = Matrix::zeros(self.rows, n + k);
        for r in 0..self.rows {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            for c in 0..k {
                aug.set(r, n + c, rhs.get(r, c).clone());
            }
        }
        let Echelon { reduced, pivots } = aug.rref(tol);
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut out = Matrix::zeros(n, k);
        for (prow, &pcol) in pivots.iter().enumerate() {
            for c in 0..k {
                out.set(pcol, c, reduced.get(prow, n + c).clone());
            }
        }
        Some(out)
    }
}

/// A matrix in whichever arithmetic produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Exact(QMatrix),
    Approx(CMatrix),
}

impl AnyMatrix {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMatrix::Exact(_))
    }

    pub fn to_c64(&self) -> CMatrix {
        match self {
            AnyMatrix::Exact(m) => m.to_c64(),
            AnyMatrix::Approx(m) => m.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&QMatrix> {
        match self {
            AnyMatrix::Exact(m) => Some(m),
            AnyMatrix::Approx(_) => None,
        }
    }
}
