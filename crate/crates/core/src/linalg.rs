//! Dense matrices over a coefficient ring, with Gaussian elimination.
//!
//! Elimination only needs `try_inv`, so the same code runs over exact
//! Gaussian rationals, tolerance-compared floats and truncated series.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Coeff, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Coeff> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<R>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<R> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coeff::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn conj_transpose(&self) -> Self {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Coeff::conj).collect() }
    }

    pub fn scale(&self, c: &R) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.mul(c)).collect() }
    }

    pub fn apply(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = R::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, other: &Matrix<R>) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn vstack(&self, other: &Matrix<R>) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<R>> = idx.iter().map(|&j| self.col(j)).collect();
        Matrix::from_cols(self.rows, &cols)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<R>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, f64)> = None;
            for i in r..m.rows {
                if let Some(w) = m.get(i, c).pivot_weight() {
                    if best.is_none_or(|(_, bw)| w > bw) {
                        best = Some((i, w));
                    }
                }
            }
            let Some((pi, _)) = best else { continue };
            m.swap_rows(r, pi);
            let inv = m.get(r, c).try_inv().expect("pivot is invertible");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            m.set(r, c, R::one());
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
                m.set(i, c, R::zero());
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<R>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![R::zero(); self.cols];
                v[f] = R::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = r.get(row, f).neg();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space (a subset of the columns).
    pub fn image(&self) -> Vec<Vec<R>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.col(c)).collect()
    }

    pub fn inverse(&self) -> Option<Matrix<R>> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[R]) -> Option<Vec<R>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Matrix::from_cols(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![R::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<S: Scalar> Matrix<S> {
    /// Determinant by elimination.
    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).filter(|&i| !m.get(i, c).is_zero()).max_by(|&a, &b| {
                let wa = m.get(a, c).pivot_weight().unwrap_or(0.0);
                let wb = m.get(b, c).pivot_weight().unwrap_or(0.0);
                wa.partial_cmp(&wb).unwrap_or(std::cmp::Ordering::Equal)
            }) else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv();
            for i in c + 1..n {
                let f = m.get(i, c).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    /// Convert to an `nalgebra` complex matrix.
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }
}

impl<R: Coeff> Mul for &Matrix<R> {
    type Output = Matrix<R>;
    fn mul(self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out: Matrix<R> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl<R: Coeff> Add for &Matrix<R> {
    type Output = Matrix<R>;
    fn add(self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }
}

impl<R: Coeff> Sub for &Matrix<R> {
    type Output = Matrix<R>;
    fn sub(self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }
}

impl<R: Coeff> Neg for &Matrix<R> {
    type Output = Matrix<R>;
    fn neg(self) -> Matrix<R> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Coeff::neg).collect() }
    }
}

/// Basis of `span(a) ∩ span(b)` for column-vector families in the same space.
pub fn intersect<R: Coeff>(dim: usize, a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ma = Matrix::from_cols(dim, a);
    let mb = Matrix::from_cols(dim, b);
    let ker = ma.hstack(&-&mb).kernel();
    let vecs: Vec<Vec<R>> = ker.iter().map(|k| ma.apply(&k[..a.len()])).collect();
    if vecs.is_empty() {
        return vecs;
    }
    Matrix::from_cols(dim, &vecs).image()
}

/// Whether every vector of `sub` lies in `span(space)`.
pub fn contained_in<R: Coeff>(dim: usize, sub: &[Vec<R>], space: &[Vec<R>]) -> bool {
    let r = if space.is_empty() { 0 } else { Matrix::from_cols(dim, space).rank() };
    let mut all = space.to_vec();
    all.extend(sub.iter().cloned());
    let r2 = if all.is_empty() { 0 } else { Matrix::from_cols(dim, &all).rank() };
    r == r2
}

/// Basis of `span(a) + span(b)`.
pub fn span_sum<R: Coeff>(dim: usize, a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    if all.is_empty() {
        return all;
    }
    Matrix::from_cols(dim, &all).image()
}
