//! Dense exact linear algebra over Q(i).

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::scalar::Gq;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gq>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Gq::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Gq::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<Gq>]) -> Self {
        let mut m = Self::zero(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &Gq {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Gq) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Gq> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Gq>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Gq> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    /// Conjugate transpose (the adjoint for the standard Hermitian product).
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_zero() {
                    m.set(j, i, x.conj());
                }
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut r = Self::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * r.cols + j;
                    r.data[idx] += &(a * b);
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[Gq]) -> Vec<Gq> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Gq::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += &(a * x);
                }
            }
        }
        out
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        let mut m = Self::zero(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j);
                if !v.is_zero() {
                    let nv = v * &inv;
                    m.set(r, j, nv);
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let x = m.get(r, j);
                    if x.is_zero() {
                        continue;
                    }
                    let nv = m.get(i, j) - &(&f * x);
                    m.set(i, j, nv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate on the shorter side
        if self.rows < self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// Basis of {x : self·x = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Gq>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Gq::zero(); self.cols];
                v[f] = Gq::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    let x = r.get(row, f);
                    if !x.is_zero() {
                        v[pc] = -x;
                    }
                }
                v
            })
            .collect()
    }

    /// Linearly independent columns spanning the column space.
    pub fn column_basis(&self) -> Vec<Vec<Gq>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn in_column_space(&self, v: &[Gq]) -> bool {
        self.solve(v).is_some()
    }

    /// Some x with self·x = b, if one exists.
    pub fn solve(&self, b: &[Gq]) -> Option<Vec<Gq>> {
        assert_eq!(b.len(), self.rows);
        if b.iter().all(|x| x.is_zero()) {
            return Some(vec![Gq::zero(); self.cols]);
        }
        let aug = self.hstack(&Matrix::from_columns(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Gq::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i..self.cols).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    /// Orthogonal projector onto the column space (with respect to the standard product).
    pub fn projector_onto_columns(&self) -> Matrix {
        let basis = self.column_basis();
        if basis.is_empty() {
            return Matrix::zero(self.rows, self.rows);
        }
        let k = Matrix::from_columns(self.rows, &basis);
        let gram = k.adjoint().mul(&k);
        let ginv = gram.inverse().expect("Gram matrix of independent vectors is invertible");
        k.mul(&ginv).mul(&k.adjoint())
    }

    /// LDL* for a Hermitian matrix without pivoting. Returns (L, d) up to the
    /// first non-positive pivot; `d.len() < n` means the elimination stopped there.
    pub fn ldl_positive_prefix(&self) -> (Matrix, Vec<BigRational>) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut l = Matrix::identity(n);
        let mut d = Vec::new();
        for k in 0..n {
            let piv = a.get(k, k).re.clone();
            d.push(piv.clone());
            if !piv.is_positive() {
                break;
            }
            let inv = Gq::from_rational(BigRational::from_integer(1.into()) / &piv);
            for i in k + 1..n {
                let lik = a.get(i, k) * &inv;
                if lik.is_zero() {
                    continue;
                }
                l.set(i, k, lik.clone());
                for j in k + 1..n {
                    let akj = a.get(k, j);
                    if akj.is_zero() {
                        continue;
                    }
                    let nv = a.get(i, j) - &(&lik * akj);
                    a.set(i, j, nv);
                }
            }
        }
        (l, d)
    }

    /// Solve the upper-triangular system L* x = e_k with L unit lower-triangular.
    pub fn solve_unit_lower_adjoint(l: &Matrix, k: usize) -> Vec<Gq> {
        let n = l.rows;
        let lh = l.adjoint();
        let mut x = vec![Gq::zero(); n];
        for i in (0..n).rev() {
            let mut s = if i == k { Gq::one() } else { Gq::zero() };
            for j in i + 1..n {
                let c = lh.get(i, j);
                if !c.is_zero() && !x[j].is_zero() {
                    s -= &(c * &x[j]);
                }
            }
            x[i] = s;
        }
        x
    }
}

/// v* M w for the standard Hermitian product.
pub fn hermitian_pairing(m: &Matrix, v: &[Gq], w: &[Gq]) -> Gq {
    let mw = m.mul_vec(w);
    v.iter().zip(&mw).fold(Gq::zero(), |acc, (a, b)| &acc + &(&a.conj() * b))
}

pub fn vec_is_zero(v: &[Gq]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_sub(a: &[Gq], b: &[Gq]) -> Vec<Gq> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Gq], b: &[Gq]) -> Vec<Gq> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Gq], c: &Gq) -> Vec<Gq> {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_norm_sqr(a: &[Gq]) -> BigRational {
    a.iter().fold(BigRational::zero(), |acc, x| acc + x.norm_sqr())
}

/// Dimension of span(a ∪ b) where both are lists of vectors of length `dim`.
pub fn span_rank(dim: usize, vecs: &[Vec<Gq>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    Matrix::from_columns(dim, vecs).rank()
}

/// Whether every vector of `sub` lies in span(`sup`). Returns the first offender.
pub fn first_outside_span(dim: usize, sub: &[Vec<Gq>], sup: &[Vec<Gq>]) -> Option<usize> {
    let base = span_rank(dim, sup);
    let mut acc: Vec<Vec<Gq>> = sup.to_vec();
    for (k, v) in sub.iter().enumerate() {
        if vec_is_zero(v) {
            continue;
        }
        acc.push(v.clone());
        if span_rank(dim, &acc) > base {
            return Some(k);
        }
        acc.pop();
    }
    None
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
