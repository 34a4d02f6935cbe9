//! Exact linear algebra over the rationals: row reduction, kernels and a
//! canonical subspace representation.
//!
//! Subspaces are stored as reduced row echelon bases, which makes equality,
//! membership and dimension questions structural.  The pivot-based
//! complement is the frozen normalization used when eigenspaces are split
//! off a filtration intersection: it is deterministic given the inputs.

use num_traits::{One, Zero};

use super::rational::Rat;

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a.clone() * other[(k, j)].clone();
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    /// In-place Gauss-Jordan; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let sub = f.clone() * self[(r, j)].clone();
                        self[(i, j)] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = y;
            self[(b, j)] = x;
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel `{x : self * x = 0}`, one vector per row of
    /// the result, in canonical (free-column) order.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_rows: Vec<(usize, usize)> =
            pivots.iter().copied().enumerate().collect(); // (row, col)
        let free: Vec<usize> =
            (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for &(r, pc) in &pivot_rows {
                v[pc] = -m[(r, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Exact inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let pivots = aug.rref();
        if pivots != (0..n).collect::<Vec<_>>() {
            return None;
        }
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// A linear subspace of `Q^n` in canonical reduced-row-echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// rref basis rows, no zero rows
    basis: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: vec![], pivots: vec![] }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_vectors(
            ambient,
            (0..ambient)
                .map(|i| {
                    let mut v = vec![Rat::zero(); ambient];
                    v[i] = Rat::one();
                    v
                })
                .collect::<Vec<_>>()
                .as_slice(),
        )
    }

    pub fn from_vectors(ambient: usize, vectors: &[Vec<Rat>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient));
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let mut m = QMat::from_rows(vectors);
        let pivots = m.rref();
        let basis = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient);
        // reduce v against the echelon basis
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi -= f.clone() * ri.clone();
                }
            }
        }
        w.iter().all(Rat::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_vectors(self.ambient, &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // x in both row spaces: x = a^T A = b^T B; solve [A^T | -B^T] k = 0.
        let p = self.dim();
        let q = other.dim();
        let mut m = QMat::zero(self.ambient, p + q);
        for (col, row) in self.basis.iter().enumerate() {
            for i in 0..self.ambient {
                m[(i, col)] = row[i].clone();
            }
        }
        for (col, row) in other.basis.iter().enumerate() {
            for i in 0..self.ambient {
                m[(i, p + col)] = -row[i].clone();
            }
        }
        let kernel = m.kernel();
        let vectors: Vec<Vec<Rat>> = kernel
            .iter()
            .map(|k| {
                let mut v = vec![Rat::zero(); self.ambient];
                for (coef, row) in k[..p].iter().zip(&self.basis) {
                    for i in 0..self.ambient {
                        v[i] += coef.clone() * row[i].clone();
                    }
                }
                v
            })
            .collect();
        Subspace::from_vectors(self.ambient, &vectors)
    }

    /// Canonical complement of `inner` inside `self` (requires
    /// `inner ⊆ self`): the echelon basis vectors of `self` whose pivot
    /// columns are not pivot columns of `inner`.  Deterministic; this is the
    /// frozen eigenvector normalization used throughout.
    pub fn pivot_complement(&self, inner: &Subspace) -> Vec<Vec<Rat>> {
        debug_assert!(inner.is_subspace_of(self));
        self.basis
            .iter()
            .zip(&self.pivots)
            .filter(|(_, p)| !inner.pivots.contains(p))
            .map(|(v, _)| v.clone())
            .collect()
    }
}
