//! Matrices over the Laurent ring.
//!
//! Invertibility over this ring means the determinant is a unit, i.e. a
//! single monomial with nonzero coefficient; inversion goes through the
//! adjugate so it stays exact.

use std::fmt;

use serde::Serialize;

use super::intmat::IntMat;
use super::laurent::Laurent;
use super::rational::Rat;
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct LaurentMat {
    pub rows: usize,
    pub cols: usize,
    vars: usize,
    entries: Vec<Laurent>,
}

impl LaurentMat {
    pub fn zero(rows: usize, cols: usize, vars: usize) -> Self {
        LaurentMat {
            rows,
            cols,
            vars,
            entries: vec![Laurent::zero(vars); rows * cols],
        }
    }

    pub fn identity(n: usize, vars: usize) -> Self {
        let mut m = LaurentMat::zero(n, n, vars);
        for i in 0..n {
            m.set(i, i, Laurent::one(vars));
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        vars: usize,
        mut f: impl FnMut(usize, usize) -> Laurent,
    ) -> Self {
        let mut m = LaurentMat::zero(rows, cols, vars);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(diag: Vec<Laurent>, vars: usize) -> Self {
        let n = diag.len();
        let mut m = LaurentMat::zero(n, n, vars);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Laurent) {
        assert_eq!(v.vars(), self.vars, "entry variable count mismatch");
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Laurent::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| i == j || self.get(i, j).is_zero())
        })
    }

    pub fn add(&self, other: &LaurentMat) -> LaurentMat {
        self.zip(other, Laurent::add)
    }

    pub fn sub(&self, other: &LaurentMat) -> LaurentMat {
        self.zip(other, Laurent::sub)
    }

    fn zip(&self, other: &LaurentMat, f: impl Fn(&Laurent, &Laurent) -> Laurent) -> LaurentMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!(self.vars, other.vars);
        LaurentMat {
            rows: self.rows,
            cols: self.cols,
            vars: self.vars,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> LaurentMat {
        self.map(Laurent::neg)
    }

    pub fn map(&self, f: impl Fn(&Laurent) -> Laurent) -> LaurentMat {
        let entries: Vec<Laurent> = self.entries.iter().map(f).collect();
        let vars = entries.first().map_or(self.vars, Laurent::vars);
        assert!(entries.iter().all(|e| e.vars() == vars));
        LaurentMat { rows: self.rows, cols: self.cols, vars, entries }
    }

    pub fn mul(&self, other: &LaurentMat) -> LaurentMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in multiply");
        assert_eq!(self.vars, other.vars);
        LaurentMat::from_fn(self.rows, other.cols, self.vars, |i, j| {
            let mut acc = Laurent::zero(self.vars);
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, c: &Laurent) -> LaurentMat {
        self.map(|e| e.mul(c))
    }

    /// Entry-wise exponent relabeling (chart rewriting).
    pub fn map_exponents(&self, t: &IntMat) -> LaurentMat {
        self.map(|e| e.map_exponents(t))
    }

    /// Entry-wise substitution by unit monomials.
    pub fn substitute(&self, images: &[Laurent]) -> Result<LaurentMat, AlgebraError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(e.substitute(images)?);
        }
        let vars = entries.first().map_or(0, Laurent::vars);
        Ok(LaurentMat { rows: self.rows, cols: self.cols, vars, entries })
    }

    pub fn extend_vars(&self, extra: usize) -> LaurentMat {
        self.map(|e| e.extend_vars(extra))
    }

    /// Cofactor-expansion determinant; fine for the small ranks used here.
    pub fn det(&self) -> Laurent {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        match n {
            0 => Laurent::one(self.vars),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut acc = Laurent::zero(self.vars);
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let m = self.minor(0, j).det();
                    let term = a.mul(&m);
                    acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> LaurentMat {
        let mut m = LaurentMat::zero(self.rows - 1, self.cols - 1, self.vars);
        let mut r = 0;
        for i in 0..self.rows {
            if i == skip_r {
                continue;
            }
            let mut c = 0;
            for j in 0..self.cols {
                if j == skip_c {
                    continue;
                }
                m.set(r, c, self.get(i, j).clone());
                c += 1;
            }
            r += 1;
        }
        m
    }

    /// Exact inverse; defined iff `det` is a unit monomial.
    pub fn inverse(&self) -> Result<LaurentMat, AlgebraError> {
        assert_eq!(self.rows, self.cols);
        let d = self.det();
        let Some((de, dc)) = d.as_unit_monomial() else {
            return Err(AlgebraError::NonUnitDeterminant { det: d.to_string() });
        };
        let dinv = Laurent::monomial(de.iter().map(|k| -k).collect(), dc.recip());
        let n = self.rows;
        let mut adj = LaurentMat::zero(n, n, self.vars);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                adj.set(j, i, c.mul(&dinv));
            }
        }
        Ok(adj)
    }

    /// Promotes a rational matrix to constant Laurent entries.
    pub fn from_rationals(m: &[Vec<Rat>], vars: usize) -> LaurentMat {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        LaurentMat::from_fn(rows, cols, vars, |i, j| {
            Laurent::constant(vars, m[i][j].clone())
        })
    }

    /// First entry (row, col, exponent, left coefficient, right
    /// coefficient) where the two matrices differ, scanning row-major.
    pub fn first_difference(
        &self,
        other: &LaurentMat,
    ) -> Option<(usize, usize, Vec<i64>, Rat, Rat)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some((e, a, b)) = self.get(i, j).first_difference(other.get(i, j)) {
                    return Some((i, j, e, a, b));
                }
            }
        }
        None
    }
}

impl fmt::Display for LaurentMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for LaurentMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentMat({self})")
    }
}
