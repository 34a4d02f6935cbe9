//! Dense integer matrices and the Smith normal form.
//!
//! Entries are `i64`; every matrix in this crate is desk-scale (fans live in
//! rank <= 6 and cocycle index sets are tiny), and determinants are computed
//! fraction-free in `i128`, so overflow is out of reach by a wide margin.

use serde::Serialize;

/// Row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

/// Smith normal form `u * m * v = s` with `u`, `v` unimodular and `s`
/// diagonal, nonnegative, each entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMat,
    pub s: IntMat,
    pub v: IntMat,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in multiply");
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, x.len(), "shape mismatch in matvec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Fraction-free (Bareiss) determinant; exact.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        let d = sign * a[n - 1][n - 1];
        i64::try_from(d).expect("determinant overflow")
    }

    /// Inverse of a unimodular matrix (|det| = 1); stays integral.
    pub fn inverse_unimodular(&self) -> Option<IntMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let d = self.det();
        if d != 1 && d != -1 {
            return None;
        }
        let mut adj = IntMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ij goes to adj[(j, i)]
                let minor = self.minor(i, j);
                let c = minor.det();
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[(j, i)] = s * c * d; // divide by det = multiply, det = +-1
            }
        }
        Some(adj)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> IntMat {
        let mut rows = Vec::with_capacity(self.rows - 1);
        for i in 0..self.rows {
            if i == skip_r {
                continue;
            }
            let mut row = Vec::with_capacity(self.cols - 1);
            for j in 0..self.cols {
                if j != skip_c {
                    row.push(self[(i, j)]);
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            rows.push(vec![]);
            return IntMat { rows: 0, cols: 0, data: vec![] };
        }
        IntMat::from_rows(&rows)
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form with unimodular transform tracking.
///
/// Classic elimination: repeatedly move a minimal-magnitude pivot to the
/// diagonal and reduce its row and column with Euclidean steps; a final pass
/// enforces the divisibility chain and nonnegative diagonal.
pub fn smith_normal_form(m: &IntMat) -> Snf {
    let mut s = m.clone();
    let mut u = IntMat::identity(m.rows);
    let mut v = IntMat::identity(m.cols);
    let t_max = m.rows.min(m.cols);

    for t in 0..t_max {
        eliminate_at(&mut s, &mut u, &mut v, t);
    }

    // Nonnegative diagonal.
    for t in 0..t_max {
        if s[(t, t)] < 0 {
            scale_row(&mut s, &mut u, t);
        }
    }

    // Divisibility chain d1 | d2 | ... via the column-add trick.
    loop {
        let mut clean = true;
        for t in 0..t_max.saturating_sub(1) {
            let (a, b) = (s[(t, t)], s[(t + 1, t + 1)]);
            if a != 0 && b % a != 0 {
                add_col(&mut s, &mut v, t + 1, t); // puts b into position (t+1, t)
                eliminate_at(&mut s, &mut u, &mut v, t);
                eliminate_at(&mut s, &mut u, &mut v, t + 1);
                if s[(t, t)] < 0 {
                    scale_row(&mut s, &mut u, t);
                }
                if s[(t + 1, t + 1)] < 0 {
                    scale_row(&mut s, &mut u, t + 1);
                }
                clean = false;
            }
            if a == 0 && b != 0 {
                // zero before nonzero: swap into place
                swap_rows(&mut s, &mut u, t, t + 1);
                swap_cols(&mut s, &mut v, t, t + 1);
                clean = false;
            }
        }
        if clean {
            break;
        }
    }

    Snf { u, s, v }
}

/// Clears row and column `t` of `s`, leaving a single entry at `(t, t)`.
fn eliminate_at(s: &mut IntMat, u: &mut IntMat, v: &mut IntMat, t: usize) {
    loop {
        // Minimal-magnitude nonzero pivot in the trailing submatrix touching
        // row/column t only: we only need to clean row t and column t here.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows {
            for j in t..s.cols {
                if s[(i, j)] != 0
                    && pivot.is_none_or(|(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { return };
        if pi != t {
            swap_rows(s, u, pi, t);
        }
        if pj != t {
            swap_cols(s, v, pj, t);
        }
        let p = s[(t, t)];
        let mut dirty = false;
        for i in 0..s.rows {
            if i != t && s[(i, t)] != 0 {
                let q = s[(i, t)].div_euclid(p);
                if q != 0 {
                    row_axpy(s, u, i, t, -q);
                }
                if s[(i, t)] != 0 {
                    dirty = true;
                }
            }
        }
        for j in 0..s.cols {
            if j != t && s[(t, j)] != 0 {
                let q = s[(t, j)].div_euclid(p);
                if q != 0 {
                    col_axpy(s, v, j, t, -q);
                }
                if s[(t, j)] != 0 {
                    dirty = true;
                }
            }
        }
        if !dirty {
            return;
        }
    }
}

fn swap_rows(s: &mut IntMat, u: &mut IntMat, a: usize, b: usize) {
    for j in 0..s.cols {
        let (x, y) = (s[(a, j)], s[(b, j)]);
        s[(a, j)] = y;
        s[(b, j)] = x;
    }
    for j in 0..u.cols {
        let (x, y) = (u[(a, j)], u[(b, j)]);
        u[(a, j)] = y;
        u[(b, j)] = x;
    }
}

fn swap_cols(s: &mut IntMat, v: &mut IntMat, a: usize, b: usize) {
    for i in 0..s.rows {
        let (x, y) = (s[(i, a)], s[(i, b)]);
        s[(i, a)] = y;
        s[(i, b)] = x;
    }
    for i in 0..v.rows {
        let (x, y) = (v[(i, a)], v[(i, b)]);
        v[(i, a)] = y;
        v[(i, b)] = x;
    }
}

/// row_a += c * row_b
fn row_axpy(s: &mut IntMat, u: &mut IntMat, a: usize, b: usize, c: i64) {
    for j in 0..s.cols {
        s[(a, j)] += c * s[(b, j)];
    }
    for j in 0..u.cols {
        u[(a, j)] += c * u[(b, j)];
    }
}

/// col_a += c * col_b
fn col_axpy(s: &mut IntMat, v: &mut IntMat, a: usize, b: usize, c: i64) {
    for i in 0..s.rows {
        s[(i, a)] += c * s[(i, b)];
    }
    for i in 0..v.rows {
        v[(i, a)] += c * v[(i, b)];
    }
}

fn add_col(s: &mut IntMat, v: &mut IntMat, from: usize, to: usize) {
    col_axpy(s, v, to, from, 1);
}

fn scale_row(s: &mut IntMat, u: &mut IntMat, t: usize) {
    for j in 0..s.cols {
        s[(t, j)] = -s[(t, j)];
    }
    for j in 0..u.cols {
        u[(t, j)] = -u[(t, j)];
    }
}

impl Snf {
    /// Diagonal entries (including zeros).
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.s.rows.min(self.s.cols)).map(|t| self.s[(t, t)]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_snf(m: &IntMat) {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.s, "u*m*v != s for {m:?}");
        assert_eq!(snf.u.det().abs(), 1, "u not unimodular");
        assert_eq!(snf.v.det().abs(), 1, "v not unimodular");
        let d = snf.diagonal();
        for t in 0..d.len() {
            assert!(d[t] >= 0, "negative diagonal");
            if t + 1 < d.len() && d[t] != 0 {
                assert_eq!(d[t + 1] % d[t], 0, "divisibility chain broken: {d:?}");
            }
            if d[t] == 0 && t + 1 < d.len() {
                assert_eq!(d[t + 1], 0, "zero before nonzero: {d:?}");
            }
        }
        // off-diagonal must vanish
        for i in 0..snf.s.rows {
            for j in 0..snf.s.cols {
                if i != j {
                    assert_eq!(snf.s[(i, j)], 0);
                }
            }
        }
    }

    #[test]
    fn snf_of_2468_is_diag_2_4() {
        let m = IntMat::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![2, 4]);
        check_snf(&m);
    }

    #[test]
    fn snf_handles_zero_and_identity() {
        check_snf(&IntMat::zero(2, 3));
        let snf = smith_normal_form(&IntMat::zero(2, 3));
        assert_eq!(snf.diagonal(), vec![0, 0]);
        let id = IntMat::identity(3);
        let snf = smith_normal_form(&id);
        assert_eq!(snf.diagonal(), vec![1, 1, 1]);
    }

    #[test]
    fn snf_of_rectangular_incidence_style_matrix() {
        // incidence matrix of a 3-cycle
        let m = IntMat::from_rows(&[vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![1, 1, 0]);
        check_snf(&m);
    }

    #[test]
    fn det_bareiss_matches_hand_values() {
        assert_eq!(IntMat::from_rows(&[vec![2, 4], vec![6, 8]]).det(), -8);
        assert_eq!(IntMat::identity(4).det(), 1);
        assert_eq!(
            IntMat::from_rows(&[vec![0, -1], vec![1, -1]]).det(),
            1,
            "ray matrix of a smooth cone"
        );
        assert_eq!(
            IntMat::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).det(),
            0
        );
    }

    #[test]
    fn unimodular_inverse_round_trips() {
        let m = IntMat::from_rows(&[vec![1, 1], vec![0, 1]]);
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(m.mul(&inv), IntMat::identity(2));
        assert_eq!(inv.mul(&m), IntMat::identity(2));
        assert!(IntMat::from_rows(&[vec![2, 0], vec![0, 1]])
            .inverse_unimodular()
            .is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_transforms_are_unimodular(
            rows in 1usize..4, cols in 1usize..4,
            seed in proptest::collection::vec(-6i64..=6, 16)
        ) {
            let data: Vec<i64> = seed.into_iter().take(rows * cols).collect();
            prop_assume!(data.len() == rows * cols);
            let m = IntMat { rows, cols, data };
            check_snf(&m);
        }
    }
}
