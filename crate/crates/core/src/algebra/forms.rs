//! Matrix-valued logarithmic differential forms on a torus chart.
//!
//! A one-form is stored as its coefficients against `dx_i/x_i` (the `log`
//! part) and `dx_i` (the `hol` part).  The representation is kept in a
//! normal form that makes equality structural: along each variable the
//! combined coefficient `G_i = log[i] + x_i * hol[i]` is split so that
//! `log[i]` holds exactly the terms with `x_i`-exponent <= 0 and `hol[i]`
//! the rest.  In particular `log[i]` evaluated at `x_i = 0` is the residue
//! along that divisor, and a form equals zero iff all stored parts are
//! zero.
//!
//! Two-forms follow the same scheme per unordered variable pair `(i, j)`,
//! `i < j`, with the four components multiplying
//! `dlog x_i ^ dlog x_j`, `dlog x_i ^ dx_j`, `dx_i ^ dlog x_j` and
//! `dx_i ^ dx_j`.  All arithmetic happens on the combined `dlog`
//! coefficients, where the basis is free over the Laurent ring, so exact
//! zero tests are sound.

use std::collections::BTreeMap;

use serde::Serialize;

use super::intmat::IntMat;
use super::matrix::LaurentMat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogOneForm {
    vars: usize,
    rows: usize,
    cols: usize,
    /// coefficient of dx_i / x_i
    pub log: Vec<LaurentMat>,
    /// coefficient of dx_i
    pub hol: Vec<LaurentMat>,
}

/// Components of a two-form along one variable pair `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairComponent {
    /// dlog x_i ^ dlog x_j
    pub ll: LaurentMat,
    /// dlog x_i ^ dx_j
    pub lh: LaurentMat,
    /// dx_i ^ dlog x_j
    pub hl: LaurentMat,
    /// dx_i ^ dx_j
    pub hh: LaurentMat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogTwoForm {
    vars: usize,
    rows: usize,
    cols: usize,
    /// keyed by (i, j) with i < j; all-zero components are pruned
    pub components: BTreeMap<(usize, usize), PairComponent>,
}

impl LogOneForm {
    pub fn zero(vars: usize, rows: usize, cols: usize) -> Self {
        LogOneForm {
            vars,
            rows,
            cols,
            log: vec![LaurentMat::zero(rows, cols, vars); vars],
            hol: vec![LaurentMat::zero(rows, cols, vars); vars],
        }
    }

    /// Builds from raw `log`/`hol` coefficient lists and normalizes.
    pub fn new(vars: usize, log: Vec<LaurentMat>, hol: Vec<LaurentMat>) -> Self {
        assert_eq!(log.len(), vars);
        assert_eq!(hol.len(), vars);
        let rows = log.first().map_or(0, |m| m.rows);
        let cols = log.first().map_or(0, |m| m.cols);
        let dlog: Vec<LaurentMat> = (0..vars)
            .map(|i| {
                let mut shift = vec![0i64; vars];
                shift[i] = 1;
                log[i].add(&hol[i].map(|e| e.mul_monomial(&shift)))
            })
            .collect();
        Self::from_dlog(vars, rows, cols, dlog)
    }

    /// Builds from the combined `dlog` coefficients `G_i` (the coefficient
    /// of `dx_i/x_i` before splitting off the holomorphic part).
    pub fn from_dlog(vars: usize, rows: usize, cols: usize, dlog: Vec<LaurentMat>) -> Self {
        assert_eq!(dlog.len(), vars);
        let mut log = Vec::with_capacity(vars);
        let mut hol = Vec::with_capacity(vars);
        for (i, g) in dlog.iter().enumerate() {
            let mut unshift = vec![0i64; vars];
            unshift[i] = -1;
            let lo = g.map(|e| e.split_at_var(i).0);
            let hi = g.map(|e| e.split_at_var(i).1.mul_monomial(&unshift));
            log.push(lo);
            hol.push(hi);
        }
        LogOneForm { vars, rows, cols, log, hol }
    }

    /// Combined coefficient of `dx_i/x_i`.
    pub fn dlog_coeff(&self, i: usize) -> LaurentMat {
        let mut shift = vec![0i64; self.vars];
        shift[i] = 1;
        self.log[i].add(&self.hol[i].map(|e| e.mul_monomial(&shift)))
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.log.iter().all(LaurentMat::is_zero) && self.hol.iter().all(LaurentMat::is_zero)
    }

    pub fn add(&self, other: &LogOneForm) -> LogOneForm {
        assert_eq!(self.vars, other.vars);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        LogOneForm::from_dlog(
            self.vars,
            self.rows,
            self.cols,
            (0..self.vars)
                .map(|i| self.dlog_coeff(i).add(&other.dlog_coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self) -> LogOneForm {
        LogOneForm {
            vars: self.vars,
            rows: self.rows,
            cols: self.cols,
            log: self.log.iter().map(LaurentMat::neg).collect(),
            hol: self.hol.iter().map(LaurentMat::neg).collect(),
        }
    }

    pub fn sub(&self, other: &LogOneForm) -> LogOneForm {
        self.add(&other.neg())
    }

    /// Left action `m * ω`.
    pub fn left_mul(&self, m: &LaurentMat) -> LogOneForm {
        LogOneForm::from_dlog(
            self.vars,
            m.rows,
            self.cols,
            (0..self.vars).map(|i| m.mul(&self.dlog_coeff(i))).collect(),
        )
    }

    /// Right action `ω * m`.
    pub fn right_mul(&self, m: &LaurentMat) -> LogOneForm {
        LogOneForm::from_dlog(
            self.vars,
            self.rows,
            m.cols,
            (0..self.vars).map(|i| self.dlog_coeff(i).mul(m)).collect(),
        )
    }

    /// Exterior derivative.  In `dlog` coordinates,
    /// `(dω)_{ij} = x_i ∂_i G_j − x_j ∂_j G_i`.
    pub fn exterior_derivative(&self) -> LogTwoForm {
        let mut comps = BTreeMap::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                let gi = self.dlog_coeff(i);
                let gj = self.dlog_coeff(j);
                let g = gj.map(|e| e.log_derivative(i)).sub(&gi.map(|e| e.log_derivative(j)));
                comps.insert((i, j), g);
            }
        }
        LogTwoForm::from_dlog(self.vars, self.rows, self.cols, comps)
    }

    /// Wedge product; with matrix coefficients
    /// `(ω ∧ η)_{ij} = G_i(ω) G_j(η) − G_j(ω) G_i(η)`.
    pub fn wedge(&self, other: &LogOneForm) -> LogTwoForm {
        assert_eq!(self.vars, other.vars);
        assert_eq!(self.cols, other.rows, "shape mismatch in wedge");
        let mut comps = BTreeMap::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                let g = self
                    .dlog_coeff(i)
                    .mul(&other.dlog_coeff(j))
                    .sub(&self.dlog_coeff(j).mul(&other.dlog_coeff(i)));
                comps.insert((i, j), g);
            }
        }
        LogTwoForm::from_dlog(self.vars, self.rows, other.cols, comps)
    }

    /// Total derivative of a matrix of functions, as a one-form:
    /// `dg = Σ (x_i ∂_i g) dlog x_i`.
    pub fn d_of_matrix(g: &LaurentMat) -> LogOneForm {
        let vars = g.vars();
        LogOneForm::from_dlog(
            vars,
            g.rows,
            g.cols,
            (0..vars).map(|i| g.map(|e| e.log_derivative(i))).collect(),
        )
    }

    /// Rewrites a form given in `other`-chart coordinates into the
    /// coordinates of the chart whose transition exponent matrix is `t`
    /// (columns give the old coordinates as monomials in the new ones):
    /// `dlog y_j = Σ_i t_{ij} dlog x_i` and arguments relabel by `a ↦ t a`.
    pub fn transport(&self, t: &IntMat) -> LogOneForm {
        assert_eq!(t.cols, self.vars, "transition shape mismatch");
        let new_vars = t.rows;
        let rewritten: Vec<LaurentMat> =
            (0..self.vars).map(|j| self.dlog_coeff(j).map_exponents(t)).collect();
        let dlog: Vec<LaurentMat> = (0..new_vars)
            .map(|i| {
                let mut acc = LaurentMat::zero(self.rows, self.cols, new_vars);
                for (j, rj) in rewritten.iter().enumerate() {
                    let c = t[(i, j)];
                    if c != 0 {
                        acc = acc.add(&rj.map(|e| {
                            e.scale(&super::rational::rint(c))
                        }));
                    }
                }
                acc
            })
            .collect();
        LogOneForm::from_dlog(new_vars, self.rows, self.cols, dlog)
    }

    /// Residue along `{x_i = 0}`: the log coefficient evaluated at
    /// `x_i = 0`.  `None` when a term has a genuine higher-order pole.
    pub fn residue(&self, i: usize) -> Option<LaurentMat> {
        let mut out = LaurentMat::zero(self.rows, self.cols, self.vars);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.log[i].get(r, c).eval_at_zero(i)?);
            }
        }
        Some(out)
    }

    /// Embeds into a ring with `extra` trailing variables.
    pub fn extend_vars(&self, extra: usize) -> LogOneForm {
        let vars = self.vars + extra;
        let mut dlog: Vec<LaurentMat> =
            (0..self.vars).map(|i| self.dlog_coeff(i).extend_vars(extra)).collect();
        dlog.extend((self.vars..vars).map(|_| LaurentMat::zero(self.rows, self.cols, vars)));
        LogOneForm::from_dlog(vars, self.rows, self.cols, dlog)
    }

    /// Human-readable location of the first difference, if any.
    pub fn first_difference(&self, other: &LogOneForm) -> Option<String> {
        for i in 0..self.vars {
            if let Some((r, c, e, a, b)) =
                self.dlog_coeff(i).first_difference(&other.dlog_coeff(i))
            {
                return Some(format!(
                    "dlog x{} coefficient, entry ({r},{c}), exponent {e:?}: {} vs {}",
                    i + 1,
                    super::rational::format_rat(&a),
                    super::rational::format_rat(&b),
                ));
            }
        }
        None
    }
}

impl LogTwoForm {
    pub fn zero(vars: usize, rows: usize, cols: usize) -> Self {
        LogTwoForm { vars, rows, cols, components: BTreeMap::new() }
    }

    /// Builds from combined `dlog ∧ dlog` coefficients keyed by `(i, j)`,
    /// `i < j`, splitting each into the four canonical components.
    pub fn from_dlog(
        vars: usize,
        rows: usize,
        cols: usize,
        dlog: BTreeMap<(usize, usize), LaurentMat>,
    ) -> Self {
        let mut components = BTreeMap::new();
        for ((i, j), g) in dlog {
            assert!(i < j && j < vars);
            if g.is_zero() {
                continue;
            }
            let mut un_i = vec![0i64; vars];
            un_i[i] = -1;
            let mut un_j = vec![0i64; vars];
            un_j[j] = -1;
            let lo_i = g.map(|e| e.split_at_var(i).0);
            let hi_i = g.map(|e| e.split_at_var(i).1);
            let ll = lo_i.map(|e| e.split_at_var(j).0);
            let lh = lo_i.map(|e| e.split_at_var(j).1.mul_monomial(&un_j));
            let hl = hi_i.map(|e| e.split_at_var(j).0.mul_monomial(&un_i));
            let hh = hi_i.map(|e| {
                e.split_at_var(j)
                    .1
                    .mul_monomial(&un_i)
                    .mul_monomial(&un_j)
            });
            components.insert((i, j), PairComponent { ll, lh, hl, hh });
        }
        LogTwoForm { vars, rows, cols, components }
    }

    /// Combined coefficient of `dlog x_i ∧ dlog x_j` for `i < j`.
    pub fn dlog_coeff(&self, i: usize, j: usize) -> LaurentMat {
        let Some(c) = self.components.get(&(i, j)) else {
            return LaurentMat::zero(self.rows, self.cols, self.vars);
        };
        let mut sh_i = vec![0i64; self.vars];
        sh_i[i] = 1;
        let mut sh_j = vec![0i64; self.vars];
        sh_j[j] = 1;
        c.ll.add(&c.lh.map(|e| e.mul_monomial(&sh_j)))
            .add(&c.hl.map(|e| e.mul_monomial(&sh_i)))
            .add(&c.hh.map(|e| e.mul_monomial(&sh_i).mul_monomial(&sh_j)))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &LogTwoForm) -> LogTwoForm {
        assert_eq!(self.vars, other.vars);
        let mut dlog = BTreeMap::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                let g = self.dlog_coeff(i, j).add(&other.dlog_coeff(i, j));
                dlog.insert((i, j), g);
            }
        }
        LogTwoForm::from_dlog(self.vars, self.rows, self.cols, dlog)
    }

    pub fn first_difference(&self, other: &LogTwoForm) -> Option<String> {
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                if let Some((r, c, e, a, b)) =
                    self.dlog_coeff(i, j).first_difference(&other.dlog_coeff(i, j))
                {
                    return Some(format!(
                        "dlog x{} ^ dlog x{} coefficient, entry ({r},{c}), exponent {e:?}: {} vs {}",
                        i + 1,
                        j + 1,
                        super::rational::format_rat(&a),
                        super::rational::format_rat(&b),
                    ));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laurent::Laurent;
    use crate::algebra::rational::{rfrac, rint};
    use proptest::prelude::*;

    fn scalar(vars: usize, p: Laurent) -> LaurentMat {
        let mut m = LaurentMat::zero(1, 1, vars);
        m.set(0, 0, p);
        m
    }

    fn mono(e: Vec<i64>, c: i64) -> Laurent {
        Laurent::monomial(e, rint(c))
    }

    #[test]
    fn normalization_moves_divisible_terms() {
        // x2 * dlog x2 is really x2-divisible: it must land in the
        // holomorphic part as 1 * dx2.
        let vars = 2;
        let log = vec![
            scalar(vars, Laurent::zero(vars)),
            scalar(vars, mono(vec![0, 1], 1)),
        ];
        let hol = vec![
            scalar(vars, Laurent::zero(vars)),
            scalar(vars, Laurent::zero(vars)),
        ];
        let w = LogOneForm::new(vars, log, hol);
        assert!(w.log[1].is_zero());
        assert_eq!(w.hol[1], scalar(vars, Laurent::one(vars)));
    }

    #[test]
    fn normalization_extracts_log_poles_from_hol_part() {
        // (k/x) dx = k dlog x: the classical g^-1 dg of g = x^k.
        let vars = 1;
        let g = scalar(vars, mono(vec![3], 1));
        let dg = LogOneForm::d_of_matrix(&g); // 3 x^3 dlog x = 3 x^2 dx
        assert_eq!(dg.hol[0], scalar(vars, mono(vec![2], 3)));
        let ginv = scalar(vars, mono(vec![-3], 1));
        let w = dg.left_mul(&ginv);
        assert_eq!(w.log[0], scalar(vars, mono(vec![0], 3)));
        assert!(w.hol[0].is_zero());
    }

    #[test]
    fn exterior_derivative_of_x2_dx1() {
        // d(x2 dx1) = dx2 ^ dx1 = -(dx1 ^ dx2)
        let vars = 2;
        let log = vec![scalar(vars, Laurent::zero(vars)); 2];
        let hol = vec![
            scalar(vars, mono(vec![0, 1], 1)),
            scalar(vars, Laurent::zero(vars)),
        ];
        let w = LogOneForm::new(vars, log, hol);
        let dw = w.exterior_derivative();
        let comp = dw.components.get(&(0, 1)).expect("nonzero component");
        assert!(comp.ll.is_zero());
        assert!(comp.lh.is_zero());
        assert!(comp.hl.is_zero());
        assert_eq!(comp.hh, scalar(vars, Laurent::constant(vars, rint(-1))));
    }

    #[test]
    fn wedge_of_dlogs() {
        // dlog x1 ^ dlog x2 has ll coefficient 1
        let vars = 2;
        let a = LogOneForm::from_dlog(
            vars,
            1,
            1,
            vec![scalar(vars, Laurent::one(vars)), scalar(vars, Laurent::zero(vars))],
        );
        let b = LogOneForm::from_dlog(
            vars,
            1,
            1,
            vec![scalar(vars, Laurent::zero(vars)), scalar(vars, Laurent::one(vars))],
        );
        let w = a.wedge(&b);
        let comp = w.components.get(&(0, 1)).unwrap();
        assert_eq!(comp.ll, scalar(vars, Laurent::one(vars)));
        assert!(b.wedge(&a).dlog_coeff(0, 1).get(0, 0).coeff(&[0, 0]) == rint(-1));
    }

    #[test]
    fn wedge_of_noncommuting_constant_matrices() {
        // a = A dlog x1 + B dlog x2 with [A, B] != 0: a ^ a = [A,B] dlog x1 ^ dlog x2
        let vars = 2;
        let a_mat = LaurentMat::from_rationals(
            &[vec![rint(0), rint(1)], vec![rint(0), rint(0)]],
            vars,
        );
        let b_mat = LaurentMat::from_rationals(
            &[vec![rint(1), rint(0)], vec![rint(0), rint(-1)]],
            vars,
        );
        let a = LogOneForm::from_dlog(vars, 2, 2, vec![a_mat.clone(), b_mat.clone()]);
        let w = a.wedge(&a);
        let expect = a_mat.mul(&b_mat).sub(&b_mat.mul(&a_mat));
        assert_eq!(w.dlog_coeff(0, 1), expect);
        assert!(!w.is_zero());
        // commuting (diagonal) coefficients wedge to zero
        let d1 = LaurentMat::from_rationals(&[vec![rint(2), rint(0)], vec![rint(0), rint(3)]], vars);
        let d2 = LaurentMat::from_rationals(&[vec![rint(5), rint(0)], vec![rint(0), rint(7)]], vars);
        let d = LogOneForm::from_dlog(vars, 2, 2, vec![d1, d2]);
        assert!(d.wedge(&d).is_zero());
    }

    #[test]
    fn transport_matches_p1_chart_change() {
        // On the line: A = k dlog y on the infinity chart pulls back to
        // -k dlog x, because y = x^-1.
        let t = IntMat::from_rows(&[vec![-1]]);
        let a = LogOneForm::from_dlog(1, 1, 1, vec![scalar(1, mono(vec![0], 5))]);
        let b = a.transport(&t);
        assert_eq!(b.log[0], scalar(1, mono(vec![0], -5)));
    }

    #[test]
    fn residue_reads_constant_term() {
        let vars = 2;
        // (3 + x2 + x1 x2) dlog x1: residue along x1 = 0 is 3 + x2
        let g = mono(vec![0, 0], 3)
            .add(&mono(vec![0, 1], 1))
            .add(&mono(vec![1, 1], 1));
        let w = LogOneForm::from_dlog(vars, 1, 1, vec![scalar(vars, g), scalar(vars, Laurent::zero(vars))]);
        let res = w.residue(0).unwrap();
        assert_eq!(
            res.get(0, 0),
            &mono(vec![0, 0], 3).add(&mono(vec![0, 1], 1))
        );
        // a genuine second-order pole has no residue
        let bad = LogOneForm::from_dlog(
            vars,
            1,
            1,
            vec![scalar(vars, mono(vec![-1, 0], 1)), scalar(vars, Laurent::zero(vars))],
        );
        assert_eq!(bad.residue(0), None);
    }

    prop_compose! {
        fn arb_scalar_form(vars: usize)(
            logs in proptest::collection::vec(
                proptest::collection::vec(
                    (proptest::collection::vec(-2i64..=2, vars), -4i64..=4, 1i64..=3),
                    0..3,
                ),
                vars,
            ),
        ) -> LogOneForm {
            let dlog = logs.into_iter().map(|terms| {
                let mut p = Laurent::zero(vars);
                for (e, n, d) in terms {
                    p = p.add(&Laurent::monomial(e, rfrac(n, d)));
                }
                let mut m = LaurentMat::zero(1, 1, vars);
                m.set(0, 0, p);
                m
            }).collect();
            LogOneForm::from_dlog(vars, 1, 1, dlog)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn d_squared_of_functions_is_zero(
            terms in proptest::collection::vec(
                (proptest::collection::vec(-3i64..=3, 3), -5i64..=5, 1i64..=3),
                0..4,
            )
        ) {
            let mut f = Laurent::zero(3);
            for (e, n, d) in terms {
                f = f.add(&Laurent::monomial(e, rfrac(n, d)));
            }
            let mut m = LaurentMat::zero(1, 1, 3);
            m.set(0, 0, f);
            let df = LogOneForm::d_of_matrix(&m);
            prop_assert!(df.exterior_derivative().is_zero());
        }

        #[test]
        fn normalization_is_idempotent(w in arb_scalar_form(2)) {
            let again = LogOneForm::new(2, w.log.clone(), w.hol.clone());
            prop_assert_eq!(again, w);
        }

        #[test]
        fn scalar_wedge_is_alternating(a in arb_scalar_form(2), b in arb_scalar_form(2)) {
            // for 1x1 (commuting) coefficients: a^a = 0 and a^b = -(b^a)
            prop_assert!(a.wedge(&a).is_zero());
            let ab = a.wedge(&b);
            let ba = b.wedge(&a);
            let sum = ab.add(&ba);
            prop_assert!(sum.is_zero());
        }
    }
}
