//! Sparse multivariate Laurent polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by fixed-length exponent vectors, so
//! the representation is canonical: two polynomials are equal as ring
//! elements iff they are structurally equal.  Variable counts are part of
//! the value and must agree for arithmetic; that contract is internal, so
//! violations panic rather than returning errors.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::rational::{format_rat, pow_rat, Rat};
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq)]
pub struct Laurent {
    vars: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl Laurent {
    pub fn zero(vars: usize) -> Self {
        Laurent { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Rat) -> Self {
        let mut p = Laurent::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    pub fn one(vars: usize) -> Self {
        Laurent::constant(vars, Rat::from_integer(1.into()))
    }

    /// Single term `c * x^exp`.
    pub fn monomial(exp: Vec<i64>, c: Rat) -> Self {
        let vars = exp.len();
        let mut p = Laurent::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `x_i` in an `n`-variable ring.
    pub fn var(i: usize, vars: usize) -> Self {
        assert!(i < vars);
        let mut exp = vec![0; vars];
        exp[i] = 1;
        Laurent::monomial(exp, Rat::from_integer(1.into()))
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[i64]) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    fn insert_term(&mut self, exp: Vec<i64>, c: Rat) {
        debug_assert_eq!(exp.len(), self.vars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = Laurent::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(exp, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Laurent {
        if c.is_zero() {
            return Laurent::zero(self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn mul_monomial(&self, shift: &[i64]) -> Laurent {
        assert_eq!(shift.len(), self.vars);
        let mut out = Laurent::zero(self.vars);
        for (e, c) in &self.terms {
            let exp: Vec<i64> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.terms.insert(exp, c.clone());
        }
        out
    }

    /// If the polynomial is a single invertible term, returns `(exponent,
    /// coefficient)`.
    pub fn as_unit_monomial(&self) -> Option<(&[i64], &Rat)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some((e.as_slice(), c))
    }

    /// Substitutes `x_i -> images[i]`.  Every image must be a unit monomial
    /// (Laurent substitution with negative exponents is only defined for
    /// units); all images must share a variable count, which becomes the
    /// variable count of the result.
    pub fn substitute(&self, images: &[Laurent]) -> Result<Laurent, AlgebraError> {
        assert_eq!(images.len(), self.vars, "one image per variable required");
        let out_vars = images.first().map_or(0, Laurent::vars);
        let mut units = Vec::with_capacity(images.len());
        for (i, im) in images.iter().enumerate() {
            if im.vars() != out_vars {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "substitution image {i} has {} variables, expected {out_vars}",
                    im.vars()
                )));
            }
            match im.as_unit_monomial() {
                Some((e, c)) => units.push((e.to_vec(), c.clone())),
                None => return Err(AlgebraError::NonUnitImage { var: i }),
            }
        }
        let mut out = Laurent::zero(out_vars);
        for (e, c) in &self.terms {
            let mut exp = vec![0i64; out_vars];
            let mut coeff = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let (ie, ic) = &units[i];
                for (slot, v) in exp.iter_mut().zip(ie) {
                    *slot += v * k;
                }
                coeff *= pow_rat(ic, k);
            }
            out.insert_term(exp, coeff);
        }
        Ok(out)
    }

    /// Relabels exponents by the linear map `a -> t * a`; this is
    /// substitution by the coefficient-one monomials `x_i -> x^(t e_i)` and
    /// is how chart transitions act on functions.
    pub fn map_exponents(&self, t: &super::intmat::IntMat) -> Laurent {
        assert_eq!(t.cols, self.vars, "exponent map shape mismatch");
        let mut out = Laurent::zero(t.rows);
        for (e, c) in &self.terms {
            out.insert_term(t.matvec(e), c.clone());
        }
        out
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Laurent {
        assert!(i < self.vars);
        let mut out = Laurent::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            out.insert_term(exp, c.clone() * Rat::from_integer(e[i].into()));
        }
        out
    }

    /// The logarithmic derivative `x_i * d/dx_i`; exponent-weighted, never
    /// leaves the Laurent ring.
    pub fn log_derivative(&self, i: usize) -> Laurent {
        assert!(i < self.vars);
        let mut out = Laurent::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                out.insert_term(e.clone(), c.clone() * Rat::from_integer(e[i].into()));
            }
        }
        out
    }

    /// Evaluation at `x_i = 0`: terms with positive `x_i`-exponent vanish;
    /// any negative exponent means the value is undefined and yields `None`.
    pub fn eval_at_zero(&self, i: usize) -> Option<Laurent> {
        assert!(i < self.vars);
        let mut out = Laurent::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] < 0 {
                return None;
            }
            if e[i] == 0 {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        Some(out)
    }

    /// Splits into `(low, high)` where `low` collects the terms with
    /// `exp[i] <= 0` and `high` the terms with `exp[i] >= 1`.
    pub fn split_at_var(&self, i: usize) -> (Laurent, Laurent) {
        assert!(i < self.vars);
        let mut low = Laurent::zero(self.vars);
        let mut high = Laurent::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] <= 0 {
                low.terms.insert(e.clone(), c.clone());
            } else {
                high.terms.insert(e.clone(), c.clone());
            }
        }
        (low, high)
    }

    /// Embeds into a ring with `extra` additional trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Laurent {
        let mut out = Laurent::zero(self.vars + extra);
        for (e, c) in &self.terms {
            let mut exp = e.clone();
            exp.extend(std::iter::repeat_n(0, extra));
            out.terms.insert(exp, c.clone());
        }
        out
    }

    /// Constant value, if the polynomial has no variable dependence.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if self.terms.len() == 1 && e.iter().all(|&k| k == 0) {
            Some(c.clone())
        } else {
            None
        }
    }

    /// Lexicographically first term where `self` and `other` differ,
    /// as `(exponent, self coefficient, other coefficient)`.
    pub fn first_difference(&self, other: &Laurent) -> Option<(Vec<i64>, Rat, Rat)> {
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let a = self.coeff(k);
            let b = other.coeff(k);
            if a != b {
                return Some((k.clone(), a, b));
            }
        }
        None
    }

    /// Renders with the given variable names (used by reports; `Display`
    /// uses `x1..xn`).
    pub fn render(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.vars);
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut body = String::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !body.is_empty() {
                    body.push('*');
                }
                body.push_str(&names[i]);
                if k != 1 {
                    body.push_str(&format!("^{k}"));
                }
            }
            let cs = format_rat(c);
            let part = if body.is_empty() {
                cs
            } else if cs == "1" {
                body
            } else if cs == "-1" {
                format!("-{body}")
            } else {
                format!("{cs}*{body}")
            };
            parts.push(part);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.vars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

/// Serialized as a list of `[exponent-vector, "p/q"]` pairs in canonical
/// (lexicographic) order, so identical polynomials serialize identically.
impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, format_rat(c)))?;
        }
        seq.end()
    }
}
