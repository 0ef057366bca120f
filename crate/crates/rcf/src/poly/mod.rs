//! Sparse multivariate polynomials over exact rationals.
//!
//! A [`Polynomial`] is a canonical map from monomials to nonzero coefficients;
//! two polynomials are equal exactly when their term maps are equal. A
//! polynomial can be viewed as univariate in a distinguished variable through
//! [`UnivariateView`], whose coefficients are polynomials free of that
//! variable. The degree of the zero polynomial is -1 throughout.

pub mod pseudo;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{rational_to_string, Rational};

/// Variable names are plain strings under a fixed global ordering
/// (lexicographic by name).
pub type VarName = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable `{0}` has no assigned value")]
    MissingVariable(String),
    #[error("degree order violated: expected deg p = {d} >= deg q = {e}")]
    DegreeOrder { d: i64, e: i64 },
    #[error("polynomial vanishes at the given point")]
    ZeroAtPoint,
    #[error("operation requires a one-variable polynomial, found variables {0:?}")]
    NotOneVariable(Vec<String>),
}

/// A power product of variables. No zero exponents are stored; the empty
/// map is the constant monomial. The total degree rides along because the
/// graded ordering consults it on every comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    exps: BTreeMap<VarName, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(name: &str) -> Self {
        Monomial::var_pow(name, 1)
    }

    pub fn var_pow(name: &str, k: u32) -> Self {
        let mut exps = BTreeMap::new();
        if k > 0 {
            exps.insert(name.to_string(), k);
        }
        Monomial { degree: k, exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    pub fn degree_of(&self, var: &str) -> u32 {
        self.exps.get(var).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, k) in &other.exps {
            *exps.entry(v.clone()).or_insert(0) += k;
        }
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    /// Removes `var` entirely.
    fn without(&self, var: &str) -> Monomial {
        let mut exps = self.exps.clone();
        let dropped = exps.remove(var).unwrap_or(0);
        Monomial {
            degree: self.degree - dropped,
            exps,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarName> {
        self.exps.keys()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&VarName, u32)> {
        self.exps.iter().map(|(v, k)| (v, *k))
    }
}

// Graded order: total degree first, then the exponent map lexicographically.
// Constants come first, which is also the printing order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial in canonical sparse form: no zero coefficients
/// are stored and the zero polynomial has an empty term map. The term map
/// sits behind an `Arc`, so clones are cheap and values stay immutable and
/// freely shareable across threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    terms: std::sync::Arc<BTreeMap<Monomial, Rational>>,
}

impl Default for Polynomial {
    fn default() -> Self {
        Polynomial {
            terms: std::sync::Arc::new(BTreeMap::new()),
        }
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial::from_terms(terms)
    }

    fn from_terms(terms: BTreeMap<Monomial, Rational>) -> Self {
        Polynomial {
            terms: std::sync::Arc::new(terms),
        }
    }

    pub fn var(name: &str) -> Self {
        Polynomial::term(Rational::one(), Monomial::var(name))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial::from_terms(terms)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(c) when the polynomial is the constant c (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            out.extend(m.vars().cloned());
        }
        out
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.terms.keys().any(|m| m.degree_of(var) > 0)
    }

    fn insert_term(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = (*self.terms).clone();
        for (m, c) in other.terms.iter() {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Polynomial::from_terms(terms)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut terms = (*self.terms).clone();
        for (m, c) in other.terms.iter() {
            Self::insert_term(&mut terms, m.clone(), -c.clone());
        }
        Polynomial::from_terms(terms)
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Polynomial::from_terms(terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                Self::insert_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Polynomial::from_terms(terms)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.clone(), k * c))
            .collect();
        Polynomial::from_terms(terms)
    }

    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact value at a point covering every variable of the polynomial.
    pub fn eval(&self, assignment: &BTreeMap<VarName, Rational>) -> Result<Rational, PolyError> {
        let mut acc = Rational::zero();
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for (v, k) in m.exponents() {
                let val = assignment
                    .get(v)
                    .ok_or_else(|| PolyError::MissingVariable(v.clone()))?;
                let mut p = Rational::one();
                for _ in 0..k {
                    p *= val;
                }
                t *= p;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Capture-free substitution of a polynomial for a variable.
    pub fn subst(&self, var: &str, replacement: &Polynomial) -> Polynomial {
        if !self.contains_var(var) {
            return self.clone();
        }
        let mut acc = Polynomial::zero();
        for (m, c) in self.terms.iter() {
            let k = m.degree_of(var);
            let rest = Polynomial::term(c.clone(), m.without(var));
            let t = if k == 0 {
                rest
            } else {
                rest.mul(&replacement.pow(k))
            };
            acc = acc.add(&t);
        }
        acc
    }

    pub fn subst_rational(&self, var: &str, value: &Rational) -> Polynomial {
        self.subst(var, &Polynomial::constant(value.clone()))
    }

    /// Formal derivative in `var`: sum of `i * a_i * var^(i-1)`.
    pub fn derivative(&self, var: &str) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let k = m.degree_of(var);
            if k == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            if k == 1 {
                exps.remove(var);
            } else {
                exps.insert(var.to_string(), k - 1);
            }
            let lowered = Monomial {
                degree: m.degree - 1,
                exps,
            };
            Self::insert_term(&mut terms, lowered, c * Rational::from_integer(k.into()));
        }
        Polynomial::from_terms(terms)
    }

    /// Degree in `var`; -1 for the zero polynomial.
    pub fn degree_in(&self, var: &str) -> i64 {
        if self.is_zero() {
            return -1;
        }
        self.terms
            .keys()
            .map(|m| m.degree_of(var) as i64)
            .max()
            .unwrap()
    }

    /// Coefficient of `var^k` as a polynomial free of `var`.
    pub fn coeff_in(&self, var: &str, k: u32) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            if m.degree_of(var) == k {
                Self::insert_term(&mut terms, m.without(var), c.clone());
            }
        }
        Polynomial::from_terms(terms)
    }

    pub fn leading_coeff_in(&self, var: &str) -> Polynomial {
        let d = self.degree_in(var);
        if d < 0 {
            Polynomial::zero()
        } else {
            self.coeff_in(var, d as u32)
        }
    }

    /// View in `var` with coefficients a_0..a_d free of `var`.
    pub fn univariate(&self, var: &str) -> UnivariateView {
        let d = self.degree_in(var);
        let mut coeffs = Vec::new();
        if d >= 0 {
            for k in 0..=d as u32 {
                coeffs.push(self.coeff_in(var, k));
            }
            while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
                coeffs.pop();
            }
        }
        UnivariateView {
            var: var.to_string(),
            coeffs,
        }
    }

    /// Dense rational coefficients when the polynomial has at most the given
    /// variable; errors when other variables occur.
    pub fn dense_coeffs(&self, var: &str) -> Result<Vec<Rational>, PolyError> {
        let vs = self.vars();
        let extraneous: Vec<String> = vs.iter().filter(|v| v.as_str() != var).cloned().collect();
        if !extraneous.is_empty() {
            return Err(PolyError::NotOneVariable(extraneous));
        }
        let d = self.degree_in(var);
        let mut out = vec![Rational::zero(); (d.max(0) as usize) + 1];
        if self.is_zero() {
            return Ok(vec![]);
        }
        for (m, c) in self.terms.iter() {
            out[m.degree_of(var) as usize] = c.clone();
        }
        Ok(out)
    }

    /// The single variable of a non-ground polynomial, when unique.
    pub fn only_var(&self) -> Option<VarName> {
        let vs = self.vars();
        if vs.len() == 1 {
            vs.into_iter().next()
        } else {
            None
        }
    }

    /// The largest monomial dividing every term, and the quotient by it.
    /// The identity monomial means there is nothing to strip.
    pub fn monomial_content(&self) -> (Monomial, Polynomial) {
        if self.is_zero() {
            return (Monomial::one(), Polynomial::zero());
        }
        let mut content: Option<BTreeMap<VarName, u32>> = None;
        for m in self.terms.keys() {
            let exps: BTreeMap<VarName, u32> =
                m.exponents().map(|(v, k)| (v.clone(), k)).collect();
            content = Some(match content {
                None => exps,
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(v, k)| {
                        let other = exps.get(&v).copied().unwrap_or(0);
                        let min = k.min(other);
                        (min > 0).then_some((v, min))
                    })
                    .collect(),
            });
        }
        let content = content.unwrap_or_default();
        if content.is_empty() {
            return (Monomial::one(), self.clone());
        }
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let mut exps: BTreeMap<VarName, u32> =
                m.exponents().map(|(v, k)| (v.clone(), k)).collect();
            for (v, k) in &content {
                let e = exps.get_mut(v).unwrap();
                *e -= k;
                if *e == 0 {
                    exps.remove(v);
                }
            }
            let degree = exps.values().sum();
            terms.insert(Monomial { degree, exps }, c.clone());
        }
        let degree = content.values().sum();
        (
            Monomial {
                degree,
                exps: content,
            },
            Polynomial::from_terms(terms),
        )
    }

    /// Scales to coprime integer coefficients, keeping the sign pattern,
    /// then flips so the highest monomial's coefficient is positive.
    /// Returns the canonical polynomial and whether the sign was flipped.
    /// Positive-rational scaling preserves both `p = 0` and `p > 0`.
    pub fn sign_canonical(&self) -> (Polynomial, bool) {
        if self.is_zero() {
            return (Polynomial::zero(), false);
        }
        let mut num_gcd = num::BigInt::zero();
        let mut den_lcm = num::BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num::Integer::lcm(&den_lcm, c.denom());
        }
        let factor = Rational::new(den_lcm, num_gcd);
        let scaled = self.scale(&factor.abs());
        let lead_negative = scaled
            .terms
            .iter()
            .next_back()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if lead_negative {
            (scaled.neg(), true)
        } else {
            (scaled, false)
        }
    }

    /// Exact division when the remainder is zero, in one variable.
    /// Used by the oracle for root bookkeeping; returns None on nonzero
    /// remainder or when the divisor is zero.
    pub fn exact_div_onevar(&self, divisor: &Polynomial, var: &str) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        let d_div = divisor.degree_in(var);
        let lead_div = divisor.leading_coeff_in(var);
        let lead_const = lead_div.as_constant()?;
        loop {
            let d_rem = rem.degree_in(var);
            if d_rem < d_div {
                break;
            }
            let lead_rem = rem.leading_coeff_in(var).as_constant()?;
            let c = lead_rem / lead_const.clone();
            let t = Polynomial::term(c, Monomial::var_pow(var, (d_rem - d_div) as u32));
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        if rem.is_zero() {
            Some(quot)
        } else {
            None
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            let negative = c.is_negative();
            let abs = c.abs();
            let rendered = if m.is_one() {
                rational_to_string(&abs)
            } else {
                let mono = m
                    .exponents()
                    .map(|(v, k)| {
                        if k == 1 {
                            v.clone()
                        } else {
                            format!("{v}^{k}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*");
                if abs.is_one() {
                    mono
                } else {
                    format!("{}*{}", rational_to_string(&abs), mono)
                }
            };
            if first {
                if negative {
                    write!(f, "-{rendered}")?;
                } else {
                    write!(f, "{rendered}")?;
                }
                first = false;
            } else if negative {
                write!(f, " - {rendered}")?;
            } else {
                write!(f, " + {rendered}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial read as `sum a_i * var^i` with `var`-free coefficients.
/// `coeffs` is empty exactly for the zero polynomial (degree -1), and the
/// top coefficient is nonzero otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateView {
    pub var: VarName,
    pub coeffs: Vec<Polynomial>,
}

impl UnivariateView {
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading_coeff(&self) -> Polynomial {
        self.coeffs.last().cloned().unwrap_or_else(Polynomial::zero)
    }

    /// Reassembles `sum a_i * var^i`; an exact inverse of `univariate`.
    pub fn assemble(&self) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let t = c.mul(&Polynomial::term(
                Rational::one(),
                Monomial::var_pow(&self.var, i as u32),
            ));
            acc = acc.add(&t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(rat(n))
    }

    #[test]
    fn add_cancels() {
        // x^2 - 2 + 2 = x^2
        let p = x().mul(&x()).sub(&c(2));
        assert_eq!(p.add(&c(2)), x().mul(&x()));
    }

    #[test]
    fn difference_of_squares() {
        let p = x().add(&c(1)).mul(&x().sub(&c(1)));
        assert_eq!(p, x().mul(&x()).sub(&c(1)));
    }

    #[test]
    fn scaling_is_linear() {
        // (x^2 + 3x) / 3 = x^2/3 + x
        let p = x().mul(&x()).add(&x().scale(&rat(3)));
        let scaled = p.scale(&ratio(1, 3));
        let expected = x().mul(&x()).scale(&ratio(1, 3)).add(&x());
        assert_eq!(scaled, expected);
    }

    #[test]
    fn eval_examples() {
        let p = x().mul(&x()).sub(&c(2));
        let mut a = BTreeMap::new();
        a.insert("x".to_string(), ratio(3, 2));
        assert_eq!(p.eval(&a).unwrap(), ratio(1, 4));

        assert_eq!(Polynomial::zero().eval(&BTreeMap::new()).unwrap(), rat(0));

        let q = Polynomial::var("x").mul(&Polynomial::var("y")).add(&c(1));
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), rat(2));
        b.insert("y".to_string(), rat(-1));
        assert_eq!(q.eval(&b).unwrap(), rat(-1));
    }

    #[test]
    fn eval_missing_variable() {
        let q = x().add(&Polynomial::var("y"));
        let mut a = BTreeMap::new();
        a.insert("x".to_string(), rat(1));
        assert_eq!(
            q.eval(&a),
            Err(PolyError::MissingVariable("y".to_string()))
        );
    }

    #[test]
    fn derivative_examples() {
        // (x^3 - 2x - 5)' = 3x^2 - 2
        let p = x().pow(3).sub(&x().scale(&rat(2))).sub(&c(5));
        assert_eq!(p.derivative("x"), x().pow(2).scale(&rat(3)).sub(&c(2)));

        assert_eq!(c(7).derivative("x"), Polynomial::zero());

        // (a x^2 + b x)' = 2 a x + b
        let a = Polynomial::var("a");
        let b = Polynomial::var("b");
        let p = a.mul(&x().pow(2)).add(&b.mul(&x()));
        assert_eq!(
            p.derivative("x"),
            a.scale(&rat(2)).mul(&x()).add(&b)
        );
    }

    #[test]
    fn degree_conventions() {
        assert_eq!(Polynomial::zero().degree_in("x"), -1);
        assert_eq!(c(4).degree_in("x"), 0);
        assert_eq!(x().pow(3).degree_in("x"), 3);
        assert_eq!(Polynomial::var("y").degree_in("x"), 0);
    }

    #[test]
    fn univariate_view_round_trips() {
        let a = Polynomial::var("a");
        let p = a.mul(&x().pow(2)).add(&x().scale(&rat(3))).sub(&c(1));
        let v = p.univariate("x");
        assert_eq!(v.degree(), 2);
        assert_eq!(v.leading_coeff(), a);
        assert_eq!(v.assemble(), p);

        let zero = Polynomial::zero().univariate("x");
        assert_eq!(zero.degree(), -1);
        assert_eq!(zero.assemble(), Polynomial::zero());
    }

    #[test]
    fn sign_canonical_merges_multiples() {
        let p = x().scale(&ratio(2, 3)).sub(&c(4).scale(&ratio(1, 3)));
        let q = x().scale(&rat(-1)).add(&c(2));
        let (kp, fp) = p.sign_canonical();
        let (kq, fq) = q.sign_canonical();
        assert_eq!(kp, kq);
        assert!(!fp);
        assert!(fq);
    }

    #[test]
    fn exact_division() {
        let p = x().pow(2).sub(&c(1));
        let d = x().sub(&c(1));
        assert_eq!(p.exact_div_onevar(&d, "x").unwrap(), x().add(&c(1)));
        assert!(x().pow(2).add(&c(1)).exact_div_onevar(&d, "x").is_none());
    }
}
