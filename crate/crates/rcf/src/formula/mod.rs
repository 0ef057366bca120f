//! First-order formulas over ordered-field atoms.
//!
//! Atoms come in exactly two kinds, `p = 0` and `p > 0`, with every surface
//! comparison moved to one side at parse time. Negation applied to an atom is
//! eliminated immediately through
//! `p != 0  <=>  p > 0 \/ -p > 0` and `!(q > 0)  <=>  q = 0 \/ -q > 0`;
//! a `Not` node can only wrap a composite formula.

mod parse;
mod print;

pub use parse::{parse, ParseError};

use std::collections::{BTreeMap, BTreeSet};

use num::Signed;

use crate::poly::{Polynomial, VarName};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    EqZero,
    GtZero,
}

/// A normalized atomic formula: `poly = 0` or `poly > 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    pub poly: Polynomial,
}

impl Atom {
    pub fn eq_zero(poly: Polynomial) -> Atom {
        Atom {
            kind: AtomKind::EqZero,
            poly,
        }
    }

    pub fn gt_zero(poly: Polynomial) -> Atom {
        Atom {
            kind: AtomKind::GtZero,
            poly,
        }
    }

    /// Ground truth value, when the polynomial is constant.
    pub fn ground_value(&self) -> Option<bool> {
        self.poly.as_constant().map(|c| match self.kind {
            AtomKind::EqZero => c == Rational::from_integer(0.into()),
            AtomKind::GtZero => c.is_positive(),
        })
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.poly.contains_var(var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(VarName, Box<Formula>),
    Forall(VarName, Box<Formula>),
}

impl Formula {
    /// Atom constructor that folds ground polynomials to `True`/`False`.
    pub fn atom(kind: AtomKind, poly: Polynomial) -> Formula {
        let a = Atom { kind, poly };
        match a.ground_value() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(a),
        }
    }

    pub fn eq_zero(poly: Polynomial) -> Formula {
        Formula::atom(AtomKind::EqZero, poly)
    }

    pub fn gt_zero(poly: Polynomial) -> Formula {
        Formula::atom(AtomKind::GtZero, poly)
    }

    /// Flattening conjunction with unit folding.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Flattening disjunction with unit folding.
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// Negation. Atoms absorb the sign immediately; composites keep a `Not`.
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => negate_atom(&a),
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        fn walk(f: &Formula, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(a) => {
                    for v in a.poly.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
                Formula::Not(x) => walk(x, bound, out),
                Formula::And(xs) | Formula::Or(xs) => {
                    for x in xs {
                        walk(x, bound, out);
                    }
                }
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_vars(&self) -> BTreeSet<VarName> {
        fn walk(f: &Formula, out: &mut BTreeSet<VarName>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(a) => out.extend(a.poly.vars()),
                Formula::Not(x) => walk(x, out),
                Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| walk(x, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    out.insert(v.clone());
                    walk(body, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(x) => x.is_quantifier_free(),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().all(|x| x.is_quantifier_free()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Number of AST nodes; the unit of the node budget.
    pub fn size(&self) -> u64 {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(x) => 1 + x.size(),
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(|x| x.size()).sum::<u64>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    /// Exact truth value of a ground formula; None when a variable remains.
    pub fn ground_eval(&self) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Atom(a) => a.ground_value(),
            Formula::Not(x) => x.ground_eval().map(|b| !b),
            Formula::And(xs) => {
                let mut acc = true;
                for x in xs {
                    acc &= x.ground_eval()?;
                }
                Some(acc)
            }
            Formula::Or(xs) => {
                let mut acc = false;
                for x in xs {
                    acc |= x.ground_eval()?;
                }
                Some(acc)
            }
            Formula::Implies(a, b) => Some(!a.ground_eval()? || b.ground_eval()?),
            Formula::Iff(a, b) => Some(a.ground_eval()? == b.ground_eval()?),
            Formula::Exists(..) | Formula::Forall(..) => None,
        }
    }
}

/// `!(p = 0)` and `!(q > 0)` rewritten as disjunctions of atoms.
pub fn negate_atom(a: &Atom) -> Formula {
    match a.kind {
        AtomKind::EqZero => Formula::or(vec![
            Formula::gt_zero(a.poly.clone()),
            Formula::gt_zero(a.poly.neg()),
        ]),
        AtomKind::GtZero => Formula::or(vec![
            Formula::eq_zero(a.poly.clone()),
            Formula::gt_zero(a.poly.neg()),
        ]),
    }
}

/// Degree measure of a formula in `var`: `deg p` for equalities,
/// `1 + deg q` for strict inequalities, maximum over atoms, and 0 for
/// anything free of `var`.
pub fn deg_measure(f: &Formula, var: &str) -> u32 {
    match f {
        Formula::True | Formula::False => 0,
        Formula::Atom(a) => {
            if !a.poly.contains_var(var) {
                0
            } else {
                let d = a.poly.degree_in(var) as u32;
                match a.kind {
                    AtomKind::EqZero => d,
                    AtomKind::GtZero => 1 + d,
                }
            }
        }
        Formula::Not(x) => deg_measure(x, var),
        Formula::And(xs) | Formula::Or(xs) => {
            xs.iter().map(|x| deg_measure(x, var)).max().unwrap_or(0)
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            deg_measure(a, var).max(deg_measure(b, var))
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => deg_measure(b, var),
    }
}

/// Capture-avoiding substitution of a polynomial for every free occurrence
/// of `var`. Binders that would capture a variable of the replacement are
/// renamed first.
pub fn substitute(f: &Formula, var: &str, replacement: &Polynomial) -> Formula {
    let clash: BTreeSet<VarName> = replacement.vars();
    subst_walk(f, var, replacement, &clash)
}

pub fn substitute_rational(f: &Formula, var: &str, value: &Rational) -> Formula {
    substitute(f, var, &Polynomial::constant(value.clone()))
}

/// Applies a whole assignment at once.
pub fn substitute_all(f: &Formula, assignment: &BTreeMap<VarName, Rational>) -> Formula {
    let mut out = f.clone();
    for (v, r) in assignment {
        out = substitute_rational(&out, v, r);
    }
    out
}

fn subst_walk(
    f: &Formula,
    var: &str,
    replacement: &Polynomial,
    clash: &BTreeSet<VarName>,
) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => Formula::atom(a.kind, a.poly.subst(var, replacement)),
        Formula::Not(x) => Formula::not(subst_walk(x, var, replacement, clash)),
        Formula::And(xs) => Formula::and(
            xs.iter()
                .map(|x| subst_walk(x, var, replacement, clash))
                .collect(),
        ),
        Formula::Or(xs) => Formula::or(
            xs.iter()
                .map(|x| subst_walk(x, var, replacement, clash))
                .collect(),
        ),
        Formula::Implies(a, b) => Formula::implies(
            subst_walk(a, var, replacement, clash),
            subst_walk(b, var, replacement, clash),
        ),
        Formula::Iff(a, b) => Formula::iff(
            subst_walk(a, var, replacement, clash),
            subst_walk(b, var, replacement, clash),
        ),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let is_exists = matches!(f, Formula::Exists(..));
            if v == var {
                // var is shadowed below this binder; nothing to substitute
                return f.clone();
            }
            let (v2, body2) = if clash.contains(v) {
                let taken: BTreeSet<VarName> = f
                    .all_vars()
                    .union(clash)
                    .cloned()
                    .collect();
                let fresh = fresh_name(v, &taken);
                let renamed = subst_walk(body, v, &Polynomial::var(&fresh), &BTreeSet::new());
                (fresh, renamed)
            } else {
                (v.clone(), (**body).clone())
            };
            let new_body = subst_walk(&body2, var, replacement, clash);
            if is_exists {
                Formula::exists(&v2, new_body)
            } else {
                Formula::forall(&v2, new_body)
            }
        }
    }
}

/// Appends primes until the name is unused.
pub fn fresh_name(base: &str, taken: &BTreeSet<VarName>) -> VarName {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Renames binders so that no two quantifiers bind the same name and no
/// bound name shadows a free one.
pub fn freshen(f: &Formula) -> Formula {
    let mut taken = f.free_vars();

    fn walk(f: &Formula, taken: &mut BTreeSet<VarName>) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Not(x) => Formula::not(walk(x, taken)),
            Formula::And(xs) => Formula::and(xs.iter().map(|x| walk(x, taken)).collect()),
            Formula::Or(xs) => Formula::or(xs.iter().map(|x| walk(x, taken)).collect()),
            Formula::Implies(a, b) => Formula::implies(walk(a, taken), walk(b, taken)),
            Formula::Iff(a, b) => Formula::iff(walk(a, taken), walk(b, taken)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let is_exists = matches!(f, Formula::Exists(..));
                let name = fresh_name(v, taken);
                taken.insert(name.clone());
                let body = if name == *v {
                    walk(body, taken)
                } else {
                    let renamed = substitute(body, v, &Polynomial::var(&name));
                    walk(&renamed, taken)
                };
                if is_exists {
                    Formula::exists(&name, body)
                } else {
                    Formula::forall(&name, body)
                }
            }
        }
    }

    walk(f, &mut taken)
}

/// Rewrites `->` and `<->` into and/or/not form.
pub fn desugar_conditionals(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(x) => Formula::not(desugar_conditionals(x)),
        Formula::And(xs) => Formula::and(xs.iter().map(desugar_conditionals).collect()),
        Formula::Or(xs) => Formula::or(xs.iter().map(desugar_conditionals).collect()),
        Formula::Implies(a, b) => {
            let a = desugar_conditionals(a);
            let b = desugar_conditionals(b);
            Formula::or(vec![Formula::not(a), b])
        }
        Formula::Iff(a, b) => {
            let a = desugar_conditionals(a);
            let b = desugar_conditionals(b);
            Formula::and(vec![
                Formula::or(vec![Formula::not(a.clone()), b.clone()]),
                Formula::or(vec![Formula::not(b), a]),
            ])
        }
        Formula::Exists(v, body) => Formula::exists(v, desugar_conditionals(body)),
        Formula::Forall(v, body) => Formula::forall(v, desugar_conditionals(body)),
    }
}

/// Pushes all negations into atoms. Input must be free of `->`/`<->`.
/// Quantifiers flip under negation; the result has no `Not` node at all.
pub fn push_negations(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Atom(a) => {
            if positive {
                f.clone()
            } else {
                negate_atom(a)
            }
        }
        Formula::Not(x) => push_negations(x, !positive),
        Formula::And(xs) => {
            let parts = xs.iter().map(|x| push_negations(x, positive)).collect();
            if positive {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Or(xs) => {
            let parts = xs.iter().map(|x| push_negations(x, positive)).collect();
            if positive {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Implies(a, b) => {
            let d = Formula::or(vec![Formula::not((**a).clone()), (**b).clone()]);
            push_negations(&d, positive)
        }
        Formula::Iff(a, b) => {
            let d = desugar_conditionals(f);
            let _ = (a, b);
            push_negations(&d, positive)
        }
        Formula::Exists(v, body) => {
            let inner = push_negations(body, positive);
            if positive {
                Formula::exists(v, inner)
            } else {
                Formula::forall(v, inner)
            }
        }
        Formula::Forall(v, body) => {
            let inner = push_negations(body, positive);
            if positive {
                Formula::forall(v, inner)
            } else {
                Formula::exists(v, inner)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(text: &str) -> Formula {
        parse(text).unwrap()
    }

    #[test]
    fn free_vars_and_measure() {
        let f = p("exists y. y*y = x");
        assert_eq!(
            f.free_vars().into_iter().collect::<Vec<_>>(),
            vec!["x".to_string()]
        );
        assert_eq!(deg_measure(&p("x*x - 2 = 0"), "x"), 2);
        assert_eq!(deg_measure(&p("2 - x*x > 0"), "x"), 3);
        assert_eq!(deg_measure(&p("a*y = 0"), "x"), 0);
    }

    #[test]
    fn substitution_ground() {
        let f = p("x*x - 2 > 0");
        let g = substitute_rational(&f, "x", &rat(2));
        assert_eq!(g, Formula::True);

        // matches the two-disjunct shape: 2 < 0 \/ 4 < 2, both ground false
        let phi = p("x < 0 \\/ x*x < 2");
        assert_eq!(substitute_rational(&phi, "x", &rat(2)), Formula::False);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = p("exists y. y > x");
        let g = substitute(&f, "x", &Polynomial::var("y"));
        match g {
            Formula::Exists(v, body) => {
                assert_eq!(v, "y'");
                let atom = match *body {
                    Formula::Atom(a) => a,
                    other => panic!("expected atom, got {other:?}"),
                };
                // y' - y > 0
                let expected = Polynomial::var("y'").sub(&Polynomial::var("y"));
                assert_eq!(atom.poly, expected);
            }
            other => panic!("expected exists, got {other:?}"),
        }
    }

    #[test]
    fn measure_stable_under_foreign_substitution() {
        let f = p("x*x*y - y > 0 /\\ x = 0");
        let before = deg_measure(&f, "x");
        let g = substitute(&f, "y", &Polynomial::var("z").add(&Polynomial::constant(rat(3))));
        assert!(deg_measure(&g, "x") <= before);
    }

    #[test]
    fn push_negations_removes_not() {
        let f = Formula::not(p("exists x. x > 0 /\\ x*x = 2"));
        let g = push_negations(&f, true);
        fn no_not(f: &Formula) -> bool {
            match f {
                Formula::Not(_) => false,
                Formula::And(xs) | Formula::Or(xs) => xs.iter().all(no_not),
                Formula::Exists(_, b) | Formula::Forall(_, b) => no_not(b),
                _ => true,
            }
        }
        assert!(no_not(&g));
        assert!(matches!(g, Formula::Forall(..)));
    }
}
