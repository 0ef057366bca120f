//! Quantifier elimination for ordered-field formulas.
//!
//! The pipeline mirrors the classical reduction: rewrite conditionals, push
//! negations into atoms, pull quantifiers into a prenex prefix, and
//! eliminate innermost-first. An existential over a conjunction of atoms is
//! split five ways over `x < -1`, `x = -1`, `-1 < x < 1`, `x = 1`, `x > 1`,
//! with the unbounded parts mapped onto `0 < y < 1` by reciprocal
//! substitution. Bounded existentials are eliminated by induction on the
//! degree measure, with pseudo-reduction case splits handling parametric
//! leading coefficients.
//!
//! Elimination is worst-case non-elementary, so every engine carries an
//! explicit node and wall-clock budget and fails with a typed error instead
//! of hanging.

mod clauses;
mod engine;

use std::collections::HashMap;
use std::time::Instant;

use thiserror::Error;

use crate::formula::{
    desugar_conditionals, freshen, push_negations, Atom, AtomKind, Formula,
};
use crate::poly::{Polynomial, VarName};

pub(crate) use clauses::{clause_formula, clauses_formula, dnf, negate_nf, simplify};
pub use engine::dump_stats;

/// Public wrapper for tests and probes.
pub fn negate_nf_pub(f: &Formula) -> Formula {
    negate_nf(f)
}
use engine::{Bound, MemoEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QeError {
    #[error("resource budget exceeded after {nodes} nodes, {millis} ms")]
    Budget { nodes: u64, millis: u64 },
    #[error("expected a conjunction of atoms")]
    NonConjunctiveBody,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl QeError {
    pub(crate) fn budget_nodes() -> QeError {
        QeError::Budget {
            nodes: 0,
            millis: 0,
        }
    }
}

/// Explicit resource limits for one elimination run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_seconds: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 1_000_000,
            max_seconds: 30,
        }
    }
}

/// Elimination engine with memoized interval tasks and budget accounting.
pub struct Engine {
    budget: Budget,
    started: Instant,
    nodes: u64,
    fresh: u64,
    memo: HashMap<engine::MemoKey, MemoEntry>,
    windows: HashMap<engine::MemoKey, engine::WindowEntry>,
}

impl Engine {
    pub fn new(budget: Budget) -> Engine {
        Engine {
            budget,
            started: Instant::now(),
            nodes: 0,
            fresh: 0,
            memo: HashMap::new(),
            windows: HashMap::new(),
        }
    }

    /// Nodes produced so far; reported by the CLI.
    pub fn nodes_used(&self) -> u64 {
        self.nodes
    }

    pub(crate) fn fresh_var(&mut self, prefix: &str) -> VarName {
        self.fresh += 1;
        format!("${prefix}{}", self.fresh)
    }

    pub(crate) fn check_budget(&mut self, extra_nodes: u64) -> Result<(), QeError> {
        self.nodes = self.nodes.saturating_add(extra_nodes);
        let millis = self.started.elapsed().as_millis() as u64;
        if self.nodes > self.budget.max_nodes || millis > self.budget.max_seconds * 1000 {
            return Err(QeError::Budget {
                nodes: self.nodes,
                millis,
            });
        }
        Ok(())
    }

    /// Eliminates every quantifier, returning an equivalent quantifier-free
    /// formula over the same free variables.
    pub fn qe_full(&mut self, f: &Formula) -> Result<Formula, QeError> {
        let f = desugar_conditionals(f);
        let f = expand_poly_identities(&f);
        let f = push_negations(&f, true);
        let f = freshen(&f);
        let (prefix, matrix) = prenex_split(&f);
        let mut body = simplify(&matrix);
        for (is_exists, var) in prefix.iter().rev() {
            self.check_budget(body.size())?;
            body = if *is_exists {
                self.eliminate_one(var, &body)?
            } else {
                let inner = self.eliminate_one(var, &negate_nf(&body))?;
                simplify(&negate_nf(&inner))
            };
        }
        Ok(simplify(&body))
    }

    /// Eliminates one existential over a quantifier-free body.
    pub fn eliminate_one(&mut self, var: &str, qf: &Formula) -> Result<Formula, QeError> {
        let qf = push_negations(&desugar_conditionals(qf), true);
        let clauses = dnf(&qf, engine::CLAUSE_CAP)?;
        let mut out = Vec::new();
        for clause in clauses {
            let (with_var, rest): (Vec<Atom>, Vec<Atom>) =
                clause.into_iter().partition(|a| a.contains_var(var));
            let rest_f = clause_formula(rest);
            if with_var.is_empty() {
                out.push(rest_f);
            } else {
                let split = self.split_unbounded_atoms(var, &with_var)?;
                out.push(Formula::and(vec![rest_f, split]));
            }
        }
        let result = simplify(&Formula::or(out));
        self.check_budget(result.size())?;
        Ok(result)
    }

    /// Five-way split of `exists var. conjunction` into two reciprocal
    /// tasks over `]0,1[`, the two endpoint instantiations at -1 and 1,
    /// and the direct task over `]-1,1[`.
    pub fn split_unbounded(&mut self, var: &str, conjunction: &Formula) -> Result<Formula, QeError> {
        let atoms = conjunction_atoms(conjunction)?;
        let (with_var, rest): (Vec<Atom>, Vec<Atom>) =
            atoms.into_iter().partition(|a| a.contains_var(var));
        let rest_f = clause_formula(rest);
        if with_var.is_empty() {
            return Ok(simplify(&rest_f));
        }
        let split = self.split_unbounded_atoms(var, &with_var)?;
        Ok(simplify(&Formula::and(vec![rest_f, split])))
    }

    /// Prenex form with the matrix in disjunctive normal form.
    pub fn to_prenex_dnf_matrix(&mut self, f: &Formula) -> Result<Formula, QeError> {
        let g = push_negations(&desugar_conditionals(f), true);
        let g = freshen(&g);
        let (prefix, matrix) = prenex_split(&g);
        let clauses = dnf(&simplify(&matrix), engine::CLAUSE_CAP)?;
        let mut out = clauses_formula(clauses);
        for (is_exists, var) in prefix.iter().rev() {
            out = if *is_exists {
                Formula::exists(var, out)
            } else {
                Formula::forall(var, out)
            };
        }
        self.check_budget(out.size())?;
        Ok(out)
    }

    /// Rows for a bounded existential task, per the induction contract:
    /// the task is equivalent, assuming `lower < upper`, to the disjunction
    /// over rows of `phi(lower) /\ psi(upper)`.
    pub fn eliminate_bounded(
        &mut self,
        task: &BoundedExistsTask,
    ) -> Result<Vec<BoundPairRow>, QeError> {
        let atoms: Vec<Atom> = task
            .eqs
            .iter()
            .map(|p| Atom::eq_zero(p.clone()))
            .chain(task.ineqs.iter().map(|q| Atom::gt_zero(q.clone())))
            .collect();
        let f = self.elim_interval(
            &task.var,
            atoms,
            &Bound::Var(task.lower.clone()),
            &Bound::Var(task.upper.clone()),
            None,
        )?;
        let clauses = dnf(&simplify(&f), engine::CLAUSE_CAP)?;
        let mut rows = Vec::new();
        for clause in clauses {
            let mut phi = Vec::new();
            let mut psi = Vec::new();
            for atom in clause {
                let has_lo = atom.contains_var(&task.lower);
                let has_hi = atom.contains_var(&task.upper);
                if has_lo && has_hi {
                    return Err(QeError::Internal(
                        "row atom mentions both endpoints".to_string(),
                    ));
                }
                if has_hi {
                    psi.push(atom);
                } else {
                    // parameter-only atoms ride in the lower slot
                    phi.push(atom);
                }
            }
            rows.push(BoundPairRow {
                phi: clause_formula(phi),
                psi: clause_formula(psi),
            });
        }
        Ok(rows)
    }
}

/// A bounded existential `exists var in ]lower, upper[ : /\ eqs = 0 /\ ineqs > 0`.
/// The endpoint symbols must not occur in the constraint polynomials.
#[derive(Debug, Clone)]
pub struct BoundedExistsTask {
    pub var: VarName,
    pub lower: VarName,
    pub upper: VarName,
    pub eqs: Vec<Polynomial>,
    pub ineqs: Vec<Polynomial>,
}

impl BoundedExistsTask {
    /// Builds a task from a conjunction of atoms; anything else is rejected.
    pub fn from_formula(
        var: &str,
        lower: &str,
        upper: &str,
        body: &Formula,
    ) -> Result<BoundedExistsTask, QeError> {
        let atoms = conjunction_atoms(body)?;
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for a in atoms {
            match a.kind {
                AtomKind::EqZero => eqs.push(a.poly),
                AtomKind::GtZero => ineqs.push(a.poly),
            }
        }
        Ok(BoundedExistsTask {
            var: var.to_string(),
            lower: lower.to_string(),
            upper: upper.to_string(),
            eqs,
            ineqs,
        })
    }

    /// Degree measure of the task body in its variable.
    pub fn measure(&self) -> u32 {
        let eq = self
            .eqs
            .iter()
            .map(|p| p.degree_in(&self.var).max(0) as u32)
            .max()
            .unwrap_or(0);
        let ineq = self
            .ineqs
            .iter()
            .map(|q| {
                if q.contains_var(&self.var) {
                    1 + q.degree_in(&self.var) as u32
                } else {
                    0
                }
            })
            .max()
            .unwrap_or(0);
        eq.max(ineq)
    }
}

/// One row of the endpoint decomposition: `phi` speaks only about the lower
/// endpoint (and parameters), `psi` only about the upper endpoint.
#[derive(Debug, Clone)]
pub struct BoundPairRow {
    pub phi: Formula,
    pub psi: Formula,
}

fn conjunction_atoms(f: &Formula) -> Result<Vec<Atom>, QeError> {
    match f {
        Formula::True => Ok(vec![]),
        Formula::Atom(a) => Ok(vec![a.clone()]),
        Formula::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(conjunction_atoms(x)?);
            }
            Ok(out)
        }
        _ => Err(QeError::NonConjunctiveBody),
    }
}

/// Prefix (outermost first) and quantifier-free matrix of a formula already
/// free of conditionals and negations.
fn prenex_split(f: &Formula) -> (Vec<(bool, VarName)>, Formula) {
    match f {
        Formula::Exists(v, body) => {
            let (mut prefix, matrix) = prenex_split(body);
            prefix.insert(0, (true, v.clone()));
            (prefix, matrix)
        }
        Formula::Forall(v, body) => {
            let (mut prefix, matrix) = prenex_split(body);
            prefix.insert(0, (false, v.clone()));
            (prefix, matrix)
        }
        Formula::And(xs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::new();
            for x in xs {
                let (p, m) = prenex_split(x);
                prefix.extend(p);
                parts.push(m);
            }
            (prefix, Formula::and(parts))
        }
        Formula::Or(xs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::new();
            for x in xs {
                let (p, m) = prenex_split(x);
                prefix.extend(p);
                parts.push(m);
            }
            (prefix, Formula::or(parts))
        }
        other => (Vec::new(), other.clone()),
    }
}

/// `forall v. p(v) = 0` is equivalent, over any ordered field, to every
/// coefficient of `v` in `p` being zero. Errors when the shape is anything
/// else; see [`expand_poly_identities`] for the best-effort rewriting pass.
pub fn poly_identity_expand(f: &Formula) -> Result<Formula, QeError> {
    match f {
        Formula::Forall(v, body) => match &**body {
            Formula::Atom(a) if a.kind == AtomKind::EqZero => {
                let view = a.poly.univariate(v);
                Ok(Formula::and(
                    view.coeffs.into_iter().map(Formula::eq_zero).collect(),
                ))
            }
            Formula::True => Ok(Formula::True),
            Formula::False => Ok(Formula::False),
            other => Err(QeError::ShapeMismatch(format!(
                "body is not a single equality: {other}"
            ))),
        },
        other => Err(QeError::ShapeMismatch(format!(
            "not a universally quantified equality: {other}"
        ))),
    }
}

/// Rewrites every `forall v. p(v) = 0` subformula into its coefficient
/// conjunction, leaving everything else alone.
pub fn expand_poly_identities(f: &Formula) -> Formula {
    if let Ok(expanded) = poly_identity_expand(f) {
        return expanded;
    }
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(x) => Formula::not(expand_poly_identities(x)),
        Formula::And(xs) => Formula::and(xs.iter().map(expand_poly_identities).collect()),
        Formula::Or(xs) => Formula::or(xs.iter().map(expand_poly_identities).collect()),
        Formula::Implies(a, b) => {
            Formula::implies(expand_poly_identities(a), expand_poly_identities(b))
        }
        Formula::Iff(a, b) => Formula::iff(expand_poly_identities(a), expand_poly_identities(b)),
        Formula::Exists(v, b) => Formula::exists(v, expand_poly_identities(b)),
        Formula::Forall(v, b) => Formula::forall(v, expand_poly_identities(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::poly::Polynomial;
    use crate::rational::rat;

    #[test]
    fn poly_identity_examples() {
        // forall x. (b-1)x + c = 0  =>  b-1 = 0 /\ c = 0
        let f = parse("forall x. (b - 1)*x + c = 0").unwrap();
        let g = poly_identity_expand(&f).unwrap();
        let expected = Formula::and(vec![
            Formula::eq_zero(Polynomial::var("c")),
            Formula::eq_zero(Polynomial::var("b").sub(&Polynomial::constant(rat(1)))),
        ]);
        assert_eq!(simplify(&g), simplify(&expected));

        let t = parse("forall x. 0 = 0").unwrap();
        assert_eq!(poly_identity_expand(&t).unwrap(), Formula::True);

        let bad = parse("forall x. x > 0").unwrap();
        assert!(poly_identity_expand(&bad).is_err());
    }

    #[test]
    fn quartic_identity_has_five_coefficient_equations() {
        let f = parse(
            "forall x. x^4 + 1 - (x^2 + b0*x + c0)*(x^2 + b1*x + c1) = 0",
        )
        .unwrap();
        let g = poly_identity_expand(&f).unwrap();
        // the x^4 coefficient cancels to 0 = 0, leaving the equations for
        // the constant through cubic coefficients
        match &g {
            Formula::And(parts) => assert_eq!(parts.len(), 4),
            other => panic!("expected conjunction, got {other}"),
        }
        // the real factorization needs b0 = -b1 = sqrt 2, c0 = c1 = 1,
        // so a rational guess for b0 must violate some coefficient equation
        let subst = [
            ("b0", rat(2)),
            ("b1", rat(-2)),
            ("c0", rat(1)),
            ("c1", rat(1)),
        ];
        let mut inst = g.clone();
        for (v, r) in &subst {
            inst = crate::formula::substitute_rational(&inst, v, r);
        }
        // b0 = 2 is not sqrt 2, so some equation fails
        assert_eq!(inst.ground_eval(), Some(false));
    }

    #[test]
    fn prenex_pulls_in_order() {
        let mut eng = Engine::new(Budget::default());
        let f = parse("(exists x. x > a) /\\ (forall y. y*y >= 0)").unwrap();
        let p = eng.to_prenex_dnf_matrix(&f).unwrap();
        match p {
            Formula::Exists(_, inner) => assert!(matches!(*inner, Formula::Forall(..))),
            other => panic!("expected exists at the root, got {other}"),
        }
    }
}
