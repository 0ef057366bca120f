//! Degree-lowering rewrites for pairs of polynomial constraints, the
//! reciprocal change of variable, and the sign-preserving epsilon for
//! polynomial continuity.
//!
//! Both pseudo-reduction steps branch on a leading coefficient and always
//! emit the two guard branches, even when a guard is ground false; pruning
//! is a later simplification concern.

use num::{One, Signed, Zero};

use crate::formula::{Atom, Formula};
use crate::poly::{Monomial, PolyError, Polynomial, UnivariateView};
use crate::rational::{binomial, Rational};

/// A guarded disjunction of constraint conjunctions. Guards mention only the
/// coefficient parameters and are mutually exclusive and jointly exhaustive.
#[derive(Debug, Clone)]
pub struct CaseSplit {
    pub branches: Vec<(Formula, Vec<Atom>)>,
}

fn var_pow(var: &str, k: u32) -> Polynomial {
    Polynomial::term(Rational::one(), Monomial::var_pow(var, k))
}

/// Nonzero guard `c > 0 \/ -c > 0`.
fn nonzero_guard(c: &Polynomial) -> Formula {
    Formula::or(vec![
        Formula::gt_zero(c.clone()),
        Formula::gt_zero(c.neg()),
    ])
}

/// Reduces a pair of equations `p = 0 /\ q = 0` with `deg p >= deg q`.
///
/// With `p = a x^d + ...` and `q = b x^e + ...`, sets `r = q - b x^e` and
/// `s = b p - a x^(d-e) q`, giving
/// `[b = 0 /\ p = 0 /\ r = 0]  \/  [b != 0 /\ s = 0 /\ q = 0]`.
/// Neither branch raises the larger of the two equation degrees, and
/// iterating leaves at most one equation.
pub fn pseudo_step_eq_eq(
    p: &UnivariateView,
    q: &UnivariateView,
) -> Result<CaseSplit, PolyError> {
    let d = p.degree();
    let e = q.degree();
    if d < e {
        return Err(PolyError::DegreeOrder { d, e });
    }
    let var = &p.var;
    let alpha = p.leading_coeff();
    let beta = q.leading_coeff();
    let p_poly = p.assemble();
    let q_poly = q.assemble();

    let r = q_poly.sub(&beta.mul(&var_pow(var, e.max(0) as u32)));
    let s = beta
        .mul(&p_poly)
        .sub(&alpha.mul(&var_pow(var, (d - e).max(0) as u32)).mul(&q_poly));

    Ok(CaseSplit {
        branches: vec![
            (
                Formula::eq_zero(beta.clone()),
                vec![Atom::eq_zero(p_poly), Atom::eq_zero(r)],
            ),
            (
                nonzero_guard(&beta),
                vec![Atom::eq_zero(s), Atom::eq_zero(q_poly)],
            ),
        ],
    })
}

/// Reduces `p = 0 /\ q1 > 0` with `deg q1 >= deg p`.
///
/// With `p = a x^d + ...` and `q1 = b x^e + ...`, sets `r = p - a x^d` and
/// `s = a^2 q1 - a b x^(e-d) p`, giving
/// `[a = 0 /\ r = 0 /\ q1 > 0]  \/  [a != 0 /\ p = 0 /\ s > 0]`.
/// Iterating drives every inequality degree below the equation degree or
/// removes the equation.
pub fn pseudo_step_eq_ineq(
    p: &UnivariateView,
    q1: &UnivariateView,
) -> Result<CaseSplit, PolyError> {
    let d = p.degree();
    let e = q1.degree();
    if e < d {
        return Err(PolyError::DegreeOrder { d: e, e: d });
    }
    let var = &p.var;
    let alpha = p.leading_coeff();
    let beta = q1.leading_coeff();
    let p_poly = p.assemble();
    let q_poly = q1.assemble();

    let r = p_poly.sub(&alpha.mul(&var_pow(var, d.max(0) as u32)));
    let s = alpha.mul(&alpha).mul(&q_poly).sub(
        &alpha
            .mul(&beta)
            .mul(&var_pow(var, (e - d).max(0) as u32))
            .mul(&p_poly),
    );

    Ok(CaseSplit {
        branches: vec![
            (
                Formula::eq_zero(alpha.clone()),
                vec![Atom::eq_zero(r), Atom::gt_zero(q_poly)],
            ),
            (
                nonzero_guard(&alpha),
                vec![Atom::eq_zero(p_poly), Atom::gt_zero(s)],
            ),
        ],
    })
}

/// Which reciprocal is being substituted for the original variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReciprocalDirection {
    /// `x = 1/y`, for the region `x > 1` mapped onto `0 < y < 1`.
    Pos,
    /// `x = -1/y`, for the region `x < -1` mapped onto `0 < y < 1`.
    Neg,
}

/// Rewrites an atom in `var` into an equivalent atom in `target` under the
/// substitution `var = 1/target` (or `-1/target`), valid for `target > 0`.
///
/// Multiplying through by `target^deg` reverses the coefficient list:
/// `sum a_i var^i ~ 0` becomes `sum a_(m-j) target^j ~ 0`, with signs
/// alternating in the `Neg` direction. `var`-free atoms are unchanged.
pub fn reciprocal_transform(
    atom: &Atom,
    var: &str,
    target: &str,
    direction: ReciprocalDirection,
) -> Atom {
    let view = atom.poly.univariate(var);
    let m = view.degree();
    if m <= 0 {
        // constant in var (possibly with parameters): nothing to reverse
        return Atom {
            kind: atom.kind,
            poly: atom.poly.clone(),
        };
    }
    let m = m as u32;
    let mut acc = Polynomial::zero();
    for j in 0..=m {
        let coeff = &view.coeffs[(m - j) as usize];
        let mut term = coeff.mul(&var_pow(target, j));
        if direction == ReciprocalDirection::Neg && (m - j) % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term);
    }
    Atom {
        kind: atom.kind,
        poly: acc,
    }
}

/// A radius within which a one-variable polynomial keeps the sign it has at
/// `w`: returns `eps` with `0 < eps <= 1` and `eps * B < |q(w)| / 2` for
/// `B = A * sum_(k<=m) sum_(i<k) C(k,i) A^i` and
/// `A = 1 + max(|w|, max_k |a_k|)`. Constant polynomials get `eps = 1`.
pub fn continuity_epsilon(q: &Polynomial, var: &str, w: &Rational) -> Result<Rational, PolyError> {
    let coeffs = q.dense_coeffs(var)?;
    let value = q.subst_rational(var, w).as_constant().expect("ground");
    if value.is_zero() {
        return Err(PolyError::ZeroAtPoint);
    }
    let m = coeffs.len().saturating_sub(1);
    if m == 0 {
        return Ok(Rational::one());
    }
    let mut bound = w.abs();
    for c in &coeffs {
        bound = bound.max(c.abs());
    }
    let a = Rational::one() + bound;
    let mut b = Rational::zero();
    for k in 0..=m as u32 {
        for i in 0..k {
            let mut t = binomial(k, i);
            for _ in 0..i {
                t *= a.clone();
            }
            b += t;
        }
    }
    b *= a;
    // b >= a > 0 whenever m >= 1
    let candidate = value.abs() / (Rational::from_integer(2.into()) * b);
    let eps = candidate.min(Rational::one()) / Rational::from_integer(2.into());
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use std::collections::BTreeMap;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(rat(n))
    }

    fn assign(x_val: Rational) -> BTreeMap<String, Rational> {
        let mut a = BTreeMap::new();
        a.insert("x".to_string(), x_val);
        a
    }

    #[test]
    fn eq_eq_example() {
        // p = x^2 - 2, q = x - 1: the live branch carries s = x - 2
        let p = x().pow(2).sub(&c(2)).univariate("x");
        let q = x().sub(&c(1)).univariate("x");
        let split = pseudo_step_eq_eq(&p, &q).unwrap();
        assert_eq!(split.branches.len(), 2);
        let (guard0, _) = &split.branches[0];
        assert_eq!(*guard0, Formula::False); // 1 = 0
        let (_, body1) = &split.branches[1];
        assert_eq!(body1[0], Atom::eq_zero(x().sub(&c(2))));
        assert_eq!(body1[1], Atom::eq_zero(x().sub(&c(1))));

        // equivalence at sample points
        for n in -2..=2 {
            let a = assign(rat(n));
            let orig = p.assemble().eval(&a).unwrap().is_zero()
                && q.assemble().eval(&a).unwrap().is_zero();
            let branch = body1[0].poly.eval(&a).unwrap().is_zero()
                && body1[1].poly.eval(&a).unwrap().is_zero();
            assert_eq!(orig, branch);
        }
    }

    #[test]
    fn eq_eq_common_root_preserved() {
        let p = x().pow(2).sub(&c(1)).univariate("x");
        let q = x().sub(&c(1)).univariate("x");
        let split = pseudo_step_eq_eq(&p, &q).unwrap();
        let (_, body) = &split.branches[1];
        // s = x - 1, so both conjuncts hold at x = 1
        let a = assign(rat(1));
        assert!(body[0].poly.eval(&a).unwrap().is_zero());
        assert!(body[1].poly.eval(&a).unwrap().is_zero());
    }

    #[test]
    fn eq_eq_identical_inputs_cancel() {
        let p = Polynomial::var("a").mul(&x()).add(&Polynomial::var("b"));
        let v = p.univariate("x");
        let split = pseudo_step_eq_eq(&v, &v).unwrap();
        let (_, body) = &split.branches[1];
        assert!(body[0].poly.is_zero()); // s = 0
    }

    #[test]
    fn eq_eq_degree_order_enforced() {
        let p = x().sub(&c(1)).univariate("x");
        let q = x().pow(2).univariate("x");
        assert!(matches!(
            pseudo_step_eq_eq(&p, &q),
            Err(PolyError::DegreeOrder { .. })
        ));
    }

    #[test]
    fn eq_ineq_example() {
        // p = x - 1, q1 = x^2: live branch s = x
        let p = x().sub(&c(1)).univariate("x");
        let q1 = x().pow(2).univariate("x");
        let split = pseudo_step_eq_ineq(&p, &q1).unwrap();
        let (_, body) = &split.branches[1];
        assert_eq!(body[0], Atom::eq_zero(x().sub(&c(1))));
        assert_eq!(body[1], Atom::gt_zero(x()));
        for r in [rat(-1), ratio(1, 2), rat(1), rat(2)] {
            let a = assign(r);
            let orig = p.assemble().eval(&a).unwrap().is_zero()
                && q1.assemble().eval(&a).unwrap() > rat(0);
            let branch = body[0].poly.eval(&a).unwrap().is_zero()
                && body[1].poly.eval(&a).unwrap() > rat(0);
            assert_eq!(orig, branch);
        }
    }

    #[test]
    fn eq_ineq_degenerates_to_false() {
        // p = x, q1 = x^2: s = 0, so the live branch body is x = 0 /\ 0 > 0
        let p = x().univariate("x");
        let q1 = x().pow(2).univariate("x");
        let split = pseudo_step_eq_ineq(&p, &q1).unwrap();
        let (_, body) = &split.branches[1];
        assert!(body[1].poly.is_zero());
        assert_eq!(body[1].ground_value(), Some(false));
    }

    #[test]
    fn eq_ineq_symbolic_guards() {
        let p = Polynomial::var("a").mul(&x()).add(&c(1)).univariate("x");
        let q1 = x().pow(2).univariate("x");
        let split = pseudo_step_eq_ineq(&p, &q1).unwrap();
        let (g0, _) = &split.branches[0];
        let (g1, _) = &split.branches[1];
        assert_eq!(*g0, Formula::eq_zero(Polynomial::var("a")));
        assert_eq!(
            *g1,
            Formula::or(vec![
                Formula::gt_zero(Polynomial::var("a")),
                Formula::gt_zero(Polynomial::var("a").neg())
            ])
        );
    }

    #[test]
    fn reciprocal_quadratic_roots_map() {
        // 2x^2 + 3x + 1 = 0 has roots -1, -1/2; the reversed y^2 + 3y + 2
        // has their reciprocals -1, -2
        let atom = Atom::eq_zero(x().pow(2).scale(&rat(2)).add(&x().scale(&rat(3))).add(&c(1)));
        let t = reciprocal_transform(&atom, "x", "y", ReciprocalDirection::Pos);
        let expected = Polynomial::var("y")
            .pow(2)
            .add(&Polynomial::var("y").scale(&rat(3)))
            .add(&c(2));
        assert_eq!(t.poly, expected);
    }

    #[test]
    fn reciprocal_linear_inequality() {
        let atom = Atom::gt_zero(x().sub(&c(2)));
        let t = reciprocal_transform(&atom, "x", "y", ReciprocalDirection::Pos);
        assert_eq!(t.poly, c(1).sub(&Polynomial::var("y").scale(&rat(2))));
        // for y in (0,1): 1 - 2y > 0 iff 1/y > 2
        for (num, den) in [(1i64, 4i64), (1, 3), (1, 2), (2, 3)] {
            let y = ratio(num, den);
            let lhs = t.poly.subst_rational("y", &y).as_constant().unwrap() > rat(0);
            let rhs = y.recip() > rat(2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn reciprocal_negative_direction() {
        // x + 3 = 0 under x = -1/y becomes 3y - 1 = 0 (root y = 1/3, x = -3)
        let atom = Atom::eq_zero(x().add(&c(3)));
        let t = reciprocal_transform(&atom, "x", "y", ReciprocalDirection::Neg);
        assert_eq!(t.poly, Polynomial::var("y").scale(&rat(3)).sub(&c(1)));
    }

    #[test]
    fn reciprocal_constant_atom_unchanged() {
        let atom = Atom::gt_zero(c(1));
        let t = reciprocal_transform(&atom, "x", "y", ReciprocalDirection::Pos);
        assert_eq!(t.poly, c(1));
    }

    #[test]
    fn continuity_eps_bounds() {
        let q = x().pow(2).sub(&c(2));
        let eps = continuity_epsilon(&q, "x", &rat(0)).unwrap();
        assert!(eps > rat(0) && eps <= rat(1));
        // recompute the certificate by hand
        let a = rat(1) + rat(2); // 1 + max(|0|, 2)
        let b = a.clone()
            * (binomial(1, 0)
                + binomial(2, 0)
                + binomial(2, 1) * a.clone());
        assert!(eps.clone() * b < ratio(1, 2) * rat(2));
    }

    #[test]
    fn continuity_eps_constant() {
        assert_eq!(continuity_epsilon(&c(5), "x", &rat(100)).unwrap(), rat(1));
    }

    #[test]
    fn continuity_eps_rejects_roots() {
        let q = x();
        assert_eq!(
            continuity_epsilon(&q, "x", &rat(0)),
            Err(PolyError::ZeroAtPoint)
        );
        let eps = continuity_epsilon(&q, "x", &ratio(1, 2)).unwrap();
        assert!(eps < ratio(1, 2));
    }
}
