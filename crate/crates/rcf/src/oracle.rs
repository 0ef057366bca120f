//! Independent ground truth for one-variable sentences.
//!
//! Roots are counted with Sturm sequences and isolated by bisection from a
//! Cauchy bound, all in exact rational arithmetic. Truth of a one-quantifier
//! sentence is decided by evaluating its matrix at a sign-invariant set of
//! sample points: every root of every atom polynomial, a rational point
//! between consecutive roots, and points beyond the extreme roots. Signs at
//! algebraic sample points come from interval refinement, never from numeric
//! approximation of the root.
//!
//! This module deliberately shares nothing with the elimination engine
//! beyond the polynomial and formula layers.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{substitute_rational, AtomKind, Formula};
use crate::poly::{Polynomial, VarName};
use crate::rational::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("the zero polynomial has no root count")]
    ZeroPolynomial,
    #[error("unsupported sentence shape: {0}")]
    UnsupportedShape(String),
}

/// The signed-remainder chain `p, p', -rem(p, p'), ...` down to a constant.
/// Sign-variation differences count distinct real roots.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    pub polys: Vec<Polynomial>,
    var: VarName,
}

// Dense one-variable arithmetic; coefficient index = power.
fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn dense_derivative(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(c * Rational::from_integer(i.into()));
    }
    trim(out)
}

/// Remainder of dense polynomial division over the rationals.
fn dense_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    assert!(!b.is_empty());
    let mut rem: Vec<Rational> = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while rem.len() > db && !rem.is_empty() {
        let dr = rem.len() - 1;
        if dr < db {
            break;
        }
        let factor = rem[dr].clone() / lead.clone();
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            let idx = i + shift;
            let delta = factor.clone() * bc.clone();
            rem[idx] -= delta;
        }
        rem = trim(rem);
    }
    rem
}

fn dense_eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

fn dense_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut f = trim(a.to_vec());
    let mut g = trim(b.to_vec());
    while !g.is_empty() {
        let r = dense_rem(&f, &g);
        f = g;
        g = r;
    }
    // monic normalization for a canonical representative
    if let Some(lead) = f.last().cloned() {
        for c in f.iter_mut() {
            *c /= lead.clone();
        }
    }
    f
}

fn dense_to_poly(p: &[Rational], var: &str) -> Polynomial {
    let mut acc = Polynomial::zero();
    for (i, c) in p.iter().enumerate() {
        acc = acc.add(&Polynomial::var(var).pow(i as u32).scale(c));
    }
    acc
}

fn poly_to_dense(p: &Polynomial, var: &str) -> Result<Vec<Rational>, OracleError> {
    p.dense_coeffs(var)
        .map(trim)
        .map_err(|e| OracleError::UnsupportedShape(e.to_string()))
}

impl SturmSequence {
    /// Builds the chain for a nonzero one-variable polynomial.
    pub fn new(p: &Polynomial, var: &str) -> Result<SturmSequence, OracleError> {
        let dense = poly_to_dense(p, var)?;
        if dense.is_empty() {
            return Err(OracleError::ZeroPolynomial);
        }
        let mut chain = vec![dense.clone()];
        let d1 = dense_derivative(&dense);
        if !d1.is_empty() {
            chain.push(d1);
            loop {
                let n = chain.len();
                let r = dense_rem(&chain[n - 2], &chain[n - 1]);
                if r.is_empty() {
                    break;
                }
                chain.push(r.iter().map(|c| -c.clone()).collect());
            }
        }
        Ok(SturmSequence {
            polys: chain.iter().map(|c| dense_to_poly(c, var)).collect(),
            var: var.to_string(),
        })
    }

    fn variations_at(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last: i32 = 0;
        for p in &self.polys {
            let dense = p.dense_coeffs(&self.var).expect("one variable");
            let v = dense_eval(&dense, x);
            let s = crate::rational::sign(&v);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

/// Exact number of distinct real roots of `p` in the half-open interval
/// `]lo, hi]`. Roots sitting on an endpoint are handled by exact division
/// rather than by perturbing the endpoint.
pub fn sturm_count(
    p: &Polynomial,
    var: &str,
    lo: &Rational,
    hi: &Rational,
) -> Result<usize, OracleError> {
    let dense = poly_to_dense(p, var)?;
    if dense.is_empty() {
        return Err(OracleError::ZeroPolynomial);
    }
    assert!(lo < hi, "sturm_count needs lo < hi");
    if dense.len() == 1 {
        return Ok(0);
    }
    let mut q = p.clone();
    let mut extra = 0usize;
    // divide out roots at the endpoints; the right endpoint is included
    // in the interval, the left is not
    loop {
        let v = q.subst_rational(var, hi).as_constant().unwrap();
        if !v.is_zero() || q.degree_in(var) <= 0 {
            break;
        }
        let lin = Polynomial::var(var).sub(&Polynomial::constant(hi.clone()));
        q = q.exact_div_onevar(&lin, var).expect("root divides");
        extra = 1;
    }
    loop {
        let v = q.subst_rational(var, lo).as_constant().unwrap();
        if !v.is_zero() || q.degree_in(var) <= 0 {
            break;
        }
        let lin = Polynomial::var(var).sub(&Polynomial::constant(lo.clone()));
        q = q.exact_div_onevar(&lin, var).expect("root divides");
    }
    if q.degree_in(var) <= 0 {
        return Ok(extra);
    }
    let chain = SturmSequence::new(&q, var)?;
    let va = chain.variations_at(lo);
    let vb = chain.variations_at(hi);
    Ok(va - vb + extra)
}

/// Rational endpoints bracketing exactly one real root of `poly`.
#[derive(Debug, Clone)]
pub struct IsolatingInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub poly: Polynomial,
}

/// Square-free part `p / gcd(p, p')`.
fn square_free_part(dense: &[Rational]) -> Vec<Rational> {
    let d1 = dense_derivative(dense);
    if d1.is_empty() {
        return dense.to_vec();
    }
    let g = dense_gcd(dense, &d1);
    if g.len() <= 1 {
        return dense.to_vec();
    }
    // exact division by the gcd
    let mut rem: Vec<Rational> = dense.to_vec();
    let mut quot = vec![Rational::zero(); dense.len() - g.len() + 1];
    let db = g.len() - 1;
    let lead = g[db].clone();
    while rem.len() > db {
        let dr = rem.len() - 1;
        let factor = rem[dr].clone() / lead.clone();
        let shift = dr - db;
        quot[shift] = factor.clone();
        for (i, bc) in g.iter().enumerate() {
            let delta = factor.clone() * bc.clone();
            rem[i + shift] -= delta;
        }
        rem = trim(rem);
    }
    debug_assert!(rem.is_empty());
    trim(quot)
}

/// Cauchy bound: all real roots lie strictly inside `[-M, M]`.
fn cauchy_bound(dense: &[Rational]) -> Rational {
    let lead = dense.last().unwrap().abs();
    let mut max = Rational::zero();
    for c in &dense[..dense.len() - 1] {
        max = max.max(c.abs() / lead.clone());
    }
    Rational::one() + max
}

/// Disjoint rational intervals, one per distinct real root of `p`, in
/// increasing order. Repeated roots are counted once; a nonzero constant
/// has no roots.
pub fn isolate_roots(p: &Polynomial, var: &str) -> Result<Vec<IsolatingInterval>, OracleError> {
    let dense = poly_to_dense(p, var)?;
    if dense.is_empty() {
        return Err(OracleError::ZeroPolynomial);
    }
    if dense.len() == 1 {
        return Ok(vec![]);
    }
    let sf = square_free_part(&dense);
    let sf_poly = dense_to_poly(&sf, var);
    let bound = cauchy_bound(&sf);
    let lo = -bound.clone();
    let hi = bound;
    let mut out = Vec::new();
    bisect(&sf, &sf_poly, var, lo, hi, &mut out)?;
    Ok(out)
}

fn bisect(
    sf: &[Rational],
    sf_poly: &Polynomial,
    var: &str,
    lo: Rational,
    hi: Rational,
    out: &mut Vec<IsolatingInterval>,
) -> Result<(), OracleError> {
    let n = sturm_count(sf_poly, var, &lo, &hi)?;
    if n == 0 {
        return Ok(());
    }
    if n == 1 && !dense_eval(sf, &hi).is_zero() {
        out.push(IsolatingInterval {
            lo,
            hi,
            poly: sf_poly.clone(),
        });
        return Ok(());
    }
    let mid = (lo.clone() + hi.clone()) / rat(2);
    if dense_eval(sf, &mid).is_zero() {
        // rational root exactly at the midpoint: carve out a box of its own
        let mut delta = (hi.clone() - lo.clone()) / rat(4);
        loop {
            let l = mid.clone() - delta.clone();
            let r = mid.clone() + delta.clone();
            if !dense_eval(sf, &l).is_zero()
                && !dense_eval(sf, &r).is_zero()
                && sturm_count(sf_poly, var, &l, &r)? == 1
            {
                bisect(sf, sf_poly, var, lo, l.clone(), out)?;
                out.push(IsolatingInterval {
                    lo: l,
                    hi: r.clone(),
                    poly: sf_poly.clone(),
                });
                return bisect(sf, sf_poly, var, r, hi, out);
            }
            delta /= rat(2);
        }
    }
    bisect(sf, sf_poly, var, lo, mid.clone(), out)?;
    bisect(sf, sf_poly, var, mid, hi, out)
}

impl IsolatingInterval {
    /// Halves the bracket while keeping exactly one root inside.
    fn refine(&mut self) {
        let var = self.poly.only_var().expect("one variable");
        let mid = (self.lo.clone() + self.hi.clone()) / rat(2);
        let v = self.poly.subst_rational(&var, &mid).as_constant().unwrap();
        if v.is_zero() {
            // rational root: shrink symmetrically around it
            let w = (self.hi.clone() - self.lo.clone()) / rat(8);
            self.lo = mid.clone() - w.clone();
            self.hi = mid + w;
            return;
        }
        let left = sturm_count(&self.poly, &var, &self.lo, &mid).unwrap();
        if left == 1 {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    /// Exact sign of `q` at the root bracketed by this interval, via
    /// refinement until `q` either provably vanishes at the root or has no
    /// root left in the bracket.
    pub fn sign_of(&self, q: &Polynomial, var: &str) -> Result<i32, OracleError> {
        let qd = poly_to_dense(q, var)?;
        if qd.is_empty() {
            return Ok(0);
        }
        if qd.len() == 1 {
            return Ok(crate::rational::sign(&qd[0]));
        }
        let pd = poly_to_dense(&self.poly, var)?;
        let g = dense_gcd(&pd, &qd);
        if g.len() > 1 {
            // shared factor: q vanishes at this root iff the gcd does
            let g_poly = dense_to_poly(&g, var);
            if sturm_count(&g_poly, var, &self.lo, &self.hi)? == 1 {
                return Ok(0);
            }
        }
        let mut iv = self.clone();
        let q_poly = dense_to_poly(&qd, var);
        loop {
            if !dense_eval(&qd, &iv.lo).is_zero()
                && !dense_eval(&qd, &iv.hi).is_zero()
                && sturm_count(&q_poly, var, &iv.lo, &iv.hi)? == 0
            {
                let mid = (iv.lo.clone() + iv.hi.clone()) / rat(2);
                return Ok(crate::rational::sign(&dense_eval(&qd, &mid)));
            }
            iv.refine();
        }
    }
}

/// A sample point on the real line: either rational or the unique root of a
/// polynomial inside an isolating interval.
enum Sample {
    Rat(Rational),
    Root(IsolatingInterval),
}

/// Truth over the reals of a closed formula whose quantified parts each bind
/// a single variable: ground sentences, one-quantifier sentences, and
/// boolean combinations of those.
pub fn decide_closed(f: &Formula) -> Result<bool, OracleError> {
    if let Some(v) = f.ground_eval() {
        return Ok(v);
    }
    match f {
        Formula::Exists(var, body) => decide_matrix(var, body, true),
        Formula::Forall(var, body) => decide_matrix(var, body, false),
        Formula::Not(x) => Ok(!decide_closed(x)?),
        Formula::And(xs) => {
            for x in xs {
                if !decide_closed(x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(xs) => {
            for x in xs {
                if decide_closed(x)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(a, b) => Ok(!decide_closed(a)? || decide_closed(b)?),
        Formula::Iff(a, b) => Ok(decide_closed(a)? == decide_closed(b)?),
        other => Err(OracleError::UnsupportedShape(format!(
            "not a one-variable sentence: {other}"
        ))),
    }
}

/// One-quantifier entry point: `exists x. M` or `forall x. M` with a
/// quantifier-free one-variable matrix.
pub fn decide_onevar(f: &Formula) -> Result<bool, OracleError> {
    match f {
        Formula::Exists(var, body) => decide_matrix(var, body, true),
        Formula::Forall(var, body) => decide_matrix(var, body, false),
        other => Err(OracleError::UnsupportedShape(format!(
            "expected a single leading quantifier: {other}"
        ))),
    }
}

fn decide_matrix(var: &str, body: &Formula, existential: bool) -> Result<bool, OracleError> {
    if !body.is_quantifier_free() {
        return Err(OracleError::UnsupportedShape(
            "nested quantifiers".to_string(),
        ));
    }
    let mut polys: Vec<Polynomial> = Vec::new();
    collect_polys(body, var, &mut polys)?;
    let mut samples: Vec<Sample> = Vec::new();
    if polys.is_empty() {
        samples.push(Sample::Rat(Rational::zero()));
    } else {
        let mut product = Polynomial::one();
        for p in &polys {
            product = product.mul(p);
        }
        let intervals = isolate_roots(&product, var)?;
        if intervals.is_empty() {
            samples.push(Sample::Rat(Rational::zero()));
        } else {
            // interval endpoints are never roots of the product, so they
            // cover every sign-invariant region between and beyond roots
            samples.push(Sample::Rat(intervals[0].lo.clone()));
            for iv in &intervals {
                samples.push(Sample::Root(iv.clone()));
                samples.push(Sample::Rat(iv.hi.clone()));
            }
        }
    }
    for s in &samples {
        let truth = eval_matrix(body, var, s)?;
        if existential && truth {
            return Ok(true);
        }
        if !existential && !truth {
            return Ok(false);
        }
    }
    Ok(!existential)
}

fn collect_polys(f: &Formula, var: &str, out: &mut Vec<Polynomial>) -> Result<(), OracleError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom(a) => {
            let vs = a.poly.vars();
            if vs.iter().any(|v| v != var) {
                return Err(OracleError::UnsupportedShape(format!(
                    "atom with extra variables: {}",
                    a.poly
                )));
            }
            if a.poly.contains_var(var) {
                let (canon, _) = a.poly.sign_canonical();
                if !out.contains(&canon) {
                    out.push(canon);
                }
            }
            Ok(())
        }
        Formula::Not(x) => collect_polys(x, var, out),
        Formula::And(xs) | Formula::Or(xs) => {
            for x in xs {
                collect_polys(x, var, out)?;
            }
            Ok(())
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_polys(a, var, out)?;
            collect_polys(b, var, out)
        }
        Formula::Exists(..) | Formula::Forall(..) => Err(OracleError::UnsupportedShape(
            "nested quantifiers".to_string(),
        )),
    }
}

fn eval_matrix(f: &Formula, var: &str, sample: &Sample) -> Result<bool, OracleError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => {
            let s = match sample {
                Sample::Rat(r) => {
                    let v = a.poly.subst_rational(var, r).as_constant().unwrap();
                    crate::rational::sign(&v)
                }
                Sample::Root(iv) => iv.sign_of(&a.poly, var)?,
            };
            Ok(match a.kind {
                AtomKind::EqZero => s == 0,
                AtomKind::GtZero => s > 0,
            })
        }
        Formula::Not(x) => Ok(!eval_matrix(x, var, sample)?),
        Formula::And(xs) => {
            for x in xs {
                if !eval_matrix(x, var, sample)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(xs) => {
            for x in xs {
                if eval_matrix(x, var, sample)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(a, b) => Ok(!eval_matrix(a, var, sample)? || eval_matrix(b, var, sample)?),
        Formula::Iff(a, b) => Ok(eval_matrix(a, var, sample)? == eval_matrix(b, var, sample)?),
        _ => unreachable!("matrix is quantifier-free"),
    }
}

/// One disagreeing valuation of the shared free variables.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub trial: usize,
    pub assignment: BTreeMap<VarName, Rational>,
    pub lhs: bool,
    pub rhs: bool,
}

/// Outcome of seeded random equivalence sampling.
#[derive(Debug, Clone)]
pub struct EquivReport {
    pub trials: usize,
    pub seed: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl EquivReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Draws a rational with numerator in [-20, 20] and denominator in [1, 20].
fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-20..=20);
    let den: i64 = rng.gen_range(1..=20);
    Rational::new(num.into(), den.into())
}

/// Compares two formulas at `trials` seeded random instantiations of their
/// shared free variables. Each instantiated sentence must be ground or in
/// scope for `decide_closed`. Deterministic for a fixed seed.
pub fn sampled_equiv(
    f: &Formula,
    g: &Formula,
    trials: usize,
    seed: u64,
) -> Result<EquivReport, OracleError> {
    let mut vars: Vec<VarName> = f.free_vars().union(&g.free_vars()).cloned().collect();
    vars.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = Vec::new();
    for trial in 0..trials {
        let mut assignment = BTreeMap::new();
        for v in &vars {
            assignment.insert(v.clone(), random_rational(&mut rng));
        }
        let fi = crate::formula::substitute_all(f, &assignment);
        let gi = crate::formula::substitute_all(g, &assignment);
        let lhs = decide_closed(&fi)?;
        let rhs = decide_closed(&gi)?;
        if lhs != rhs {
            counterexamples.push(Counterexample {
                trial,
                assignment,
                lhs,
                rhs,
            });
        }
    }
    Ok(EquivReport {
        trials,
        seed,
        counterexamples,
    })
}

/// Substitutes a rational point for one variable across a formula.
pub fn instantiate_at(f: &Formula, var: &str, value: &Rational) -> Formula {
    substitute_rational(f, var, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rational::ratio;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(rat(n))
    }

    #[test]
    fn sturm_counts() {
        let p = x().pow(2).sub(&c(2));
        assert_eq!(sturm_count(&p, "x", &rat(0), &rat(2)).unwrap(), 1);

        let q = x().pow(2).add(&c(1));
        assert_eq!(sturm_count(&q, "x", &rat(-10), &rat(10)).unwrap(), 0);

        let r = x().pow(3).sub(&x().scale(&rat(2))).sub(&c(5));
        assert_eq!(sturm_count(&r, "x", &rat(2), &rat(3)).unwrap(), 1);
    }

    #[test]
    fn sturm_half_open_endpoints() {
        // ]0, 1] includes the root at 1 but not the root at 0
        let p = x().mul(&x().sub(&c(1)));
        assert_eq!(sturm_count(&p, "x", &rat(0), &rat(1)).unwrap(), 1);
        assert_eq!(sturm_count(&p, "x", &rat(-1), &rat(0)).unwrap(), 1);
        assert_eq!(sturm_count(&p, "x", &ratio(1, 2), &rat(2)).unwrap(), 1);
    }

    #[test]
    fn isolation_examples() {
        let p = x().pow(2).sub(&c(2));
        let roots = isolate_roots(&p, "x").unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi <= roots[1].lo);

        let sq = x().sub(&c(1)).pow(2);
        assert_eq!(isolate_roots(&sq, "x").unwrap().len(), 1);

        assert_eq!(isolate_roots(&c(7), "x").unwrap().len(), 0);
        assert!(isolate_roots(&Polynomial::zero(), "x").is_err());
    }

    #[test]
    fn sign_at_algebraic_root() {
        // at x = sqrt(2): x > 0, x^2 - 2 = 0, x - 2 < 0
        let p = x().pow(2).sub(&c(2));
        let roots = isolate_roots(&p, "x").unwrap();
        let pos_root = &roots[1];
        assert_eq!(pos_root.sign_of(&x(), "x").unwrap(), 1);
        assert_eq!(pos_root.sign_of(&p, "x").unwrap(), 0);
        assert_eq!(pos_root.sign_of(&x().sub(&c(2)), "x").unwrap(), -1);
    }

    #[test]
    fn decide_examples() {
        assert!(decide_closed(&parse("exists x. x*x = 2").unwrap()).unwrap());
        assert!(decide_closed(&parse("forall x. x*x >= 0").unwrap()).unwrap());
        assert!(!decide_closed(&parse("exists x. x*x + 1 = 0").unwrap()).unwrap());
        assert!(decide_closed(
            &parse("exists x. x*x*x - 2*x - 5 = 0 /\\ 2 < x /\\ x < 3").unwrap()
        )
        .unwrap());
        assert!(!decide_closed(
            &parse("exists x. x*x*x - 2*x - 5 = 0 /\\ x < 2").unwrap()
        )
        .unwrap());
    }

    #[test]
    fn rejects_multivariate() {
        let f = parse("exists x. exists y. x*y = 1").unwrap();
        assert!(matches!(
            decide_closed(&f),
            Err(OracleError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn sampled_equiv_discriminant() {
        let f = parse("exists x. x*x + b*x + c = 0").unwrap();
        let g = parse("b*b - 4*c > 0 \\/ b*b - 4*c = 0").unwrap();
        let report = sampled_equiv(&f, &g, 100, 0).unwrap();
        assert!(report.passed(), "{:?}", report.counterexamples);
    }

    #[test]
    fn sampled_equiv_reflexive_and_negative() {
        let f = parse("exists x. x*x = a").unwrap();
        assert!(sampled_equiv(&f, &f, 25, 7).unwrap().passed());

        let report = sampled_equiv(&Formula::True, &Formula::False, 5, 0).unwrap();
        assert_eq!(report.counterexamples[0].trial, 0);
    }
}
