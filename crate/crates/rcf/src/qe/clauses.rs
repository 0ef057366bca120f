//! Clause-level bookkeeping for the engine.
//!
//! Engine formulas are negation-free: atoms under and/or only. A clause is a
//! conjunction of atoms kept canonical through a sign map keyed by the
//! sign-canonical form of each polynomial, which catches duplicates and
//! contradictions such as `p = 0 /\ 2p > 0` across guards and constraints.
//!
//! Sign-canonicalization costs a gcd pass over big-integer coefficients, so
//! every distinct polynomial is canonicalized once and interned; clause
//! merging, deduplication and subsumption then run on integer ids.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::formula::{Atom, AtomKind, Formula};
use crate::poly::Polynomial;

use super::QeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum SignState {
    Zero,
    Pos,
    Neg,
}

/// An interned literal: canonical polynomial id plus its sign state.
pub(crate) type Lit = (u32, SignState);

/// A consistent conjunction of literals, sorted by id.
pub(crate) type IClause = Vec<Lit>;

/// A ground linear one-variable canonical polynomial `c*v + d`, remembered
/// as its variable, root, and the sign of `c`.
#[derive(Clone)]
struct LinearInfo {
    var: crate::poly::VarName,
    root: crate::rational::Rational,
    increasing: bool,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Polynomial, u32>,
    polys: Vec<Polynomial>,
    linear: Vec<Option<LinearInfo>>,
    canon: HashMap<Polynomial, (u32, bool)>,
}

thread_local! {
    static INTERNER: RefCell<Interner> = RefCell::new(Interner::default());
}

fn linear_info(key: &Polynomial) -> Option<LinearInfo> {
    let var = key.only_var()?;
    if key.degree_in(&var) != 1 {
        return None;
    }
    let c = key.leading_coeff_in(&var).as_constant()?;
    let d = key.coeff_in(&var, 0).as_constant()?;
    Some(LinearInfo {
        root: -d / c.clone(),
        increasing: crate::rational::sign(&c) > 0,
        var,
    })
}

/// Canonical id and flip flag for a non-ground polynomial.
fn intern_poly(p: &Polynomial) -> (u32, bool) {
    INTERNER.with(|cell| {
        let mut it = cell.borrow_mut();
        if let Some(&hit) = it.canon.get(p) {
            return hit;
        }
        let (key, flipped) = p.sign_canonical();
        let id = match it.ids.get(&key) {
            Some(&id) => id,
            None => {
                let id = it.polys.len() as u32;
                it.linear.push(linear_info(&key));
                it.polys.push(key.clone());
                it.ids.insert(key, id);
                id
            }
        };
        it.canon.insert(p.clone(), (id, flipped));
        (id, flipped)
    })
}

/// One-variable linear feasibility of an interned clause: bounds and pins
/// per variable from the linear table, everything else ignored.
fn clause_linear_feasible(clause: &IClause) -> bool {
    INTERNER.with(|cell| {
        let it = cell.borrow();
        // clauses are short; linear scan beats building maps
        let mut ranges: Vec<(
            &str,
            Option<crate::rational::Rational>,
            Option<crate::rational::Rational>,
            Option<crate::rational::Rational>,
        )> = Vec::new();
        for &(id, state) in clause {
            let Some(info) = &it.linear[id as usize] else {
                continue;
            };
            let slot = match ranges.iter().position(|(v, ..)| *v == info.var.as_str()) {
                Some(i) => i,
                None => {
                    ranges.push((info.var.as_str(), None, None, None));
                    ranges.len() - 1
                }
            };
            let (_, lower, upper, pin) = &mut ranges[slot];
            // state is about c*v + d with c normalized positive
            let goes_up = info.increasing;
            debug_assert!(goes_up, "canonical lead is positive");
            let _ = goes_up;
            match state {
                SignState::Zero => match pin {
                    Some(p) if *p != info.root => return false,
                    _ => *pin = Some(info.root.clone()),
                },
                SignState::Pos => {
                    if lower.as_ref().map(|b| info.root > *b).unwrap_or(true) {
                        *lower = Some(info.root.clone());
                    }
                }
                SignState::Neg => {
                    if upper.as_ref().map(|b| info.root < *b).unwrap_or(true) {
                        *upper = Some(info.root.clone());
                    }
                }
            }
        }
        for (_, lower, upper, pin) in &ranges {
            if let (Some(l), Some(u)) = (lower, upper) {
                if l >= u {
                    return false;
                }
            }
            if let Some(p) = pin {
                if lower.as_ref().is_some_and(|l| p <= l) {
                    return false;
                }
                if upper.as_ref().is_some_and(|u| p >= u) {
                    return false;
                }
            }
        }
        true
    })
}

/// Signed id for a polynomial as a set member (no clause merging).
pub(crate) fn signed_id(p: &Polynomial) -> (u32, bool) {
    intern_poly(p)
}

pub(crate) fn poly_of(id: u32) -> Polynomial {
    INTERNER.with(|cell| cell.borrow().polys[id as usize].clone())
}

/// Literal for an atom; `Err(truth)` when the atom is ground.
fn atom_lit(atom: &Atom) -> Result<Lit, bool> {
    if let Some(v) = atom.ground_value() {
        return Err(v);
    }
    let (id, flipped) = intern_poly(&atom.poly);
    let state = match atom.kind {
        AtomKind::EqZero => SignState::Zero,
        AtomKind::GtZero => {
            if flipped {
                SignState::Neg
            } else {
                SignState::Pos
            }
        }
    };
    Ok((id, state))
}

pub(crate) fn lit_atom(lit: &Lit) -> Atom {
    let key = poly_of(lit.0);
    match lit.1 {
        SignState::Zero => Atom::eq_zero(key),
        SignState::Pos => Atom::gt_zero(key),
        SignState::Neg => Atom::gt_zero(key.neg()),
    }
}

/// Interns and merges atoms; `None` on a recognized contradiction.
pub(crate) fn clause_ids<I: IntoIterator<Item = Atom>>(atoms: I) -> Option<IClause> {
    let mut lits: BTreeMap<u32, SignState> = BTreeMap::new();
    for atom in atoms {
        match atom_lit(&atom) {
            Err(true) => continue,
            Err(false) => return None,
            Ok((id, state)) => match lits.get(&id) {
                None => {
                    lits.insert(id, state);
                }
                Some(existing) if *existing == state => {}
                Some(_) => return None,
            },
        }
    }
    Some(lits.into_iter().collect())
}

/// Merge of two sorted consistent clauses; `None` on contradiction.
fn merge_clauses(a: &IClause, b: &IClause) -> Option<IClause> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if a[i].1 != b[j].1 {
                    return None;
                }
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some(out)
}

fn is_subset(small: &IClause, big: &IClause) -> bool {
    let mut j = 0;
    for lit in small {
        loop {
            if j >= big.len() {
                return false;
            }
            match big[j].0.cmp(&lit.0) {
                std::cmp::Ordering::Less => j += 1,
                std::cmp::Ordering::Equal => {
                    if big[j].1 != lit.1 {
                        return false;
                    }
                    j += 1;
                    break;
                }
                std::cmp::Ordering::Greater => return false,
            }
        }
    }
    true
}

/// Drops duplicate clauses and any clause that is a superset of another
/// (the smaller conjunction is the weaker disjunct), then merges sign
/// triples: three clauses identical except for carrying `p = 0`, `p > 0`
/// and `-p > 0` on the same key collapse to the clause without `p`.
fn subsume_ids(clauses: Vec<IClause>) -> Vec<IClause> {
    let mut current = clauses;
    loop {
        current = subsume_pass(current);
        let (merged, changed) = sign_triple_pass(current);
        current = merged;
        if !changed {
            return current;
        }
    }
}

fn subsume_pass(mut clauses: Vec<IClause>) -> Vec<IClause> {
    let mut seen: HashSet<IClause> = HashSet::with_capacity(clauses.len());
    clauses.retain(|c| seen.insert(c.clone()));
    if clauses.len() > 2048 {
        return clauses;
    }
    let mut by_len: Vec<usize> = (0..clauses.len()).collect();
    by_len.sort_by_key(|&i| clauses[i].len());
    let mut keep = vec![true; clauses.len()];
    for (rank, &i) in by_len.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        for &j in &by_len[rank + 1..] {
            if keep[j] && clauses[j].len() > clauses[i].len() && is_subset(&clauses[i], &clauses[j])
            {
                keep[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    for (i, c) in clauses.into_iter().enumerate() {
        if keep[i] {
            out.push(c);
        }
    }
    out
}

fn sign_triple_pass(clauses: Vec<IClause>) -> (Vec<IClause>, bool) {
    if clauses.len() > 4096 {
        return (clauses, false);
    }
    let set: HashSet<IClause> = clauses.iter().cloned().collect();
    let mut dropped: HashSet<IClause> = HashSet::new();
    let mut added: Vec<IClause> = Vec::new();
    for clause in &clauses {
        for (idx, &(key, state)) in clause.iter().enumerate() {
            if state != SignState::Zero {
                continue;
            }
            let mut pos = clause.clone();
            pos[idx] = (key, SignState::Pos);
            let mut neg = clause.clone();
            neg[idx] = (key, SignState::Neg);
            if set.contains(&pos) && set.contains(&neg) {
                let mut reduced = clause.clone();
                reduced.remove(idx);
                dropped.insert(clause.clone());
                dropped.insert(pos);
                dropped.insert(neg);
                added.push(reduced);
            }
        }
    }
    if added.is_empty() {
        return (clauses, false);
    }
    let mut out: Vec<IClause> = clauses
        .into_iter()
        .filter(|c| !dropped.contains(c))
        .collect();
    out.extend(added);
    (out, true)
}

/// Splits a variable-power factor off an atom: `v^k * q ~ 0` becomes a
/// small formula over `v` and `q`, collapsing derived sign keys like
/// `z^4 - 2z^2` back onto `z` and `z^2 - 2`.
fn expand_atom(a: &Atom) -> Option<Formula> {
    let (content, q) = a.poly.monomial_content();
    if content.is_one() {
        return None;
    }
    // c * v is already prime
    if content.total_degree() == 1 && q.is_ground() {
        return None;
    }
    match a.kind {
        AtomKind::EqZero => {
            let mut parts: Vec<Formula> = content
                .vars()
                .map(|v| Formula::eq_zero(Polynomial::var(v)))
                .collect();
            parts.push(Formula::eq_zero(q));
            Some(Formula::or(parts))
        }
        AtomKind::GtZero => {
            let mut evens = Vec::new();
            let mut odds = Vec::new();
            for (v, k) in content.exponents() {
                if k % 2 == 0 {
                    evens.push(v.clone());
                } else {
                    odds.push(v.clone());
                }
            }
            // even powers: nonzero; odd powers: enumerate sign patterns
            let mut conj: Vec<Formula> = evens
                .iter()
                .map(|v| {
                    Formula::or(vec![
                        Formula::gt_zero(Polynomial::var(v)),
                        Formula::gt_zero(Polynomial::var(v).neg()),
                    ])
                })
                .collect();
            let mut cases = Vec::new();
            for pattern in 0u32..(1 << odds.len()) {
                let mut case = Vec::new();
                let mut negatives = 0;
                for (i, v) in odds.iter().enumerate() {
                    if pattern & (1 << i) == 0 {
                        case.push(Formula::gt_zero(Polynomial::var(v)));
                    } else {
                        case.push(Formula::gt_zero(Polynomial::var(v).neg()));
                        negatives += 1;
                    }
                }
                let target = if negatives % 2 == 0 { q.clone() } else { q.neg() };
                case.push(Formula::gt_zero(target));
                cases.push(Formula::and(case));
            }
            conj.push(Formula::or(cases));
            Some(Formula::and(conj))
        }
    }
}

fn walk_dnf(f: &Formula, cap: usize) -> Result<Vec<IClause>, QeError> {
    match f {
        Formula::True => Ok(vec![vec![]]),
        Formula::False => Ok(vec![]),
        Formula::Atom(a) => {
            if let Some(expanded) = expand_atom(a) {
                return walk_dnf(&expanded, cap);
            }
            match atom_lit(a) {
                Err(true) => Ok(vec![vec![]]),
                Err(false) => Ok(vec![]),
                Ok(lit) => Ok(vec![vec![lit]]),
            }
        }
        Formula::Or(xs) => {
            let mut out = Vec::new();
            let mut seen: HashSet<IClause> = HashSet::new();
            for x in xs {
                for c in walk_dnf(x, cap)? {
                    if seen.insert(c.clone()) {
                        out.push(c);
                    }
                }
                if out.len() > cap {
                    return Err(QeError::budget_nodes());
                }
            }
            Ok(out)
        }
        Formula::And(xs) => {
            let mut acc: Vec<IClause> = vec![vec![]];
            for x in xs {
                let child = walk_dnf(x, cap)?;
                let mut next = Vec::new();
                let mut seen: HashSet<IClause> = HashSet::new();
                for clause in &acc {
                    for extra in &child {
                        if let Some(m) = merge_clauses(clause, extra) {
                            if clause_linear_feasible(&m) && seen.insert(m.clone()) {
                                next.push(m);
                            }
                        }
                        if next.len() > cap {
                            return Err(QeError::budget_nodes());
                        }
                    }
                }
                acc = subsume_ids(next);
            }
            Ok(acc)
        }
        other => Err(QeError::Internal(format!(
            "dnf on non-normalized formula: {other}"
        ))),
    }
}

/// Disjunctive normal form of a negation-free formula. Clauses are kept
/// canonical throughout, so contradictions prune partial products and
/// duplicates collapse as soon as they arise; the result is subsumed and
/// clauses with jointly infeasible linear constraints are dropped.
pub(crate) fn dnf(f: &Formula, cap: usize) -> Result<Vec<Vec<Atom>>, QeError> {
    let walked = walk_dnf(f, cap);
    if walked.is_err() && std::env::var("RCF_CAP").is_ok() {
        eprintln!("DNF CAP: size={} formula={}", f.size(), if f.size() < 2000 { f.to_string() } else { "<big>".to_string() });
    }
    let clauses = subsume_ids(walked?);
    Ok(clauses
        .into_iter()
        .map(|c| c.iter().map(lit_atom).collect::<Vec<Atom>>())
        .filter(|c| super::engine::linear_feasible(c) && super::engine::fm_feasible(c))
        .collect())
}

/// Canonical conjunction of atoms, or a recognized contradiction.
#[derive(Debug, Clone)]
pub(crate) enum ClauseForm {
    False,
    Atoms(Vec<Atom>),
}

/// Merges atoms into canonical order, folding ground atoms and detecting
/// contradictions between states of the same canonical polynomial.
pub(crate) fn normalize_clause<I: IntoIterator<Item = Atom>>(atoms: I) -> ClauseForm {
    match clause_ids(atoms) {
        None => ClauseForm::False,
        Some(c) => ClauseForm::Atoms(c.iter().map(lit_atom).collect()),
    }
}

pub(crate) fn clause_formula(atoms: Vec<Atom>) -> Formula {
    Formula::and(atoms.into_iter().map(Formula::Atom).collect())
}

pub(crate) fn clauses_formula(clauses: Vec<Vec<Atom>>) -> Formula {
    Formula::or(clauses.into_iter().map(clause_formula).collect())
}

/// Negation of a negation-free quantifier-free formula, itself negation-free.
pub(crate) fn negate_nf(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(a) => crate::formula::negate_atom(a),
        Formula::And(xs) => Formula::or(xs.iter().map(negate_nf).collect()),
        Formula::Or(xs) => Formula::and(xs.iter().map(negate_nf).collect()),
        other => unreachable!("engine formula with negation/quantifier: {other}"),
    }
}

/// Guard formulas from the pseudo-reduction steps are either an equality
/// atom, a two-sided nonzero disjunction, or a folded constant. Each clause
/// becomes one branch.
pub(crate) fn guard_clauses(guard: &Formula) -> Vec<Vec<Atom>> {
    match guard {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Atom(a) => vec![vec![a.clone()]],
        Formula::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(guard_clauses(x));
            }
            out
        }
        Formula::And(xs) => {
            let mut acc: Vec<Vec<Atom>> = vec![vec![]];
            for x in xs {
                let child = guard_clauses(x);
                let mut next = Vec::new();
                for c in &acc {
                    for e in &child {
                        let mut merged = c.clone();
                        merged.extend(e.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
            }
            acc
        }
        other => unreachable!("unexpected guard shape: {other}"),
    }
}

/// Bottom-up simplification for negation-free engine formulas: flattening,
/// ground folding, clause merging inside conjunctions, duplicate and
/// subsumed disjunct removal, and the three-way sign fold
/// `p = 0 \/ p > 0 \/ -p > 0  =>  true`.
pub(crate) fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::atom(a.kind, a.poly.clone()),
        Formula::Not(x) => Formula::not(simplify(x)),
        Formula::Implies(a, b) => Formula::implies(simplify(a), simplify(b)),
        Formula::Iff(a, b) => Formula::iff(simplify(a), simplify(b)),
        Formula::Exists(v, b) => Formula::exists(v, simplify(b)),
        Formula::Forall(v, b) => Formula::forall(v, simplify(b)),
        Formula::And(xs) => {
            let mut atoms = Vec::new();
            let mut rest = Vec::new();
            for x in xs {
                match simplify(x) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::Atom(a) => atoms.push(a),
                    Formula::And(inner) => {
                        for y in inner {
                            match y {
                                Formula::Atom(a) => atoms.push(a),
                                other => rest.push(other),
                            }
                        }
                    }
                    other => rest.push(other),
                }
            }
            let merged = match clause_ids(atoms) {
                None => return Formula::False,
                Some(c) => c,
            };
            let mut parts: Vec<Formula> =
                merged.iter().map(|l| Formula::Atom(lit_atom(l))).collect();
            let mut seen: Vec<Formula> = Vec::new();
            for r in rest {
                if !seen.contains(&r) {
                    seen.push(r.clone());
                    parts.push(r);
                }
            }
            Formula::and(parts)
        }
        Formula::Or(xs) => {
            let mut flat = Vec::new();
            for x in xs {
                match simplify(x) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            // three-way sign fold over bare-atom disjuncts
            let mut states: HashMap<u32, (bool, bool, bool)> = HashMap::new();
            for d in &flat {
                if let Formula::Atom(a) = d {
                    if let Ok((id, s)) = atom_lit(a) {
                        let e = states.entry(id).or_insert((false, false, false));
                        match s {
                            SignState::Zero => e.0 = true,
                            SignState::Pos => e.1 = true,
                            SignState::Neg => e.2 = true,
                        }
                    }
                }
            }
            if states.values().any(|&(z, p, n)| z && p && n) {
                return Formula::True;
            }
            // subsumption over atom-conjunction disjuncts
            let clauses: Vec<Option<IClause>> = flat.iter().map(as_clause).collect();
            let mut drop = vec![false; flat.len()];
            let clausal: Vec<(usize, &IClause)> = clauses
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
                .collect();
            if clausal.len() <= 2048 {
                for &(i, ci) in &clausal {
                    if drop[i] {
                        continue;
                    }
                    for &(j, cj) in &clausal {
                        if i == j || drop[j] {
                            continue;
                        }
                        if ci.len() <= cj.len() && is_subset(ci, cj) {
                            if ci.len() == cj.len() && i > j {
                                continue;
                            }
                            drop[j] = true;
                        }
                    }
                }
            }
            let mut out = Vec::new();
            let mut seen: HashSet<IClause> = HashSet::new();
            for (i, d) in flat.into_iter().enumerate() {
                if drop[i] {
                    continue;
                }
                match &clauses[i] {
                    Some(c) => {
                        if seen.insert(c.clone()) {
                            out.push(d);
                        }
                    }
                    None => {
                        if !out.contains(&d) {
                            out.push(d);
                        }
                    }
                }
            }
            Formula::or(out)
        }
    }
}

/// A disjunct viewed as an interned clause, when it is a conjunction of
/// atoms (or a single atom).
fn as_clause(f: &Formula) -> Option<IClause> {
    match f {
        Formula::True => Some(vec![]),
        Formula::Atom(a) => clause_ids([a.clone()]),
        Formula::And(xs) => {
            let mut atoms = Vec::new();
            for x in xs {
                if let Formula::Atom(a) = x {
                    atoms.push(a.clone());
                } else {
                    return None;
                }
            }
            clause_ids(atoms)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    #[test]
    fn contradictions_collapse() {
        let atoms = vec![Atom::eq_zero(x()), Atom::gt_zero(x().scale(&rat(2)))];
        assert!(matches!(normalize_clause(atoms), ClauseForm::False));

        let atoms = vec![Atom::gt_zero(x()), Atom::gt_zero(x().neg())];
        assert!(matches!(normalize_clause(atoms), ClauseForm::False));
    }

    #[test]
    fn duplicates_merge() {
        let atoms = vec![
            Atom::gt_zero(x().scale(&rat(3))),
            Atom::gt_zero(x()),
            Atom::eq_zero(Polynomial::var("y")),
        ];
        match normalize_clause(atoms) {
            ClauseForm::Atoms(a) => assert_eq!(a.len(), 2),
            ClauseForm::False => panic!("consistent clause"),
        }
    }

    #[test]
    fn trichotomy_folds_to_true() {
        let f = Formula::or(vec![
            Formula::Atom(Atom::eq_zero(x())),
            Formula::Atom(Atom::gt_zero(x())),
            Formula::Atom(Atom::gt_zero(x().neg())),
        ]);
        assert_eq!(simplify(&f), Formula::True);
    }

    #[test]
    fn subsumption_keeps_weaker_disjunct() {
        let weak = Formula::and(vec![Formula::Atom(Atom::gt_zero(x()))]);
        let strong = Formula::and(vec![
            Formula::Atom(Atom::gt_zero(x())),
            Formula::Atom(Atom::eq_zero(Polynomial::var("y"))),
        ]);
        let out = simplify(&Formula::Or(vec![weak.clone(), strong]));
        assert_eq!(out, weak);
    }

    #[test]
    fn dnf_distributes_and_prunes() {
        let f = Formula::and(vec![
            Formula::or(vec![
                Formula::Atom(Atom::gt_zero(x())),
                Formula::Atom(Atom::eq_zero(x())),
            ]),
            Formula::Atom(Atom::gt_zero(x().neg())),
        ]);
        // x>0 /\ -x>0 contradicts; x=0 /\ -x>0 contradicts: empty DNF
        assert!(dnf(&f, 1000).unwrap().is_empty());
    }
}
