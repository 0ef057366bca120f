//! The bounded-interval elimination core.
//!
//! `elim_interval` eliminates `exists x in ]lo, hi[ : /\ atoms`, assuming
//! `lo < hi`, by induction on the degree measure (equalities count their
//! degree, strict inequalities one more). Every task is first normalized:
//! ground and variable-free atoms are hoisted, pairs of equalities are
//! merged and inequality degrees driven below the equality degree by the
//! two pseudo-reduction steps, and parametric leading coefficients are
//! split into sign cases. Surviving cores have either no equality (handled
//! by the endpoint/root decomposition) or a single equality with a usable
//! leading coefficient (handled by the derivative sign split). All
//! recursive calls must strictly decrease the measure; a violation is
//! reported as an internal error rather than looping.

use std::collections::HashMap;

use crate::formula::{Atom, AtomKind, Formula};
use crate::poly::pseudo::{pseudo_step_eq_eq, pseudo_step_eq_ineq, ReciprocalDirection};
use crate::poly::{Polynomial, VarName};
use crate::rational::{rat, Rational};

use super::clauses::{
    clause_formula, dnf, guard_clauses, negate_nf, normalize_clause, simplify, ClauseForm,
};
use super::{Engine, QeError};

pub(crate) const CLAUSE_CAP: usize = 60_000;

thread_local! {
    static STATS: std::cell::RefCell<std::collections::BTreeMap<&'static str, (u64, u128)>> =
        std::cell::RefCell::new(std::collections::BTreeMap::new());
}

fn record(label: &'static str, started: std::time::Instant) {
    STATS.with(|c| {
        let mut m = c.borrow_mut();
        let e = m.entry(label).or_insert((0, 0));
        e.0 += 1;
        e.1 += started.elapsed().as_micros();
    });
}

/// Prints accumulated per-phase timing (for the profiling examples).
pub fn dump_stats() {
    STATS.with(|c| {
        for (label, (calls, us)) in c.borrow().iter() {
            eprintln!("{label:<24} {calls:>8} calls  {:>9} ms", us / 1000);
        }
    });
}

/// An interval endpoint: a symbol treated as a parameter, or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Bound {
    Var(VarName),
    Rat(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum BoundKey {
    Sym,
    Rat(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct MemoKey {
    lits: Vec<super::clauses::Lit>,
    lo: BoundKey,
    hi: BoundKey,
}

#[derive(Debug, Clone)]
pub(crate) struct MemoEntry {
    /// Result with the task variable renamed away and symbolic bounds
    /// canonicalized to `$a` / `$b`.
    formula: Formula,
    /// Whether the stored formula mentions the canonical endpoint names,
    /// so restores can skip the substitution walks.
    mentions_lo: bool,
    mentions_hi: bool,
    /// Restored variants per actual endpoint names, so a task re-queried
    /// inside one construction pays the substitution walk once.
    restored: HashMap<(Option<VarName>, Option<VarName>), Formula>,
    /// Largest post-normalization core measure; re-checked on reuse.
    core_measure: u32,
}

/// Cached interval-positivity facts, keyed like tasks.
#[derive(Debug, Clone)]
pub(crate) struct WindowEntry {
    formula: Formula,
    rows: Vec<Vec<Atom>>,
}

// canonical names used only inside memo entries
const MEMO_VAR: &str = "$t";
const MEMO_LO: &str = "$a";
const MEMO_HI: &str = "$b";

/// A normalized branch: parameter guards plus a core with at most one
/// equality whose leading coefficient is ground or guarded nonzero, and
/// all inequality degrees below the equality degree.
struct NormBranch {
    side: Vec<Atom>,
    eq: Option<Polynomial>,
    ineqs: Vec<Polynomial>,
}

impl NormBranch {
    fn measure(&self, var: &str) -> u32 {
        let e = self
            .eq
            .as_ref()
            .map(|p| p.degree_in(var).max(0) as u32)
            .unwrap_or(0);
        let i = self
            .ineqs
            .iter()
            .map(|q| 1 + q.degree_in(var).max(0) as u32)
            .max()
            .unwrap_or(0);
        e.max(i)
    }
}

#[derive(Clone)]
struct WorkBranch {
    side: Vec<Atom>,
    eqs: Vec<Polynomial>,
    ineqs: Vec<Polynomial>,
}

enum SideSign {
    Zero,
    NonZero,
    Unknown,
}

/// What the branch's own guard atoms say about a parameter polynomial,
/// up to positive-rational scaling and sign flip.
fn side_sign(side: &[Atom], p: &Polynomial) -> SideSign {
    let (key, _) = p.sign_canonical();
    for a in side {
        let (k, _) = a.poly.sign_canonical();
        if k == key {
            return match a.kind {
                AtomKind::EqZero => SideSign::Zero,
                AtomKind::GtZero => SideSign::NonZero,
            };
        }
    }
    SideSign::Unknown
}

impl Engine {
    /// Eliminates `exists var in ]lo, hi[ : /\ atoms` under `lo < hi`.
    ///
    /// `parent_measure`, when given, is the measure of the calling core;
    /// the callee's normalized cores must come out strictly smaller.
    pub(crate) fn elim_interval(
        &mut self,
        var: &str,
        atoms: Vec<Atom>,
        lo: &Bound,
        hi: &Bound,
        parent_measure: Option<u32>,
    ) -> Result<Formula, QeError> {
        self.check_budget(1 + atoms.len() as u64)?;

        let merged = match normalize_clause(atoms) {
            ClauseForm::False => return Ok(Formula::False),
            ClauseForm::Atoms(a) => a,
        };
        if !merged.iter().any(|a| a.contains_var(var)) {
            // nonempty interval: the existential is vacuous
            return Ok(clause_formula(merged));
        }

        let merged = match linear_prefilter(var, merged, lo, hi) {
            None => return Ok(Formula::False),
            Some(atoms) => atoms,
        };
        if !merged.iter().any(|a| a.contains_var(var)) {
            return Ok(clause_formula(merged));
        }

        if let Some(side) = ground_witness(var, &merged, lo, hi) {
            return Ok(clause_formula(side));
        }

        // guards ride in the key: pruning inside depends on them
        let key = memo_key(var, &merged, lo, hi);
        if let Some(entry) = self.memo.get_mut(&key) {
            if let Some(p) = parent_measure {
                if entry.core_measure >= p {
                    return Err(descent_error(entry.core_measure, p));
                }
            }
            let t_r = std::time::Instant::now();
            let lo_name = match (entry.mentions_lo, lo) {
                (true, Bound::Var(v)) => Some(v.clone()),
                _ => None,
            };
            let hi_name = match (entry.mentions_hi, hi) {
                (true, Bound::Var(v)) => Some(v.clone()),
                _ => None,
            };
            let variant = (lo_name, hi_name);
            if let Some(done) = entry.restored.get(&variant) {
                let out = done.clone();
                record("memo_restore", t_r);
                return Ok(out);
            }
            let mut out = entry.formula.clone();
            if let Some(v) = &variant.0 {
                out = crate::formula::substitute(&out, MEMO_LO, &Polynomial::var(v));
            }
            if let Some(v) = &variant.1 {
                out = crate::formula::substitute(&out, MEMO_HI, &Polynomial::var(v));
            }
            entry.restored.insert(variant, out.clone());
            record("memo_restore", t_r);
            return Ok(out);
        }

        let (task, side): (Vec<Atom>, Vec<Atom>) =
            merged.into_iter().partition(|a| a.contains_var(var));
        let t_norm = std::time::Instant::now();
        let branches = self.normalize(var, side, task)?;
        record("normalize", t_norm);
        if std::env::var("RCF_STATS").is_ok() {
            for br in &branches {
                let shape = format!(
                    "task eq_deg={} n_ineq={} max_ineq_deg={} bounds={:?}/{:?}",
                    br.eq.as_ref().map(|p| p.degree_in(var)).unwrap_or(-1),
                    br.ineqs.len(),
                    br.ineqs.iter().map(|q| q.degree_in(var)).max().unwrap_or(-1),
                    bound_key(lo), bound_key(hi),
                );
                eprintln!("{shape}");
            }
        }
        let mut worst = 0u32;
        let mut parts = Vec::new();
        for br in branches {
            let m = br.measure(var);
            worst = worst.max(m);
            if let Some(p) = parent_measure {
                if m >= p {
                    debug_descent(&br, var, lo, hi);
                    return Err(descent_error(m, p));
                }
            }
            let guards: Vec<Atom> = br
                .side
                .iter()
                .filter(|a| is_param_atom(a))
                .cloned()
                .collect();
            let core = match (&br.eq, br.ineqs.is_empty()) {
                (None, true) => Formula::True,
                (None, false) => {
                    self.case_inequalities(var, &br.ineqs, &guards, lo, hi, m)?
                }
                (Some(p), _) => {
                    if let Some(root) = solved_linear_root(p, var) {
                        solved_linear(&root, var, &br.ineqs, lo, hi)
                    } else {
                        self.case_equality(var, &p.clone(), &br.ineqs, &guards, lo, hi, m)?
                    }
                }
            };
            parts.push(Formula::and(vec![clause_formula(br.side), core]));
        }
        let t_s = std::time::Instant::now();
        let result = simplify(&Formula::or(parts));
        record("final_simplify", t_s);
        self.check_budget(result.size())?;

        let t_c = std::time::Instant::now();
        let canonical = canonicalize_bounds(&result, lo, hi);
        record("canonicalize", t_c);
        let mentions = canonical.free_vars();
        self.memo.insert(
            key,
            MemoEntry {
                mentions_lo: mentions.contains(MEMO_LO),
                mentions_hi: mentions.contains(MEMO_HI),
                formula: canonical,
                restored: HashMap::new(),
                core_measure: worst,
            },
        );
        Ok(result)
    }

    /// Drives a task to its normal form, branching on parameter guards.
    fn normalize(
        &mut self,
        var: &str,
        side: Vec<Atom>,
        task: Vec<Atom>,
    ) -> Result<Vec<NormBranch>, QeError> {
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for a in task {
            match a.kind {
                AtomKind::EqZero => eqs.push(a.poly),
                AtomKind::GtZero => ineqs.push(a.poly),
            }
        }
        let mut work = vec![WorkBranch { side, eqs, ineqs }];
        let mut done = Vec::new();
        let mut steps = 0u64;
        while let Some(br) = work.pop() {
            steps += 1;
            if steps % 64 == 0 {
                self.check_budget(steps)?;
            }
            if steps > 200_000 {
                return Err(QeError::Internal(
                    "task normalization did not terminate".to_string(),
                ));
            }
            let Some(br) = recheck(br, var) else {
                continue;
            };

            // merge equality pairs, largest degrees first
            if br.eqs.len() >= 2 {
                let mut order: Vec<usize> = (0..br.eqs.len()).collect();
                order.sort_by_key(|&i| std::cmp::Reverse(br.eqs[i].degree_in(var)));
                let (pi, qi) = (order[0], order[1]);
                let split =
                    pseudo_step_eq_eq(&br.eqs[pi].univariate(var), &br.eqs[qi].univariate(var))
                        .map_err(|e| QeError::Internal(e.to_string()))?;
                let rest: Vec<Polynomial> = br
                    .eqs
                    .iter()
                    .enumerate()
                    .filter_map(|(i, p)| (i != pi && i != qi).then(|| p.clone()))
                    .collect();
                for (guard, body) in split.branches {
                    for guard_atoms in guard_clauses(&guard) {
                        let mut nb = WorkBranch {
                            side: br.side.iter().cloned().chain(guard_atoms).collect(),
                            eqs: rest.clone(),
                            ineqs: br.ineqs.clone(),
                        };
                        for a in &body {
                            nb.eqs.push(a.poly.clone());
                        }
                        work.push(nb);
                    }
                }
                continue;
            }

            // resolve a parametric leading coefficient on the equality
            if let Some(p) = br.eqs.first() {
                let lead = p.leading_coeff_in(var);
                if !lead.is_ground() {
                    match side_sign(&br.side, &lead) {
                        SideSign::Zero => {
                            let d = p.degree_in(var) as u32;
                            let dropped = p.sub(&lead.mul(&Polynomial::term(
                                num::One::one(),
                                crate::poly::Monomial::var_pow(var, d),
                            )));
                            let mut nb = br.clone();
                            nb.eqs[0] = dropped;
                            work.push(nb);
                            continue;
                        }
                        SideSign::NonZero => {}
                        SideSign::Unknown => {
                            for guard in [
                                Atom::eq_zero(lead.clone()),
                                Atom::gt_zero(lead.clone()),
                                Atom::gt_zero(lead.neg()),
                            ] {
                                let mut nb = br.clone();
                                nb.side.push(guard);
                                work.push(nb);
                            }
                            continue;
                        }
                    }
                }

                // drive inequality degrees below the equality degree,
                // taking inequalities in ascending index order
                let d = p.degree_in(var);
                if let Some(qi) = br.ineqs.iter().position(|q| q.degree_in(var) >= d) {
                    let split = pseudo_step_eq_ineq(
                        &p.univariate(var),
                        &br.ineqs[qi].univariate(var),
                    )
                    .map_err(|e| QeError::Internal(e.to_string()))?;
                    let rest: Vec<Polynomial> = br
                        .ineqs
                        .iter()
                        .enumerate()
                        .filter_map(|(i, q)| (i != qi).then(|| q.clone()))
                        .collect();
                    for (guard, body) in split.branches {
                        for guard_atoms in guard_clauses(&guard) {
                            let mut nb = WorkBranch {
                                side: br.side.iter().cloned().chain(guard_atoms).collect(),
                                eqs: Vec::new(),
                                ineqs: rest.clone(),
                            };
                            for a in &body {
                                match a.kind {
                                    AtomKind::EqZero => nb.eqs.push(a.poly.clone()),
                                    AtomKind::GtZero => nb.ineqs.push(a.poly.clone()),
                                }
                            }
                            work.push(nb);
                        }
                    }
                    continue;
                }
            }

            done.push(NormBranch {
                side: br.side,
                eq: br.eqs.into_iter().next(),
                ineqs: br.ineqs,
            });
        }
        Ok(done)
    }

    /// Case with no equality: `exists x in ]lo,hi[ : /\ q_j > 0`.
    ///
    /// Either the constraints hold on the whole interval, or they hold on a
    /// sub-interval whose ends are constraint roots or the interval ends.
    fn case_inequalities(
        &mut self,
        var: &str,
        qs: &[Polynomial],
        guards: &[Atom],
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Formula, QeError> {
        let whole = self.all_positive_on(var, qs, lo, hi, hbar)?;
        let ground = is_ground_task(var, &qs.iter().collect::<Vec<_>>(), lo, hi);
        if ground && whole == Formula::True {
            return Ok(Formula::True);
        }
        let mut parts = vec![whole];
        parts.extend(self.window_cases(var, qs, None, guards, ground, lo, hi, hbar)?);
        Ok(simplify(&Formula::or(parts)))
    }

    /// Case with one equality `p = 0` (leading coefficient usable) and
    /// inequalities of strictly smaller degree. Splits on the sign of the
    /// derivative at the root; the decreasing case mirrors the increasing
    /// case with `p` negated.
    fn case_equality(
        &mut self,
        var: &str,
        p: &Polynomial,
        qs: &[Polynomial],
        guards: &[Atom],
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Formula, QeError> {
        let ground = {
            let mut polys: Vec<&Polynomial> = qs.iter().collect();
            polys.push(p);
            is_ground_task(var, &polys, lo, hi)
        };
        let pp = p.derivative(var);
        let mut stationary = vec![Atom::eq_zero(p.clone()), Atom::eq_zero(pp.clone())];
        stationary.extend(qs.iter().map(|q| Atom::gt_zero(q.clone())));
        stationary.extend(guards.iter().cloned());
        let phi1 = self.elim_interval(var, stationary, lo, hi, Some(hbar))?;
        if ground && phi1 == Formula::True {
            return Ok(Formula::True);
        }
        let phi2 = self.crossing_case(var, p, qs, guards, ground, lo, hi, hbar)?;
        if ground && phi2 == Formula::True {
            return Ok(Formula::True);
        }
        let phi3 = self.crossing_case(var, &p.neg(), qs, guards, ground, lo, hi, hbar)?;
        Ok(simplify(&Formula::or(vec![phi1, phi2, phi3])))
    }

    /// `exists x in ]lo,hi[ : p(x) = 0 /\ p'(x) > 0 /\ /\ q_j > 0`:
    /// an increasing crossing of zero inside a sub-interval on which the
    /// derivative and all constraints stay positive, so `p` runs from
    /// negative to positive across it.
    #[allow(clippy::too_many_arguments)]
    fn crossing_case(
        &mut self,
        var: &str,
        p: &Polynomial,
        qs: &[Polynomial],
        guards: &[Atom],
        ground: bool,
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Formula, QeError> {
        let pp = p.derivative(var);
        let mut window: Vec<Polynomial> = Vec::new();
        let mut side_pp = Formula::True;
        if pp.contains_var(var) {
            window.push(pp.clone());
        } else {
            // degree-one equality: the derivative is a parameter
            side_pp = Formula::gt_zero(pp.clone());
        }
        window.extend(qs.iter().cloned());

        let p_at_lo_neg = Formula::gt_zero(at_bound(p, var, lo).neg());
        let p_at_hi_pos = Formula::gt_zero(at_bound(p, var, hi));

        // the window holds on the whole interval and p crosses it
        let direct = simplify(&Formula::and(vec![
            p_at_lo_neg,
            p_at_hi_pos,
            self.all_positive_on(var, &window, lo, hi, hbar)?,
        ]));
        if ground && side_pp == Formula::True && direct == Formula::True {
            return Ok(Formula::True);
        }
        if side_pp == Formula::False {
            return Ok(Formula::False);
        }
        let mut parts = vec![direct];
        parts.extend(self.window_cases(var, &window, Some(p), guards, ground, lo, hi, hbar)?);
        let joined = simplify(&Formula::or(parts));
        Ok(simplify(&Formula::and(vec![side_pp, joined])))
    }

    /// Disjuncts for sub-intervals bounded by window roots.
    ///
    /// With `crossing = Some(p)`, the sub-interval must carry `p` from
    /// negative to positive; its ends pick up the matching sign conditions
    /// and the interval ends contribute `p(lo) < 0` / `p(hi) > 0`.
    /// `guards` are the enclosing branch's parameter atoms, passed into
    /// every sub-elimination so degenerate coefficient cases prune.
    #[allow(clippy::too_many_arguments)]
    fn window_cases(
        &mut self,
        var: &str,
        window: &[Polynomial],
        crossing: Option<&Polynomial>,
        guards: &[Atom],
        ground: bool,
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Vec<Formula>, QeError> {
        let guards = guards.to_vec();
        let mut parts = Vec::new();
        macro_rules! push_part {
            ($e:expr) => {{
                let part = $e;
                if ground && part == Formula::True {
                    return Ok(vec![Formula::True]);
                }
                parts.push(part);
            }};
        }

        // sub-interval ]lo, u[ with u a window root
        let u = self.fresh_var("u");
        let up = Polynomial::var(&u);
        let (_, rows_lo_u) =
            self.window_on(var, window, lo, &Bound::Var(u.clone()), hbar)?;
        let left_cond = crossing.map(|p| Formula::gt_zero(at_bound(p, var, lo).neg()));
        for qi in window {
            let mut extra = vec![Atom::eq_zero(qi.subst(var, &up))];
            if let Some(p) = crossing {
                extra.push(Atom::gt_zero(p.subst(var, &up)));
            }
            let rooted = self.rows_exist(&u, &extra, &rows_lo_u, &guards, lo, hi, hbar)?;
            push_part!(simplify(&Formula::and(vec![
                left_cond.clone().unwrap_or(Formula::True),
                rooted,
            ])));
        }

        // sub-interval ]v, hi[ with v a window root
        let v = self.fresh_var("v");
        let vp = Polynomial::var(&v);
        let (_, rows_v_hi) =
            self.window_on(var, window, &Bound::Var(v.clone()), hi, hbar)?;
        let right_cond = crossing.map(|p| Formula::gt_zero(at_bound(p, var, hi)));
        for qi in window {
            let mut extra = vec![Atom::eq_zero(qi.subst(var, &vp))];
            if let Some(p) = crossing {
                extra.push(Atom::gt_zero(p.subst(var, &vp).neg()));
            }
            let rooted = self.rows_exist(&v, &extra, &rows_v_hi, &guards, lo, hi, hbar)?;
            push_part!(simplify(&Formula::and(vec![
                right_cond.clone().unwrap_or(Formula::True),
                rooted,
            ])));
        }

        // sub-interval ]u, v[ between two window roots, with u < v forced
        // by eliminating v over ]u, hi[ first
        let u2 = self.fresh_var("u");
        let v2 = self.fresh_var("v");
        let u2p = Polynomial::var(&u2);
        let v2p = Polynomial::var(&v2);
        let t_uv = std::time::Instant::now();
        let (_, rows_uv) = self.window_on(
            var,
            window,
            &Bound::Var(u2.clone()),
            &Bound::Var(v2.clone()),
            hbar,
        )?;
        if std::env::var("RCF_STATS").is_ok() {
            eprintln!("rows_uv: {} clauses in {} ms (window {} polys, hbar {})", rows_uv.len(), t_uv.elapsed().as_millis(), window.len(), hbar);
        }
        for qj in window {
            let mut extra_v = vec![Atom::eq_zero(qj.subst(var, &v2p))];
            if let Some(p) = crossing {
                extra_v.push(Atom::gt_zero(p.subst(var, &v2p)));
            }
            let mut u_rows: Vec<Vec<Atom>> = Vec::new();
            for row in &rows_uv {
                let (v_atoms, residue): (Vec<Atom>, Vec<Atom>) = extra_v
                    .iter()
                    .chain(row.iter())
                    .cloned()
                    .partition(|a| a.contains_var(&v2));
                let mut task = v_atoms;
                task.extend(guards.iter().cloned());
                let inner_v =
                    self.elim_interval(&v2, task, &Bound::Var(u2.clone()), hi, Some(hbar))?;
                // distribute the residue over the clauses of the inner result
                for mut clause in dnf(&inner_v, CLAUSE_CAP)? {
                    clause.extend(residue.iter().cloned());
                    u_rows.push(clause);
                }
            }
            for qi in window {
                let mut extra_u = vec![Atom::eq_zero(qi.subst(var, &u2p))];
                if let Some(p) = crossing {
                    extra_u.push(Atom::gt_zero(p.subst(var, &u2p).neg()));
                }
                push_part!(self.rows_exist(&u2, &extra_u, &u_rows, &guards, lo, hi, hbar)?);
            }
        }
        Ok(parts)
    }

    /// Or over rows of `exists ev in ]lo,hi[ : extra /\ row /\ guards`.
    /// Atoms free of `ev` are conjoined outside the elimination.
    #[allow(clippy::too_many_arguments)]
    fn rows_exist(
        &mut self,
        ev: &str,
        extra: &[Atom],
        rows: &[Vec<Atom>],
        guards: &[Atom],
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Formula, QeError> {
        let mut parts = Vec::new();
        for row in rows {
            let merged = match normalize_clause(
                extra.iter().chain(row.iter()).chain(guards.iter()).cloned(),
            ) {
                ClauseForm::False => continue,
                ClauseForm::Atoms(a) => a,
            };
            let (ev_atoms, rest): (Vec<Atom>, Vec<Atom>) =
                merged.into_iter().partition(|a| a.contains_var(ev));
            let mut task = ev_atoms;
            task.extend(rest.iter().filter(|a| is_param_atom(a)).cloned());
            let inner = self.elim_interval(ev, task, lo, hi, Some(hbar))?;
            parts.push(Formula::and(vec![clause_formula(rest), inner]));
        }
        Ok(simplify(&Formula::or(parts)))
    }

    /// Cached pair of the interval-positivity formula and its DNF rows for
    /// `forall x in ]lo,hi[ : /\ window > 0`.
    fn window_on(
        &mut self,
        var: &str,
        window: &[Polynomial],
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<(Formula, Vec<Vec<Atom>>), QeError> {
        let key = window_key(var, window, lo, hi);
        if let Some(entry) = self.windows.get(&key) {
            let formula = restore_bounds(&entry.formula, lo, hi);
            let rows = entry
                .rows
                .iter()
                .map(|row| row.iter().map(|a| restore_atom(a, lo, hi)).collect())
                .collect();
            return Ok((formula, rows));
        }
        let t_a = std::time::Instant::now();
        let formula = self.all_positive_on(var, window, lo, hi, hbar)?;
        record("all_positive", t_a);
        let t_d = std::time::Instant::now();
        let rows = dnf(&formula, CLAUSE_CAP)?;
        record("window_dnf", t_d);
        let entry = WindowEntry {
            formula: canonicalize_bounds(&formula, lo, hi),
            rows: rows
                .iter()
                .map(|row| row.iter().map(|a| canonicalize_atom(a, lo, hi)).collect())
                .collect(),
        };
        self.windows.insert(key, entry);
        Ok((formula, rows))
    }

    /// `forall x in ]lo,hi[ : /\ q > 0`, rewritten without the universal:
    /// each `q` has no root inside the interval and is positive just right
    /// of `lo` (positive value, or a zero with its first nonvanishing
    /// derivative positive). Computed without ambient guards so the result
    /// is reusable and safe to negate.
    fn all_positive_on(
        &mut self,
        var: &str,
        qs: &[Polynomial],
        lo: &Bound,
        hi: &Bound,
        hbar: u32,
    ) -> Result<Formula, QeError> {
        let mut parts = Vec::new();
        for q in qs {
            parts.push(positive_right_of(q, var, lo));
            let t_e = std::time::Instant::now();
            let rooted =
                self.elim_interval(var, vec![Atom::eq_zero(q.clone())], lo, hi, Some(hbar))?;
            record("ap_elim", t_e);
            let t_n = std::time::Instant::now();
            let neg = negate_nf(&simplify(&rooted));
            record("ap_negate", t_n);
            parts.push(neg);
        }
        let t_s = std::time::Instant::now();
        let out = simplify(&Formula::and(parts));
        record("ap_simplify", t_s);
        Ok(out)
    }
}

/// Atoms over coefficient parameters only: no engine-fresh variables.
/// These are the facts worth threading into sub-eliminations.
fn is_param_atom(a: &Atom) -> bool {
    a.poly.vars().iter().all(|v| !v.starts_with('$'))
}

/// A task whose polynomials involve only the eliminated variable and whose
/// bounds are literal: every disjunct of its decomposition folds to a
/// constant, so evaluation can stop at the first `true`.
fn is_ground_task(var: &str, polys: &[&Polynomial], lo: &Bound, hi: &Bound) -> bool {
    matches!(lo, Bound::Rat(_))
        && matches!(hi, Bound::Rat(_))
        && polys
            .iter()
            .all(|p| p.vars().iter().all(|v| v == var))
}

/// Cheap existential witnesses for ground tasks over a literal interval.
///
/// A conjunction of strict inequalities holds at some rational sample
/// point, or a single equation changes sign between two rational points
/// (a root in between, by the intermediate value property). Returns the
/// variable-free side atoms on success.
fn ground_witness(var: &str, merged: &[Atom], lo: &Bound, hi: &Bound) -> Option<Vec<Atom>> {
    let (Bound::Rat(l), Bound::Rat(h)) = (lo, hi) else {
        return None;
    };
    // fold ground atoms first: a false one refutes the whole conjunction
    let mut live = Vec::with_capacity(merged.len());
    for a in merged {
        match a.ground_value() {
            Some(false) => return None,
            Some(true) => {}
            None => live.push(a),
        }
    }
    let (task, side): (Vec<&Atom>, Vec<&Atom>) =
        live.into_iter().partition(|a| a.contains_var(var));
    if task
        .iter()
        .any(|a| a.poly.vars().iter().any(|v| v != var))
    {
        return None;
    }
    let eqs: Vec<&Polynomial> = task
        .iter()
        .filter(|a| a.kind == AtomKind::EqZero)
        .map(|a| &a.poly)
        .collect();
    let ineqs: Vec<&Polynomial> = task
        .iter()
        .filter(|a| a.kind == AtomKind::GtZero)
        .map(|a| &a.poly)
        .collect();
    let sample = |r: &Rational, p: &Polynomial| -> i32 {
        crate::rational::sign(&p.subst_rational(var, r).as_constant().unwrap())
    };
    let step = (h - l) / rat(13);
    let mut points: Vec<Rational> = vec![l.clone()];
    points.extend((1..13).map(|k| l + step.clone() * rat(k)));
    points.push(h.clone());
    let witness = || Some(side.iter().map(|a| (*a).clone()).collect());

    if eqs.is_empty() {
        // point witness for pure inequalities
        for pt in &points[1..13] {
            if ineqs.iter().all(|q| sample(pt, q) > 0) {
                return witness();
            }
        }
        return None;
    }
    if eqs.len() > 1 {
        return None;
    }
    let p = eqs[0];

    // sign-change brackets of the equation, refined toward the root until
    // every inequality is certified positive on the whole bracket
    for w in points.windows(2) {
        let (mut a, mut b) = (w[0].clone(), w[1].clone());
        let (sa, sb) = (sample(&a, p), sample(&b, p));
        if sa == 0 || sb == 0 || sa == sb {
            continue;
        }
        let mut sa = sa;
        for _ in 0..24 {
            if ineqs
                .iter()
                .all(|q| enclosure_positive(q, var, &a, &b))
            {
                return witness();
            }
            let mid = (a.clone() + b.clone()) / rat(2);
            let sm = sample(&mid, p);
            if sm == 0 {
                // rational root: decide the inequalities exactly at it
                if ineqs.iter().all(|q| sample(&mid, q) > 0) {
                    return witness();
                }
                break;
            }
            if sm == sa {
                a = mid;
            } else {
                b = mid;
            }
            let _ = &mut sa;
        }
    }
    None
}

/// Exact interval enclosure by Horner evaluation: true when `q` is
/// certified strictly positive on the whole closed interval `[a, b]`.
fn enclosure_positive(q: &Polynomial, var: &str, a: &Rational, b: &Rational) -> bool {
    let Ok(coeffs) = q.dense_coeffs(var) else {
        return false;
    };
    if coeffs.is_empty() {
        return false;
    }
    let mut lo = Rational::from_integer(0.into());
    let mut hi = Rational::from_integer(0.into());
    let mut first = true;
    for c in coeffs.iter().rev() {
        if first {
            lo = c.clone();
            hi = c.clone();
            first = false;
            continue;
        }
        // [lo,hi] * [a,b] + c
        let products = [
            lo.clone() * a.clone(),
            lo.clone() * b.clone(),
            hi.clone() * a.clone(),
            hi.clone() * b.clone(),
        ];
        let mut new_lo = products[0].clone();
        let mut new_hi = products[0].clone();
        for p in &products[1..] {
            new_lo = new_lo.min(p.clone());
            new_hi = new_hi.max(p.clone());
        }
        lo = new_lo + c.clone();
        hi = new_hi + c.clone();
    }
    crate::rational::sign(&lo) > 0
}

/// Interval arithmetic over the ground linear atoms of a task: any such
/// atom implied by `var` ranging over a literal interval is dropped, and a
/// task whose linear constraints carve out an empty sub-interval is
/// infeasible outright. Everything else passes through untouched.
fn linear_prefilter(var: &str, atoms: Vec<Atom>, lo: &Bound, hi: &Bound) -> Option<Vec<Atom>> {
    // open bounds where literal; unknown when symbolic
    let mut lower = match lo {
        Bound::Rat(r) => Some(r.clone()),
        Bound::Var(_) => None,
    };
    let mut upper = match hi {
        Bound::Rat(r) => Some(r.clone()),
        Bound::Var(_) => None,
    };
    let mut kept = Vec::with_capacity(atoms.len());
    let mut pins: Vec<Rational> = Vec::new();
    for atom in atoms {
        let ground_linear = atom.poly.degree_in(var) == 1
            && atom.poly.leading_coeff_in(var).as_constant().is_some()
            && atom.poly.coeff_in(var, 0).as_constant().is_some();
        if !ground_linear {
            kept.push(atom);
            continue;
        }
        let c = atom.poly.leading_coeff_in(var).as_constant().unwrap();
        let d = atom.poly.coeff_in(var, 0).as_constant().unwrap();
        let root = -d / c.clone();
        match atom.kind {
            AtomKind::EqZero => {
                pins.push(root);
                kept.push(atom);
            }
            AtomKind::GtZero => {
                if crate::rational::sign(&c) > 0 {
                    // var > root: implied when an existing lower bound covers it
                    match &lower {
                        Some(b) if root < *b => continue,
                        _ => {}
                    }
                    lower = Some(root);
                } else {
                    match &upper {
                        Some(b) if root > *b => continue,
                        _ => {}
                    }
                    upper = Some(root);
                }
                kept.push(atom);
            }
        }
    }
    if let (Some(l), Some(u)) = (&lower, &upper) {
        if l >= u {
            return None;
        }
    }
    pins.sort();
    pins.dedup();
    if pins.len() > 1 {
        return None;
    }
    for pin in pins {
        if lower.as_ref().is_some_and(|l| pin <= *l) {
            return None;
        }
        if upper.as_ref().is_some_and(|u| pin >= *u) {
            return None;
        }
    }
    Some(kept)
}

/// The unique root of a degree-one equality whose leading coefficient is a
/// nonzero constant: `c*var + t = 0` solves to `-t/c`, a polynomial in the
/// parameters.
fn solved_linear_root(p: &Polynomial, var: &str) -> Option<Polynomial> {
    if p.degree_in(var) != 1 {
        return None;
    }
    let lead = p.leading_coeff_in(var).as_constant()?;
    let tail = p.coeff_in(var, 0);
    Some(tail.scale(&(-lead.recip())))
}

/// `exists var in ]lo,hi[ : var = root /\ /\ q > 0` eliminated by direct
/// substitution of the solved root.
fn solved_linear(
    root: &Polynomial,
    var: &str,
    ineqs: &[Polynomial],
    lo: &Bound,
    hi: &Bound,
) -> Formula {
    let mut parts = Vec::new();
    parts.push(Formula::gt_zero(root.sub(&at_poly(lo))));
    parts.push(Formula::gt_zero(at_poly(hi).sub(root)));
    for q in ineqs {
        parts.push(Formula::gt_zero(q.subst(var, root)));
    }
    simplify(&Formula::and(parts))
}

fn at_poly(b: &Bound) -> Polynomial {
    match b {
        Bound::Var(v) => Polynomial::var(v),
        Bound::Rat(r) => Polynomial::constant(r.clone()),
    }
}

/// Sign of `q` immediately to the right of the point: either `q > 0` there,
/// or `q` vanishes together with its first `k-1` derivatives and the `k`-th
/// derivative is positive.
fn positive_right_of(q: &Polynomial, var: &str, at: &Bound) -> Formula {
    let d = q.degree_in(var);
    if d <= 0 {
        return Formula::gt_zero(at_bound(q, var, at));
    }
    let mut derivs = vec![q.clone()];
    for _ in 0..d {
        let last = derivs.last().unwrap();
        derivs.push(last.derivative(var));
    }
    let mut cases = Vec::new();
    for k in 0..derivs.len() {
        let mut conj: Vec<Formula> = derivs[..k]
            .iter()
            .map(|g| Formula::eq_zero(at_bound(g, var, at)))
            .collect();
        conj.push(Formula::gt_zero(at_bound(&derivs[k], var, at)));
        cases.push(Formula::and(conj));
    }
    Formula::or(cases)
}

fn at_bound(p: &Polynomial, var: &str, at: &Bound) -> Polynomial {
    match at {
        Bound::Var(v) => p.subst(var, &Polynomial::var(v)),
        Bound::Rat(r) => p.subst_rational(var, r),
    }
}

fn recheck(br: WorkBranch, var: &str) -> Option<WorkBranch> {
    let all = br
        .side
        .into_iter()
        .chain(br.eqs.into_iter().map(Atom::eq_zero))
        .chain(br.ineqs.into_iter().map(Atom::gt_zero));
    match normalize_clause(all) {
        ClauseForm::False => None,
        ClauseForm::Atoms(atoms) => {
            if !linear_feasible(&atoms) || !fm_feasible(&atoms) {
                return None;
            }
            let mut side = Vec::new();
            let mut eqs = Vec::new();
            let mut ineqs = Vec::new();
            for a in atoms {
                if !a.contains_var(var) {
                    side.push(a);
                } else {
                    match a.kind {
                        AtomKind::EqZero => eqs.push(a.poly),
                        AtomKind::GtZero => ineqs.push(a.poly),
                    }
                }
            }
            Some(WorkBranch { side, eqs, ineqs })
        }
    }
}

/// Joint satisfiability of the ground multilinear atoms of a conjunction,
/// by equality substitution and Fourier-Motzkin elimination over the
/// rationals. Nonlinear or parametric atoms are ignored, so `false` is
/// always a sound refutation. Gives up (feasible) past a small size cap.
pub(crate) fn fm_feasible(atoms: &[Atom]) -> bool {
    use std::collections::BTreeMap as Map;
    type Row = (Map<VarName, Rational>, Rational);

    fn as_row(p: &Polynomial) -> Option<Row> {
        let mut coeffs = Map::new();
        let mut konst = Rational::from_integer(0.into());
        for (m, c) in p.terms() {
            match m.total_degree() {
                0 => konst = c.clone(),
                1 => {
                    let v = m.vars().next().unwrap().clone();
                    coeffs.insert(v, c.clone());
                }
                _ => return None,
            }
        }
        Some((coeffs, konst))
    }

    let mut eqs: Vec<Row> = Vec::new();
    let mut gts: Vec<Row> = Vec::new();
    for a in atoms {
        let Some(row) = as_row(&a.poly) else { continue };
        match a.kind {
            AtomKind::EqZero => eqs.push(row),
            AtomKind::GtZero => gts.push(row),
        }
    }
    // substitute equalities away
    while let Some(pos) = eqs.iter().position(|(c, _)| !c.is_empty()) {
        let (coeffs, konst) = eqs.remove(pos);
        let (v, cv) = coeffs.iter().next().map(|(v, c)| (v.clone(), c.clone())).unwrap();
        let subst = |row: &mut Row| {
            if let Some(av) = row.0.remove(&v) {
                let factor = av / cv.clone();
                for (w, cw) in &coeffs {
                    if *w == v {
                        continue;
                    }
                    let e = row.0.entry(w.clone()).or_insert_with(|| Rational::from_integer(0.into()));
                    *e -= factor.clone() * cw.clone();
                    if num::Zero::is_zero(e) {
                        row.0.remove(w);
                    }
                }
                row.1 -= factor * konst.clone();
            }
        };
        for r in eqs.iter_mut() {
            subst(r);
        }
        for r in gts.iter_mut() {
            subst(r);
        }
    }
    if eqs.iter().any(|(_, k)| !num::Zero::is_zero(k)) {
        return false;
    }
    // eliminate variables from the strict inequalities
    loop {
        if gts.iter().any(|(c, k)| c.is_empty() && crate::rational::sign(k) <= 0) {
            return false;
        }
        gts.retain(|(c, _)| !c.is_empty());
        let Some(v) = gts.first().and_then(|(c, _)| c.keys().next().cloned()) else {
            return true;
        };
        let (with_v, rest): (Vec<Row>, Vec<Row>) =
            gts.into_iter().partition(|(c, _)| c.contains_key(&v));
        let (ups, downs): (Vec<Row>, Vec<Row>) = with_v
            .into_iter()
            .partition(|(c, _)| crate::rational::sign(&c[&v]) > 0);
        let mut next = rest;
        for (cu, ku) in &ups {
            for (cd, kd) in &downs {
                // combine a*v + ... > 0 and -b*v + ... > 0 with a, b > 0
                let a = cu[&v].clone();
                let b = -cd[&v].clone();
                let mut coeffs: Map<VarName, Rational> = Map::new();
                let mut konst = ku.clone() * b.clone() + kd.clone() * a.clone();
                for (w, c) in cu {
                    if *w != v {
                        coeffs.insert(w.clone(), c.clone() * b.clone());
                    }
                }
                for (w, c) in cd {
                    if *w == v {
                        continue;
                    }
                    let e = coeffs.entry(w.clone()).or_insert_with(|| Rational::from_integer(0.into()));
                    *e += c.clone() * a.clone();
                    if num::Zero::is_zero(e) {
                        coeffs.remove(w);
                    }
                }
                let _ = &mut konst;
                next.push((coeffs, konst));
            }
        }
        if next.len() > 128 {
            return true; // give up, feasibility assumed
        }
        gts = next;
    }
}

/// Joint satisfiability over the rationals of the ground linear one-variable
/// atoms in a conjunction, per variable. Anything else passes.
pub(crate) fn linear_feasible(atoms: &[Atom]) -> bool {
    use std::collections::HashMap as Map;
    struct Range {
        lower: Option<Rational>,
        upper: Option<Rational>,
        pin: Option<Rational>,
    }
    let mut ranges: Map<VarName, Range> = Map::new();
    for atom in atoms {
        let Some(v) = atom.poly.only_var() else {
            continue;
        };
        if atom.poly.degree_in(&v) != 1 {
            continue;
        }
        let c = atom.poly.leading_coeff_in(&v).as_constant().unwrap();
        let d = atom.poly.coeff_in(&v, 0).as_constant().unwrap();
        let root = -d / c.clone();
        let r = ranges.entry(v).or_insert(Range {
            lower: None,
            upper: None,
            pin: None,
        });
        match atom.kind {
            AtomKind::EqZero => match &r.pin {
                Some(p) if *p != root => return false,
                _ => r.pin = Some(root),
            },
            AtomKind::GtZero => {
                if crate::rational::sign(&c) > 0 {
                    if r.lower.as_ref().map(|b| root > *b).unwrap_or(true) {
                        r.lower = Some(root);
                    }
                } else if r.upper.as_ref().map(|b| root < *b).unwrap_or(true) {
                    r.upper = Some(root);
                }
            }
        }
    }
    for r in ranges.values() {
        if let (Some(l), Some(u)) = (&r.lower, &r.upper) {
            if l >= u {
                return false;
            }
        }
        if let Some(p) = &r.pin {
            if r.lower.as_ref().is_some_and(|l| p <= l) {
                return false;
            }
            if r.upper.as_ref().is_some_and(|u| p >= u) {
                return false;
            }
        }
    }
    true
}

fn descent_error(child: u32, parent: u32) -> QeError {
    QeError::Internal(format!(
        "degree measure failed to descend: child core at {child}, parent at {parent}"
    ))
}

fn debug_descent(br: &NormBranch, var: &str, lo: &Bound, hi: &Bound) {
    if std::env::var("RCF_DESCENT").is_ok() {
        eprintln!(
            "DESCENT task var={var} eq={:?} ineqs={:?} side={:?} lo={lo:?} hi={hi:?}",
            br.eq.as_ref().map(|p| p.to_string()),
            br.ineqs.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            br.side.iter().map(|a| format!("{}", Formula::Atom(a.clone()))).collect::<Vec<_>>(),
        );
    }
}

fn memo_key(var: &str, all_atoms: &[Atom], lo: &Bound, hi: &Bound) -> MemoKey {
    let rename = Polynomial::var(MEMO_VAR);
    let renamed = all_atoms.iter().map(|a| Atom {
        kind: a.kind,
        poly: a.poly.subst(var, &rename),
    });
    // atoms arrive normalized, so renaming cannot introduce a contradiction
    let lits = super::clauses::clause_ids(renamed).unwrap_or_default();
    MemoKey {
        lits,
        lo: bound_key(lo),
        hi: bound_key(hi),
    }
}

/// Key for a window of polynomials, viewed as a set (not as a clause:
/// window members may well be mutually contradictory as constraints).
fn window_key(var: &str, window: &[Polynomial], lo: &Bound, hi: &Bound) -> MemoKey {
    let rename = Polynomial::var(MEMO_VAR);
    let mut lits: Vec<super::clauses::Lit> = window
        .iter()
        .map(|q| {
            let (id, flipped) = super::clauses::signed_id(&q.subst(var, &rename));
            let state = if flipped {
                super::clauses::SignState::Neg
            } else {
                super::clauses::SignState::Pos
            };
            (id, state)
        })
        .collect();
    lits.sort();
    lits.dedup();
    MemoKey {
        lits,
        lo: bound_key(lo),
        hi: bound_key(hi),
    }
}

fn bound_key(b: &Bound) -> BoundKey {
    match b {
        Bound::Var(_) => BoundKey::Sym,
        Bound::Rat(r) => BoundKey::Rat(r.clone()),
    }
}

fn canonicalize_bounds(f: &Formula, lo: &Bound, hi: &Bound) -> Formula {
    let mut out = f.clone();
    if let Bound::Var(v) = lo {
        out = crate::formula::substitute(&out, v, &Polynomial::var(MEMO_LO));
    }
    if let Bound::Var(v) = hi {
        out = crate::formula::substitute(&out, v, &Polynomial::var(MEMO_HI));
    }
    out
}

fn restore_bounds(f: &Formula, lo: &Bound, hi: &Bound) -> Formula {
    let mut out = f.clone();
    if let Bound::Var(v) = lo {
        out = crate::formula::substitute(&out, MEMO_LO, &Polynomial::var(v));
    }
    if let Bound::Var(v) = hi {
        out = crate::formula::substitute(&out, MEMO_HI, &Polynomial::var(v));
    }
    out
}

fn canonicalize_atom(a: &Atom, lo: &Bound, hi: &Bound) -> Atom {
    let mut poly = a.poly.clone();
    if let Bound::Var(v) = lo {
        poly = poly.subst(v, &Polynomial::var(MEMO_LO));
    }
    if let Bound::Var(v) = hi {
        poly = poly.subst(v, &Polynomial::var(MEMO_HI));
    }
    Atom { kind: a.kind, poly }
}

fn restore_atom(a: &Atom, lo: &Bound, hi: &Bound) -> Atom {
    let mut poly = a.poly.clone();
    if let Bound::Var(v) = lo {
        poly = poly.subst(MEMO_LO, &Polynomial::var(v));
    }
    if let Bound::Var(v) = hi {
        poly = poly.subst(MEMO_HI, &Polynomial::var(v));
    }
    Atom { kind: a.kind, poly }
}

impl Engine {
    /// The five-way split for an unbounded existential over a conjunction
    /// of atoms that all mention the variable.
    pub(crate) fn split_unbounded_atoms(
        &mut self,
        var: &str,
        atoms: &[Atom],
    ) -> Result<Formula, QeError> {
        use crate::poly::pseudo::reciprocal_transform;

        let zero = Bound::Rat(rat(0));
        let one = Bound::Rat(rat(1));
        let ground = atoms
            .iter()
            .all(|a| a.poly.vars().iter().all(|v| v == var));

        // x < -1 and x > 1 via x = -1/y and x = 1/y with y in ]0,1[
        let y_neg = self.fresh_var("y");
        let neg_atoms: Vec<Atom> = atoms
            .iter()
            .map(|a| reciprocal_transform(a, var, &y_neg, ReciprocalDirection::Neg))
            .collect();
        let y_pos = self.fresh_var("y");
        let pos_atoms: Vec<Atom> = atoms
            .iter()
            .map(|a| reciprocal_transform(a, var, &y_pos, ReciprocalDirection::Pos))
            .collect();

        let minus_one = clause_eval(atoms, var, &rat(-1));
        let plus_one = clause_eval(atoms, var, &rat(1));

        if ground {
            // probe every branch cheaply before any full elimination
            if minus_one == Formula::True || plus_one == Formula::True {
                return Ok(Formula::True);
            }
            let own_atoms = atoms.to_vec();
            let minus1 = Bound::Rat(rat(-1));
            let probes: [(&str, &[Atom], &Bound, &Bound); 3] = [
                (&y_neg, &neg_atoms, &zero, &one),
                (var, &own_atoms, &minus1, &one),
                (&y_pos, &pos_atoms, &zero, &one),
            ];
            for (v, task, l, h) in probes {
                if ground_witness(v, task, l, h).is_some() {
                    return Ok(Formula::True);
                }
            }
        }

        let far_left = self.elim_interval(&y_neg, neg_atoms, &zero, &one, None)?;
        if ground && far_left == Formula::True {
            return Ok(Formula::True);
        }
        let middle = self.elim_interval(var, atoms.to_vec(), &Bound::Rat(rat(-1)), &one, None)?;
        if ground && middle == Formula::True {
            return Ok(Formula::True);
        }
        let far_right = self.elim_interval(&y_pos, pos_atoms, &zero, &one, None)?;

        Ok(simplify(&Formula::or(vec![
            far_left, minus_one, middle, plus_one, far_right,
        ])))
    }
}

fn clause_eval(atoms: &[Atom], var: &str, value: &Rational) -> Formula {
    Formula::and(
        atoms
            .iter()
            .map(|a| Formula::atom(a.kind, a.poly.subst_rational(var, value)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::qe::Budget;
    use crate::rational::ratio;

    fn engine() -> Engine {
        Engine::new(Budget::default())
    }

    fn decide(text: &str) -> bool {
        let mut eng = engine();
        let f = parse(text).unwrap();
        let out = eng.qe_full(&f).unwrap();
        out.ground_eval()
            .unwrap_or_else(|| panic!("non-ground result: {out}"))
    }

    #[test]
    fn ground_sentences() {
        assert!(decide("0 < 1"));
        assert!(!decide("1 < 0"));
        assert!(decide("true"));
    }

    #[test]
    fn simple_existentials() {
        assert!(decide("exists x. x = 0"));
        assert!(decide("exists x. x - 2 = 0"));
        assert!(decide("exists x. x + 1 = 0"));
        assert!(decide("exists x. x > 0 /\\ x < 1"));
        assert!(!decide("exists x. x > 0 /\\ x + 1 < 0"));
    }

    #[test]
    fn sqrt_two_exists() {
        assert!(decide("exists x. x*x = 2"));
        assert!(!decide("exists x. x*x = -1"));
        assert!(decide("exists x. x*x = 2 /\\ x > 0"));
        assert!(!decide("exists x. x*x = 2 /\\ x > 3/2"));
    }

    #[test]
    fn universal_squares() {
        assert!(decide("forall x. x*x >= 0"));
        assert!(!decide("forall x. x*x > 0"));
    }

    #[test]
    fn strictly_positive_window() {
        // -x > 0 on ]0,1[ is empty: the boundary-root case must not leak
        let mut eng = engine();
        let atoms = vec![Atom::gt_zero(Polynomial::var("x").neg())];
        let out = eng
            .elim_interval("x", atoms, &Bound::Rat(rat(0)), &Bound::Rat(rat(1)), None)
            .unwrap();
        assert_eq!(out, Formula::False);

        let atoms = vec![Atom::gt_zero(Polynomial::var("x"))];
        let out = eng
            .elim_interval("x", atoms, &Bound::Rat(rat(0)), &Bound::Rat(rat(1)), None)
            .unwrap();
        assert_eq!(out, Formula::True);
    }

    #[test]
    fn cubic_root_in_window() {
        assert!(decide("exists x. x*x*x - 2*x - 5 = 0 /\\ 2 < x /\\ x < 3"));
        assert!(!decide("exists x. x*x*x - 2*x - 5 = 0 /\\ x < 2"));
    }

    #[test]
    fn interval_bounds_matter() {
        let mut eng = engine();
        // x - 2 = 0 has its root outside ]-1, 1[ but inside ]0, 1[ after
        // the reciprocal map
        let atoms = vec![Atom::eq_zero(
            Polynomial::var("x").sub(&Polynomial::constant(rat(2))),
        )];
        let out = eng
            .elim_interval("x", atoms, &Bound::Rat(rat(-1)), &Bound::Rat(rat(1)), None)
            .unwrap();
        assert_eq!(out, Formula::False);

        let recip = vec![Atom::eq_zero(
            Polynomial::constant(rat(1)).sub(&Polynomial::var("y").scale(&rat(2))),
        )];
        let out = eng
            .elim_interval("y", recip, &Bound::Rat(rat(0)), &Bound::Rat(rat(1)), None)
            .unwrap();
        assert_eq!(out, Formula::True);
    }

    #[test]
    fn parametric_root_location() {
        // exists x in ]0,1[: x = a  <=>  0 < a < 1, checked at samples
        let mut eng = engine();
        let atoms = vec![Atom::eq_zero(
            Polynomial::var("x").sub(&Polynomial::var("a")),
        )];
        let out = eng
            .elim_interval("x", atoms, &Bound::Rat(rat(0)), &Bound::Rat(rat(1)), None)
            .unwrap();
        for (val, expect) in [
            (ratio(1, 2), true),
            (ratio(1, 4), true),
            (rat(0), false),
            (rat(1), false),
            (rat(2), false),
            (rat(-1), false),
        ] {
            let inst = crate::formula::substitute_rational(&out, "a", &val);
            assert_eq!(inst.ground_eval(), Some(expect), "a = {val}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut eng = Engine::new(Budget {
            max_nodes: 10,
            max_seconds: 30,
        });
        let f = parse("exists x. x*x*x*x - 3*x*x + a*x + 1 = 0 /\\ x*x + b > 0").unwrap();
        match eng.qe_full(&f) {
            Err(QeError::Budget { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
