//! Independent reference implementations used by the test suite.
//!
//! Nothing in the library proper calls into this module. The substitution
//! oracle here is a textbook capture-avoiding named substitution with
//! on-the-fly renaming; the kernel's positional algorithm is checked against
//! it. The de Bruijn oracle is a well-scoped index calculus used to verify
//! the target-level substitution machinery. Keeping both oracles naive and
//! structurally different from the production code is the point: agreement
//! between two dissimilar implementations is the evidence.

use crate::sf::syntax::{ContextualObject, Name, SFPattern, SFTerm};
use std::cell::Cell;

// ---------------------------------------------------------------------------
// Named-term oracle: alpha-equivalence and naive capture-avoiding
// simultaneous substitution.
// ---------------------------------------------------------------------------

/// Alpha-equivalence with a correspondence `map` between the free variables
/// of `a` and those of `b` (pairs of names, read left-to-right). Free names
/// not covered by the map must match literally.
pub fn alpha_eq_under(map: &[(Name, Name)], a: &SFTerm, b: &SFTerm) -> bool {
    fn go(map: &[(Name, Name)], stack: &mut Vec<(Name, Name)>, a: &SFTerm, b: &SFTerm) -> bool {
        match (a, b) {
            (SFTerm::BVar(x), SFTerm::BVar(y)) => {
                // Innermost binder correspondence wins; a bound name on one
                // side must pair with a bound name at the same depth.
                for (l, r) in stack.iter().rev() {
                    match (l == x, r == y) {
                        (true, true) => return true,
                        (true, false) | (false, true) => return false,
                        (false, false) => continue,
                    }
                }
                for (l, r) in map.iter().rev() {
                    match (l == x, r == y) {
                        (true, true) => return true,
                        (true, false) | (false, true) => return false,
                        (false, false) => continue,
                    }
                }
                x == y
            }
            (SFTerm::Lam(x, m), SFTerm::Lam(y, n)) => {
                stack.push((x.clone(), y.clone()));
                let r = go(map, stack, m, n);
                stack.pop();
                r
            }
            (SFTerm::ConstApp(c, ms), SFTerm::ConstApp(d, ns)) => {
                c == d
                    && ms.len() == ns.len()
                    && ms.iter().zip(ns).all(|(m, n)| go(map, stack, m, n))
            }
            (SFTerm::BoxIntro(m), SFTerm::BoxIntro(n)) => go(map, stack, m, n),
            (SFTerm::QVar(u), SFTerm::QVar(v)) => u == v,
            (SFTerm::PVar(x, i), SFTerm::PVar(y, j)) => x == y && i == j,
            _ => false,
        }
    }
    go(map, &mut Vec::new(), a, b)
}

/// Alpha-equivalence of two ground terms with literal free-variable names.
pub fn alpha_eq(a: &SFTerm, b: &SFTerm) -> bool {
    alpha_eq_under(&[], a, b)
}

thread_local! {
    static ORACLE_FRESH: Cell<u64> = const { Cell::new(0) };
}

fn oracle_fresh(base: &str) -> String {
    let stem = base.split("_f").next().unwrap_or(base);
    ORACLE_FRESH.with(|c| {
        let n = c.get() + 1;
        c.set(n);
        format!("{stem}_f{n}")
    })
}

fn occurs_free(x: &str, m: &SFTerm) -> bool {
    match m {
        SFTerm::BVar(y) => x == y,
        SFTerm::Lam(y, body) => x != y && occurs_free(x, body),
        SFTerm::ConstApp(_, args) => args.iter().any(|a| occurs_free(x, a)),
        SFTerm::BoxIntro(body) => occurs_free(x, body),
        SFTerm::QVar(_) | SFTerm::PVar(..) => false,
        SFTerm::Clo { body, subst, .. } => {
            occurs_free(x, body) || subst.entries.iter().any(|e| occurs_free(x, e))
        }
    }
}

/// Naive capture-avoiding simultaneous substitution on ground named terms.
/// `map` sends free-variable names to replacement terms; unmapped free
/// variables are left alone. Binders are renamed whenever they would capture
/// a free variable of any replacement term in play.
pub fn subst_sim(map: &[(Name, SFTerm)], m: &SFTerm) -> SFTerm {
    match m {
        SFTerm::BVar(x) => match map.iter().find(|(n, _)| n == x) {
            Some((_, r)) => r.clone(),
            None => m.clone(),
        },
        SFTerm::Lam(x, body) => {
            // Drop any mapping shadowed by the binder, then rename the binder
            // if it would capture a free variable of a remaining replacement.
            let inner: Vec<(Name, SFTerm)> =
                map.iter().filter(|(n, _)| n != x).cloned().collect();
            let live: Vec<&(Name, SFTerm)> =
                inner.iter().filter(|(n, _)| occurs_free(n, body)).collect();
            let captures = live.iter().any(|(_, r)| occurs_free(x, r));
            if captures {
                let x2 = oracle_fresh(x);
                let mut renamed = inner.clone();
                renamed.push((x.clone(), SFTerm::BVar(x2.clone())));
                SFTerm::Lam(x2, Box::new(subst_sim(&renamed, body)))
            } else {
                SFTerm::Lam(x.clone(), Box::new(subst_sim(&inner, body)))
            }
        }
        SFTerm::ConstApp(c, args) => {
            SFTerm::ConstApp(c.clone(), args.iter().map(|a| subst_sim(map, a)).collect())
        }
        SFTerm::BoxIntro(body) => {
            // Boxed bodies are closed; substitution cannot reach inside.
            SFTerm::BoxIntro(body.clone())
        }
        SFTerm::QVar(_) | SFTerm::PVar(..) => m.clone(),
        SFTerm::Clo { .. } => panic!("oracle substitution is defined on ground terms only"),
    }
}

/// Single-variable capture-avoiding substitution.
pub fn subst_one(x: &str, n: &SFTerm, m: &SFTerm) -> SFTerm {
    subst_sim(&[(x.to_string(), n.clone())], m)
}

/// Rebuild the term a pattern stands for, given match bindings. This is the
/// soundness oracle for matching: the result must be alpha-equal to the
/// matched scrutinee. `pat_ctx` names the context the pattern was checked
/// in, `psi_hat` the scrutinee's context; binder positions inside the
/// pattern reuse the pattern's names (alpha-equivalence absorbs that), and
/// stored binding payloads are renamed positionally from their recorded
/// value-side contexts to the emission site via the naive capture-avoiding
/// substitution above.
pub fn instantiate(
    pat_ctx: &[Name],
    psi_hat: &[Name],
    r: &SFPattern,
    rho: &[(Name, ContextualObject)],
) -> SFTerm {
    assert_eq!(pat_ctx.len(), psi_hat.len(), "instantiation contexts must align");
    fn emit(
        cur: &mut Vec<Name>,
        pat_names: &mut Vec<Name>,
        r: &SFPattern,
        rho: &[(Name, ContextualObject)],
    ) -> SFTerm {
        match r {
            SFPattern::PLam(x, b) => {
                cur.push(x.clone());
                pat_names.push(x.clone());
                let t = emit(cur, pat_names, b, rho);
                cur.pop();
                pat_names.pop();
                SFTerm::Lam(x.clone(), Box::new(t))
            }
            SFPattern::PBox(b) => {
                let mut c2 = Vec::new();
                let mut p2 = Vec::new();
                SFTerm::BoxIntro(Box::new(emit(&mut c2, &mut p2, b, rho)))
            }
            SFPattern::PBVar(x) => {
                let pos = pat_names
                    .iter()
                    .rposition(|n| n == x)
                    .expect("checked pattern binds its variables");
                SFTerm::BVar(cur[pos].clone())
            }
            SFPattern::PConstApp(c, args) => SFTerm::ConstApp(
                c.clone(),
                args.iter().map(|a| emit(cur, pat_names, a, rho)).collect(),
            ),
            SFPattern::PQVar(u) | SFPattern::PPVar(u, _) => {
                let obj = &rho
                    .iter()
                    .find(|(n, _)| n == u)
                    .unwrap_or_else(|| panic!("no binding for pattern variable {u}"))
                    .1;
                assert!(obj.ectx.len() <= cur.len(), "binding context longer than site");
                // Innermost pairs first so shadowed names resolve innermost.
                let map: Vec<(Name, SFTerm)> = obj
                    .ectx
                    .iter()
                    .zip(cur.iter())
                    .rev()
                    .map(|(from, to)| (from.clone(), SFTerm::BVar(to.clone())))
                    .collect();
                subst_sim(&map, &obj.term)
            }
        }
    }
    let mut cur = psi_hat.to_vec();
    let mut pat_names = pat_ctx.to_vec();
    emit(&mut cur, &mut pat_names, r, rho)
}

// ---------------------------------------------------------------------------
// De Bruijn oracle: well-scoped index terms and list substitutions.
// ---------------------------------------------------------------------------

/// Index terms. Index 0 is the innermost binding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DbTerm {
    DbVar(usize),
    DbLam(Box<DbTerm>),
    DbCon(Name, Vec<DbTerm>),
    DbBox(Box<DbTerm>),
}

impl DbTerm {
    pub fn var(i: usize) -> DbTerm {
        DbTerm::DbVar(i)
    }

    pub fn lam(body: DbTerm) -> DbTerm {
        DbTerm::DbLam(Box::new(body))
    }

    pub fn con(c: &str, args: Vec<DbTerm>) -> DbTerm {
        DbTerm::DbCon(c.to_string(), args)
    }
}

/// Shift free indices at or above `cutoff` up by `n`.
pub fn db_shift_above(cutoff: usize, n: usize, t: &DbTerm) -> DbTerm {
    match t {
        DbTerm::DbVar(i) => {
            if *i >= cutoff {
                DbTerm::DbVar(i + n)
            } else {
                DbTerm::DbVar(*i)
            }
        }
        DbTerm::DbLam(b) => DbTerm::DbLam(Box::new(db_shift_above(cutoff + 1, n, b))),
        DbTerm::DbCon(c, args) => DbTerm::DbCon(
            c.clone(),
            args.iter().map(|a| db_shift_above(cutoff, n, a)).collect(),
        ),
        DbTerm::DbBox(b) => DbTerm::DbBox(b.clone()),
    }
}

pub fn db_shift(n: usize, t: &DbTerm) -> DbTerm {
    db_shift_above(0, n, t)
}

/// A total substitution as a list: entry `i` replaces index `i`. A term
/// well scoped in a context of length `sigma.len()` stays well scoped.
/// Under a binder the substitution is pushed: index 0 maps to itself and
/// every entry is shifted by one.
pub fn db_apply(sigma: &[DbTerm], t: &DbTerm) -> DbTerm {
    match t {
        DbTerm::DbVar(i) => sigma
            .get(*i)
            .cloned()
            .unwrap_or_else(|| panic!("de Bruijn oracle: index {i} out of scope")),
        DbTerm::DbLam(b) => {
            let mut pushed = vec![DbTerm::DbVar(0)];
            pushed.extend(sigma.iter().map(|e| db_shift(1, e)));
            DbTerm::DbLam(Box::new(db_apply(&pushed, b)))
        }
        DbTerm::DbCon(c, args) => {
            DbTerm::DbCon(c.clone(), args.iter().map(|a| db_apply(sigma, a)).collect())
        }
        DbTerm::DbBox(b) => DbTerm::DbBox(b.clone()),
    }
}

/// The list form of the shift `^n` out of a context of length `dom_len`:
/// index i maps to i + n.
pub fn db_shift_subst(n: usize, dom_len: usize) -> Vec<DbTerm> {
    (0..dom_len).map(|i| DbTerm::DbVar(i + n)).collect()
}

/// Convert a ground named term over the name list `names` (innermost last)
/// to index form. Panics on unbound names or non-ground input: the oracle is
/// only applied to values that are ground by construction.
pub fn to_db(names: &[Name], t: &SFTerm) -> DbTerm {
    match t {
        SFTerm::BVar(x) => {
            let pos = names
                .iter()
                .rposition(|n| n == x)
                .unwrap_or_else(|| panic!("de Bruijn oracle: unbound name {x}"));
            DbTerm::DbVar(names.len() - 1 - pos)
        }
        SFTerm::Lam(x, body) => {
            let mut inner = names.to_vec();
            inner.push(x.clone());
            DbTerm::DbLam(Box::new(to_db(&inner, body)))
        }
        SFTerm::ConstApp(c, args) => {
            DbTerm::DbCon(c.clone(), args.iter().map(|a| to_db(names, a)).collect())
        }
        SFTerm::BoxIntro(body) => DbTerm::DbBox(Box::new(to_db(&[], body))),
        SFTerm::QVar(_) | SFTerm::PVar(..) | SFTerm::Clo { .. } => {
            panic!("de Bruijn oracle: term is not ground")
        }
    }
}
