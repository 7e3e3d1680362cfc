//! First-order matching of ground terms against checked patterns, and
//! alpha-equivalence of terms.
//!
//! Every quoted pattern variable carries the full context of its
//! occurrence, so matching never unifies: it is a single structural
//! traversal with two parallel name stacks, one for pattern binders and
//! one for value binders.

use crate::diag::{err, Code, Result};
use crate::sf::syntax::*;

pub type MatchBindings = Vec<(Name, ContextualObject)>;

/// Match ground `m` (whose free variables are named by `psi_hat`) against
/// pattern `r` (checked in a context named by `pat_ctx`, binding
/// `gamma_p`). `Ok(None)` is a mismatch; `Ok(Some(rho))` binds every
/// pattern variable, in `gamma_p` order, to a contextual object built from
/// value-side names.
pub fn match_sf(
    gamma_p: &[(Name, ContextualType, BindKind)],
    pat_ctx: &[Name],
    psi_hat: &[Name],
    r: &SFPattern,
    m: &SFTerm,
) -> Result<Option<MatchBindings>> {
    let res = match_sf_unchecked(pat_ctx, psi_hat, r, m)?;
    if let Some(binds) = &res {
        if gamma_p.len() != binds.len()
            || !gamma_p.iter().zip(binds).all(|((n, _, _), (bn, _))| n == bn)
        {
            return err(
                Code::InternalInvariantViolation,
                "match bindings disagree with the pattern's checked binder context".to_string(),
            );
        }
    }
    Ok(res)
}

/// [`match_sf`] without the binder-context cross-check; the evaluator uses
/// this directly since the pattern was checked when the program was.
pub fn match_sf_unchecked(
    pat_ctx: &[Name],
    psi_hat: &[Name],
    r: &SFPattern,
    m: &SFTerm,
) -> Result<Option<MatchBindings>> {
    if !m.is_ground() {
        return err(
            Code::InternalInvariantViolation,
            "matching requires a ground scrutinee".to_string(),
        );
    }
    let mut pstack = pat_ctx.to_vec();
    let mut vstack = psi_hat.to_vec();
    let mut binds = MatchBindings::new();
    if !step(&mut pstack, &mut vstack, r, m, &mut binds)? {
        return Ok(None);
    }
    Ok(Some(binds))
}

fn step(
    pstack: &mut Vec<Name>,
    vstack: &mut Vec<Name>,
    r: &SFPattern,
    m: &SFTerm,
    binds: &mut MatchBindings,
) -> Result<bool> {
    match (r, m) {
        (SFPattern::PQVar(u), _) => {
            binds.push((u.clone(), ContextualObject::new(vstack.clone(), m.clone())));
            Ok(true)
        }
        (SFPattern::PPVar(y, k), SFTerm::BVar(v)) => {
            let Some(keep) = vstack.len().checked_sub(k - 1) else {
                return Ok(false);
            };
            let pos = match vstack.iter().rposition(|n| n == v) {
                Some(p) => p,
                None => {
                    return err(
                        Code::InternalInvariantViolation,
                        format!("scrutinee variable {v} is not bound in its own context"),
                    )
                }
            };
            if pos >= keep {
                // The variable lives in the part excluded by the weakening.
                return Ok(false);
            }
            binds.push((
                y.clone(),
                ContextualObject::new(vstack[..keep].to_vec(), SFTerm::BVar(v.clone())),
            ));
            Ok(true)
        }
        (SFPattern::PPVar(..), _) => Ok(false),
        (SFPattern::PLam(x, pb), SFTerm::Lam(v, mb)) => {
            pstack.push(x.clone());
            vstack.push(v.clone());
            let res = step(pstack, vstack, pb, mb, binds);
            pstack.pop();
            vstack.pop();
            res
        }
        (SFPattern::PBox(pb), SFTerm::BoxIntro(mb)) => {
            // Boxed bodies are closed: matching restarts in empty contexts.
            let mut ps = Vec::new();
            let mut vs = Vec::new();
            step(&mut ps, &mut vs, pb, mb, binds)
        }
        (SFPattern::PBVar(x), SFTerm::BVar(v)) => {
            let px = pstack.iter().rposition(|n| n == x);
            let pv = vstack.iter().rposition(|n| n == v);
            Ok(matches!((px, pv), (Some(i), Some(j)) if i == j))
        }
        (SFPattern::PConstApp(c, pargs), SFTerm::ConstApp(d, margs)) => {
            if c != d || pargs.len() != margs.len() {
                return Ok(false);
            }
            for (p, v) in pargs.iter().zip(margs) {
                if !step(pstack, vstack, p, v, binds)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Alpha-equivalence: equality up to consistent renaming of binders. Free
/// variables compare by name and position.
pub fn alpha_eq(m: &SFTerm, n: &SFTerm) -> bool {
    fn go(dl: &mut Vec<Name>, dr: &mut Vec<Name>, m: &SFTerm, n: &SFTerm) -> bool {
        match (m, n) {
            (SFTerm::BVar(x), SFTerm::BVar(y)) => {
                match (dl.iter().rposition(|b| b == x), dr.iter().rposition(|b| b == y)) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (SFTerm::Lam(x, a), SFTerm::Lam(y, b)) => {
                dl.push(x.clone());
                dr.push(y.clone());
                let r = go(dl, dr, a, b);
                dl.pop();
                dr.pop();
                r
            }
            (SFTerm::ConstApp(c, xs), SFTerm::ConstApp(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| go(dl, dr, a, b))
            }
            (SFTerm::BoxIntro(a), SFTerm::BoxIntro(b)) => {
                go(&mut Vec::new(), &mut Vec::new(), a, b)
            }
            (SFTerm::QVar(u), SFTerm::QVar(v)) => u == v,
            (SFTerm::PVar(x, i), SFTerm::PVar(y, j)) => x == y && i == j,
            (
                SFTerm::Clo { body: b1, subst: s1, .. },
                SFTerm::Clo { body: b2, subst: s2, .. },
            ) => {
                s1.leading_shift == s2.leading_shift
                    && s1.entries.len() == s2.entries.len()
                    && s1.entries.iter().zip(&s2.entries).all(|(a, b)| go(dl, dr, a, b))
                    && go(dl, dr, b1, b2)
            }
            _ => false,
        }
    }
    go(&mut Vec::new(), &mut Vec::new(), m, n)
}
