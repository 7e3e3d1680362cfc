//! Substitution operations: positional variable lookup, eager application,
//! renaming between alpha-variant contexts, and composition.
//!
//! All operations work over name lists (erased contexts). Entries of a
//! substitution line up positionally with the innermost bindings of its
//! domain; variables that fall under the leading shift resolve to the
//! binding at the same position in the range.

use crate::diag::{err, Code, Result};
use crate::names::NameGen;
use crate::sf::syntax::*;

/// Resolve `x` through `sigma`, where `phi_names` names the domain and
/// `psi_names` the range. Positionally: the innermost `k` domain bindings
/// take the listed entries; anything outside falls under the shift and maps
/// to the range binding at its own position.
pub fn lookup_var(
    x: &str,
    sigma: &SFSubst,
    phi_names: &[Name],
    psi_names: &[Name],
) -> Result<SFTerm> {
    let pos = match phi_names.iter().rposition(|n| n == x) {
        Some(p) => p,
        None => {
            return err(
                Code::LookupFailure,
                format!("variable {x} is outside the substitution domain"),
            )
        }
    };
    let split = match phi_names.len().checked_sub(sigma.entries.len()) {
        Some(s) => s,
        None => {
            return err(
                Code::LookupFailure,
                format!("substitution lists more entries than its domain has bindings"),
            )
        }
    };
    if pos >= split {
        Ok(sigma.entries[pos - split].clone())
    } else {
        match psi_names.get(pos) {
            Some(n) => Ok(SFTerm::BVar(n.clone())),
            None => err(
                Code::LookupFailure,
                format!("variable {x} falls under the shift but the range has no position {pos}"),
            ),
        }
    }
}

/// Eagerly apply `sigma : phi -> psi` to `m` (typed-context convenience
/// wrapper over [`apply_subst_names`]).
pub fn apply_subst(sigma: &SFSubst, phi: &SFCtx, psi: &SFCtx, m: &SFTerm) -> Result<SFTerm> {
    apply_subst_names(sigma, &phi.names(), &psi.names(), m)
}

/// Eagerly apply `sigma` to `m`, with the domain and range given as name
/// lists. Binders extend the substitution with themselves and are renamed
/// when they would clash with a range name or capture a free variable of an
/// entry. Boxed bodies are closed and pass through untouched; quoted and
/// parameter variables pass through untouched (the evaluator resolves them
/// before ever applying a substitution); a closure composes.
pub fn apply_subst_names(
    sigma: &SFSubst,
    phi_names: &[Name],
    psi_names: &[Name],
    m: &SFTerm,
) -> Result<SFTerm> {
    let gen = NameGen::new();
    go(sigma, phi_names, psi_names, m, &gen)
}

fn go(
    sigma: &SFSubst,
    phi_names: &[Name],
    psi_names: &[Name],
    m: &SFTerm,
    gen: &NameGen,
) -> Result<SFTerm> {
    match m {
        SFTerm::BVar(x) => lookup_var(x, sigma, phi_names, psi_names),
        SFTerm::Lam(x, body) => {
            let entry_free: Vec<Name> =
                sigma.entries.iter().flat_map(|e| e.free_vars()).collect();
            let clash = |n: &str| {
                psi_names.iter().any(|p| p == n) || entry_free.iter().any(|f| f == n)
            };
            let x2 = if clash(x) { gen.fresh_avoiding(x, &clash) } else { x.clone() };
            let mut sigma2 = sigma.clone();
            sigma2.entries.push(SFTerm::BVar(x2.clone()));
            let mut phi2 = phi_names.to_vec();
            phi2.push(x.clone());
            let mut psi2 = psi_names.to_vec();
            psi2.push(x2.clone());
            Ok(SFTerm::Lam(x2, Box::new(go(&sigma2, &phi2, &psi2, body, gen)?)))
        }
        SFTerm::BoxIntro(_) => Ok(m.clone()),
        SFTerm::ConstApp(c, args) => {
            let mapped: Result<Vec<SFTerm>> =
                args.iter().map(|a| go(sigma, phi_names, psi_names, a, gen)).collect();
            Ok(SFTerm::ConstApp(c.clone(), mapped?))
        }
        SFTerm::QVar(_) | SFTerm::PVar(..) => Ok(m.clone()),
        SFTerm::Clo { body, subst, ann } => {
            let composed = compose_subst(sigma, phi_names, subst)?;
            match (body.as_ref(), ann) {
                // A closure over a hole stays a closure: the composed
                // substitution is exactly what fills the hole later.
                (SFTerm::QVar(_) | SFTerm::PVar(..), _) => Ok(SFTerm::Clo {
                    body: body.clone(),
                    subst: composed,
                    ann: None,
                }),
                (_, Some(b)) => {
                    let (dom, _) = b.as_ref();
                    go(&composed, &dom.names(), psi_names, body, gen)
                }
                (_, None) => err(
                    Code::InternalInvariantViolation,
                    "unannotated closure with a non-hole body under substitution".to_string(),
                ),
            }
        }
    }
}

/// Positional renaming of `m` from one name list to an alpha-variant one.
pub fn rename_term(from: &[Name], to: &[Name], m: &SFTerm) -> Result<SFTerm> {
    if from.len() != to.len() {
        return err(
            Code::InternalInvariantViolation,
            format!("renaming between contexts of lengths {} and {}", from.len(), to.len()),
        );
    }
    let sigma = SFSubst::list(to.iter().map(|n| SFTerm::BVar(n.clone())).collect());
    apply_subst_names(&sigma, from, to, m)
}

/// Compose `sigma` after `phi_sub`: applying the result equals applying
/// `phi_sub` first and then `sigma`. `sigma_dom` names sigma's domain,
/// which is also phi_sub's range. Composition with the empty substitution
/// returns `sigma` itself; otherwise the shift parts combine by counting
/// how many of sigma's entries the inner shift skips, and each entry of
/// `phi_sub` is pushed through `sigma`.
pub fn compose_subst(sigma: &SFSubst, sigma_dom: &[Name], phi_sub: &SFSubst) -> Result<SFSubst> {
    if phi_sub.is_empty_form() {
        return Ok(sigma.clone());
    }
    let k_sigma = sigma.entries.len();
    let s_phi = phi_sub.leading_shift;
    let mut out = if s_phi == 0 {
        // Plain list: the composed domain is exactly the listed entries.
        SFSubst::list(Vec::new())
    } else if s_phi >= k_sigma {
        // The inner shift skips all of sigma's entries and then some of
        // sigma's own shift range.
        SFSubst::shift(sigma.leading_shift + s_phi - k_sigma)
    } else {
        // The inner shift consumes the innermost s_phi entries of sigma.
        SFSubst::shifted(sigma.leading_shift, sigma.entries[..k_sigma - s_phi].to_vec())
    };
    for e in &phi_sub.entries {
        out.entries.push(apply_subst_names(sigma, sigma_dom, sigma_dom, e)?);
    }
    Ok(out)
}
