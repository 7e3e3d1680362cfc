//! Typing for the syntactic framework: signature and context
//! well-formedness, term checking, substitution checking, and pattern
//! typing with its binder-context output.

use crate::diag::{err, Code, Diagnostic, Result};
use crate::sf::syntax::*;

/// Every atom referenced by a constructor must be declared, names must be
/// unique, and every constructor type must end in an atom.
pub fn wf_signature(sig: &SFSignature) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for a in &sig.atoms {
        if seen.contains(&a.as_str()) {
            return err(Code::DuplicateName, format!("atom {a} is declared twice"));
        }
        seen.push(a);
    }
    let mut cons_seen: Vec<&str> = Vec::new();
    for (c, ty) in &sig.constructors {
        if cons_seen.contains(&c.as_str()) || sig.has_atom(c) {
            return err(Code::DuplicateName, format!("{c} is declared twice"));
        }
        cons_seen.push(c);
        wf_sftype(sig, ty)?;
        if ty.spine_view().is_none() {
            return err(
                Code::NonAtomicTarget,
                format!("constructor {c} : {ty} does not produce an atomic type"),
            );
        }
    }
    Ok(())
}

pub fn wf_sftype(sig: &SFSignature, ty: &SFType) -> Result<()> {
    match ty {
        SFType::Atom(a) => {
            if sig.has_atom(a) {
                Ok(())
            } else {
                err(Code::UndeclaredAtom, format!("atom {a} is not declared"))
            }
        }
        SFType::Arrow(d, c) => {
            wf_sftype(sig, d)?;
            wf_sftype(sig, c)
        }
        SFType::Boxed(t) => wf_sftype(sig, t),
    }
}

pub fn wf_ctx(sig: &SFSignature, psi: &SFCtx) -> Result<()> {
    for (i, (x, a)) in psi.0.iter().enumerate() {
        if !sig.has_atom(a) {
            return err(
                Code::UndeclaredAtom,
                format!("context entry {x}:{a} uses an undeclared atom"),
            );
        }
        if psi.0[..i].iter().any(|(y, _)| y == x) {
            return err(
                Code::DuplicateName,
                format!("context [{psi}] binds {x} twice"),
            );
        }
    }
    Ok(())
}

/// Check `m` against `a` in SF context `psi`, with the ambient context
/// supplying the types of quoted and parameter variables.
pub fn check_sf_term(
    sig: &SFSignature,
    ambient: &Ambient,
    psi: &SFCtx,
    m: &SFTerm,
    a: &SFType,
) -> Result<()> {
    match m {
        SFTerm::Lam(x, body) => match a {
            SFType::Arrow(dom, cod) => match dom.as_ref() {
                SFType::Atom(at) => {
                    check_sf_term(sig, ambient, &psi.extended(x.clone(), at.clone()), body, cod)
                }
                _ => err(
                    Code::TypeMismatch,
                    format!("binder {x} would need non-atomic type {dom}; bound variables are atomic"),
                ),
            },
            _ => err(Code::TypeMismatch, format!("a lambda cannot have type {a}")),
        },
        SFTerm::BoxIntro(body) => match a {
            SFType::Boxed(inner) => {
                for f in body.free_vars() {
                    if psi.contains(&f) {
                        return err(
                            Code::NotClosed,
                            format!("box body mentions {f} from the enclosing context"),
                        );
                    }
                }
                check_sf_term(sig, ambient, &SFCtx::empty(), body, inner)
            }
            _ => err(Code::TypeMismatch, format!("box cannot have type {a}")),
        },
        SFTerm::BVar(x) => match psi.lookup(x) {
            None => err(Code::UnboundVar, format!("variable {x} is not bound in [{psi}]")),
            Some(b) if a == &SFType::Atom(b.clone()) => Ok(()),
            Some(b) => err(
                Code::TypeMismatch,
                format!("variable {x} has type {b}, expected {a}"),
            ),
        },
        SFTerm::ConstApp(c, args) => {
            let cty = match sig.constructor(c) {
                Some(t) => t,
                None => {
                    return err(Code::UnboundVar, format!("constructor {c} is not declared"))
                }
            };
            let (arg_tys, target) = cty
                .spine_view()
                .expect("signature well-formedness guarantees an atomic target");
            if args.len() != arg_tys.len() {
                return err(
                    Code::SpineArity,
                    format!(
                        "constructor {c} takes {} arguments but is applied to {}",
                        arg_tys.len(),
                        args.len()
                    ),
                );
            }
            for (arg, t) in args.iter().zip(arg_tys) {
                check_sf_term(sig, ambient, psi, arg, t)?;
            }
            if a == &SFType::Atom(target.clone()) {
                Ok(())
            } else {
                err(
                    Code::TypeMismatch,
                    format!("constructor {c} produces {target}, expected {a}"),
                )
            }
        }
        SFTerm::QVar(u) => {
            let (cty, kind) = match ambient.lookup(u) {
                Some(b) => b,
                None => return err(Code::UnboundVar, format!("quoted variable '{u} is not bound")),
            };
            if kind != BindKind::Quoted {
                return err(
                    Code::TypeMismatch,
                    format!("{u} is a parameter binding and cannot be used as '{u}"),
                );
            }
            if &cty.ctx != psi {
                return err(
                    Code::ContextMismatch,
                    format!(
                        "'{u} has context [{}] but is used in [{psi}]; move it with an explicit closure",
                        cty.ctx
                    ),
                );
            }
            expect_atom(a, &cty.atom)
        }
        SFTerm::PVar(x, k) => {
            let (cty, kind) = match ambient.lookup(x) {
                Some(b) => b,
                None => {
                    return err(Code::UnboundVar, format!("parameter variable {x} is not bound"))
                }
            };
            if kind != BindKind::Param {
                return err(
                    Code::TypeMismatch,
                    format!("{x} is a quoted binding and cannot be used as a parameter variable"),
                );
            }
            let target = match psi.drop_innermost(k - 1) {
                Some(t) => t,
                None => {
                    return err(
                        Code::ContextMismatch,
                        format!("weakening by {} exceeds context [{psi}]", k - 1),
                    )
                }
            };
            if cty.ctx != target {
                return err(
                    Code::ContextMismatch,
                    format!(
                        "parameter variable {x} has context [{}] but the weakened use site is [{target}]",
                        cty.ctx
                    ),
                );
            }
            expect_atom(a, &cty.atom)
        }
        SFTerm::Clo { body, subst, ann } => {
            let phi: SFCtx = match ann {
                Some(b) => {
                    let (dom, range) = b.as_ref();
                    if range != psi {
                        return err(
                            Code::ContextMismatch,
                            format!("closure annotated with range [{range}] is used in [{psi}]"),
                        );
                    }
                    dom.clone()
                }
                None => match body.as_ref() {
                    SFTerm::QVar(u) => match ambient.lookup(u) {
                        Some((cty, BindKind::Quoted)) => cty.ctx.clone(),
                        Some((_, BindKind::Param)) => {
                            return err(
                                Code::TypeMismatch,
                                format!("{u} is a parameter binding and cannot be used as '{u}"),
                            )
                        }
                        None => {
                            return err(
                                Code::UnboundVar,
                                format!("quoted variable '{u} is not bound"),
                            )
                        }
                    },
                    _ => {
                        return err(
                            Code::TypeMismatch,
                            "an unannotated closure must have a quoted-variable body".to_string(),
                        )
                    }
                },
            };
            check_sf_subst(sig, ambient, psi, subst, &phi)?;
            check_sf_term(sig, ambient, &phi, body, a)
        }
    }
}

fn expect_atom(goal: &SFType, have: &Atom) -> Result<()> {
    if goal == &SFType::Atom(have.clone()) {
        Ok(())
    } else {
        err(
            Code::TypeMismatch,
            format!("term has atomic type {have}, expected {goal}"),
        )
    }
}

/// Check that `sigma` maps `phi` into `psi`. The leading shift, if any,
/// must identify the outer part of `phi` with `psi` minus its innermost
/// entries; the listed entries then cover the rest of `phi` positionally,
/// innermost entry last.
pub fn check_sf_subst(
    sig: &SFSignature,
    ambient: &Ambient,
    psi: &SFCtx,
    sigma: &SFSubst,
    phi: &SFCtx,
) -> Result<()> {
    let k = sigma.entries.len();
    if phi.len() < k {
        return err(
            Code::LengthMismatch,
            format!("substitution lists {k} entries but the domain [{phi}] has {}", phi.len()),
        );
    }
    let split = phi.len() - k;
    let phi0 = SFCtx(phi.0[..split].to_vec());
    let phi1 = &phi.0[split..];
    if sigma.leading_shift == 0 {
        if !phi0.is_empty() {
            return err(
                Code::LengthMismatch,
                format!(
                    "substitution lists {k} entries but the domain [{phi}] has {}",
                    phi.len()
                ),
            );
        }
    } else {
        match psi.drop_innermost(sigma.leading_shift) {
            None => {
                return err(
                    Code::BadShift,
                    format!("shift ^{} exceeds the range context [{psi}]", sigma.leading_shift),
                )
            }
            Some(dropped) => {
                if dropped != phi0 {
                    return err(
                        Code::BadShift,
                        format!(
                            "shift ^{} identifies [{dropped}] with the domain prefix [{phi0}], which differ",
                            sigma.leading_shift
                        ),
                    );
                }
            }
        }
    }
    for (entry, (x, at)) in sigma.entries.iter().zip(phi1) {
        check_sf_term(sig, ambient, psi, entry, &SFType::Atom(at.clone())).map_err(|d| {
            Diagnostic::new(
                Code::EntryTypeMismatch,
                format!("entry for {x}: {}", d.message),
            )
        })?;
    }
    Ok(())
}

/// Check pattern `r` at atomic type `a` in `psi`; return the contextual
/// bindings it introduces, in left-to-right order.
pub fn check_sf_pattern(
    sig: &SFSignature,
    psi: &SFCtx,
    r: &SFPattern,
    a: &Atom,
) -> Result<Vec<(Name, ContextualType, BindKind)>> {
    let mut bound = Vec::new();
    check_pattern_at(sig, psi, r, &SFType::Atom(a.clone()), &mut bound)?;
    Ok(bound)
}

fn check_pattern_at(
    sig: &SFSignature,
    psi: &SFCtx,
    r: &SFPattern,
    a: &SFType,
    bound: &mut Vec<(Name, ContextualType, BindKind)>,
) -> Result<()> {
    match r {
        SFPattern::PLam(x, body) => match a {
            SFType::Arrow(dom, cod) => match dom.as_ref() {
                SFType::Atom(at) => check_pattern_at(
                    sig,
                    &psi.extended(x.clone(), at.clone()),
                    body,
                    cod,
                    bound,
                ),
                _ => err(
                    Code::TypeMismatch,
                    format!("pattern binder {x} would need non-atomic type {dom}"),
                ),
            },
            _ => err(Code::TypeMismatch, format!("a lambda pattern cannot have type {a}")),
        },
        SFPattern::PBox(body) => match a {
            SFType::Boxed(inner) => check_pattern_at(sig, &SFCtx::empty(), body, inner, bound),
            _ => err(Code::TypeMismatch, format!("a box pattern cannot have type {a}")),
        },
        SFPattern::PBVar(x) => match psi.lookup(x) {
            None => err(
                Code::TypeMismatch,
                format!("pattern variable {x} is not bound in [{psi}]"),
            ),
            Some(b) if a == &SFType::Atom(b.clone()) => Ok(()),
            Some(b) => err(
                Code::TypeMismatch,
                format!("pattern variable {x} has type {b}, expected {a}"),
            ),
        },
        SFPattern::PConstApp(c, args) => {
            let cty = match sig.constructor(c) {
                Some(t) => t,
                None => {
                    return err(Code::TypeMismatch, format!("constructor {c} is not declared"))
                }
            };
            let (arg_tys, target) = cty
                .spine_view()
                .expect("signature well-formedness guarantees an atomic target");
            if args.len() != arg_tys.len() {
                return err(
                    Code::SpineArity,
                    format!(
                        "constructor {c} takes {} arguments but the pattern applies it to {}",
                        arg_tys.len(),
                        args.len()
                    ),
                );
            }
            for (arg, t) in args.iter().zip(arg_tys) {
                check_pattern_at(sig, psi, arg, t, bound)?;
            }
            if a == &SFType::Atom(target.clone()) {
                Ok(())
            } else {
                err(
                    Code::TypeMismatch,
                    format!("constructor {c} produces {target}, expected {a}"),
                )
            }
        }
        SFPattern::PQVar(u) => {
            let at = match a {
                SFType::Atom(at) => at.clone(),
                _ => {
                    return err(
                        Code::TypeMismatch,
                        format!("pattern variable '{u} would need non-atomic type {a}"),
                    )
                }
            };
            if bound.iter().any(|(n, _, _)| n == u) {
                return err(Code::NonLinear, format!("pattern variable {u} occurs twice"));
            }
            bound.push((u.clone(), ContextualType::new(psi.clone(), at), BindKind::Quoted));
            Ok(())
        }
        SFPattern::PPVar(x, k) => {
            let at = match a {
                SFType::Atom(at) => at.clone(),
                _ => {
                    return err(
                        Code::TypeMismatch,
                        format!("parameter pattern {x} would need non-atomic type {a}"),
                    )
                }
            };
            let target = match psi.drop_innermost(k - 1) {
                Some(t) => t,
                None => {
                    return err(
                        Code::WeakeningTooDeep,
                        format!("weakening by {} exceeds context [{psi}]", k - 1),
                    )
                }
            };
            if bound.iter().any(|(n, _, _)| n == x) {
                return err(Code::NonLinear, format!("pattern variable {x} occurs twice"));
            }
            bound.push((x.clone(), ContextualType::new(target, at), BindKind::Param));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sf::syntax::SFTerm as T;

    pub fn tm_sig() -> SFSignature {
        SFSignature {
            atoms: vec!["tm".into()],
            constructors: vec![
                (
                    "app".into(),
                    SFType::arrow(
                        SFType::atom("tm"),
                        SFType::arrow(SFType::atom("tm"), SFType::atom("tm")),
                    ),
                ),
                (
                    "lam".into(),
                    SFType::arrow(
                        SFType::arrow(SFType::atom("tm"), SFType::atom("tm")),
                        SFType::atom("tm"),
                    ),
                ),
                ("cst".into(), SFType::atom("tm")),
            ],
        }
    }

    fn ctx(entries: &[(&str, &str)]) -> SFCtx {
        SFCtx(entries.iter().map(|(n, a)| (n.to_string(), a.to_string())).collect())
    }

    #[test]
    fn wf_empty_signature_ok() {
        assert!(wf_signature(&SFSignature::default()).is_ok());
    }

    #[test]
    fn wf_undeclared_atom_rejected() {
        let sig = SFSignature {
            atoms: vec![],
            constructors: vec![(
                "c".into(),
                SFType::arrow(SFType::atom("tm"), SFType::atom("tm")),
            )],
        };
        assert_eq!(wf_signature(&sig).unwrap_err().code, Code::UndeclaredAtom);
    }

    #[test]
    fn wf_duplicates_rejected() {
        let sig = SFSignature { atoms: vec!["tm".into(), "tm".into()], constructors: vec![] };
        assert_eq!(wf_signature(&sig).unwrap_err().code, Code::DuplicateName);
        let sig2 = SFSignature {
            atoms: vec!["tm".into()],
            constructors: vec![
                ("c".into(), SFType::atom("tm")),
                ("c".into(), SFType::atom("tm")),
            ],
        };
        assert_eq!(wf_signature(&sig2).unwrap_err().code, Code::DuplicateName);
    }

    #[test]
    fn wf_non_atomic_target_rejected() {
        let sig = SFSignature {
            atoms: vec!["tm".into()],
            constructors: vec![(
                "c".into(),
                SFType::arrow(SFType::atom("tm"), SFType::boxed(SFType::atom("tm"))),
            )],
        };
        assert_eq!(wf_signature(&sig).unwrap_err().code, Code::NonAtomicTarget);
    }

    #[test]
    fn self_application_checks() {
        // lam (\x. app x x) : tm in the empty contexts.
        let m = T::con("lam", vec![T::lam("x", T::con("app", vec![T::bvar("x"), T::bvar("x")]))]);
        check_sf_term(&tm_sig(), &Ambient::empty(), &SFCtx::empty(), &m, &SFType::atom("tm"))
            .expect("self application should check");
    }

    #[test]
    fn qvar_requires_exact_context() {
        let mut ambient = Ambient::empty();
        ambient.bind("u", ContextualType::new(ctx(&[("x", "tm")]), "tm"), BindKind::Quoted);
        let sig = tm_sig();
        check_sf_term(&sig, &ambient, &ctx(&[("x", "tm")]), &T::qvar("u"), &SFType::atom("tm"))
            .expect("'u in its own context should check");
        let e = check_sf_term(
            &sig,
            &ambient,
            &ctx(&[("x", "tm"), ("y", "tm")]),
            &T::qvar("u"),
            &SFType::atom("tm"),
        )
        .unwrap_err();
        assert_eq!(e.code, Code::ContextMismatch);
    }

    #[test]
    fn open_box_body_rejected() {
        let e = check_sf_term(
            &tm_sig(),
            &Ambient::empty(),
            &ctx(&[("x", "tm")]),
            &T::boxed(T::bvar("x")),
            &SFType::boxed(SFType::atom("tm")),
        )
        .unwrap_err();
        assert_eq!(e.code, Code::NotClosed);
    }

    #[test]
    fn spine_arity_enforced() {
        let m = T::con("app", vec![T::con("cst", vec![])]);
        let e = check_sf_term(&tm_sig(), &Ambient::empty(), &SFCtx::empty(), &m, &SFType::atom("tm"))
            .unwrap_err();
        assert_eq!(e.code, Code::SpineArity);
    }

    #[test]
    fn subst_swap_checks() {
        // psi = (g, x, y); sigma = ^2; y; x; phi = psi. The swap.
        let psi = ctx(&[("g", "tm"), ("x", "tm"), ("y", "tm")]);
        let sigma = SFSubst::shifted(2, vec![T::bvar("y"), T::bvar("x")]);
        check_sf_subst(&tm_sig(), &Ambient::empty(), &psi, &sigma, &psi)
            .expect("the swap substitution should check");
    }

    #[test]
    fn all_shift_targets_empty_domain() {
        let psi = ctx(&[("x", "tm"), ("y", "tm")]);
        check_sf_subst(&tm_sig(), &Ambient::empty(), &psi, &SFSubst::shift(2), &SFCtx::empty())
            .expect("^|psi| into the empty domain should check");
    }

    #[test]
    fn empty_subst_needs_empty_domain() {
        let e = check_sf_subst(
            &tm_sig(),
            &Ambient::empty(),
            &SFCtx::empty(),
            &SFSubst::empty(),
            &ctx(&[("x", "tm")]),
        )
        .unwrap_err();
        assert_eq!(e.code, Code::LengthMismatch);
    }

    #[test]
    fn bad_shift_detected() {
        // Shift deeper than the range context.
        let psi = ctx(&[("x", "tm")]);
        let e = check_sf_subst(&tm_sig(), &Ambient::empty(), &psi, &SFSubst::shift(2), &SFCtx::empty())
            .unwrap_err();
        assert_eq!(e.code, Code::BadShift);
        // Shift that identifies differently typed prefixes.
        let sig = SFSignature { atoms: vec!["tm".into(), "ty".into()], constructors: vec![] };
        let psi2 = ctx(&[("a", "tm"), ("b", "tm")]);
        let phi2 = ctx(&[("a", "ty")]);
        let e2 = check_sf_subst(&sig, &Ambient::empty(), &psi2, &SFSubst::shift(1), &phi2)
            .unwrap_err();
        assert_eq!(e2.code, Code::BadShift);
    }

    #[test]
    fn entry_type_mismatch_reported() {
        let sig = SFSignature {
            atoms: vec!["tm".into(), "ty".into()],
            constructors: vec![("cst".into(), SFType::atom("tm"))],
        };
        let psi = SFCtx::empty();
        let phi = ctx(&[("x", "ty")]);
        let sigma = SFSubst::list(vec![T::con("cst", vec![])]);
        let e = check_sf_subst(&sig, &Ambient::empty(), &psi, &sigma, &phi).unwrap_err();
        assert_eq!(e.code, Code::EntryTypeMismatch);
    }

    #[test]
    fn pattern_app_binds_two_quoted() {
        let r = SFPattern::PConstApp(
            "app".into(),
            vec![SFPattern::PQVar("m".into()), SFPattern::PQVar("n".into())],
        );
        let bound = check_sf_pattern(&tm_sig(), &SFCtx::empty(), &r, &"tm".to_string())
            .expect("app 'm 'n should check at tm");
        assert_eq!(bound.len(), 2);
        assert_eq!(bound[0].0, "m");
        assert_eq!(bound[0].1, ContextualType::new(SFCtx::empty(), "tm"));
        assert_eq!(bound[0].2, BindKind::Quoted);
        assert_eq!(bound[1].0, "n");
    }

    #[test]
    fn double_sharp_excludes_innermost() {
        let psi = ctx(&[("g", "tm"), ("x", "tm")]);
        let r = SFPattern::PPVar("v".into(), 2);
        let bound = check_sf_pattern(&tm_sig(), &psi, &r, &"tm".to_string())
            .expect("##v should check at tm");
        assert_eq!(bound.len(), 1);
        assert_eq!(bound[0].1, ContextualType::new(ctx(&[("g", "tm")]), "tm"));
        assert_eq!(bound[0].2, BindKind::Param);
    }

    #[test]
    fn nonlinear_pattern_rejected() {
        let r = SFPattern::PConstApp(
            "app".into(),
            vec![SFPattern::PQVar("m".into()), SFPattern::PQVar("m".into())],
        );
        let e = check_sf_pattern(&tm_sig(), &SFCtx::empty(), &r, &"tm".to_string()).unwrap_err();
        assert_eq!(e.code, Code::NonLinear);
    }

    #[test]
    fn weakening_too_deep_rejected() {
        let psi = ctx(&[("x", "tm")]);
        let r = SFPattern::PPVar("v".into(), 3);
        let e = check_sf_pattern(&tm_sig(), &psi, &r, &"tm".to_string()).unwrap_err();
        assert_eq!(e.code, Code::WeakeningTooDeep);
    }

    #[test]
    fn binder_pattern_under_lam() {
        // lam (\x. 'body) binds body in the extended context.
        let r = SFPattern::PConstApp(
            "lam".into(),
            vec![SFPattern::PLam("x".into(), Box::new(SFPattern::PQVar("body".into())))],
        );
        let bound = check_sf_pattern(&tm_sig(), &SFCtx::empty(), &r, &"tm".to_string())
            .expect("lam \\x.'body should check");
        assert_eq!(bound[0].1, ContextualType::new(ctx(&[("x", "tm")]), "tm"));
    }
}
