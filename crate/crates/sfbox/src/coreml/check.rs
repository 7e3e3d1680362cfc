//! Bidirectional type checking for the computation language. Checkable
//! forms check against a given type; neutral forms synthesize. Contextual
//! objects delegate to the framework checker with the contextual slice of
//! the typing context as its ambient context.

use crate::coreml::syntax::*;
use crate::diag::{err, Code, Result};
use crate::sf::syntax::SFCtx;
use crate::sf::typing as sft;

/// Well-formedness of a computation-level type.
pub fn wf_mltype(prog: &Program, ty: &MLType) -> Result<()> {
    match ty {
        MLType::Data(d) => {
            if prog.datatype(d).is_some() {
                Ok(())
            } else {
                err(Code::UnboundVar, format!("data type {d} is not declared"))
            }
        }
        MLType::Arrow(a, b) => {
            wf_mltype(prog, a)?;
            wf_mltype(prog, b)
        }
        MLType::Ctx(ct) => {
            sft::wf_ctx(&prog.sig, &ct.ctx)?;
            if prog.sig.has_atom(&ct.atom) {
                Ok(())
            } else {
                err(
                    Code::NonAtomicContextualType,
                    format!("contextual type payload {} is not a declared atom", ct.atom),
                )
            }
        }
    }
}

/// Check a whole program: the signature, the data declarations, then every
/// definition in order (each sees the ones before it).
pub fn check_program(prog: &Program) -> Result<()> {
    sft::wf_signature(&prog.sig)?;
    let mut dnames: Vec<&str> = Vec::new();
    let mut cnames: Vec<&str> = Vec::new();
    for d in &prog.datatypes {
        if dnames.contains(&d.name.as_str()) {
            return err(Code::DuplicateName, format!("data type {} is declared twice", d.name));
        }
        dnames.push(&d.name);
        for (c, fields) in &d.ctors {
            if cnames.contains(&c.as_str()) {
                return err(Code::DuplicateName, format!("constructor {c} is declared twice"));
            }
            cnames.push(c);
            for f in fields {
                wf_mltype(prog, f)?;
            }
        }
    }
    let mut gamma = MLCtx::empty();
    let mut seen: Vec<&str> = Vec::new();
    for def in &prog.defs {
        if seen.contains(&def.name.as_str()) {
            return err(Code::DuplicateName, format!("definition {} appears twice", def.name));
        }
        seen.push(&def.name);
        wf_mltype(prog, &def.ty)?;
        check_expr(prog, &gamma, &def.body, &def.ty)?;
        gamma = gamma.bind(def.name.clone(), def.ty.clone());
    }
    Ok(())
}

pub fn check_expr(prog: &Program, gamma: &MLCtx, e: &Expr, tau: &MLType) -> Result<()> {
    match e {
        Expr::Emb(n) => {
            let t = infer_neutral(prog, gamma, n)?;
            if &t == tau {
                Ok(())
            } else {
                err(Code::TypeMismatch, format!("expression has type {t}, expected {tau}"))
            }
        }
        Expr::Fun { f, x, body } => match tau {
            MLType::Arrow(d, c) => {
                let inner = gamma
                    .bind(f.clone(), tau.clone())
                    .bind(x.clone(), d.as_ref().clone());
                check_expr(prog, &inner, body, c)
            }
            _ => err(Code::TypeMismatch, format!("a function cannot have type {tau}")),
        },
        Expr::Let { x, rhs, body } => {
            let t = infer_neutral(prog, gamma, rhs)?;
            check_expr(prog, &gamma.bind(x.clone(), t), body, tau)
        }
        Expr::CtxObj(ectx, m) => match tau {
            MLType::Ctx(ct) => {
                if ectx.len() != ct.ctx.len() {
                    return err(
                        Code::TypeMismatch,
                        format!(
                            "literal binds {} variables but the context of {tau} has {}",
                            ectx.len(),
                            ct.ctx.len()
                        ),
                    );
                }
                let named = SFCtx(
                    ectx.iter()
                        .zip(ct.ctx.atoms())
                        .map(|(n, a)| (n.clone(), a))
                        .collect(),
                );
                sft::wf_ctx(&prog.sig, &named)?;
                sft::check_sf_term(
                    &prog.sig,
                    &gamma.to_ambient(),
                    &named,
                    m,
                    &crate::sf::syntax::SFType::Atom(ct.atom.clone()),
                )
            }
            _ => err(Code::TypeMismatch, format!("a contextual literal cannot have type {tau}")),
        },
        Expr::Match { scrutinee, branches } => {
            let t_s = infer_neutral(prog, gamma, scrutinee)?;
            for b in branches {
                check_branch(prog, gamma, b, &t_s, tau)?;
            }
            Ok(())
        }
    }
}

pub fn infer_neutral(prog: &Program, gamma: &MLCtx, i: &Neutral) -> Result<MLType> {
    match i {
        Neutral::Var(x) => match gamma.lookup(x) {
            Some((t, _)) => Ok(t.clone()),
            None => err(Code::UnboundVar, format!("variable {x} is not bound")),
        },
        Neutral::App(f, a) => match infer_neutral(prog, gamma, f)? {
            MLType::Arrow(d, c) => {
                check_expr(prog, gamma, a, &d)?;
                Ok(*c)
            }
            t => err(Code::TypeMismatch, format!("cannot apply a value of type {t}")),
        },
        Neutral::ConApp(k, args) => {
            let (owner, fields) = match prog.ctor_owner(k) {
                Some(o) => o,
                None => {
                    return err(Code::UnboundVar, format!("constructor {k} is not declared"))
                }
            };
            if args.len() != fields.len() {
                return err(
                    Code::ArityError,
                    format!(
                        "constructor {k} takes {} arguments but is applied to {}",
                        fields.len(),
                        args.len()
                    ),
                );
            }
            let fields = fields.clone();
            let dname = owner.name.clone();
            for (a, ft) in args.iter().zip(&fields) {
                check_expr(prog, gamma, a, ft)?;
            }
            Ok(MLType::Data(dname))
        }
        Neutral::Ann(e, t) => {
            wf_mltype(prog, t)?;
            check_expr(prog, gamma, e, t)?;
            Ok(t.clone())
        }
        Neutral::NonSyn(_) => err(
            Code::CannotSynthesize,
            "this expression form does not synthesize a type; annotate it".to_string(),
        ),
    }
}

pub fn check_branch(
    prog: &Program,
    gamma: &MLCtx,
    b: &Branch,
    scrut_ty: &MLType,
    result_ty: &MLType,
) -> Result<()> {
    match (b, scrut_ty) {
        (Branch::Data { pattern, body }, MLType::Data(_)) => {
            let mut binds: Vec<(crate::sf::syntax::Name, MLType)> = Vec::new();
            check_ml_pattern(prog, pattern, scrut_ty, &mut binds)?;
            let mut inner = gamma.clone();
            for (x, t) in binds {
                inner = inner.bind(x, t);
            }
            check_expr(prog, &inner, body, result_ty)
        }
        (Branch::Ctx { ctx, pattern, body }, MLType::Ctx(ct)) => {
            sft::wf_ctx(&prog.sig, ctx)?;
            if !ctx.same_shape(&ct.ctx) {
                return err(
                    Code::PatternTypeMismatch,
                    format!(
                        "branch context [{ctx}] does not match the scrutinee context [{}]",
                        ct.ctx
                    ),
                );
            }
            let gp = sft::check_sf_pattern(&prog.sig, ctx, pattern, &ct.atom)?;
            let mut inner = gamma.clone();
            for (n, cty, kind) in gp {
                inner = inner.bind_kinded(n, MLType::Ctx(cty), kind);
            }
            check_expr(prog, &inner, body, result_ty)
        }
        (Branch::Data { .. }, _) => err(
            Code::PatternTypeMismatch,
            format!("constructor pattern against scrutinee of type {scrut_ty}"),
        ),
        (Branch::Ctx { .. }, _) => err(
            Code::PatternTypeMismatch,
            format!("contextual pattern against scrutinee of type {scrut_ty}"),
        ),
    }
}

fn check_ml_pattern(
    prog: &Program,
    pat: &MLPattern,
    tau: &MLType,
    binds: &mut Vec<(crate::sf::syntax::Name, MLType)>,
) -> Result<()> {
    match pat {
        MLPattern::PVarML(x) => {
            if binds.iter().any(|(n, _)| n == x) {
                return err(Code::NonLinear, format!("pattern variable {x} occurs twice"));
            }
            binds.push((x.clone(), tau.clone()));
            Ok(())
        }
        MLPattern::PCon(k, subpats) => {
            let (owner, fields) = match prog.ctor_owner(k) {
                Some(o) => o,
                None => {
                    return err(
                        Code::PatternTypeMismatch,
                        format!("constructor {k} is not declared"),
                    )
                }
            };
            if tau != &MLType::Data(owner.name.clone()) {
                return err(
                    Code::PatternTypeMismatch,
                    format!("constructor {k} belongs to {}, not {tau}", owner.name),
                );
            }
            if subpats.len() != fields.len() {
                return err(
                    Code::ArityError,
                    format!(
                        "constructor {k} takes {} arguments but the pattern has {}",
                        fields.len(),
                        subpats.len()
                    ),
                );
            }
            let fields = fields.clone();
            for (p, ft) in subpats.iter().zip(&fields) {
                check_ml_pattern(prog, p, ft, binds)?;
            }
            Ok(())
        }
    }
}
