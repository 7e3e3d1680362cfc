//! Environment-based evaluator for the computation language.
//!
//! Values are data constructors, recursive closures, and contextual objects
//! whose terms are ground (no quoted or parameter variables, no closures).
//! Contextual literals are *resolved* against the runtime environment when
//! evaluated: quoted variables splice in the bound object renamed to the
//! literal's context, parameter variables project a single context variable,
//! and explicit substitutions are applied eagerly.
//!
//! Evaluation is fuel-limited so that diverging programs terminate with a
//! reported budget exhaustion rather than spinning.

use crate::coreml::syntax::{Branch, Env, Expr, MLPattern, MLType, Neutral, Program, Value};
use crate::diag::{err, Code, Result};
use crate::names::NameGen;
use crate::sf::matching::{alpha_eq, match_sf_unchecked};
use crate::sf::subst::{apply_subst_names, rename_term};
use crate::sf::syntax::{
    ContextualObject, ContextualType, Name, SFCtx, SFPattern, SFSubst, SFTerm,
};
use std::rc::Rc;

/// Default evaluation step budget.
pub const DEFAULT_FUEL: u64 = 100_000;

fn tick(fuel: &mut u64) -> Result<()> {
    if *fuel == 0 {
        return err(Code::FuelExhausted, "evaluation step budget exhausted".to_string());
    }
    *fuel -= 1;
    Ok(())
}

/// Evaluate every definition in order, each seeing the values of the
/// previous ones. Returns the resulting bindings in declaration order.
pub fn eval_program(prog: &Program, fuel: &mut u64) -> Result<Vec<(Name, Value)>> {
    let mut env = Env::empty();
    let mut out = Vec::new();
    for d in &prog.defs {
        let v = eval_expr(prog, &env, &d.body, fuel)?;
        env = env.bind(d.name.clone(), v.clone());
        out.push((d.name.clone(), v));
    }
    Ok(out)
}

pub fn eval_expr(prog: &Program, env: &Env, e: &Expr, fuel: &mut u64) -> Result<Value> {
    tick(fuel)?;
    match e {
        Expr::Emb(n) => eval_neutral(prog, env, n, fuel),
        Expr::Fun { f, x, body } => Ok(Value::CloVal {
            f: f.clone(),
            x: x.clone(),
            body: Rc::new((**body).clone()),
            env: env.clone(),
        }),
        Expr::Let { x, rhs, body } => {
            let v = eval_neutral(prog, env, rhs, fuel)?;
            eval_expr(prog, &env.bind(x.clone(), v), body, fuel)
        }
        Expr::Match { scrutinee, branches } => {
            let v = eval_neutral(prog, env, scrutinee, fuel)?;
            eval_match(prog, env, &v, branches, fuel)
        }
        Expr::CtxObj(ectx, m) => {
            let gen = NameGen::new();
            let resolved = resolve_sf(env, ectx, m, &gen)?;
            // Scope safety: the resolved term may mention only the literal's
            // context variables.
            if resolved.free_vars().iter().any(|x| !ectx.contains(x)) {
                return err(
                    Code::InternalInvariantViolation,
                    format!("resolved object escapes its context: {resolved} at [{}]", ectx.join(", ")),
                );
            }
            Ok(Value::CtxVal(ContextualObject::new(ectx.clone(), resolved)))
        }
    }
}

pub fn eval_neutral(prog: &Program, env: &Env, n: &Neutral, fuel: &mut u64) -> Result<Value> {
    tick(fuel)?;
    match n {
        Neutral::Var(x) => match env.lookup(x) {
            Some(v) => Ok(v.clone()),
            None => err(
                Code::InternalInvariantViolation,
                format!("unbound variable {x} reached the evaluator"),
            ),
        },
        Neutral::App(f, a) => {
            let vf = eval_neutral(prog, env, f, fuel)?;
            let va = eval_expr(prog, env, a, fuel)?;
            apply_value(prog, &vf, va, fuel)
        }
        Neutral::ConApp(c, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_expr(prog, env, a, fuel)?);
            }
            Ok(Value::DataVal(c.clone(), vals))
        }
        Neutral::Ann(e, _) => eval_expr(prog, env, e, fuel),
        Neutral::NonSyn(_) => err(
            Code::InternalInvariantViolation,
            "unsynthesizable expression reached the evaluator".to_string(),
        ),
    }
}

/// Apply a function value; the closure re-binds its own name so recursive
/// calls see the same closure.
pub fn apply_value(prog: &Program, vf: &Value, va: Value, fuel: &mut u64) -> Result<Value> {
    match vf {
        Value::CloVal { f, x, body, env } => {
            let env2 = env.bind(f.clone(), vf.clone()).bind(x.clone(), va);
            eval_expr(prog, &env2, body, fuel)
        }
        _ => err(
            Code::InternalInvariantViolation,
            "application of a non-function value".to_string(),
        ),
    }
}

fn eval_match(
    prog: &Program,
    env: &Env,
    v: &Value,
    branches: &[Branch],
    fuel: &mut u64,
) -> Result<Value> {
    match v {
        Value::DataVal(..) => {
            for b in branches {
                let Branch::Data { pattern, body } = b else {
                    return err(
                        Code::InternalInvariantViolation,
                        "contextual branch against a data scrutinee".to_string(),
                    );
                };
                if let Some(binds) = match_ml(pattern, v) {
                    let mut env2 = env.clone();
                    for (x, bv) in binds {
                        env2 = env2.bind(x, bv);
                    }
                    return eval_expr(prog, &env2, body, fuel);
                }
            }
            err(Code::MatchFailure, format!("no branch matches {v}"))
        }
        Value::CtxVal(obj) => {
            for b in branches {
                let Branch::Ctx { ctx, pattern, body } = b else {
                    return err(
                        Code::InternalInvariantViolation,
                        "data branch against a contextual scrutinee".to_string(),
                    );
                };
                let pat_names = ctx.names();
                if let Some(binds) =
                    match_sf_unchecked(&pat_names, &obj.ectx, pattern, &obj.term)?
                {
                    let mut env2 = env.clone();
                    for (x, bobj) in binds {
                        env2 = env2.bind(x, Value::CtxVal(bobj));
                    }
                    return eval_expr(prog, &env2, body, fuel);
                }
            }
            err(Code::MatchFailure, format!("no branch matches {obj}"))
        }
        Value::CloVal { .. } => err(
            Code::InternalInvariantViolation,
            "match on a function value".to_string(),
        ),
    }
}

/// First-order matching of data patterns against data values.
pub fn match_ml(pat: &MLPattern, v: &Value) -> Option<Vec<(Name, Value)>> {
    match (pat, v) {
        (MLPattern::PVarML(x), _) => Some(vec![(x.clone(), v.clone())]),
        (MLPattern::PCon(c, ps), Value::DataVal(c2, vs)) => {
            if c != c2 || ps.len() != vs.len() {
                return None;
            }
            let mut binds = Vec::new();
            for (p, sub) in ps.iter().zip(vs) {
                binds.extend(match_ml(p, sub)?);
            }
            Some(binds)
        }
        (MLPattern::PCon(..), _) => None,
    }
}

/// Resolve an SF term against the runtime environment at context `psi_hat`
/// (outermost first), producing a ground term. Binders that shadow a context
/// name are freshened so that positional renaming of spliced objects stays
/// capture-free.
pub fn resolve_sf(env: &Env, psi_hat: &[Name], m: &SFTerm, gen: &NameGen) -> Result<SFTerm> {
    match m {
        SFTerm::BVar(_) => Ok(m.clone()),
        SFTerm::ConstApp(c, args) => {
            let rs = args
                .iter()
                .map(|a| resolve_sf(env, psi_hat, a, gen))
                .collect::<Result<Vec<_>>>()?;
            Ok(SFTerm::ConstApp(c.clone(), rs))
        }
        SFTerm::Lam(x, body) => {
            let (x2, body2) = if psi_hat.contains(x) {
                let mut avoid = psi_hat.to_vec();
                all_names(body, &mut avoid);
                let fresh = gen.fresh_avoiding(x, &|n| avoid.iter().any(|a| a == n));
                let renamed = rename_free_bvar(x, &fresh, body);
                (fresh, renamed)
            } else {
                (x.clone(), (**body).clone())
            };
            let mut inner = psi_hat.to_vec();
            inner.push(x2.clone());
            let rbody = resolve_sf(env, &inner, &body2, gen)?;
            Ok(SFTerm::Lam(x2, Box::new(rbody)))
        }
        SFTerm::BoxIntro(body) => {
            let rbody = resolve_sf(env, &[], body, gen)?;
            Ok(SFTerm::BoxIntro(Box::new(rbody)))
        }
        SFTerm::QVar(u) => {
            let obj = lookup_ctx_val(env, u)?;
            if obj.ectx.len() != psi_hat.len() {
                return err(
                    Code::InternalInvariantViolation,
                    format!(
                        "quoted variable {u} spliced at context length {} but carries {}",
                        psi_hat.len(),
                        obj.ectx.len()
                    ),
                );
            }
            rename_term(&obj.ectx, psi_hat, &obj.term)
        }
        SFTerm::PVar(u, weakening) => {
            let obj = lookup_ctx_val(env, u)?;
            let SFTerm::BVar(v) = &obj.term else {
                return err(
                    Code::InternalInvariantViolation,
                    format!("parameter variable {u} bound to a non-variable object"),
                );
            };
            let keep = psi_hat.len().checked_sub(weakening - 1).ok_or_else(|| {
                crate::diag::Diagnostic::new(
                    Code::InternalInvariantViolation,
                    format!("parameter variable {u} weakened past the context"),
                )
            })?;
            let dropped = &psi_hat[..keep];
            if dropped.len() != obj.ectx.len() {
                return err(
                    Code::InternalInvariantViolation,
                    format!(
                        "parameter variable {u} used at context length {} but carries {}",
                        dropped.len(),
                        obj.ectx.len()
                    ),
                );
            }
            let pos = obj.ectx.iter().rposition(|n| n == v).ok_or_else(|| {
                crate::diag::Diagnostic::new(
                    Code::InternalInvariantViolation,
                    format!("parameter variable {u} carries {v}, absent from its own context"),
                )
            })?;
            Ok(SFTerm::BVar(dropped[pos].clone()))
        }
        SFTerm::Clo { body, subst, ann } => {
            let entries = subst
                .entries
                .iter()
                .map(|e| resolve_sf(env, psi_hat, e, gen))
                .collect::<Result<Vec<_>>>()?;
            let sigma = SFSubst { leading_shift: subst.leading_shift, entries };
            match (body.as_ref(), ann) {
                (SFTerm::QVar(u), _) => {
                    let obj = lookup_ctx_val(env, u)?;
                    apply_subst_names(&sigma, &obj.ectx, psi_hat, &obj.term)
                }
                (_, Some(dr)) => {
                    let dom = dr.0.names();
                    let rbody = resolve_sf(env, &dom, body, gen)?;
                    apply_subst_names(&sigma, &dom, psi_hat, &rbody)
                }
                _ => err(
                    Code::InternalInvariantViolation,
                    "unannotated closure whose body is not a quoted variable".to_string(),
                ),
            }
        }
    }
}

fn lookup_ctx_val(env: &Env, u: &str) -> Result<ContextualObject> {
    match env.lookup(u) {
        Some(Value::CtxVal(obj)) => Ok(obj.clone()),
        Some(_) => err(
            Code::InternalInvariantViolation,
            format!("contextual variable {u} bound to a non-contextual value"),
        ),
        None => err(
            Code::InternalInvariantViolation,
            format!("unbound contextual variable {u} reached the evaluator"),
        ),
    }
}

/// Rename free occurrences of the object variable `from` to `to`. Stops at
/// shadowing binders; closure substitution entries are renamed (they live in
/// the current scope) but closure bodies and box bodies are not.
fn rename_free_bvar(from: &str, to: &str, m: &SFTerm) -> SFTerm {
    match m {
        SFTerm::BVar(x) if x == from => SFTerm::bvar(to),
        SFTerm::BVar(_) | SFTerm::QVar(_) | SFTerm::PVar(..) | SFTerm::BoxIntro(_) => m.clone(),
        SFTerm::ConstApp(c, args) => SFTerm::ConstApp(
            c.clone(),
            args.iter().map(|a| rename_free_bvar(from, to, a)).collect(),
        ),
        SFTerm::Lam(x, body) => {
            if x == from {
                m.clone()
            } else {
                SFTerm::Lam(x.clone(), Box::new(rename_free_bvar(from, to, body)))
            }
        }
        SFTerm::Clo { body, subst, ann } => SFTerm::Clo {
            body: body.clone(),
            subst: SFSubst {
                leading_shift: subst.leading_shift,
                entries: subst
                    .entries
                    .iter()
                    .map(|e| rename_free_bvar(from, to, e))
                    .collect(),
            },
            ann: ann.clone(),
        },
    }
}

/// Collect every name appearing in a term, for freshness avoid-sets.
fn all_names(m: &SFTerm, acc: &mut Vec<Name>) {
    match m {
        SFTerm::BVar(x) | SFTerm::QVar(x) => acc.push(x.clone()),
        SFTerm::PVar(x, _) => acc.push(x.clone()),
        SFTerm::ConstApp(_, args) => args.iter().for_each(|a| all_names(a, acc)),
        SFTerm::Lam(x, body) => {
            acc.push(x.clone());
            all_names(body, acc);
        }
        SFTerm::BoxIntro(body) => all_names(body, acc),
        SFTerm::Clo { body, subst, .. } => {
            all_names(body, acc);
            subst.entries.iter().for_each(|e| all_names(e, acc));
        }
    }
}

/// Semantic value equality: structural on data, α-equivalence up to context
/// renaming on contextual objects. Functions are never equal.
pub fn value_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::DataVal(c1, vs1), Value::DataVal(c2, vs2)) => {
            c1 == c2 && vs1.len() == vs2.len() && vs1.iter().zip(vs2).all(|(x, y)| value_eq(x, y))
        }
        (Value::CtxVal(o1), Value::CtxVal(o2)) => {
            if o1.ectx.len() != o2.ectx.len() {
                return false;
            }
            match rename_term(&o2.ectx, &o1.ectx, &o2.term) {
                Ok(t2) => alpha_eq(&o1.term, &t2),
                Err(_) => false,
            }
        }
        _ => false,
    }
}

/// Re-embed a value as a checkable expression. Data and contextual values
/// embed syntactically; closures embed as their `fun` with the captured
/// environment inlined via `let` bindings (only names free in the function,
/// each annotated so the binding synthesizes).
pub fn value_to_expr(prog: &Program, v: &Value) -> Result<Expr> {
    match v {
        Value::DataVal(c, args) => {
            let es = args.iter().map(|a| value_to_expr(prog, a)).collect::<Result<Vec<_>>>()?;
            Ok(Expr::Emb(Box::new(Neutral::ConApp(c.clone(), es))))
        }
        Value::CtxVal(obj) => Ok(Expr::CtxObj(obj.ectx.clone(), obj.term.clone())),
        Value::CloVal { f, x, body, env } => {
            let fun = Expr::Fun { f: f.clone(), x: x.clone(), body: Box::new((**body).clone()) };
            let mut bound = vec![f.clone(), x.clone()];
            let mut fv = Vec::new();
            expr_fv(body, &mut bound, &mut fv);
            let mut acc = fun;
            // Captured values are closed, so the relative order of the
            // generated lets does not matter; emit one per distinct name.
            let mut seen: Vec<&Name> = Vec::new();
            for name in &fv {
                if seen.contains(&name) {
                    continue;
                }
                seen.push(name);
                let Some(cap) = env.lookup(name) else {
                    return err(
                        Code::InternalInvariantViolation,
                        format!("closure body mentions {name}, absent from its environment"),
                    );
                };
                let cexpr = value_to_expr(prog, cap)?;
                let cty = infer_value_type(prog, cap)?;
                acc = Expr::Let {
                    x: name.clone(),
                    rhs: Box::new(Neutral::Ann(Box::new(cexpr), cty)),
                    body: Box::new(acc),
                };
            }
            Ok(acc)
        }
    }
}

/// Best-effort type reconstruction for captured values: data values name
/// their declaring type; closed constructor objects name their target atom.
fn infer_value_type(prog: &Program, v: &Value) -> Result<MLType> {
    match v {
        Value::DataVal(c, _) => match prog.ctor_owner(c) {
            Some((d, _)) => Ok(MLType::Data(d.name.clone())),
            None => err(
                Code::InternalInvariantViolation,
                format!("value built from undeclared constructor {c}"),
            ),
        },
        Value::CtxVal(obj) if obj.ectx.is_empty() => match &obj.term {
            SFTerm::ConstApp(c, _) => match prog.sig.constructor(c) {
                Some(ty) => match ty.spine_view() {
                    Some((_, atom)) => Ok(MLType::Ctx(ContextualType::new(
                        SFCtx::empty(),
                        atom.clone(),
                    ))),
                    None => err(
                        Code::InternalInvariantViolation,
                        format!("constructor {c} has a non-atomic target"),
                    ),
                },
                None => err(
                    Code::InternalInvariantViolation,
                    format!("object built from undeclared constructor {c}"),
                ),
            },
            _ => err(
                Code::CannotSynthesize,
                "cannot reconstruct a type for this contextual value".to_string(),
            ),
        },
        _ => err(
            Code::CannotSynthesize,
            "cannot reconstruct a type for this value".to_string(),
        ),
    }
}

/// Free computation variables of an expression (quoted and parameter
/// variables inside contextual literals included).
fn expr_fv(e: &Expr, bound: &mut Vec<Name>, acc: &mut Vec<Name>) {
    match e {
        Expr::Emb(n) => neutral_fv(n, bound, acc),
        Expr::Fun { f, x, body } => {
            bound.push(f.clone());
            bound.push(x.clone());
            expr_fv(body, bound, acc);
            bound.pop();
            bound.pop();
        }
        Expr::Let { x, rhs, body } => {
            neutral_fv(rhs, bound, acc);
            bound.push(x.clone());
            expr_fv(body, bound, acc);
            bound.pop();
        }
        Expr::Match { scrutinee, branches } => {
            neutral_fv(scrutinee, bound, acc);
            for b in branches {
                match b {
                    Branch::Data { pattern, body } => {
                        let n0 = bound.len();
                        ml_pattern_binders(pattern, bound);
                        expr_fv(body, bound, acc);
                        bound.truncate(n0);
                    }
                    Branch::Ctx { pattern, body, .. } => {
                        let n0 = bound.len();
                        sf_pattern_binders(pattern, bound);
                        expr_fv(body, bound, acc);
                        bound.truncate(n0);
                    }
                }
            }
        }
        Expr::CtxObj(_, m) => sf_term_fv(m, bound, acc),
    }
}

fn neutral_fv(n: &Neutral, bound: &mut Vec<Name>, acc: &mut Vec<Name>) {
    match n {
        Neutral::Var(x) => {
            if !bound.contains(x) {
                acc.push(x.clone());
            }
        }
        Neutral::App(f, a) => {
            neutral_fv(f, bound, acc);
            expr_fv(a, bound, acc);
        }
        Neutral::ConApp(_, args) => args.iter().for_each(|a| expr_fv(a, bound, acc)),
        Neutral::Ann(e, _) => expr_fv(e, bound, acc),
        Neutral::NonSyn(e) => expr_fv(e, bound, acc),
    }
}

fn ml_pattern_binders(p: &MLPattern, bound: &mut Vec<Name>) {
    match p {
        MLPattern::PVarML(x) => bound.push(x.clone()),
        MLPattern::PCon(_, ps) => ps.iter().for_each(|q| ml_pattern_binders(q, bound)),
    }
}

fn sf_pattern_binders(r: &SFPattern, bound: &mut Vec<Name>) {
    match r {
        SFPattern::PQVar(u) | SFPattern::PPVar(u, _) => bound.push(u.clone()),
        SFPattern::PLam(_, r) | SFPattern::PBox(r) => sf_pattern_binders(r, bound),
        SFPattern::PConstApp(_, rs) => rs.iter().for_each(|q| sf_pattern_binders(q, bound)),
        SFPattern::PBVar(_) => {}
    }
}

/// Computation variables mentioned inside an SF term: quoted and parameter
/// variable names (object binders live in a separate namespace).
fn sf_term_fv(m: &SFTerm, bound: &[Name], acc: &mut Vec<Name>) {
    match m {
        SFTerm::QVar(u) | SFTerm::PVar(u, _) => {
            if !bound.contains(u) {
                acc.push(u.clone());
            }
        }
        SFTerm::BVar(_) => {}
        SFTerm::ConstApp(_, args) => args.iter().for_each(|a| sf_term_fv(a, bound, acc)),
        SFTerm::Lam(_, body) | SFTerm::BoxIntro(body) => sf_term_fv(body, bound, acc),
        SFTerm::Clo { body, subst, .. } => {
            sf_term_fv(body, bound, acc);
            subst.entries.iter().for_each(|e| sf_term_fv(e, bound, acc));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreml::syntax::DataDecl;
    use crate::sf::syntax::SFType;

    fn tm_sig() -> crate::sf::syntax::SFSignature {
        crate::sf::syntax::SFSignature {
            atoms: vec!["tm".to_string()],
            constructors: vec![
                ("cst".to_string(), SFType::atom("tm")),
                (
                    "app".to_string(),
                    SFType::arrow(SFType::atom("tm"), SFType::arrow(SFType::atom("tm"), SFType::atom("tm"))),
                ),
                (
                    "lam".to_string(),
                    SFType::arrow(SFType::arrow(SFType::atom("tm"), SFType::atom("tm")), SFType::atom("tm")),
                ),
            ],
        }
    }

    fn nat_prog() -> Program {
        Program {
            sig: tm_sig(),
            datatypes: vec![
                DataDecl {
                    name: "nat".to_string(),
                    ctors: vec![
                        ("zero".to_string(), vec![]),
                        ("suc".to_string(), vec![MLType::data("nat")]),
                    ],
                },
                DataDecl {
                    name: "bool".to_string(),
                    ctors: vec![("tt".to_string(), vec![]), ("ff".to_string(), vec![])],
                },
            ],
            defs: vec![],
        }
    }

    fn nat(n: u32) -> Value {
        let mut v = Value::DataVal("zero".to_string(), vec![]);
        for _ in 0..n {
            v = Value::DataVal("suc".to_string(), vec![v]);
        }
        v
    }

    fn nat_expr(n: u32) -> Expr {
        let mut e = Expr::Emb(Box::new(Neutral::ConApp("zero".to_string(), vec![])));
        for _ in 0..n {
            e = Expr::Emb(Box::new(Neutral::ConApp("suc".to_string(), vec![e])));
        }
        e
    }

    fn run(prog: &Program, e: &Expr) -> Result<Value> {
        let mut fuel = DEFAULT_FUEL;
        eval_expr(prog, &Env::empty(), e, &mut fuel)
    }

    fn ctx_of(names: &[&str]) -> SFCtx {
        SFCtx(names.iter().map(|n| (n.to_string(), "tm".to_string())).collect())
    }

    fn ann(e: Expr, ty: MLType) -> Neutral {
        Neutral::Ann(Box::new(e), ty)
    }

    #[test]
    fn contextual_match_constant() {
        let prog = nat_prog();
        let scrut = ann(
            Expr::CtxObj(vec![], SFTerm::con("cst", vec![])),
            MLType::ctx(SFCtx::empty(), "tm"),
        );
        let e = Expr::Match {
            scrutinee: Box::new(scrut),
            branches: vec![Branch::Ctx {
                ctx: SFCtx::empty(),
                pattern: SFPattern::PConstApp("cst".to_string(), vec![]),
                body: Expr::Emb(Box::new(Neutral::ConApp("tt".to_string(), vec![]))),
            }],
        };
        assert!(value_eq(&run(&prog, &e).unwrap(), &Value::DataVal("tt".to_string(), vec![])));
    }

    #[test]
    fn recursive_double_rebinds_function_name() {
        let prog = nat_prog();
        // fun f x -> match x with zero -> zero | suc y -> suc (suc (f y))
        let double = Expr::Fun {
            f: "f".to_string(),
            x: "x".to_string(),
            body: Box::new(Expr::Match {
                scrutinee: Box::new(Neutral::Var("x".to_string())),
                branches: vec![
                    Branch::Data {
                        pattern: MLPattern::PCon("zero".to_string(), vec![]),
                        body: Expr::Emb(Box::new(Neutral::ConApp("zero".to_string(), vec![]))),
                    },
                    Branch::Data {
                        pattern: MLPattern::PCon(
                            "suc".to_string(),
                            vec![MLPattern::PVarML("y".to_string())],
                        ),
                        body: Expr::Emb(Box::new(Neutral::ConApp(
                            "suc".to_string(),
                            vec![Expr::Emb(Box::new(Neutral::ConApp(
                                "suc".to_string(),
                                vec![Expr::Emb(Box::new(Neutral::App(
                                    Box::new(Neutral::Var("f".to_string())),
                                    Box::new(Expr::Emb(Box::new(Neutral::Var("y".to_string())))),
                                )))],
                            )))],
                        ))),
                    },
                ],
            }),
        };
        let dty = MLType::arrow(MLType::data("nat"), MLType::data("nat"));
        let e = Expr::Emb(Box::new(Neutral::App(
            Box::new(ann(double, dty)),
            Box::new(nat_expr(3)),
        )));
        assert!(value_eq(&run(&prog, &e).unwrap(), &nat(6)));
    }

    #[test]
    fn divergence_exhausts_fuel() {
        let prog = nat_prog();
        // (fun f x -> f x) zero
        let omega = Expr::Fun {
            f: "f".to_string(),
            x: "x".to_string(),
            body: Box::new(Expr::Emb(Box::new(Neutral::App(
                Box::new(Neutral::Var("f".to_string())),
                Box::new(Expr::Emb(Box::new(Neutral::Var("x".to_string())))),
            )))),
        };
        let dty = MLType::arrow(MLType::data("nat"), MLType::data("nat"));
        let e = Expr::Emb(Box::new(Neutral::App(Box::new(ann(omega, dty)), Box::new(nat_expr(0)))));
        let mut fuel = 1000;
        let errv = eval_expr(&prog, &Env::empty(), &e, &mut fuel).unwrap_err();
        assert_eq!(errv.code, Code::FuelExhausted);
    }

    #[test]
    fn quoted_variable_renames_to_new_context() {
        let prog = nat_prog();
        // match [x |- app x x] with [a |- 'm] -> [y |- 'm]  ~>  [y |- app y y]
        let x = || SFTerm::bvar("x");
        let scrut = ann(
            Expr::CtxObj(
                vec!["x".to_string()],
                SFTerm::con("app", vec![x(), x()]),
            ),
            MLType::ctx(ctx_of(&["x"]), "tm"),
        );
        let e = Expr::Match {
            scrutinee: Box::new(scrut),
            branches: vec![Branch::Ctx {
                ctx: ctx_of(&["a"]),
                pattern: SFPattern::PQVar("m".to_string()),
                body: Expr::CtxObj(vec!["y".to_string()], SFTerm::qvar("m")),
            }],
        };
        let expect = Value::CtxVal(ContextualObject::new(
            vec!["y".to_string()],
            SFTerm::con("app", vec![SFTerm::bvar("y"), SFTerm::bvar("y")]),
        ));
        assert!(value_eq(&run(&prog, &e).unwrap(), &expect));
    }

    #[test]
    fn closure_swaps_context_variables() {
        let prog = nat_prog();
        // match [a, b |- app a b] with [a, b |- 'm] ->
        //   [p, q |- 'm[q; p]]   ~>   [p, q |- app q p]
        let scrut = ann(
            Expr::CtxObj(
                vec!["a".to_string(), "b".to_string()],
                SFTerm::con("app", vec![SFTerm::bvar("a"), SFTerm::bvar("b")]),
            ),
            MLType::ctx(ctx_of(&["a", "b"]), "tm"),
        );
        let swap = SFSubst::list(vec![SFTerm::bvar("q"), SFTerm::bvar("p")]);
        let e = Expr::Match {
            scrutinee: Box::new(scrut),
            branches: vec![Branch::Ctx {
                ctx: ctx_of(&["a", "b"]),
                pattern: SFPattern::PQVar("m".to_string()),
                body: Expr::CtxObj(
                    vec!["p".to_string(), "q".to_string()],
                    SFTerm::clo(SFTerm::qvar("m"), swap),
                ),
            }],
        };
        let expect = Value::CtxVal(ContextualObject::new(
            vec!["p".to_string(), "q".to_string()],
            SFTerm::con("app", vec![SFTerm::bvar("q"), SFTerm::bvar("p")]),
        ));
        assert!(value_eq(&run(&prog, &e).unwrap(), &expect));
    }

    #[test]
    fn parameter_variable_projects_and_weakens() {
        let prog = nat_prog();
        // match [c, d |- d] with [a, b |- #v] -> body
        let mk = |body: Expr| Expr::Match {
            scrutinee: Box::new(ann(
                Expr::CtxObj(vec!["c".to_string(), "d".to_string()], SFTerm::bvar("d")),
                MLType::ctx(ctx_of(&["c", "d"]), "tm"),
            )),
            branches: vec![Branch::Ctx {
                ctx: ctx_of(&["a", "b"]),
                pattern: SFPattern::PPVar("v".to_string(), 1),
                body,
            }],
        };
        // #v at [c, d]  ~>  d
        let e1 = mk(Expr::CtxObj(
            vec!["c".to_string(), "d".to_string()],
            SFTerm::PVar("v".to_string(), 1),
        ));
        let expect1 = Value::CtxVal(ContextualObject::new(
            vec!["c".to_string(), "d".to_string()],
            SFTerm::bvar("d"),
        ));
        assert!(value_eq(&run(&prog, &e1).unwrap(), &expect1));
        // ##v at [c, d, e]: the object's context is one entry shorter, so the
        // variable projects from the dropped prefix.
        let e2 = mk(Expr::CtxObj(
            vec!["c".to_string(), "d".to_string(), "e".to_string()],
            SFTerm::PVar("v".to_string(), 2),
        ));
        let expect2 = Value::CtxVal(ContextualObject::new(
            vec!["c".to_string(), "d".to_string(), "e".to_string()],
            SFTerm::bvar("d"),
        ));
        assert!(value_eq(&run(&prog, &e2).unwrap(), &expect2));
    }

    #[test]
    fn exhausted_branches_report_match_failure() {
        let prog = nat_prog();
        let e = Expr::Match {
            scrutinee: Box::new(ann(nat_expr(0), MLType::data("nat"))),
            branches: vec![Branch::Data {
                pattern: MLPattern::PCon("suc".to_string(), vec![MLPattern::PVarML("y".to_string())]),
                body: nat_expr(0),
            }],
        };
        let errv = run(&prog, &e).unwrap_err();
        assert_eq!(errv.code, Code::MatchFailure);
    }

    #[test]
    fn shadowing_binder_is_freshened() {
        let prog = nat_prog();
        // match [x |- x] with [a |- 'm] -> [y |- lam \y. 'm[^1]]
        // The spliced object must refer to the *outer* y, so the inner binder
        // is renamed: the result is lam \y'. y, not lam \y. y.
        let scrut = ann(
            Expr::CtxObj(vec!["x".to_string()], SFTerm::bvar("x")),
            MLType::ctx(ctx_of(&["x"]), "tm"),
        );
        let e = Expr::Match {
            scrutinee: Box::new(scrut),
            branches: vec![Branch::Ctx {
                ctx: ctx_of(&["a"]),
                pattern: SFPattern::PQVar("m".to_string()),
                body: Expr::CtxObj(
                    vec!["y".to_string()],
                    SFTerm::lam("y", SFTerm::clo(SFTerm::qvar("m"), SFSubst::shifted(1, vec![]))),
                ),
            }],
        };
        let v = run(&prog, &e).unwrap();
        let Value::CtxVal(obj) = &v else { panic!("expected a contextual value") };
        let SFTerm::Lam(binder, body) = &obj.term else { panic!("expected a lambda") };
        assert_ne!(binder, "y", "inner binder must be freshened away from the context");
        assert_eq!(**body, SFTerm::bvar("y"), "body must keep referring to the outer y");
        assert!(alpha_eq(&obj.term, &SFTerm::lam("w", SFTerm::bvar("y"))));
    }

    #[test]
    fn lambda_resolution_without_clash_keeps_names() {
        let prog = nat_prog();
        // match [x |- app x x] with [a |- 'm] -> [ |- lam \z. 'm[z]]
        // The one-entry substitution maps the object's variable to z.
        let scrut = ann(
            Expr::CtxObj(
                vec!["x".to_string()],
                SFTerm::con("app", vec![SFTerm::bvar("x"), SFTerm::bvar("x")]),
            ),
            MLType::ctx(ctx_of(&["x"]), "tm"),
        );
        let e = Expr::Match {
            scrutinee: Box::new(scrut),
            branches: vec![Branch::Ctx {
                ctx: ctx_of(&["a"]),
                pattern: SFPattern::PQVar("m".to_string()),
                body: Expr::CtxObj(
                    vec![],
                    SFTerm::lam(
                        "z",
                        SFTerm::clo(SFTerm::qvar("m"), SFSubst::list(vec![SFTerm::bvar("z")])),
                    ),
                ),
            }],
        };
        let expect = Value::CtxVal(ContextualObject::new(
            vec![],
            SFTerm::lam("z", SFTerm::con("app", vec![SFTerm::bvar("z"), SFTerm::bvar("z")])),
        ));
        assert!(value_eq(&run(&prog, &e).unwrap(), &expect));
    }

    #[test]
    fn program_defs_see_previous_defs() {
        let mut prog = nat_prog();
        prog.defs = vec![
            crate::coreml::syntax::Def {
                name: "two".to_string(),
                ty: MLType::data("nat"),
                body: nat_expr(2),
            },
            crate::coreml::syntax::Def {
                name: "three".to_string(),
                ty: MLType::data("nat"),
                body: Expr::Emb(Box::new(Neutral::ConApp(
                    "suc".to_string(),
                    vec![Expr::Emb(Box::new(Neutral::Var("two".to_string())))],
                ))),
            },
        ];
        let mut fuel = DEFAULT_FUEL;
        let out = eval_program(&prog, &mut fuel).unwrap();
        assert_eq!(out.len(), 2);
        assert!(value_eq(&out[1].1, &nat(3)));
    }

    #[test]
    fn closure_reembeds_with_captured_environment() {
        let prog = nat_prog();
        // let n = suc zero in fun f x -> n   — the closure captures n.
        let e = Expr::Let {
            x: "n".to_string(),
            rhs: Box::new(ann(nat_expr(1), MLType::data("nat"))),
            body: Box::new(Expr::Fun {
                f: "f".to_string(),
                x: "x".to_string(),
                body: Box::new(Expr::Emb(Box::new(Neutral::Var("n".to_string())))),
            }),
        };
        let clo = run(&prog, &e).unwrap();
        let reembedded = value_to_expr(&prog, &clo).unwrap();
        let clo2 = run(&prog, &reembedded).unwrap();
        let mut fuel = DEFAULT_FUEL;
        let r1 = apply_value(&prog, &clo, nat(0), &mut fuel).unwrap();
        let r2 = apply_value(&prog, &clo2, nat(0), &mut fuel).unwrap();
        assert!(value_eq(&r1, &r2));
        assert!(value_eq(&r1, &nat(1)));
    }

    #[test]
    fn values_reembed_syntactically() {
        let prog = nat_prog();
        let v = nat(2);
        assert_eq!(value_to_expr(&prog, &v).unwrap(), nat_expr(2));
        let obj = Value::CtxVal(ContextualObject::new(
            vec!["x".to_string()],
            SFTerm::bvar("x"),
        ));
        assert_eq!(
            value_to_expr(&prog, &obj).unwrap(),
            Expr::CtxObj(vec!["x".to_string()], SFTerm::bvar("x"))
        );
    }
}
