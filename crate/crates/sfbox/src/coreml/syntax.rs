//! Abstract syntax of the computation language: types, data declarations,
//! bidirectional expression forms, programs, and runtime values.

use crate::sf::syntax::{
    Atom, BindKind, ContextualObject, ContextualType, ErasedCtx, Name, SFCtx, SFPattern,
    SFSignature, SFTerm,
};
use std::fmt;
use std::rc::Rc;

/// Computation-level types. Contextual types compare by shape: the atoms of
/// the context and the payload atom matter, binder names do not.
#[derive(Clone, Debug)]
pub enum MLType {
    Data(Name),
    Arrow(Box<MLType>, Box<MLType>),
    Ctx(ContextualType),
}

impl MLType {
    pub fn data(n: &str) -> MLType {
        MLType::Data(n.to_string())
    }

    pub fn arrow(d: MLType, c: MLType) -> MLType {
        MLType::Arrow(Box::new(d), Box::new(c))
    }

    pub fn ctx(ctx: SFCtx, atom: impl Into<Atom>) -> MLType {
        MLType::Ctx(ContextualType::new(ctx, atom))
    }
}

impl PartialEq for MLType {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MLType::Data(a), MLType::Data(b)) => a == b,
            (MLType::Arrow(d1, c1), MLType::Arrow(d2, c2)) => d1 == d2 && c1 == c2,
            (MLType::Ctx(a), MLType::Ctx(b)) => {
                a.atom == b.atom && a.ctx.same_shape(&b.ctx)
            }
            _ => false,
        }
    }
}

impl Eq for MLType {}

impl fmt::Display for MLType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MLType::Data(n) => f.write_str(n),
            MLType::Arrow(d, c) => match d.as_ref() {
                MLType::Arrow(..) => write!(f, "({d}) -> {c}"),
                _ => write!(f, "{d} -> {c}"),
            },
            MLType::Ctx(ct) => write!(f, "({} |- {})", ct.ctx, ct.atom),
        }
    }
}

/// A data type declaration: a name and its constructors with field types.
#[derive(Clone, Debug, PartialEq)]
pub struct DataDecl {
    pub name: Name,
    pub ctors: Vec<(Name, Vec<MLType>)>,
}

/// Checkable expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// A synthesizing expression used in checking position.
    Emb(Box<Neutral>),
    /// Recursive function: `fun f x -> e`. `f` is bound in the body.
    Fun { f: Name, x: Name, body: Box<Expr> },
    Let { x: Name, rhs: Box<Neutral>, body: Box<Expr> },
    Match { scrutinee: Box<Neutral>, branches: Vec<Branch> },
    /// Contextual literal `[x, y |- M]`; the name list binds M's variables.
    CtxObj(ErasedCtx, SFTerm),
}

/// Synthesizing expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum Neutral {
    Var(Name),
    App(Box<Neutral>, Box<Expr>),
    /// Data constructor application, fully applied.
    ConApp(Name, Vec<Expr>),
    Ann(Box<Expr>, MLType),
    /// A checkable-only expression in synthesizing position. Always a type
    /// error (CannotSynthesize); keeps the parser total.
    NonSyn(Box<Expr>),
}

/// Patterns over data values: variables and nested constructor patterns.
#[derive(Clone, Debug, PartialEq)]
pub enum MLPattern {
    PVarML(Name),
    PCon(Name, Vec<MLPattern>),
}

/// One match branch: either a data-constructor pattern or a contextual
/// pattern `[ctx |- R]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    Data { pattern: MLPattern, body: Expr },
    Ctx { ctx: SFCtx, pattern: SFPattern, body: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def {
    pub name: Name,
    pub ty: MLType,
    pub body: Expr,
}

/// A whole program: an SF signature, data declarations, and value
/// definitions checked and evaluated in order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub sig: SFSignature,
    pub datatypes: Vec<DataDecl>,
    pub defs: Vec<Def>,
}

impl Program {
    pub fn datatype(&self, n: &str) -> Option<&DataDecl> {
        self.datatypes.iter().find(|d| d.name == n)
    }

    /// Find the data type declaring constructor `c`.
    pub fn ctor_owner(&self, c: &str) -> Option<(&DataDecl, &Vec<MLType>)> {
        for d in &self.datatypes {
            if let Some((_, fields)) = d.ctors.iter().find(|(n, _)| n == c) {
                return Some((d, fields));
            }
        }
        None
    }

    pub fn def(&self, n: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == n)
    }
}

/// The computation-level typing context. Contextual-typed entries double as
/// the ambient context of the framework checker; `BindKind` records whether
/// a binding may be used as a parameter variable.
#[derive(Clone, Debug, Default)]
pub struct MLCtx(pub Vec<(Name, MLType, BindKind)>);

impl MLCtx {
    pub fn empty() -> MLCtx {
        MLCtx(Vec::new())
    }

    pub fn bind(&self, name: impl Into<Name>, ty: MLType) -> MLCtx {
        let mut c = self.clone();
        c.0.push((name.into(), ty, BindKind::Quoted));
        c
    }

    pub fn bind_kinded(&self, name: impl Into<Name>, ty: MLType, kind: BindKind) -> MLCtx {
        let mut c = self.clone();
        c.0.push((name.into(), ty, kind));
        c
    }

    pub fn lookup(&self, name: &str) -> Option<(&MLType, BindKind)> {
        self.0.iter().rev().find(|(n, _, _)| n == name).map(|(_, t, k)| (t, *k))
    }

    /// The contextual slice visible to the framework checker.
    pub fn to_ambient(&self) -> crate::sf::syntax::Ambient {
        let mut a = crate::sf::syntax::Ambient::empty();
        for (n, t, k) in &self.0 {
            if let MLType::Ctx(ct) = t {
                a.bind(n.clone(), ct.clone(), *k);
            }
        }
        a
    }
}

/// Runtime values. Environments are persistent (shared tails via `Rc`).
#[derive(Clone, Debug)]
pub enum Value {
    DataVal(Name, Vec<Value>),
    CloVal { f: Name, x: Name, body: Rc<Expr>, env: Env },
    CtxVal(ContextualObject),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::DataVal(c, args) => {
                f.write_str(c)?;
                for a in args {
                    match a {
                        Value::DataVal(_, inner) if !inner.is_empty() => write!(f, " ({a})")?,
                        _ => write!(f, " {a}")?,
                    }
                }
                Ok(())
            }
            Value::CloVal { f: name, .. } => write!(f, "<fun {name}>"),
            Value::CtxVal(obj) => write!(f, "{obj}"),
        }
    }
}

/// A persistent environment: name-to-value bindings with shared structure.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Rc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: Name,
    value: Value,
    rest: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: impl Into<Name>, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode { name: name.into(), value, rest: self.clone() })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.rest;
        }
        None
    }

    /// All bindings, innermost (most recent) first, shadowed entries
    /// included.
    pub fn bindings(&self) -> Vec<(Name, Value)> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Some(node) = &cur.0 {
            out.push((node.name.clone(), node.value.clone()));
            cur = &node.rest;
        }
        out
    }
}
