//! Abstract syntax of the framework layer: types, signatures, contexts,
//! terms, substitutions, patterns, and contextual packaging.

use std::fmt;

pub type Atom = String;
pub type Name = String;

/// SF types: atoms, arrows, and the closed-subterm modality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SFType {
    Atom(Atom),
    Arrow(Box<SFType>, Box<SFType>),
    Boxed(Box<SFType>),
}

impl SFType {
    pub fn atom(a: &str) -> SFType {
        SFType::Atom(a.to_string())
    }

    pub fn arrow(dom: SFType, cod: SFType) -> SFType {
        SFType::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn boxed(inner: SFType) -> SFType {
        SFType::Boxed(Box::new(inner))
    }

    /// The spine view: argument types in order plus the atomic target.
    /// Fails when the type does not end in an atom.
    pub fn spine_view(&self) -> Option<(Vec<&SFType>, &Atom)> {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                SFType::Atom(a) => return Some((args, a)),
                SFType::Arrow(d, c) => {
                    args.push(d.as_ref());
                    cur = c;
                }
                SFType::Boxed(_) => return None,
            }
        }
    }
}

/// Declared atoms and constructors. Constructor types are spine shaped:
/// they end in a declared atom.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SFSignature {
    pub atoms: Vec<Atom>,
    pub constructors: Vec<(Name, SFType)>,
}

impl SFSignature {
    pub fn has_atom(&self, a: &str) -> bool {
        self.atoms.iter().any(|x| x == a)
    }

    pub fn constructor(&self, c: &str) -> Option<&SFType> {
        self.constructors.iter().find(|(n, _)| n == c).map(|(_, t)| t)
    }
}

/// Typed SF context; entries are ordered with the innermost binding last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SFCtx(pub Vec<(Name, Atom)>);

/// Type-erased context: the name list kept with runtime contextual objects.
pub type ErasedCtx = Vec<Name>;

impl SFCtx {
    pub fn empty() -> SFCtx {
        SFCtx(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, name: impl Into<Name>, atom: impl Into<Atom>) {
        self.0.push((name.into(), atom.into()));
    }

    pub fn extended(&self, name: impl Into<Name>, atom: impl Into<Atom>) -> SFCtx {
        let mut c = self.clone();
        c.push(name, atom);
        c
    }

    /// Innermost binding wins on (freshened-away) name reuse.
    pub fn lookup(&self, name: &str) -> Option<&Atom> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    /// Drops the `n` innermost entries; `None` when the context is shorter.
    pub fn drop_innermost(&self, n: usize) -> Option<SFCtx> {
        if n > self.0.len() {
            return None;
        }
        Some(SFCtx(self.0[..self.0.len() - n].to_vec()))
    }

    pub fn names(&self) -> ErasedCtx {
        self.0.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.0.iter().map(|(_, a)| a.clone()).collect()
    }

    /// Pointwise atom agreement; names are binder choices and do not count.
    pub fn same_shape(&self, other: &SFCtx) -> bool {
        self.len() == other.len()
            && self.0.iter().zip(other.0.iter()).all(|((_, a), (_, b))| a == b)
    }
}

/// The contextual type [Psi |- a]. The payload is atomic by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualType {
    pub ctx: SFCtx,
    pub atom: Atom,
}

impl ContextualType {
    pub fn new(ctx: SFCtx, atom: impl Into<Atom>) -> Self {
        ContextualType { ctx, atom: atom.into() }
    }
}

/// A term packaged with the erased context binding its free variables.
/// Runtime values of this shape are ground: no QVar, PVar, or Clo inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualObject {
    pub ectx: ErasedCtx,
    pub term: SFTerm,
}

impl ContextualObject {
    pub fn new(ectx: ErasedCtx, term: SFTerm) -> Self {
        ContextualObject { ectx, term }
    }

    pub fn is_ground(&self) -> bool {
        self.term.is_ground()
    }
}

/// SF terms, including the contextual-layer extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SFTerm {
    /// Fully applied constructor `c M1 ... Mn`.
    ConstApp(Name, Vec<SFTerm>),
    Lam(Name, Box<SFTerm>),
    /// `box M`; the body is closed.
    BoxIntro(Box<SFTerm>),
    BVar(Name),
    /// Quoted variable `'u`, resolved from the ambient computation context.
    QVar(Name),
    /// Parameter variable; `weakening` counts the '#' signs. One '#' ranges
    /// over the whole context, each further '#' drops one innermost entry.
    PVar(Name, usize),
    /// Explicit closure `M[sigma]`. Surface closures always have a QVar body
    /// and carry no annotation (the domain comes from the quoted variable's
    /// declared context); programmatic closures annotate (domain, range).
    Clo {
        body: Box<SFTerm>,
        subst: SFSubst,
        ann: Option<Box<(SFCtx, SFCtx)>>,
    },
}

impl SFTerm {
    pub fn bvar(x: &str) -> SFTerm {
        SFTerm::BVar(x.to_string())
    }

    pub fn lam(x: &str, body: SFTerm) -> SFTerm {
        SFTerm::Lam(x.to_string(), Box::new(body))
    }

    pub fn con(c: &str, args: Vec<SFTerm>) -> SFTerm {
        SFTerm::ConstApp(c.to_string(), args)
    }

    pub fn boxed(body: SFTerm) -> SFTerm {
        SFTerm::BoxIntro(Box::new(body))
    }

    pub fn qvar(u: &str) -> SFTerm {
        SFTerm::QVar(u.to_string())
    }

    pub fn clo(body: SFTerm, subst: SFSubst) -> SFTerm {
        SFTerm::Clo { body: Box::new(body), subst, ann: None }
    }

    pub fn clo_annotated(body: SFTerm, subst: SFSubst, domain: SFCtx, range: SFCtx) -> SFTerm {
        SFTerm::Clo { body: Box::new(body), subst, ann: Some(Box::new((domain, range))) }
    }

    /// Ground terms mention no quoted variables, parameter variables, or
    /// closures; only they may appear inside runtime values.
    pub fn is_ground(&self) -> bool {
        match self {
            SFTerm::ConstApp(_, args) => args.iter().all(|m| m.is_ground()),
            SFTerm::Lam(_, body) => body.is_ground(),
            SFTerm::BoxIntro(body) => body.is_ground(),
            SFTerm::BVar(_) => true,
            SFTerm::QVar(_) | SFTerm::PVar(..) | SFTerm::Clo { .. } => false,
        }
    }

    /// Free variable names of a ground term.
    pub fn free_vars(&self) -> Vec<Name> {
        fn go(m: &SFTerm, bound: &mut Vec<Name>, acc: &mut Vec<Name>) {
            match m {
                SFTerm::ConstApp(_, args) => args.iter().for_each(|a| go(a, bound, acc)),
                SFTerm::Lam(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, acc);
                    bound.pop();
                }
                SFTerm::BoxIntro(body) => go(body, bound, acc),
                SFTerm::BVar(x) => {
                    if !bound.iter().any(|b| b == x) && !acc.iter().any(|a| a == x) {
                        acc.push(x.clone());
                    }
                }
                SFTerm::QVar(_) | SFTerm::PVar(..) => {}
                SFTerm::Clo { body, subst, .. } => {
                    go(body, bound, acc);
                    for e in &subst.entries {
                        go(e, bound, acc);
                    }
                }
            }
        }
        let mut acc = Vec::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }
}

/// A substitution in shift-plus-entries form. `leading_shift = 0` with no
/// entries is the empty-domain substitution; a nonzero shift `^n` is the
/// identity on what remains of the range after dropping its `n` innermost
/// entries. Entries are positional over the domain, innermost last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFSubst {
    pub leading_shift: usize,
    pub entries: Vec<SFTerm>,
}

impl SFSubst {
    pub fn empty() -> SFSubst {
        SFSubst { leading_shift: 0, entries: Vec::new() }
    }

    pub fn shift(n: usize) -> SFSubst {
        SFSubst { leading_shift: n, entries: Vec::new() }
    }

    pub fn list(entries: Vec<SFTerm>) -> SFSubst {
        SFSubst { leading_shift: 0, entries }
    }

    pub fn shifted(n: usize, entries: Vec<SFTerm>) -> SFSubst {
        SFSubst { leading_shift: n, entries }
    }

    /// The identity on `psi`, eta-expanded to one variable entry per binding.
    pub fn identity(psi: &SFCtx) -> SFSubst {
        SFSubst::list(psi.0.iter().map(|(n, _)| SFTerm::BVar(n.clone())).collect())
    }

    pub fn is_empty_form(&self) -> bool {
        self.leading_shift == 0 && self.entries.is_empty()
    }
}

/// SF patterns. Closures are not part of the pattern language; quoted and
/// parameter pattern variables are linear within one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SFPattern {
    PLam(Name, Box<SFPattern>),
    PBox(Box<SFPattern>),
    PBVar(Name),
    PConstApp(Name, Vec<SFPattern>),
    PQVar(Name),
    /// Parameter pattern variable; weakening counts '#' signs as in terms.
    PPVar(Name, usize),
}

/// How a contextual name entered the ambient context. Quoted bindings stand
/// for whole terms, parameter bindings for single context variables; the two
/// translate at different target types, so uses must respect the kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BindKind {
    Quoted,
    Param,
}

/// The contextual slice of the computation-level typing context: what the
/// framework checker needs to know about quoted and parameter names.
#[derive(Clone, Debug, Default)]
pub struct Ambient(pub Vec<(Name, ContextualType, BindKind)>);

impl Ambient {
    pub fn empty() -> Ambient {
        Ambient(Vec::new())
    }

    pub fn bind(&mut self, name: impl Into<Name>, cty: ContextualType, kind: BindKind) {
        self.0.push((name.into(), cty, kind));
    }

    pub fn lookup(&self, name: &str) -> Option<(&ContextualType, BindKind)> {
        self.0.iter().rev().find(|(n, _, _)| n == name).map(|(_, t, k)| (t, *k))
    }
}

// ---------------------------------------------------------------------------
// Display: the frozen surface syntax. Parsing the printed form reproduces the
// structure; tests rely on that round trip.
// ---------------------------------------------------------------------------

impl fmt::Display for SFType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SFType::Atom(a) => f.write_str(a),
            SFType::Arrow(d, c) => {
                match d.as_ref() {
                    SFType::Arrow(..) => write!(f, "({d}) -> {c}"),
                    _ => write!(f, "{d} -> {c}"),
                }
            }
            SFType::Boxed(t) => write!(f, "[{t}]"),
        }
    }
}

impl SFTerm {
    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }

    fn is_leaf(&self) -> bool {
        match self {
            SFTerm::BVar(_) | SFTerm::QVar(_) | SFTerm::PVar(..) => true,
            SFTerm::ConstApp(_, args) => args.is_empty(),
            SFTerm::Clo { body, .. } => body.is_leaf(),
            _ => false,
        }
    }
}

impl fmt::Display for SFTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SFTerm::ConstApp(c, args) => {
                f.write_str(c)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_atomic(f)?;
                }
                Ok(())
            }
            SFTerm::Lam(x, body) => write!(f, "\\{x}. {body}"),
            SFTerm::BoxIntro(body) => {
                f.write_str("box ")?;
                body.fmt_atomic(f)
            }
            SFTerm::BVar(x) => f.write_str(x),
            SFTerm::QVar(u) => write!(f, "'{u}"),
            SFTerm::PVar(x, k) => {
                for _ in 0..*k {
                    f.write_str("#")?;
                }
                f.write_str(x)
            }
            SFTerm::Clo { body, subst, .. } => {
                body.fmt_atomic(f)?;
                write!(f, "[{subst}]")
            }
        }
    }
}

impl fmt::Display for SFSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.leading_shift > 0 || self.entries.is_empty() {
            write!(f, "^{}", self.leading_shift)?;
            first = false;
        }
        for e in &self.entries {
            if !first {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for SFCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for (i, (n, a)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ContextualType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} |- {}]", self.ctx, self.atom)
    }
}

impl fmt::Display for ContextualObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        if self.ectx.is_empty() {
            f.write_str(".")?;
        } else {
            for (i, n) in self.ectx.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(n)?;
            }
        }
        write!(f, " |- {}]", self.term)
    }
}

impl fmt::Display for SFPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(p: &SFPattern, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match p {
                SFPattern::PBVar(_) | SFPattern::PQVar(_) | SFPattern::PPVar(..) => {
                    write!(f, "{p}")
                }
                SFPattern::PConstApp(_, args) if args.is_empty() => write!(f, "{p}"),
                _ => write!(f, "({p})"),
            }
        }
        match self {
            SFPattern::PLam(x, body) => write!(f, "\\{x}. {body}"),
            SFPattern::PBox(body) => {
                f.write_str("box ")?;
                atomic(body, f)
            }
            SFPattern::PBVar(x) => f.write_str(x),
            SFPattern::PConstApp(c, args) => {
                f.write_str(c)?;
                for a in args {
                    f.write_str(" ")?;
                    atomic(a, f)?;
                }
                Ok(())
            }
            SFPattern::PQVar(u) => write!(f, "'{u}"),
            SFPattern::PPVar(x, k) => {
                for _ in 0..*k {
                    f.write_str("#")?;
                }
                f.write_str(x)
            }
        }
    }
}
