//! Diagnostics shared by every stage: stable machine-readable codes plus
//! human-readable messages with optional source locations.

use std::fmt;

/// Stable diagnostic codes. Tests and the CLI match on these, never on message text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    // Signature well-formedness
    UndeclaredAtom,
    DuplicateName,
    NonAtomicTarget,
    // SF term/substitution checking
    UnboundVar,
    ContextMismatch,
    NotClosed,
    SpineArity,
    TypeMismatch,
    LengthMismatch,
    EntryTypeMismatch,
    BadShift,
    LookupFailure,
    // SF pattern checking
    NonLinear,
    WeakeningTooDeep,
    // Core-ML checking
    PatternTypeMismatch,
    ArityError,
    NonAtomicContextualType,
    CannotSynthesize,
    // Evaluation
    MatchFailure,
    FuelExhausted,
    // Target checking
    UnboundTypeVar,
    IndexMismatch,
    UnsatisfiableBranchReached,
    // Driver
    SyntaxError,
    InternalInvariantViolation,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::UndeclaredAtom => "UndeclaredAtom",
            Code::DuplicateName => "DuplicateName",
            Code::NonAtomicTarget => "NonAtomicTarget",
            Code::UnboundVar => "UnboundVar",
            Code::ContextMismatch => "ContextMismatch",
            Code::NotClosed => "NotClosed",
            Code::SpineArity => "SpineArity",
            Code::TypeMismatch => "TypeMismatch",
            Code::LengthMismatch => "LengthMismatch",
            Code::EntryTypeMismatch => "EntryTypeMismatch",
            Code::BadShift => "BadShift",
            Code::LookupFailure => "LookupFailure",
            Code::NonLinear => "NonLinear",
            Code::WeakeningTooDeep => "WeakeningTooDeep",
            Code::PatternTypeMismatch => "PatternTypeMismatch",
            Code::ArityError => "ArityError",
            Code::NonAtomicContextualType => "NonAtomicContextualType",
            Code::CannotSynthesize => "CannotSynthesize",
            Code::MatchFailure => "MatchFailure",
            Code::FuelExhausted => "FuelExhausted",
            Code::UnboundTypeVar => "UnboundTypeVar",
            Code::IndexMismatch => "IndexMismatch",
            Code::UnsatisfiableBranchReached => "UnsatisfiableBranchReached",
            Code::SyntaxError => "SyntaxError",
            Code::InternalInvariantViolation => "InternalInvariantViolation",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Source position, 1-based, attached by the parser when available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into(), pos: None }
    }

    pub fn at(code: Code, message: impl Into<String>, pos: Pos) -> Self {
        Diagnostic { code, message: message.into(), pos: Some(pos) }
    }

    pub fn with_pos(mut self, pos: Pos) -> Self {
        if self.pos.is_none() {
            self.pos = Some(pos);
        }
        self
    }

    /// Machine-readable one-line JSON rendering used by the CLI on failure.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{");
        s.push_str(&format!("\"error\": \"{}\"", self.code.as_str()));
        s.push_str(&format!(", \"message\": {}", json_escape(&self.message)));
        if let Some(p) = self.pos {
            s.push_str(&format!(", \"line\": {}, \"col\": {}", p.line, p.col));
        }
        s.push('}');
        s
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{}:{}: {}: {}", p.line, p.col, self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub type Result<T> = std::result::Result<T, Diagnostic>;

/// Shorthand used throughout the checkers.
pub fn err<T>(code: Code, message: impl Into<String>) -> Result<T> {
    Err(Diagnostic::new(code, message))
}
