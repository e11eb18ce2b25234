use std::fmt;

use weakcat_core::optics::Axis;
use weakcat_core::scenarios::Interpretation;

/// 1-based source position. All spans compare equal, so `==` on AST nodes
/// is structural.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Span {
    pub fn new(line: usize, column: usize) -> Span {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Int(u64),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Cos,
    Sin,
    Conj,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sqrt, Func::Exp, Func::Cos, Func::Sin, Func::Conj];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Conj => "conj",
        }
    }

    pub fn parse(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(Number),
    Imag,
    Pi,
    /// Identity operator.
    Identity,
    /// A state or observable defined earlier in the document.
    Var(String),
    Call(Func, Box<Expr>),
    /// One label per basis subsystem, in declaration order.
    Ket(Vec<Label>),
    /// Product of level projectors, `proj(path=3, prop=L_p)`.
    Proj(Vec<(Label, Label)>),
    /// Projector onto a single non-path level, `sigma(dn)`.
    Sigma(Label),
    /// Pauli matrix on the two named levels of one subsystem.
    Pauli(Axis, Label, Label),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    BeamSplitter { a: Label, b: Label, theta: Option<Expr> },
    Phase { path: Label, phi: Expr },
    SpinTurner { path: Label, axis: Axis, angle: Expr, spins: Option<(Label, Label)> },
    BField { input: Label, up: Label, down: Label, spins: Option<(Label, Label)> },
    Analyzer { path: Label, level: Label },
    Detector { name: Label, path: Label },
}

impl Element {
    pub fn keyword(&self) -> &'static str {
        match self {
            Element::BeamSplitter { .. } => "bs",
            Element::Phase { .. } => "phase",
            Element::SpinTurner { .. } => "spinturner",
            Element::BField { .. } => "bfield",
            Element::Analyzer { .. } => "analyzer",
            Element::Detector { .. } => "detector",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitElement {
    pub element: Element,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Scenario { name: Label, summary: Option<String> },
    Basis { name: Label, levels: Vec<Label> },
    State { name: Label, expr: Expr },
    Probe { name: Label, expr: Expr },
    Circuit(Vec<CircuitElement>),
    Observe { name: Label, expr: Expr },
    Claim { observable: Label, value: Expr, reference: Option<String> },
    Interpretation(Interpretation),
    Helicity(Label),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub statement: Statement,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioDoc {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, message: message.into(), line: span.line, column: span.column }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, message: message.into(), line: span.line, column: span.column }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, kind, self.message)
    }
}

/// Words with a fixed meaning inside expressions; they cannot name states
/// or observables.
pub const RESERVED: [&str; 11] = ["i", "pi", "id", "proj", "sigma", "pauli", "sqrt", "exp", "cos", "sin", "conj"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
        || (name.starts_with("sqrt") && name.len() > 4 && name[4..].bytes().all(|b| b.is_ascii_digit()))
}
