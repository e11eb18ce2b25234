//! Recursive-descent parser, one statement per line, one token of lookahead.

use weakcat_core::optics::Axis;
use weakcat_core::scenarios::Interpretation;

use super::ast::*;
use super::lexer::{LexResult, LineLexer, Token};

/// Deepest expression tree accepted; keeps recursion in later passes bounded.
pub const MAX_EXPR_DEPTH: usize = 64;

/// Parses a whole document. Errors on one line do not stop the others from
/// being checked.
pub fn parse(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut doc = ScenarioDoc::default();
    let mut errors = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let mut p = LineParser { lx: LineLexer::new(line, i + 1) };
        match p.statement() {
            Ok(Some(stmt)) => doc.statements.push(stmt),
            Ok(None) => {}
            Err(d) => errors.push(d),
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

/// Parses a single expression (used by tests and tooling).
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let mut p = LineParser { lx: LineLexer::new(text, 1) };
    let (e, _) = p.expr(0)?;
    p.end_of_line()?;
    Ok(e)
}

struct LineParser {
    lx: LineLexer,
}

type Parsed = LexResult<(Expr, usize)>;

impl LineParser {
    fn unexpected(&mut self, expected: &str) -> Diagnostic {
        let span = self.lx.peek_span().unwrap_or_default();
        match self.lx.peek() {
            Ok(tok) => Diagnostic::error(span, format!("expected {expected}, found {}", tok.describe())),
            Err(d) => d,
        }
    }

    fn expect(&mut self, tok: Token, what: &str) -> LexResult<Span> {
        if *self.lx.peek()? == tok {
            Ok(self.lx.advance()?.1)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn eat(&mut self, tok: &Token) -> LexResult<bool> {
        if self.lx.peek()? == tok {
            self.lx.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn end_of_line(&mut self) -> LexResult<()> {
        if self.lx.at_end()? {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn trailing_comment(&mut self) -> LexResult<Option<String>> {
        let comment = match self.lx.peek()? {
            Token::Comment(c) if !c.is_empty() => Some(c.clone()),
            _ => None,
        };
        self.end_of_line()?;
        Ok(comment)
    }

    fn statement(&mut self) -> LexResult<Option<Stmt>> {
        if self.lx.at_end()? {
            return Ok(None);
        }
        let (tok, span) = self.lx.advance()?;
        let Token::Ident(keyword) = tok else {
            return Err(Diagnostic::error(span, format!("expected a statement keyword, found {}", tok.describe())));
        };
        let statement = match keyword.as_str() {
            "scenario" => {
                let name = self.lx.label()?;
                let summary = match self.lx.peek()? {
                    Token::Str(s) => {
                        let s = s.clone();
                        self.lx.advance()?;
                        Some(s)
                    }
                    _ => None,
                };
                Statement::Scenario { name, summary }
            }
            "basis" => {
                let name = self.lx.label()?;
                self.expect(Token::Eq, "`=`")?;
                let mut levels = Vec::new();
                while !self.lx.at_end_raw() {
                    levels.push(self.lx.label()?);
                }
                if levels.is_empty() {
                    return Err(Diagnostic::error(span, "basis needs at least one level"));
                }
                Statement::Basis { name, levels }
            }
            "state" | "probe" | "observe" => {
                let name = self.lx.label()?;
                self.expect(Token::Eq, "`=`")?;
                let (expr, _) = self.expr(0)?;
                match keyword.as_str() {
                    "state" => Statement::State { name, expr },
                    "probe" => Statement::Probe { name, expr },
                    _ => Statement::Observe { name, expr },
                }
            }
            "claim" => {
                let observable = self.lx.label()?;
                self.expect(Token::Eq, "`=`")?;
                let (value, _) = self.expr(0)?;
                let reference = match self.lx.peek()? {
                    Token::Str(s) => {
                        let s = s.clone();
                        self.lx.advance()?;
                        Some(s)
                    }
                    _ => self.trailing_comment()?,
                };
                Statement::Claim { observable, value, reference }
            }
            "circuit" => {
                self.expect(Token::Eq, "`=`")?;
                let mut elements = vec![self.element()?];
                while self.eat(&Token::Semi)? {
                    if self.lx.at_end()? {
                        break;
                    }
                    elements.push(self.element()?);
                }
                Statement::Circuit(elements)
            }
            "interpretation" => {
                self.expect(Token::Eq, "`=`")?;
                let label = self.lx.label()?;
                match Interpretation::parse(&label.text) {
                    Some(i) => Statement::Interpretation(i),
                    None => {
                        return Err(Diagnostic::error(
                            label.span,
                            format!("unknown interpretation `{}` (expected literal or evolved)", label.text),
                        ))
                    }
                }
            }
            "helicity" => {
                self.expect(Token::Eq, "`=`")?;
                Statement::Helicity(self.lx.label()?)
            }
            other => return Err(Diagnostic::error(span, format!("unknown statement `{other}`"))),
        };
        self.end_of_line()?;
        Ok(Some(Stmt { statement, span }))
    }

    fn axis(&mut self) -> LexResult<Axis> {
        let label = self.lx.label()?;
        Axis::parse(&label.text)
            .ok_or_else(|| Diagnostic::error(label.span, format!("unknown axis `{}` (expected x, y or z)", label.text)))
    }

    /// `, label, label` or nothing before `)`.
    fn optional_pair(&mut self) -> LexResult<Option<(Label, Label)>> {
        if !self.eat(&Token::Comma)? {
            return Ok(None);
        }
        let a = self.lx.label()?;
        self.expect(Token::Comma, "`,`")?;
        Ok(Some((a, self.lx.label()?)))
    }

    fn element(&mut self) -> LexResult<CircuitElement> {
        let (tok, span) = self.lx.advance()?;
        let Token::Ident(name) = tok else {
            return Err(Diagnostic::error(span, format!("expected a circuit element, found {}", tok.describe())));
        };
        self.expect(Token::LParen, "`(`")?;
        let element = match name.as_str() {
            "bs" => {
                let a = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                let b = self.lx.label()?;
                let theta = if self.eat(&Token::Comma)? { Some(self.expr(0)?.0) } else { None };
                Element::BeamSplitter { a, b, theta }
            }
            "phase" => {
                let path = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                Element::Phase { path, phi: self.expr(0)?.0 }
            }
            "spinturner" => {
                let path = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                let axis = self.axis()?;
                self.expect(Token::Comma, "`,`")?;
                let angle = self.expr(0)?.0;
                Element::SpinTurner { path, axis, angle, spins: self.optional_pair()? }
            }
            "bfield" => {
                let input = self.lx.label()?;
                self.expect(Token::Arrow, "`->`")?;
                let up = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                let down = self.lx.label()?;
                Element::BField { input, up, down, spins: self.optional_pair()? }
            }
            "analyzer" => {
                let path = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                Element::Analyzer { path, level: self.lx.label()? }
            }
            "detector" => {
                let name = self.lx.label()?;
                self.expect(Token::Comma, "`,`")?;
                Element::Detector { name, path: self.lx.label()? }
            }
            other => return Err(Diagnostic::error(span, format!("unknown circuit element `{other}`"))),
        };
        self.expect(Token::RParen, "`)`")?;
        Ok(CircuitElement { element, span })
    }

    fn check_depth(depth: usize, span: Span) -> LexResult<()> {
        if depth > MAX_EXPR_DEPTH {
            Err(Diagnostic::error(span, "expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    /// `nesting` counts enclosing parentheses and unary operators.
    fn expr(&mut self, nesting: usize) -> Parsed {
        let (mut lhs, mut depth) = self.term(nesting)?;
        loop {
            let op = match self.lx.peek()? {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok((lhs, depth)),
            };
            let (_, span) = self.lx.advance()?;
            let (rhs, d) = self.term(nesting)?;
            depth = depth.max(d) + 1;
            Self::check_depth(depth, span)?;
            lhs = Expr { span: lhs.span, kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)) };
        }
    }

    fn term(&mut self, nesting: usize) -> Parsed {
        let (mut lhs, mut depth) = self.unary(nesting)?;
        loop {
            let op = match self.lx.peek()? {
                Token::Star => Some(BinOp::Mul),
                Token::Slash => Some(BinOp::Div),
                Token::Int(_) | Token::Real(_) | Token::Ident(_) | Token::Ket(_) | Token::LParen => None,
                _ => return Ok((lhs, depth)),
            };
            let span = self.lx.peek_span()?;
            if op.is_some() {
                self.lx.advance()?;
            }
            let (rhs, d) = self.unary(nesting)?;
            depth = depth.max(d) + 1;
            Self::check_depth(depth, span)?;
            lhs =
                Expr { span: lhs.span, kind: ExprKind::Binary(op.unwrap_or(BinOp::Mul), Box::new(lhs), Box::new(rhs)) };
        }
    }

    fn unary(&mut self, nesting: usize) -> Parsed {
        let span = self.lx.peek_span()?;
        Self::check_depth(nesting + 1, span)?;
        match self.lx.peek()? {
            Token::Minus => {
                self.lx.advance()?;
                let (inner, d) = self.unary(nesting + 1)?;
                Self::check_depth(d + 1, span)?;
                Ok((Expr { kind: ExprKind::Neg(Box::new(inner)), span }, d + 1))
            }
            Token::Plus => {
                self.lx.advance()?;
                self.unary(nesting + 1)
            }
            _ => self.atom(nesting),
        }
    }

    fn call_arg(&mut self, nesting: usize) -> Parsed {
        self.expect(Token::LParen, "`(`")?;
        let (e, d) = self.expr(nesting + 1)?;
        self.expect(Token::RParen, "`)`")?;
        Ok((e, d))
    }

    fn atom(&mut self, nesting: usize) -> Parsed {
        let (tok, span) = self.lx.advance()?;
        let leaf = |kind| Ok((Expr { kind, span }, 1));
        match tok {
            Token::Int(n) => leaf(ExprKind::Num(Number::Int(n))),
            Token::Real(x) => leaf(ExprKind::Num(Number::Real(x))),
            Token::Ket(labels) => leaf(ExprKind::Ket(labels)),
            Token::LParen => {
                let (e, d) = self.expr(nesting + 1)?;
                self.expect(Token::RParen, "`)`")?;
                Ok((e, d))
            }
            Token::Ident(name) => match name.as_str() {
                "i" => leaf(ExprKind::Imag),
                "pi" => leaf(ExprKind::Pi),
                "id" => leaf(ExprKind::Identity),
                "proj" => {
                    self.expect(Token::LParen, "`(`")?;
                    let mut pairs = Vec::new();
                    loop {
                        let sub = self.lx.label()?;
                        self.expect(Token::Eq, "`=`")?;
                        pairs.push((sub, self.lx.label()?));
                        if !self.eat(&Token::Comma)? {
                            break;
                        }
                    }
                    self.expect(Token::RParen, "`)`")?;
                    leaf(ExprKind::Proj(pairs))
                }
                "sigma" => {
                    self.expect(Token::LParen, "`(`")?;
                    let level = self.lx.label()?;
                    self.expect(Token::RParen, "`)`")?;
                    leaf(ExprKind::Sigma(level))
                }
                "pauli" => {
                    self.expect(Token::LParen, "`(`")?;
                    let axis = self.axis()?;
                    self.expect(Token::Comma, "`,`")?;
                    let a = self.lx.label()?;
                    self.expect(Token::Comma, "`,`")?;
                    let b = self.lx.label()?;
                    self.expect(Token::RParen, "`)`")?;
                    leaf(ExprKind::Pauli(axis, a, b))
                }
                _ => {
                    if let Some(digits) = name.strip_prefix("sqrt").filter(|d| !d.is_empty()) {
                        if let Ok(n) = digits.parse::<u64>() {
                            let arg = Expr { kind: ExprKind::Num(Number::Int(n)), span };
                            return Ok((Expr { kind: ExprKind::Call(Func::Sqrt, Box::new(arg)), span }, 2));
                        }
                    }
                    if let Some(f) = Func::parse(&name) {
                        let (arg, d) = self.call_arg(nesting)?;
                        Self::check_depth(d + 1, span)?;
                        return Ok((Expr { kind: ExprKind::Call(f, Box::new(arg)), span }, d + 1));
                    }
                    leaf(ExprKind::Var(name))
                }
            },
            other => Err(Diagnostic::error(span, format!("expected an expression, found {}", other.describe()))),
        }
    }
}
