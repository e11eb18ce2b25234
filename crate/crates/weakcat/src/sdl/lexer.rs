//! Single-line lexer. Labels (basis levels, path names) are lexed on demand
//! by the parser because their character set overlaps with operators.

use super::ast::{Diagnostic, Label, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Ket(Vec<Label>),
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    /// Trailing `# ...` text, trimmed.
    Comment(String),
    End,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("`{s}`"),
            Token::Int(n) => format!("number `{n}`"),
            Token::Real(x) => format!("number `{x}`"),
            Token::Str(_) => "string".into(),
            Token::Ket(_) => "ket".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Semi => "`;`".into(),
            Token::Eq => "`=`".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Arrow => "`->`".into(),
            Token::Comment(_) | Token::End => "end of line".into(),
        }
    }
}

pub type LexResult<T> = Result<T, Diagnostic>;

fn is_label_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '+')
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub struct LineLexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    peeked: Option<(Token, Span, usize)>,
}

impl LineLexer {
    pub fn new(text: &str, line: usize) -> LineLexer {
        LineLexer { chars: text.chars().collect(), pos: 0, line, peeked: None }
    }

    pub fn span_at(&self, pos: usize) -> Span {
        Span::new(self.line, pos + 1)
    }

    fn here(&self) -> Span {
        self.span_at(self.pos)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    /// Drops a peeked token so raw scanning starts where it began.
    fn rewind(&mut self) {
        if let Some((_, _, start)) = self.peeked.take() {
            self.pos = start;
        }
    }

    pub fn peek(&mut self) -> LexResult<&Token> {
        if self.peeked.is_none() {
            self.skip_ws();
            let start = self.pos;
            let span = self.here();
            let tok = self.scan()?;
            self.peeked = Some((tok, span, start));
        }
        Ok(&self.peeked.as_ref().expect("just filled").0)
    }

    pub fn peek_span(&mut self) -> LexResult<Span> {
        self.peek()?;
        Ok(self.peeked.as_ref().expect("just filled").1)
    }

    pub fn advance(&mut self) -> LexResult<(Token, Span)> {
        self.peek()?;
        let (tok, span, _) = self.peeked.take().expect("just filled");
        Ok((tok, span))
    }

    fn scan(&mut self) -> LexResult<Token> {
        let Some(c) = self.at(0) else { return Ok(Token::End) };
        let span = self.here();
        let single = |lexer: &mut LineLexer, tok: Token| {
            lexer.pos += 1;
            Ok(tok)
        };
        match c {
            '#' => {
                let text: String = self.chars[self.pos + 1..].iter().collect();
                self.pos = self.chars.len();
                Ok(Token::Comment(text.trim().to_string()))
            }
            '(' => single(self, Token::LParen),
            ')' => single(self, Token::RParen),
            ',' => single(self, Token::Comma),
            ';' => single(self, Token::Semi),
            '=' => single(self, Token::Eq),
            '+' => single(self, Token::Plus),
            '*' | '·' | '×' => single(self, Token::Star),
            '/' => single(self, Token::Slash),
            '-' | '−' => {
                if self.at(1) == Some('>') {
                    self.pos += 2;
                    Ok(Token::Arrow)
                } else {
                    single(self, Token::Minus)
                }
            }
            '→' => single(self, Token::Arrow),
            'π' => single(self, Token::Ident("pi".into())),
            '√' => {
                self.pos += 1;
                let mut name = String::from("sqrt");
                while let Some(d) = self.at(0).filter(|d| d.is_ascii_digit()) {
                    name.push(d);
                    self.pos += 1;
                }
                Ok(Token::Ident(name))
            }
            '"' => self.string(),
            '|' => self.ket(),
            c if c.is_ascii_digit() || (c == '.' && self.at(1).is_some_and(|d| d.is_ascii_digit())) => self.number(),
            c if is_ident_start(c) => {
                let start = self.pos;
                while self.at(0).is_some_and(is_ident_char) {
                    self.pos += 1;
                }
                Ok(Token::Ident(self.chars[start..self.pos].iter().collect()))
            }
            other => Err(Diagnostic::error(span, format!("unexpected character `{other}`"))),
        }
    }

    fn number(&mut self) -> LexResult<Token> {
        let span = self.here();
        let start = self.pos;
        let mut real = false;
        while self.at(0).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.at(0) == Some('.') {
            real = true;
            self.pos += 1;
            while self.at(0).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.at(0), Some('e' | 'E')) {
            let sign = usize::from(matches!(self.at(1), Some('+' | '-')));
            if self.at(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                real = true;
                self.pos += 1 + sign;
                while self.at(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if !real {
            if let Ok(n) = text.parse::<u64>() {
                return Ok(Token::Int(n));
            }
        }
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Token::Real(x)),
            _ => Err(Diagnostic::error(span, format!("numeric literal `{text}` is out of range"))),
        }
    }

    fn string(&mut self) -> LexResult<Token> {
        let span = self.here();
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.at(0) {
                None => return Err(Diagnostic::error(span, "unterminated string")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(Token::Str(out));
                }
                Some('\\') => {
                    match self.at(1) {
                        Some(c @ ('"' | '\\')) => out.push(c),
                        _ => return Err(Diagnostic::error(self.here(), "invalid escape in string")),
                    }
                    self.pos += 2;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn ket(&mut self) -> LexResult<Token> {
        let open = self.here();
        self.pos += 1;
        let mut labels = Vec::new();
        loop {
            labels.push(self.raw_label()?);
            self.skip_ws();
            match self.at(0) {
                Some(',') => self.pos += 1,
                Some('>' | '⟩') => {
                    self.pos += 1;
                    return Ok(Token::Ket(labels));
                }
                None => return Err(Diagnostic::error(open, "unterminated ket, expected `>`")),
                Some(c) => return Err(Diagnostic::error(self.here(), format!("unexpected `{c}` in ket"))),
            }
        }
    }

    fn raw_label(&mut self) -> LexResult<Label> {
        self.skip_ws();
        let span = self.here();
        let start = self.pos;
        while let Some(c) = self.at(0) {
            let dash = c == '-' && self.at(1).is_some_and(|n| n != '>' && is_label_char(n));
            if is_label_char(c) || (dash && self.pos > start) {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            let found = match self.at(0) {
                Some(c) => format!("`{c}`"),
                None => "end of line".into(),
            };
            return Err(Diagnostic::error(span, format!("expected a label, found {found}")));
        }
        Ok(Label { text: self.chars[start..self.pos].iter().collect(), span })
    }

    /// Lexes a label at the current position, discarding any peeked token.
    pub fn label(&mut self) -> LexResult<Label> {
        self.rewind();
        self.raw_label()
    }

    /// Like [`LineLexer::at_end`] but without tokenizing what follows.
    pub fn at_end_raw(&mut self) -> bool {
        self.rewind();
        self.skip_ws();
        matches!(self.at(0), None | Some('#'))
    }

    /// True when only whitespace or a comment remains.
    pub fn at_end(&mut self) -> LexResult<bool> {
        Ok(matches!(self.peek()?, Token::End | Token::Comment(_)))
    }
}

pub fn valid_label(text: &str) -> bool {
    let mut lexer = LineLexer::new(text, 1);
    matches!(lexer.raw_label(), Ok(l) if l.text == text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(s: &str) -> Vec<Token> {
        let mut lx = LineLexer::new(s, 1);
        let mut out = Vec::new();
        loop {
            let (t, _) = lx.advance().unwrap();
            if t == Token::End {
                return out;
            }
            out.push(t);
        }
    }

    #[test]
    fn kets_and_numbers() {
        let t = tokens("(1/sqrt2)|1,L_p> + 2.5e-1 |2, s_up>");
        assert_eq!(t[0], Token::LParen);
        assert_eq!(t[1], Token::Int(1));
        assert_eq!(t[3], Token::Ident("sqrt2".into()));
        match &t[5] {
            Token::Ket(l) => {
                assert_eq!(l.iter().map(|l| l.text.as_str()).collect::<Vec<_>>(), ["1", "L_p"]);
                assert_eq!(l[1].span, Span::new(1, 13));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(t[7], Token::Real(0.25));
    }

    #[test]
    fn arrow_is_not_part_of_a_label() {
        let mut lx = LineLexer::new("2->3", 1);
        assert_eq!(lx.label().unwrap().text, "2");
        assert_eq!(lx.advance().unwrap().0, Token::Arrow);
        assert_eq!(lx.label().unwrap().text, "3");
        assert!(valid_label("L_-p"));
        assert!(valid_label("L_p+"));
        assert!(!valid_label("-p"));
    }

    #[test]
    fn comments_and_unicode() {
        assert_eq!(tokens("1 − 2 # note"), [Token::Int(1), Token::Minus, Token::Int(2), Token::Comment("note".into())]);
        assert_eq!(tokens("√2π"), [Token::Ident("sqrt2".into()), Token::Ident("pi".into())]);
    }

    #[test]
    fn errors_are_positioned() {
        let mut lx = LineLexer::new("  |1,2", 3);
        let err = lx.advance().unwrap_err();
        assert_eq!((err.line, err.column), (3, 3));
        let mut lx = LineLexer::new("1e999", 1);
        assert!(lx.advance().is_err());
        let mut lx = LineLexer::new("\"abc", 1);
        assert!(lx.advance().is_err());
    }
}
