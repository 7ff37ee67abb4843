//! Line-oriented concrete syntax.
//!
//! ```text
//! % comment
//! actions a, b          % optional alphabet declaration
//! X := (a,1).X          % one definition per line
//! X <a> (a,2).nil       % optional root, must be the last line
//! ```
//!
//! Grammar (prefix binds tightest, then `+`, then cooperation; binary
//! operators associate to the left):
//!
//! ```text
//! expr   := expr "<" actions? ">" sum | sum
//! sum    := sum "+" factor | factor
//! factor := "nil" | PREFIX "." factor | IDENT | "(" expr ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::{ActionSet, Document, Env, Prefix, Process};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undefined constant `{0}`")]
    UndefinedConstant(String),
    #[error(
        "unguarded recursion: `{occurrence}` occurs outside any prefix in the body of `{constant}`"
    )]
    UnguardedRecursion {
        constant: String,
        occurrence: String,
    },
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(String),
    #[error("malformed rate `{0}`")]
    BadRate(String),
    #[error("constant `{0}` is defined twice")]
    DuplicateDefinition(String),
    #[error("no root expression")]
    MissingRoot,
}

/// A diagnostic with a 1-based source position (0 when not tied to a position).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, line: usize, column: usize) -> Self {
        ParseError { kind, line, column }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.kind)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Number(String),
    Assign,
    LParen,
    RParen,
    Comma,
    Dot,
    Plus,
    Lt,
    Gt,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) | Token::Number(s) => write!(f, "`{s}`"),
            Token::Assign => f.write_str("`:=`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Dot => f.write_str("`.`"),
            Token::Plus => f.write_str("`+`"),
            Token::Lt => f.write_str("`<`"),
            Token::Gt => f.write_str("`>`"),
            Token::End => f.write_str("end of line"),
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '%' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let digits = |i: &mut usize| {
                while *i < chars.len() && chars[*i].is_ascii_digit() {
                    *i += 1;
                }
            };
            digits(&mut i);
            if i + 1 < chars.len() && matches!(chars[i], '.' | '/') && chars[i + 1].is_ascii_digit()
            {
                i += 1;
                digits(&mut i);
            }
            out.push((Token::Number(chars[start..i].iter().collect()), col));
            continue;
        }
        let tok = match c {
            ':' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Token::Assign
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '.' => Token::Dot,
            '+' => Token::Plus,
            '<' => Token::Lt,
            '>' => Token::Gt,
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                    line_no,
                    col,
                ))
            }
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

/// Token stream of one source line.
pub struct Cursor<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    line: usize,
    constants: Vec<(String, usize, usize)>,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [(Token, usize)], line: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
            constants: Vec::new(),
        }
    }

    pub fn peek(&self) -> &Token {
        self.peek_at(0)
    }

    pub fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    pub fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    pub fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    pub fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(kind, self.line, self.column())
    }

    pub fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax(format!(
            "expected {expected}, found {}",
            self.peek()
        )))
    }

    pub fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    pub fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Token::Ident(s) if s != "nil" => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Parses a positive rate literal.
    pub fn expect_rate(&mut self) -> Result<crate::semiring::Rational, ParseError> {
        let col = self.column();
        match self.peek().clone() {
            Token::Number(text) => {
                self.bump();
                let rate: crate::semiring::Rational = text.parse().map_err(|_| {
                    ParseError::new(ParseErrorKind::BadRate(text.clone()), self.line, col)
                })?;
                if rate.is_zero() {
                    return Err(ParseError::new(
                        ParseErrorKind::NonPositiveRate(text),
                        self.line,
                        col,
                    ));
                }
                Ok(rate)
            }
            _ => Err(self.unexpected("a rate")),
        }
    }
}

fn parse_expr<P: Prefix>(c: &mut Cursor<'_>) -> Result<Process<P>, ParseError> {
    let mut left = parse_sum(c)?;
    while *c.peek() == Token::Lt {
        c.bump();
        let mut set = ActionSet::new();
        if *c.peek() != Token::Gt {
            loop {
                set.insert(c.expect_ident("an action")?);
                if *c.peek() == Token::Comma {
                    c.bump();
                } else {
                    break;
                }
            }
        }
        c.expect(Token::Gt, "`>`")?;
        let right = parse_sum(c)?;
        left = Process::coop(left, right, set);
    }
    Ok(left)
}

fn parse_sum<P: Prefix>(c: &mut Cursor<'_>) -> Result<Process<P>, ParseError> {
    let mut left = parse_factor(c)?;
    while *c.peek() == Token::Plus {
        c.bump();
        let right = parse_factor(c)?;
        left = Process::choice(left, right);
    }
    Ok(left)
}

fn parse_factor<P: Prefix>(c: &mut Cursor<'_>) -> Result<Process<P>, ParseError> {
    if let Some(prefix) = P::parse(c)? {
        c.expect(Token::Dot, "`.` after prefix")?;
        let cont = parse_factor(c)?;
        return Ok(Process::prefix(prefix, cont));
    }
    match c.peek().clone() {
        Token::Ident(s) if s == "nil" => {
            c.bump();
            Ok(Process::Nil)
        }
        Token::Ident(s) => {
            c.constants.push((s.clone(), c.line, c.column()));
            c.bump();
            Ok(Process::Const(s))
        }
        Token::LParen => {
            c.bump();
            let inner = parse_expr(c)?;
            c.expect(Token::RParen, "`)`")?;
            Ok(inner)
        }
        _ => Err(c.unexpected("a process")),
    }
}

fn parse_line_expr<P: Prefix>(c: &mut Cursor<'_>) -> Result<Process<P>, ParseError> {
    let term = parse_expr(c)?;
    if *c.peek() != Token::End {
        return Err(c.unexpected("end of line"));
    }
    Ok(term)
}

pub(super) fn parse_document<P: Prefix>(text: &str) -> Result<Document<P>, ParseError> {
    let mut env = Env::new();
    let mut root: Option<(Process<P>, usize)> = None;
    let mut constants = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw, line_no)?;
        if tokens.len() == 1 {
            continue;
        }
        if let Some((_, root_line)) = &root {
            return Err(ParseError::new(
                ParseErrorKind::Syntax(format!(
                    "the root expression on line {root_line} must be the last line"
                )),
                line_no,
                tokens[0].1,
            ));
        }
        let mut c = Cursor::new(&tokens, line_no);
        match (c.peek_at(0).clone(), c.peek_at(1).clone()) {
            (Token::Ident(kw), Token::Ident(_)) if kw == "actions" => {
                c.bump();
                loop {
                    env.declare_action(c.expect_ident("an action")?);
                    match c.bump() {
                        Token::Comma => continue,
                        Token::End => break,
                        _ => {
                            return Err(ParseError::new(
                                ParseErrorKind::Syntax("expected `,` or end of line".into()),
                                line_no,
                                c.column(),
                            ))
                        }
                    }
                }
            }
            (Token::Ident(name), Token::Assign) => {
                let col = c.column();
                c.bump();
                c.bump();
                let body = parse_line_expr::<P>(&mut c)?;
                env.define(name, body)
                    .map_err(|kind| ParseError::new(kind, line_no, col))?;
            }
            _ => {
                let term = parse_line_expr::<P>(&mut c)?;
                env.absorb(&term);
                root = Some((term, line_no));
            }
        }
        constants.append(&mut c.constants);
    }
    for (name, line, col) in constants {
        if env.body(&name).is_none() {
            return Err(ParseError::new(
                ParseErrorKind::UndefinedConstant(name),
                line,
                col,
            ));
        }
    }
    Ok(Document {
        env,
        root: root.map(|(t, _)| t),
    })
}

/// Parses a single expression whose constants must be defined in `env`.
pub(super) fn parse_expression<P: Prefix>(
    text: &str,
    env: &Env<P>,
) -> Result<Process<P>, ParseError> {
    if text.contains('\n') {
        return Err(ParseError::new(
            ParseErrorKind::Syntax("expression must fit on one line".into()),
            1,
            1,
        ));
    }
    let tokens = tokenize(text, 1)?;
    let mut c = Cursor::new(&tokens, 1);
    let term = parse_line_expr(&mut c)?;
    for (name, line, col) in c.constants {
        if env.body(&name).is_none() {
            return Err(ParseError::new(
                ParseErrorKind::UndefinedConstant(name),
                line,
                col,
            ));
        }
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_columns() {
        let toks = tokenize("X := (a, 3/2).X % tail", 1).unwrap();
        let kinds: Vec<Token> = toks.iter().map(|(t, _)| t.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Token::Ident("X".into()),
                Token::Assign,
                Token::LParen,
                Token::Ident("a".into()),
                Token::Comma,
                Token::Number("3/2".into()),
                Token::RParen,
                Token::Dot,
                Token::Ident("X".into()),
                Token::End,
            ]
        );
        assert_eq!(toks[5].1, 10);
    }

    #[test]
    fn decimals_do_not_swallow_prefix_dot() {
        let toks = tokenize("(0.5).a", 1).unwrap();
        assert_eq!(toks[1].0, Token::Number("0.5".into()));
        assert_eq!(toks[3].0, Token::Dot);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a ; b", 3).unwrap_err();
        assert_eq!((err.line, err.column), (3, 3));
    }
}
