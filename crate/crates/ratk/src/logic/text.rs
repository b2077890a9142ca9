//! Shared lexer and formula parser for the text formats.
//!
//! One token set serves every surface syntax in the library: domain files,
//! successor state axiom theories, network descriptions, scenarios, and
//! formulas passed on a command line. Connectives are `-` (negation), `&`,
//! `|`, `->`, `<->`; `true` and `false` are reserved constants; `#` starts
//! a comment running to the end of the line.
//!
//! Identifiers may contain `-` when it is flanked by identifier characters
//! (`Go-out`, `shut_down`), which coexists with negation and `->` because a
//! `-` only extends an identifier already in progress.

use std::fmt;

use super::Formula;

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    And,
    Or,
    Neg,
    Arrow,
    DArrow,
    Colon,
    Semi,
    Comma,
    Eq,
    Neq,
    At,
}

impl fmt::Display for Tok {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(out, "`{s}`"),
            Tok::Num(x) => write!(out, "`{x}`"),
            Tok::LParen => write!(out, "`(`"),
            Tok::RParen => write!(out, "`)`"),
            Tok::LBrace => write!(out, "`{{`"),
            Tok::RBrace => write!(out, "`}}`"),
            Tok::LBracket => write!(out, "`[`"),
            Tok::RBracket => write!(out, "`]`"),
            Tok::And => write!(out, "`&`"),
            Tok::Or => write!(out, "`|`"),
            Tok::Neg => write!(out, "`-`"),
            Tok::Arrow => write!(out, "`->`"),
            Tok::DArrow => write!(out, "`<->`"),
            Tok::Colon => write!(out, "`:`"),
            Tok::Semi => write!(out, "`;`"),
            Tok::Comma => write!(out, "`,`"),
            Tok::Eq => write!(out, "`=`"),
            Tok::Neq => write!(out, "`!=`"),
            Tok::At => write!(out, "`@`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes `src`, reporting positions with `start_line` as the first line.
pub fn lex(src: &str, start_line: u32) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = start_line;
    let mut col: u32 = 1;
    let mut chars = src.chars().peekable();

    macro_rules! push {
        ($tok:expr, $at:expr) => {
            out.push(Token {
                tok: $tok,
                line,
                col: $at,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let at = col;
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            _ if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, at);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, at);
            }
            '{' => {
                chars.next();
                col += 1;
                push!(Tok::LBrace, at);
            }
            '}' => {
                chars.next();
                col += 1;
                push!(Tok::RBrace, at);
            }
            '[' => {
                chars.next();
                col += 1;
                push!(Tok::LBracket, at);
            }
            ']' => {
                chars.next();
                col += 1;
                push!(Tok::RBracket, at);
            }
            '&' => {
                chars.next();
                col += 1;
                push!(Tok::And, at);
            }
            '|' => {
                chars.next();
                col += 1;
                push!(Tok::Or, at);
            }
            ':' => {
                chars.next();
                col += 1;
                push!(Tok::Colon, at);
            }
            ';' => {
                chars.next();
                col += 1;
                push!(Tok::Semi, at);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, at);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, at);
            }
            '@' => {
                chars.next();
                col += 1;
                push!(Tok::At, at);
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Neq, at);
                } else {
                    return Err(ParseError::new(line, at, "expected `=` after `!`"));
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        col += 1;
                        push!(Tok::DArrow, at);
                    } else {
                        return Err(ParseError::new(line, at, "expected `>` after `<-`"));
                    }
                } else {
                    return Err(ParseError::new(line, at, "expected `-` after `<`"));
                }
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow, at);
                } else {
                    push!(Tok::Neg, at);
                }
            }
            _ if c.is_ascii_digit() => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        text.push(c);
                        chars.next();
                        col += 1;
                    } else if (c == 'e' || c == 'E')
                        && text
                            .chars()
                            .all(|d| d.is_ascii_digit() || d == '.')
                    {
                        text.push(c);
                        chars.next();
                        col += 1;
                        if let Some(&sign @ ('+' | '-')) = chars.peek() {
                            text.push(sign);
                            chars.next();
                            col += 1;
                        }
                    } else {
                        break;
                    }
                }
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(line, at, format!("bad number `{text}`")))?;
                push!(Tok::Num(value), at);
            }
            _ if ident_start(c) => {
                let mut name = String::new();
                name.push(c);
                chars.next();
                col += 1;
                loop {
                    match chars.peek() {
                        Some(&c) if ident_continue(c) => {
                            name.push(c);
                            chars.next();
                            col += 1;
                        }
                        // `-` extends the identifier only when another
                        // identifier character follows, so `Go-out` is one
                        // name while `a->b` and `a & -b` lex as expected.
                        Some('-') => {
                            let mut ahead = chars.clone();
                            ahead.next();
                            match ahead.peek() {
                                Some(&c) if ident_continue(c) => {
                                    name.push('-');
                                    chars.next();
                                    name.push(c);
                                    chars.next();
                                    col += 2;
                                }
                                _ => break,
                            }
                        }
                        _ => break,
                    }
                }
                push!(Tok::Ident(name), at);
            }
            _ => {
                return Err(ParseError::new(
                    line,
                    at,
                    format!("unexpected character `{c}`"),
                ));
            }
        }
    }
    Ok(out)
}

/// A cursor over lexed tokens.
pub struct TokStream<'a> {
    toks: &'a [Token],
    pos: usize,
    end_line: u32,
    end_col: u32,
}

impl<'a> TokStream<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        let (end_line, end_col) = toks
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1));
        TokStream {
            toks,
            pos: 0,
            end_line,
            end_col,
        }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Index of the cursor within the underlying token slice.
    pub fn index(&self) -> usize {
        self.pos
    }

    /// Position of the token the cursor is on (or just past the end).
    pub fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message.into())
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {tok}, found {t}"))),
            None => Err(self.error(format!("expected {tok}"))),
        }
    }

    /// Consumes an identifier token (any identifier, keyword or not).
    pub fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected {what}, found {t}"))),
            None => Err(self.error(format!("expected {what}"))),
        }
    }

    /// Consumes a specific keyword identifier.
    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{kw}`, found {t}"))),
            None => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    /// Consumes the token if it matches; reports whether it did.
    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    pub fn expect_num(&mut self, what: &str) -> Result<f64, ParseError> {
        match self.peek() {
            Some(Tok::Num(x)) => {
                let x = *x;
                self.pos += 1;
                Ok(x)
            }
            Some(t) => Err(self.error(format!("expected {what}, found {t}"))),
            None => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!(
                "unexpected {} after end of expression",
                self.peek().unwrap()
            )))
        }
    }
}

/// Parses an atom at the current position.
pub type AtomParser<'s, A> = dyn FnMut(&mut TokStream<'_>) -> Result<Formula<A>, ParseError> + 's;

/// Recursive-descent formula parser over lexed tokens. Precedence from
/// loosest to tightest: `<->`, `->` (both right-associative), `|`, `&`,
/// `-`. The `atom` callback parses whatever counts as an atom in the
/// caller's language.
pub fn parse_formula_tokens<A>(
    ts: &mut TokStream<'_>,
    atom: &mut AtomParser<'_, A>,
) -> Result<Formula<A>, ParseError> {
    parse_iff(ts, atom)
}

fn parse_iff<A>(ts: &mut TokStream<'_>, atom: &mut AtomParser<'_, A>) -> Result<Formula<A>, ParseError> {
    let lhs = parse_implies(ts, atom)?;
    if ts.eat(&Tok::DArrow) {
        let rhs = parse_iff(ts, atom)?;
        Ok(Formula::iff(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_implies<A>(
    ts: &mut TokStream<'_>,
    atom: &mut AtomParser<'_, A>,
) -> Result<Formula<A>, ParseError> {
    let lhs = parse_or(ts, atom)?;
    if ts.eat(&Tok::Arrow) {
        let rhs = parse_implies(ts, atom)?;
        Ok(Formula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_or<A>(ts: &mut TokStream<'_>, atom: &mut AtomParser<'_, A>) -> Result<Formula<A>, ParseError> {
    let mut parts = vec![parse_and(ts, atom)?];
    while ts.eat(&Tok::Or) {
        parts.push(parse_and(ts, atom)?);
    }
    Ok(Formula::disj(parts))
}

fn parse_and<A>(ts: &mut TokStream<'_>, atom: &mut AtomParser<'_, A>) -> Result<Formula<A>, ParseError> {
    let mut parts = vec![parse_unary(ts, atom)?];
    while ts.eat(&Tok::And) {
        parts.push(parse_unary(ts, atom)?);
    }
    Ok(Formula::conj(parts))
}

fn parse_unary<A>(
    ts: &mut TokStream<'_>,
    atom: &mut AtomParser<'_, A>,
) -> Result<Formula<A>, ParseError> {
    if ts.eat(&Tok::Neg) {
        let inner = parse_unary(ts, atom)?;
        return Ok(Formula::not(inner));
    }
    if ts.eat(&Tok::LParen) {
        let inner = parse_iff(ts, atom)?;
        ts.expect(&Tok::RParen)?;
        return Ok(inner);
    }
    match ts.peek() {
        Some(Tok::Ident(s)) if s == "true" => {
            ts.next();
            Ok(Formula::True)
        }
        Some(Tok::Ident(s)) if s == "false" => {
            ts.next();
            Ok(Formula::False)
        }
        Some(_) => atom(ts),
        None => Err(ts.error("expected a formula")),
    }
}

pub(crate) fn name_atom(ts: &mut TokStream<'_>) -> Result<Formula<String>, ParseError> {
    match ts.peek() {
        Some(Tok::Ident(_)) => {
            let name = ts.expect_ident("an atom")?;
            Ok(Formula::Atom(name))
        }
        Some(t) => Err(ts.error(format!("expected an atom, found {t}"))),
        None => Err(ts.error("expected an atom")),
    }
}

/// Parses a complete propositional formula whose atoms are plain names.
pub fn parse_formula(src: &str) -> Result<Formula<String>, ParseError> {
    let toks = lex(src, 1)?;
    let mut ts = TokStream::new(&toks);
    let f = parse_formula_tokens(&mut ts, &mut name_atom)?;
    ts.expect_end()?;
    Ok(f)
}

/// Parses a formula from an already-lexed stream with plain-name atoms.
pub fn parse_name_formula_tokens(ts: &mut TokStream<'_>) -> Result<Formula<String>, ParseError> {
    parse_formula_tokens(ts, &mut name_atom)
}
