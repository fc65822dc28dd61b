//! Text grammar for polynomials and complex literals.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/')? unary)*        juxtaposition multiplies
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | number 'i' | 'i' | ident | '(' expr ')'
//! ```

use num_complex::Complex64;

use super::SparsePoly;
use crate::error::{Error, Result};

const RESERVED: [&str; 3] = ["i", "log", "max"];
const ALIAS_ORDER: [&str; 5] = ["x", "y", "z", "w", "xi"];

/// Ordered variable names. `ξ` is accepted as an alias of `xi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<String>,
}

fn canonical_name(name: &str) -> String {
    if name == "ξ" {
        "xi".to_string()
    } else {
        name.to_string()
    }
}

impl Variables {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = canonical_name(n.as_ref());
            let valid = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid || RESERVED.contains(&n.as_str()) {
                return Err(Error::InvalidArgument(format!("invalid variable name `{n}`")));
            }
            if out.contains(&n) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{n}`")));
            }
            out.push(n);
        }
        Ok(Self { names: out })
    }

    /// `z1, ..., zn`.
    pub fn indexed(n: usize) -> Self {
        Self { names: (1..=n).map(|i| format!("z{i}")).collect() }
    }

    /// Collects the identifiers used in `texts` and orders them: the aliases
    /// `x, y, z, w, xi` first, then `z<k>` by index, then the rest by name.
    pub fn infer<I, S>(texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut found: Vec<String> = Vec::new();
        for t in texts {
            for tok in Lexer::tokenize(t.as_ref())? {
                if let TokenKind::Ident(name) = tok.kind {
                    if !RESERVED.contains(&name.as_str()) && !found.contains(&name) {
                        found.push(name);
                    }
                }
            }
        }
        let rank = |n: &str| -> (usize, u64, String) {
            if let Some(p) = ALIAS_ORDER.iter().position(|a| *a == n) {
                return (0, p as u64, String::new());
            }
            if let Some(k) = n.strip_prefix('z').and_then(|r| r.parse::<u64>().ok()) {
                return (1, k, String::new());
            }
            (2, 0, n.to_string())
        };
        found.sort_by_key(|n| rank(n));
        Self::new(found)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        let name = canonical_name(name);
        self.names.iter().position(|n| *n == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Num(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Bar,
    Comma,
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based character column.
    pub column: usize,
}

/// Tokenizer shared by the polynomial and psh-expression grammars.
pub struct Lexer;

impl Lexer {
    pub fn tokenize(text: &str) -> Result<Vec<Token>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let simple = match ch {
                '+' => Some(TokenKind::Plus),
                '-' => Some(TokenKind::Minus),
                '*' => Some(TokenKind::Star),
                '/' => Some(TokenKind::Slash),
                '^' => Some(TokenKind::Caret),
                '(' => Some(TokenKind::LParen),
                ')' => Some(TokenKind::RParen),
                '|' => Some(TokenKind::Bar),
                ',' => Some(TokenKind::Comma),
                _ => None,
            };
            if let Some(kind) = simple {
                out.push(Token { kind, column });
                i += 1;
                continue;
            }
            if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                let value: f64 =
                    lit.parse().map_err(|_| Error::Parse { column, message: format!("malformed number `{lit}`") })?;
                let imag = i < chars.len()
                    && chars[i] == 'i'
                    && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if imag {
                    i += 1;
                    out.push(Token { kind: TokenKind::Imag(value), column });
                } else {
                    out.push(Token { kind: TokenKind::Num(value), column });
                }
                continue;
            }
            if ch.is_alphabetic() || ch == '_' {
                let start = i;
                if ch == 'ξ' {
                    i += 1;
                } else {
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') && chars[i] != 'ξ' {
                        i += 1;
                    }
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token { kind: TokenKind::Ident(canonical_name(&name)), column });
                continue;
            }
            return Err(Error::Parse { column, message: format!("unexpected character `{ch}`") });
        }
        out.push(Token { kind: TokenKind::End, column: chars.len() + 1 });
        Ok(out)
    }
}

/// Token cursor used by the recursive-descent parsers.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Self { tokens: Lexer::tokenize(text)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    pub(crate) fn column(&self) -> usize {
        self.tokens[self.pos].column
    }

    pub(crate) fn bump(&mut self) -> TokenKind {
        let t = self.tokens[self.pos].kind.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { column: self.column(), message: message.into() })
    }

    pub(crate) fn expect(&mut self, kind: TokenKind, what: &str) -> Result<()> {
        if *self.peek() == kind {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if *self.peek() == TokenKind::End {
            Ok(())
        } else {
            self.error(format!("unexpected {}", describe(self.peek())))
        }
    }
}

pub(crate) fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Num(v) => format!("number {v}"),
        TokenKind::Imag(v) => format!("imaginary literal {v}i"),
        TokenKind::Ident(n) => format!("`{n}`"),
        TokenKind::Plus => "`+`".into(),
        TokenKind::Minus => "`-`".into(),
        TokenKind::Star => "`*`".into(),
        TokenKind::Slash => "`/`".into(),
        TokenKind::Caret => "`^`".into(),
        TokenKind::LParen => "`(`".into(),
        TokenKind::RParen => "`)`".into(),
        TokenKind::Bar => "`|`".into(),
        TokenKind::Comma => "`,`".into(),
        TokenKind::End => "end of input".into(),
    }
}

pub(crate) fn parse_poly(text: &str, vars: &Variables) -> Result<SparsePoly> {
    let mut cur = Cursor::new(text)?;
    let p = parse_expr(&mut cur, vars)?;
    cur.expect_end()?;
    Ok(p)
}

/// Parses a complex literal such as `1.5`, `-2i` or `0.3-4e-2i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let p = parse_poly(text, &Variables { names: Vec::new() })?;
    Ok(p.coefficient(&[]))
}

pub(crate) fn parse_expr(cur: &mut Cursor, vars: &Variables) -> Result<SparsePoly> {
    let mut acc = parse_term(cur, vars)?;
    loop {
        match cur.peek() {
            TokenKind::Plus => {
                cur.bump();
                acc = acc.add(&parse_term(cur, vars)?)?;
            }
            TokenKind::Minus => {
                cur.bump();
                acc = acc.sub(&parse_term(cur, vars)?)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn starts_atom(kind: &TokenKind) -> bool {
    match kind {
        TokenKind::Num(_) | TokenKind::Imag(_) | TokenKind::LParen => true,
        TokenKind::Ident(n) => n != "log" && n != "max",
        _ => false,
    }
}

fn parse_term(cur: &mut Cursor, vars: &Variables) -> Result<SparsePoly> {
    let mut acc = parse_unary(cur, vars)?;
    loop {
        match cur.peek() {
            TokenKind::Star => {
                cur.bump();
                acc = acc.mul(&parse_unary(cur, vars)?)?;
            }
            TokenKind::Slash => {
                cur.bump();
                let col = cur.column();
                let d = parse_unary(cur, vars)?;
                if d.total_degree().unwrap_or(0) != 0 || d.is_zero() {
                    return Err(Error::Parse { column: col, message: "division only by a nonzero constant".into() });
                }
                acc = acc.scale(Complex64::new(1.0, 0.0) / d.coefficient(&vec![0; vars.len()]));
            }
            k if starts_atom(k) => {
                acc = acc.mul(&parse_power(cur, vars)?)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_unary(cur: &mut Cursor, vars: &Variables) -> Result<SparsePoly> {
    match cur.peek() {
        TokenKind::Minus => {
            cur.bump();
            Ok(parse_unary(cur, vars)?.scale(Complex64::new(-1.0, 0.0)))
        }
        TokenKind::Plus => {
            cur.bump();
            parse_unary(cur, vars)
        }
        _ => parse_power(cur, vars),
    }
}

fn parse_power(cur: &mut Cursor, vars: &Variables) -> Result<SparsePoly> {
    let base = parse_atom(cur, vars)?;
    if *cur.peek() == TokenKind::Caret {
        cur.bump();
        match cur.peek().clone() {
            TokenKind::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
                cur.bump();
                Ok(base.pow(v as u32))
            }
            other => cur.error(format!("expected a nonnegative integer exponent, found {}", describe(&other))),
        }
    } else {
        Ok(base)
    }
}

fn parse_atom(cur: &mut Cursor, vars: &Variables) -> Result<SparsePoly> {
    let n = vars.len();
    let col = cur.column();
    match cur.bump() {
        TokenKind::Num(v) => Ok(SparsePoly::constant(n, Complex64::new(v, 0.0))),
        TokenKind::Imag(v) => Ok(SparsePoly::constant(n, Complex64::new(0.0, v))),
        TokenKind::Ident(name) if name == "i" => Ok(SparsePoly::constant(n, Complex64::new(0.0, 1.0))),
        TokenKind::Ident(name) => match vars.index_of(&name) {
            Some(idx) => SparsePoly::var(n, idx),
            None => Err(Error::UnknownVariable(name)),
        },
        TokenKind::LParen => {
            let inner = parse_expr(cur, vars)?;
            cur.expect(TokenKind::RParen, "`)`")?;
            Ok(inner)
        }
        other => Err(Error::Parse { column: col, message: format!("unexpected {}", describe(&other)) }),
    }
}

fn fmt_real(v: f64) -> String {
    format!("{}", v)
}

pub(crate) fn print_poly(p: &SparsePoly, vars: &Variables) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<(&Vec<u32>, &Complex64)> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        db.cmp(&da).then_with(|| b.cmp(a))
    });
    let mut out = String::new();
    for (idx, (e, c)) in terms.into_iter().enumerate() {
        let mono: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                let name = vars.names.get(i).cloned().unwrap_or_else(|| format!("z{}", i + 1));
                if k == 1 {
                    name
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        let mono = mono.join("*");
        let (negative, coef) = if c.im == 0.0 {
            let neg = c.re.is_sign_negative();
            let a = c.re.abs();
            let s = if a == 1.0 && !mono.is_empty() { String::new() } else { fmt_real(a) };
            (neg, s)
        } else if c.re == 0.0 {
            (c.im.is_sign_negative(), format!("{}i", fmt_real(c.im.abs())))
        } else {
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            (false, format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs())))
        };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&coef);
        if !mono.is_empty() {
            if !coef.is_empty() {
                out.push('*');
            }
            out.push_str(&mono);
        }
    }
    out
}
