//! The expression language shared by manifests, reports and the command
//! line.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := ("+" | "-") unary | power
//! power   := primary ("^" (exponent | primary))*
//! exponent:= ["+" | "-"] integer | "(" ["+" | "-"] integer ")"
//! primary := integer | "I" | "pi" | "x" k | "G[k][i][j]"
//!          | "dx" k | "dG[k][i][j]" | name ["{" vars "}"] "(" vars ")"
//!          | "(" sum ")"
//! ```
//!
//! `^` between two forms is the wedge product; generators (`dx1`,
//! `dG[1][1][2]`) are only accepted when parsing forms. Rendering is the
//! `Display` output of [`Expr`] and [`Form`], which this grammar reads back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use thetahat_core::forms::Form;
use thetahat_core::symkernel::{Expr, FuncSym, GaussRat, VarId};
use thetahat_core::{Error, Result};

const MAX_INDEX: usize = 255;
const MAX_EXPONENT: i64 = 1000;

/// Position of the first character of a text fragment inside a larger file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Origin {
    pub line: usize,
    pub column: usize,
}

impl Default for Origin {
    fn default() -> Self {
        Origin { line: 1, column: 1 }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_at(text, None, Origin::default())
}

/// Parses an expression whose indices must lie in `1..=n`.
pub fn parse_expr_in(text: &str, n: usize) -> Result<Expr> {
    parse_expr_at(text, Some(n), Origin::default())
}

pub fn parse_expr_at(text: &str, n: Option<usize>, origin: Origin) -> Result<Expr> {
    let mut p = Parser::new(text, n, false, origin)?;
    let v = p.sum()?;
    p.expect_end()?;
    match v {
        Value::Expr(e) => Ok(e),
        Value::Form(_) => unreachable!("generators are rejected outside forms"),
    }
}

/// Parses a form on the chart of dimension `n`.
pub fn parse_form(text: &str, n: usize) -> Result<Form> {
    parse_form_at(text, n, Origin::default())
}

pub fn parse_form_at(text: &str, n: usize, origin: Origin) -> Result<Form> {
    let mut p = Parser::new(text, Some(n), true, origin)?;
    let v = p.sum()?;
    p.expect_end()?;
    Ok(p.to_form(v))
}

pub fn render_expr(e: &Expr) -> String {
    e.to_string()
}

pub fn render_form(f: &Form) -> String {
    f.to_string()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::End => "end of input".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str, origin: Origin) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (origin.line, origin.column);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Int(digits.parse().expect("ascii digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                other => return Err(Error::parse(line, column, format!("unexpected character '{other}'"))),
            }
        };
        column += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Expr(Expr),
    Form(Form),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    bound: Option<usize>,
    forms: bool,
}

impl Parser {
    fn new(text: &str, bound: Option<usize>, forms: bool, origin: Origin) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text, origin)?,
            at: 0,
            bound,
            forms,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_at(&self, pos: Pos, message: impl Into<String>) -> Error {
        Error::parse(pos.line, pos.column, message)
    }

    fn unexpected(&self, wanted: &str) -> Error {
        self.error_at(self.pos(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("an operator or end of input"))
        }
    }

    fn dim(&self) -> usize {
        self.bound.unwrap_or(MAX_INDEX)
    }

    fn to_form(&self, v: Value) -> Form {
        match v {
            Value::Form(f) => f,
            Value::Expr(e) => Form::scalar(self.dim(), e),
        }
    }

    fn sum(&mut self) -> Result<Value> {
        let mut acc = self.product()?;
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            let pos = self.bump().1;
            let rhs = self.product()?;
            acc = self.combine(acc, rhs, pos, |a, b| if negate { a.sub(b) } else { a.add(b) }, |a, b| {
                if negate {
                    a.sub(b)
                } else {
                    a.add(b)
                }
            })?;
        }
    }

    fn product(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let pos = self.bump().1;
                    let rhs = self.unary()?;
                    acc = self.combine(acc, rhs, pos, |a, b| a.mul(b), |a, b| a.wedge(b))?;
                }
                Tok::Slash => {
                    let pos = self.bump().1;
                    let rhs = self.unary()?;
                    let divisor = match rhs {
                        Value::Expr(e) => e,
                        Value::Form(f) if f.degree() == Some(0) => f.coefficient(&[]),
                        Value::Form(_) => return Err(self.error_at(pos, "division by a form of positive degree")),
                    };
                    if divisor.is_zero() {
                        return Err(self.error_at(pos, "division by zero"));
                    }
                    let inv = divisor.inv().map_err(|e| self.error_at(pos, e.to_string()))?;
                    acc = match acc {
                        Value::Expr(e) => Value::Expr(e.mul(&inv)),
                        Value::Form(f) => Value::Form(f.scale(&inv)),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn combine(
        &self,
        a: Value,
        b: Value,
        pos: Pos,
        on_exprs: impl Fn(&Expr, &Expr) -> Expr,
        on_forms: impl Fn(&Form, &Form) -> Result<Form>,
    ) -> Result<Value> {
        match (a, b) {
            (Value::Expr(x), Value::Expr(y)) => Ok(Value::Expr(on_exprs(&x, &y))),
            (a, b) => {
                let (fa, fb) = (self.to_form(a), self.to_form(b));
                on_forms(&fa, &fb).map(Value::Form).map_err(|e| self.error_at(pos, e.to_string()))
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(match self.unary()? {
                    Value::Expr(e) => Value::Expr(e.neg()),
                    Value::Form(f) => Value::Form(f.neg()),
                })
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Value> {
        let mut acc = self.primary()?;
        while *self.peek() == Tok::Caret {
            let pos = self.bump().1;
            if let Some(e) = self.try_exponent()? {
                acc = match acc {
                    Value::Expr(b) => Value::Expr(self.raise(&b, e, pos)?),
                    Value::Form(f) if f.is_zero() || f.degree() == Some(0) => {
                        let b = f.coefficient(&[]);
                        Value::Form(Form::scalar(self.dim(), self.raise(&b, e, pos)?))
                    }
                    Value::Form(_) => return Err(self.error_at(pos, "power of a form of positive degree")),
                };
            } else {
                let rhs = self.primary()?;
                acc = self.combine(acc, rhs, pos, |a, b| a.mul(b), |a, b| a.wedge(b))?;
            }
        }
        Ok(acc)
    }

    fn raise(&self, base: &Expr, e: i64, pos: Pos) -> Result<Expr> {
        if e.abs() > MAX_EXPONENT {
            return Err(self.error_at(pos, format!("exponent {e} exceeds {MAX_EXPONENT} in magnitude")));
        }
        if e < 0 && base.is_zero() {
            return Err(self.error_at(pos, "division by zero"));
        }
        base.pow(e as i32).map_err(|err| self.error_at(pos, err.to_string()))
    }

    /// An integer exponent, or `None` when a wedge factor follows instead.
    fn try_exponent(&mut self) -> Result<Option<i64>> {
        let save = self.at;
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let mut sign = 1i64;
        match self.peek() {
            Tok::Minus => {
                sign = -1;
                self.bump();
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let pos = self.pos();
        let value = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                v
            }
            _ => {
                if sign == -1 || paren && self.at != save + 1 {
                    return Err(self.unexpected("an integer exponent"));
                }
                self.at = save;
                return Ok(None);
            }
        };
        if paren {
            if *self.peek() != Tok::RParen {
                // `x1^(2 + x2)`: not an exponent
                return Err(self.unexpected("')' closing an integer exponent"));
            }
            self.bump();
        }
        let v: i64 = i64::try_from(&value)
            .ok()
            .filter(|v| *v <= MAX_EXPONENT)
            .ok_or_else(|| self.error_at(pos, format!("exponent {value} exceeds {MAX_EXPONENT} in magnitude")))?;
        Ok(Some(sign * v))
    }

    fn index(&mut self) -> Result<usize> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(v) => {
                let bound = self.dim();
                match usize::try_from(&v) {
                    Ok(i) if (1..=bound).contains(&i) => Ok(i),
                    _ => Err(self.error_at(pos, format!("index {v} outside 1..={bound}"))),
                }
            }
            other => Err(self.error_at(pos, format!("expected an index, found {}", other.describe()))),
        }
    }

    fn bracket_index(&mut self) -> Result<usize> {
        self.expect(Tok::LBracket)?;
        let i = self.index()?;
        self.expect(Tok::RBracket)?;
        Ok(i)
    }

    fn gamma_indices(&mut self) -> Result<VarId> {
        let k = self.bracket_index()?;
        let i = self.bracket_index()?;
        let j = self.bracket_index()?;
        Ok(VarId::gamma(k, i, j))
    }

    fn coordinate(&self, name: &str, pos: Pos) -> Result<Option<VarId>> {
        let Some(digits) = name.strip_prefix('x') else {
            return Ok(None);
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(None);
        }
        let bound = self.dim();
        match digits.parse::<usize>() {
            Ok(i) if (1..=bound).contains(&i) && !digits.starts_with('0') => Ok(Some(VarId::x(i))),
            _ => Err(self.error_at(pos, format!("index {digits} outside 1..={bound}"))),
        }
    }

    fn variable(&mut self) -> Result<VarId> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Ident(name) if name == "G" => self.gamma_indices(),
            Tok::Ident(name) => self
                .coordinate(&name, pos)?
                .ok_or_else(|| self.error_at(pos, format!("expected a variable, found '{name}'"))),
            other => Err(self.error_at(pos, format!("expected a variable, found {}", other.describe()))),
        }
    }

    fn var_list(&mut self, close: Tok) -> Result<Vec<VarId>> {
        let mut out = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.variable()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.unexpected(&format!("',' or {}", close.describe()))),
            }
        }
    }

    fn generator(&mut self, v: VarId, pos: Pos) -> Result<Value> {
        if !self.forms {
            return Err(self.error_at(pos, format!("generator d{v} outside a form")));
        }
        Ok(Value::Form(Form::gen(self.dim(), v)))
    }

    fn primary(&mut self) -> Result<Value> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(v) => Ok(Value::Expr(Expr::gauss(GaussRat::new(
                BigRational::from_integer(v),
                BigRational::zero(),
            )))),
            Tok::LParen => {
                let v = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(name) => self.named(name, pos),
            other => Err(self.error_at(pos, format!("expected an operand, found {}", other.describe()))),
        }
    }

    fn named(&mut self, name: String, pos: Pos) -> Result<Value> {
        match name.as_str() {
            "I" => {
                return Ok(Value::Expr(Expr::gauss(GaussRat::new(
                    BigRational::zero(),
                    BigRational::one(),
                ))))
            }
            "pi" => return Ok(Value::Expr(Expr::pi())),
            "G" => return Ok(Value::Expr(Expr::var(self.gamma_indices()?))),
            "dG" => {
                let v = self.gamma_indices()?;
                return self.generator(v, pos);
            }
            _ => {}
        }
        if let Some(v) = self.coordinate(&name, pos)? {
            return Ok(Value::Expr(Expr::var(v)));
        }
        if let Some(rest) = name.strip_prefix('d') {
            let mut inner = pos;
            inner.column += 1;
            if let Some(v) = self.coordinate(rest, inner)? {
                return self.generator(v, pos);
            }
        }
        self.function(name, pos)
    }

    fn function(&mut self, name: String, pos: Pos) -> Result<Value> {
        let partials = if *self.peek() == Tok::LBrace {
            self.bump();
            self.var_list(Tok::RBrace)?
        } else {
            Vec::new()
        };
        if *self.peek() != Tok::LParen {
            return Err(self.error_at(pos, format!("unknown symbol '{name}'")));
        }
        self.bump();
        let args = self.var_list(Tok::RParen)?;
        if args.is_empty() {
            return Err(self.error_at(pos, format!("function '{name}' needs at least one argument")));
        }
        if let Some(p) = partials.iter().find(|p| !args.contains(p)) {
            return Err(self.error_at(pos, format!("partial in {p} is not an argument of '{name}'")));
        }
        Ok(Value::Expr(Expr::func(FuncSym::with_partials(name, args, partials))))
    }
}
