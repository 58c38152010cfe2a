//! Recursive-descent reader for the printed expression syntax.
//!
//! Accepts everything [`Expr`]'s `Display` produces, so printing then
//! parsing is the identity:
//!
//! ```text
//! expr    := sign? term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := integer | '(' expr ')' | ident | ident args | deriv args
//! deriv   := 'd' integer '(' ident ')' | 'd[' var ('^' integer)? (',' ...)* ']' '(' ident ')'
//! ```
//!
//! Division is only allowed by nonzero constants.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::atom::{Atom, FuncAtom};
use super::expr::{Expr, Rational};
use crate::error::{Error, Result};

/// Names visible to the parser.
#[derive(Clone, Debug, Default)]
pub struct ParseContext {
    vars: Vec<String>,
    funcs: HashMap<String, FuncAtom>,
}

impl ParseContext {
    /// Context with chart variables `x1..xn`.
    pub fn standard(n: usize) -> Self {
        ParseContext {
            vars: (1..=n).map(|i| format!("x{i}")).collect(),
            funcs: HashMap::new(),
        }
    }

    pub fn with_vars(vars: Vec<String>) -> Self {
        ParseContext {
            vars,
            funcs: HashMap::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Declares an opaque function of the given chart variables.
    pub fn declare(&mut self, name: &str, args: &[usize]) -> Result<FuncAtom> {
        let f = FuncAtom::new(name, args)?;
        self.funcs.insert(name.to_string(), f);
        Ok(f)
    }

    pub fn function(&self, name: &str) -> Option<FuncAtom> {
        self.funcs.get(name).copied()
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            ctx: self,
            tokens,
            pos: 0,
            end: text.len(),
        };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(p.error_at(t.at, format!("unexpected {}", t.tok.describe()))),
        }
    }
}

/// Parses with the standard `x1..xn` context and no functions.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr> {
    ParseContext::standard(n).parse(text)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    at: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                at,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                at,
            });
        } else if "+-*/^(),[]".contains(c) {
            chars.next();
            out.push(Token { tok: Tok::Sym(c), at });
        } else {
            return Err(Error::Parse {
                column: at + 1,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a ParseContext,
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn error_at(&self, at: usize, message: String) -> Error {
        Error::Parse {
            column: at + 1,
            message,
        }
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.at).unwrap_or(self.end)
    }

    fn next(&mut self, what: &str) -> Result<Token> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(self.error_at(self.end, format!("expected {what}, found end of input"))),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next(&format!("`{c}`"))?;
        match t.tok {
            Tok::Sym(s) if s == c => Ok(()),
            other => Err(self.error_at(t.at, format!("expected `{c}`, found {}", other.describe()))),
        }
    }

    fn integer(&mut self) -> Result<(BigInt, usize)> {
        let t = self.next("integer")?;
        match t.tok {
            Tok::Int(n) => Ok((n, t.at)),
            other => Err(self.error_at(t.at, format!("expected integer, found {}", other.describe()))),
        }
    }

    fn small(&mut self, what: &str) -> Result<u32> {
        let (n, at) = self.integer()?;
        u32::try_from(&n).map_err(|_| self.error_at(at, format!("{what} {n} is too large")))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.peek_sym('+') {
            self.pos += 1;
            self.term()?
        } else {
            self.term()?
        };
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                acc += self.term()?;
            } else if self.peek_sym('-') {
                self.pos += 1;
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.peek_sym('*') {
                self.pos += 1;
                acc = acc * self.unary()?;
            } else if self.peek_sym('/') {
                self.pos += 1;
                let at = self.here();
                let d = self.unary()?;
                match d.as_constant() {
                    Some(c) if c != Rational::from_integer(0.into()) => {
                        acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                    }
                    Some(_) => return Err(self.error_at(at, "division by zero".into())),
                    None => {
                        return Err(self.error_at(at, "division by a non-constant expression".into()))
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.primary()?;
        if self.peek_sym('^') {
            self.pos += 1;
            let k = self.small("exponent")?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.next("expression")?;
        match t.tok {
            Tok::Int(n) => Ok(Expr::from_rational(Rational::from_integer(n))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, t.at),
            other => Err(self.error_at(t.at, format!("expected expression, found {}", other.describe()))),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr> {
        if let Some(i) = self.ctx.var_index(&name) {
            return Ok(Expr::var(i));
        }
        if let Some(f) = self.ctx.function(&name) {
            self.call_args(&f)?;
            return Ok(Expr::atom(Atom::Func(f)));
        }
        if name == "lambda" {
            return Ok(Expr::lambda());
        }
        if name == "d" && self.peek_sym('[') {
            self.pos += 1;
            let counts = self.mixed_orders()?;
            let f = self.derivative_target(at)?;
            let g = f.with_derivatives(&counts).map_err(|e| self.error_at(at, e.to_string()))?;
            return Ok(Expr::atom(Atom::Func(g)));
        }
        if let Some(order) = numbered(&name, 'd') {
            if self.peek_sym('(') {
                let f = self.derivative_target(at)?;
                if f.arg_count() != 1 {
                    return Err(self.error_at(
                        at,
                        format!("{} has several arguments; use d[...] for its partials", f.name()),
                    ));
                }
                let var = f.args().next().expect("one argument");
                let g = f
                    .with_derivatives(&[(var, order as u8)])
                    .map_err(|e| self.error_at(at, e.to_string()))?;
                return Ok(Expr::atom(Atom::Func(g)));
            }
        }
        if let Some(i) = numbered(&name, 'a') {
            if i >= 1 {
                return Ok(Expr::dir(i as usize - 1));
            }
        }
        Err(Error::UnknownSymbol { column: at + 1, name })
    }

    /// `(name)(args)` after a derivative prefix.
    fn derivative_target(&mut self, at: usize) -> Result<FuncAtom> {
        self.expect('(')?;
        let t = self.next("function name")?;
        let f = match t.tok {
            Tok::Ident(n) => match self.ctx.function(&n) {
                Some(f) => f,
                None => return Err(Error::UnknownSymbol { column: t.at + 1, name: n }),
            },
            other => {
                return Err(self.error_at(t.at, format!("expected function name, found {}", other.describe())))
            }
        };
        self.expect(')')?;
        self.call_args(&f)?;
        let _ = at;
        Ok(f)
    }

    fn mixed_orders(&mut self) -> Result<Vec<(usize, u8)>> {
        let mut counts = Vec::new();
        loop {
            let t = self.next("variable")?;
            let var = match &t.tok {
                Tok::Ident(n) => self
                    .ctx
                    .var_index(n)
                    .ok_or_else(|| Error::UnknownSymbol { column: t.at + 1, name: n.clone() })?,
                other => {
                    return Err(self.error_at(t.at, format!("expected variable, found {}", other.describe())))
                }
            };
            let mut k = 1u32;
            if self.peek_sym('^') {
                self.pos += 1;
                k = self.small("derivative order")?;
            }
            if k == 0 || k > u8::MAX as u32 {
                return Err(self.error_at(t.at, format!("unsupported derivative order {k}")));
            }
            counts.push((var, k as u8));
            if self.peek_sym(',') {
                self.pos += 1;
            } else {
                self.expect(']')?;
                return Ok(counts);
            }
        }
    }

    /// The argument list of an application must repeat the declaration.
    fn call_args(&mut self, f: &FuncAtom) -> Result<()> {
        let open = self.here();
        self.expect('(')?;
        let mut seen = Vec::new();
        loop {
            let t = self.next("argument")?;
            match &t.tok {
                Tok::Ident(n) => match self.ctx.var_index(n) {
                    Some(i) => seen.push(i),
                    None => return Err(Error::UnknownSymbol { column: t.at + 1, name: n.clone() }),
                },
                other => {
                    return Err(self.error_at(t.at, format!("expected variable, found {}", other.describe())))
                }
            }
            if self.peek_sym(',') {
                self.pos += 1;
            } else {
                self.expect(')')?;
                break;
            }
        }
        let declared: Vec<usize> = f.args().collect();
        if seen != declared {
            let names: Vec<&str> = declared.iter().map(|&i| self.ctx.vars[i].as_str()).collect();
            return Err(self.error_at(
                open,
                format!("{} is declared as {}({})", f.name(), f.name(), names.join(",")),
            ));
        }
        Ok(())
    }
}

/// `prefix` followed by a decimal number, e.g. `a3` or `d2`.
fn numbered(name: &str, prefix: char) -> Option<u32> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ParseContext {
        let mut c = ParseContext::standard(3);
        c.declare("f", &[0]).unwrap();
        c.declare("g", &[2]).unwrap();
        c.declare("f1", &[0, 1, 2]).unwrap();
        c
    }

    #[test]
    fn precedence_and_signs() {
        let c = ctx();
        assert_eq!(c.parse("1 + 2*x1^2").unwrap(), Expr::one() + Expr::var(0).pow(2).scale_int(2));
        assert_eq!(c.parse("-x1^2").unwrap(), -Expr::var(0).pow(2));
        assert_eq!(c.parse("-1/2*x1").unwrap(), Expr::var(0).scale(&Rational::new((-1).into(), 2.into())));
        assert_eq!(c.parse("(x1 - x2)*(x1 + x2)").unwrap(), Expr::var(0).pow(2) - Expr::var(1).pow(2));
    }

    #[test]
    fn round_trips_printed_forms() {
        let c = ctx();
        for text in [
            "f(x1)*g(x3) - 3/2*d2(f)(x1)^2 + a1*a2^3",
            "d[x2,x3^2](f1)(x1,x2,x3) - lambda^3 + 7",
            "-x1*x2 - 1/3",
        ] {
            let e = c.parse(text).unwrap();
            assert_eq!(c.parse(&e.to_string()).unwrap(), e, "{text}");
        }
    }

    #[test]
    fn reports_unknown_symbols_with_column() {
        let err = ctx().parse("x1 + y").unwrap_err();
        assert_eq!(err, Error::UnknownSymbol { column: 6, name: "y".into() });
    }

    #[test]
    fn rejects_bad_input() {
        let c = ctx();
        assert!(matches!(c.parse("x1 +"), Err(Error::Parse { .. })));
        assert!(matches!(c.parse("x1 / x2"), Err(Error::Parse { .. })));
        assert!(matches!(c.parse("x1 / 0"), Err(Error::Parse { .. })));
        assert!(matches!(c.parse("f(x2)"), Err(Error::Parse { .. })));
        assert!(matches!(c.parse("x1 $ 2"), Err(Error::Parse { column: 4, .. })));
        assert!(matches!(c.parse("d1(f1)(x1,x2,x3)"), Err(Error::Parse { .. })));
    }
}
