//! Probability expressions over `n` and `d`, e.g. `2 ln(n)/n`, `0.2/n`,
//! `(d+1) ln(n)/n` or `0.5 example(0.1)`.
//!
//! Juxtaposition multiplies. Functions: `ln`, `sqrt`, `exp`, and the
//! connectivity thresholds `upper(f)` and `example(eps)` at the current
//! `n` and `d`. `d1` is `d + 1`.

use crate::bounds::{connectivity_example_threshold, connectivity_upper_threshold};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Var {
    N,
    D,
    D1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Func {
    Ln,
    Sqrt,
    Exp,
    Upper,
    Example,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i + 1 < chars.len()
                && (chars[i] == 'e' || chars[i] == 'E')
                && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '-' || chars[i + 1] == '+')
            {
                i += 2;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse()
                .map_err(|_| Error::parse(format!("bad number {text:?} in {s:?}")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::parse(format!("unexpected {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(format!("{what} in expression {:?}", self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Sym('('))) {
                Op::Mul
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing ')'"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "n" => return Ok(Expr::Var(Var::N)),
                    "d" => return Ok(Expr::Var(Var::D)),
                    "d1" => return Ok(Expr::Var(Var::D1)),
                    "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "upper" => Func::Upper,
                    "example" => Func::Example,
                    _ => return Err(self.err(&format!("unknown name {name:?}"))),
                };
                if !self.eat('(') {
                    return Err(self.err(&format!("{name} needs '('")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing ')'"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.err("expected a number, name or '('")),
        }
    }
}

pub(crate) fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        src,
    };
    if p.toks.is_empty() {
        return Err(Error::parse("empty expression"));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl Expr {
    pub(crate) fn eval(&self, n: usize, d: usize) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::N) => n as f64,
            Expr::Var(Var::D) => d as f64,
            Expr::Var(Var::D1) => (d + 1) as f64,
            Expr::Neg(e) => -e.eval(n, d)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(n, d)?, b.eval(n, d)?);
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    Op::Pow => x.powf(y),
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(n, d)?;
                match f {
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Upper => connectivity_upper_threshold(n as u64, d as u64, x),
                    Func::Example => connectivity_example_threshold(n as u64, d as u64, x)?.value,
                }
            }
        })
    }
}
