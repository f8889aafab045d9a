//! A small arithmetic grammar for closed-form sequences and cellwise
//! weights: numbers, the variables `n` and `w`, `+ - * / ^`, unary minus,
//! parentheses, `exp`, `log`/`ln`, `sqrt`, `abs`, and the constants `e`
//! and `pi`. `^` is right associative and binds tighter than unary minus.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Var {
    N,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
}

/// A parsed expression together with its source text.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Expr {
    source: String,
    root: Node,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens: &tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in {src:?}")));
        }
        Ok(Self { source: src.to_string(), root })
    }

    /// Evaluates with `n` bound to the atom index and `w` to a coordinate.
    pub fn eval(&self, n: f64, w: f64) -> f64 {
        eval(&self.root, n, w)
    }

    /// Evaluates a sequence term at index `n`.
    pub fn at(&self, n: usize) -> f64 {
        self.eval(n as f64, f64::NAN)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl TryFrom<String> for Expr {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Expr::parse(&s)
    }
}

impl From<Expr> for String {
    fn from(e: Expr) -> String {
        e.source
    }
}

fn eval(node: &Node, n: f64, w: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(Var::N) => n,
        Node::Var(Var::W) => w,
        Node::Neg(a) => -eval(a, n, w),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, n, w), eval(b, n, w));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => a.powf(b),
            }
        }
        Node::Call(func, a) => {
            let a = eval(a, n, w);
            match func {
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs => a.abs(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
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
            // exponent part: 1e-3, 2.5E+4
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()×−".contains(c) {
            let c = match c {
                '×' => '*',
                '−' => '-',
                other => other,
            };
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek_sym(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Sym(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { Op::Mul } else { Op::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek_sym() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::Sym('(')) => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "n" => return Ok(Node::Var(Var::N)),
                    "w" => return Ok(Node::Var(Var::W)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "exp" => Func::Exp,
                    "log" | "ln" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::Abs,
                    other => return Err(Error::Parse(format!("unknown identifier {other:?}"))),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, n: f64) -> f64 {
        Expr::parse(s).unwrap().eval(n, 0.25)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(ev("-2 ^ 2", 0.0), -4.0);
        assert_eq!(ev("2 ^ -1", 0.0), 0.5);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("10 - 4 - 3", 0.0), 3.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
    }

    #[test]
    fn variables_functions_constants() {
        assert_eq!(ev("1 + 1/n", 2.0), 1.5);
        assert_eq!(ev("2^(-n)", 3.0), 0.125);
        assert_eq!(ev("w", 0.0), 0.25);
        assert!((ev("log(e)", 0.0) - 1.0).abs() < 1e-15);
        assert!((ev("exp(0) + sqrt(4) + abs(-1)", 0.0) - 4.0).abs() < 1e-15);
        assert!((ev("pi", 0.0) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(ev("1e-3 * 2", 0.0), 0.002);
        assert_eq!(ev("2 × 3 − 1", 0.0), 5.0);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1 +", "foo(1)", "(1", "1 2", "x", "2 $ 3", "exp 1"] {
            assert!(Expr::parse(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn serde_round_trip_keeps_source() {
        let e: Expr = serde_json::from_str("\"2^(-n)\"").unwrap();
        assert_eq!(e.at(1), 0.5);
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"2^(-n)\"");
        assert!(serde_json::from_str::<Expr>("\"2^(\"").is_err());
    }
}
