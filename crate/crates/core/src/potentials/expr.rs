//! A small arithmetic grammar over the distance `r`, used for user-defined
//! potentials.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?          right associative
//! atom    := number | 'r' | 'inf' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := exp | ln | sqrt | abs
//! ```
//!
//! `-r^2` parses as `-(r^2)` and `r^-6` is accepted.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character '{found}' at offset {offset}")]
    UnexpectedChar { found: char, offset: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token '{0}'")]
    UnexpectedToken(String),
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("invalid number '{0}'")]
    InvalidNumber(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    R,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, r: f64) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::R => r,
            Node::Neg(a) => -a.eval(r),
            Node::Add(a, b) => a.eval(r) + b.eval(r),
            Node::Sub(a, b) => a.eval(r) - b.eval(r),
            Node::Mul(a, b) => a.eval(r) * b.eval(r),
            Node::Div(a, b) => a.eval(r) / b.eval(r),
            Node::Pow(a, b) => {
                let base = a.eval(r);
                let exp = b.eval(r);
                if exp.fract() == 0.0 && exp.abs() < i32::MAX as f64 {
                    base.powi(exp as i32)
                } else {
                    base.powf(exp)
                }
            }
            Node::Call(f, a) => {
                let x = a.eval(r);
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(x) => write!(f, "{x}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                // Exponent part: 1e-3, 2.5E+4
                if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].1.is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].1.is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| ExprError::InvalidNumber(text.clone()))?;
                out.push(Token::Num(value));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().map(|&(_, c)| c).collect()));
            }
            found => return Err(ExprError::UnexpectedChar { found, offset }),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.next() {
            Some(Token::Num(x)) => Ok(Node::Const(x)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "r" => Ok(Node::R),
                "inf" => Ok(Node::Const(f64::INFINITY)),
                "pi" => Ok(Node::Const(std::f64::consts::PI)),
                "exp" | "ln" | "sqrt" | "abs" => {
                    let func = match name.as_str() {
                        "exp" => Func::Exp,
                        "ln" => Func::Ln,
                        "sqrt" => Func::Sqrt,
                        _ => Func::Abs,
                    };
                    match self.next() {
                        Some(Token::LParen) => {}
                        Some(t) => return Err(ExprError::UnexpectedToken(t.to_string())),
                        None => return Err(ExprError::UnexpectedEnd),
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Node::Call(func, Box::new(arg)))
                }
                _ => Err(ExprError::UnknownIdentifier(name)),
            },
            Some(t) => Err(ExprError::UnexpectedToken(t.to_string())),
            None => Err(ExprError::UnexpectedEnd),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.next() {
            Some(Token::RParen) => Ok(()),
            Some(t) => Err(ExprError::UnexpectedToken(t.to_string())),
            None => Err(ExprError::UnexpectedEnd),
        }
    }
}

/// A parsed expression in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut parser = Parser {
            tokens: tokenize(src)?,
            pos: 0,
        };
        let root = parser.expr()?;
        if let Some(t) = parser.peek() {
            return Err(ExprError::UnexpectedToken(t.to_string()));
        }
        Ok(Expr {
            source: src.trim().to_string(),
            root,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.root.eval(r)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// One branch of a piecewise potential, active for `r < below`
/// (or for all remaining `r` when `below` is `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub below: Option<f64>,
    pub expr: Expr,
}

/// Piecewise expression; the first piece whose bound exceeds `r` applies.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pieces: Vec<Piece>,
}

impl Piecewise {
    /// Pieces must have strictly increasing bounds and the last one must be
    /// unbounded.
    pub fn new(pieces: Vec<Piece>) -> Result<Self, String> {
        if pieces.is_empty() {
            return Err("piecewise potential needs at least one piece".into());
        }
        let (last, head) = pieces.split_last().expect("non-empty");
        if last.below.is_some() {
            return Err("the last piece must not have an upper bound".into());
        }
        let mut prev = 0.0;
        for p in head {
            match p.below {
                Some(b) if b > prev && b.is_finite() => prev = b,
                Some(b) => return Err(format!("piece bounds must be positive and increasing (got {b})")),
                None => return Err("only the last piece may be unbounded".into()),
            }
        }
        Ok(Piecewise { pieces })
    }

    pub fn eval(&self, r: f64) -> f64 {
        for p in &self.pieces {
            match p.below {
                Some(b) if r < b => return p.expr.eval(r),
                Some(_) => continue,
                None => return p.expr.eval(r),
            }
        }
        unreachable!("last piece is unbounded")
    }

    /// Piece boundaries; the potential may be discontinuous there.
    pub fn boundaries(&self) -> Vec<f64> {
        self.pieces.iter().filter_map(|p| p.below).collect()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }
}
