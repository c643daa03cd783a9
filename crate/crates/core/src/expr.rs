//! Small arithmetic expressions over `x`, used for non-affine branches.
//!
//! Grammar (recursive descent, one token of lookahead):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | 'x' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Trees live in an arena with interned leaves: the variable node and any
//! repeated numeric literal are allocated once, so `node_count` reflects
//! stored nodes, not textual occurrences.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExprNode {
    Var,
    Num(f64),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    Sqrt(NodeId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    nodes: Vec<ExprNode>,
    root: NodeId,
    source: String,
}

/// Closed interval with f64 endpoints, for conservative range bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        Parser::new(text).parse()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_node(self.root, x)
    }

    fn eval_node(&self, id: NodeId, x: f64) -> Result<f64> {
        match self.nodes[id] {
            ExprNode::Var => Ok(x),
            ExprNode::Num(v) => Ok(v),
            ExprNode::Add(a, b) => Ok(self.eval_node(a, x)? + self.eval_node(b, x)?),
            ExprNode::Sub(a, b) => Ok(self.eval_node(a, x)? - self.eval_node(b, x)?),
            ExprNode::Mul(a, b) => Ok(self.eval_node(a, x)? * self.eval_node(b, x)?),
            ExprNode::Div(a, b) => {
                let den = self.eval_node(b, x)?;
                if den == 0.0 {
                    return Err(Error::BranchEval(format!("division by zero at x = {x}")));
                }
                Ok(self.eval_node(a, x)? / den)
            }
            ExprNode::Sqrt(a) => {
                let v = self.eval_node(a, x)?;
                if v < 0.0 {
                    return Err(Error::BranchEval(format!(
                        "sqrt of negative value {v} at x = {x}"
                    )));
                }
                Ok(v.sqrt())
            }
        }
    }

    /// Conservative image bound over an interval of inputs. Returns an error
    /// if a division interval contains zero or a sqrt argument can be
    /// negative, since the branch is then not total on the piece.
    pub fn eval_interval(&self, input: Interval) -> Result<Interval> {
        self.eval_interval_node(self.root, input)
    }

    fn eval_interval_node(&self, id: NodeId, input: Interval) -> Result<Interval> {
        match self.nodes[id] {
            ExprNode::Var => Ok(input),
            ExprNode::Num(v) => Ok(Interval::point(v)),
            ExprNode::Add(a, b) => {
                let (a, b) = (
                    self.eval_interval_node(a, input)?,
                    self.eval_interval_node(b, input)?,
                );
                Ok(Interval::new(a.lo + b.lo, a.hi + b.hi))
            }
            ExprNode::Sub(a, b) => {
                let (a, b) = (
                    self.eval_interval_node(a, input)?,
                    self.eval_interval_node(b, input)?,
                );
                Ok(Interval::new(a.lo - b.hi, a.hi - b.lo))
            }
            ExprNode::Mul(a, b) => {
                let (a, b) = (
                    self.eval_interval_node(a, input)?,
                    self.eval_interval_node(b, input)?,
                );
                let products = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
                Ok(Interval::new(
                    products.iter().cloned().fold(f64::INFINITY, f64::min),
                    products.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ))
            }
            ExprNode::Div(a, b) => {
                let (a, b) = (
                    self.eval_interval_node(a, input)?,
                    self.eval_interval_node(b, input)?,
                );
                if b.lo <= 0.0 && b.hi >= 0.0 {
                    return Err(Error::BranchEval(
                        "denominator interval contains zero".into(),
                    ));
                }
                let quotients = [a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi];
                Ok(Interval::new(
                    quotients.iter().cloned().fold(f64::INFINITY, f64::min),
                    quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ))
            }
            ExprNode::Sqrt(a) => {
                let a = self.eval_interval_node(a, input)?;
                if a.lo < 0.0 {
                    return Err(Error::BranchEval(
                        "sqrt argument interval extends below zero".into(),
                    ));
                }
                Ok(Interval::new(a.lo.sqrt(), a.hi.sqrt()))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)
    }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    nodes: Vec<ExprNode>,
    var_node: Option<NodeId>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
            nodes: Vec::new(),
            var_node: None,
        }
    }

    fn parse(mut self) -> Result<Expr> {
        let root = self.parse_expr()?;
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Expr {
            nodes: self.nodes,
            root,
            source: self.text.trim().to_string(),
        })
    }

    fn error(&self, msg: &str) -> Error {
        Error::parse(1, self.pos + 1, msg)
    }

    fn intern(&mut self, node: ExprNode) -> NodeId {
        if let ExprNode::Var = node {
            if let Some(id) = self.var_node {
                return id;
            }
            let id = self.push(node);
            self.var_node = Some(id);
            return id;
        }
        if let ExprNode::Num(v) = node {
            if let Some(id) = self
                .nodes
                .iter()
                .position(|n| matches!(n, ExprNode::Num(w) if w.to_bits() == v.to_bits()))
            {
                return id;
            }
        }
        self.push(node)
    }

    fn push(&mut self, node: ExprNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<NodeId> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.parse_term()?;
                lhs = self.push(ExprNode::Add(lhs, rhs));
            } else if self.eat(b'-') {
                let rhs = self.parse_term()?;
                lhs = self.push(ExprNode::Sub(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<NodeId> {
        let mut lhs = self.parse_factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.parse_factor()?;
                lhs = self.push(ExprNode::Mul(lhs, rhs));
            } else if self.eat(b'/') {
                let rhs = self.parse_factor()?;
                lhs = self.push(ExprNode::Div(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<NodeId> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(self.intern(ExprNode::Var))
            }
            Some(b's') => {
                if self.text[self.pos..].starts_with("sqrt") {
                    self.pos += 4;
                    if !self.eat(b'(') {
                        return Err(self.error("expected '(' after sqrt"));
                    }
                    let inner = self.parse_expr()?;
                    if !self.eat(b')') {
                        return Err(self.error("expected ')'"));
                    }
                    Ok(self.push(ExprNode::Sqrt(inner)))
                } else {
                    Err(self.error("unknown identifier"))
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.parse_number(),
            _ => Err(self.error("expected a number, 'x', 'sqrt(', or '('")),
        }
    }

    fn parse_number(&mut self) -> Result<NodeId> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit() || *b == b'.')
        {
            self.pos += 1;
        }
        let lit = &self.text[start..self.pos];
        let v: f64 = lit
            .parse()
            .map_err(|_| Error::parse(1, start + 1, format!("bad numeric literal '{lit}'")))?;
        Ok(self.intern(ExprNode::Num(v)))
    }
}
