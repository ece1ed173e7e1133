//! Text front end for polynomials and expression DAGs.
//!
//! Grammar, with `^` binding tighter than unary minus, which binds
//! tighter than `*`, which binds tighter than binary `+`/`-`:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := ("-")* factor ("*" factor)*
//! factor := atom ("^" uint)?
//! atom   := ident | int | "(" expr ")"
//! ```
//!
//! Juxtaposition (`2x`) is rejected.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::ring::RingSpec;

pub const MAX_EXPONENT: u64 = 1_000_000;

/// How identifiers map to variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variables {
    /// Explicit names; index = position in the list.
    Named(Vec<String>),
    /// `x1..xN`.
    Indexed(usize),
}

impl Variables {
    pub fn arity(&self) -> usize {
        match self {
            Variables::Named(v) => v.len(),
            Variables::Indexed(n) => *n,
        }
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        match self {
            Variables::Named(v) => v.iter().position(|x| x == name),
            Variables::Indexed(n) => {
                let k: usize = name.strip_prefix('x')?.parse().ok()?;
                (1..=*n).contains(&k).then(|| k - 1)
            }
        }
    }

    /// Guesses the variable set from the identifiers in `text`: `x1..xN`
    /// when every identifier has that shape, otherwise the distinct names
    /// in order of first appearance.
    pub fn infer(text: &str) -> Result<Variables> {
        let mut names: Vec<String> = Vec::new();
        for tok in tokenize(text)? {
            if let Tok::Ident(s) = tok.kind {
                if !names.contains(&s) {
                    names.push(s);
                }
            }
        }
        let indexed: Option<Vec<usize>> = names
            .iter()
            .map(|s| {
                s.strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
            })
            .collect();
        match indexed {
            Some(ks) => Ok(Variables::Indexed(ks.into_iter().max().unwrap_or(0))),
            None => Ok(Variables::Named(names)),
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Variables::Named(v) => v.clone(),
            Variables::Indexed(n) => (1..=*n).map(|k| format!("x{k}")).collect(),
        }
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(usize),
    Const(BigInt),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Pow(NodeId, u32),
}

/// An unexpanded arithmetic expression with shared subexpressions.
///
/// Nodes are stored in topological order: every child index is smaller
/// than its parent's index. Structurally equal nodes are interned.
#[derive(Clone, Debug)]
pub struct ExprDag {
    ring: RingSpec,
    arity: usize,
    nodes: Vec<Node>,
    interned: HashMap<Node, NodeId>,
    root: Option<NodeId>,
}

impl ExprDag {
    pub fn new(ring: RingSpec, arity: usize) -> Self {
        ExprDag {
            ring,
            arity,
            nodes: Vec::new(),
            interned: HashMap::new(),
            root: None,
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root.expect("dag has a root")
    }

    pub fn set_root(&mut self, id: NodeId) -> Result<()> {
        if id >= self.nodes.len() {
            return Err(Error::InvalidArgument(format!("no node {id}")));
        }
        self.root = Some(id);
        Ok(())
    }

    /// Adds a node (or returns the existing identical one).
    pub fn add(&mut self, node: Node) -> Result<NodeId> {
        let n = self.nodes.len();
        let child_ok = |c: &NodeId| *c < n;
        let ok = match &node {
            Node::Var(i) => *i < self.arity,
            Node::Const(_) => true,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => child_ok(a) && child_ok(b),
            Node::Neg(a) | Node::Pow(a, _) => child_ok(a),
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("malformed node {node:?}")));
        }
        let node = match node {
            Node::Const(c) => Node::Const(self.ring.canon(&c)),
            other => other,
        };
        if let Some(&id) = self.interned.get(&node) {
            return Ok(id);
        }
        self.nodes.push(node.clone());
        self.interned.insert(node, n);
        Ok(n)
    }

    /// Copies `other` into `self`, returning the id of its root.
    pub fn import(&mut self, other: &ExprDag) -> Result<NodeId> {
        if other.ring != self.ring || other.arity != self.arity {
            return Err(Error::InvalidArgument(
                "cannot merge DAGs over different rings or arities".into(),
            ));
        }
        let mut map = Vec::with_capacity(other.nodes.len());
        for node in &other.nodes {
            let m = |c: &NodeId| map[*c];
            let translated = match node {
                Node::Var(i) => Node::Var(*i),
                Node::Const(c) => Node::Const(c.clone()),
                Node::Add(a, b) => Node::Add(m(a), m(b)),
                Node::Sub(a, b) => Node::Sub(m(a), m(b)),
                Node::Mul(a, b) => Node::Mul(m(a), m(b)),
                Node::Neg(a) => Node::Neg(m(a)),
                Node::Pow(a, k) => Node::Pow(m(a), *k),
            };
            let id = self.add(translated)?;
            map.push(id);
        }
        Ok(map[other.root()])
    }

    /// Value at a point of canonical ring values; each node is evaluated
    /// once.
    pub(crate) fn evaluate_raw(&self, point: &[BigInt]) -> BigInt {
        let r = self.ring;
        let mut vals: Vec<BigInt> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Var(i) => point[*i].clone(),
                Node::Const(c) => c.clone(),
                Node::Add(a, b) => r.add_raw(&vals[*a], &vals[*b]),
                Node::Sub(a, b) => r.sub_raw(&vals[*a], &vals[*b]),
                Node::Mul(a, b) => r.mul_raw(&vals[*a], &vals[*b]),
                Node::Neg(a) => r.neg_raw(&vals[*a]),
                Node::Pow(a, k) => r.pow_raw(&vals[*a], *k as u64),
            };
            vals.push(v);
        }
        vals.swap_remove(self.root())
    }

    /// Fully expanded polynomial.
    pub fn expand(&self) -> Result<Polynomial> {
        let (r, n) = (self.ring, self.arity);
        let mut vals: Vec<Polynomial> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Var(i) => Polynomial::var(r, n, *i)?,
                Node::Const(c) => Polynomial::constant(r, n, &r.elem(c.clone()))?,
                Node::Add(a, b) => vals[*a].add(&vals[*b])?,
                Node::Sub(a, b) => vals[*a].sub(&vals[*b])?,
                Node::Mul(a, b) => vals[*a].mul(&vals[*b])?,
                Node::Neg(a) => vals[*a].neg(),
                Node::Pow(a, k) => vals[*a].pow(*k as u64),
            };
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Int(text[start..i].parse().expect("digits")),
                    pos: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Ident(text[start..i].to_string()),
                    pos: start,
                });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push(Token { kind, pos: start });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    vars: &'a Variables,
    dag: ExprDag,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.kind)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<NodeId> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    lhs = self.dag.add(Node::Add(lhs, rhs))?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    lhs = self.dag.add(Node::Sub(lhs, rhs))?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<NodeId> {
        let mut negs = 0;
        while self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            negs += 1;
        }
        let mut acc = self.factor()?;
        for _ in 0..negs {
            acc = self.dag.add(Node::Neg(acc))?;
        }
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            let rhs = self.factor()?;
            acc = self.dag.add(Node::Mul(acc, rhs))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NodeId> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let k = match self.peek() {
            Some(Tok::Int(k)) => k.clone(),
            _ => return self.err("expected a nonnegative integer exponent"),
        };
        let k: u64 = match u64::try_from(&k) {
            Ok(k) if k <= MAX_EXPONENT => k,
            Ok(k) => return Err(Error::ExponentOverflow(k)),
            Err(_) => return Err(Error::ExponentOverflow(u64::MAX)),
        };
        self.at += 1;
        self.dag.add(Node::Pow(base, k as u32))
    }

    fn atom(&mut self) -> Result<NodeId> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                let i = self
                    .vars
                    .resolve(&name)
                    .ok_or(Error::UnknownVariable(name))?;
                self.at += 1;
                self.dag.add(Node::Var(i))
            }
            Some(Tok::Int(v)) => {
                self.at += 1;
                self.dag.add(Node::Const(v))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.at += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a variable, integer or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` into an unexpanded DAG. No algebraic simplification is
/// performed.
pub fn parse_dag(text: &str, vars: &Variables, ring: RingSpec) -> Result<ExprDag> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        end: text.len(),
        vars,
        dag: ExprDag::new(ring, vars.arity()),
    };
    let root = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    p.dag.set_root(root)?;
    Ok(p.dag)
}

/// Parses and expands `text` into a sparse polynomial.
pub fn parse_poly(text: &str, vars: &Variables, ring: RingSpec) -> Result<Polynomial> {
    parse_dag(text, vars, ring)?.expand()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Variables {
        Variables::Named(vec!["x".into(), "y".into()])
    }

    fn zz() -> RingSpec {
        RingSpec::integers()
    }

    #[test]
    fn parses_the_ellipse() {
        let f = parse_poly("x^2 - x*y + y^2 - 1", &xy(), zz()).unwrap();
        let g = Polynomial::from_terms(
            zz(),
            2,
            vec![
                (vec![2, 0], 1),
                (vec![1, 1], -1),
                (vec![0, 2], 1),
                (vec![0, 0], -1),
            ],
        )
        .unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn expands_powers_and_zero() {
        let f = parse_poly("(x+y)^2", &xy(), zz()).unwrap();
        assert_eq!(f.to_string(), "x1^2 + 2*x1*x2 + x2^2");
        assert!(parse_poly("0", &xy(), zz()).unwrap().is_zero());
        assert!(parse_poly("x - x", &xy(), zz()).unwrap().is_zero());
        assert_eq!(
            parse_poly("-x^2", &xy(), zz()).unwrap().to_string(),
            "-x1^2"
        );
        assert_eq!(parse_poly("--x", &xy(), zz()).unwrap().to_string(), "x1");
        assert_eq!(parse_poly("x^0", &xy(), zz()).unwrap().to_string(), "1");
    }

    #[test]
    fn dag_keeps_structure() {
        let d = parse_dag("(x+y)^16", &xy(), zz()).unwrap();
        assert!(matches!(d.nodes()[d.root()], Node::Pow(_, 16)));
        assert_eq!(d.nodes().len(), 4);

        let d = parse_dag("x*y + x*y", &xy(), zz()).unwrap();
        match d.nodes()[d.root()] {
            Node::Add(a, b) => {
                assert_eq!(a, b);
                assert!(matches!(d.nodes()[a], Node::Mul(..)));
            }
            ref other => panic!("unexpected root {other:?}"),
        }

        let d = parse_dag("x - x", &xy(), zz()).unwrap();
        assert!(matches!(d.nodes()[d.root()], Node::Sub(a, b) if a == b));
    }

    #[test]
    fn reports_errors() {
        let e = parse_poly("x + * y", &xy(), zz()).unwrap_err();
        assert_eq!(
            e,
            Error::Syntax {
                pos: 4,
                msg: "expected a variable, integer or `(`".into()
            }
        );
        assert_eq!(
            parse_poly("x + z", &xy(), zz()),
            Err(Error::UnknownVariable("z".into()))
        );
        assert_eq!(
            parse_poly("x^1000001", &xy(), zz()),
            Err(Error::ExponentOverflow(1_000_001))
        );
        assert!(matches!(
            parse_poly("2x", &xy(), zz()),
            Err(Error::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_poly("(x", &xy(), zz()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x^-1", &xy(), zz()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x*-y", &xy(), zz()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x^2^3", &xy(), zz()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x / y", &xy(), zz()),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("", &xy(), zz()),
            Err(Error::Syntax { pos: 0, .. })
        ));
    }

    #[test]
    fn indexed_variables_and_inference() {
        let v = Variables::Indexed(3);
        let f = parse_poly("x1*x3 + x2", &v, zz()).unwrap();
        assert_eq!(f.arity(), 3);
        assert_eq!(
            parse_poly("x4", &v, zz()),
            Err(Error::UnknownVariable("x4".into()))
        );
        assert_eq!(
            Variables::infer("x1 + x3^2").unwrap(),
            Variables::Indexed(3)
        );
        assert_eq!(
            Variables::infer("y*x + 1").unwrap(),
            Variables::Named(vec!["y".into(), "x".into()])
        );
        assert_eq!(Variables::infer("7").unwrap(), Variables::Indexed(0));
    }

    #[test]
    fn constants_reduce_into_the_ring() {
        let f7 = RingSpec::prime_field(7).unwrap();
        let f = parse_poly("10*x - 3", &xy(), f7).unwrap();
        assert_eq!(f.to_string(), "3*x1 + 4");
    }
}
