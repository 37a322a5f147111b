//! Scheduling-problem formulas over atoms `x_i <= x_j`.
//!
//! The parse tree keeps the comparison sugar (`<`, `=`, `!=`, `>=`, `>`,
//! chains and `if/then/else`); [`Formula::desugar`] reduces it to
//! `Atom/And/Or/Not`. Both forms evaluate to the same truth values.

mod parser;
mod tree;

use std::fmt;

use thiserror::Error;

use crate::osp::Osp;

pub use parser::ParseError;
pub use tree::{
    analyze_cell, cells, to_decision_tree, Cell, CellAnalysis, DecisionTree, NotADecisionTree,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("declared arity {declared} is smaller than the largest variable index {max_index}")]
    ArityTooSmall { declared: usize, max_index: usize },
    #[error("expected a point of length {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("point entries must be at least 1")]
    NonPositiveEntry,
    #[error("an inequality needs two distinct variables, got x{0} twice")]
    DegenerateIneq(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds(self, a: u64, b: u64) -> bool {
        match self {
            Rel::Le => a <= b,
            Rel::Lt => a < b,
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Ge => a >= b,
            Rel::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// Parse-tree node. Variable indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// `x_i <= x_j`
    Atom(usize, usize),
    Compare(Rel, usize, usize),
    /// `vars[0] rels[0] vars[1] rels[1] ...`, at least two relations.
    Chain(Vec<usize>, Vec<Rel>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn and(children: Vec<Expr>) -> Expr {
        Expr::And(children)
    }

    pub fn or(children: Vec<Expr>) -> Expr {
        Expr::Or(children)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Expr) -> Expr {
        Expr::Not(Box::new(child))
    }

    pub fn ite(cond: Expr, then: Expr, other: Expr) -> Expr {
        Expr::Ite(Box::new(cond), Box::new(then), Box::new(other))
    }

    pub fn max_var(&self) -> usize {
        match self {
            Expr::Atom(i, j) | Expr::Compare(_, i, j) => (*i).max(*j),
            Expr::Chain(vars, _) => vars.iter().copied().max().unwrap_or(0),
            Expr::And(cs) | Expr::Or(cs) => cs.iter().map(Expr::max_var).max().unwrap_or(0),
            Expr::Not(c) => c.max_var(),
            Expr::Ite(c, t, e) => c.max_var().max(t.max_var()).max(e.max_var()),
        }
    }

    /// Truth value at `vals`, where `vals[i - 1]` is the value of `x_i`.
    pub(crate) fn eval(&self, vals: &[u64]) -> bool {
        let v = |i: usize| vals[i - 1];
        match self {
            Expr::Atom(i, j) => v(*i) <= v(*j),
            Expr::Compare(rel, i, j) => rel.holds(v(*i), v(*j)),
            Expr::Chain(vars, rels) => rels
                .iter()
                .zip(vars.windows(2))
                .all(|(rel, w)| rel.holds(v(w[0]), v(w[1]))),
            Expr::And(cs) => cs.iter().all(|c| c.eval(vals)),
            Expr::Or(cs) => cs.iter().any(|c| c.eval(vals)),
            Expr::Not(c) => !c.eval(vals),
            Expr::Ite(c, t, e) => {
                if c.eval(vals) {
                    t.eval(vals)
                } else {
                    e.eval(vals)
                }
            }
        }
    }

    fn desugar(&self) -> Expr {
        let le = |i: usize, j: usize| Expr::Atom(i, j);
        let compare = |rel: Rel, i: usize, j: usize| match rel {
            Rel::Le => le(i, j),
            Rel::Lt => Expr::not(le(j, i)),
            Rel::Eq => Expr::and(vec![le(i, j), le(j, i)]),
            Rel::Ne => Expr::or(vec![Expr::not(le(i, j)), Expr::not(le(j, i))]),
            Rel::Ge => le(j, i),
            Rel::Gt => Expr::not(le(i, j)),
        };
        match self {
            Expr::Atom(i, j) => le(*i, *j),
            Expr::Compare(rel, i, j) => compare(*rel, *i, *j),
            Expr::Chain(vars, rels) => Expr::and(
                rels.iter()
                    .zip(vars.windows(2))
                    .map(|(rel, w)| compare(*rel, w[0], w[1]))
                    .collect(),
            ),
            Expr::And(cs) => Expr::and(cs.iter().map(Expr::desugar).collect()),
            Expr::Or(cs) => Expr::or(cs.iter().map(Expr::desugar).collect()),
            Expr::Not(c) => Expr::not(c.desugar()),
            Expr::Ite(c, t, e) => {
                let c = c.desugar();
                Expr::or(vec![
                    Expr::and(vec![c.clone(), t.desugar()]),
                    Expr::and(vec![Expr::not(c), e.desugar()]),
                ])
            }
        }
    }

    pub fn is_desugared(&self) -> bool {
        match self {
            Expr::Atom(..) => true,
            Expr::Compare(..) | Expr::Chain(..) | Expr::Ite(..) => false,
            Expr::And(cs) | Expr::Or(cs) => cs.iter().all(Expr::is_desugared),
            Expr::Not(c) => c.is_desugared(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(cs) if cs.len() > 1 => 1,
            Expr::And(cs) if cs.len() > 1 => 2,
            Expr::Not(_) => 3,
            Expr::Ite(..) => 0,
            _ => 4,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let wrap = prec < min_prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Atom(i, j) => write!(f, "x{i} <= x{j}")?,
            Expr::Compare(rel, i, j) => write!(f, "x{i} {} x{j}", rel.symbol())?,
            Expr::Chain(vars, rels) => {
                write!(f, "x{}", vars[0])?;
                for (rel, v) in rels.iter().zip(&vars[1..]) {
                    write!(f, " {} x{v}", rel.symbol())?;
                }
            }
            // The grammar has no constants; use reflexive atoms.
            Expr::And(cs) if cs.is_empty() => f.write_str("x1 <= x1")?,
            Expr::Or(cs) if cs.is_empty() => f.write_str("x1 < x1")?,
            Expr::And(cs) | Expr::Or(cs) if cs.len() == 1 => cs[0].write(f, min_prec.max(1))?,
            Expr::And(cs) => write_joined(f, cs, " and ", 3)?,
            Expr::Or(cs) => write_joined(f, cs, " or ", 2)?,
            Expr::Not(c) => {
                f.write_str("not ")?;
                c.write(f, 3)?;
            }
            Expr::Ite(c, t, e) => {
                f.write_str("if ")?;
                c.write(f, 1)?;
                f.write_str(" then ")?;
                t.write(f, 1)?;
                f.write_str(" else ")?;
                e.write(f, 1)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, cs: &[Expr], sep: &str, child_prec: u8) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        c.write(f, child_prec)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // top-level if/then/else needs no parentheses
        self.write(f, 0)
    }
}

/// A scheduling problem: a formula together with its number of items.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    expr: Expr,
    n: usize,
}

impl Formula {
    /// Wraps `expr` with arity `max(declared, largest index)`.
    pub fn new(expr: Expr, declared: Option<usize>) -> Result<Self, FormulaError> {
        let max_index = expr.max_var();
        let n = match declared {
            Some(d) if d < max_index => {
                return Err(FormulaError::ArityTooSmall { declared: d, max_index })
            }
            Some(d) => d,
            None => max_index,
        };
        Ok(Formula { expr, n })
    }

    pub fn parse(text: &str, declared: Option<usize>) -> Result<Self, FormulaError> {
        let expr = parser::parse_expr(text)?;
        Formula::new(expr, declared)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn desugar(&self) -> Formula {
        Formula { expr: self.expr.desugar(), n: self.n }
    }

    pub fn eval_point(&self, a: &[u64]) -> Result<bool, FormulaError> {
        if a.len() != self.n {
            return Err(FormulaError::ArityMismatch { expected: self.n, got: a.len() });
        }
        if a.contains(&0) {
            return Err(FormulaError::NonPositiveEntry);
        }
        Ok(self.expr.eval(a))
    }

    /// Truth on the order class `phi`: atoms compare block indices.
    pub fn eval_osp(&self, phi: &Osp) -> Result<bool, FormulaError> {
        if phi.n() != self.n {
            return Err(FormulaError::ArityMismatch { expected: self.n, got: phi.n() });
        }
        Ok(self.expr.eval(&phi.representative()))
    }

    /// `eval_point` without the checks, for hot loops that already
    /// guarantee the arity.
    pub(crate) fn eval_unchecked(&self, a: &[u64]) -> bool {
        self.expr.eval(a)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

/// `x_lesser <= x_greater`, or `<` when `strict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ineq {
    pub lesser: usize,
    pub greater: usize,
    pub strict: bool,
}

impl Ineq {
    pub fn new(lesser: usize, greater: usize, strict: bool) -> Result<Self, FormulaError> {
        if lesser == greater {
            return Err(FormulaError::DegenerateIneq(lesser));
        }
        Ok(Ineq { lesser, greater, strict })
    }

    pub fn weak(lesser: usize, greater: usize) -> Self {
        Ineq::new(lesser, greater, false).expect("distinct variables")
    }

    pub fn strict(lesser: usize, greater: usize) -> Self {
        Ineq::new(lesser, greater, true).expect("distinct variables")
    }

    /// `¬(a <= b)` is `b < a` and `¬(a < b)` is `b <= a`.
    pub fn negate(self) -> Self {
        Ineq { lesser: self.greater, greater: self.lesser, strict: !self.strict }
    }

    pub fn holds(&self, a: &[u64]) -> bool {
        let (l, g) = (a[self.lesser - 1], a[self.greater - 1]);
        if self.strict {
            l < g
        } else {
            l <= g
        }
    }

    pub fn to_expr(self) -> Expr {
        let rel = if self.strict { Rel::Lt } else { Rel::Le };
        Expr::Compare(rel, self.lesser, self.greater)
    }
}

impl fmt::Display for Ineq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        write!(f, "x{} {op} x{}", self.lesser, self.greater)
    }
}
