//! Decision trees: nested `if φ then ψ_t else ψ_f` with single-inequality
//! conditions and conjunction leaves, their cells, and the order-theoretic
//! analysis of a cell.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Expr, Formula, Ineq, Rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a decision tree at {path}: {reason}")]
pub struct NotADecisionTree {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf(Vec<Ineq>),
    Node {
        cond: Ineq,
        then: Box<DecisionTree>,
        other: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { then, other, .. } => then.leaf_count() + other.leaf_count(),
        }
    }

    /// Number of condition levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { then, other, .. } => 1 + then.depth().max(other.depth()),
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            DecisionTree::Leaf(ineqs) => match ineqs.as_slice() {
                [single] => single.to_expr(),
                _ => Expr::and(ineqs.iter().map(|i| i.to_expr()).collect()),
            },
            DecisionTree::Node { cond, then, other } => {
                Expr::ite(cond.to_expr(), then.to_expr(), other.to_expr())
            }
        }
    }
}

fn comparison_ineqs(e: &Expr) -> Option<Result<Vec<Ineq>, String>> {
    let one = |rel: Rel, i: usize, j: usize| -> Result<Ineq, String> {
        let (l, g, strict) = match rel {
            Rel::Le => (i, j, false),
            Rel::Lt => (i, j, true),
            Rel::Ge => (j, i, false),
            Rel::Gt => (j, i, true),
            Rel::Eq | Rel::Ne => {
                return Err(format!("'{}' is not a single inequality", rel.symbol()))
            }
        };
        Ineq::new(l, g, strict).map_err(|e| e.to_string())
    };
    match e {
        Expr::Atom(i, j) => Some(one(Rel::Le, *i, *j).map(|x| vec![x])),
        Expr::Compare(rel, i, j) => Some(one(*rel, *i, *j).map(|x| vec![x])),
        Expr::Chain(vars, rels) => Some(
            rels.iter()
                .zip(vars.windows(2))
                .map(|(r, w)| one(*r, w[0], w[1]))
                .collect(),
        ),
        _ => None,
    }
}

fn leaf_ineqs(e: &Expr, path: &str, out: &mut Vec<Ineq>) -> Result<(), NotADecisionTree> {
    let bad = |reason: String| NotADecisionTree { path: path.to_string(), reason };
    if let Some(r) = comparison_ineqs(e) {
        out.extend(r.map_err(bad)?);
        return Ok(());
    }
    match e {
        Expr::And(cs) => {
            for (k, c) in cs.iter().enumerate() {
                leaf_ineqs(c, &format!("{path}.and[{k}]"), out)?;
            }
            Ok(())
        }
        Expr::Or(_) => Err(bad("a disjunction is neither a leaf nor an if/then/else".into())),
        Expr::Not(_) => Err(bad("negation is not allowed in a leaf".into())),
        Expr::Ite(..) => Err(bad("if/then/else inside a conjunction leaf".into())),
        _ => unreachable!("comparisons handled above"),
    }
}

fn convert(e: &Expr, path: &str) -> Result<DecisionTree, NotADecisionTree> {
    match e {
        Expr::Ite(cond, then, other) => {
            let cond_path = format!("{path}.if");
            let ineq = match comparison_ineqs(cond) {
                Some(Ok(v)) if v.len() == 1 => v[0],
                Some(Err(reason)) => return Err(NotADecisionTree { path: cond_path, reason }),
                _ => {
                    return Err(NotADecisionTree {
                        path: cond_path,
                        reason: "condition must be a single inequality".into(),
                    })
                }
            };
            Ok(DecisionTree::Node {
                cond: ineq,
                then: Box::new(convert(then, &format!("{path}.then"))?),
                other: Box::new(convert(other, &format!("{path}.else"))?),
            })
        }
        _ => {
            let mut ineqs = Vec::new();
            leaf_ineqs(e, path, &mut ineqs)?;
            Ok(DecisionTree::Leaf(ineqs))
        }
    }
}

/// Structural conversion of a parse tree that literally has decision-tree
/// shape. Nothing is solved or simplified.
pub fn to_decision_tree(f: &Formula) -> Result<DecisionTree, NotADecisionTree> {
    convert(f.expr(), "root")
}

/// The conjunction at one leaf: ancestor conditions (negated on else
/// branches) followed by the leaf's own inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub constraints: Vec<Ineq>,
    /// Branch taken at each ancestor, `true` for the then-branch.
    pub source_leaf: Vec<bool>,
}

impl Cell {
    pub fn holds(&self, a: &[u64]) -> bool {
        self.constraints.iter().all(|c| c.holds(a))
    }

    pub fn path_string(&self) -> String {
        if self.source_leaf.is_empty() {
            return "root".into();
        }
        let steps: Vec<&str> = self
            .source_leaf
            .iter()
            .map(|&t| if t { "then" } else { "else" })
            .collect();
        format!("root.{}", steps.join("."))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.constraints.iter().map(Ineq::to_string).collect();
        f.write_str(&parts.join(" and "))
    }
}

/// One cell per leaf, then-branches before else-branches.
pub fn cells(t: &DecisionTree) -> Vec<Cell> {
    fn walk(t: &DecisionTree, ctx: &mut Vec<Ineq>, path: &mut Vec<bool>, out: &mut Vec<Cell>) {
        match t {
            DecisionTree::Leaf(ineqs) => {
                let mut constraints = ctx.clone();
                constraints.extend_from_slice(ineqs);
                out.push(Cell { constraints, source_leaf: path.clone() });
            }
            DecisionTree::Node { cond, then, other } => {
                for (branch, cond) in [(true, *cond), (false, cond.negate())] {
                    ctx.push(cond);
                    path.push(branch);
                    walk(if branch { then } else { other }, ctx, path, out);
                    ctx.pop();
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(t, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellAnalysis {
    pub consistent: bool,
    /// Classes of variables forced equal, each sorted, ordered by least element.
    pub equality_classes: Vec<Vec<usize>>,
    /// Cover relations of the collapsed order, written on class minima.
    pub cover_ineqs: Vec<Ineq>,
    pub dimension: usize,
    pub almost_open: bool,
    pub weak_facet_count: usize,
    /// Listed constraints that are implied by the others (not cover edges).
    pub redundant: Vec<Ineq>,
}

impl Serialize for Ineq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Builds the constraint digraph on `[n]`, collapses weak cycles into
/// equality classes and transitively reduces the quotient.
pub fn analyze_cell(c: &Cell, n: usize) -> CellAnalysis {
    let n = n.max(c.constraints.iter().map(|i| i.lesser.max(i.greater)).max().unwrap_or(0));
    // reach[i][j]: a directed path i -> j of length >= 0
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for ineq in &c.constraints {
        reach[ineq.lesser - 1][ineq.greater - 1] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (cell, &step) in row.iter_mut().zip(&via) {
                *cell |= step;
            }
        }
    }

    let consistent = c
        .constraints
        .iter()
        .all(|i| !(i.strict && reach[i.greater - 1][i.lesser - 1]));

    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members.iter().map(|j| j + 1).collect());
    }
    let m = classes.len();

    // strictness per ordered class pair; None = no direct constraint
    let mut edge: Vec<Vec<Option<bool>>> = vec![vec![None; m]; m];
    for ineq in &c.constraints {
        let (a, b) = (class_of[ineq.lesser - 1], class_of[ineq.greater - 1]);
        if a == b {
            continue;
        }
        let slot = &mut edge[a][b];
        *slot = Some(slot.unwrap_or(false) || ineq.strict);
    }
    let creach = |a: usize, b: usize| reach[classes[a][0] - 1][classes[b][0] - 1];
    let is_cover = |a: usize, b: usize| {
        a != b && creach(a, b) && !(0..m).any(|mid| mid != a && mid != b && creach(a, mid) && creach(mid, b))
    };

    let mut cover_ineqs = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if let Some(strict) = edge[a][b] {
                if is_cover(a, b) {
                    cover_ineqs.push(Ineq { lesser: classes[a][0], greater: classes[b][0], strict });
                }
            }
        }
    }
    cover_ineqs.sort();

    let redundant: Vec<Ineq> = c
        .constraints
        .iter()
        .filter(|i| {
            let (a, b) = (class_of[i.lesser - 1], class_of[i.greater - 1]);
            a == b || !is_cover(a, b)
        })
        .copied()
        .collect();

    let weak_facet_count = cover_ineqs.iter().filter(|i| !i.strict).count();
    CellAnalysis {
        consistent,
        dimension: m,
        almost_open: consistent && weak_facet_count <= 1,
        weak_facet_count,
        equality_classes: classes,
        cover_ineqs,
        redundant,
    }
}
