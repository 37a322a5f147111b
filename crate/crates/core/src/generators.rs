//! Classical objects compiled into scheduling problems: graph colorings,
//! order polynomials, (P, ω)-partitions, flags of set lattices and
//! lattices of flats of matroids.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::PartialComplex;
use crate::formula::{Expr, Formula, Rel};
use crate::oracle::moebius;
use crate::osp::{all_osps, Composition, Osp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("element {0} is out of range 1..={1}")]
    OutOfRange(usize, usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("relations contain a cycle through {0}")]
    Cyclic(usize),
    #[error("labeling is not a bijection onto 1..={0}")]
    BadLabeling(usize),
    #[error("set lattice must contain the empty set and the full ground set")]
    MissingBounds,
    #[error("set lattice is not closed under intersection: {0:?} ∩ {1:?}")]
    NotMeetClosed(Vec<usize>, Vec<usize>),
    #[error("matroid has no bases")]
    NoBases,
    #[error("bases have different sizes")]
    NotEquicardinal,
    #[error("basis exchange fails for {0:?}, {1:?} removing {2}")]
    ExchangeFails(Vec<usize>, Vec<usize>, usize),
    #[error("matroid has loops {0:?}; its lattice of flats does not start at the empty set")]
    HasLoops(Vec<usize>),
    #[error(transparent)]
    Formula(#[from] crate::formula::FormulaError),
}

fn check_element(e: usize, n: usize) -> Result<(), GenError> {
    if e == 0 || e > n {
        Err(GenError::OutOfRange(e, n))
    } else {
        Ok(())
    }
}

fn normalize_set(set: &[usize], n: usize) -> Result<Vec<usize>, GenError> {
    for &e in set {
        check_element(e, n)?;
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn validate(&self) -> Result<(), GenError> {
        for &(a, b) in &self.edges {
            check_element(a, self.n)?;
            check_element(b, self.n)?;
            if a == b {
                return Err(GenError::Loop(a));
            }
        }
        Ok(())
    }
}

/// A poset on `[n]` given by generating relations `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub n: usize,
    pub relations: Vec<(usize, usize)>,
}

impl Poset {
    /// Strict order matrix of the transitive closure, 0-based.
    pub fn closure(&self) -> Result<Vec<Vec<bool>>, GenError> {
        let n = self.n;
        let mut less = vec![vec![false; n]; n];
        for &(a, b) in &self.relations {
            check_element(a, n)?;
            check_element(b, n)?;
            if a == b {
                return Err(GenError::Cyclic(a));
            }
            less[a - 1][b - 1] = true;
        }
        for k in 0..n {
            let via = less[k].clone();
            for row in less.iter_mut().filter(|row| row[k]) {
                for (cell, &step) in row.iter_mut().zip(&via) {
                    *cell |= step;
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| less[i][i]) {
            return Err(GenError::Cyclic(i + 1));
        }
        Ok(less)
    }

    /// Covering pairs `(a, b)`, 1-based, sorted.
    pub fn covers(&self) -> Result<Vec<(usize, usize)>, GenError> {
        let less = self.closure()?;
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if less[a][b] && !(0..n).any(|c| less[a][c] && less[c][b]) {
                    out.push((a + 1, b + 1));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPoset {
    #[serde(flatten)]
    pub poset: Poset,
    /// `omega[a - 1]` is the label of element `a`.
    pub omega: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLattice {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetLattice {
    /// Sorted, deduplicated members; checks bounds and meet closure.
    pub fn elements(&self) -> Result<Vec<Vec<usize>>, GenError> {
        let set: BTreeSet<Vec<usize>> = self
            .sets
            .iter()
            .map(|s| normalize_set(s, self.n))
            .collect::<Result<_, _>>()?;
        let full: Vec<usize> = (1..=self.n).collect();
        if !set.contains(&Vec::new()) || !set.contains(&full) {
            return Err(GenError::MissingBounds);
        }
        for a in &set {
            for b in &set {
                let meet: Vec<usize> = a.iter().copied().filter(|e| b.binary_search(e).is_ok()).collect();
                if !set.contains(&meet) {
                    return Err(GenError::NotMeetClosed(a.clone(), b.clone()));
                }
            }
        }
        let mut out: Vec<Vec<usize>> = set.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matroid {
    pub n: usize,
    pub bases: Vec<Vec<usize>>,
}

impl Matroid {
    /// Normalized bases after checking the basis axioms exhaustively.
    pub fn validated_bases(&self) -> Result<Vec<Vec<usize>>, GenError> {
        let bases: BTreeSet<Vec<usize>> = self
            .bases
            .iter()
            .map(|b| normalize_set(b, self.n))
            .collect::<Result<_, _>>()?;
        let Some(first) = bases.iter().next() else {
            return Err(GenError::NoBases);
        };
        if bases.iter().any(|b| b.len() != first.len()) {
            return Err(GenError::NotEquicardinal);
        }
        for b1 in &bases {
            for b2 in &bases {
                for &x in b1.iter().filter(|x| !b2.contains(x)) {
                    let ok = b2.iter().filter(|y| !b1.contains(y)).any(|&y| {
                        let mut swapped: Vec<usize> = b1.iter().copied().filter(|&e| e != x).collect();
                        swapped.push(y);
                        swapped.sort_unstable();
                        bases.contains(&swapped)
                    });
                    if !ok {
                        return Err(GenError::ExchangeFails(b1.clone(), b2.clone(), x));
                    }
                }
            }
        }
        Ok(bases.into_iter().collect())
    }
}

/// `x_i != x_j` for every edge; its counting polynomial is the chromatic
/// polynomial.
pub fn chromatic(g: &Graph) -> Result<Formula, GenError> {
    g.validate()?;
    let expr = Expr::and(g.edges.iter().map(|&(a, b)| Expr::Compare(Rel::Ne, a, b)).collect());
    Ok(Formula::new(expr, Some(g.n))?)
}

/// `x_a <= x_b` for every generating relation `a < b`.
pub fn order_polynomial(p: &Poset) -> Result<Formula, GenError> {
    p.closure()?;
    let expr = Expr::and(p.relations.iter().map(|&(a, b)| Expr::Compare(Rel::Le, a, b)).collect());
    Ok(Formula::new(expr, Some(p.n))?)
}

/// For every cover `a < b`: weak when `ω(a) < ω(b)`, strict otherwise.
pub fn p_partition(lp: &LabeledPoset) -> Result<Formula, GenError> {
    let n = lp.poset.n;
    let mut seen = vec![false; n + 1];
    if lp.omega.len() != n {
        return Err(GenError::BadLabeling(n));
    }
    for &w in &lp.omega {
        if w == 0 || w > n || seen[w] {
            return Err(GenError::BadLabeling(n));
        }
        seen[w] = true;
    }
    let expr = Expr::and(
        lp.poset
            .covers()?
            .into_iter()
            .map(|(a, b)| {
                let rel = if lp.omega[a - 1] < lp.omega[b - 1] { Rel::Le } else { Rel::Lt };
                Expr::Compare(rel, a, b)
            })
            .collect(),
    );
    Ok(Formula::new(expr, Some(n))?)
}

/// Ordered set partitions whose partial unions form a chain of the lattice.
pub fn flags_problem(l: &SetLattice) -> Result<PartialComplex, GenError> {
    let members: BTreeSet<Vec<usize>> = l.elements()?.into_iter().collect();
    let faces = all_osps(l.n).into_iter().filter(|phi| {
        let mut acc: Vec<usize> = Vec::new();
        phi.blocks().iter().all(|block| {
            acc.extend_from_slice(block);
            acc.sort_unstable();
            members.contains(&acc)
        })
    });
    Ok(PartialComplex::new(l.n, faces).expect("faces share the lattice arity"))
}

/// The disjunction of the order classes of a complex.
pub fn complex_formula(c: &PartialComplex) -> Formula {
    let class = |phi: &Osp| -> Expr {
        let mut parts = Vec::new();
        for block in phi.blocks() {
            for w in block.windows(2) {
                parts.push(Expr::Compare(Rel::Eq, w[0], w[1]));
            }
        }
        for w in phi.blocks().windows(2) {
            parts.push(Expr::Compare(Rel::Lt, w[0][0], w[1][0]));
        }
        match parts.len() {
            1 => parts.pop().unwrap(),
            _ => Expr::and(parts),
        }
    };
    let expr = Expr::or(c.faces().iter().map(class).collect());
    Formula::new(expr, Some(c.n())).expect("indices bounded by arity")
}

/// All flats of a loopless matroid.
pub fn lattice_of_flats(m: &Matroid) -> Result<SetLattice, GenError> {
    let bases = m.validated_bases()?;
    let n = m.n;
    let masks: Vec<u64> = bases
        .iter()
        .map(|b| b.iter().fold(0u64, |acc, &e| acc | 1 << (e - 1)))
        .collect();
    let rank = |s: u64| masks.iter().map(|b| (b & s).count_ones()).max().unwrap_or(0);
    let closure = |s: u64| {
        let r = rank(s);
        (0..n).fold(s, |acc, e| if rank(s | 1 << e) == r { acc | 1 << e } else { acc })
    };
    let loops = closure(0);
    if loops != 0 {
        return Err(GenError::HasLoops((0..n).filter(|e| loops >> e & 1 == 1).map(|e| e + 1).collect()));
    }
    let sets = (0u64..1 << n)
        .filter(|&s| closure(s) == s)
        .map(|s| (0..n).filter(|e| s >> e & 1 == 1).map(|e| e + 1).collect())
        .collect();
    Ok(SetLattice { n, sets })
}

/// `[N_α] = (−1)^{ℓ(α)} Σ_{α-flags} Π_i μ(f_i, f_{i+1})`, summed over strict
/// chains `∅ = f_0 ⊂ … ⊂ f_ℓ = [n]` of lattice elements with
/// `|f_{i+1}| − |f_i| = α_i`.
pub fn ehrenborg_coefficients(l: &SetLattice) -> Result<BTreeMap<Composition, i64>, GenError> {
    let elems = l.elements()?;
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|e| b.binary_search(e).is_ok());
    let mu = moebius(elems.len(), |i, j| subset(&elems[i], &elems[j]));
    let top = elems.len() - 1; // sorted by size, the full set is last

    let mut out: BTreeMap<Composition, i64> = BTreeMap::new();
    fn walk(
        at: usize,
        top: usize,
        elems: &[Vec<usize>],
        mu: &BTreeMap<(usize, usize), i64>,
        parts: &mut Vec<usize>,
        weight: i64,
        out: &mut BTreeMap<Composition, i64>,
    ) {
        if at == top {
            let sign = if parts.len().is_multiple_of(2) { 1 } else { -1 };
            *out.entry(Composition(parts.clone())).or_insert(0) += sign * weight;
            return;
        }
        for next in 0..elems.len() {
            if next == at || elems[next].len() <= elems[at].len() {
                continue;
            }
            if let Some(&m) = mu.get(&(at, next)) {
                parts.push(elems[next].len() - elems[at].len());
                walk(next, top, elems, mu, parts, weight * m, out);
                parts.pop();
            }
        }
    }
    walk(0, top, &elems, &mu, &mut Vec::new(), 1, &mut out);
    out.retain(|_, c| *c != 0);
    Ok(out)
}
