//! Brute-force ground truth. Nothing here goes through the refinement
//! machinery of [`crate::osp`], so agreement with it means something.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::generators::{Poset, SetLattice};
use crate::osp::Osp;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{k}^{n} evaluations exceed the budget of {budget}")]
    BudgetExceeded { n: usize, k: u64, budget: u64 },
    #[error("relations contain a cycle")]
    Cyclic,
    #[error(transparent)]
    Generator(#[from] crate::generators::GenError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub k: u64,
    pub count: u64,
    pub elapsed: Duration,
}

/// Advances `a` through `[k]^n` in lexicographic order; false once wrapped.
fn advance(a: &mut [u64], k: u64) -> bool {
    for v in a.iter_mut().rev() {
        if *v < k {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    false
}

/// Number of points of `[k]^n` satisfying the formula.
pub fn count_points(f: &Formula, k: u64, budget: u64) -> Result<u64, OracleError> {
    let n = f.n();
    let total = u32::try_from(n).ok().and_then(|e| k.checked_pow(e));
    match total {
        Some(t) if t <= budget => {}
        _ => return Err(OracleError::BudgetExceeded { n, k, budget }),
    }
    if k == 0 {
        return Ok(u64::from(n == 0 && f.eval_unchecked(&[])));
    }
    let mut a = vec![1u64; n];
    let mut count = 0;
    loop {
        if f.eval_unchecked(&a) {
            count += 1;
        }
        if !advance(&mut a, k) {
            return Ok(count);
        }
    }
}

pub fn count_report(f: &Formula, k: u64, budget: u64) -> Result<CountReport, OracleError> {
    let start = Instant::now();
    let count = count_points(f, k, budget)?;
    Ok(CountReport { k, count, elapsed: start.elapsed() })
}

/// Order classes solving the formula, found by scanning every point of
/// `[n]^n` whose value set is an initial segment `{1..m}`.
pub fn solving_classes(f: &Formula) -> BTreeSet<Osp> {
    let n = f.n();
    let mut out = BTreeSet::new();
    if n == 0 {
        return out;
    }
    let mut a = vec![1u64; n];
    loop {
        let m = *a.iter().max().unwrap() as usize;
        let mut blocks = vec![Vec::new(); m];
        for (i, &v) in a.iter().enumerate() {
            blocks[v as usize - 1].push(i + 1);
        }
        if blocks.iter().all(|b| !b.is_empty()) && f.eval_unchecked(&a) {
            out.insert(Osp::new(blocks).expect("level sets partition [n]"));
        }
        if !advance(&mut a, n as u64) {
            return out;
        }
    }
}

/// Möbius function of a finite poset on `0..size`, keyed by `(a, b)` for
/// every `a <= b`.
pub fn moebius(size: usize, leq: impl Fn(usize, usize) -> bool) -> BTreeMap<(usize, usize), i64> {
    let rel: Vec<Vec<bool>> = (0..size).map(|a| (0..size).map(|b| leq(a, b)).collect()).collect();
    let mut mu = BTreeMap::new();
    for a in 0..size {
        // interval elements above `a`, sorted so every element comes after
        // everything strictly below it
        let mut up: Vec<usize> = (0..size).filter(|&b| rel[a][b]).collect();
        up.sort_by_key(|&b| (0..size).filter(|&c| rel[c][b]).count());
        for &b in &up {
            let value = if a == b {
                1
            } else {
                -up.iter()
                    .filter(|&&c| c != b && rel[c][b])
                    .map(|&c| mu[&(a, c)])
                    .sum::<i64>()
            };
            mu.insert((a, b), value);
        }
    }
    mu
}

/// Möbius values of a set lattice keyed by `(lower, upper)` sorted sets.
pub type SetMoebius = BTreeMap<(Vec<usize>, Vec<usize>), i64>;

/// Möbius function of a set lattice.
pub fn moebius_lattice(l: &SetLattice) -> Result<SetMoebius, OracleError> {
    let elems = l.elements()?;
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|e| b.binary_search(e).is_ok());
    Ok(moebius(elems.len(), |i, j| subset(&elems[i], &elems[j]))
        .into_iter()
        .map(|((i, j), v)| ((elems[i].clone(), elems[j].clone()), v))
        .collect())
}

/// Möbius function of a poset on `[n]`, keyed by 1-based pairs.
pub fn moebius_poset(p: &Poset) -> Result<BTreeMap<(usize, usize), i64>, OracleError> {
    let less = p.closure()?;
    Ok(moebius(p.n, |a, b| a == b || less[a][b])
        .into_iter()
        .map(|((a, b), v)| ((a + 1, b + 1), v))
        .collect())
}

/// Every linear extension, in lexicographic order, straight from the
/// generating relations.
pub fn linear_extensions(p: &Poset) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = p.n;
    let mut preds = vec![Vec::new(); n + 1];
    for &(a, b) in &p.relations {
        if a == 0 || a > n || b == 0 || b > n {
            return Err(crate::generators::GenError::OutOfRange(a.max(b), n).into());
        }
        preds[b].push(a);
    }
    fn walk(n: usize, preds: &[Vec<usize>], placed: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        if cur.len() == n {
            out.push(cur.clone());
            return true;
        }
        let mut progressed = false;
        for x in 1..=n {
            if !placed[x] && preds[x].iter().all(|&y| placed[y]) {
                placed[x] = true;
                cur.push(x);
                progressed |= walk(n, preds, placed, cur, out);
                cur.pop();
                placed[x] = false;
            }
        }
        progressed
    }
    let mut out = Vec::new();
    if !walk(n, &preds, &mut vec![false; n + 1], &mut Vec::new(), &mut out) {
        return Err(OracleError::Cyclic);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{chromatic, Graph};

    fn parse(s: &str, n: usize) -> Formula {
        Formula::parse(s, Some(n)).unwrap()
    }

    #[test]
    fn counts() {
        let f = parse("x1 < x2 = x3 or x3 < x1 = x2 or x2 < x1 < x3", 3);
        assert_eq!(count_points(&f, 3, DEFAULT_BUDGET).unwrap(), 7);
        assert_eq!(count_points(&parse("x1 <= x1", 3), 2, DEFAULT_BUDGET).unwrap(), 8);
        let k3 = chromatic(&Graph { n: 3, edges: vec![(1, 2), (1, 3), (2, 3)] }).unwrap();
        assert_eq!(count_points(&k3, 3, DEFAULT_BUDGET).unwrap(), 6);
        assert_eq!(count_points(&k3, 0, DEFAULT_BUDGET).unwrap(), 0);
    }

    #[test]
    fn budget() {
        let f = parse("x1 <= x2", 2);
        assert_eq!(
            count_points(&f, 11, 100),
            Err(OracleError::BudgetExceeded { n: 2, k: 11, budget: 100 })
        );
        assert_eq!(count_points(&f, 10, 100).unwrap(), 55);
    }

    #[test]
    fn classes() {
        let f = parse("x1 < x2 = x3 or x3 < x1 = x2 or x2 < x1 < x3", 3);
        let got: Vec<String> = solving_classes(&f).iter().map(Osp::to_string).collect();
        let mut want = vec!["1|23", "3|12", "2|1|3"];
        want.sort_by_key(|s| s.parse::<Osp>().unwrap());
        assert_eq!(got, want);
        assert!(solving_classes(&parse("x1 < x1", 2)).is_empty());
        let weak: Vec<String> = solving_classes(&parse("x1 <= x2", 2)).iter().map(Osp::to_string).collect();
        assert_eq!(weak, ["12", "1|2"]);
    }

    #[test]
    fn moebius_values() {
        let b2 = SetLattice { n: 2, sets: vec![vec![], vec![1], vec![2], vec![1, 2]] };
        let mu = moebius_lattice(&b2).unwrap();
        assert_eq!(mu[&(vec![], vec![1, 2])], 1);
        assert_eq!(mu[&(vec![1], vec![1])], 1);
        assert_eq!(mu[&(vec![], vec![2])], -1);
        let chain = Poset { n: 2, relations: vec![(1, 2)] };
        assert_eq!(moebius_poset(&chain).unwrap()[&(1, 2)], -1);
    }

    #[test]
    fn extensions() {
        let anti = Poset { n: 2, relations: vec![] };
        assert_eq!(linear_extensions(&anti).unwrap().len(), 2);
        let v = Poset { n: 3, relations: vec![(1, 2), (1, 3)] };
        assert_eq!(linear_extensions(&v).unwrap(), vec![vec![1, 2, 3], vec![1, 3, 2]]);
        let chain = Poset { n: 3, relations: vec![(1, 2), (2, 3)] };
        assert_eq!(linear_extensions(&chain).unwrap().len(), 1);
        let cyc = Poset { n: 2, relations: vec![(1, 2), (2, 1)] };
        assert_eq!(linear_extensions(&cyc), Err(OracleError::Cyclic));
    }
}
