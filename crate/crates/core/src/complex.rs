//! Allowed and forbidden configurations as partial complexes of ordered set
//! partitions, closure checks, and interval partitions with certificates.
//!
//! A face `Φ` is indexed by its block count `ℓ(Φ)` throughout. An interval
//! `[lower, upper]` is taken in the refinement order, so it contains every
//! `Ψ` that refines `lower` and is refined by `upper`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::osp::{all_osps, interval, refines, Osp};
use crate::poly::{HStarVector, HVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("face {face} has arity {got}, expected {expected}")]
    ArityMismatch { face: String, expected: usize, got: usize },
    #[error("not closed under directed refinement: {missing} refines face {face} but is missing")]
    NotClosed { face: String, missing: String },
    #[error("face {face} has two coarsest allowed directed coarsenings, {first} and {second}")]
    NonUniqueCoarsest { face: String, first: String, second: String },
    #[error("complex is not pure: maximal faces have block counts {lengths:?}")]
    NotPure { lengths: Vec<usize> },
    #[error("no interval partition exists ({explored} search nodes explored)")]
    NotPartitionable { explored: u64 },
    #[error("constructed partition failed verification: {0}")]
    Unverified(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialComplex {
    n: usize,
    faces: BTreeSet<Osp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lower: Osp,
    pub upper: Osp,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalPartition {
    pub intervals: Vec<Interval>,
}

/// Outcome of [`PartialComplex::verify_partition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub violation: Option<String>,
}

impl Verdict {
    fn fail(msg: String) -> Self {
        Verdict { valid: false, violation: Some(msg) }
    }
}

impl PartialComplex {
    pub fn new(n: usize, faces: impl IntoIterator<Item = Osp>) -> Result<Self, ComplexError> {
        let mut set = BTreeSet::new();
        for face in faces {
            if face.n() != n {
                return Err(ComplexError::ArityMismatch {
                    face: face.to_string(),
                    expected: n,
                    got: face.n(),
                });
            }
            set.insert(face);
        }
        Ok(PartialComplex { n, faces: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &BTreeSet<Osp> {
        &self.faces
    }

    pub fn contains(&self, phi: &Osp) -> bool {
        self.faces.contains(phi)
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// `f_i` = number of faces with `i` blocks, `i = 0..=n`.
    pub fn f_vector(&self) -> Vec<BigInt> {
        let mut f = vec![BigInt::zero(); self.n + 1];
        for face in &self.faces {
            f[face.len()] += 1;
        }
        f
    }

    /// h-vector from the face numbers:
    /// `h(t) = (1−t)^{n+1} + Σ_i f_i t^{i+1} (1−t)^{n−i}`.
    pub fn h_vector(&self) -> HVector {
        let n = self.n;
        let mut h = vec![BigInt::zero(); n + 2];
        for (j, c) in binomial_row_signed(n + 1).into_iter().enumerate() {
            h[j] += c;
        }
        for (i, fi) in self.f_vector().iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (m, c) in binomial_row_signed(n - i).into_iter().enumerate() {
                h[i + 1 + m] += fi * c;
            }
        }
        HVector(h)
    }

    /// h*-vector from the face numbers: `h*(t) = Σ_i f_i t^i (1−t)^{n−i}`.
    pub fn h_star_vector(&self) -> HStarVector {
        let n = self.n;
        let mut h = vec![BigInt::zero(); n + 1];
        for (i, fi) in self.f_vector().iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (m, c) in binomial_row_signed(n - i).into_iter().enumerate() {
                h[i + m] += fi * c;
            }
        }
        HStarVector(h)
    }

    /// Faces not refined by any other face.
    pub fn maximal_faces(&self) -> Vec<&Osp> {
        let by_len = self.faces_by_length();
        self.faces
            .iter()
            .filter(|phi| {
                !by_len
                    .range(phi.len() + 1..)
                    .flat_map(|(_, fs)| fs.iter())
                    .any(|psi| refines(psi, phi))
            })
            .collect()
    }

    fn faces_by_length(&self) -> BTreeMap<usize, Vec<&Osp>> {
        let mut m: BTreeMap<usize, Vec<&Osp>> = BTreeMap::new();
        for f in &self.faces {
            m.entry(f.len()).or_default().push(f);
        }
        m
    }

    /// Common block count of the maximal faces; `Err` lists the distinct
    /// counts when they differ. The empty complex is pure with length 0.
    pub fn purity(&self) -> Result<usize, ComplexError> {
        let lengths: BTreeSet<usize> = self.maximal_faces().iter().map(|f| f.len()).collect();
        match lengths.len() {
            0 => Ok(0),
            1 => Ok(*lengths.iter().next().unwrap()),
            _ => Err(ComplexError::NotPure { lengths: lengths.into_iter().collect() }),
        }
    }

    fn first_directed_gap(&self) -> Option<(Osp, Osp)> {
        for face in &self.faces {
            if let Some(missing) = face.directed_refinements().into_iter().find(|p| !self.contains(p)) {
                return Some((face.clone(), missing));
            }
        }
        None
    }

    pub fn closed_under_directed_refinement(&self) -> bool {
        self.first_directed_gap().is_none()
    }

    pub fn closed_under_coarsening(&self) -> bool {
        self.faces.iter().all(|f| f.coarsenings().iter().all(|c| self.contains(c)))
    }

    /// For a complex closed under directed refinement: pairs every
    /// permutation face with its unique coarsest allowed directed coarsening.
    pub fn unique_coarsest_partition(&self) -> Result<IntervalPartition, ComplexError> {
        self.purity()?;
        if let Some((face, missing)) = self.first_directed_gap() {
            return Err(ComplexError::NotClosed {
                face: face.to_string(),
                missing: missing.to_string(),
            });
        }
        let mut coarsest: BTreeMap<&Osp, Osp> = BTreeMap::new();
        for face in &self.faces {
            let below: Vec<Osp> = face
                .directed_coarsenings()
                .into_iter()
                .filter(|p| self.contains(p))
                .collect();
            let minimal: Vec<&Osp> = below
                .iter()
                .filter(|p| {
                    p.directed_coarsenings()
                        .iter()
                        .all(|q| q == *p || !self.contains(q))
                })
                .collect();
            match minimal.as_slice() {
                [one] => {
                    coarsest.insert(face, (*one).clone());
                }
                [first, second, ..] => {
                    return Err(ComplexError::NonUniqueCoarsest {
                        face: face.to_string(),
                        first: first.to_string(),
                        second: second.to_string(),
                    })
                }
                [] => unreachable!("a face is its own directed coarsening"),
            }
        }
        let intervals = self
            .faces
            .iter()
            .filter(|f| f.is_permutation())
            .map(|f| Interval { lower: coarsest[f].clone(), upper: f.clone() })
            .collect();
        let p = IntervalPartition { intervals };
        match self.verify_partition(&p).violation {
            None => Ok(p),
            Some(v) => Err(ComplexError::Unverified(v)),
        }
    }

    /// Exact-cover search for a partition into intervals topped by faces of
    /// the maximal block count. Always picks the uncovered face with the
    /// fewest remaining candidate intervals.
    pub fn backtrack_partition(&self) -> Result<IntervalPartition, ComplexError> {
        let top_len = self.purity()?;
        let faces: Vec<&Osp> = self.faces.iter().collect();
        let index: BTreeMap<&Osp, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();

        let mut options: Vec<(Interval, Vec<usize>)> = Vec::new();
        for top in faces.iter().filter(|f| f.len() == top_len) {
            for bottom in top.coarsenings() {
                if !self.contains(&bottom) {
                    continue;
                }
                let members = interval(&bottom, top).expect("coarsening");
                let idx: Option<Vec<usize>> = members.iter().map(|m| index.get(m).copied()).collect();
                if let Some(idx) = idx {
                    options.push((Interval { lower: bottom, upper: (*top).clone() }, idx));
                }
            }
        }
        let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); faces.len()];
        for (o, (_, idx)) in options.iter().enumerate() {
            for &i in idx {
                by_face[i].push(o);
            }
        }

        struct Search<'a> {
            options: &'a [(Interval, Vec<usize>)],
            by_face: &'a [Vec<usize>],
            covered: Vec<bool>,
            chosen: Vec<usize>,
            explored: u64,
        }

        impl Search<'_> {
            fn fits(&self, o: usize) -> bool {
                self.options[o].1.iter().all(|&i| !self.covered[i])
            }

            fn run(&mut self) -> bool {
                self.explored += 1;
                let mut best: Option<(usize, usize)> = None;
                for (face, covered) in self.covered.iter().enumerate() {
                    if *covered {
                        continue;
                    }
                    let live = self.by_face[face].iter().filter(|&&o| self.fits(o)).count();
                    if live == 0 {
                        return false;
                    }
                    if best.is_none_or(|(_, b)| live < b) {
                        best = Some((face, live));
                    }
                }
                let Some((face, _)) = best else {
                    return true;
                };
                let candidates: Vec<usize> =
                    self.by_face[face].iter().copied().filter(|&o| self.fits(o)).collect();
                for o in candidates {
                    for &i in &self.options[o].1 {
                        self.covered[i] = true;
                    }
                    self.chosen.push(o);
                    if self.run() {
                        return true;
                    }
                    self.chosen.pop();
                    for &i in &self.options[o].1 {
                        self.covered[i] = false;
                    }
                }
                false
            }
        }

        let mut search = Search {
            options: &options,
            by_face: &by_face,
            covered: vec![false; faces.len()],
            chosen: Vec::new(),
            explored: 0,
        };
        if !search.run() {
            return Err(ComplexError::NotPartitionable { explored: search.explored });
        }
        let mut intervals: Vec<Interval> =
            search.chosen.iter().map(|&o| options[o].0.clone()).collect();
        intervals.sort();
        let p = IntervalPartition { intervals };
        match self.verify_partition(&p).violation {
            None => Ok(p),
            Some(v) => Err(ComplexError::Unverified(v)),
        }
    }

    /// Checks that the intervals lie in the complex, cover every face exactly
    /// once, and are all topped by faces of the maximal block count.
    pub fn verify_partition(&self, p: &IntervalPartition) -> Verdict {
        let max_len = self.faces.iter().map(Osp::len).max().unwrap_or(0);
        let mut owner: BTreeMap<Osp, usize> = BTreeMap::new();
        for (k, iv) in p.intervals.iter().enumerate() {
            if iv.upper.len() != max_len {
                return Verdict::fail(format!(
                    "interval [{}, {}] has top with {} blocks, expected {max_len}",
                    iv.lower,
                    iv.upper,
                    iv.upper.len()
                ));
            }
            let Some(members) = interval(&iv.lower, &iv.upper) else {
                return Verdict::fail(format!("{} does not refine {}", iv.upper, iv.lower));
            };
            for m in members {
                if !self.contains(&m) {
                    return Verdict::fail(format!(
                        "face {m} of interval [{}, {}] is not in the complex",
                        iv.lower, iv.upper
                    ));
                }
                if let Some(prev) = owner.insert(m.clone(), k) {
                    let other = &p.intervals[prev];
                    return Verdict::fail(format!(
                        "face {m} lies in both [{}, {}] and [{}, {}]",
                        other.lower, other.upper, iv.lower, iv.upper
                    ));
                }
            }
        }
        if let Some(missing) = self.faces.iter().find(|f| !owner.contains_key(*f)) {
            return Verdict::fail(format!("face {missing} is not covered"));
        }
        Verdict { valid: true, violation: None }
    }
}

/// Coefficients of `(1 − t)^m`.
fn binomial_row_signed(m: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::from(1)];
    for _ in 0..m {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (i, c) in row.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        row = next;
    }
    row
}

/// Faces where `f` holds.
pub fn allowed_configuration(f: &Formula) -> PartialComplex {
    let faces = all_osps(f.n())
        .into_iter()
        .filter(|phi| f.eval_unchecked(&phi.representative()));
    PartialComplex { n: f.n(), faces: faces.collect() }
}

/// Faces where `f` fails.
pub fn forbidden_configuration(f: &Formula) -> PartialComplex {
    let faces = all_osps(f.n())
        .into_iter()
        .filter(|phi| !f.eval_unchecked(&phi.representative()));
    PartialComplex { n: f.n(), faces: faces.collect() }
}

/// `h*_j` of a verified partition. An interval whose lower end has `j`
/// blocks and whose top has `ℓ` blocks contributes `t^j (1 − t)^{n−ℓ}`,
/// which is `t^j` for permutation tops.
pub fn h_star_from_partition(p: &IntervalPartition, n: usize) -> HStarVector {
    let mut h = vec![BigInt::zero(); n + 1];
    for iv in &p.intervals {
        let j = iv.lower.len();
        for (m, c) in binomial_row_signed(n - iv.upper.len()).into_iter().enumerate() {
            h[j + m] += c;
        }
    }
    HStarVector(h)
}
