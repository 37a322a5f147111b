//! Scheduling quasisymmetric functions.
//!
//! Non-commutative functions are finitely supported maps from ordered set
//! partitions to integers; commutative ones are indexed by compositions.
//! Every function carries an explicit [`Basis`] tag and conversions refuse
//! input in the wrong basis.
//!
//! Conventions:
//! - `L_Φ = Σ_{Φ ⪯ Ψ} M_Ψ`, the sum over directed refinements `[Φ, Φ̂]`.
//! - `N_Φ = Σ M_Ψ` over reversed directed coarsenings of `Φ` (merge adjacent
//!   blocks when `min(left) > max(right)`).
//! - `L_α = Σ_{β refines α} M_β` and `N_α = Σ_{β coarsens α} M_β`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{IntervalPartition, PartialComplex};
use crate::formula::Formula;
use crate::osp::{all_osps, interval, Composition, Osp};
use crate::poly::binomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSymError {
    #[error("expected a function in the {expected} basis, got {got}")]
    WrongBasis { expected: Basis, got: Basis },
    #[error("index {index} has arity {got}, expected {expected}")]
    ArityMismatch { index: String, expected: usize, got: usize },
    #[error("interval partition is not valid for this complex: {0}")]
    Unverified(String),
    #[error("generating-system terms need permutation tops; {0} has fewer than n blocks")]
    NotFullDimensional(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Fundamental,
    Cofundamental,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Monomial => "monomial",
            Basis::Fundamental => "fundamental",
            Basis::Cofundamental => "cofundamental",
        })
    }
}

fn require(got: Basis, expected: Basis) -> Result<(), QSymError> {
    if got == expected {
        Ok(())
    } else {
        Err(QSymError::WrongBasis { expected, got })
    }
}

/// A non-commutative quasisymmetric function of arity `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcQSym {
    n: usize,
    basis: Basis,
    coeffs: BTreeMap<Osp, i64>,
}

impl NcQSym {
    pub fn zero(n: usize, basis: Basis) -> Self {
        NcQSym { n, basis, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(
        n: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = (Osp, i64)>,
    ) -> Result<Self, QSymError> {
        let mut f = NcQSym::zero(n, basis);
        for (index, c) in terms {
            if index.n() != n {
                return Err(QSymError::ArityMismatch {
                    index: index.to_string(),
                    expected: n,
                    got: index.n(),
                });
            }
            f.add(index, c);
        }
        Ok(f)
    }

    fn add(&mut self, index: Osp, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.coeffs.entry(index.clone()).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coeffs.remove(&index);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeff(&self, index: &Osp) -> i64 {
        self.coeffs.get(index).copied().unwrap_or(0)
    }

    /// Nonzero terms in canonical key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Osp, i64)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Rewrites in the monomial basis.
    pub fn to_monomial(&self) -> NcQSym {
        let support = |phi: &Osp| -> Vec<Osp> {
            match self.basis {
                Basis::Monomial => vec![phi.clone()],
                Basis::Fundamental => phi.directed_refinements(),
                Basis::Cofundamental => phi.reversed_directed_coarsenings(),
            }
        };
        let mut out = NcQSym::zero(self.n, Basis::Monomial);
        for (phi, c) in &self.coeffs {
            for psi in support(phi) {
                out.add(psi, *c);
            }
        }
        out
    }
}

fn sign(diff: usize) -> i64 {
    if diff.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Σ M_Φ` over the ordered set partitions solving `f`.
pub fn scheduling_ncqsym(f: &Formula) -> NcQSym {
    let mut out = NcQSym::zero(f.n(), Basis::Monomial);
    for phi in all_osps(f.n()) {
        if f.eval_unchecked(&phi.representative()) {
            out.coeffs.insert(phi, 1);
        }
    }
    out
}

/// `Σ M_Φ` over the faces of a complex.
pub fn complex_ncqsym(c: &PartialComplex) -> NcQSym {
    NcQSym {
        n: c.n(),
        basis: Basis::Monomial,
        coeffs: c.faces().iter().map(|phi| (phi.clone(), 1)).collect(),
    }
}

/// Möbius inversion over directed refinement: the intervals are boolean,
/// so `c_Ψ = Σ_{Φ ⪯ Ψ} (−1)^{ℓ(Ψ)−ℓ(Φ)} m_Φ`.
pub fn nc_fundamental(f: &NcQSym) -> Result<NcQSym, QSymError> {
    require(f.basis, Basis::Monomial)?;
    let mut out = NcQSym::zero(f.n, Basis::Fundamental);
    // c_Ψ is nonzero only if some directed coarsening of Ψ is in the support,
    // so it is enough to visit directed refinements of the support.
    let candidates: BTreeSet<Osp> = f.coeffs.keys().flat_map(Osp::directed_refinements).collect();
    for psi in candidates {
        let c: i64 = psi
            .directed_coarsenings()
            .iter()
            .map(|phi| sign(psi.len() - phi.len()) * f.coeff(phi))
            .sum();
        out.add(psi, c);
    }
    Ok(out)
}

/// Inversion for `N_Φ = Σ_{Ψ ∈ rdc(Φ)} M_Ψ`. Here `m_Ψ` collects `c_Φ` from
/// the finer side, so `c_Ψ = Σ_{Φ: Ψ ∈ rdc(Φ)} (−1)^{ℓ(Φ)−ℓ(Ψ)} m_Φ`.
pub fn nc_cofundamental(f: &NcQSym) -> Result<NcQSym, QSymError> {
    require(f.basis, Basis::Monomial)?;
    let mut out = NcQSym::zero(f.n, Basis::Cofundamental);
    let candidates: BTreeSet<Osp> = f
        .coeffs
        .keys()
        .flat_map(Osp::reversed_directed_coarsenings)
        .collect();
    for psi in candidates {
        let c: i64 = psi
            .reversed_directed_refinements()
            .iter()
            .map(|phi| sign(phi.len() - psi.len()) * f.coeff(phi))
            .sum();
        out.add(psi, c);
    }
    Ok(out)
}

/// A commutative quasisymmetric function, homogeneous of degree `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSym {
    n: usize,
    basis: Basis,
    coeffs: BTreeMap<Composition, i64>,
}

impl QSym {
    pub fn zero(n: usize, basis: Basis) -> Self {
        QSym { n, basis, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(
        n: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = (Composition, i64)>,
    ) -> Result<Self, QSymError> {
        let mut f = QSym::zero(n, basis);
        for (alpha, c) in terms {
            if alpha.size() != n || alpha.parts().contains(&0) {
                return Err(QSymError::ArityMismatch {
                    index: alpha.to_string(),
                    expected: n,
                    got: alpha.size(),
                });
            }
            f.add(alpha, c);
        }
        Ok(f)
    }

    fn add(&mut self, alpha: Composition, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.coeffs.entry(alpha.clone()).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coeffs.remove(&alpha);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeff(&self, alpha: &Composition) -> i64 {
        self.coeffs.get(alpha).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Composition, i64)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_monomial(&self) -> QSym {
        let mut out = QSym::zero(self.n, Basis::Monomial);
        for (alpha, c) in &self.coeffs {
            let support = match self.basis {
                Basis::Monomial => vec![alpha.clone()],
                Basis::Fundamental => alpha.refinements(),
                Basis::Cofundamental => alpha.coarsenings(),
            };
            for beta in support {
                out.add(beta, *c);
            }
        }
        out
    }
}

/// Type map: lets the variables commute.
pub fn to_qsym(f: &NcQSym) -> Result<QSym, QSymError> {
    require(f.basis, Basis::Monomial)?;
    let mut out = QSym::zero(f.n, Basis::Monomial);
    for (phi, c) in &f.coeffs {
        out.add(phi.type_of(), *c);
    }
    Ok(out)
}

/// `λ_β = Σ_{α coarsens β} (−1)^{ℓ(β)−ℓ(α)} m_α`.
pub fn qsym_fundamental(f: &QSym) -> Result<QSym, QSymError> {
    require(f.basis, Basis::Monomial)?;
    let mut out = QSym::zero(f.n, Basis::Fundamental);
    let candidates: BTreeSet<Composition> =
        f.coeffs.keys().flat_map(Composition::refinements).collect();
    for beta in candidates {
        let c: i64 = beta
            .coarsenings()
            .iter()
            .map(|alpha| sign(beta.len() - alpha.len()) * f.coeff(alpha))
            .sum();
        out.add(beta, c);
    }
    Ok(out)
}

/// `[N_α] = Σ_{β refines α} (−1)^{ℓ(β)−ℓ(α)} m_β`.
pub fn qsym_cofundamental(f: &QSym) -> Result<QSym, QSymError> {
    require(f.basis, Basis::Monomial)?;
    let mut out = QSym::zero(f.n, Basis::Cofundamental);
    let candidates: BTreeSet<Composition> =
        f.coeffs.keys().flat_map(Composition::coarsenings).collect();
    for alpha in candidates {
        let c: i64 = alpha
            .refinements()
            .iter()
            .map(|beta| sign(beta.len() - alpha.len()) * f.coeff(beta))
            .sum();
        out.add(alpha, c);
    }
    Ok(out)
}

/// `F(1^k) = Σ coeff(Φ)·C(k, ℓ(Φ))` for a monomial-basis function.
pub fn specialize(f: &NcQSym, k: u64) -> Result<num_bigint::BigInt, QSymError> {
    require(f.basis, Basis::Monomial)?;
    Ok(f.coeffs
        .iter()
        .map(|(phi, &c)| binomial(k, phi.len() as u64) * c)
        .sum())
}

pub fn specialize_qsym(f: &QSym, k: u64) -> Result<num_bigint::BigInt, QSymError> {
    require(f.basis, Basis::Monomial)?;
    Ok(f.coeffs
        .iter()
        .map(|(alpha, &c)| binomial(k, alpha.len() as u64) * c)
        .sum())
}

/// Terms `L_(Φc;Φf) = Σ_{Φc ≤ Φ ≤ Φf} M_Φ` of the fundamental generating
/// system, with every `Φf` a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairExpansion {
    pub n: usize,
    pub terms: Vec<(Osp, Osp)>,
}

impl PairExpansion {
    pub fn to_monomial(&self) -> NcQSym {
        let mut out = NcQSym::zero(self.n, Basis::Monomial);
        for (lower, upper) in &self.terms {
            for phi in interval(lower, upper).expect("pair is comparable") {
                out.add(phi, 1);
            }
        }
        out
    }
}

/// One generating-system term per interval of a verified partition.
pub fn pair_expansion_from_partition(
    c: &PartialComplex,
    p: &IntervalPartition,
) -> Result<PairExpansion, QSymError> {
    let verdict = c.verify_partition(p);
    if let Some(v) = verdict.violation {
        return Err(QSymError::Unverified(v));
    }
    let mut terms = Vec::with_capacity(p.intervals.len());
    for iv in &p.intervals {
        if !iv.upper.is_permutation() {
            return Err(QSymError::NotFullDimensional(iv.upper.to_string()));
        }
        terms.push((iv.lower.clone(), iv.upper.clone()));
    }
    terms.sort();
    Ok(PairExpansion { n: c.n(), terms })
}

/// Exhaustive search for a 0-1 combination of generating-system terms equal
/// to `f`. Works directly on monomial coefficients and scans uncovered
/// indices in canonical order.
pub fn zero_one_generating_representation(f: &NcQSym) -> Result<Option<PairExpansion>, QSymError> {
    require(f.basis, Basis::Monomial)?;
    if f.coeffs.values().any(|&c| c != 1) {
        return Ok(None);
    }
    let support: Vec<&Osp> = f.coeffs.keys().collect();
    let index_of: BTreeMap<&Osp, usize> = support.iter().enumerate().map(|(i, p)| (*p, i)).collect();

    // every usable term, with its support as indices
    let mut terms: Vec<((Osp, Osp), Vec<usize>)> = Vec::new();
    for top in support.iter().filter(|p| p.is_permutation()) {
        for bottom in top.coarsenings() {
            let members = interval(&bottom, top).expect("coarsening");
            let idx: Option<Vec<usize>> = members.iter().map(|m| index_of.get(m).copied()).collect();
            if let Some(idx) = idx {
                terms.push(((bottom, (*top).clone()), idx));
            }
        }
    }
    let mut by_member: Vec<Vec<usize>> = vec![Vec::new(); support.len()];
    for (t, (_, idx)) in terms.iter().enumerate() {
        for &i in idx {
            by_member[i].push(t);
        }
    }

    fn search(
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        terms: &[((Osp, Osp), Vec<usize>)],
        by_member: &[Vec<usize>],
    ) -> bool {
        let Some(first) = covered.iter().position(|c| !c) else {
            return true;
        };
        for &t in &by_member[first] {
            let idx = &terms[t].1;
            if idx.iter().any(|&i| covered[i]) {
                continue;
            }
            idx.iter().for_each(|&i| covered[i] = true);
            chosen.push(t);
            if search(covered, chosen, terms, by_member) {
                return true;
            }
            chosen.pop();
            idx.iter().for_each(|&i| covered[i] = false);
        }
        false
    }

    let mut covered = vec![false; support.len()];
    let mut chosen = Vec::new();
    if !search(&mut covered, &mut chosen, &terms, &by_member) {
        return Ok(None);
    }
    let mut pairs: Vec<(Osp, Osp)> = chosen.into_iter().map(|t| terms[t].0.clone()).collect();
    pairs.sort();
    Ok(Some(PairExpansion { n: f.n, terms: pairs }))
}

#[derive(Serialize)]
struct JsonTerm<K> {
    index: K,
    coeff: i64,
}

#[derive(Serialize)]
struct JsonFunction<K> {
    basis: Basis,
    terms: Vec<JsonTerm<K>>,
}

impl Serialize for NcQSym {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        JsonFunction {
            basis: self.basis,
            terms: self.terms().map(|(k, c)| JsonTerm { index: k.clone(), coeff: c }).collect(),
        }
        .serialize(s)
    }
}

impl Serialize for QSym {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        JsonFunction {
            basis: self.basis,
            terms: self.terms().map(|(k, c)| JsonTerm { index: k.clone(), coeff: c }).collect(),
        }
        .serialize(s)
    }
}

fn letter(basis: Basis) -> &'static str {
    match basis {
        Basis::Monomial => "M",
        Basis::Fundamental => "L",
        Basis::Cofundamental => "N",
    }
}

fn write_terms<K: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    basis: Basis,
    terms: impl Iterator<Item = (K, i64)>,
) -> fmt::Result {
    let mut first = true;
    for (k, c) in terms {
        let sign = match (c < 0, first) {
            (true, true) => "-",
            (true, false) => " - ",
            (false, true) => "",
            (false, false) => " + ",
        };
        let mag = c.unsigned_abs();
        let coeff = if mag == 1 { String::new() } else { format!("{mag}*") };
        write!(f, "{sign}{coeff}{}[{k}]", letter(basis))?;
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for NcQSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.basis, self.terms())
    }
}

impl fmt::Display for QSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.basis, self.terms())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osp(s: &str) -> Osp {
        s.parse().unwrap()
    }

    fn nc(n: usize, basis: Basis, terms: &[(&str, i64)]) -> NcQSym {
        NcQSym::from_terms(n, basis, terms.iter().map(|(s, c)| (osp(s), *c))).unwrap()
    }

    fn comp(parts: &[usize]) -> Composition {
        Composition(parts.to_vec())
    }

    #[test]
    fn worked_example_function() {
        let f = Formula::parse("x1 < x2 = x3 or x3 < x1 = x2 or x2 < x1 < x3", None).unwrap();
        let s = scheduling_ncqsym(&f);
        assert_eq!(s, nc(3, Basis::Monomial, &[("1|23", 1), ("3|12", 1), ("2|1|3", 1)]));
        let q = to_qsym(&s).unwrap();
        assert_eq!(q.coeff(&comp(&[1, 2])), 2);
        assert_eq!(q.coeff(&comp(&[1, 1, 1])), 1);
        assert_eq!(specialize(&s, 3).unwrap(), 7.into());
        assert_eq!(specialize(&s, 0).unwrap(), 0.into());
        assert_eq!(specialize_qsym(&q, 3).unwrap(), 7.into());
    }

    #[test]
    fn unsatisfiable_and_tautology() {
        let none = Formula::parse("x1 < x2 and x2 < x1", None).unwrap();
        assert!(scheduling_ncqsym(&none).is_zero());
        let all = Formula::parse("x1 <= x1", Some(2)).unwrap();
        assert_eq!(
            scheduling_ncqsym(&all),
            nc(2, Basis::Monomial, &[("12", 1), ("1|2", 1), ("2|1", 1)])
        );
    }

    #[test]
    fn single_monomial_type() {
        let m = nc(4, Basis::Monomial, &[("13|24", 1)]);
        let q = to_qsym(&m).unwrap();
        assert_eq!(q.terms().collect::<Vec<_>>(), vec![(&comp(&[2, 2]), 1)]);
        assert_eq!(specialize(&m, 3).unwrap(), 3.into());
    }

    #[test]
    fn nc_fundamental_examples() {
        let f = nc(3, Basis::Monomial, &[("1|2|3", 1), ("1|23", 1), ("1|3|2", 1)]);
        let l = nc_fundamental(&f).unwrap();
        assert_eq!(l, nc(3, Basis::Fundamental, &[("1|23", 1), ("1|3|2", 1)]));
        assert_eq!(l.to_monomial(), f);

        let anti = nc(2, Basis::Monomial, &[("12", 1), ("1|2", 1), ("2|1", 1)]);
        let l = nc_fundamental(&anti).unwrap();
        assert_eq!(l, nc(2, Basis::Fundamental, &[("12", 1), ("2|1", 1)]));
        assert_eq!(l.to_monomial(), anti);

        let single = nc(2, Basis::Monomial, &[("2|1", 1)]);
        assert_eq!(nc_fundamental(&single).unwrap(), nc(2, Basis::Fundamental, &[("2|1", 1)]));
    }

    #[test]
    fn qsym_fundamental_examples() {
        let m2 = QSym::from_terms(2, Basis::Monomial, [(comp(&[2]), 1)]).unwrap();
        let l = qsym_fundamental(&m2).unwrap();
        assert_eq!(l.coeff(&comp(&[2])), 1);
        assert_eq!(l.coeff(&comp(&[1, 1])), -1);
        assert_eq!(l.to_monomial(), m2);
        assert!(qsym_fundamental(&QSym::zero(3, Basis::Monomial)).unwrap().is_zero());
    }

    #[test]
    fn cofundamental_examples() {
        let flags = QSym::from_terms(2, Basis::Monomial, [(comp(&[1, 1]), 2), (comp(&[2]), 1)]).unwrap();
        let n = qsym_cofundamental(&flags).unwrap();
        assert_eq!(n.coeff(&comp(&[1, 1])), 2);
        assert_eq!(n.coeff(&comp(&[2])), -1);
        assert_eq!(n.to_monomial(), flags);

        let m12 = nc(2, Basis::Monomial, &[("12", 1)]);
        let q = qsym_cofundamental(&to_qsym(&m12).unwrap()).unwrap();
        assert_eq!(q.terms().collect::<Vec<_>>(), vec![(&comp(&[2]), 1)]);
        let nn = nc_cofundamental(&m12).unwrap();
        assert_eq!(nn.to_monomial(), m12);
        assert!(nc_cofundamental(&NcQSym::zero(2, Basis::Monomial)).unwrap().is_zero());

        let m21 = nc(2, Basis::Monomial, &[("2|1", 1)]);
        let nn = nc_cofundamental(&m21).unwrap();
        assert_eq!(nn, nc(2, Basis::Cofundamental, &[("12", -1), ("2|1", 1)]));
        assert_eq!(nn.to_monomial(), m21);
    }

    #[test]
    fn wrong_basis_is_rejected() {
        let l = nc(2, Basis::Fundamental, &[("12", 1)]);
        assert_eq!(
            nc_fundamental(&l),
            Err(QSymError::WrongBasis { expected: Basis::Monomial, got: Basis::Fundamental })
        );
        assert!(to_qsym(&l).is_err());
        assert!(specialize(&l, 2).is_err());
    }

    #[test]
    fn generating_representation_examples() {
        let f = nc(3, Basis::Monomial, &[("1|2|3", 1), ("1|23", 1), ("1|3|2", 1)]);
        let rep = zero_one_generating_representation(&f).unwrap().unwrap();
        assert_eq!(rep.to_monomial(), f);
        // {12} alone cannot be written with permutation tops
        let g = nc(2, Basis::Monomial, &[("12", 1)]);
        assert_eq!(zero_one_generating_representation(&g).unwrap(), None);
        let h = nc(2, Basis::Monomial, &[("1|2", 2)]);
        assert_eq!(zero_one_generating_representation(&h).unwrap(), None);
    }

    #[test]
    fn display_forms() {
        let f = nc(3, Basis::Fundamental, &[("1|23", 1), ("1|3|2", -2)]);
        assert_eq!(f.to_string(), "L[1|23] - 2*L[1|3|2]");
        assert_eq!(NcQSym::zero(2, Basis::Monomial).to_string(), "0");
    }
}
