//! Counting polynomials in the binomial basis `χ(k) = Σ f_i·C(k, i)`, their
//! power-basis form, and h / h*-vectors from exact series arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::osp::Osp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("face {face} has arity {got}, expected {expected}")]
    ArityMismatch { face: String, expected: usize, got: usize },
}

/// `C(k, i)` as a big integer (zero when `i > k`).
pub fn binomial(k: u64, i: u64) -> BigInt {
    if i > k {
        return BigInt::zero();
    }
    let i = i.min(k - i);
    let mut acc = BigInt::one();
    for j in 0..i {
        acc = acc * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    acc
}

/// Stirling numbers of the second kind `S(n, i)` for `i = 0..=n`.
pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for i in 1..=m {
            let keep = if i < m { &row[i] * BigInt::from(i) } else { BigInt::zero() };
            next[i] = keep + &row[i - 1];
        }
        row = next;
    }
    row
}

/// `i!·S(n, i)`: the number of ordered set partitions of `[n]` into `i` blocks.
pub fn surjection_counts(n: usize) -> Vec<BigInt> {
    let mut fact = BigInt::one();
    stirling2_row(n)
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if i > 0 {
                fact *= BigInt::from(i);
            }
            s * &fact
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinomialPolynomial {
    n: usize,
    f: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVector(pub Vec<BigInt>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HStarVector(pub Vec<BigInt>);

impl HStarVector {
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }
}

impl BinomialPolynomial {
    /// `f` is padded or checked to length `n + 1`.
    pub fn new(n: usize, mut f: Vec<BigInt>) -> Self {
        assert!(f.len() <= n + 1, "binomial coefficients exceed degree {n}");
        f.resize(n + 1, BigInt::zero());
        BinomialPolynomial { n, f }
    }

    pub fn zero(n: usize) -> Self {
        BinomialPolynomial::new(n, Vec::new())
    }

    /// `f_i` = number of faces with `i` blocks.
    pub fn from_allowed<'a>(
        faces: impl IntoIterator<Item = &'a Osp>,
        n: usize,
    ) -> Result<Self, PolyError> {
        let mut f = vec![BigInt::zero(); n + 1];
        for face in faces {
            if face.n() != n {
                return Err(PolyError::ArityMismatch {
                    face: face.to_string(),
                    expected: n,
                    got: face.n(),
                });
            }
            f[face.len()] += 1;
        }
        Ok(BinomialPolynomial { n, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.f
    }

    pub fn evaluate(&self, k: u64) -> BigInt {
        self.f
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c * binomial(k, i as u64))
            .sum()
    }

    /// Coefficients `c_0..c_n` with `Σ c_j k^j = χ(k)`.
    pub fn power_basis(&self) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.n + 1];
        // falling factorial k(k-1)...(k-i+1), built incrementally
        let mut falling = vec![BigInt::one()];
        let mut fact = BigInt::one();
        for (i, fi) in self.f.iter().enumerate() {
            if i > 0 {
                let mut next = vec![BigInt::zero(); falling.len() + 1];
                for (j, c) in falling.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * BigInt::from(i - 1);
                }
                falling = next;
                fact *= BigInt::from(i);
            }
            if fi.is_zero() {
                continue;
            }
            for (j, c) in falling.iter().enumerate() {
                out[j] += BigRational::new(fi * c, fact.clone());
            }
        }
        out
    }

    /// First `len` values `χ(0), χ(1), …`.
    fn series(&self, len: usize) -> Vec<BigInt> {
        (0..len as u64).map(|k| self.evaluate(k)).collect()
    }

    /// Coefficients of `(1 − t)^{n+1}·(1 + t·Σ_k χ(k) t^k)`, degree ≤ n + 1.
    pub fn h_vector(&self) -> HVector {
        let len = self.n + 2;
        let mut s = vec![BigInt::one()];
        s.extend(self.series(len - 1));
        HVector(times_one_minus_t_pow(&s, self.n + 1, len))
    }

    /// Coefficients of `(1 − t)^{n+1}·Σ_k χ(k) t^k`, degree ≤ n.
    pub fn h_star_vector(&self) -> HStarVector {
        let len = self.n + 1;
        HStarVector(times_one_minus_t_pow(&self.series(len), self.n + 1, len))
    }

    /// `k^n − χ(k)`, i.e. `f_i ↦ i!·S(n, i) − f_i`.
    pub fn complement(&self) -> Self {
        let totals = surjection_counts(self.n);
        let f = totals.iter().zip(&self.f).map(|(t, c)| t - c).collect();
        BinomialPolynomial { n: self.n, f }
    }

    pub fn to_latex_binomial(&self) -> String {
        let terms: Vec<(BigRational, String)> = self
            .f
            .iter()
            .enumerate()
            .map(|(i, c)| (BigRational::from_integer(c.clone()), format!("\\binom{{k}}{{{i}}}")))
            .collect();
        latex_sum(&terms)
    }

    pub fn to_latex_power(&self) -> String {
        let terms: Vec<(BigRational, String)> = self
            .power_basis()
            .into_iter()
            .enumerate()
            .map(|(j, c)| {
                let mono = match j {
                    0 => String::new(),
                    1 => "k".to_string(),
                    _ => format!("k^{{{j}}}"),
                };
                (c, mono)
            })
            .rev()
            .collect();
        latex_sum(&terms)
    }

    pub fn to_text_power(&self) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.power_basis().into_iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => "k".into(),
                _ => format!("k^{j}"),
            };
            parts.push(signed_term(&c, &mono, |c| c.to_string(), parts.is_empty()));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.concat()
        }
    }
}

fn signed_term(c: &BigRational, mono: &str, show: impl Fn(&BigRational) -> String, first: bool) -> String {
    let sign = if c.is_negative() {
        if first { "-" } else { " - " }
    } else if first {
        ""
    } else {
        " + "
    };
    let mag = c.abs();
    let coeff = if mag.is_one() && !mono.is_empty() { String::new() } else { show(&mag) };
    let sep = if !coeff.is_empty() && !mono.is_empty() && !coeff.starts_with('\\') { "*" } else { "" };
    format!("{sign}{coeff}{sep}{mono}")
}

fn latex_sum(terms: &[(BigRational, String)]) -> String {
    let mut parts = Vec::new();
    for (c, mono) in terms {
        if c.is_zero() {
            continue;
        }
        let show = |c: &BigRational| {
            if c.is_integer() {
                c.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
            }
        };
        parts.push(signed_term(c, mono, show, parts.is_empty()).replace('*', ""));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.concat()
    }
}

/// Truncated product `s(t)·(1 − t)^e` keeping the first `len` coefficients.
fn times_one_minus_t_pow(s: &[BigInt], e: usize, len: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = s.iter().take(len).cloned().collect();
    out.resize(len, BigInt::zero());
    for _ in 0..e {
        for i in (1..len).rev() {
            let prev = out[i - 1].clone();
            out[i] -= prev;
        }
    }
    out
}

impl fmt::Display for BinomialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = signed_term(
                &BigRational::from_integer(c.clone()),
                &format!("C(k,{i})"),
                |c| c.to_string(),
                first,
            );
            f.write_str(&term)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn worked() -> BinomialPolynomial {
        BinomialPolynomial::new(3, big(&[0, 0, 2, 1]))
    }

    #[test]
    fn from_allowed_counts_lengths() {
        let faces: Vec<Osp> = ["1|23", "3|12", "2|1|3"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(BinomialPolynomial::from_allowed(&faces, 3).unwrap(), worked());
        assert_eq!(
            BinomialPolynomial::from_allowed(std::iter::empty(), 3).unwrap(),
            BinomialPolynomial::zero(3)
        );
        assert!(BinomialPolynomial::from_allowed(&faces, 4).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(worked().evaluate(3), BigInt::from(7));
        assert_eq!(worked().evaluate(2), BigInt::from(2));
        assert_eq!(worked().evaluate(0), BigInt::zero());
    }

    #[test]
    fn power_basis_examples() {
        let k3 = BinomialPolynomial::new(3, big(&[0, 0, 0, 6]));
        assert_eq!(k3.power_basis(), vec![rat(0, 1), rat(2, 1), rat(-3, 1), rat(1, 1)]);
        assert_eq!(BinomialPolynomial::new(1, big(&[0, 1])).power_basis(), vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(worked().power_basis(), vec![rat(0, 1), rat(-4, 6), rat(3, 6), rat(1, 6)]);
        assert_eq!(k3.to_text_power(), "k^3 - 3*k^2 + 2*k");
    }

    #[test]
    fn h_vectors() {
        assert_eq!(BinomialPolynomial::zero(2).h_vector().0, big(&[1, -3, 3, -1]));
        let squares = BinomialPolynomial::new(2, big(&[0, 1, 2]));
        assert_eq!(squares.h_vector().0, big(&[1, -3, 4, 0]));
        assert_eq!(worked().h_star_vector().0, big(&[0, 0, 2, -1]));
        let v = BinomialPolynomial::new(3, big(&[0, 0, 1, 2]));
        assert_eq!(v.h_star_vector().0, big(&[0, 0, 1, 1]));
        assert_eq!(BinomialPolynomial::zero(3).h_star_vector().0, big(&[0, 0, 0, 0]));
    }

    #[test]
    fn complement_examples() {
        let all = BinomialPolynomial::new(3, surjection_counts(3));
        assert_eq!(all.complement(), BinomialPolynomial::zero(3));
        assert_eq!(worked().complement().coeffs(), big(&[0, 1, 4, 5]).as_slice());
        assert_eq!(worked().complement().complement(), worked());
    }

    #[test]
    fn stirling_rows() {
        assert_eq!(stirling2_row(4), big(&[0, 1, 7, 6, 1]));
        assert_eq!(surjection_counts(3), big(&[0, 1, 6, 6]));
        assert_eq!(stirling2_row(0), big(&[1]));
    }

    #[test]
    fn latex_forms() {
        assert_eq!(worked().to_latex_binomial(), "2\\binom{k}{2} + \\binom{k}{3}");
        assert_eq!(worked().to_latex_power(), "\\frac{1}{6}k^{3} + \\frac{1}{2}k^{2} - \\frac{2}{3}k");
        assert_eq!(worked().to_string(), "2*C(k,2) + C(k,3)");
    }
}
