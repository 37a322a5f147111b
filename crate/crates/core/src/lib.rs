//! Exact combinatorics of scheduling problems.
//!
//! A scheduling problem on `n` items is a boolean formula over atoms
//! `x_i <= x_j`. Its solutions are governed by the finitely many order
//! classes (ordered set partitions of `[n]`) it accepts, which in turn give
//! a counting polynomial, h- and h*-vectors and quasisymmetric expansions.

pub mod complex;
pub mod formula;
pub mod generators;
pub mod oracle;
pub mod osp;
pub mod poly;
pub mod qsym;

pub use complex::{IntervalPartition, PartialComplex};
pub use formula::{Expr, Formula, Ineq, Rel};
pub use osp::{Composition, Osp};
pub use poly::BinomialPolynomial;
