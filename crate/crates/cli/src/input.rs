use std::fmt;

use sched_core::complex::{allowed_configuration, forbidden_configuration, PartialComplex};
use sched_core::generators::complex_formula;
use sched_core::oracle::DEFAULT_BUDGET;
use sched_core::{Formula, Osp};
use serde::Deserialize;

use crate::Source;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Check(String),
    NotApplicable(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Check(_) => 2,
            CliError::NotApplicable(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::NotApplicable(m) => write!(f, "not applicable: {m}"),
        }
    }
}

pub fn input_err(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// What the user handed us: a formula, or a complex given by its faces.
pub enum Problem {
    Formula(Formula),
    Complex(PartialComplex),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInput {
    Formula { n: Option<usize>, formula: String },
    Complex { n: usize, faces: Vec<Osp> },
}

impl Problem {
    pub fn load(src: &Source) -> Result<Problem, CliError> {
        let text = match (&src.expr, &src.file) {
            (Some(e), None) => e.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            _ => return Err(CliError::Input("exactly one of --expr and --file is required".into())),
        };
        if src.expr.is_none() && text.trim_start().starts_with('{') {
            let parsed: JsonInput = serde_json::from_str(&text).map_err(input_err)?;
            return match parsed {
                JsonInput::Formula { n, formula } => {
                    Ok(Problem::Formula(Formula::parse(&formula, src.n.or(n)).map_err(input_err)?))
                }
                JsonInput::Complex { n, faces } => {
                    if src.n.is_some_and(|m| m != n) {
                        return Err(CliError::Input(format!("--n disagrees with the file's n = {n}")));
                    }
                    Ok(Problem::Complex(PartialComplex::new(n, faces).map_err(input_err)?))
                }
            };
        }
        Ok(Problem::Formula(Formula::parse(&text, src.n).map_err(input_err)?))
    }

    pub fn n(&self) -> usize {
        match self {
            Problem::Formula(f) => f.n(),
            Problem::Complex(c) => c.n(),
        }
    }

    /// The formula whose solutions are the faces under study, honoring
    /// `--complement`.
    pub fn formula(&self, complement: bool) -> Formula {
        let base = match self {
            Problem::Formula(f) => f.clone(),
            Problem::Complex(c) => complex_formula(c),
        };
        if complement {
            Formula::new(sched_core::Expr::not(base.expr().clone()), Some(base.n()))
                .expect("negation keeps the arity")
        } else {
            base
        }
    }

    pub fn complex(&self, complement: bool) -> PartialComplex {
        match (self, complement) {
            (Problem::Formula(f), false) => allowed_configuration(f),
            (Problem::Formula(f), true) => forbidden_configuration(f),
            (Problem::Complex(c), false) => c.clone(),
            (Problem::Complex(c), true) => {
                let faces = sched_core::osp::all_osps(c.n()).into_iter().filter(|phi| !c.contains(phi));
                PartialComplex::new(c.n(), faces).expect("same arity")
            }
        }
    }
}

pub fn budget() -> Result<u64, CliError> {
    match std::env::var("SCHED_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("SCHED_BUDGET is not a nonnegative integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}
