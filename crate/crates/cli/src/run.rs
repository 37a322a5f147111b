use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use sched_core::complex::{h_star_from_partition, ComplexError, IntervalPartition, PartialComplex};
use sched_core::formula::{analyze_cell, cells, to_decision_tree};
use sched_core::generators::{
    chromatic, flags_problem, lattice_of_flats, order_polynomial, p_partition, Graph, LabeledPoset, Matroid,
    Poset, SetLattice,
};
use sched_core::oracle::{count_points, solving_classes};
use sched_core::qsym::{
    complex_ncqsym, nc_cofundamental, nc_fundamental, qsym_cofundamental, qsym_fundamental, specialize,
    specialize_qsym, to_qsym, Basis,
};
use sched_core::{BinomialPolynomial, Formula, Osp};

use crate::input::{budget, input_err, CliError, Problem};
use crate::{BasisArg, Command, Format, GenKind, Method, Source, Which};

type Out = Result<String, CliError>;

pub fn run(cmd: Command) -> Out {
    match cmd {
        Command::Poly { src, kmax } => poly(&src, kmax),
        Command::Count { src, k, kmax } => count(&src, k, kmax),
        Command::Hvec { src, which } => hvec(&src, which),
        Command::Qsym { src, basis } => qsym(&src, basis),
        Command::Ncqsym { src, basis } => ncqsym(&src, basis),
        Command::Cells { src } => cells_cmd(&src),
        Command::Partition { src, method } => partition(&src, method),
        Command::Gen { kind, file, format } => generate(kind, &file, format),
        Command::Verify { src, partition } => verify(&src, partition.as_deref()),
    }
}

/// Integers that fit in i64 become JSON numbers, larger ones strings.
fn big(b: &BigInt) -> Value {
    i64::try_from(b).map(Value::from).unwrap_or_else(|_| Value::String(b.to_string()))
}

fn bigs(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big).collect())
}

/// Canonical JSON: keys sorted, no insignificant whitespace.
fn emit_json(v: &impl Serialize) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    format!("{value}\n")
}

fn bracket(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn polynomial(p: &PartialComplex) -> BinomialPolynomial {
    BinomialPolynomial::from_allowed(p.faces(), p.n()).expect("faces share the complex arity")
}

fn oracle_count(f: &Formula, k: u64) -> Result<BigInt, CliError> {
    count_points(f, k, budget()?).map(BigInt::from).map_err(input_err)
}

fn check_counts(engine: &BinomialPolynomial, f: &Formula, ks: impl IntoIterator<Item = u64>) -> Result<(), CliError> {
    for k in ks {
        let (mine, theirs) = (engine.evaluate(k), oracle_count(f, k)?);
        if mine != theirs {
            return Err(CliError::Check(format!("k = {k}: engine {mine}, oracle {theirs}")));
        }
    }
    Ok(())
}

fn check_classes(c: &PartialComplex, f: &Formula) -> Result<(), CliError> {
    let oracle = solving_classes(f);
    if &oracle != c.faces() {
        let extra: Vec<String> = c.faces().difference(&oracle).map(Osp::to_string).collect();
        let missing: Vec<String> = oracle.difference(c.faces()).map(Osp::to_string).collect();
        return Err(CliError::Check(format!(
            "solving classes differ: engine only {extra:?}, oracle only {missing:?}"
        )));
    }
    Ok(())
}

fn poly(src: &Source, kmax: u64) -> Out {
    let problem = Problem::load(src)?;
    let p = polynomial(&problem.complex(src.complement));
    if src.check {
        check_counts(&p, &problem.formula(src.complement), 0..=kmax)?;
    }
    Ok(match src.format {
        Format::Text => format!("binomial {}\npower {}\n", bracket(p.coeffs()), p.to_text_power()),
        Format::Latex => format!("{}\n{}\n", p.to_latex_binomial(), p.to_latex_power()),
        Format::Json => {
            let power: Vec<String> = p.power_basis().iter().map(ToString::to_string).collect();
            emit_json(&json!({ "n": p.n(), "binomial": bigs(p.coeffs()), "power": power }))
        }
    })
}

fn count(src: &Source, k: Option<u64>, kmax: Option<u64>) -> Out {
    let problem = Problem::load(src)?;
    let p = polynomial(&problem.complex(src.complement));
    let ks: Vec<u64> = match (k, kmax) {
        (Some(k), None) => vec![k],
        (None, Some(m)) => (0..=m).collect(),
        _ => return Err(CliError::Input("give exactly one of --k and --kmax".into())),
    };
    if src.check {
        check_counts(&p, &problem.formula(src.complement), ks.iter().copied())?;
    }
    let rows: Vec<(u64, BigInt)> = ks.iter().map(|&k| (k, p.evaluate(k))).collect();
    Ok(match (src.format, k.is_some()) {
        (Format::Json, true) => emit_json(&json!({ "k": rows[0].0, "count": big(&rows[0].1) })),
        (Format::Json, false) => emit_json(&Value::Array(
            rows.iter().map(|(k, c)| json!({ "k": k, "count": big(c) })).collect(),
        )),
        (_, true) => format!("{}\n", rows[0].1),
        (_, false) => rows.iter().map(|(k, c)| format!("{k} {c}\n")).collect(),
    })
}

fn hvec(src: &Source, which: Which) -> Out {
    let problem = Problem::load(src)?;
    let complex = problem.complex(src.complement);
    let p = polynomial(&complex);
    let (name, series, combinatorial) = match which {
        Which::H => ("h", p.h_vector().0, complex.h_vector().0),
        Which::Hstar => ("hstar", p.h_star_vector().0, complex.h_star_vector().0),
    };
    if src.check {
        if series != combinatorial {
            return Err(CliError::Check(format!(
                "series {} and f-vector {} routes disagree",
                bracket(&series),
                bracket(&combinatorial)
            )));
        }
        let f = problem.formula(src.complement);
        check_classes(&complex, &f)?;
        check_counts(&p, &f, 0..=(problem.n() as u64 + 1).min(6))?;
    }
    Ok(match src.format {
        Format::Text => format!("{name} {}\n", bracket(&series)),
        Format::Latex => {
            let parts: Vec<String> = series.iter().map(BigInt::to_string).collect();
            format!("\\left({}\\right)\n", parts.join(", "))
        }
        Format::Json => emit_json(&json!({ "which": name, "vector": bigs(&series) })),
    })
}

fn basis(b: BasisArg) -> Basis {
    match b {
        BasisArg::Monomial => Basis::Monomial,
        BasisArg::Fundamental => Basis::Fundamental,
        BasisArg::Cofundamental => Basis::Cofundamental,
    }
}

fn letter(b: Basis) -> &'static str {
    match b {
        Basis::Monomial => "M",
        Basis::Fundamental => "L",
        Basis::Cofundamental => "N",
    }
}

fn latex_terms<K: std::fmt::Display>(b: Basis, terms: impl Iterator<Item = (K, i64)>) -> String {
    let mut out = String::new();
    for (i, (key, c)) in terms.enumerate() {
        let sign = match (c < 0, i == 0) {
            (true, true) => "-",
            (true, false) => " - ",
            (false, true) => "",
            (false, false) => " + ",
        };
        let mag = c.unsigned_abs();
        let coeff = if mag == 1 { String::new() } else { format!("{mag} ") };
        let _ = write!(out, "{sign}{coeff}{}_{{{key}}}", letter(b));
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push('\n');
    out
}

fn check_specialization(
    special: impl Fn(u64) -> BigInt,
    problem: &Problem,
    src: &Source,
) -> Result<(), CliError> {
    let f = problem.formula(src.complement);
    for k in 0..=(problem.n() as u64 + 1).min(6) {
        let (mine, theirs) = (special(k), oracle_count(&f, k)?);
        if mine != theirs {
            return Err(CliError::Check(format!("specialization at k = {k}: {mine}, oracle {theirs}")));
        }
    }
    Ok(())
}

fn qsym(src: &Source, b: BasisArg) -> Out {
    let problem = Problem::load(src)?;
    let mono = to_qsym(&complex_ncqsym(&problem.complex(src.complement))).expect("monomial input");
    let g = match basis(b) {
        Basis::Monomial => mono.clone(),
        Basis::Fundamental => qsym_fundamental(&mono).expect("monomial input"),
        Basis::Cofundamental => qsym_cofundamental(&mono).expect("monomial input"),
    };
    if src.check {
        if g.to_monomial() != mono {
            return Err(CliError::Check("basis change does not round-trip".into()));
        }
        check_specialization(|k| specialize_qsym(&mono, k).expect("monomial"), &problem, src)?;
    }
    Ok(match src.format {
        Format::Text => format!("{g}\n"),
        Format::Latex => latex_terms(g.basis(), g.terms()),
        Format::Json => emit_json(&g),
    })
}

fn ncqsym(src: &Source, b: BasisArg) -> Out {
    let problem = Problem::load(src)?;
    let complex = problem.complex(src.complement);
    let mono = complex_ncqsym(&complex);
    let g = match basis(b) {
        Basis::Monomial => mono.clone(),
        Basis::Fundamental => nc_fundamental(&mono).expect("monomial input"),
        Basis::Cofundamental => nc_cofundamental(&mono).expect("monomial input"),
    };
    if src.check {
        if g.to_monomial() != mono {
            return Err(CliError::Check("basis change does not round-trip".into()));
        }
        check_classes(&complex, &problem.formula(src.complement))?;
        check_specialization(|k| specialize(&mono, k).expect("monomial"), &problem, src)?;
    }
    Ok(match src.format {
        Format::Text => format!("{g}\n"),
        Format::Latex => latex_terms(g.basis(), g.terms()),
        Format::Json => emit_json(&g),
    })
}

fn cells_cmd(src: &Source) -> Out {
    let Problem::Formula(f) = Problem::load(src)? else {
        return Err(CliError::NotApplicable("cells need a formula, not a face list".into()));
    };
    let tree = to_decision_tree(&f).map_err(|e| CliError::NotApplicable(e.to_string()))?;
    let list = cells(&tree);
    if src.check {
        let n = f.n();
        let total = (n as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if total > budget()? {
            return Err(CliError::Input(format!("{n}^{n} points exceed the oracle budget")));
        }
        let mut a = vec![1u64; n];
        loop {
            let hits = list.iter().filter(|c| c.holds(&a)).count();
            let truth = f.eval_point(&a).map_err(input_err)?;
            if hits > 1 || truth != (hits == 1) {
                return Err(CliError::Check(format!("point {a:?} lies in {hits} cells, formula says {truth}")));
            }
            let Some(i) = a.iter().rposition(|&v| v < n as u64) else { break };
            a[i] += 1;
            a[i + 1..].fill(1);
        }
    }
    let analyses: Vec<_> = list.iter().map(|c| analyze_cell(c, f.n())).collect();
    Ok(match src.format {
        Format::Json => emit_json(&Value::Array(
            list.iter()
                .zip(&analyses)
                .enumerate()
                .map(|(i, (c, a))| {
                    let constraints: Vec<String> = c.constraints.iter().map(ToString::to_string).collect();
                    json!({
                        "cell": format!("C{}", i + 1),
                        "path": c.path_string(),
                        "constraints": constraints,
                        "analysis": a,
                    })
                })
                .collect(),
        )),
        Format::Text => {
            let mut out = String::new();
            for (i, (c, a)) in list.iter().zip(&analyses).enumerate() {
                let status = if !a.consistent {
                    "inconsistent".to_string()
                } else {
                    let open = if a.almost_open { "almost open" } else { "not almost open" };
                    format!("{open}, dimension {}", a.dimension)
                };
                let _ = writeln!(out, "C{} = {c}  [{}; {status}]", i + 1, c.path_string());
            }
            out
        }
        Format::Latex => {
            let mut out = String::new();
            for (i, c) in list.iter().enumerate() {
                let parts: Vec<String> = c
                    .constraints
                    .iter()
                    .map(|q| {
                        let rel = if q.strict { "<" } else { "\\leq" };
                        format!("(x_{} {rel} x_{})", q.lesser, q.greater)
                    })
                    .collect();
                let _ = writeln!(out, "C_{} &= {} \\\\", i + 1, parts.join(" \\wedge "));
            }
            out
        }
    })
}

fn complex_err(e: ComplexError) -> CliError {
    match e {
        ComplexError::Unverified(m) => CliError::Check(m),
        ComplexError::ArityMismatch { .. } => CliError::Input(e.to_string()),
        _ => CliError::NotApplicable(e.to_string()),
    }
}

fn partition(src: &Source, method: Method) -> Out {
    let problem = Problem::load(src)?;
    let complex = problem.complex(src.complement);
    let p = match method {
        Method::Unique => complex.unique_coarsest_partition(),
        Method::Backtrack => complex.backtrack_partition(),
    }
    .map_err(complex_err)?;
    let hstar = h_star_from_partition(&p, complex.n());
    if src.check {
        let verdict = complex.verify_partition(&p);
        if let Some(v) = verdict.violation {
            return Err(CliError::Check(v));
        }
        let f = problem.formula(src.complement);
        check_classes(&complex, &f)?;
        if hstar != polynomial(&complex).h_star_vector() {
            return Err(CliError::Check("partition h* differs from the polynomial h*".into()));
        }
    }
    Ok(match src.format {
        Format::Json => emit_json(&json!({ "intervals": p, "hstar": bigs(&hstar.0) })),
        _ => {
            let mut out = String::new();
            for iv in &p.intervals {
                let _ = writeln!(out, "[{}, {}]", iv.lower, iv.upper);
            }
            let _ = writeln!(out, "hstar {}", bracket(&hstar.0));
            out
        }
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(input_err)
}

fn emit_formula(f: &Formula, format: Format) -> String {
    match format {
        Format::Json => emit_json(&json!({ "n": f.n(), "formula": f.to_string() })),
        _ => format!("{f}\n"),
    }
}

fn emit_complex(c: &PartialComplex, format: Format) -> String {
    match format {
        Format::Json => emit_json(&json!({ "n": c.n(), "faces": c.faces() })),
        _ => c.faces().iter().map(|phi| format!("{phi}\n")).collect(),
    }
}

fn generate(kind: GenKind, file: &std::path::Path, format: Format) -> Out {
    Ok(match kind {
        GenKind::Chromatic => emit_formula(&chromatic(&read_json::<Graph>(file)?).map_err(input_err)?, format),
        GenKind::Order => emit_formula(&order_polynomial(&read_json::<Poset>(file)?).map_err(input_err)?, format),
        GenKind::Ppartition => {
            emit_formula(&p_partition(&read_json::<LabeledPoset>(file)?).map_err(input_err)?, format)
        }
        GenKind::Zeta => emit_complex(&flags_problem(&read_json::<SetLattice>(file)?).map_err(input_err)?, format),
        GenKind::Flats => {
            let flats = lattice_of_flats(&read_json::<Matroid>(file)?).map_err(input_err)?;
            emit_complex(&flags_problem(&flats).map_err(input_err)?, format)
        }
    })
}

fn verify(src: &Source, partition: Option<&std::path::Path>) -> Out {
    let problem = Problem::load(src)?;
    let complex = problem.complex(src.complement);
    let mut report = Vec::new();
    if let Some(path) = partition {
        let p: IntervalPartition = read_json(path)?;
        let verdict = complex.verify_partition(&p);
        if let Some(v) = verdict.violation {
            return Err(CliError::Check(v));
        }
        report.push(format!("partition valid ({} intervals)", p.intervals.len()));
    } else {
        let f = problem.formula(src.complement);
        check_classes(&complex, &f)?;
        report.push(format!("solving classes agree ({} faces)", complex.len()));
        let p = polynomial(&complex);
        let kmax = (problem.n() as u64 + 1).min(6);
        check_counts(&p, &f, 0..=kmax)?;
        report.push(format!("counts agree for k = 0..={kmax}"));
        if p.h_vector().0 != complex.h_vector().0 || p.h_star_vector().0 != complex.h_star_vector().0 {
            return Err(CliError::Check("series and f-vector routes to h/h* disagree".into()));
        }
        report.push("h and h* agree across both routes".into());
        let nc = complex_ncqsym(&complex);
        for g in [nc_fundamental(&nc), nc_cofundamental(&nc)] {
            if g.expect("monomial input").to_monomial() != nc {
                return Err(CliError::Check("basis change does not round-trip".into()));
            }
        }
        report.push("basis changes round-trip".into());
    }
    Ok(match src.format {
        Format::Json => emit_json(&json!({ "ok": true, "checks": report })),
        _ => report.iter().map(|l| format!("ok: {l}\n")).collect(),
    })
}
