use std::collections::BTreeSet;
use std::path::Path;

use ckalg::algebra::{check_axioms, enumerate_automorphisms, ElementId};
use ckalg::freealg::{
    self, alpha, build_free_bruteforce, closed_form, enumerate_simple_algebras, free_audit, free_cardinality,
    printed_alpha, ClosedFormCase, CountMethod, Limits,
};
use ckalg::io::{algebra_to_value, parse_algebra, parse_valid_algebra};
use ckalg::morphisms::{
    audit_counts, count_auts_formula, count_auts_repaired, count_epis_formula, count_epis_formula_with,
    count_epis_repaired, count_epis_specialized, enumerate_homs, enumerate_s_functions, induced_s_function,
    pi_from_s, CountAudit, FormulaValue, SeventhFactor, Specialization,
};
use ckalg::spectrum::{check_nabla_trichotomy, check_psi_laws, classify, decompose, filter_properties_check, reconstruct_ops};
use ckalg::{Error, FiniteAlgebra, GeneratorKind, Result};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::{AlphaArgs, AuditArgs, Cli, Command, EpiArgs, FreeArgs, FreeBuildArgs, Method, SimplesArgs};

pub fn run(cli: &Cli) -> Result<Value> {
    let mut limits = Limits::default();
    if let Some(c) = cli.cap {
        limits.universe = c;
    }
    if let Some(t) = cli.tuple_cap {
        limits.tuples = t;
    }
    match &cli.command {
        Command::Check { algebra } => check(algebra),
        Command::Spectrum(a) => spectrum(&a.algebra, a.filters),
        Command::Epi(a) => epi(a),
        Command::Aut(a) => aut(&a.algebra, a.audit, &limits),
        Command::Free(a) => free(a, limits),
        Command::Alpha(a) => alpha_cmd(a, &limits),
        Command::Simples(a) => simples(a, &limits),
        Command::Audit(a) => audit(a, &limits),
        Command::FreeBuild(a) => free_build(a, &limits),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

fn load(path: &Path) -> Result<FiniteAlgebra> {
    parse_valid_algebra(&read(path)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn check(path: &Path) -> Result<Value> {
    let alg = parse_algebra(&read(path)?)?;
    let report = check_axioms(&alg);
    Ok(json!({
        "command": "check",
        "universe": alg.size(),
        "all_hold": report.all_hold(),
        "axioms": to_value(&report),
    }))
}

fn id_map<'a>(pairs: impl IntoIterator<Item = (&'a ElementId, &'a ElementId)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn spectrum(path: &Path, filters: bool) -> Result<Value> {
    let alg = load(path)?;
    let spec = classify(&alg)?;
    reconstruct_ops(&alg)?;
    let mut out = json!({
        "command": "spectrum",
        "labels": alg.labels(),
        "primes": to_value(&spec.primes),
        "order": spec.order,
        "psi": id_map(&spec.psi),
        "t_action": id_map(&spec.t_action),
        "nabla": id_map(&spec.nabla_of),
        "components": to_value(&spec.components),
        "signature": to_value(&spec.signature),
        "decomposition": to_value(&decompose(&alg)?),
        "lemmas": {
            "psi_laws": to_value(&check_psi_laws(&alg, &spec)),
            "nabla_trichotomy": to_value(&check_nabla_trichotomy(&alg, &spec)),
            "negation_reconstruction": true,
        },
    });
    if filters {
        out["filters"] = to_value(&filter_properties_check(&alg)?);
    }
    Ok(out)
}

fn signature_or_invalid(alg: &FiniteAlgebra, which: &str) -> Result<ckalg::spectrum::Signature> {
    classify(alg)?
        .signature
        .ok_or_else(|| Error::invalid(which, "closed-form counts need every spectrum component classified"))
}

fn epi(a: &EpiArgs) -> Result<Value> {
    let from = load(&a.from)?;
    let onto = load(&a.onto)?;
    if a.audit {
        return Ok(json!({"command": "epi", "mode": "audit", "audit": to_value(&audit_counts(&from, &onto)?)}));
    }
    if a.formula {
        let s = signature_or_invalid(&from, "from")?;
        let t = signature_or_invalid(&onto, "onto")?;
        let mut specials = Map::new();
        for kind in [Specialization::Mpm, Specialization::Lukasiewicz, Specialization::Boolean] {
            if kind.applies_to(&s) && kind.applies_to(&t) {
                specials.insert(kind.name().into(), json!(count_epis_specialized(kind, &s, &t).to_string()));
            }
        }
        return Ok(json!({
            "command": "epi",
            "mode": "formula",
            "signature_from": to_value(&s),
            "signature_onto": to_value(&t),
            "printed": count_epis_formula(&s, &t).to_string(),
            "t32_reading": count_epis_formula_with(&s, &t, SeventhFactor::T32).to_string(),
            "repaired": count_epis_repaired(&s, &t).to_string(),
            "specializations": specials,
        }));
    }
    let homs = enumerate_homs(&from, &onto, true)?;
    let fs = enumerate_s_functions(&onto, &from)?;
    let mut pis = Vec::with_capacity(fs.len());
    let mut s_out = Vec::with_capacity(fs.len());
    for f in &fs {
        let pi = pi_from_s(&onto, &from, f)?;
        if induced_s_function(&from, &onto, &pi.map)? != *f {
            return Err(Error::invariant("induced S-function inverts Π", format!("{:?}", f.map)));
        }
        s_out.push(json!({"map": id_map(&f.map), "pi": pi.map}));
        pis.push(pi.map);
    }
    let pi_set: BTreeSet<&Vec<ElementId>> = pis.iter().collect();
    let hom_set: BTreeSet<&Vec<ElementId>> = homs.iter().collect();
    if pi_set != hom_set || pi_set.len() != pis.len() {
        return Err(Error::invariant(
            "Π-functions are exactly the epimorphisms",
            format!("{} Π-functions, {} epimorphisms", pis.len(), homs.len()),
        ));
    }
    Ok(json!({
        "command": "epi",
        "mode": "enumerate",
        "count": homs.len().to_string(),
        "epimorphisms": homs,
        "s_functions": s_out,
        "bijection": true,
    }))
}

fn aut(path: &Path, audit: bool, limits: &Limits) -> Result<Value> {
    let alg = load(path)?;
    let auts = enumerate_automorphisms(&alg, limits.universe)?;
    let mut out = json!({
        "command": "aut",
        "count": auts.len().to_string(),
        "automorphisms": auts,
    });
    if audit {
        let sig = signature_or_invalid(&alg, "algebra")?;
        let oracle = BigUint::from(auts.len());
        out["audit"] = to_value(&[
            CountAudit::new("|Aut(A)|", "aut count, printed product", &oracle, FormulaValue::Integer(count_auts_formula(&sig))),
            CountAudit::new(
                "|Aut(A)|",
                "aut count, component symmetries",
                &oracle,
                FormulaValue::Integer(count_auts_repaired(&sig)),
            ),
        ]);
    }
    Ok(out)
}

fn closed_form_case(k: u32) -> Option<ClosedFormCase> {
    match k {
        1 => Some(ClosedFormCase::K1),
        2 => Some(ClosedFormCase::K2),
        p if freealg::is_prime(p as u64) => Some(ClosedFormCase::Prime(p)),
        _ => None,
    }
}

fn count_method(m: Method) -> CountMethod {
    match m {
        Method::Paper | Method::Both => CountMethod::Paper,
        Method::LatticeIe => CountMethod::LatticeIe,
        Method::Oracle => CountMethod::Oracle,
    }
}

fn free(a: &FreeArgs, mut limits: Limits) -> Result<Value> {
    if a.extended {
        limits.universe = limits.universe.max(256);
        limits.tuples = limits.tuples.max(1 << 28);
    }
    let closed = match closed_form_case(a.k) {
        Some(case) => to_value(&closed_form(case, a.n)?),
        None => Value::Null,
    };
    let mut out = json!({
        "command": "free",
        "k": a.k,
        "n": a.n,
        "closed_form": closed,
    });
    if a.method == Method::Both {
        let report = free_audit(a.k, a.n, &limits)?;
        out["results"] = json!([to_value(&report.paper), to_value(&report.oracle)]);
        out["agree"] = json!(report.totals_agree);
        out["alpha_audit"] = to_value(&report.alphas);
        out["extra_classes"] = to_value(&report.extra_classes);
    } else {
        let r = free_cardinality(a.k, a.n, count_method(a.method), &limits)?;
        out["results"] = json!([to_value(&r)]);
    }
    Ok(out)
}

fn kind_of(i: u32) -> Result<GeneratorKind> {
    GeneratorKind::from_index(i).ok_or_else(|| Error::invalid("i", format!("expected 2, 3 or 4, found {i}")))
}

fn alpha_cmd(a: &AlphaArgs, limits: &Limits) -> Result<Value> {
    let kind = kind_of(a.i)?;
    let printed = match printed_alpha(kind, a.d, a.n) {
        Some((expression, value)) => json!({"expression": expression, "value": value.render()}),
        None => Value::Null,
    };
    let mut out = json!({"command": "alpha", "i": a.i, "d": a.d, "n": a.n, "printed": printed});
    if a.method == Method::Both {
        let paper = alpha(kind, a.d, a.n, CountMethod::Paper, limits)?;
        let oracle = alpha(kind, a.d, a.n, CountMethod::Oracle, limits)?;
        let truth = oracle
            .alpha
            .to_integer()
            .and_then(|v| v.to_biguint())
            .ok_or_else(|| Error::invariant("oracle α is a natural number", oracle.alpha.render()))?;
        let audit = CountAudit::new(
            format!("α of {}", freealg::cyclic_name(kind, a.d)),
            "generating count over automorphism count",
            &truth,
            paper.alpha.as_formula_value(),
        );
        out["agree"] = json!(audit.agree);
        out["audit"] = to_value(&audit);
        out["entries"] = json!([to_value(&paper), to_value(&oracle)]);
    } else {
        out["entries"] = json!([to_value(&alpha(kind, a.d, a.n, count_method(a.method), limits)?)]);
    }
    Ok(out)
}

fn simples(a: &SimplesArgs, limits: &Limits) -> Result<Value> {
    let classes = enumerate_simple_algebras(a.k, limits)?;
    let mut items = Vec::with_capacity(classes.len());
    for c in &classes {
        let mut v = to_value(&c.summary());
        if let Some(n) = a.n {
            v["alpha"] = to_value(&freealg::class_alpha(c, n, limits)?);
        }
        items.push(v);
    }
    Ok(json!({"command": "simples", "k": a.k, "classes": items}))
}

fn audit(a: &AuditArgs, limits: &Limits) -> Result<Value> {
    if let (Some(from), Some(onto)) = (&a.from, &a.onto) {
        let b = load(from)?;
        let t = load(onto)?;
        return Ok(json!({"command": "audit", "kind": "counts", "audit": to_value(&audit_counts(&b, &t)?)}));
    }
    let report = free_audit(a.k, a.n, limits)?;
    Ok(json!({
        "command": "audit",
        "kind": "free",
        "k": a.k,
        "n": a.n,
        "paper": to_value(&report.paper),
        "oracle": to_value(&report.oracle),
        "totals_agree": report.totals_agree,
        "audit": to_value(&report.alphas),
        "extra_classes": to_value(&report.extra_classes),
    }))
}

fn free_build(a: &FreeBuildArgs, limits: &Limits) -> Result<Value> {
    let built = build_free_bruteforce(a.k, a.n, a.extended, limits)?;
    let mut out = to_value(&built);
    out["command"] = json!("free-build");
    out["tables"] = match (&built.algebra, a.tables) {
        (Some(alg), true) => algebra_to_value(alg),
        _ => Value::Null,
    };
    Ok(out)
}
