//! Algebra JSON.
//!
//! Two shapes are accepted:
//!
//! * explicit: `{"universe", "meet", "join", "neg", "star", "t", "bot",
//!   "top", "k"}` with row-major tables and an optional `"labels"` array;
//! * product: `{"k", "factors": [{"kind", "d", "copies", "t"}]}` where `t`
//!   is `"shift"`, `"id"` or a permutation table, `d` defaults to 1 and
//!   `copies` to 1.

use serde_json::Value;

use crate::algebra::{build_product, check_axioms, AlgebraTables, FactorSpec, FiniteAlgebra, ProductSpec, TMode};
use crate::error::{Error, Result};
use crate::GeneratorKind;

/// Parses either JSON shape. Only the shape is validated; see
/// [`parse_valid_algebra`] for the axiom check.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("line {}", e.line()), e.to_string()))?;
    algebra_from_value(&value)
}

/// Parses and additionally requires every axiom to hold.
pub fn parse_valid_algebra(text: &str) -> Result<FiniteAlgebra> {
    let alg = parse_algebra(text)?;
    let report = check_axioms(&alg);
    let failed: Vec<&str> = report.failures().map(|(name, _)| name).collect();
    if !failed.is_empty() {
        return Err(Error::invalid("axioms", format!("not a valid algebra: {} fail", failed.join(", "))));
    }
    Ok(alg)
}

pub fn algebra_from_value(value: &Value) -> Result<FiniteAlgebra> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::invalid("$", "expected a JSON object"))?;
    if obj.contains_key("factors") {
        let spec = product_spec_from_value(value)?;
        Ok(build_product(&spec)?.algebra)
    } else {
        let tables = tables_from_value(value)?;
        let alg = FiniteAlgebra::from_tables(&tables)?;
        match obj.get("labels") {
            None => Ok(alg),
            Some(v) => {
                let arr = v.as_array().ok_or_else(|| Error::invalid("labels", "expected an array of strings"))?;
                let labels = arr
                    .iter()
                    .enumerate()
                    .map(|(i, l)| {
                        l.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Error::invalid(format!("labels[{i}]"), "expected a string"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if labels.len() != alg.size() {
                    return Err(Error::invalid(
                        "labels",
                        format!("expected {} labels, found {}", alg.size(), labels.len()),
                    ));
                }
                Ok(alg.with_labels(labels))
            }
        }
    }
}

fn field<'a>(value: &'a Value, name: &str) -> Result<&'a Value> {
    value
        .get(name)
        .ok_or_else(|| Error::invalid(name, "missing field"))
}

fn natural(value: &Value, locus: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::invalid(locus, "expected a non-negative integer"))
}

fn vector(value: &Value, locus: &str) -> Result<Vec<usize>> {
    value
        .as_array()
        .ok_or_else(|| Error::invalid(locus, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| natural(v, &format!("{locus}[{i}]")))
        .collect()
}

fn matrix(value: &Value, locus: &str) -> Result<Vec<Vec<usize>>> {
    value
        .as_array()
        .ok_or_else(|| Error::invalid(locus, "expected an array of rows"))?
        .iter()
        .enumerate()
        .map(|(i, row)| vector(row, &format!("{locus}[{i}]")))
        .collect()
}

fn tables_from_value(value: &Value) -> Result<AlgebraTables> {
    let k = natural(field(value, "k")?, "k")?;
    Ok(AlgebraTables {
        universe: natural(field(value, "universe")?, "universe")?,
        meet: matrix(field(value, "meet")?, "meet")?,
        join: matrix(field(value, "join")?, "join")?,
        neg: vector(field(value, "neg")?, "neg")?,
        star: vector(field(value, "star")?, "star")?,
        t: vector(field(value, "t")?, "t")?,
        bot: natural(field(value, "bot")?, "bot")?,
        top: natural(field(value, "top")?, "top")?,
        k: u32::try_from(k).map_err(|_| Error::invalid("k", "too large"))?,
    })
}

fn small(value: &Value, locus: &str) -> Result<u32> {
    u32::try_from(natural(value, locus)?).map_err(|_| Error::invalid(locus, "too large"))
}

pub fn product_spec_from_value(value: &Value) -> Result<ProductSpec> {
    let k = small(field(value, "k")?, "k")?;
    let factors = field(value, "factors")?
        .as_array()
        .ok_or_else(|| Error::invalid("factors", "expected an array"))?;
    let mut out = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        let at = |name: &str| format!("factors[{i}].{name}");
        if !f.is_object() {
            return Err(Error::invalid(format!("factors[{i}]"), "expected an object"));
        }
        let kind_text = f
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invalid(at("kind"), "expected \"T2\", \"T3\" or \"T4\""))?;
        let kind = GeneratorKind::parse(kind_text)
            .ok_or_else(|| Error::invalid(at("kind"), format!("unknown generator {kind_text:?}")))?;
        let d = match f.get("d") {
            None => 1,
            Some(v) => small(v, &at("d"))?,
        };
        let copies = match f.get("copies") {
            None => 1,
            Some(v) => small(v, &at("copies"))?,
        };
        let t = match f.get("t") {
            None => TMode::Shift,
            Some(Value::String(s)) if s == "shift" => TMode::Shift,
            Some(Value::String(s)) if s == "id" => TMode::Identity,
            Some(v @ Value::Array(_)) => TMode::Explicit(vector(v, &at("t"))?),
            Some(_) => return Err(Error::invalid(at("t"), "expected \"shift\", \"id\" or a permutation table")),
        };
        out.push(FactorSpec::new(kind, d, copies, t));
    }
    Ok(ProductSpec { k, factors: out })
}

/// Explicit JSON for an algebra, labels included.
pub fn algebra_to_value(alg: &FiniteAlgebra) -> Value {
    let mut v = serde_json::to_value(alg.to_tables()).expect("tables serialize");
    v["labels"] = Value::from(alg.labels().to_vec());
    v
}
