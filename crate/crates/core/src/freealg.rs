//! Cardinalities of finitely generated free algebras.
//!
//! The free algebra on `n` generators is a product of simple algebras, each
//! simple `S` occurring `α_S` times, where `α_S` is the number of `n`-tuples
//! generating `S` divided by `|Aut(S)|`. Generating counts are available
//! three ways: the printed inclusion–exclusion over maximal divisors
//! (`paper`), inclusion–exclusion over the actual maximal subuniverses
//! (`lattice_ie`) and direct enumeration of tuples (`oracle`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::algebra::{
    build_cyclic, closure, enumerate_automorphisms, enumerate_subalgebras, find_isomorphism, maximal_subuniverses,
    AlgebraTables, ElementId, FiniteAlgebra, DEFAULT_ENUM_CAP,
};
use crate::error::{Error, Result};
use crate::morphisms::{CountAudit, FormulaValue};
use crate::{par, GeneratorKind};

/// Resource limits for the enumerating methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe handed to subalgebra and automorphism enumeration.
    pub universe: usize,
    /// Largest number of tuples a generating-count oracle may scan.
    pub tuples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            universe: DEFAULT_ENUM_CAP,
            tuples: 1 << 22,
        }
    }
}

/// Largest total, in bits, that a free-algebra cardinality may have.
pub const MAX_TOTAL_BITS: u64 = 1 << 26;

/// Divisors of `k` with their maximal proper divisors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorSet {
    pub k: u64,
    pub divisors: Vec<u64>,
    pub maximal_of: BTreeMap<u64, Vec<u64>>,
}

pub fn divisors(k: u64) -> Vec<u64> {
    (1..=k).filter(|d| k.is_multiple_of(*d)).collect()
}

/// `M(d)`: proper divisors of `d` not properly dividing another proper
/// divisor, ascending.
pub fn maximal_divisors(d: u64) -> Vec<u64> {
    let proper: Vec<u64> = divisors(d).into_iter().filter(|&x| x < d).collect();
    proper
        .iter()
        .copied()
        .filter(|&x| !proper.iter().any(|&y| y != x && y % x == 0))
        .collect()
}

pub fn divisor_set(k: u64) -> Result<DivisorSet> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let divisors = divisors(k);
    let maximal_of = divisors.iter().map(|&d| (d, maximal_divisors(d))).collect();
    Ok(DivisorSet { k, divisors, maximal_of })
}

/// An exact fraction kept as computed (not reduced), so that printed values
/// such as `10/4` survive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactQuotient {
    pub numerator: BigInt,
    pub denominator: BigUint,
}

impl ExactQuotient {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigUint>) -> Self {
        let denominator = denominator.into();
        assert!(!denominator.is_zero(), "zero denominator");
        ExactQuotient {
            numerator: numerator.into(),
            denominator,
        }
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        ExactQuotient::new(v, 1u32)
    }

    pub fn is_integral(&self) -> bool {
        (&self.numerator % BigInt::from(self.denominator.clone())).is_zero()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integral()
            .then(|| &self.numerator / BigInt::from(self.denominator.clone()))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::from(self.denominator.clone()))
    }

    /// Integral values print as integers, others as the unreduced fraction.
    pub fn render(&self) -> String {
        match self.to_integer() {
            Some(v) => v.to_string(),
            None => format!("{}/{}", self.numerator, self.denominator),
        }
    }

    pub fn as_formula_value(&self) -> FormulaValue {
        match self.to_integer() {
            Some(v) if !v.is_negative() => FormulaValue::Integer(v.magnitude().clone()),
            _ => FormulaValue::NonIntegral {
                numerator: self.numerator.to_string(),
                denominator: self.denominator.to_string(),
            },
        }
    }
}

impl fmt::Display for ExactQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for ExactQuotient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Paper,
    LatticeIe,
    Oracle,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::Paper => "paper",
            CountMethod::LatticeIe => "lattice_ie",
            CountMethod::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(CountMethod::Paper),
            "lattice_ie" => Some(CountMethod::LatticeIe),
            "oracle" => Some(CountMethod::Oracle),
            _ => None,
        }
    }
}

fn pow_big(base: u64, exp: u64) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

fn gcd_all(xs: &[u64]) -> u64 {
    xs.iter().fold(0, |g, &x| g.gcd(&x))
}

/// `Σ_{∅≠Z⊆M} (−1)^{|Z|−1} (b^{gcd Z})ⁿ`.
fn z_sum(m: &[u64], b: u64, n: u32) -> BigInt {
    let mut total = BigInt::zero();
    for mask in 1u64..(1 << m.len()) {
        let z: Vec<u64> = (0..m.len()).filter(|&i| mask >> i & 1 == 1).map(|i| m[i]).collect();
        let term = pow_big(b, gcd_all(&z) * n as u64);
        if z.len() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Largest `|M|²` for which the pair sum is evaluated literally.
const LITERAL_H_SUM_LIMIT: usize = 16;

/// `Σ_{∅≠H⊆M×M} (−1)^{|H|−1} (b^{gcd(H₁∪H₂)})ⁿ`, enumerating every `H`.
pub fn h_sum_literal(m: &[u64], b: u64, n: u32) -> BigInt {
    let pairs: Vec<(u64, u64)> = m.iter().flat_map(|&x| m.iter().map(move |&y| (x, y))).collect();
    let mut total = BigInt::zero();
    for mask in 1u64..(1 << pairs.len()) {
        let mut support: Vec<u64> = Vec::new();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                support.push(x);
                support.push(y);
            }
        }
        let term = pow_big(b, gcd_all(&support) * n as u64);
        if mask.count_ones() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// The pair sum regrouped by `S = H₁ ∪ H₂`: the signed count of relations
/// with support exactly `S` is `(−1)^{|S|−1}`, so the sum equals the
/// single-set sum over `S`.
pub fn h_sum(m: &[u64], b: u64, n: u32) -> BigInt {
    if m.len() * m.len() <= LITERAL_H_SUM_LIMIT {
        h_sum_literal(m, b, n)
    } else {
        z_sum(m, b, n)
    }
}

/// The printed generating count for `T_{i,d}`.
pub fn paper_generating_count(kind: GeneratorKind, d: u32, n: u32) -> BigInt {
    let m = maximal_divisors(d as u64);
    let i = kind.size() as u64;
    let full = pow_big(i, d as u64 * n as u64);
    match kind {
        GeneratorKind::T2 => full - z_sum(&m, 2, n),
        _ => full - pow_big(2, d as u64 * n as u64) - z_sum(&m, i, n) + h_sum(&m, 2, n),
    }
}

/// Number of `n`-tuples generating `alg`, by enumeration.
pub fn oracle_generating_count(alg: &FiniteAlgebra, n: u32, limits: &Limits) -> Result<BigInt> {
    let size = alg.size() as u64;
    let total = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(size));
    let total = match total {
        Some(t) if t <= limits.tuples => t,
        _ => {
            return Err(Error::cap(
                "generating-tuple enumeration",
                format!("{size}^{n}"),
                limits.tuples,
                "--tuple-cap",
            ))
        }
    };
    let count = par::count_range(total, |idx| {
        let mut rest = idx;
        let seed: Vec<ElementId> = (0..n)
            .map(|_| {
                let x = (rest % size) as ElementId;
                rest /= size;
                x
            })
            .collect();
        closure(alg, &seed).len() == alg.size()
    });
    Ok(BigInt::from(count))
}

/// Inclusion–exclusion over the maximal proper subuniverses of `alg`:
/// `Σ_X (−1)^{|X|} |⋂X|ⁿ`, with intersections computed on the sets.
pub fn lattice_ie_generating_count(alg: &FiniteAlgebra, n: u32, limits: &Limits) -> Result<BigInt> {
    let maxes = maximal_subuniverses(alg, limits.universe)?;
    if maxes.len() > 24 {
        return Err(Error::cap(
            "inclusion–exclusion over maximal subuniverses",
            format!("2^{}", maxes.len()),
            "2^24",
            "the oracle method",
        ));
    }
    fn walk(maxes: &[Vec<ElementId>], start: usize, current: &[ElementId], depth: usize, n: u32, acc: &mut BigInt) {
        for (j, m) in maxes.iter().enumerate().skip(start) {
            let next: Vec<ElementId> = current.iter().copied().filter(|x| m.binary_search(x).is_ok()).collect();
            let term = pow_big(next.len() as u64, n as u64);
            if depth.is_multiple_of(2) {
                *acc -= term;
            } else {
                *acc += term;
            }
            walk(maxes, j + 1, &next, depth + 1, n, acc);
        }
    }
    let mut acc = pow_big(alg.size() as u64, n as u64);
    let all: Vec<ElementId> = alg.elements().collect();
    walk(&maxes, 0, &all, 0, n, &mut acc);
    Ok(acc)
}

pub fn generating_count(kind: GeneratorKind, d: u32, n: u32, method: CountMethod, limits: &Limits) -> Result<BigInt> {
    check_d(d)?;
    match method {
        CountMethod::Paper => Ok(paper_generating_count(kind, d, n)),
        CountMethod::LatticeIe => {
            let alg = cyclic_checked(kind, d, limits)?;
            lattice_ie_generating_count(&alg, n, limits)
        }
        CountMethod::Oracle => {
            let alg = cyclic_checked(kind, d, limits)?;
            oracle_generating_count(&alg, n, limits)
        }
    }
}

fn check_d(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    Ok(())
}

fn cyclic_checked(kind: GeneratorKind, d: u32, limits: &Limits) -> Result<FiniteAlgebra> {
    let size = (kind.size() as u64).checked_pow(d);
    match size {
        Some(s) if s <= limits.universe as u64 => Ok(build_cyclic(kind, d)),
        _ => Err(Error::cap(
            format!("building T_{{{},{d}}}", kind.size()),
            format!("{}^{d} elements", kind.size()),
            limits.universe,
            "--cap",
        )),
    }
}

/// `d` for `T₂`, `T₃`; `2d` for `T₄`.
pub fn aut_order_formula(kind: GeneratorKind, d: u32) -> u64 {
    match kind {
        GeneratorKind::T4 => 2 * d as u64,
        _ => d as u64,
    }
}

pub fn aut_order(kind: GeneratorKind, d: u32, oracle: bool, limits: &Limits) -> Result<u64> {
    check_d(d)?;
    if !oracle {
        return Ok(aut_order_formula(kind, d));
    }
    let alg = cyclic_checked(kind, d, limits)?;
    Ok(enumerate_automorphisms(&alg, limits.universe)?.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaEntry {
    pub family: String,
    pub d: Option<u32>,
    pub n: u32,
    pub method: String,
    #[serde(serialize_with = "crate::dec::big_int")]
    pub generating_count: BigInt,
    pub aut_order: u64,
    pub alpha: ExactQuotient,
    pub integral: bool,
}

pub fn cyclic_name(kind: GeneratorKind, d: u32) -> String {
    format!("T_{{{},{d}}}", kind.size())
}

/// `α_{i,d}` for `n` generators. `Paper` divides by `d` or `2d`;
/// the other two divide by the enumerated automorphism count.
pub fn alpha(kind: GeneratorKind, d: u32, n: u32, method: CountMethod, limits: &Limits) -> Result<AlphaEntry> {
    let count = generating_count(kind, d, n, method, limits)?;
    let aut = aut_order(kind, d, method != CountMethod::Paper, limits)?;
    let alpha = ExactQuotient::new(count.clone(), aut);
    Ok(AlphaEntry {
        family: cyclic_name(kind, d),
        d: Some(d),
        n,
        method: method.name().into(),
        generating_count: count,
        aut_order: aut,
        integral: alpha.is_integral(),
        alpha,
    })
}

/// The displayed closed expressions for `α_{i,1}` and `α_{i,p}` with `p`
/// prime, written in `r = n`, together with their value.
pub fn printed_alpha(kind: GeneratorKind, d: u32, n: u32) -> Option<(String, ExactQuotient)> {
    let r = n as u64;
    let p = d as u64;
    let pw = |b: u64, e: u64| pow_big(b, e);
    let (terms, den): (Vec<BigInt>, u64) = match (kind, d) {
        (GeneratorKind::T2, 1) => (vec![pw(2, r)], 1),
        (GeneratorKind::T3, 1) => (vec![pw(3, r), -pw(2, r)], 1),
        (GeneratorKind::T4, 1) => (vec![pw(4, r), -pw(2, r)], 2),
        _ if !is_prime(p) => return None,
        (GeneratorKind::T2, _) => (vec![pw(2, p * r), -pw(2, r)], p),
        (GeneratorKind::T3, _) => (vec![pw(3, p * r), -pw(3, r), -pw(2, p * r), pw(2, r)], p),
        (GeneratorKind::T4, _) => (vec![pw(4, p * r), -pw(4, r), -pw(2, p * r), pw(2, r)], 2 * p),
    };
    let mut text = String::from("(");
    for (j, t) in terms.iter().enumerate() {
        if j == 0 {
            text.push_str(&t.to_string());
        } else if t.is_negative() {
            text.push_str(&format!(" − {}", t.magnitude()));
        } else {
            text.push_str(&format!(" + {t}"));
        }
    }
    text.push_str(&format!(")/{den}"));
    let num: BigInt = terms.into_iter().sum();
    Some((text, ExactQuotient::new(num, den)))
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

/// An isomorphism class of simple algebras.
#[derive(Clone, Debug)]
pub struct SimpleClass {
    pub name: String,
    /// `(i, d)` when the class is `T_{i,d}` with its cyclic shift.
    pub family: Option<(GeneratorKind, u32)>,
    pub algebra: FiniteAlgebra,
    pub aut_order: u64,
    /// Where the first representative was found, e.g. `T_{4,2}`.
    pub found_in: String,
    pub subuniverse: Vec<ElementId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleClassSummary {
    pub name: String,
    pub size: usize,
    pub cyclic: bool,
    pub aut_order: u64,
    pub found_in: String,
    pub subuniverse: Vec<ElementId>,
    pub labels: Vec<String>,
}

impl SimpleClass {
    pub fn summary(&self) -> SimpleClassSummary {
        SimpleClassSummary {
            name: self.name.clone(),
            size: self.algebra.size(),
            cyclic: self.family.is_some(),
            aut_order: self.aut_order,
            found_in: self.found_in.clone(),
            subuniverse: self.subuniverse.clone(),
            labels: self.algebra.labels().to_vec(),
        }
    }
}

fn same_up_to_iso(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    Ok(a.size() == b.size() && find_isomorphism(a, b)?.is_some())
}

fn twisted_diamond() -> FiniteAlgebra {
    build_cyclic(GeneratorKind::T4, 1).with_t(vec![0, 2, 1, 3])
}

/// All simple algebras with `tᵏ = id` up to isomorphism: the subalgebras of
/// `T_{3,k}` and `T_{4,k}`, deduplicated, ordered by size then discovery.
pub fn enumerate_simple_algebras(k: u32, limits: &Limits) -> Result<Vec<SimpleClass>> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let mut classes: Vec<SimpleClass> = Vec::new();
    for kind in [GeneratorKind::T3, GeneratorKind::T4] {
        let host = cyclic_checked(kind, k, limits)?.with_k(k);
        for sub in enumerate_subalgebras(&host, limits.universe)? {
            let alg = host.subalgebra(&sub)?;
            let mut known = false;
            for c in &classes {
                if same_up_to_iso(&c.algebra, &alg)? {
                    known = true;
                    break;
                }
            }
            if known {
                continue;
            }
            let aut_order = enumerate_automorphisms(&alg, limits.universe)?.len() as u64;
            classes.push(SimpleClass {
                name: String::new(),
                family: None,
                algebra: alg,
                aut_order,
                found_in: cyclic_name(kind, k),
                subuniverse: sub,
            });
        }
    }
    classes.sort_by_key(|c| c.algebra.size());
    let mut unnamed = 0;
    for c in classes.iter_mut() {
        for d in divisors(k as u64) {
            for kind in GeneratorKind::ALL {
                let d = d as u32;
                if (kind.size() as u64).pow(d) != c.algebra.size() as u64 || c.family.is_some() {
                    continue;
                }
                if same_up_to_iso(&c.algebra, &build_cyclic(kind, d).with_k(k))? {
                    c.family = Some((kind, d));
                    c.name = cyclic_name(kind, d);
                }
            }
        }
        if c.family.is_none() {
            c.name = if same_up_to_iso(&c.algebra, &twisted_diamond().with_k(k))? {
                "T4 with t = a↔b".into()
            } else {
                unnamed += 1;
                format!("S{unnamed} ({} elements)", c.algebra.size())
            };
        }
    }
    Ok(classes)
}

/// `α_S` for a simple class: generating tuples over automorphisms.
pub fn class_alpha(class: &SimpleClass, n: u32, limits: &Limits) -> Result<AlphaEntry> {
    let count = oracle_generating_count(&class.algebra, n, limits)?;
    let alpha = ExactQuotient::new(count.clone(), class.aut_order);
    Ok(AlphaEntry {
        family: class.name.clone(),
        d: class.family.map(|(_, d)| d),
        n,
        method: CountMethod::Oracle.name().into(),
        generating_count: count,
        aut_order: class.aut_order,
        integral: alpha.is_integral(),
        alpha,
    })
}

/// One factor `base^exponent` of a free-algebra cardinality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeFactor {
    pub label: String,
    #[serde(serialize_with = "crate::dec::big_uint")]
    pub base: BigUint,
    pub exponent: ExactQuotient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeCardinality {
    pub k: u32,
    pub n: u32,
    pub method: String,
    pub factors: Vec<FreeFactor>,
    /// `None` when the exponents do not combine into a natural number.
    #[serde(serialize_with = "crate::dec::opt_big_uint")]
    pub total: Option<BigUint>,
    pub integral: bool,
}

fn factor_small(mut x: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        let mut e = 0;
        while x.is_multiple_of(p) {
            x /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// `∏ baseᵉˣᵖ` computed exactly. Exponents are summed per prime of the
/// bases, so fractional exponents that combine to whole powers still give an
/// exact total. Bases are `iᵈ` (given as `(i, d)`).
fn combine(factors: &[(u64, u32, ExactQuotient)]) -> Result<(Option<BigUint>, bool)> {
    let mut per_prime: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (i, d, e) in factors {
        for (p, m) in factor_small(*i) {
            let add = e.to_rational() * BigRational::from_integer(BigInt::from(m * *d as u64));
            *per_prime.entry(p).or_insert_with(BigRational::zero) += add;
        }
    }
    let mut exps = Vec::new();
    for (p, e) in per_prime {
        if !e.is_integer() || e.is_negative() {
            return Ok((None, false));
        }
        exps.push((p, e.to_integer()));
    }
    let bits: f64 = exps
        .iter()
        .map(|(p, e)| e.to_f64().unwrap_or(f64::INFINITY) * (*p as f64).log2())
        .sum();
    if bits > MAX_TOTAL_BITS as f64 {
        return Err(Error::cap(
            "free-algebra cardinality",
            format!("about {bits:.0} bits"),
            format!("{MAX_TOTAL_BITS} bits"),
            "a smaller n",
        ));
    }
    let mut total = BigUint::one();
    for (p, e) in exps {
        let e = e.to_u32().expect("exponent bounded by the bit cap");
        total *= BigUint::from(p).pow(e);
    }
    Ok((Some(total), true))
}

fn cardinality(k: u32, n: u32, method: &str, parts: Vec<(String, u64, u32, ExactQuotient)>) -> Result<FreeCardinality> {
    let (total, integral) = combine(
        &parts
            .iter()
            .map(|(_, i, d, e)| (*i, *d, e.clone()))
            .collect::<Vec<_>>(),
    )?;
    Ok(FreeCardinality {
        k,
        n,
        method: method.into(),
        factors: parts
            .into_iter()
            .map(|(label, i, d, exponent)| FreeFactor {
                label,
                base: BigUint::from(i).pow(d),
                exponent,
            })
            .collect(),
        total,
        integral,
    })
}

/// `|F(n)|` in the variety with `tᵏ = id`.
///
/// `Paper`: `∏_{d|k} (2ᵈ)^{α₂,d} (3ᵈ)^{α₃,d} (4ᵈ)^{α₄,d}` with printed `α`.
/// `Oracle`: `∏_S |S|^{α_S}` over every simple class, with enumerated `α`.
/// `LatticeIe`: as `Paper` but with inclusion–exclusion over true maximal
/// subuniverses and enumerated automorphism counts, over the cyclic family
/// only.
pub fn free_cardinality(k: u32, n: u32, method: CountMethod, limits: &Limits) -> Result<FreeCardinality> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let mut parts = Vec::new();
    match method {
        CountMethod::Paper | CountMethod::LatticeIe => {
            for d in divisors(k as u64) {
                for kind in GeneratorKind::ALL {
                    let a = alpha(kind, d as u32, n, method, limits)?;
                    parts.push((a.family, kind.size() as u64, d as u32, a.alpha));
                }
            }
        }
        CountMethod::Oracle => {
            for class in enumerate_simple_algebras(k, limits)? {
                let a = class_alpha(&class, n, limits)?;
                parts.push((a.family, class.algebra.size() as u64, 1, a.alpha));
            }
        }
    }
    cardinality(k, n, method.name(), parts)
}

/// The three specialized closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFormCase {
    K1,
    K2,
    Prime(u32),
}

/// Evaluates a specialized closed form in `r = n`.
pub fn closed_form(case: ClosedFormCase, n: u32) -> Result<FreeCardinality> {
    let r = n as u64;
    let pw = pow_big;
    let q = |num: BigInt, den: u64| ExactQuotient::new(num, den);
    let (k, parts) = match case {
        ClosedFormCase::K1 => (
            1,
            vec![
                ("2^{2^r}", 2, 1, q(pw(2, r), 1)),
                ("3^{3^r−2^r}", 3, 1, q(pw(3, r) - pw(2, r), 1)),
                ("4^{2^{r−1}(2^r−1)}", 4, 1, q(pw(4, r) - pw(2, r), 2)),
            ],
        ),
        ClosedFormCase::K2 => (
            2,
            vec![
                ("2^{2^r}", 2, 1, q(pw(2, r), 1)),
                ("4^{3(4^r−2^r)/2}", 4, 1, q(BigInt::from(3) * (pw(4, r) - pw(2, r)), 2)),
                ("3^{3^r−2^r}", 3, 1, q(pw(3, r) - pw(2, r), 1)),
                ("9^{(9^r−3^r−4^r+2^r)/2}", 9, 1, q(pw(9, r) - pw(3, r) - pw(4, r) + pw(2, r), 2)),
                (
                    "16^{(16^r−3·4^r+2·2^r)/4}",
                    16,
                    1,
                    q(pw(16, r) - BigInt::from(3) * pw(4, r) + BigInt::from(2) * pw(2, r), 4),
                ),
            ],
        ),
        ClosedFormCase::Prime(p) => {
            if !is_prime(p as u64) {
                return Err(Error::invalid("p", format!("{p} is not prime")));
            }
            let p64 = p as u64;
            (
                p,
                vec![
                    ("2^{2^r}", 2, 1, q(pw(2, r), 1)),
                    ("(2^p)^{(2^{pr}−2^r)/p}", 2, p, q(pw(2, p64 * r) - pw(2, r), p64)),
                    ("3^{3^r−2^r}", 3, 1, q(pw(3, r) - pw(2, r), 1)),
                    (
                        "(3^p)^{(3^{pr}−3^r−2^{pr}+2^r)/p}",
                        3,
                        p,
                        q(pw(3, p64 * r) - pw(3, r) - pw(2, p64 * r) + pw(2, r), p64),
                    ),
                    ("4^{(4^r−2^r)/2}", 4, 1, q(pw(4, r) - pw(2, r), 2)),
                    (
                        "(4^p)^{(4^{pr}−4^r−2^{pr}+2^r)/(2p)}",
                        4,
                        p,
                        q(pw(4, p64 * r) - pw(4, r) - pw(2, p64 * r) + pw(2, r), 2 * p64),
                    ),
                ],
            )
        }
    };
    let parts = parts
        .into_iter()
        .map(|(label, i, d, e)| (label.to_string(), i as u64, d, e))
        .collect();
    cardinality(k, n, "closed-form", parts)
}

/// Printed formulas against enumeration for one `(k, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeAudit {
    pub paper: FreeCardinality,
    pub oracle: FreeCardinality,
    pub totals_agree: bool,
    /// Printed `α_{i,d}` against the enumerated `α` of `T_{i,d}`.
    pub alphas: Vec<CountAudit>,
    /// Simple classes outside the cyclic family.
    pub extra_classes: Vec<String>,
}

pub fn free_audit(k: u32, n: u32, limits: &Limits) -> Result<FreeAudit> {
    let paper = free_cardinality(k, n, CountMethod::Paper, limits)?;
    let oracle = free_cardinality(k, n, CountMethod::Oracle, limits)?;
    let mut alphas = Vec::new();
    for d in divisors(k as u64) {
        for kind in GeneratorKind::ALL {
            let d = d as u32;
            let printed = alpha(kind, d, n, CountMethod::Paper, limits)?;
            let truth = alpha(kind, d, n, CountMethod::Oracle, limits)?;
            let truth_value = truth
                .alpha
                .to_integer()
                .and_then(|v| v.to_biguint())
                .ok_or_else(|| Error::invariant("oracle α is a natural number", truth.alpha.render()))?;
            alphas.push(CountAudit::new(
                format!("α of {} at n={n}", cyclic_name(kind, d)),
                "generating count over automorphism count",
                &truth_value,
                printed.alpha.as_formula_value(),
            ));
        }
    }
    let extra_classes = enumerate_simple_algebras(k, limits)?
        .into_iter()
        .filter(|c| c.family.is_none())
        .map(|c| c.name)
        .collect();
    Ok(FreeAudit {
        totals_agree: paper.total.is_some() && paper.total == oracle.total,
        paper,
        oracle,
        alphas,
        extra_classes,
    })
}

/// The free algebra realized inside a product of simple algebras.
#[derive(Clone, Debug, Serialize)]
pub struct FreeClosure {
    pub k: u32,
    pub n: u32,
    /// `"direct"` for an explicit closure, `"pairwise"` for the count via
    /// two-coordinate projections.
    pub method: String,
    pub coordinates: usize,
    /// Coordinates left after dropping those determined by another one.
    pub independent_coordinates: usize,
    #[serde(serialize_with = "crate::dec::big_uint")]
    pub size: BigUint,
    #[serde(skip)]
    pub algebra: Option<FiniteAlgebra>,
}

/// Largest closure built element by element.
pub const DIRECT_CLOSURE_CAP: usize = 4096;
/// Largest coordinate count handled by the pairwise count.
pub const PAIRWISE_COORDINATE_CAP: usize = 64;

struct Coordinate<'a> {
    alg: &'a FiniteAlgebra,
    values: Vec<ElementId>,
}

fn coordinates<'a>(classes: &'a [SimpleClass], n: u32) -> Vec<Coordinate<'a>> {
    let mut out = Vec::new();
    for c in classes {
        let size = c.algebra.size();
        let count = size.pow(n);
        for idx in 0..count {
            let mut rest = idx;
            let mut values = vec![0; n as usize];
            for v in values.iter_mut().rev() {
                *v = rest % size;
                rest /= size;
            }
            out.push(Coordinate { alg: &c.algebra, values });
        }
    }
    out
}

/// Builds the subalgebra of `∏ S^{Sⁿ}` generated by the evaluation tuples.
///
/// Small cases are closed explicitly and returned as an algebra. Larger ones
/// (with `extended`) are counted through the pair projections: the variety
/// has a majority term, so a subalgebra of a product is the set of tuples
/// whose every two-coordinate projection lies in the corresponding projection
/// of the generators' closure.
pub fn build_free_bruteforce(k: u32, n: u32, extended: bool, limits: &Limits) -> Result<FreeClosure> {
    let classes = enumerate_simple_algebras(k, limits)?;
    let coords = coordinates(&classes, n);
    if let Some(alg) = direct_closure(&coords, k, n, DIRECT_CLOSURE_CAP) {
        return Ok(FreeClosure {
            k,
            n,
            method: "direct".into(),
            coordinates: coords.len(),
            independent_coordinates: coords.len(),
            size: BigUint::from(alg.size()),
            algebra: Some(alg),
        });
    }
    if !extended {
        return Err(Error::cap(
            "explicit free-algebra closure",
            format!("more than {DIRECT_CLOSURE_CAP} elements"),
            DIRECT_CLOSURE_CAP,
            "--extended",
        ));
    }
    if coords.len() > PAIRWISE_COORDINATE_CAP {
        return Err(Error::cap(
            "pairwise free-algebra count",
            format!("{} coordinates", coords.len()),
            PAIRWISE_COORDINATE_CAP,
            "a smaller k or n",
        ));
    }
    let (size, independent) = pairwise_count(&coords)?;
    Ok(FreeClosure {
        k,
        n,
        method: "pairwise".into(),
        coordinates: coords.len(),
        independent_coordinates: independent,
        size,
        algebra: None,
    })
}

fn direct_closure(coords: &[Coordinate], k: u32, n: u32, cap: usize) -> Option<FiniteAlgebra> {
    type Tuple = Vec<ElementId>;
    let unary = |x: &Tuple, op: fn(&FiniteAlgebra, ElementId) -> ElementId| -> Tuple {
        coords.iter().zip(x).map(|(c, &v)| op(c.alg, v)).collect()
    };
    let binary = |x: &Tuple, y: &Tuple, op: fn(&FiniteAlgebra, ElementId, ElementId) -> ElementId| -> Tuple {
        coords.iter().zip(x.iter().zip(y)).map(|(c, (&u, &v))| op(c.alg, u, v)).collect()
    };
    let bot: Tuple = coords.iter().map(|c| c.alg.bot()).collect();
    let top: Tuple = coords.iter().map(|c| c.alg.top()).collect();
    let gens: Vec<Tuple> = (0..n as usize)
        .map(|l| coords.iter().map(|c| c.values[l]).collect())
        .collect();

    let mut index: HashMap<Tuple, usize> = HashMap::new();
    let mut members: Vec<Tuple> = Vec::new();
    let push = |x: Tuple, index: &mut HashMap<Tuple, usize>, members: &mut Vec<Tuple>| -> bool {
        if !index.contains_key(&x) {
            index.insert(x.clone(), members.len());
            members.push(x);
        }
        members.len() <= cap
    };
    for x in [bot.clone(), top.clone()].into_iter().chain(gens.iter().cloned()) {
        push(x, &mut index, &mut members);
    }
    let mut i = 0;
    while i < members.len() {
        let x = members[i].clone();
        for op in [FiniteAlgebra::neg, FiniteAlgebra::star, FiniteAlgebra::t] {
            if !push(unary(&x, op), &mut index, &mut members) {
                return None;
            }
        }
        for j in 0..=i {
            let y = members[j].clone();
            for op in [FiniteAlgebra::meet, FiniteAlgebra::join] {
                if !push(binary(&x, &y, op), &mut index, &mut members) {
                    return None;
                }
            }
        }
        i += 1;
    }
    members.sort();
    let id: HashMap<&Tuple, usize> = members.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let size = members.len();
    let table2 = |op: fn(&FiniteAlgebra, ElementId, ElementId) -> ElementId| -> Vec<Vec<ElementId>> {
        members
            .iter()
            .map(|x| members.iter().map(|y| id[&binary(x, y, op)]).collect())
            .collect()
    };
    let table1 = |op: fn(&FiniteAlgebra, ElementId) -> ElementId| -> Vec<ElementId> {
        members.iter().map(|x| id[&unary(x, op)]).collect()
    };
    let tables = AlgebraTables {
        universe: size,
        meet: table2(FiniteAlgebra::meet),
        join: table2(FiniteAlgebra::join),
        neg: table1(FiniteAlgebra::neg),
        star: table1(FiniteAlgebra::star),
        t: table1(FiniteAlgebra::t),
        bot: id[&bot],
        top: id[&top],
        k,
    };
    let labels = members
        .iter()
        .enumerate()
        .map(|(i, x)| match gens.iter().position(|g| g == x) {
            Some(l) => format!("x{}", l + 1),
            None if *x == bot => "0".into(),
            None if *x == top => "1".into(),
            None => format!("e{i}"),
        })
        .collect();
    FiniteAlgebra::from_tables(&tables).ok().map(|a| a.with_labels(labels))
}

/// Relation generated in `S_i × S_j` by the generator pairs, as a
/// `|S_i| × |S_j|` membership matrix.
fn pair_closure(a: &Coordinate, b: &Coordinate) -> Vec<Vec<bool>> {
    let (sa, sb) = (a.alg, b.alg);
    let mut inset = vec![vec![false; sb.size()]; sa.size()];
    let mut members: Vec<(ElementId, ElementId)> = Vec::new();
    let push = |p: (ElementId, ElementId), inset: &mut Vec<Vec<bool>>, members: &mut Vec<(ElementId, ElementId)>| {
        if !inset[p.0][p.1] {
            inset[p.0][p.1] = true;
            members.push(p);
        }
    };
    push((sa.bot(), sb.bot()), &mut inset, &mut members);
    push((sa.top(), sb.top()), &mut inset, &mut members);
    for (&x, &y) in a.values.iter().zip(&b.values) {
        push((x, y), &mut inset, &mut members);
    }
    let mut i = 0;
    while i < members.len() {
        let (x, y) = members[i];
        push((sa.neg(x), sb.neg(y)), &mut inset, &mut members);
        push((sa.star(x), sb.star(y)), &mut inset, &mut members);
        push((sa.t(x), sb.t(y)), &mut inset, &mut members);
        for j in 0..=i {
            let (u, v) = members[j];
            push((sa.meet(x, u), sb.meet(y, v)), &mut inset, &mut members);
            push((sa.join(x, u), sb.join(y, v)), &mut inset, &mut members);
        }
        i += 1;
    }
    inset
}

/// Counts the tuples satisfying every pair projection. Coordinates that are
/// a function of another coordinate are dropped first; the rest are counted
/// by backtracking within connected groups of constrained coordinates.
fn pairwise_count(coords: &[Coordinate]) -> Result<(BigUint, usize)> {
    let m = coords.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let rels: Vec<Vec<Vec<bool>>> = par::map_slice(&pairs, |&(i, j)| pair_closure(&coords[i], &coords[j]));
    let rel: HashMap<(usize, usize), &Vec<Vec<bool>>> = pairs.iter().copied().zip(rels.iter()).collect();
    let domain: Vec<Vec<ElementId>> = coords
        .iter()
        .map(|c| closure(c.alg, &c.values))
        .collect();
    let functional = |i: usize, j: usize| {
        let r = rel[&(i, j)];
        domain[i].iter().all(|&x| r[x].iter().filter(|&&b| b).count() == 1)
    };

    let mut alive = vec![true; m];
    for j in (0..m).rev() {
        if (0..m).any(|i| i != j && alive[i] && functional(i, j)) {
            alive[j] = false;
        }
    }
    let keep: Vec<usize> = (0..m).filter(|&i| alive[i]).collect();
    let full = |i: usize, j: usize| {
        let r = rel[&(i, j)];
        domain[i].iter().all(|&x| domain[j].iter().all(|&y| r[x][y]))
    };

    // Groups of kept coordinates joined by non-trivial relations.
    let mut group: Vec<usize> = (0..keep.len()).collect();
    fn root(g: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while g[r] != r {
            r = g[r];
        }
        g[x] = r;
        r
    }
    for a in 0..keep.len() {
        for b in a + 1..keep.len() {
            if !full(keep[a], keep[b]) {
                let (ra, rb) = (root(&mut group, a), root(&mut group, b));
                group[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, &coord) in keep.iter().enumerate() {
        let r = root(&mut group, a);
        groups.entry(r).or_default().push(coord);
    }

    let mut total = BigUint::one();
    for members in groups.values() {
        let count = count_assignments(members, &domain, &rel)?;
        total *= count;
    }
    Ok((total, keep.len()))
}

const BACKTRACK_NODE_CAP: u64 = 1 << 30;

fn count_assignments(
    members: &[usize],
    domain: &[Vec<ElementId>],
    rel: &HashMap<(usize, usize), &Vec<Vec<bool>>>,
) -> Result<BigUint> {
    if let [only] = members {
        return Ok(BigUint::from(domain[*only].len()));
    }
    let mut values = vec![0; members.len()];
    let mut nodes = 0u64;
    fn go(
        depth: usize,
        members: &[usize],
        domain: &[Vec<ElementId>],
        rel: &HashMap<(usize, usize), &Vec<Vec<bool>>>,
        values: &mut Vec<ElementId>,
        nodes: &mut u64,
    ) -> Option<u64> {
        if depth == members.len() {
            return Some(1);
        }
        let mut count = 0u64;
        for &x in &domain[members[depth]] {
            *nodes += 1;
            if *nodes > BACKTRACK_NODE_CAP {
                return None;
            }
            let ok = (0..depth).all(|e| rel[&(members[e], members[depth])][values[e]][x]);
            if ok {
                values[depth] = x;
                count += go(depth + 1, members, domain, rel, values, nodes)?;
            }
        }
        Some(count)
    }
    go(0, members, domain, rel, &mut values, &mut nodes)
        .map(BigUint::from)
        .ok_or_else(|| {
            Error::cap(
                "pairwise backtracking",
                format!("more than {BACKTRACK_NODE_CAP} nodes"),
                BACKTRACK_NODE_CAP,
                "a smaller k or n",
            )
        })
}
