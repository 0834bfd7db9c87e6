//! Epimorphisms between finite algebras.
//!
//! Throughout, `Epi(B, A)` means surjective homomorphisms from `B` onto `A`.
//! They correspond to S-functions `R(A) → R(B)`: injective maps on primes
//! (plus the `∇` of primes) commuting with `ψ`, `∇` and `t`. The
//! Π-function of an S-function is the epimorphism `B → A` it induces by
//! joins; [`induced_s_function`] goes the other way.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{enumerate_automorphisms, ElementId, FiniteAlgebra, MAX_ASSIGNMENTS, MAX_TABLE_UNIVERSE};
use crate::error::{Error, Result};
use crate::par;
use crate::spectrum::{classify, prime_elements, prime_type, psi, LemmaCheck, Signature, Subtype};

/// `R(A) = Π(A) ∪ {∇p : p ∈ Π(A)}`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RSet {
    pub elements: Vec<ElementId>,
}

pub fn r_set(alg: &FiniteAlgebra) -> RSet {
    let mut set = BTreeSet::new();
    for p in prime_elements(alg) {
        set.insert(p.element);
        set.insert(alg.nabla(p.element));
    }
    RSet {
        elements: set.into_iter().collect(),
    }
}

/// A map `R(A) → R(B)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SFunction {
    pub map: BTreeMap<ElementId, ElementId>,
}

/// The epimorphism `B → A` built from an S-function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiFunction {
    pub map: Vec<ElementId>,
    pub source: SFunction,
}

/// First operation where `map: src → dst` fails to be a homomorphism of
/// `{0, 1, ∧, ∨, ∼, ∗, t}`.
pub fn hom_violation(src: &FiniteAlgebra, dst: &FiniteAlgebra, map: &[ElementId]) -> Option<String> {
    if map.len() != src.size() || map.iter().any(|&y| y >= dst.size()) {
        return Some("map has the wrong shape".into());
    }
    if map[src.bot()] != dst.bot() {
        return Some("0 is not preserved".into());
    }
    if map[src.top()] != dst.top() {
        return Some("1 is not preserved".into());
    }
    for x in src.elements() {
        let hx = map[x];
        if map[src.neg(x)] != dst.neg(hx) {
            return Some(format!("∼ at {}", src.label(x)));
        }
        if map[src.star(x)] != dst.star(hx) {
            return Some(format!("∗ at {}", src.label(x)));
        }
        if map[src.t(x)] != dst.t(hx) {
            return Some(format!("t at {}", src.label(x)));
        }
        for y in src.elements() {
            if map[src.meet(x, y)] != dst.meet(hx, map[y]) {
                return Some(format!("∧ at ({}, {})", src.label(x), src.label(y)));
            }
            if map[src.join(x, y)] != dst.join(hx, map[y]) {
                return Some(format!("∨ at ({}, {})", src.label(x), src.label(y)));
            }
        }
    }
    None
}

pub fn is_homomorphism(src: &FiniteAlgebra, dst: &FiniteAlgebra, map: &[ElementId]) -> bool {
    hom_violation(src, dst, map).is_none()
}

fn is_surjective(dst: &FiniteAlgebra, map: &[ElementId]) -> bool {
    let mut hit = vec![false; dst.size()];
    for &y in map {
        hit[y] = true;
    }
    hit.into_iter().all(|h| h)
}

/// All homomorphisms `B → A` (or only the surjective ones), sorted.
///
/// Images are assigned to the primes of `B` only; every other element is sent
/// to the join of the images of the primes below it, and the candidate is
/// then checked on every operation.
pub fn enumerate_homs(b: &FiniteAlgebra, a: &FiniteAlgebra, surjective_only: bool) -> Result<Vec<Vec<ElementId>>> {
    let primes: Vec<ElementId> = prime_elements(b).into_iter().map(|p| p.element).collect();
    let m = a.size() as u64;
    let total = match (0..primes.len()).try_fold(1u64, |acc, _| acc.checked_mul(m)) {
        Some(t) if t <= MAX_ASSIGNMENTS => t,
        _ => {
            return Err(Error::cap(
                "homomorphism search",
                format!("{}^{}", m, primes.len()),
                MAX_ASSIGNMENTS,
                "a smaller input",
            ))
        }
    };
    if surjective_only && a.size() > b.size() {
        return Ok(Vec::new());
    }
    let below: Vec<Vec<usize>> = b
        .elements()
        .map(|x| (0..primes.len()).filter(|&i| b.leq(primes[i], x)).collect())
        .collect();
    let mut found = par::filter_map_range(total, |idx| {
        let mut rest = idx;
        let images: Vec<ElementId> = (0..primes.len())
            .map(|_| {
                let y = (rest % m) as ElementId;
                rest /= m;
                y
            })
            .collect();
        let map: Vec<ElementId> = below
            .iter()
            .map(|ps| a.join_all(ps.iter().map(|&i| images[i])))
            .collect();
        if primes.iter().enumerate().any(|(i, &p)| map[p] != images[i]) {
            return None;
        }
        if surjective_only && !is_surjective(a, &map) {
            return None;
        }
        is_homomorphism(b, a, &map).then_some(map)
    });
    found.sort();
    found.dedup();
    Ok(found)
}

/// First of S1–S4 (and well-formedness) violated by `f: R(A) → R(B)`.
pub fn s_function_violation(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &SFunction) -> Option<String> {
    let ra = r_set(a);
    let rb = r_set(b);
    if f.map.keys().copied().collect::<Vec<_>>() != ra.elements {
        return Some("domain is not R(A)".into());
    }
    if f.map.values().any(|y| rb.elements.binary_search(y).is_err()) {
        return Some("image leaves R(B)".into());
    }
    let images: BTreeSet<ElementId> = f.map.values().copied().collect();
    if images.len() != f.map.len() {
        return Some("S1: not injective".into());
    }
    let (Ok(psi_a), Ok(psi_b)) = (psi(a), psi(b)) else {
        return Some("ψ undefined".into());
    };
    for (&p, &q) in &psi_a {
        let fp = f.map[&p];
        match psi_b.get(&fp) {
            None => return Some(format!("f({}) is not prime", a.label(p))),
            Some(&image) if image != f.map[&q] => return Some(format!("S2 at {}", a.label(p))),
            _ => {}
        }
        if f.map[&a.nabla(p)] != b.nabla(fp) {
            return Some(format!("S3 at {}", a.label(p)));
        }
        if f.map.get(&a.t(p)) != Some(&b.t(fp)) {
            return Some(format!("S4 at {}", a.label(p)));
        }
    }
    None
}

/// All S-functions `R(A) → R(B)`, sorted.
pub fn enumerate_s_functions(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Vec<SFunction>> {
    let psi_a = psi(a)?;
    let psi_b = psi(b)?;
    let pa: Vec<ElementId> = psi_a.keys().copied().collect();
    let pb: Vec<ElementId> = psi_b.keys().copied().collect();
    if pa.len() > pb.len() {
        return Ok(Vec::new());
    }
    let space = (0..pa.len()).try_fold(1u64, |acc, i| acc.checked_mul((pb.len() - i) as u64));
    if !matches!(space, Some(s) if s <= MAX_ASSIGNMENTS) {
        return Err(Error::cap(
            "S-function search",
            format!("{}!/{}!", pb.len(), pb.len() - pa.len()),
            MAX_ASSIGNMENTS,
            "a smaller input",
        ));
    }

    let mut out = Vec::new();
    let mut assigned: BTreeMap<ElementId, ElementId> = BTreeMap::new();
    let mut used = BTreeSet::new();
    search(a, b, &psi_a, &psi_b, &pa, &pb, 0, &mut assigned, &mut used, &mut out);
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    psi_a: &BTreeMap<ElementId, ElementId>,
    psi_b: &BTreeMap<ElementId, ElementId>,
    pa: &[ElementId],
    pb: &[ElementId],
    depth: usize,
    assigned: &mut BTreeMap<ElementId, ElementId>,
    used: &mut BTreeSet<ElementId>,
    out: &mut Vec<SFunction>,
) {
    if depth == pa.len() {
        if let Some(f) = extend_to_r_set(a, b, assigned) {
            out.push(f);
        }
        return;
    }
    let p = pa[depth];
    for &q in pb {
        if used.contains(&q) {
            continue;
        }
        assigned.insert(p, q);
        let consistent = assigned.iter().all(|(&x, &fx)| {
            let psi_ok = assigned.get(&psi_a[&x]).is_none_or(|&y| y == psi_b[&fx]);
            let t_ok = assigned.get(&a.t(x)).is_none_or(|&y| y == b.t(fx));
            psi_ok && t_ok
        });
        if consistent {
            used.insert(q);
            search(a, b, psi_a, psi_b, pa, pb, depth + 1, assigned, used, out);
            used.remove(&q);
        }
        assigned.remove(&p);
    }
}

/// Extends a prime-level map by `f(∇p) = ∇f(p)`; `None` on a clash or a loss
/// of injectivity.
fn extend_to_r_set(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    on_primes: &BTreeMap<ElementId, ElementId>,
) -> Option<SFunction> {
    let mut map = on_primes.clone();
    for (&p, &fp) in on_primes {
        let (x, y) = (a.nabla(p), b.nabla(fp));
        match map.get(&x) {
            Some(&prev) if prev != y => return None,
            _ => {
                map.insert(x, y);
            }
        }
    }
    let images: BTreeSet<ElementId> = map.values().copied().collect();
    (images.len() == map.len()).then_some(SFunction { map })
}

/// Builds `F_f: B → A`, `F_f(x) = ⋁{q ∈ R(A) : f(q) ≤ x}` when some prime of
/// `A` is sent below `x`, and `0` otherwise.
///
/// The join over `R(A)` and the join over primes only are both computed and
/// must agree; the result must be a surjective homomorphism.
pub fn pi_from_s(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &SFunction) -> Result<PiFunction> {
    let primes: BTreeSet<ElementId> = prime_elements(a).into_iter().map(|p| p.element).collect();
    let mut map = Vec::with_capacity(b.size());
    for x in b.elements() {
        let below: Vec<ElementId> = f.map.iter().filter(|(_, &fq)| b.leq(fq, x)).map(|(&q, _)| q).collect();
        let prime_below: Vec<ElementId> = below.iter().copied().filter(|q| primes.contains(q)).collect();
        if prime_below.is_empty() {
            map.push(a.bot());
            continue;
        }
        let over_r = a.join_all(below);
        let over_primes = a.join_all(prime_below);
        if over_r != over_primes {
            return Err(Error::invariant(
                "join forms",
                format!(
                    "at {}: join over R(A) is {}, over primes {}",
                    b.label(x),
                    a.label(over_r),
                    a.label(over_primes)
                ),
            ));
        }
        map.push(over_r);
    }
    if let Some(w) = hom_violation(b, a, &map) {
        return Err(Error::invariant("Π-function is a homomorphism", w));
    }
    if !is_surjective(a, &map) {
        return Err(Error::invariant("Π-function is onto", "some element of A is missed"));
    }
    Ok(PiFunction {
        map,
        source: f.clone(),
    })
}

/// The S-function of an epimorphism `h: B → A`: each prime `q` of `A` goes
/// to the unique prime `p` of `B` with `h(p) = q`, which is also the meet of
/// `h⁻¹(q)`.
pub fn induced_s_function(b: &FiniteAlgebra, a: &FiniteAlgebra, h: &[ElementId]) -> Result<SFunction> {
    let primes_b: Vec<ElementId> = prime_elements(b).into_iter().map(|p| p.element).collect();
    let mut on_primes = BTreeMap::new();
    for q in prime_elements(a).into_iter().map(|p| p.element) {
        let pre: Vec<ElementId> = primes_b.iter().copied().filter(|&p| h[p] == q).collect();
        let [p] = pre[..] else {
            return Err(Error::invariant(
                "unique prime preimage",
                format!("{} prime(s) of B map to {}", pre.len(), a.label(q)),
            ));
        };
        let p0 = b.meet_all(b.elements().filter(|&x| h[x] == q));
        if p0 != p {
            return Err(Error::invariant(
                "minimal preimage",
                format!("⋀h⁻¹({}) = {} but the prime preimage is {}", a.label(q), b.label(p0), b.label(p)),
            ));
        }
        on_primes.insert(q, p);
    }
    let f = extend_to_r_set(a, b, &on_primes)
        .ok_or_else(|| Error::invariant("induced S-function", "∇ extension is not injective"))?;
    if let Some(w) = s_function_violation(a, b, &f) {
        return Err(Error::invariant("induced S-function", w));
    }
    Ok(f)
}

/// Monotonicity on primes and preservation of prime type.
pub fn check_s_function_lemmas(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &SFunction) -> Result<LemmaCheck> {
    let psi_a = psi(a)?;
    let psi_b = psi(b)?;
    let witness = psi_a.keys().find_map(|&p| {
        let fp = f.map[&p];
        if prime_type(a, &psi_a, p) != prime_type(b, &psi_b, fp) {
            return Some(format!("type changes at {}", a.label(p)));
        }
        psi_a
            .keys()
            .find(|&&q| a.leq(p, q) && !b.leq(fp, f.map[&q]))
            .map(|&q| format!("{} ≤ {} not preserved", a.label(p), a.label(q)))
    });
    Ok(LemmaCheck::from_witness(witness))
}

/// Every prime of `A` has exactly one prime preimage under `h`.
pub fn check_unique_preimages(b: &FiniteAlgebra, a: &FiniteAlgebra, h: &[ElementId]) -> LemmaCheck {
    let primes_b: Vec<ElementId> = prime_elements(b).into_iter().map(|p| p.element).collect();
    let witness = prime_elements(a).into_iter().find_map(|q| {
        let n = primes_b.iter().filter(|&&p| h[p] == q.element).count();
        (n != 1).then(|| format!("{} has {n} prime preimages", a.label(q.element)))
    });
    LemmaCheck::from_witness(witness)
}

/// `n! / (n − t)!`, zero when `t > n`.
pub fn falling(n: u64, t: u64) -> BigUint {
    if t > n {
        return BigUint::zero();
    }
    ((n - t + 1)..=n).fold(BigUint::one(), |acc, x| acc * x)
}

pub fn factorial(n: u64) -> BigUint {
    falling(n, n)
}

/// Which subtype count sits in the denominator of the seventh epi factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeventhFactor {
    /// `(2s₃₂)! / (2s₃₂ − t₃₃)!`, as printed.
    Printed,
    /// `(2s₃₂)! / (2s₃₂ − t₃₂)!`.
    T32,
}

/// `|Epi(B, A)|` from the signatures of `B` (`s`) and `A` (`t`) as the
/// printed eight-factor product.
pub fn count_epis_formula(s: &Signature, t: &Signature) -> BigUint {
    count_epis_formula_with(s, t, SeventhFactor::Printed)
}

pub fn count_epis_formula_with(s: &Signature, t: &Signature, seventh: SeventhFactor) -> BigUint {
    let t7 = match seventh {
        SeventhFactor::Printed => t.t33,
        SeventhFactor::T32 => t.t32,
    };
    falling(s.t11, t.t11)
        * falling(2 * s.t12, t.t12)
        * falling(s.t21, t.t21)
        * falling(s.t22, t.t22)
        * falling(2 * s.t23, t.t23)
        * falling(2 * s.t31, t.t31)
        * falling(2 * s.t32, t7)
        * falling(4 * s.t33, t.t33)
}

/// The printed automorphism product
/// `s₁₁!·(2s₁₂)!·s₂₁!·s₂₂!·(2s₂₃)!·(2s₃₁)!·(2s₃₂)!·(4s₃₃)!`.
pub fn count_auts_formula(s: &Signature) -> BigUint {
    factorial(s.t11)
        * factorial(2 * s.t12)
        * factorial(s.t21)
        * factorial(s.t22)
        * factorial(2 * s.t23)
        * factorial(2 * s.t31)
        * factorial(2 * s.t32)
        * factorial(4 * s.t33)
}

/// Number of structure-preserving self-maps of one component of a subtype.
pub fn component_symmetry(sub: Subtype) -> u64 {
    match sub {
        Subtype::S11 | Subtype::S22 | Subtype::S23 => 1,
        Subtype::S12 | Subtype::S21 | Subtype::S31 | Subtype::S32 => 2,
        Subtype::S33 => 4,
    }
}

/// Epimorphisms counted as injections of components, each weighted by the
/// component's own symmetries: `∏ symᵗ · s!/(s − t)!`.
pub fn count_epis_repaired(s: &Signature, t: &Signature) -> BigUint {
    Subtype::ALL
        .iter()
        .map(|&sub| {
            BigUint::from(component_symmetry(sub)).pow(t.get(sub) as u32) * falling(s.get(sub), t.get(sub))
        })
        .product()
}

/// `∏ symˢ · s!`.
pub fn count_auts_repaired(s: &Signature) -> BigUint {
    count_epis_repaired(s, s)
}

/// Varieties where `t` is the identity and the epi count collapses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Specialization {
    Mpm,
    Lukasiewicz,
    Boolean,
}

impl Specialization {
    pub fn name(self) -> &'static str {
        match self {
            Specialization::Mpm => "mpM",
            Specialization::Lukasiewicz => "three-valued Łukasiewicz",
            Specialization::Boolean => "Boolean",
        }
    }

    /// Subtypes allowed in signatures of this variety.
    pub fn subtypes(self) -> &'static [Subtype] {
        match self {
            Specialization::Mpm => &[Subtype::S11, Subtype::S22, Subtype::S32],
            Specialization::Lukasiewicz => &[Subtype::S11, Subtype::S22],
            Specialization::Boolean => &[Subtype::S11],
        }
    }

    pub fn applies_to(self, sig: &Signature) -> bool {
        Subtype::ALL
            .iter()
            .all(|s| sig.get(*s) == 0 || self.subtypes().contains(s))
    }
}

/// The collapsed product for a `t = id` variety. With `t` the identity,
/// comparable `ψ`-pairs are subtype 2.2 and incomparable ones 3.2, so the
/// factors are `f(1.1)`, `f(2.2)` and `(2s₃₂)!/(2s₃₂ − t₃₂)!` as applicable.
pub fn count_epis_specialized(kind: Specialization, s: &Signature, t: &Signature) -> BigUint {
    let mut out = falling(s.t11, t.t11);
    if kind != Specialization::Boolean {
        out *= falling(s.t22, t.t22);
    }
    if kind == Specialization::Mpm {
        out *= falling(2 * s.t32, t.t32);
    }
    out
}

/// A formula value: an exact integer or a fraction that does not reduce to
/// one (kept unreduced as printed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaValue {
    Integer(BigUint),
    NonIntegral { numerator: String, denominator: String },
}

impl FormulaValue {
    pub fn render(&self) -> String {
        match self {
            FormulaValue::Integer(v) => v.to_string(),
            FormulaValue::NonIntegral { numerator, denominator } => format!("{numerator}/{denominator}"),
        }
    }
}

/// One oracle-versus-formula comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountAudit {
    pub quantity: String,
    pub oracle: String,
    pub formula: String,
    pub integral: bool,
    pub agree: bool,
    pub locus: String,
}

impl CountAudit {
    pub fn new(quantity: impl Into<String>, locus: impl Into<String>, oracle: &BigUint, formula: FormulaValue) -> Self {
        let (integral, agree) = match &formula {
            FormulaValue::Integer(v) => (true, v == oracle),
            FormulaValue::NonIntegral { .. } => (false, false),
        };
        CountAudit {
            quantity: quantity.into(),
            oracle: oracle.to_string(),
            formula: formula.render(),
            integral,
            agree,
            locus: locus.into(),
        }
    }
}

fn signature_of(alg: &FiniteAlgebra, which: &str) -> Result<Signature> {
    classify(alg)?.signature.ok_or_else(|| {
        Error::invalid(
            which,
            "closed-form counts need every spectrum component classified (t-orbits of length ≤ 2)",
        )
    })
}

/// Compares the closed-form counts with enumeration for `B → A`.
///
/// Reported: the printed epi product and its `t₃₂` reading, the repaired
/// epi count, the number of S-functions, the printed and repaired
/// automorphism counts of `B` (and of `A` when it differs), and every
/// `t = id` specialization that applies to both signatures.
pub fn audit_counts(b: &FiniteAlgebra, a: &FiniteAlgebra) -> Result<Vec<CountAudit>> {
    let sb = signature_of(b, "from")?;
    let sa = signature_of(a, "onto")?;
    let epi = BigUint::from(enumerate_homs(b, a, true)?.len());
    let s_funcs = BigUint::from(enumerate_s_functions(a, b)?.len());
    let int = FormulaValue::Integer;

    let mut out = vec![
        CountAudit::new("|Epi(B,A)|", "epi count, printed product", &epi, int(count_epis_formula(&sb, &sa))),
        CountAudit::new(
            "|Epi(B,A)|",
            "epi count, seventh factor read with t32",
            &epi,
            int(count_epis_formula_with(&sb, &sa, SeventhFactor::T32)),
        ),
        CountAudit::new("|Epi(B,A)|", "epi count, component symmetries", &epi, int(count_epis_repaired(&sb, &sa))),
        CountAudit::new("|Epi(B,A)|", "number of S-functions R(A)→R(B)", &epi, int(s_funcs)),
    ];
    for kind in [Specialization::Mpm, Specialization::Lukasiewicz, Specialization::Boolean] {
        if kind.applies_to(&sb) && kind.applies_to(&sa) {
            out.push(CountAudit::new(
                "|Epi(B,A)|",
                format!("epi count, {} specialization", kind.name()),
                &epi,
                int(count_epis_specialized(kind, &sb, &sa)),
            ));
        }
    }
    let mut aut_targets = vec![("B", b, sb)];
    if a.to_tables() != b.to_tables() {
        aut_targets.push(("A", a, sa));
    }
    for (name, alg, sig) in aut_targets {
        let aut = BigUint::from(enumerate_automorphisms(alg, MAX_TABLE_UNIVERSE)?.len());
        out.push(CountAudit::new(
            format!("|Aut({name})|"),
            "aut count, printed product",
            &aut,
            int(count_auts_formula(&sig)),
        ));
        out.push(CountAudit::new(
            format!("|Aut({name})|"),
            "aut count, component symmetries",
            &aut,
            int(count_auts_repaired(&sig)),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_cyclic, build_generator, build_product, FactorSpec, ProductSpec, TMode};
    use crate::GeneratorKind::{self, *};

    fn gen(kind: GeneratorKind) -> FiniteAlgebra {
        build_generator(kind)
    }

    fn power_id(kind: GeneratorKind, copies: u32) -> FiniteAlgebra {
        build_product(&ProductSpec {
            k: 1,
            factors: vec![FactorSpec::new(kind, 1, copies, TMode::Identity)],
        })
        .unwrap()
        .algebra
    }

    fn id(alg: &FiniteAlgebra, label: &str) -> ElementId {
        alg.elements().find(|&x| alg.label(x) == label).unwrap()
    }

    #[test]
    fn r_sets() {
        let t4 = gen(T4);
        assert_eq!(r_set(&t4).elements, vec![id(&t4, "a"), id(&t4, "b"), t4.top()]);
        assert_eq!(r_set(&gen(T2)).elements, vec![1]);
        let t3 = gen(T3);
        assert_eq!(r_set(&t3).elements, vec![id(&t3, "a"), t3.top()]);
    }

    #[test]
    fn s_functions_of_small_pairs() {
        let t4 = gen(T4);
        let fs = enumerate_s_functions(&t4, &t4).unwrap();
        assert_eq!(fs.len(), 2);
        let pis: Vec<Vec<ElementId>> = fs.iter().map(|f| pi_from_s(&t4, &t4, f).unwrap().map).collect();
        assert!(pis.contains(&vec![0, 1, 2, 3]));
        assert!(pis.contains(&vec![0, 2, 1, 3]));
        assert!(enumerate_s_functions(&gen(T3), &gen(T2)).unwrap().is_empty());
        // The chain's middle element is its own negation, so it cannot map
        // onto the two-element chain.
        assert!(enumerate_s_functions(&gen(T2), &gen(T3)).unwrap().is_empty());
        assert!(enumerate_homs(&gen(T3), &gen(T2), true).unwrap().is_empty());
    }

    #[test]
    fn homs_examples() {
        let t3 = gen(T3);
        let sq = power_id(T3, 2);
        assert_eq!(enumerate_homs(&sq, &t3, true).unwrap().len(), 2);
        assert_eq!(enumerate_homs(&gen(T4), &gen(T4), true).unwrap().len(), 2);
        assert!(enumerate_homs(&gen(T2), &gen(T4), true).unwrap().is_empty());
        // T2 embeds in T3 (as {0, 1}) but not onto it
        assert_eq!(enumerate_homs(&gen(T2), &t3, false).unwrap(), vec![vec![0, 2]]);
    }

    #[test]
    fn induced_projection() {
        let t3 = gen(T3);
        let sq = power_id(T3, 2);
        for h in enumerate_homs(&sq, &t3, true).unwrap() {
            let f = induced_s_function(&sq, &t3, &h).unwrap();
            assert_eq!(pi_from_s(&t3, &sq, &f).unwrap().map, h);
            assert!(check_unique_preimages(&sq, &t3, &h).holds);
        }
        let first = id(&sq, "(1,0)");
        let h = enumerate_homs(&sq, &t3, true)
            .unwrap()
            .into_iter()
            .find(|h| h[first] == t3.top())
            .unwrap();
        let f = induced_s_function(&sq, &t3, &h).unwrap();
        assert_eq!(f.map[&id(&t3, "a")], id(&sq, "(a,0)"));
        assert_eq!(f.map[&t3.top()], first);
    }

    #[test]
    fn bad_s_function_is_reported() {
        let t4 = gen(T4);
        let f = SFunction {
            map: [(1, 1), (2, 1), (3, 3)].into_iter().collect(),
        };
        assert_eq!(s_function_violation(&t4, &t4, &f).unwrap(), "S1: not injective");
    }

    #[test]
    fn printed_formulas() {
        let zero = Signature::default();
        assert_eq!(count_epis_formula(&zero, &zero), BigUint::one());
        let b = Signature::default().with(Subtype::S11, 5);
        let a = Signature::default().with(Subtype::S11, 2);
        assert_eq!(count_epis_formula(&b, &a), BigUint::from(20u32));
        let one32 = Signature::default().with(Subtype::S32, 1);
        assert_eq!(count_epis_formula(&one32, &one32), BigUint::one());
        assert_eq!(count_epis_formula_with(&one32, &one32, SeventhFactor::T32), BigUint::from(2u32));
        assert_eq!(count_auts_formula(&one32), BigUint::from(2u32));
        let one33 = Signature::default().with(Subtype::S33, 1);
        assert_eq!(count_auts_formula(&one33), BigUint::from(24u32));
        assert_eq!(count_auts_repaired(&one33), BigUint::from(4u32));
        assert_eq!(count_auts_formula(&zero), BigUint::one());
        assert_eq!(falling(2, 3), BigUint::zero());
    }

    #[test]
    fn audit_t4() {
        let t4 = gen(T4);
        let audit = audit_counts(&t4, &t4).unwrap();
        assert_eq!(audit[0].oracle, "2");
        assert_eq!(audit[0].formula, "1");
        assert!(!audit[0].agree);
        assert!(audit[1].agree && audit[2].agree && audit[3].agree);
    }

    #[test]
    fn audit_swap_square_of_diamond() {
        let alg = build_cyclic(T4, 2);
        let audit = audit_counts(&alg, &alg).unwrap();
        let printed = audit.iter().find(|c| c.locus == "aut count, printed product").unwrap();
        assert_eq!((printed.oracle.as_str(), printed.formula.as_str(), printed.agree), ("4", "24", false));
        let repaired = audit.iter().find(|c| c.locus == "aut count, component symmetries").unwrap();
        assert!(repaired.agree);
    }

    #[test]
    fn specializations() {
        let b = Signature::default().with(Subtype::S11, 2);
        let a = Signature::default().with(Subtype::S11, 1);
        assert!(Specialization::Boolean.applies_to(&b));
        assert_eq!(count_epis_specialized(Specialization::Boolean, &b, &a), BigUint::from(2u32));
        let sq = classify(&power_id(T3, 2)).unwrap().signature.unwrap();
        let t3 = classify(&gen(T3)).unwrap().signature.unwrap();
        assert_eq!(count_epis_specialized(Specialization::Lukasiewicz, &sq, &t3), BigUint::from(2u32));
    }
}
