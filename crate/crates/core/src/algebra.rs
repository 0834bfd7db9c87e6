//! Finite algebras as explicit operation tables.
//!
//! A [`FiniteAlgebra`] carries the lattice operations, the De Morgan
//! negation `neg`, the pseudocomplement `star` and the automorphism `t` of a
//! k-cyclic modal pseudocomplemented De Morgan algebra. Everything else in the
//! crate (spectra, morphisms, free algebras) reads these tables and nothing
//! else.
//!
//! Elements are plain indices into the universe. Products of the three
//! generating chains are laid out in lexicographic order of their coordinate
//! tuples, with factor-local orders `0 < a < 1` (three-element chain) and
//! `0 < a < b < 1` (four-element diamond).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Index of an element inside a specific algebra's universe.
pub type ElementId = usize;

/// Largest universe for which full binary tables are materialised.
pub const MAX_TABLE_UNIVERSE: usize = 4096;

/// Default cap on universe size for exhaustive subalgebra and automorphism
/// enumeration.
pub const DEFAULT_ENUM_CAP: usize = 64;
/// Upper bound on the number of image assignments tried by the isomorphism,
/// automorphism and homomorphism searches.
pub const MAX_ASSIGNMENTS: u64 = 1 << 26;

/// The three subdirectly irreducible building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorKind {
    T2,
    T3,
    T4,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [GeneratorKind::T2, GeneratorKind::T3, GeneratorKind::T4];

    pub fn size(self) -> usize {
        match self {
            GeneratorKind::T2 => 2,
            GeneratorKind::T3 => 3,
            GeneratorKind::T4 => 4,
        }
    }

    /// The numeric subscript (2, 3 or 4), which is also the size.
    pub fn index(self) -> u32 {
        self.size() as u32
    }

    pub fn from_index(i: u32) -> Option<Self> {
        match i {
            2 => Some(GeneratorKind::T2),
            3 => Some(GeneratorKind::T3),
            4 => Some(GeneratorKind::T4),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::T2 => "T2",
            GeneratorKind::T3 => "T3",
            GeneratorKind::T4 => "T4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "T2" | "t2" | "2" => Some(GeneratorKind::T2),
            "T3" | "t3" | "3" => Some(GeneratorKind::T3),
            "T4" | "t4" | "4" => Some(GeneratorKind::T4),
            _ => None,
        }
    }

    fn labels(self) -> &'static [&'static str] {
        match self {
            GeneratorKind::T2 => &["0", "1"],
            GeneratorKind::T3 => &["0", "a", "1"],
            GeneratorKind::T4 => &["0", "a", "b", "1"],
        }
    }

    fn meet(self, x: usize, y: usize) -> usize {
        match self {
            GeneratorKind::T4 => {
                // 0 = 00, a = 01, b = 10, 1 = 11
                x & y
            }
            _ => x.min(y),
        }
    }

    fn join(self, x: usize, y: usize) -> usize {
        match self {
            GeneratorKind::T4 => x | y,
            _ => x.max(y),
        }
    }

    fn neg(self, x: usize) -> usize {
        match self {
            GeneratorKind::T2 => 1 - x,
            GeneratorKind::T3 => 2 - x,
            GeneratorKind::T4 => [3, 1, 2, 0][x],
        }
    }

    fn star(self, x: usize) -> usize {
        match self {
            GeneratorKind::T2 => 1 - x,
            GeneratorKind::T3 => [2, 0, 0][x],
            GeneratorKind::T4 => [3, 2, 1, 0][x],
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite algebra `(A, ∧, ∨, ∼, ∗, t, 0, 1)` with declared period `k`.
///
/// Tables are immutable after construction. Construction validates shapes and
/// ranges only; use [`check_axioms`] to verify the equational theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    meet: Vec<ElementId>,
    join: Vec<ElementId>,
    neg: Vec<ElementId>,
    star: Vec<ElementId>,
    t: Vec<ElementId>,
    bot: ElementId,
    top: ElementId,
    k: u32,
    labels: Vec<String>,
}

/// Raw tables as they appear in the explicit JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraTables {
    pub universe: usize,
    pub meet: Vec<Vec<ElementId>>,
    pub join: Vec<Vec<ElementId>>,
    pub neg: Vec<ElementId>,
    pub star: Vec<ElementId>,
    pub t: Vec<ElementId>,
    pub bot: ElementId,
    pub top: ElementId,
    pub k: u32,
}

impl FiniteAlgebra {
    /// Builds an algebra from explicit tables, rejecting malformed shapes.
    pub fn from_tables(tables: &AlgebraTables) -> Result<Self> {
        let n = tables.universe;
        if n < 2 {
            return Err(Error::invalid("universe", "universe must have at least 2 elements"));
        }
        if n > MAX_TABLE_UNIVERSE {
            return Err(Error::cap("explicit tables", n, MAX_TABLE_UNIVERSE, "a smaller universe"));
        }
        if tables.k == 0 {
            return Err(Error::invalid("k", "period k must be positive"));
        }
        let flatten = |name: &str, rows: &[Vec<ElementId>]| -> Result<Vec<ElementId>> {
            if rows.len() != n {
                return Err(Error::invalid(
                    name,
                    format!("expected {n} rows, found {}", rows.len()),
                ));
            }
            let mut flat = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::invalid(
                        format!("{name}[{i}]"),
                        format!("expected {n} columns, found {}", row.len()),
                    ));
                }
                for (j, &v) in row.iter().enumerate() {
                    if v >= n {
                        return Err(Error::invalid(
                            format!("{name}[{i}][{j}]"),
                            format!("element {v} outside universe of size {n}"),
                        ));
                    }
                }
                flat.extend_from_slice(row);
            }
            Ok(flat)
        };
        let unary = |name: &str, table: &[ElementId]| -> Result<Vec<ElementId>> {
            if table.len() != n {
                return Err(Error::invalid(
                    name,
                    format!("expected {n} entries, found {}", table.len()),
                ));
            }
            if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(Error::invalid(
                    format!("{name}[{i}]"),
                    format!("element {v} outside universe of size {n}"),
                ));
            }
            Ok(table.to_vec())
        };
        for (name, v) in [("bot", tables.bot), ("top", tables.top)] {
            if v >= n {
                return Err(Error::invalid(name, format!("element {v} outside universe of size {n}")));
            }
        }
        Ok(FiniteAlgebra {
            size: n,
            meet: flatten("meet", &tables.meet)?,
            join: flatten("join", &tables.join)?,
            neg: unary("neg", &tables.neg)?,
            star: unary("star", &tables.star)?,
            t: unary("t", &tables.t)?,
            bot: tables.bot,
            top: tables.top,
            k: tables.k,
            labels: (0..n).map(|i| i.to_string()).collect(),
        })
    }

    /// Exports the tables in explicit JSON shape.
    pub fn to_tables(&self) -> AlgebraTables {
        let n = self.size;
        AlgebraTables {
            universe: n,
            meet: self.meet.chunks(n).map(|r| r.to_vec()).collect(),
            join: self.join.chunks(n).map(|r| r.to_vec()).collect(),
            neg: self.neg.clone(),
            star: self.star.clone(),
            t: self.t.clone(),
            bot: self.bot,
            top: self.top,
            k: self.k,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.size, "one label per element");
        self.labels = labels;
        self
    }

    /// Same tables with a different declared period.
    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    /// Replaces the automorphism table. The result is not re-validated.
    pub fn with_t(mut self, t: Vec<ElementId>) -> Self {
        assert_eq!(t.len(), self.size);
        self.t = t;
        self
    }

    /// Replaces the pseudocomplement table. The result is not re-validated.
    pub fn with_star(mut self, star: Vec<ElementId>) -> Self {
        assert_eq!(star.len(), self.size);
        self.star = star;
        self
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn meet(&self, x: ElementId, y: ElementId) -> ElementId {
        self.meet[x * self.size + y]
    }

    #[inline]
    pub fn join(&self, x: ElementId, y: ElementId) -> ElementId {
        self.join[x * self.size + y]
    }

    #[inline]
    pub fn neg(&self, x: ElementId) -> ElementId {
        self.neg[x]
    }

    #[inline]
    pub fn star(&self, x: ElementId) -> ElementId {
        self.star[x]
    }

    #[inline]
    pub fn t(&self, x: ElementId) -> ElementId {
        self.t[x]
    }

    #[inline]
    pub fn bot(&self) -> ElementId {
        self.bot
    }

    #[inline]
    pub fn top(&self) -> ElementId {
        self.top
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `x ≤ y` iff `x ∧ y = x`.
    #[inline]
    pub fn leq(&self, x: ElementId, y: ElementId) -> bool {
        self.meet(x, y) == x
    }

    #[inline]
    pub fn lt(&self, x: ElementId, y: ElementId) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: ElementId, y: ElementId) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.size
    }

    pub fn label(&self, x: ElementId) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn t_table(&self) -> &[ElementId] {
        &self.t
    }

    pub fn neg_table(&self) -> &[ElementId] {
        &self.neg
    }

    pub fn star_table(&self) -> &[ElementId] {
        &self.star
    }

    /// `∇x = ∼(∼x ∧ x∗)`.
    pub fn nabla(&self, x: ElementId) -> ElementId {
        self.neg(self.meet(self.neg(x), self.star(x)))
    }

    /// `Δx = ∼∇∼x`.
    pub fn delta(&self, x: ElementId) -> ElementId {
        self.neg(self.nabla(self.neg(x)))
    }

    /// Join of a set of elements; the empty join is `0`.
    pub fn join_all<I: IntoIterator<Item = ElementId>>(&self, xs: I) -> ElementId {
        xs.into_iter().fold(self.bot, |acc, x| self.join(acc, x))
    }

    /// Meet of a set of elements; the empty meet is `1`.
    pub fn meet_all<I: IntoIterator<Item = ElementId>>(&self, xs: I) -> ElementId {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// `tⁱ(x)`.
    pub fn t_pow(&self, x: ElementId, i: u32) -> ElementId {
        (0..i).fold(x, |acc, _| self.t(acc))
    }

    /// The principal filter `[x) = {y : x ≤ y}`, sorted.
    pub fn up_set(&self, x: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&y| self.leq(x, y)).collect()
    }

    /// Restricts the algebra to a subuniverse, renumbering elements in
    /// increasing order of their old ids and keeping their labels.
    pub fn subalgebra(&self, elems: &[ElementId]) -> Result<FiniteAlgebra> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut index = vec![usize::MAX; self.size];
        for (i, &x) in sorted.iter().enumerate() {
            index[x] = i;
        }
        let m = sorted.len();
        let map = |x: ElementId, what: &str| -> Result<ElementId> {
            match index[x] {
                usize::MAX => Err(Error::invalid(
                    "subuniverse",
                    format!("not closed under {what}: produces {}", self.label(x)),
                )),
                i => Ok(i),
            }
        };
        let mut meet = Vec::with_capacity(m * m);
        let mut join = Vec::with_capacity(m * m);
        for &x in &sorted {
            for &y in &sorted {
                meet.push(map(self.meet(x, y), "meet")?);
                join.push(map(self.join(x, y), "join")?);
            }
        }
        let unary = |f: &dyn Fn(ElementId) -> ElementId, what: &str| -> Result<Vec<ElementId>> {
            sorted.iter().map(|&x| map(f(x), what)).collect()
        };
        Ok(FiniteAlgebra {
            size: m,
            neg: unary(&|x| self.neg(x), "neg")?,
            star: unary(&|x| self.star(x), "star")?,
            t: unary(&|x| self.t(x), "t")?,
            meet,
            join,
            bot: map(self.bot, "constants")?,
            top: map(self.top, "constants")?,
            k: self.k,
            labels: sorted.iter().map(|&x| self.labels[x].clone()).collect(),
        })
    }
}

/// How `t` acts on one factor of a product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TMode {
    /// Right cyclic shift of the factor's `d` coordinates.
    Shift,
    Identity,
    /// A permutation of the factor's `kindᵈ` elements, indexed in the
    /// factor's own lexicographic order.
    Explicit(Vec<ElementId>),
}

/// One factor `T_{kind,d}` of a product, repeated `copies` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpec {
    pub kind: GeneratorKind,
    pub d: u32,
    pub copies: u32,
    pub t: TMode,
}

impl FactorSpec {
    pub fn new(kind: GeneratorKind, d: u32, copies: u32, t: TMode) -> Self {
        FactorSpec { kind, d, copies, t }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    pub k: u32,
    pub factors: Vec<FactorSpec>,
}

/// Mixed-radix codec between element ids and coordinate tuples over the
/// generators. The first coordinate is the most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codec {
    kinds: Vec<GeneratorKind>,
}

impl Codec {
    pub fn new(kinds: Vec<GeneratorKind>) -> Self {
        Codec { kinds }
    }

    pub fn kinds(&self) -> &[GeneratorKind] {
        &self.kinds
    }

    pub fn universe(&self) -> usize {
        self.kinds.iter().map(|k| k.size()).product()
    }

    pub fn encode(&self, coords: &[usize]) -> ElementId {
        debug_assert_eq!(coords.len(), self.kinds.len());
        coords
            .iter()
            .zip(&self.kinds)
            .fold(0, |acc, (&c, k)| acc * k.size() + c)
    }

    pub fn decode(&self, mut x: ElementId) -> Vec<usize> {
        let mut out = vec![0; self.kinds.len()];
        for (slot, k) in out.iter_mut().zip(&self.kinds).rev() {
            *slot = x % k.size();
            x /= k.size();
        }
        out
    }

    pub fn label(&self, x: ElementId) -> String {
        let coords = self.decode(x);
        let parts: Vec<&str> = coords
            .iter()
            .zip(&self.kinds)
            .map(|(&c, k)| k.labels()[c])
            .collect();
        if parts.len() == 1 {
            parts[0].to_string()
        } else {
            format!("({})", parts.join(","))
        }
    }
}

/// A product algebra together with its coordinate codec.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: FiniteAlgebra,
    pub codec: Codec,
}

/// `T₂`, `T₃` or `T₄` with `t` the identity and `k = 1`.
pub fn build_generator(kind: GeneratorKind) -> FiniteAlgebra {
    build_cyclic(kind, 1)
}

/// `T_{kind,d}`: `d`-tuples over the generator, pointwise operations, `t` the
/// right cyclic shift, `k = d`.
pub fn build_cyclic(kind: GeneratorKind, d: u32) -> FiniteAlgebra {
    build_product(&ProductSpec {
        k: d.max(1),
        factors: vec![FactorSpec::new(kind, d.max(1), 1, TMode::Shift)],
    })
    .expect("cyclic powers are well formed")
    .algebra
}

pub fn build_product(spec: &ProductSpec) -> Result<Product> {
    if spec.k == 0 {
        return Err(Error::invalid("k", "period k must be positive"));
    }
    if spec.factors.is_empty() {
        return Err(Error::invalid("factors", "at least one factor is required"));
    }
    // Each block is one copy of one factor: (kind, d, t mode).
    let mut kinds = Vec::new();
    let mut blocks: Vec<(usize, &FactorSpec)> = Vec::new();
    for (fi, f) in spec.factors.iter().enumerate() {
        let locus = format!("factors[{fi}]");
        if f.d == 0 {
            return Err(Error::invalid(locus, "d must be positive"));
        }
        if f.copies == 0 {
            return Err(Error::invalid(locus, "copies must be at least 1"));
        }
        if !spec.k.is_multiple_of(f.d) {
            return Err(Error::invalid(locus, format!("d = {} does not divide k = {}", f.d, spec.k)));
        }
        if let TMode::Explicit(table) = &f.t {
            let block = f.kind.size().checked_pow(f.d).unwrap_or(usize::MAX);
            if table.len() != block {
                return Err(Error::invalid(
                    format!("{locus}.t"),
                    format!("expected {block} entries, found {}", table.len()),
                ));
            }
            if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= block) {
                return Err(Error::invalid(
                    format!("{locus}.t[{i}]"),
                    format!("element {v} outside factor of size {block}"),
                ));
            }
        }
        for _ in 0..f.copies {
            blocks.push((kinds.len(), f));
            kinds.extend(std::iter::repeat_n(f.kind, f.d as usize));
        }
    }
    let mut universe: usize = 1;
    for k in &kinds {
        universe = universe.saturating_mul(k.size());
    }
    if universe > MAX_TABLE_UNIVERSE {
        return Err(Error::cap("product universe", universe, MAX_TABLE_UNIVERSE, "a smaller product"));
    }
    let codec = Codec::new(kinds.clone());
    let coords: Vec<Vec<usize>> = (0..universe).map(|x| codec.decode(x)).collect();

    let pointwise2 = |op: fn(GeneratorKind, usize, usize) -> usize| -> Vec<ElementId> {
        let mut table = Vec::with_capacity(universe * universe);
        let mut buf = vec![0; kinds.len()];
        for x in &coords {
            for y in &coords {
                for (i, k) in kinds.iter().enumerate() {
                    buf[i] = op(*k, x[i], y[i]);
                }
                table.push(codec.encode(&buf));
            }
        }
        table
    };
    let pointwise1 = |op: fn(GeneratorKind, usize) -> usize| -> Vec<ElementId> {
        coords
            .iter()
            .map(|x| {
                let v: Vec<usize> = kinds.iter().zip(x).map(|(k, &c)| op(*k, c)).collect();
                codec.encode(&v)
            })
            .collect()
    };

    let t: Vec<ElementId> = coords
        .iter()
        .map(|x| {
            let mut out = x.clone();
            for &(start, f) in &blocks {
                let d = f.d as usize;
                let slice = &x[start..start + d];
                match &f.t {
                    TMode::Identity => {}
                    TMode::Shift => {
                        for j in 0..d {
                            out[start + (j + 1) % d] = slice[j];
                        }
                    }
                    TMode::Explicit(table) => {
                        let local = Codec::new(vec![f.kind; d]);
                        let image = local.decode(table[local.encode(slice)]);
                        out[start..start + d].copy_from_slice(&image);
                    }
                }
            }
            codec.encode(&out)
        })
        .collect();

    let algebra = FiniteAlgebra {
        size: universe,
        meet: pointwise2(GeneratorKind::meet),
        join: pointwise2(GeneratorKind::join),
        neg: pointwise1(GeneratorKind::neg),
        star: pointwise1(GeneratorKind::star),
        t,
        bot: 0,
        top: universe - 1,
        k: spec.k,
        labels: (0..universe).map(|x| codec.label(x)).collect(),
    };
    if spec.factors.iter().any(|f| matches!(f.t, TMode::Explicit(_))) {
        let report = check_axioms(&algebra);
        let failure = report
            .failures()
            .next()
            .map(|(name, check)| format!("explicit t breaks {name} (witness {:?})", check.witness));
        if let Some(message) = failure {
            return Err(Error::invalid("factors.t", message));
        }
    }
    Ok(Product { algebra, codec })
}

/// Outcome of one axiom check with the lexicographically first counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub holds: bool,
    pub witness: Option<Vec<ElementId>>,
}

impl AxiomCheck {
    fn from_witness(witness: Option<Vec<ElementId>>) -> Self {
        AxiomCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub lattice: AxiomCheck,
    pub distributive: AxiomCheck,
    pub de_morgan: AxiomCheck,
    pub p1: AxiomCheck,
    pub p2: AxiomCheck,
    pub p3: AxiomCheck,
    pub tm: AxiomCheck,
    pub t_automorphism: AxiomCheck,
    pub t_period: AxiomCheck,
}

impl AxiomReport {
    pub fn checks(&self) -> [(&'static str, &AxiomCheck); 9] {
        [
            ("lattice", &self.lattice),
            ("distributive", &self.distributive),
            ("de_morgan", &self.de_morgan),
            ("P1", &self.p1),
            ("P2", &self.p2),
            ("P3", &self.p3),
            ("tm", &self.tm),
            ("t_automorphism", &self.t_automorphism),
            ("t_period", &self.t_period),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &AxiomCheck)> {
        self.checks().into_iter().filter(|(_, c)| !c.holds)
    }
}

fn first1(n: usize, bad: impl Fn(usize) -> bool) -> Option<Vec<ElementId>> {
    (0..n).find(|&x| bad(x)).map(|x| vec![x])
}

fn first2(n: usize, bad: impl Fn(usize, usize) -> bool) -> Option<Vec<ElementId>> {
    for x in 0..n {
        for y in 0..n {
            if bad(x, y) {
                return Some(vec![x, y]);
            }
        }
    }
    None
}

fn first3(n: usize, bad: impl Fn(usize, usize, usize) -> bool) -> Option<Vec<ElementId>> {
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if bad(x, y, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}

/// Checks every defining identity exhaustively over the universe.
pub fn check_axioms(alg: &FiniteAlgebra) -> AxiomReport {
    let n = alg.size();
    let a = alg;

    let lattice = first2(n, |x, y| a.meet(x, y) != a.meet(y, x) || a.join(x, y) != a.join(y, x))
        .or_else(|| first1(n, |x| a.meet(x, x) != x || a.join(x, x) != x))
        .or_else(|| {
            first2(n, |x, y| a.meet(x, a.join(x, y)) != x || a.join(x, a.meet(x, y)) != x)
        })
        .or_else(|| {
            first3(n, |x, y, z| {
                a.meet(x, a.meet(y, z)) != a.meet(a.meet(x, y), z)
                    || a.join(x, a.join(y, z)) != a.join(a.join(x, y), z)
            })
        })
        .or_else(|| first1(n, |x| !a.leq(a.bot(), x) || !a.leq(x, a.top())));

    let distributive =
        first3(n, |x, y, z| a.meet(x, a.join(y, z)) != a.join(a.meet(x, y), a.meet(x, z)));

    let de_morgan = first1(n, |x| a.neg(a.neg(x)) != x)
        .or_else(|| first2(n, |x, y| a.neg(a.join(x, y)) != a.meet(a.neg(x), a.neg(y))));

    let p1 = first2(n, |x, y| a.meet(x, a.star(a.meet(x, y))) != a.meet(x, a.star(y)));
    let p2 = first1(n, |x| a.meet(x, a.star(a.bot())) != x);
    let p3 = (a.star(a.star(a.bot())) != a.bot()).then(|| vec![a.bot()]);
    let tm = first1(n, |x| !a.leq(a.join(x, a.neg(x)), a.join(x, a.star(x))));

    let t_automorphism = {
        let mut seen = vec![None; n];
        let mut dup = None;
        for x in 0..n {
            match seen[a.t(x)] {
                Some(prev) => {
                    dup = Some(vec![prev, x]);
                    break;
                }
                None => seen[a.t(x)] = Some(x),
            }
        }
        dup.or_else(|| {
            first2(n, |x, y| {
                a.t(a.meet(x, y)) != a.meet(a.t(x), a.t(y)) || a.t(a.join(x, y)) != a.join(a.t(x), a.t(y))
            })
        })
        .or_else(|| first1(n, |x| a.t(a.neg(x)) != a.neg(a.t(x)) || a.t(a.star(x)) != a.star(a.t(x))))
        .or_else(|| (a.t(a.bot()) != a.bot()).then(|| vec![a.bot()]))
        .or_else(|| (a.t(a.top()) != a.top()).then(|| vec![a.top()]))
    };

    let t_period = first1(n, |x| a.t_pow(x, a.k()) != x);

    AxiomReport {
        lattice: AxiomCheck::from_witness(lattice),
        distributive: AxiomCheck::from_witness(distributive),
        de_morgan: AxiomCheck::from_witness(de_morgan),
        p1: AxiomCheck::from_witness(p1),
        p2: AxiomCheck::from_witness(p2),
        p3: AxiomCheck::from_witness(p3),
        tm: AxiomCheck::from_witness(tm),
        t_automorphism: AxiomCheck::from_witness(t_automorphism),
        t_period: AxiomCheck::from_witness(t_period),
    }
}

/// `(∇x, Δx)`.
pub fn modal_ops(alg: &FiniteAlgebra, x: ElementId) -> (ElementId, ElementId) {
    (alg.nabla(x), alg.delta(x))
}

/// The subuniverse generated by `seed`: the least set containing the seed
/// and both constants, closed under `∧ ∨ ∼ ∗ t`. Returned sorted.
pub fn closure(alg: &FiniteAlgebra, seed: &[ElementId]) -> Vec<ElementId> {
    let mut inset = vec![false; alg.size()];
    let mut members: Vec<ElementId> = Vec::new();
    let push = |x: ElementId, inset: &mut Vec<bool>, members: &mut Vec<ElementId>| {
        if !inset[x] {
            inset[x] = true;
            members.push(x);
        }
    };
    push(alg.bot(), &mut inset, &mut members);
    push(alg.top(), &mut inset, &mut members);
    for &x in seed {
        push(x, &mut inset, &mut members);
    }
    let mut i = 0;
    while i < members.len() {
        let x = members[i];
        for u in [alg.neg(x), alg.star(x), alg.t(x)] {
            push(u, &mut inset, &mut members);
        }
        for j in 0..=i {
            let y = members[j];
            push(alg.meet(x, y), &mut inset, &mut members);
            push(alg.join(x, y), &mut inset, &mut members);
        }
        i += 1;
    }
    members.sort_unstable();
    members
}

/// Whether `set` (sorted or not) is closed under all operations and contains
/// the constants.
pub fn is_subuniverse(alg: &FiniteAlgebra, set: &[ElementId]) -> bool {
    let mut inset = vec![false; alg.size()];
    for &x in set {
        inset[x] = true;
    }
    inset[alg.bot()]
        && inset[alg.top()]
        && set.iter().all(|&x| inset[alg.neg(x)] && inset[alg.star(x)] && inset[alg.t(x)])
        && set
            .iter()
            .all(|&x| set.iter().all(|&y| inset[alg.meet(x, y)] && inset[alg.join(x, y)]))
}

/// Smallest `r ≥ 1` with `tʳ = id`: the lcm of the cycle lengths of `t`.
pub fn period(alg: &FiniteAlgebra) -> u32 {
    let mut visited = vec![false; alg.size()];
    let mut r: u64 = 1;
    for start in alg.elements() {
        if visited[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !visited[x] {
            visited[x] = true;
            x = alg.t(x);
            len += 1;
        }
        r = num_integer::lcm(r, len);
    }
    r as u32
}

/// The canonical copy of `T_{i,d}` inside `T_{i,k}`: elements fixed by `tᵈ`.
pub fn periodic_part(alg: &FiniteAlgebra, d: u32) -> Vec<ElementId> {
    alg.elements().filter(|&x| alg.t_pow(x, d) == x).collect()
}

/// All subuniverses in canonical order (by size, then lexicographically).
pub fn enumerate_subalgebras(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Vec<ElementId>>> {
    if alg.size() > cap {
        return Err(Error::cap("subalgebra enumeration", alg.size(), cap, "--cap"));
    }
    let base = closure(alg, &[]);
    let mut seen: BTreeSet<Vec<ElementId>> = BTreeSet::new();
    seen.insert(base.clone());
    let mut frontier = vec![base];
    while !frontier.is_empty() {
        let grown: Vec<Vec<Vec<ElementId>>> = par::map_slice(&frontier, |s| {
            let mut inset = vec![false; alg.size()];
            for &x in s {
                inset[x] = true;
            }
            let mut out = BTreeSet::new();
            for x in alg.elements().filter(|&x| !inset[x]) {
                let mut seed = s.clone();
                seed.push(x);
                out.insert(closure(alg, &seed));
            }
            out.into_iter().collect()
        });
        let mut next = Vec::new();
        for set in grown.into_iter().flatten() {
            if seen.insert(set.clone()) {
                next.push(set);
            }
        }
        frontier = next;
    }
    let mut all: Vec<Vec<ElementId>> = seen.into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(all)
}

/// Proper subuniverses not contained in any other proper subuniverse.
pub fn maximal_subuniverses(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Vec<ElementId>>> {
    let all = enumerate_subalgebras(alg, cap)?;
    let proper: Vec<&Vec<ElementId>> = all.iter().filter(|s| s.len() < alg.size()).collect();
    let contains = |big: &[ElementId], small: &[ElementId]| small.iter().all(|x| big.binary_search(x).is_ok());
    Ok(proper
        .iter()
        .filter(|s| !proper.iter().any(|o| o.len() > s.len() && contains(o, s)))
        .map(|s| (*s).clone())
        .collect())
}

/// A small generating set, chosen greedily by largest closure gain (ties go to
/// the smallest element id).
pub fn generating_set(alg: &FiniteAlgebra) -> Vec<ElementId> {
    let mut gens = Vec::new();
    let mut current = closure(alg, &[]);
    while current.len() < alg.size() {
        let mut best: Option<(usize, ElementId, Vec<ElementId>)> = None;
        for x in alg.elements().filter(|x| current.binary_search(x).is_err()) {
            let mut seed = current.clone();
            seed.push(x);
            let c = closure(alg, &seed);
            if best.as_ref().is_none_or(|(len, _, _)| c.len() > *len) {
                best = Some((c.len(), x, c));
            }
        }
        let (_, x, c) = best.expect("a missing element exists");
        gens.push(x);
        current = c;
    }
    gens
}

/// Propagates a partial assignment `src → dst` through all operations.
///
/// Starting from the constants and `assignments`, every image forced by the
/// operations is filled in. Returns `None` on a conflict. When it returns
/// `Some`, the assigned part is closed in `src` and the map commutes with all
/// operations on it.
pub fn extend_hom(
    src: &FiniteAlgebra,
    dst: &FiniteAlgebra,
    assignments: &[(ElementId, ElementId)],
) -> Option<Vec<Option<ElementId>>> {
    let mut map: Vec<Option<ElementId>> = vec![None; src.size()];
    let mut order: Vec<ElementId> = Vec::new();
    let assign = |x: ElementId, y: ElementId, map: &mut Vec<Option<ElementId>>, order: &mut Vec<ElementId>| -> bool {
        match map[x] {
            Some(prev) => prev == y,
            None => {
                map[x] = Some(y);
                order.push(x);
                true
            }
        }
    };
    if !assign(src.bot(), dst.bot(), &mut map, &mut order) || !assign(src.top(), dst.top(), &mut map, &mut order) {
        return None;
    }
    for &(x, y) in assignments {
        if !assign(x, y, &mut map, &mut order) {
            return None;
        }
    }
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        let hx = map[x].unwrap();
        for (sx, dx) in [
            (src.neg(x), dst.neg(hx)),
            (src.star(x), dst.star(hx)),
            (src.t(x), dst.t(hx)),
        ] {
            if !assign(sx, dx, &mut map, &mut order) {
                return None;
            }
        }
        for j in 0..=i {
            let z = order[j];
            let hz = map[z].unwrap();
            for (sx, dx) in [
                (src.meet(x, z), dst.meet(hx, hz)),
                (src.join(x, z), dst.join(hx, hz)),
                (src.meet(z, x), dst.meet(hz, hx)),
                (src.join(z, x), dst.join(hz, hx)),
            ] {
                if !assign(sx, dx, &mut map, &mut order) {
                    return None;
                }
            }
        }
        i += 1;
    }
    Some(map)
}

/// All total homomorphisms `src → dst` obtained by extending assignments of
/// `gens` (which must generate `src`). With `injective`, only injective maps
/// are kept. Results are sorted.
fn homs_from_generators(
    src: &FiniteAlgebra,
    dst: &FiniteAlgebra,
    gens: &[ElementId],
    injective: bool,
) -> Result<Vec<Vec<ElementId>>> {
    let m = dst.size() as u64;
    let total = (0..gens.len()).try_fold(1u64, |acc, _| acc.checked_mul(m));
    let total = match total {
        Some(t) if t <= MAX_ASSIGNMENTS => t,
        _ => {
            return Err(Error::cap(
                "generator-image search",
                format!("{}^{}", m, gens.len()),
                MAX_ASSIGNMENTS,
                "--cap",
            ))
        }
    };
    let mut found = par::filter_map_range(total, |idx| {
        let mut rest = idx;
        let mut pairs = Vec::with_capacity(gens.len());
        for &g in gens {
            pairs.push((g, (rest % m) as ElementId));
            rest /= m;
        }
        let map = extend_hom(src, dst, &pairs)?;
        let map: Vec<ElementId> = map.into_iter().collect::<Option<Vec<_>>>()?;
        if injective {
            let mut seen = vec![false; dst.size()];
            for &y in &map {
                if std::mem::replace(&mut seen[y], true) {
                    return None;
                }
            }
        }
        Some(map)
    });
    found.sort();
    found.dedup();
    Ok(found)
}

/// All automorphisms (bijections preserving every operation, so commuting
/// with `t`), sorted; the identity comes first.
pub fn enumerate_automorphisms(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Vec<ElementId>>> {
    if alg.size() > cap {
        return Err(Error::cap("automorphism enumeration", alg.size(), cap, "--cap"));
    }
    let gens = generating_set(alg);
    homs_from_generators(alg, alg, &gens, true)
}

/// An isomorphism `a → b` preserving every operation, if one exists.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Option<Vec<ElementId>>> {
    if a.size() != b.size() {
        return Ok(None);
    }
    let gens = generating_set(a);
    Ok(homs_from_generators(a, b, &gens, true)?.into_iter().next())
}
