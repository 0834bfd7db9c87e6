use std::collections::BTreeSet;

use ckalg::algebra::{
    build_cyclic, build_product, check_axioms, closure, enumerate_automorphisms, find_isomorphism, is_subuniverse,
    periodic_part, period, FactorSpec, ProductSpec, TMode, DEFAULT_ENUM_CAP,
};
use ckalg::freealg::{h_sum, h_sum_literal, ExactQuotient};
use ckalg::morphisms::{
    count_auts_repaired, count_epis_repaired, enumerate_homs, enumerate_s_functions, falling, factorial,
    induced_s_function, pi_from_s,
};
use ckalg::spectrum::{
    check_nabla_trichotomy, check_psi_laws, classify, decompose, psi, psi_product_shortcut, reconstruct_ops,
};
use ckalg::{ElementId, FiniteAlgebra, GeneratorKind};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = GeneratorKind> {
    prop_oneof![Just(GeneratorKind::T2), Just(GeneratorKind::T3), Just(GeneratorKind::T4)]
}

/// Products of cyclic factors for k = 2 with at most 64 elements.
fn product_spec() -> impl Strategy<Value = ProductSpec> {
    prop::collection::vec((kind(), 1u32..=2, any::<bool>()), 1..=3)
        .prop_filter("at most 64 elements", |fs| {
            fs.iter().map(|(k, d, _)| k.size().pow(*d)).product::<usize>() <= 64
        })
        .prop_map(|fs| ProductSpec {
            k: 2,
            factors: fs
                .into_iter()
                .map(|(k, d, shift)| {
                    let t = if shift && d == 2 { TMode::Shift } else { TMode::Identity };
                    FactorSpec::new(k, d, 1, t)
                })
                .collect(),
        })
}

fn algebra() -> impl Strategy<Value = FiniteAlgebra> {
    product_spec().prop_map(|s| build_product(&s).unwrap().algebra)
}

/// Smaller products for the morphism searches.
fn small_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    algebra().prop_filter("at most 16 elements", |a| a.size() <= 16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_satisfy_the_axioms(alg in algebra()) {
        prop_assert!(check_axioms(&alg).all_hold());
    }

    #[test]
    fn modal_laws(alg in algebra()) {
        for x in alg.elements() {
            prop_assert_eq!(alg.nabla(alg.nabla(x)), alg.nabla(x));
            prop_assert!(alg.leq(alg.delta(x), x));
            prop_assert!(alg.leq(x, alg.nabla(x)));
        }
    }

    #[test]
    fn closure_is_a_closure_operator(alg in algebra(), seed in prop::collection::vec(0usize..64, 0..4), extra in 0usize..64) {
        let seed: Vec<ElementId> = seed.into_iter().map(|x| x % alg.size()).collect();
        let c = closure(&alg, &seed);
        prop_assert!(seed.iter().all(|x| c.contains(x)));
        prop_assert!(is_subuniverse(&alg, &c));
        prop_assert_eq!(closure(&alg, &c), c.clone());
        let mut bigger = seed.clone();
        bigger.push(extra % alg.size());
        let cb = closure(&alg, &bigger);
        prop_assert!(c.iter().all(|x| cb.contains(x)));
    }

    #[test]
    fn spectrum_lemmas(spec in product_spec()) {
        let product = build_product(&spec).unwrap();
        let alg = &product.algebra;
        let s = classify(alg).unwrap();
        prop_assert!(check_psi_laws(alg, &s).holds);
        prop_assert!(check_nabla_trichotomy(alg, &s).holds);
        prop_assert!(reconstruct_ops(alg).is_ok());
        prop_assert_eq!(psi(alg).unwrap(), psi_product_shortcut(&product));
        let d = decompose(alg).unwrap();
        prop_assert_eq!(2usize.pow(d.t2 as u32) * 3usize.pow(d.t3 as u32) * 4usize.pow(d.t4 as u32), alg.size());
        prop_assert_eq!(s.signature.map(|g| g.prime_count()), Some(s.primes.len() as u64));
    }

    #[test]
    fn pi_functions_are_the_epimorphisms(b in small_algebra(), a in small_algebra()) {
        let homs = enumerate_homs(&b, &a, true).unwrap();
        let fs = enumerate_s_functions(&a, &b).unwrap();
        let mut pis = BTreeSet::new();
        for f in &fs {
            let pi = pi_from_s(&a, &b, f).unwrap();
            prop_assert_eq!(&induced_s_function(&b, &a, &pi.map).unwrap(), f);
            pis.insert(pi.map);
        }
        prop_assert_eq!(pis.len(), fs.len());
        prop_assert_eq!(pis, homs.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn repaired_counts_match_enumeration(b in small_algebra(), a in small_algebra()) {
        let sb = classify(&b).unwrap().signature.unwrap();
        let sa = classify(&a).unwrap().signature.unwrap();
        let epis = enumerate_homs(&b, &a, true).unwrap().len();
        prop_assert_eq!(count_epis_repaired(&sb, &sa), BigUint::from(epis));
        let auts = enumerate_automorphisms(&b, DEFAULT_ENUM_CAP).unwrap().len();
        prop_assert_eq!(count_auts_repaired(&sb), BigUint::from(auts));
    }

    #[test]
    fn regrouped_pair_sum(m in prop::collection::btree_set(1u64..7, 0..4), b in 2u64..5, n in 1u32..4) {
        let m: Vec<u64> = m.into_iter().collect();
        prop_assert_eq!(h_sum(&m, b, n), h_sum_literal(&m, b, n));
    }

    #[test]
    fn falling_factorial(n in 0u64..30, t in 0u64..30) {
        prop_assume!(t <= n);
        prop_assert_eq!(falling(n, t) * factorial(n - t), factorial(n));
    }

    #[test]
    fn quotients_stay_unreduced(num in -500i64..500, den in 1u64..50) {
        let q = ExactQuotient::new(BigInt::from(num), BigUint::from(den));
        let integral = num % den as i64 == 0;
        prop_assert_eq!(q.is_integral(), integral);
        prop_assert_eq!(q.render(), if integral { (num / den as i64).to_string() } else { format!("{num}/{den}") });
        if let Some(v) = q.to_integer() {
            prop_assert_eq!(v * BigInt::from(den), BigInt::from(num));
        }
    }
}

#[test]
fn period_of_cyclic_powers() {
    for kind in [GeneratorKind::T2, GeneratorKind::T3, GeneratorKind::T4] {
        for d in 1..=6 {
            if kind.size().pow(d) > 4096 {
                continue;
            }
            assert_eq!(period(&build_cyclic(kind, d)), d, "{kind:?} d={d}");
        }
    }
}

#[test]
fn intersections_of_periodic_parts() {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    for kind in [GeneratorKind::T2, GeneratorKind::T3, GeneratorKind::T4] {
        for k in [2u32, 3, 4, 6] {
            if kind.size().pow(k) > 729 {
                continue;
            }
            let alg = build_cyclic(kind, k);
            let divs: Vec<u32> = (1..=k).filter(|d| k % d == 0).collect();
            for &d1 in &divs {
                for &d2 in &divs {
                    let p1: BTreeSet<_> = periodic_part(&alg, d1).into_iter().collect();
                    let p2: BTreeSet<_> = periodic_part(&alg, d2).into_iter().collect();
                    let g = gcd(d1, d2);
                    let meet: Vec<_> = p1.intersection(&p2).copied().collect();
                    assert_eq!(meet, periodic_part(&alg, g), "{kind:?} k={k} d1={d1} d2={d2}");
                    assert!(is_subuniverse(&alg, &meet));
                    let sub = alg.subalgebra(&meet).unwrap();
                    let canon = build_cyclic(kind, g).with_k(k);
                    assert!(find_isomorphism(&sub, &canon).unwrap().is_some(), "{kind:?} k={k} gcd={g}");
                }
            }
        }
    }
}

#[test]
fn automorphism_counts_of_cyclic_powers() {
    for d in 1..=3 {
        for (kind, expect) in [(GeneratorKind::T2, d), (GeneratorKind::T3, d), (GeneratorKind::T4, 2 * d)] {
            let n = enumerate_automorphisms(&build_cyclic(kind, d), DEFAULT_ENUM_CAP).unwrap().len();
            assert_eq!(n, expect as usize, "{kind:?} d={d}");
        }
    }
}
