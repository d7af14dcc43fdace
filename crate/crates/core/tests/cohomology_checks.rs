//! Exactness, cohomology dimensions and transgression, with an independent
//! Chevalley–Eilenberg rank oracle.

use num_rational::Rational64;
use num_traits::Zero;
use proptest::prelude::*;
use qclass_core::cocycles::{a_series_flat, Series, DEFAULT_MAX_ORDER};
use qclass_core::cohomology::{
    exactness_witness, exactness_witness_capped, function_cohomology_dims, is_closed, transgression, ExactnessStatus,
};
use qclass_core::models::{abelian, affine_2d, build_odd_tangent, euler_line_algebroid, sl2, StructureConstants};
use qclass_core::random::{random_tensor, rng, PolyShape};
use qclass_core::{delta, Connection, Error, Parity, SuperPolynomial, TensorField};

// ---- oracle: CE differential on bitmask monomials, rank by plain Gauss over Rational64

fn wedge(a: u32, b: u32) -> Option<(u32, i64)> {
    if a & b != 0 {
        return None;
    }
    // sign of merging ascending a-list before ascending b-list
    let mut swaps = 0;
    for i in 0..32 {
        if b >> i & 1 == 1 {
            swaps += (a >> (i + 1)).count_ones();
        }
    }
    Some((a | b, if swaps % 2 == 0 { 1 } else { -1 }))
}

fn ce_differential(dim: usize, c: &StructureConstants, mask: u32) -> Vec<(u32, Rational64)> {
    let mut out: std::collections::BTreeMap<u32, Rational64> = Default::default();
    let bits: Vec<usize> = (0..dim).filter(|i| mask >> i & 1 == 1).collect();
    for (r, &s) in bits.iter().enumerate() {
        let before: u32 = bits[..r].iter().map(|&i| 1u32 << i).sum();
        let after: u32 = bits[r + 1..].iter().map(|&i| 1u32 << i).sum();
        // d(θ^s) = −½ c^s_{ij} θ^i θ^j
        for ((k, i, j), v) in c {
            if *k != s || i == j {
                continue;
            }
            let num: i64 = v.numer().try_into().unwrap();
            let den: i64 = v.denom().try_into().unwrap();
            let Some((ij, s1)) = wedge(1 << i, 1 << j) else {
                continue;
            };
            let Some((m1, s2)) = wedge(before, ij) else { continue };
            let Some((m2, s3)) = wedge(m1, after) else { continue };
            let sign = s1 * s2 * s3 * if r % 2 == 0 { 1 } else { -1 };
            *out.entry(m2).or_insert_with(Rational64::zero) += Rational64::new(-num * sign, 2 * den);
        }
    }
    out.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn oracle_rank(mut rows: Vec<Vec<Rational64>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[c] / pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= f * y;
            }
        }
        rank += 1;
    }
    rank
}

fn oracle_dims(dim: usize, c: &StructureConstants) -> Vec<usize> {
    let masks_of = |d: usize| -> Vec<u32> { (0u32..1 << dim).filter(|m| m.count_ones() as usize == d).collect() };
    let rank_of = |d: usize| -> usize {
        if d >= dim {
            return 0;
        }
        let target = masks_of(d + 1);
        let rows = masks_of(d)
            .into_iter()
            .map(|m| {
                let mut row = vec![Rational64::zero(); target.len()];
                for (t, v) in ce_differential(dim, c, m) {
                    row[target.iter().position(|&x| x == t).unwrap()] = v;
                }
                row
            })
            .collect();
        oracle_rank(rows)
    };
    (0..=dim)
        .map(|d| masks_of(d).len() - rank_of(d) - if d > 0 { rank_of(d - 1) } else { 0 })
        .collect()
}

fn sl2_constants() -> StructureConstants {
    match sl2().unwrap().params {
        qclass_core::models::ModelParams::ChevalleyEilenberg {
            structure_constants, ..
        } => structure_constants,
        _ => unreachable!(),
    }
}

#[test]
fn sl2_dims_match_oracle() {
    let oracle = oracle_dims(3, &sl2_constants());
    assert_eq!(oracle, vec![1, 0, 0, 1]);
    assert_eq!(function_cohomology_dims(&sl2().unwrap().q).unwrap(), oracle);
}

#[test]
fn abelian_and_affine_dims() {
    assert_eq!(
        function_cohomology_dims(&abelian(3).unwrap().q).unwrap(),
        vec![1, 3, 3, 1]
    );
    let affine = affine_2d().unwrap();
    let dims = function_cohomology_dims(&affine.q).unwrap();
    let constants = match &affine.params {
        qclass_core::models::ModelParams::ChevalleyEilenberg {
            structure_constants, ..
        } => structure_constants.clone(),
        _ => unreachable!(),
    };
    assert_eq!(dims, oracle_dims(2, &constants));
    assert_eq!(dims, vec![1, 1, 0]);
}

#[test]
fn euler_characteristic_identity() {
    for q in [sl2().unwrap().q, affine_2d().unwrap().q, abelian(4).unwrap().q] {
        let dims = function_cohomology_dims(&q).unwrap();
        let n = dims.len() - 1;
        let lhs: i64 = dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        let rhs: i64 = (0..=n)
            .map(|k| binomial(n, k) as i64 * if k % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(lhs, rhs);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn dims_reject_even_charts() {
    assert!(matches!(
        function_cohomology_dims(&build_odd_tangent(1).unwrap().q),
        Err(Error::EvenCoordinatesPresent)
    ));
}

#[test]
fn q_is_exact_on_the_odd_line() {
    let m = build_odd_tangent(1).unwrap();
    let v = exactness_witness(&m.q, m.q.field(), 2).unwrap();
    assert_eq!(v.status, ExactnessStatus::ExactWithWitness);
    let w = v.witness.unwrap();
    assert_eq!(delta(&m.q, &w).unwrap(), *m.q.field());
    // −θ∂_θ is another preimage; it differs from the solver's choice by a cocycle
    let th = SuperPolynomial::coordinate(m.chart(), 1).unwrap();
    let other = TensorField::vector(m.chart(), Parity::Even, [(1, -th)]).unwrap();
    assert_eq!(delta(&m.q, &other).unwrap(), *m.q.field());
}

#[test]
fn modular_class_of_affine_algebra_is_not_exact() {
    let a = affine_2d().unwrap();
    let a0 = a_series_flat(&Connection::flat(a.chart()), &a.q, 0).unwrap();
    let t = TensorField::scalar(a0).unwrap();
    assert!(is_closed(&a.q, &t).unwrap().is_zero());
    let v = exactness_witness(&a.q, &t, 0).unwrap();
    assert_eq!(v.status, ExactnessStatus::NotExactWithinBound);
    assert!(v.conclusive);
}

#[test]
fn non_closed_input_is_reported() {
    let a = affine_2d().unwrap();
    let t2 = TensorField::scalar(SuperPolynomial::coordinate(a.chart(), 1).unwrap()).unwrap();
    let v = exactness_witness(&a.q, &t2, 0).unwrap();
    assert_eq!(v.status, ExactnessStatus::NotClosed);
    assert_eq!(v.residual.unwrap().as_scalar().unwrap().to_string(), "-t1*t2");
}

#[test]
fn euler_algebroid_class_is_not_exact_within_bound() {
    let m = euler_line_algebroid().unwrap();
    let a0 = a_series_flat(&Connection::flat(m.chart()), &m.q, 0).unwrap();
    let v = exactness_witness(&m.q, &TensorField::scalar(a0).unwrap(), 3).unwrap();
    assert_eq!(v.status, ExactnessStatus::NotExactWithinBound);
    assert!(!v.conclusive);
}

#[test]
fn resource_cap_is_distinct() {
    let m = sl2().unwrap();
    let t = qclass_core::cocycles::q_power(&m.q, 1).unwrap();
    assert!(matches!(
        exactness_witness_capped(&m.q, &t, 0, 3),
        Err(Error::ResourceCap { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coboundaries_are_exact_and_verdicts_are_class_invariant(seed in any::<u64>(), p in any::<bool>(), which in 0usize..3) {
        let m = [affine_2d().unwrap(), build_odd_tangent(1).unwrap(), sl2().unwrap()][which].clone();
        let parity = if p { Parity::Odd } else { Parity::Even };
        let mut r = rng(seed);
        let s = random_tensor(&mut r, m.chart(), 0, 1, parity, 0.6, PolyShape::default());
        let ds = delta(&m.q, &s).unwrap();
        let v = exactness_witness(&m.q, &ds, 2).unwrap();
        prop_assert_eq!(v.status, ExactnessStatus::ExactWithWitness);
        prop_assert_eq!(delta(&m.q, v.witness.as_ref().unwrap()).unwrap(), ds.clone());

        // a closed class plus a coboundary keeps its verdict
        if which == 0 {
            let a0 = TensorField::scalar(a_series_flat(&Connection::flat(m.chart()), &m.q, 0).unwrap()).unwrap();
            let f = random_tensor(&mut r, m.chart(), 0, 0, Parity::Even, 1.0, PolyShape::default());
            let shifted = a0.checked_add(&delta(&m.q, &f).unwrap()).unwrap();
            prop_assert_eq!(exactness_witness(&m.q, &shifted, 0).unwrap().status, ExactnessStatus::NotExactWithinBound);
        }
    }
}

#[test]
fn transgression_matrix() {
    for m in [affine_2d().unwrap(), sl2().unwrap()] {
        let flat = Connection::flat(m.chart());
        let r1 = Connection::random(m.chart(), 101, 0.4, PolyShape::default());
        let r2 = Connection::random(m.chart(), 202, 0.4, PolyShape::default());
        for (series, order) in [
            (Series::C, 2),
            (Series::P, 1),
            (Series::B, 2),
            (Series::C, 1),
            (Series::B, 1),
        ] {
            for (c0, c1) in [(&flat, &r1), (&r1, &r2)] {
                let t = transgression(series, order, &m, c0, c1, DEFAULT_MAX_ORDER).unwrap();
                assert!(t.is_exact(), "{series}{order} on {}", m.name);
            }
        }
        let same = transgression(Series::C, 2, &m, &r1, &r1, DEFAULT_MAX_ORDER).unwrap();
        assert!(same.difference.is_zero() && same.is_exact());
        let qpow = transgression(Series::Qpow, 1, &m, &flat, &r1, DEFAULT_MAX_ORDER).unwrap();
        assert!(qpow.psi.is_zero() && qpow.is_exact());
        assert!(transgression(Series::A, 0, &m, &flat, &r1, DEFAULT_MAX_ORDER).is_err());
    }
}

#[test]
fn pontryagin_transgression_from_flat() {
    let m = build_odd_tangent(1).unwrap();
    let flat = Connection::flat(m.chart());
    let r = Connection::random(m.chart(), 5, 0.8, PolyShape::default());
    let t = transgression(Series::P, 1, &m, &flat, &r, DEFAULT_MAX_ORDER).unwrap();
    assert!(t.is_exact());
}
