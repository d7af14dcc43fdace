use std::collections::HashMap;

use rayon::prelude::*;

use super::TensorField;
use crate::algebra::{odd, same_chart, Chart, Parity, SuperPolynomial};
use crate::error::{Error, Result};

fn eps(chart: &Chart, keys: &[usize]) -> u32 {
    chart.index_parity(keys)
}

/// Sign of `(a^I_J ∂_I dz^J)(b^K_L ∂_K dz^L) = ± a b ∂_I ∂_K dz^J dz^L`.
fn product_negative(chart: &Chart, a: &TensorField, ka: &[usize], kb: &[usize], b_upper: usize, cb_bit: u32) -> bool {
    let a_up = eps(chart, &ka[..a.upper()]);
    let a_low = eps(chart, &ka[a.upper()..]);
    let b_up = eps(chart, &kb[..b_upper]);
    odd(cb_bit * (a_up + a_low) + b_up * a_low)
}

fn combined_key(a: &TensorField, ka: &[usize], b: &TensorField, kb: &[usize]) -> Vec<usize> {
    let mut key = Vec::with_capacity(ka.len() + kb.len());
    key.extend_from_slice(&ka[..a.upper()]);
    key.extend_from_slice(&kb[..b.upper()]);
    key.extend_from_slice(&ka[a.upper()..]);
    key.extend_from_slice(&kb[b.upper()..]);
    key
}

/// Sign picked up by contracting upper slot `p` with lower slot `q` of a
/// word with `n` upper slots: `∂` travels right until it sits after its
/// `dz` partner, then `dz^j ∂_k ↦ δ^j_k`.
fn contraction_negative(chart: &Chart, key: &[usize], n: usize, p: usize, q: usize) -> bool {
    let travel = eps(chart, &key[p + 1..n]) + eps(chart, &key[n..=n + q]);
    odd(chart.bit(key[p]) * travel)
}

fn remove_pair(key: &[usize], p: usize, lower_pos: usize) -> Vec<usize> {
    key.iter()
        .enumerate()
        .filter(|&(r, _)| r != p && r != lower_pos)
        .map(|(_, &v)| v)
        .collect()
}

fn ensure_same_chart(a: &TensorField, b: &TensorField) -> Result<()> {
    if same_chart(a.chart(), b.chart()) {
        Ok(())
    } else {
        Err(Error::ChartMismatch)
    }
}

/// Tensor product with upper slots of `a`, then of `b`, then lower slots of
/// `a`, then of `b`.
pub fn tensor_product(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    ensure_same_chart(a, b)?;
    let chart = a.chart().clone();
    let mut out = TensorField::zero(
        &chart,
        a.upper() + b.upper(),
        a.lower() + b.lower(),
        a.parity() + b.parity(),
    );
    for (ka, ca) in a.components() {
        for (kb, cb) in b.components() {
            let cb_bit = b.parity().bit() as u32 + eps(&chart, kb);
            let neg = product_negative(&chart, a, ka, kb, b.upper(), cb_bit);
            let mut prod = SuperPolynomial::zero(&chart);
            prod.add_product(ca, cb, neg);
            out.accumulate(combined_key(a, ka, b, kb), &prod);
        }
    }
    Ok(out.debug_check())
}

/// Pairs upper slot `upper_slot` with lower slot `lower_slot`.
pub fn contract(t: &TensorField, upper_slot: usize, lower_slot: usize) -> Result<TensorField> {
    if upper_slot >= t.upper() || lower_slot >= t.lower() {
        return Err(Error::SlotOutOfRange(format!(
            "cannot contract slots ({upper_slot}, {lower_slot}) of a ({}, {}) tensor",
            t.upper(),
            t.lower()
        )));
    }
    let chart = t.chart().clone();
    let n = t.upper();
    let mut out = TensorField::zero(&chart, n - 1, t.lower() - 1, t.parity());
    for (key, c) in t.components() {
        if key[upper_slot] != key[n + lower_slot] {
            continue;
        }
        let neg = contraction_negative(&chart, key, n, upper_slot, lower_slot);
        out.accumulate_signed(remove_pair(key, upper_slot, n + lower_slot), c, neg);
    }
    Ok(out.debug_check())
}

/// `contract(a ⊗ b, upper_slot, lower_slot)` without materialising the
/// product, for slots taken from different factors. Slot numbers refer to
/// the layout of `a ⊗ b`.
pub fn contract_product(a: &TensorField, b: &TensorField, upper_slot: usize, lower_slot: usize) -> Result<TensorField> {
    ensure_same_chart(a, b)?;
    let n = a.upper() + b.upper();
    let m = a.lower() + b.lower();
    if upper_slot >= n || lower_slot >= m {
        return Err(Error::SlotOutOfRange(format!(
            "cannot contract slots ({upper_slot}, {lower_slot}) of a ({n}, {m}) product"
        )));
    }
    let upper_in_a = upper_slot < a.upper();
    let lower_in_a = lower_slot < a.lower();
    if upper_in_a == lower_in_a {
        return contract(&tensor_product(a, b)?, upper_slot, lower_slot);
    }
    // position of the contracted index inside each factor's own key
    let (slot_a, slot_b) = if upper_in_a {
        (upper_slot, b.upper() + lower_slot - a.lower())
    } else {
        (a.upper() + lower_slot, upper_slot - a.upper())
    };
    let chart = a.chart().clone();
    let mut by_index: HashMap<usize, Vec<(&Vec<usize>, &SuperPolynomial)>> = HashMap::new();
    for (kb, cb) in b.components() {
        by_index.entry(kb[slot_b]).or_default().push((kb, cb));
    }
    let parity = a.parity() + b.parity();
    let a_comps: Vec<_> = a.components().collect();
    let out = a_comps
        .par_iter()
        .fold(
            || TensorField::zero(&chart, n - 1, m - 1, parity),
            |mut acc, (ka, ca)| {
                if let Some(list) = by_index.get(&ka[slot_a]) {
                    for (kb, cb) in list {
                        let cb_bit = b.parity().bit() as u32 + eps(&chart, kb);
                        let key = combined_key(a, ka, b, kb);
                        let neg = product_negative(&chart, a, ka, kb, b.upper(), cb_bit)
                            ^ contraction_negative(&chart, &key, n, upper_slot, lower_slot);
                        let mut prod = SuperPolynomial::zero(&chart);
                        prod.add_product(ca, cb, neg);
                        acc.accumulate(remove_pair(&key, upper_slot, n + lower_slot), &prod);
                    }
                }
                acc
            },
        )
        .reduce(
            || TensorField::zero(&chart, n - 1, m - 1, parity),
            |mut x, y| {
                x.merge(y);
                x
            },
        );
    Ok(out.debug_check())
}

fn ensure_endomorphism(a: &TensorField, what: &str) -> Result<()> {
    if a.is_endomorphism() {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(1, 1, a.upper(), a.lower())).map_err(|e| Error::Invalid(format!("{what}: {e}")))
    }
}

/// `(a∘b)(X) = a(b(X))`: concatenate the words and pair the adjacent
/// `dz ∂` in the middle.
pub fn endo_compose(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    ensure_endomorphism(a, "left factor")?;
    ensure_endomorphism(b, "right factor")?;
    contract_product(a, b, 1, 0)
}

/// Action of an endomorphism on a vector field.
pub fn endo_apply(a: &TensorField, x: &TensorField) -> Result<TensorField> {
    ensure_endomorphism(a, "endomorphism")?;
    if !x.is_vector() {
        return Err(Error::SignatureMismatch(1, 0, x.upper(), x.lower()));
    }
    contract_product(a, x, 1, 0)
}

/// Graded commutator `a∘b − (−1)^{|a||b|} b∘a`.
pub fn endo_commutator(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    let ab = endo_compose(a, b)?;
    let ba = endo_compose(b, a)?;
    if a.parity().is_odd() && b.parity().is_odd() {
        ab.checked_add(&ba)
    } else {
        ab.checked_sub(&ba)
    }
}

/// `a∘a∘⋯∘a` (`n` factors); the identity for `n = 0`.
pub fn endo_power(a: &TensorField, n: usize) -> Result<TensorField> {
    ensure_endomorphism(a, "endomorphism")?;
    let mut acc = TensorField::identity(a.chart());
    for _ in 0..n {
        acc = endo_compose(&acc, a)?;
    }
    Ok(acc)
}

/// Supertrace, realised as the contraction of the single pair of slots:
/// `Str(a) = Σ_i (−1)^{ε_i} a^i_i` for either parity of `a`.
pub fn supertrace(a: &TensorField) -> Result<SuperPolynomial> {
    ensure_endomorphism(a, "supertrace")?;
    Ok(contract(a, 0, 0)?.component(&[]))
}

/// Interior product `ι_X T`: `X` enters from the left and is paired with
/// lower slot `slot` of `T`.
pub fn insert(t: &TensorField, x: &TensorField, slot: usize) -> Result<TensorField> {
    if !x.is_vector() {
        return Err(Error::SignatureMismatch(1, 0, x.upper(), x.lower()));
    }
    if slot >= t.lower() {
        return Err(Error::SlotOutOfRange(format!(
            "lower slot {slot} of a ({}, {}) tensor",
            t.upper(),
            t.lower()
        )));
    }
    contract_product(x, t, 0, slot)
}

/// Inverse of inserting coordinate fields into the first lower slot: given
/// `T_a` for every coordinate `a`, builds the unique `T` with
/// `ι_{∂_a} T = T_a`. All `T_a` share a signature `(n, m)`; the result has
/// signature `(n, m + 1)` and parity `parity`.
pub fn from_first_slot_insertions(
    chart: &std::sync::Arc<Chart>,
    upper: usize,
    lower: usize,
    parity: Parity,
    slices: &[TensorField],
) -> Result<TensorField> {
    if slices.len() != chart.dim() {
        return Err(Error::Invalid("one slice per coordinate required".into()));
    }
    let mut out = TensorField::zero(chart, upper, lower + 1, parity);
    for (a, slice) in slices.iter().enumerate() {
        if slice.signature() != (upper, lower) {
            return Err(Error::SignatureMismatch(upper, lower, slice.upper(), slice.lower()));
        }
        if !slice.is_zero() && slice.parity() != parity + chart.parity(a) {
            return Err(Error::Internal("slice parity inconsistent".into()));
        }
        let ea = chart.bit(a);
        for (key, c) in slice.components() {
            let rest = eps(chart, &key[upper..]);
            let neg = odd(ea * (parity.bit() as u32 + rest));
            let mut full = Vec::with_capacity(key.len() + 1);
            full.extend_from_slice(&key[..upper]);
            full.push(a);
            full.extend_from_slice(&key[upper..]);
            out.accumulate_signed(full, c, neg);
        }
    }
    Ok(out.debug_check())
}
