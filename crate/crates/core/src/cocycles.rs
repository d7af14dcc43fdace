//! Universal cocycles built from `Q` and a symmetric connection: `Ω`, the
//! `B`, `C`, flat `A` and Pontryagin series, and the tensor powers of `Q`.
//!
//! Endomorphism-valued forms are stored as `(1, p+1)` tensors whose last
//! lower slot is the endomorphism input. Two of them multiply by feeding
//! the output of the right factor into the input of the left one
//! ([`star`]); since `δ` commutes with contractions and differentiates
//! tensor products, it differentiates this product too.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{odd, Parity, SuperPolynomial};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::lie::{delta, HomologicalField};
use crate::tensor::{
    contract, contract_product, endo_power, from_first_slot_insertions, insert, supertrace, tensor_product,
    TensorField, VectorField,
};

/// Default cap on series orders.
pub const DEFAULT_MAX_ORDER: usize = 4;

/// `Ω_X = ∇_XΛ − R_{XQ}`, stored as an odd `(1,2)` tensor from which `Ω_X`
/// is recovered by inserting `X` into the first lower slot.
#[derive(Clone, Debug)]
pub struct OmegaForm {
    tensor: TensorField,
}

impl OmegaForm {
    /// Builds `Ω` and checks `δΩ = 0`; a nonzero residual is reported as an
    /// internal error since it cannot be caused by valid input.
    pub fn new(connection: &Connection, q: &HomologicalField) -> Result<Self> {
        let chart = q.chart();
        if !crate::algebra::same_chart(chart, connection.chart()) {
            return Err(Error::ChartMismatch);
        }
        let lambda = connection.lambda_endo(q)?;
        let mut slices = Vec::with_capacity(chart.dim());
        for a in 0..chart.dim() {
            let x = TensorField::coordinate_vector(chart, a)?;
            let slice = connection
                .covariant_along_coordinate(a, &lambda)?
                .checked_sub(&connection.curvature_endo(&x, q.field())?)?;
            slices.push(slice);
        }
        let tensor = from_first_slot_insertions(chart, 1, 1, Parity::Odd, &slices)?;
        let residual = delta(q, &tensor)?;
        if !residual.is_zero() {
            return Err(Error::Internal(format!("δΩ does not vanish: {residual}")));
        }
        Ok(OmegaForm { tensor })
    }

    pub fn tensor(&self) -> &TensorField {
        &self.tensor
    }

    /// `Ω_X`.
    pub fn at(&self, x: &VectorField) -> Result<TensorField> {
        insert(&self.tensor, x, 0)
    }
}

/// Product of endomorphism-valued forms: `(T ⋆ S)(X…, Y…) = T(X…) ∘ S(Y…)`
/// up to the evaluation signs of [`evaluate_endo_form`].
pub fn star(t: &TensorField, s: &TensorField) -> Result<TensorField> {
    if t.upper() != 1 || s.upper() != 1 || t.lower() == 0 || s.lower() == 0 {
        return Err(Error::Invalid("star product needs endomorphism-valued forms".into()));
    }
    contract_product(t, s, 1, t.lower() - 1)
}

/// `B_n`: the `n`-fold star power of `Ω`, a `(1, n+1)` tensor; `B₀` is
/// the identity.
pub fn b_series(omega: &OmegaForm, n: usize) -> Result<TensorField> {
    let mut acc = TensorField::identity(omega.tensor.chart());
    for _ in 0..n {
        acc = star(&omega.tensor, &acc)?;
    }
    Ok(acc)
}

/// `C_n = Str B_n`, a `(0, n)` tensor.
pub fn c_series(omega: &OmegaForm, n: usize) -> Result<TensorField> {
    if n == 0 {
        return Err(Error::InvalidOrder {
            order: 0,
            reason: "C_0 would be the constant superdimension".into(),
        });
    }
    supertrace_form(&b_series(omega, n)?)
}

/// Supertrace of an endomorphism-valued form over its value slots.
pub fn supertrace_form(t: &TensorField) -> Result<TensorField> {
    if t.upper() != 1 || t.lower() == 0 {
        return Err(Error::Invalid("supertrace needs an endomorphism-valued form".into()));
    }
    contract(t, 0, t.lower() - 1)
}

fn evaluation_negative(args: &[VectorField], value_parity: u32) -> bool {
    let mut e = 0u32;
    for l in 0..args.len() {
        for k in 0..l {
            e += args[l].parity().bit() as u32 * (args[k].parity().bit() as u32 + value_parity);
        }
    }
    odd(e)
}

/// Evaluates a form whose `k`-th slot carries a value of parity
/// `slot_parity + |X_k|` (odd for the `B` and `C` series). Arguments enter
/// the first lower slot one after another and the accumulated passing
/// signs `Σ_{k<l} |X_l|(|X_k| + slot_parity)` are removed, so that
/// `B_n(X₁,…,X_n) = Ω_{X₁}∘⋯∘Ω_{X_n}` exactly.
pub fn evaluate_form(t: &TensorField, args: &[VectorField], slot_parity: Parity) -> Result<TensorField> {
    if args.len() > t.lower() {
        return Err(Error::SlotOutOfRange(format!(
            "{} arguments for {} lower slots",
            args.len(),
            t.lower()
        )));
    }
    let mut acc = t.clone();
    for x in args {
        acc = insert(&acc, x, 0)?;
    }
    Ok(if evaluation_negative(args, slot_parity.bit() as u32) {
        acc.neg()
    } else {
        acc
    })
}

/// [`evaluate_form`] for endomorphism-valued series, returning `Ω_{X₁}∘⋯`.
pub fn evaluate_endo_form(t: &TensorField, args: &[VectorField]) -> Result<TensorField> {
    evaluate_form(t, args, Parity::Odd)
}

/// Residual of the cyclic law
/// `C_n(X₁,…,X_n) = (−1)^{ε₁ε₂} C_n(X_n, X₁,…,X_{n−1})` with
/// `ε₁ = |X_n| + 1` and `ε₂ = Σ_{k<n} (|X_k| + 1)`.
pub fn cyclic_residual(c_n: &TensorField, args: &[VectorField]) -> Result<SuperPolynomial> {
    let n = args.len();
    if n == 0 || n != c_n.lower() {
        return Err(Error::Invalid("cyclic check needs one argument per slot".into()));
    }
    let lhs = evaluate_form(c_n, args, Parity::Odd)?.component(&[]);
    let mut rotated = Vec::with_capacity(n);
    rotated.push(args[n - 1].clone());
    rotated.extend_from_slice(&args[..n - 1]);
    let rhs = evaluate_form(c_n, &rotated, Parity::Odd)?.component(&[]);
    let e1 = args[n - 1].parity().bit() as u32 + 1;
    let e2: u32 = args[..n - 1].iter().map(|x| x.parity().bit() as u32 + 1).sum();
    Ok(if odd(e1 * e2) { &lhs + &rhs } else { &lhs - &rhs })
}

/// `A_n = Str(Λ^{2n+1})` for a flat connection.
pub fn a_series_flat(connection: &Connection, q: &HomologicalField, n: usize) -> Result<SuperPolynomial> {
    if !connection.is_flat() {
        return Err(Error::NotFlat(format!(
            "the A series is only available for flat connections; `{}` has nonzero curvature",
            connection.label()
        )));
    }
    let lambda = connection.lambda_endo(q)?;
    supertrace(&endo_power(&lambda, 2 * n + 1)?)
}

/// `P_n = Str((R_{QQ})^{2n})`.
pub fn pontryagin_char(connection: &Connection, q: &HomologicalField, n: usize) -> Result<SuperPolynomial> {
    if n == 0 {
        return Err(Error::InvalidOrder {
            order: 0,
            reason: "Pontryagin characters start at order 1".into(),
        });
    }
    let r = connection.curvature_endo(q.field(), q.field())?;
    supertrace(&endo_power(&r, 2 * n)?)
}

/// `Q^{⊗n}`.
pub fn q_power(q: &HomologicalField, n: usize) -> Result<TensorField> {
    if n == 0 {
        return Err(Error::InvalidOrder {
            order: 0,
            reason: "tensor powers start at order 1".into(),
        });
    }
    let mut acc = q.field().clone();
    for _ in 1..n {
        acc = tensor_product(&acc, q.field())?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    P,
    Qpow,
}

impl Series {
    pub fn depends_on_connection(self) -> bool {
        matches!(self, Series::A | Series::B | Series::C | Series::P)
    }

    fn min_order(self) -> usize {
        match self {
            Series::A | Series::B => 0,
            Series::C | Series::P | Series::Qpow => 1,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
            Series::P => "P",
            Series::Qpow => "Qpow",
        })
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Series::A),
            "B" | "b" => Ok(Series::B),
            "C" | "c" => Ok(Series::C),
            "P" | "p" => Ok(Series::P),
            "Qpow" | "qpow" | "Q" => Ok(Series::Qpow),
            other => Err(Error::Invalid(format!(
                "unknown series `{other}` (expected A, B, C, P or Qpow)"
            ))),
        }
    }
}

/// Evaluates one member of a series as a tensor (functions become `(0,0)`
/// tensors). Orders above `max_order` are rejected.
pub fn compute_series(
    series: Series,
    order: usize,
    q: &HomologicalField,
    connection: &Connection,
    max_order: usize,
) -> Result<TensorField> {
    if order > max_order {
        return Err(Error::InvalidOrder {
            order,
            reason: format!("exceeds the configured maximum {max_order}"),
        });
    }
    if order < series.min_order() {
        return Err(Error::InvalidOrder {
            order,
            reason: format!("series {series} starts at order {}", series.min_order()),
        });
    }
    let scalar = |f: SuperPolynomial| -> Result<TensorField> {
        // the zero polynomial reports even parity; all of these are odd or even by construction
        let parity = f
            .parity()
            .ok_or_else(|| Error::Internal("mixed-parity series value".into()))?;
        let mut t = TensorField::zero(q.chart(), 0, 0, parity);
        if !f.is_zero() {
            t = TensorField::scalar(f)?;
        }
        Ok(t)
    };
    match series {
        Series::A => scalar(a_series_flat(connection, q, order)?).map(|t| force_parity(t, Parity::Odd)),
        Series::B => b_series(&OmegaForm::new(connection, q)?, order),
        Series::C => c_series(&OmegaForm::new(connection, q)?, order),
        Series::P => scalar(pontryagin_char(connection, q, order)?).map(|t| force_parity(t, Parity::Even)),
        Series::Qpow => q_power(q, order),
    }
}

fn force_parity(t: TensorField, parity: Parity) -> TensorField {
    if t.is_zero() {
        TensorField::zero(t.chart(), t.upper(), t.lower(), parity)
    } else {
        t
    }
}

/// A computed cocycle together with its recomputed coboundary.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub series: Series,
    pub order: usize,
    pub value: TensorField,
    /// `δ(value)`, recomputed; zero for every valid input.
    pub closedness_residual: TensorField,
    pub connection: String,
    pub model: String,
}

impl CocycleReport {
    pub fn is_closed(&self) -> bool {
        self.closedness_residual.is_zero()
    }
}

/// [`compute_series`] plus the closedness residual.
pub fn cocycle_report(
    series: Series,
    order: usize,
    q: &HomologicalField,
    connection: &Connection,
    model: &str,
    max_order: usize,
) -> Result<CocycleReport> {
    let value = compute_series(series, order, q, connection, max_order)?;
    let closedness_residual = delta(q, &value)?;
    Ok(CocycleReport {
        series,
        order,
        value,
        closedness_residual,
        connection: if series.depends_on_connection() {
            connection.label().to_string()
        } else {
            "none".into()
        },
        model: model.to_string(),
    })
}
