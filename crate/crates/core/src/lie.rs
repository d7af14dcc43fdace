//! Vector fields as derivations, the bracket, Lie derivatives of arbitrary
//! tensors and the coboundary `δ = L_Q`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{same_chart, Chart, Parity, SuperPolynomial};
use crate::error::{Error, Result};
use crate::tensor::{Derivation, TensorField, VectorField};

fn ensure_vector(x: &TensorField) -> Result<()> {
    if x.is_vector() {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(1, 0, x.upper(), x.lower()))
    }
}

/// `X(f) = Σ Xⁱ ∂_i f` with left derivatives.
pub fn apply_vector(x: &VectorField, f: &SuperPolynomial) -> Result<SuperPolynomial> {
    ensure_vector(x)?;
    if !same_chart(x.chart(), f.chart()) {
        return Err(Error::ChartMismatch);
    }
    let mut out = SuperPolynomial::zero(x.chart());
    for (key, xi) in x.components() {
        out.add_product(xi, &f.d(key[0]), false);
    }
    Ok(out)
}

/// `[X,Y]^k = X(Y^k) − (−1)^{|X||Y|} Y(X^k)`, i.e. the graded commutator
/// of derivations evaluated on the coordinate functions.
pub fn bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    ensure_vector(x)?;
    ensure_vector(y)?;
    if !same_chart(x.chart(), y.chart()) {
        return Err(Error::ChartMismatch);
    }
    let chart = x.chart();
    let swap_negative = x.parity().is_odd() && y.parity().is_odd();
    let mut out = TensorField::zero(chart, 1, 0, x.parity() + y.parity());
    for k in 0..chart.dim() {
        let xy = apply_vector(x, &y.component(&[k]))?;
        let yx = apply_vector(y, &x.component(&[k]))?;
        let v = if swap_negative { &xy + &yx } else { &xy - &yx };
        out.accumulate(vec![k], &v);
    }
    Ok(out.debug_check())
}

fn lie_derivation(x: &VectorField) -> Result<Derivation> {
    let chart = x.chart();
    let dim = chart.dim();
    let mut on_vectors = Vec::with_capacity(dim);
    for i in 0..dim {
        let b = bracket(x, &TensorField::coordinate_vector(chart, i)?)?;
        on_vectors.push((0..dim).map(|k| b.component(&[k])).collect());
    }
    let field = (0..dim).map(|k| x.component(&[k])).collect();
    Ok(Derivation::new(chart, x.parity(), field, on_vectors))
}

/// Lie derivative `L_X T`: `X(f)` on functions, `[X, Y]` on vector fields,
/// extended as a graded derivation commuting with contractions.
pub fn lie_derivative(x: &VectorField, t: &TensorField) -> Result<TensorField> {
    ensure_vector(x)?;
    if !same_chart(x.chart(), t.chart()) {
        return Err(Error::ChartMismatch);
    }
    Ok(lie_derivation(x)?.apply(t))
}

/// An odd vector field certified to satisfy `[Q, Q] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologicalField {
    q: VectorField,
}

/// Why a vector field failed the homological check: the nonzero
/// components of `[Q, Q]`.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct NonHomological {
    pub chart: Arc<Chart>,
    pub nonzero: Vec<(usize, SuperPolynomial)>,
}

impl fmt::Display for NonHomological {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[Q,Q] does not vanish:")?;
        for (k, v) in &self.nonzero {
            write!(f, " [Q,Q]^{} = {};", self.chart.name(*k), v)?;
        }
        Ok(())
    }
}

impl HomologicalField {
    pub fn field(&self) -> &VectorField {
        &self.q
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.q.chart()
    }

    pub fn component(&self, k: usize) -> SuperPolynomial {
        self.q.component(&[k])
    }

    pub fn into_field(self) -> VectorField {
        self.q
    }
}

/// Certifies `[Q, Q] = 0`. Even or non-vector inputs are rejected; a
/// failing field reports every nonzero component of the self-bracket.
pub fn check_homological(x: VectorField) -> Result<HomologicalField> {
    ensure_vector(&x)?;
    if x.parity() != Parity::Odd && !x.is_zero() {
        return Err(Error::WrongParity {
            context: "homological vector field".into(),
            expected: Parity::Odd,
        });
    }
    let x = x.with_parity(Parity::Odd);
    let qq = bracket(&x, &x)?;
    if qq.is_zero() {
        Ok(HomologicalField { q: x })
    } else {
        Err(NonHomological {
            chart: x.chart().clone(),
            nonzero: qq.components().map(|(k, v)| (k[0], v.clone())).collect(),
        }
        .into())
    }
}

/// The coboundary `δT = L_Q T`.
pub fn delta(q: &HomologicalField, t: &TensorField) -> Result<TensorField> {
    lie_derivative(&q.q, t)
}

/// Shorthand for `δ` on functions.
pub fn delta_function(q: &HomologicalField, f: &SuperPolynomial) -> Result<SuperPolynomial> {
    apply_vector(&q.q, f)
}
