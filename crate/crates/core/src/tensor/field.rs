use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{same_chart, Chart, Parity, SuperPolynomial};
use crate::error::{Error, Result};

/// A tensor field of type `(upper, lower)` with polynomial components.
///
/// The component stored under `[i₁..i_n, j₁..j_m]` is the coefficient `c` in
/// `c · ∂_{i₁}⊗⋯⊗∂_{i_n}⊗dz^{j₁}⊗⋯⊗dz^{j_m}`, coefficient written on the
/// left and upper slots before lower slots. Every Koszul sign in this crate
/// is derived from that single word order.
#[derive(Clone, Debug)]
pub struct TensorField {
    chart: Arc<Chart>,
    upper: usize,
    lower: usize,
    parity: Parity,
    comps: BTreeMap<Vec<usize>, SuperPolynomial>,
}

/// A `(1,0)` tensor.
pub type VectorField = TensorField;
/// A `(1,1)` tensor, acting on vector fields by composition.
pub type Endomorphism = TensorField;

impl PartialEq for TensorField {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart)
            && self.upper == other.upper
            && self.lower == other.lower
            && self.comps == other.comps
            && (self.parity == other.parity || self.comps.is_empty())
    }
}

impl TensorField {
    pub fn zero(chart: &Arc<Chart>, upper: usize, lower: usize, parity: Parity) -> Self {
        TensorField {
            chart: chart.clone(),
            upper,
            lower,
            parity,
            comps: BTreeMap::new(),
        }
    }

    /// Validating constructor; duplicate keys are summed.
    pub fn from_components(
        chart: &Arc<Chart>,
        upper: usize,
        lower: usize,
        parity: Parity,
        components: impl IntoIterator<Item = (Vec<usize>, SuperPolynomial)>,
    ) -> Result<Self> {
        let mut t = Self::zero(chart, upper, lower, parity);
        for (key, value) in components {
            if key.len() != upper + lower {
                return Err(Error::SlotOutOfRange(format!(
                    "index {key:?} does not fit a ({upper}, {lower}) tensor"
                )));
            }
            for &i in &key {
                chart.check_index(i)?;
            }
            if !same_chart(value.chart(), chart) {
                return Err(Error::ChartMismatch);
            }
            let expected = parity + Parity::from_bit(chart.index_parity(&key) as u8);
            if !value.is_homogeneous_of(expected) {
                return Err(Error::ComponentParity { index: key });
            }
            t.accumulate(key, &value);
        }
        Ok(t)
    }

    /// Identifies a homogeneous function with a `(0,0)` tensor.
    pub fn scalar(f: SuperPolynomial) -> Result<Self> {
        let parity = f.parity().ok_or_else(|| Error::MixedParity {
            context: "scalar tensor".into(),
        })?;
        let chart = f.chart().clone();
        let mut t = Self::zero(&chart, 0, 0, parity);
        t.accumulate(Vec::new(), &f);
        Ok(t)
    }

    /// Vector field `Σ Xⁱ ∂_i` from `(i, Xⁱ)` pairs.
    pub fn vector(
        chart: &Arc<Chart>,
        parity: Parity,
        components: impl IntoIterator<Item = (usize, SuperPolynomial)>,
    ) -> Result<Self> {
        Self::from_components(chart, 1, 0, parity, components.into_iter().map(|(i, f)| (vec![i], f)))
    }

    /// The coordinate vector field `∂_i`.
    pub fn coordinate_vector(chart: &Arc<Chart>, i: usize) -> Result<Self> {
        chart.check_index(i)?;
        let mut t = Self::zero(chart, 1, 0, chart.parity(i));
        t.accumulate(vec![i], &SuperPolynomial::one(chart));
        Ok(t)
    }

    /// The coordinate 1-form `dz^j`.
    pub fn coordinate_covector(chart: &Arc<Chart>, j: usize) -> Result<Self> {
        chart.check_index(j)?;
        let mut t = Self::zero(chart, 0, 1, chart.parity(j));
        t.accumulate(vec![j], &SuperPolynomial::one(chart));
        Ok(t)
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let mut t = Self::zero(chart, 1, 1, Parity::Even);
        let one = SuperPolynomial::one(chart);
        for i in 0..chart.dim() {
            t.accumulate(vec![i, i], &one);
        }
        t
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &SuperPolynomial)> {
        self.comps.iter()
    }

    pub fn get(&self, index: &[usize]) -> Option<&SuperPolynomial> {
        self.comps.get(index)
    }

    pub fn component(&self, index: &[usize]) -> SuperPolynomial {
        self.get(index)
            .cloned()
            .unwrap_or_else(|| SuperPolynomial::zero(&self.chart))
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// The function of a `(0,0)` tensor.
    pub fn as_scalar(&self) -> Option<SuperPolynomial> {
        (self.rank() == 0).then(|| self.component(&[]))
    }

    pub fn is_vector(&self) -> bool {
        self.signature() == (1, 0)
    }

    pub fn is_endomorphism(&self) -> bool {
        self.signature() == (1, 1)
    }

    pub(crate) fn accumulate(&mut self, key: Vec<usize>, value: &SuperPolynomial) {
        if value.is_zero() {
            return;
        }
        match self.comps.get_mut(&key) {
            Some(v) => {
                v.add_assign_ref(value);
                if v.is_zero() {
                    self.comps.remove(&key);
                }
            }
            None => {
                self.comps.insert(key, value.clone());
            }
        }
    }

    pub(crate) fn accumulate_signed(&mut self, key: Vec<usize>, value: &SuperPolynomial, negative: bool) {
        if negative {
            self.accumulate(key, &-value);
        } else {
            self.accumulate(key, value);
        }
    }

    pub(crate) fn merge(&mut self, other: TensorField) {
        for (k, v) in other.comps {
            self.accumulate(k, &v);
        }
    }

    pub(crate) fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// Asserts the component parity rule; used after every construction in
    /// debug builds.
    pub fn check_parity_rule(&self) -> Result<()> {
        for (key, value) in &self.comps {
            let expected = self.parity + Parity::from_bit(self.chart.index_parity(key) as u8);
            if !value.is_homogeneous_of(expected) {
                return Err(Error::ComponentParity { index: key.clone() });
            }
        }
        Ok(())
    }

    pub(crate) fn debug_check(self) -> Self {
        debug_assert!(self.check_parity_rule().is_ok(), "component parity rule violated");
        self
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        if self.signature() != other.signature() {
            return Err(Error::SignatureMismatch(
                self.upper,
                self.lower,
                other.upper,
                other.lower,
            ));
        }
        if self.parity != other.parity && !self.is_zero() && !other.is_zero() {
            return Err(Error::MixedParity {
                context: "tensor sum".into(),
            });
        }
        Ok(())
    }

    fn sum_parity(&self, other: &Self) -> Parity {
        if self.is_zero() {
            other.parity
        } else {
            self.parity
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut out = self.clone().with_parity(self.sum_parity(other));
        for (k, v) in &other.comps {
            out.accumulate(k.clone(), v);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut out = self.clone().with_parity(self.sum_parity(other));
        for (k, v) in &other.comps {
            out.accumulate(k.clone(), &-v);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TensorField {
            comps: self.comps.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.chart, self.upper, self.lower, self.parity);
        }
        TensorField {
            comps: self.comps.iter().map(|(k, v)| (k.clone(), v.scale(q))).collect(),
            ..self.clone()
        }
    }

    /// Left multiplication `f · T` by a homogeneous function.
    pub fn mul_function(&self, f: &SuperPolynomial) -> Result<Self> {
        if !same_chart(f.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let pf = f.parity().ok_or_else(|| Error::MixedParity {
            context: "function multiplier".into(),
        })?;
        let mut out = Self::zero(&self.chart, self.upper, self.lower, self.parity + pf);
        for (k, v) in &self.comps {
            out.accumulate(k.clone(), &(f * v));
        }
        Ok(out)
    }

    /// Keeps only the components whose indices all lie below `dim`, and
    /// moves them to `target` (a prefix of this chart).
    pub fn restrict(&self, target: &Arc<Chart>) -> Result<Self> {
        let mut out = Self::zero(target, self.upper, self.lower, self.parity);
        for (k, v) in &self.comps {
            if k.iter().all(|&i| i < target.dim()) {
                out.accumulate(k.clone(), &v.restrict(target)?);
            }
        }
        Ok(out)
    }

    /// Re-expresses the tensor on a chart extending this one.
    pub fn embed(&self, target: &Arc<Chart>) -> Result<Self> {
        let mut out = Self::zero(target, self.upper, self.lower, self.parity);
        for (k, v) in &self.comps {
            out.accumulate(k.clone(), &v.embed(target)?);
        }
        Ok(out)
    }

    /// Drops every component with an index at or above `bound`.
    pub fn restrict_indices(&self, bound: usize) -> Self {
        TensorField {
            comps: self
                .comps
                .iter()
                .filter(|(k, _)| k.iter().all(|&i| i < bound))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Formats an index tuple with coordinate names, e.g. `(x, t1; t2)`.
    pub fn index_label(&self, key: &[usize]) -> String {
        let names = |ks: &[usize]| {
            ks.iter()
                .map(|&i| self.chart.name(i).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("({}; {})", names(&key[..self.upper]), names(&key[self.upper..]))
    }
}

impl fmt::Display for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) {} tensor", self.upper, self.lower, self.parity)?;
        if self.comps.is_empty() {
            return f.write_str(" = 0");
        }
        for (k, v) in &self.comps {
            write!(f, "\n  {} = {}", self.index_label(k), v)?;
        }
        Ok(())
    }
}
