use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chart::same_chart;
use super::{Chart, Monomial, Parity};
use crate::error::{Error, Result};

/// An element of `ℚ[x₁..x_p] ⊗ Λ[θ₁..θ_q]` in normal form.
///
/// Zero coefficients are never stored, so structural equality of the term
/// maps is equality in the algebra.
#[derive(Clone, Debug)]
pub struct SuperPolynomial {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for SuperPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for SuperPolynomial {}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl SuperPolynomial {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        SuperPolynomial {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, BigRational::one())
    }

    pub fn constant(chart: &Arc<Chart>, value: BigRational) -> Self {
        let mut p = Self::zero(chart);
        p.add_term(Monomial::one(chart.dim()), value);
        p
    }

    pub fn integer(chart: &Arc<Chart>, value: i64) -> Self {
        Self::constant(chart, BigRational::from_integer(value.into()))
    }

    pub fn coordinate(chart: &Arc<Chart>, index: usize) -> Result<Self> {
        chart.check_index(index)?;
        Ok(Self::monomial(
            chart,
            Monomial::variable(chart.dim(), index),
            BigRational::one(),
        ))
    }

    pub fn monomial(chart: &Arc<Chart>, monomial: Monomial, coeff: BigRational) -> Self {
        let mut p = Self::zero(chart);
        p.add_term(monomial, coeff);
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing
    /// duplicates.
    pub fn from_terms(chart: &Arc<Chart>, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(chart);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::one(self.chart.dim()))
    }

    /// `Some(parity)` for homogeneous values (zero counts as even), `None`
    /// for mixed ones.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(p) => p,
        };
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous_of(&self, parity: Parity) -> bool {
        self.terms.keys().all(|m| m.parity(&self.chart) == parity)
    }

    pub fn even_degree(&self) -> usize {
        self.terms.keys().map(|m| m.even_degree(&self.chart)).max().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn ensure_same_chart(&self, other: &Self) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_chart(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_chart(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_chart(other)?;
        Ok(self * other)
    }

    pub(crate) fn add_assign_ref(&mut self, other: &Self) {
        debug_assert!(same_chart(&self.chart, &other.chart));
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub(crate) fn sub_assign_ref(&mut self, other: &Self) {
        debug_assert!(same_chart(&self.chart, &other.chart));
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }

    /// `self += sign * a * b`, avoiding the intermediate product map.
    pub(crate) fn add_product(&mut self, a: &Self, b: &Self, negative: bool) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, neg)) = ma.mul(mb, &self.chart) {
                    let c = ca * cb;
                    self.add_term(m, if neg != negative { -c } else { c });
                }
            }
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.chart);
        }
        SuperPolynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.chart);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Left partial derivative with respect to coordinate `index`.
    pub fn partial(&self, index: usize) -> Result<Self> {
        self.chart.check_index(index)?;
        Ok(self.d(index))
    }

    pub(crate) fn d(&self, index: usize) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            if let Some((mult, rest, neg)) = m.left_partial(index, &self.chart) {
                let v = c * BigRational::from_integer(BigInt::from(mult));
                out.add_term(rest, if neg { -v } else { v });
            }
        }
        out
    }

    /// Re-expresses the polynomial on a chart that extends this one.
    pub fn embed(&self, target: &Arc<Chart>) -> Result<Self> {
        if !self.chart.is_prefix_of(target) {
            return Err(Error::ChartMismatch);
        }
        Ok(SuperPolynomial {
            chart: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extended(target.dim()), c.clone()))
                .collect(),
        })
    }

    /// Inverse of [`embed`](Self::embed); fails if the value depends on a
    /// dropped coordinate.
    pub fn restrict(&self, target: &Arc<Chart>) -> Result<Self> {
        if !target.is_prefix_of(&self.chart) {
            return Err(Error::ChartMismatch);
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let m = m
                .truncated(target.dim())
                .ok_or_else(|| Error::Invalid("value depends on coordinates outside the target chart".into()))?;
            terms.insert(m, c.clone());
        }
        Ok(SuperPolynomial {
            chart: target.clone(),
            terms,
        })
    }

    /// `∫₀¹ f dt` for an even coordinate `t`; the result no longer depends
    /// on `t`.
    pub fn integrate_unit_interval(&self, index: usize) -> Result<Self> {
        self.chart.check_index(index)?;
        if self.chart.parity(index).is_odd() {
            return Err(Error::WrongParity {
                context: "integration variable".into(),
                expected: Parity::Even,
            });
        }
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            let k = m.exponent(index) as i64;
            out.add_term(m.with_exponent(index, 0), c * rational(1, k + 1));
        }
        Ok(out)
    }

    /// Sets every coordinate in `indices` to zero.
    pub fn set_zero(&self, indices: &[usize]) -> Self {
        SuperPolynomial {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| indices.iter().all(|&i| m.exponent(i) == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl<'a> Add<&'a SuperPolynomial> for &'a SuperPolynomial {
    type Output = SuperPolynomial;

    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch");
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a SuperPolynomial> for &'a SuperPolynomial {
    type Output = SuperPolynomial;

    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch");
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a SuperPolynomial> for &'a SuperPolynomial {
    type Output = SuperPolynomial;

    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch");
        let mut out = SuperPolynomial::zero(&self.chart);
        out.add_product(self, rhs, false);
        out
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;

    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for SuperPolynomial {
    type Output = SuperPolynomial;

    fn neg(mut self) -> SuperPolynomial {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Prints in the expression grammar accepted by the manifest parser:
/// `-1/2*t1*t2 + x^2`. Odd factors appear in chart order, so re-parsing
/// reproduces the same normal form.
impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.chart.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.chart.name(i), e)),
                }
            }
            if factors.is_empty() {
                write_rational(f, &abs)?;
            } else {
                if !abs.is_one() {
                    write_rational(f, &abs)?;
                    f.write_str("*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Chart::new([("x", Parity::Even), ("t1", Parity::Odd), ("t2", Parity::Odd)]).unwrap()
    }

    fn var(c: &Arc<Chart>, i: usize) -> SuperPolynomial {
        SuperPolynomial::coordinate(c, i).unwrap()
    }

    #[test]
    fn addition_examples() {
        let c = chart();
        let t1 = var(&c, 1);
        assert_eq!(&t1 + &t1, t1.scale(&rational(2, 1)));
        let x = var(&c, 0);
        assert_eq!(&x + &SuperPolynomial::zero(&c), x);
        let t12 = &var(&c, 1) * &var(&c, 2);
        assert!((&t12 + &(-&t12)).is_zero());
    }

    #[test]
    fn multiplication_examples() {
        let c = chart();
        let (x, t1, t2) = (var(&c, 0), var(&c, 1), var(&c, 2));
        let t12 = &t1 * &t2;
        assert_eq!(&t2 * &t1, -&t12);
        let lhs = &(&x + &t12) * &(&x - &t12);
        assert_eq!(lhs, &x * &x);
        assert!((&t1 * &t1).is_zero());
    }

    #[test]
    fn derivative_examples() {
        let c = chart();
        let (x, t1, t2) = (var(&c, 0), var(&c, 1), var(&c, 2));
        assert_eq!((&t1 * &t2).partial(2).unwrap(), -&t1);
        let x2t1 = &(&x * &x) * &t1;
        assert_eq!(x2t1.partial(0).unwrap(), (&x * &t1).scale(&rational(2, 1)));
        assert!(x.partial(1).unwrap().is_zero());
        assert!(x.partial(7).is_err());
    }

    #[test]
    fn parity_examples() {
        let c = chart();
        let (x, t1, t2) = (var(&c, 0), var(&c, 1), var(&c, 2));
        assert_eq!((&t1 * &t2).parity(), Some(Parity::Even));
        assert_eq!((&t1 + &(&x * &t2)).parity(), Some(Parity::Odd));
        assert_eq!((&SuperPolynomial::one(&c) + &t1).parity(), None);
        assert_eq!(SuperPolynomial::zero(&c).parity(), Some(Parity::Even));
    }

    #[test]
    fn display_is_grammar_conformant() {
        let c = chart();
        let (x, t1, t2) = (var(&c, 0), var(&c, 1), var(&c, 2));
        let p = &(&x * &x) - &(&t1 * &t2).scale(&rational(1, 2));
        assert_eq!(p.to_string(), "-1/2*t1*t2 + x^2");
        assert_eq!(SuperPolynomial::zero(&c).to_string(), "0");
        assert_eq!(SuperPolynomial::integer(&c, -3).to_string(), "-3");
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = chart();
        let b = Chart::new([("y", Parity::Even)]).unwrap();
        let p = SuperPolynomial::one(&a);
        let q = SuperPolynomial::one(&b);
        assert!(matches!(p.checked_add(&q), Err(Error::ChartMismatch)));
        assert!(matches!(p.checked_mul(&q), Err(Error::ChartMismatch)));
    }

    #[test]
    fn unit_interval_integration() {
        let c = Chart::new([("s", Parity::Even), ("t1", Parity::Odd)]).unwrap();
        let s = var(&c, 0);
        let t1 = var(&c, 1);
        let f = &(&s * &s).scale(&rational(3, 1)) + &(&s * &t1);
        let got = f.integrate_unit_interval(0).unwrap();
        let want = &SuperPolynomial::one(&c) + &t1.scale(&rational(1, 2));
        assert_eq!(got, want);
    }
}
