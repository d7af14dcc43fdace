//! Closedness, bounded exactness, function-space cohomology of purely odd
//! charts, and the transgression that makes connection independence of
//! characteristic classes explicit.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{Chart, Monomial, Parity, SuperPolynomial};
use crate::cocycles::{compute_series, Series};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::lie::{delta, delta_function, HomologicalField};
use crate::linalg;
use crate::models::{extend_with_r11, ModelDescriptor};
use crate::tensor::TensorField;

/// Default bound on the number of unknowns in an exactness system.
pub const DEFAULT_UNKNOWN_CAP: usize = 4000;

/// `δt`; `t` is closed iff this is zero.
pub fn is_closed(q: &HomologicalField, t: &TensorField) -> Result<TensorField> {
    delta(q, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactnessStatus {
    ExactWithWitness,
    NotExactWithinBound,
    NotClosed,
}

impl fmt::Display for ExactnessStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExactnessStatus::ExactWithWitness => "exact-with-witness",
            ExactnessStatus::NotExactWithinBound => "not-exact-within-bound",
            ExactnessStatus::NotClosed => "not-closed",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExactnessVerdict {
    pub status: ExactnessStatus,
    /// Present iff the status is exact; `δ(witness)` equals the input.
    pub witness: Option<TensorField>,
    pub bound: usize,
    /// True when the ansatz covered the whole tensor space (no even
    /// coordinates), so a negative answer is a proof of non-exactness.
    pub conclusive: bool,
    /// `δ` of the input when it is not closed.
    pub residual: Option<TensorField>,
    pub unknowns: usize,
}

fn odd_subsets(chart: &Chart) -> Vec<Vec<usize>> {
    let odd: Vec<usize> = (0..chart.dim()).filter(|&i| chart.parity(i).is_odd()).collect();
    (0u64..1 << odd.len())
        .map(|mask| {
            odd.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}

fn even_exponents(chart: &Chart, bound: usize) -> Vec<Vec<(usize, u16)>> {
    let even: Vec<usize> = (0..chart.dim()).filter(|&i| chart.parity(i).is_even()).collect();
    let mut out = vec![Vec::new()];
    for &i in &even {
        let mut next = Vec::new();
        for partial in &out {
            let used: usize = partial.iter().map(|&(_, e)| e as usize).sum();
            for e in 0..=(bound - used) {
                let mut p = partial.clone();
                if e > 0 {
                    p.push((i, e as u16));
                }
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Monomials with even degree at most `bound`, grouped by parity.
fn monomial_basis(chart: &Chart, bound: usize) -> [Vec<Monomial>; 2] {
    let mut by_parity = [Vec::new(), Vec::new()];
    for odd in odd_subsets(chart) {
        for even in even_exponents(chart, bound) {
            let mut exps = vec![0u16; chart.dim()];
            for &i in &odd {
                exps[i] = 1;
            }
            for &(i, e) in &even {
                exps[i] = e;
            }
            let m = Monomial::from_exponents(chart, exps).expect("valid exponents");
            by_parity[odd.len() % 2].push(m);
        }
    }
    by_parity
}

fn all_keys(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut keys = vec![Vec::new()];
    for _ in 0..rank {
        keys = keys
            .into_iter()
            .flat_map(|k| {
                (0..dim).map(move |i| {
                    let mut k = k.clone();
                    k.push(i);
                    k
                })
            })
            .collect();
    }
    keys
}

type RowLabel = (Vec<usize>, Monomial);

fn flatten(t: &TensorField) -> BTreeMap<RowLabel, BigRational> {
    let mut out = BTreeMap::new();
    for (key, poly) in t.components() {
        for (m, c) in poly.terms() {
            out.insert((key.clone(), m.clone()), c.clone());
        }
    }
    out
}

/// Searches for `S` with `δS = t` among tensors of `t`'s signature and the
/// opposite parity whose components have even-coordinate degree at most
/// `degree_bound`.
pub fn exactness_witness(q: &HomologicalField, t: &TensorField, degree_bound: usize) -> Result<ExactnessVerdict> {
    exactness_witness_capped(q, t, degree_bound, DEFAULT_UNKNOWN_CAP)
}

pub fn exactness_witness_capped(
    q: &HomologicalField,
    t: &TensorField,
    degree_bound: usize,
    cap: usize,
) -> Result<ExactnessVerdict> {
    let chart = q.chart().clone();
    let conclusive = chart.even_count() == 0;
    let residual = delta(q, t)?;
    if !residual.is_zero() {
        return Ok(ExactnessVerdict {
            status: ExactnessStatus::NotClosed,
            witness: None,
            bound: degree_bound,
            conclusive,
            residual: Some(residual),
            unknowns: 0,
        });
    }
    let parity = t.parity() + Parity::Odd;
    let (upper, lower) = t.signature();
    if t.is_zero() {
        return Ok(ExactnessVerdict {
            status: ExactnessStatus::ExactWithWitness,
            witness: Some(TensorField::zero(&chart, upper, lower, parity)),
            bound: degree_bound,
            conclusive,
            residual: None,
            unknowns: 0,
        });
    }
    let monomials = monomial_basis(&chart, degree_bound);
    let keys = all_keys(chart.dim(), upper + lower);
    let unknowns: usize = keys
        .iter()
        .map(|k| {
            let p = parity + Parity::from_bit((k.iter().filter(|&&i| chart.parity(i).is_odd()).count() % 2) as u8);
            monomials[p.bit() as usize].len()
        })
        .sum();
    if unknowns > cap {
        return Err(Error::ResourceCap { unknowns, cap });
    }
    let mut basis = Vec::with_capacity(unknowns);
    for key in &keys {
        let p = parity + Parity::from_bit((key.iter().filter(|&&i| chart.parity(i).is_odd()).count() % 2) as u8);
        for m in &monomials[p.bit() as usize] {
            basis.push((key.clone(), m.clone()));
        }
    }
    let unit = BigRational::from_integer(1.into());
    let columns: Vec<BTreeMap<RowLabel, BigRational>> = basis
        .par_iter()
        .map(|(key, m)| -> Result<_> {
            let poly = SuperPolynomial::monomial(&chart, m.clone(), unit.clone());
            let s = TensorField::from_components(&chart, upper, lower, parity, [(key.clone(), poly)])?;
            Ok(flatten(&delta(q, &s)?))
        })
        .collect::<Result<_>>()?;
    let Some(x) = linalg::solve(&columns, &flatten(t)) else {
        return Ok(ExactnessVerdict {
            status: ExactnessStatus::NotExactWithinBound,
            witness: None,
            bound: degree_bound,
            conclusive,
            residual: None,
            unknowns,
        });
    };
    let mut witness = TensorField::zero(&chart, upper, lower, parity);
    let entries = basis
        .into_iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|((key, m), c)| (key, SuperPolynomial::monomial(&chart, m, c)));
    witness = witness.checked_add(&TensorField::from_components(&chart, upper, lower, parity, entries)?)?;
    if delta(q, &witness)? != *t {
        return Err(Error::Internal("exactness witness failed to re-verify".into()));
    }
    Ok(ExactnessVerdict {
        status: ExactnessStatus::ExactWithWitness,
        witness: Some(witness),
        bound: degree_bound,
        conclusive,
        residual: None,
        unknowns,
    })
}

/// Dimensions of the `δ`-cohomology of functions on a purely odd chart,
/// indexed by monomial degree. `δ` must shift the degree by a fixed amount
/// (true for every Chevalley–Eilenberg field).
pub fn function_cohomology_dims(q: &HomologicalField) -> Result<Vec<usize>> {
    let chart = q.chart().clone();
    if chart.even_count() > 0 {
        return Err(Error::EvenCoordinatesPresent);
    }
    let dim = chart.dim();
    let mut shift: Option<usize> = None;
    for k in 0..dim {
        for (m, _) in q.component(k).terms() {
            let s = m.degree().checked_sub(1).ok_or(Error::NotGraded)?;
            if *shift.get_or_insert(s) != s {
                return Err(Error::NotGraded);
            }
        }
    }
    let by_degree: Vec<Vec<Monomial>> = (0..=dim)
        .map(|d| {
            odd_subsets(&chart)
                .into_iter()
                .filter(|s| s.len() == d)
                .map(|s| {
                    let mut exps = vec![0u16; dim];
                    for i in s {
                        exps[i] = 1;
                    }
                    Monomial::from_exponents(&chart, exps).expect("valid exponents")
                })
                .collect()
        })
        .collect();
    // rank of δ on degree d
    let ranks: Vec<usize> = match shift {
        None => vec![0; dim + 1],
        Some(s) => (0..=dim)
            .into_par_iter()
            .map(|d| {
                if d + s > dim {
                    return 0;
                }
                let target = &by_degree[d + s];
                let index: BTreeMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let unit = BigRational::from_integer(1.into());
                let rows: Vec<Vec<BigRational>> = by_degree[d]
                    .iter()
                    .map(|m| {
                        let image = delta_function(q, &SuperPolynomial::monomial(&chart, m.clone(), unit.clone()))
                            .expect("same chart");
                        let mut row = vec![BigRational::zero(); target.len()];
                        for (tm, c) in image.terms() {
                            row[index[tm]] = c.clone();
                        }
                        row
                    })
                    .collect();
                linalg::rank(&rows)
            })
            .collect(),
    };
    Ok((0..=dim)
        .map(|d| {
            let incoming = match shift {
                Some(s) if d >= s => ranks[d - s],
                _ => 0,
            };
            by_degree[d].len() - ranks[d] - incoming
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct TransgressionResult {
    pub psi: TensorField,
    /// `cocycle(∇₁) − cocycle(∇₀)`.
    pub difference: TensorField,
    /// `δΨ − difference`; zero for every valid input.
    pub residual: TensorField,
}

impl TransgressionResult {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Builds `Ψ` with `δΨ = C_{∇₁}[Q] − C_{∇₀}[Q]` by evaluating the series
/// on `M × ℝ^{1|1}` with `Q̃ = Q + θ∂_t` and `∇̃ = t∇₁ + (1−t)∇₀`, taking
/// the `θ`-linear part of the result and integrating it over `t ∈ [0,1]`.
pub fn transgression(
    series: Series,
    order: usize,
    model: &ModelDescriptor,
    c0: &Connection,
    c1: &Connection,
    max_order: usize,
) -> Result<TransgressionResult> {
    let q = &model.q;
    let chart = q.chart().clone();
    for c in [c0, c1] {
        if !crate::algebra::same_chart(c.chart(), &chart) {
            return Err(Error::ChartMismatch);
        }
    }
    let v0 = compute_series(series, order, q, c0, max_order)?;
    let v1 = compute_series(series, order, q, c1, max_order)?;
    let difference = v1.checked_sub(&v0)?;
    let psi_parity = v0.parity() + Parity::Odd;
    if !series.depends_on_connection() {
        let psi = TensorField::zero(&chart, v0.upper(), v0.lower(), psi_parity);
        let residual = delta(q, &psi)?.checked_sub(&difference)?;
        return Ok(TransgressionResult {
            psi,
            difference,
            residual,
        });
    }
    if series == Series::A {
        return Err(Error::Invalid(
            "the A series is only defined for flat connections; the interpolating connection is not flat".into(),
        ));
    }
    let extended = extend_with_r11(model)?;
    let ext = extended.chart().clone();
    let (t_index, th_index) = (chart.dim(), chart.dim() + 1);
    let interpolated = Connection::interpolate(c0, c1, &ext, t_index)?;
    let full = compute_series(series, order, &extended.q, &interpolated, max_order)?;
    let on_m = full.restrict_indices(chart.dim());
    let mut psi = TensorField::zero(&chart, on_m.upper(), on_m.lower(), psi_parity);
    for (key, value) in on_m.components() {
        let linear = value.partial(th_index)?;
        let integrated = linear.integrate_unit_interval(t_index)?;
        let restricted = integrated.restrict(&chart)?;
        psi = psi.checked_add(&TensorField::from_components(
            &chart,
            on_m.upper(),
            on_m.lower(),
            psi_parity,
            [(key.clone(), restricted)],
        )?)?;
    }
    let residual = delta(q, &psi)?.checked_sub(&difference)?;
    Ok(TransgressionResult {
        psi,
        difference,
        residual,
    })
}
