use std::sync::Arc;

use rayon::prelude::*;

use super::TensorField;
use crate::algebra::{odd, Chart, Parity, SuperPolynomial};

/// A graded derivation of the tensor algebra that commutes with
/// contractions. It is fixed by its action on functions (a vector field)
/// and on the coordinate fields `∂_i`; the action on `dz^j` is forced by
/// `D⟨dz^j, ∂_k⟩ = 0`.
pub(crate) struct Derivation {
    chart: Arc<Chart>,
    parity: Parity,
    field: Vec<(usize, SuperPolynomial)>,
    on_vectors: Vec<Vec<(usize, SuperPolynomial)>>,
    on_covectors: Vec<Vec<(usize, SuperPolynomial)>>,
}

impl Derivation {
    /// `field[i]` are the components of the vector field acting on
    /// functions, `on_vectors[i][k]` the coefficient of `∂_k` in `D(∂_i)`.
    pub(crate) fn new(
        chart: &Arc<Chart>,
        parity: Parity,
        field: Vec<SuperPolynomial>,
        on_vectors: Vec<Vec<SuperPolynomial>>,
    ) -> Self {
        let dim = chart.dim();
        let sparse = |row: &Vec<SuperPolynomial>| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| (k, p.clone()))
                .collect::<Vec<_>>()
        };
        // D(dz^j) = Σ_k W[j][k] dz^k with W[j][k] = −(−1)^{ε_j + ε_j ε_k} U[k][j]
        let mut on_covectors = vec![Vec::new(); dim];
        for (j, row) in on_covectors.iter_mut().enumerate() {
            for (k, column) in on_vectors.iter().enumerate() {
                let u = &column[j];
                if u.is_zero() {
                    continue;
                }
                let (ej, ek) = (chart.bit(j), chart.bit(k));
                let negative = !odd(ej + ej * ek);
                row.push((k, if negative { -u } else { u.clone() }));
            }
        }
        Derivation {
            chart: chart.clone(),
            parity,
            field: field.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect(),
            on_vectors: on_vectors.iter().map(sparse).collect(),
            on_covectors,
        }
    }

    pub(crate) fn apply_function(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(&self.chart);
        for (i, xi) in &self.field {
            out.add_product(xi, &f.d(*i), false);
        }
        out
    }

    pub(crate) fn apply(&self, t: &TensorField) -> TensorField {
        let chart = &self.chart;
        let n = t.upper();
        let d = self.parity.bit() as u32;
        let parity = t.parity() + self.parity;
        let comps: Vec<_> = t.components().collect();
        comps
            .par_iter()
            .fold(
                || TensorField::zero(chart, t.upper(), t.lower(), parity),
                |mut acc, (key, c)| {
                    acc.accumulate((*key).clone(), &self.apply_function(c));
                    let c_bit = t.parity().bit() as u32 + chart.index_parity(key);
                    let mut before = 0u32;
                    for (r, &s) in key.iter().enumerate() {
                        let table = if r < n {
                            &self.on_vectors[s]
                        } else {
                            &self.on_covectors[s]
                        };
                        for (e, g) in table {
                            let neg = odd(d * c_bit + (chart.bit(s) + chart.bit(*e)) * before);
                            let mut new_key = (*key).clone();
                            new_key[r] = *e;
                            let mut prod = SuperPolynomial::zero(chart);
                            prod.add_product(c, g, neg);
                            acc.accumulate(new_key, &prod);
                        }
                        before += chart.bit(s);
                    }
                    acc
                },
            )
            .reduce(
                || TensorField::zero(chart, t.upper(), t.lower(), parity),
                |mut x, y| {
                    x.merge(y);
                    x
                },
            )
            .debug_check()
    }
}
