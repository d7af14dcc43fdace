//! Symmetric connections, covariant derivatives, curvature and the odd
//! endomorphism `Λ = ∇Q`.
//!
//! `∇_{∂_i} ∂_j = Σ_k Γ^k_{ij} ∂_k`, extended to all tensors as a graded
//! derivation of parity `ε_i` that commutes with contractions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{odd, rational, same_chart, Chart, Parity, SuperPolynomial};
use crate::error::{Error, Result};
use crate::lie::{bracket, HomologicalField};
use crate::random::{random_poly, rng, PolyShape};
use crate::tensor::{
    endo_commutator, endo_compose, from_first_slot_insertions, Derivation, Endomorphism, TensorField, VectorField,
};

/// Christoffel symbols keyed by `(k, i, j)`.
pub type Christoffels = BTreeMap<(usize, usize, usize), SuperPolynomial>;

pub struct Connection {
    chart: Arc<Chart>,
    gamma: Christoffels,
    label: String,
    derivations: OnceLock<Vec<Derivation>>,
    curvature: OnceLock<Vec<Vec<Endomorphism>>>,
}

impl Clone for Connection {
    fn clone(&self) -> Self {
        Connection {
            chart: self.chart.clone(),
            gamma: self.gamma.clone(),
            label: self.label.clone(),
            derivations: OnceLock::new(),
            curvature: self.curvature.clone(),
        }
    }
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Connection")
            .field("label", &self.label)
            .field("chart", &self.chart.to_string())
            .field("nonzero_symbols", &self.gamma.len())
            .finish()
    }
}

impl PartialEq for Connection {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.gamma == other.gamma
    }
}

impl Connection {
    /// Validates graded symmetry `Γ^k_{ij} = (−1)^{ε_iε_j} Γ^k_{ji}` (both
    /// entries must be supplied) and the parity rule
    /// `|Γ^k_{ij}| = ε_i + ε_j + ε_k`.
    pub fn new(
        chart: &Arc<Chart>,
        entries: impl IntoIterator<Item = ((usize, usize, usize), SuperPolynomial)>,
    ) -> Result<Self> {
        let mut gamma = Christoffels::new();
        for ((k, i, j), v) in entries {
            for idx in [k, i, j] {
                chart.check_index(idx)?;
            }
            if !same_chart(v.chart(), chart) {
                return Err(Error::ChartMismatch);
            }
            let slot = gamma.entry((k, i, j)).or_insert_with(|| SuperPolynomial::zero(chart));
            slot.add_assign_ref(&v);
        }
        gamma.retain(|_, v| !v.is_zero());
        let names = |k: usize, i: usize, j: usize, reason: String| Error::InvalidChristoffel {
            k: chart.name(k).to_string(),
            i: chart.name(i).to_string(),
            j: chart.name(j).to_string(),
            reason,
        };
        for (&(k, i, j), v) in &gamma {
            let expected = chart.parity(i) + chart.parity(j) + chart.parity(k);
            if !v.is_homogeneous_of(expected) {
                return Err(names(k, i, j, format!("value `{v}` is not {expected}")));
            }
            let partner = gamma
                .get(&(k, j, i))
                .cloned()
                .unwrap_or_else(|| SuperPolynomial::zero(chart));
            let want = if chart.parity(i).is_odd() && chart.parity(j).is_odd() {
                -&partner
            } else {
                partner
            };
            if *v != want {
                return Err(names(
                    k,
                    i,
                    j,
                    format!("graded symmetry requires it to equal {} (from the swapped entry)", want),
                ));
            }
        }
        Ok(Connection {
            chart: chart.clone(),
            gamma,
            label: "explicit".into(),
            derivations: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    /// The coordinate connection with all Christoffel symbols zero.
    pub fn flat(chart: &Arc<Chart>) -> Self {
        Connection {
            chart: chart.clone(),
            gamma: Christoffels::new(),
            label: "flat".into(),
            derivations: OnceLock::new(),
            curvature: OnceLock::new(),
        }
    }

    /// Seeded random graded-symmetric connection. Each independent symbol
    /// (`i ≤ j`) is nonzero with probability `density`.
    pub fn random(chart: &Arc<Chart>, seed: u64, density: f64, shape: PolyShape) -> Self {
        let mut r = rng(seed);
        let dim = chart.dim();
        let mut gamma = Christoffels::new();
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let both_odd = chart.parity(i).is_odd() && chart.parity(j).is_odd();
                    if (i == j && both_odd) || !r.gen_bool(density) {
                        continue;
                    }
                    let p = chart.parity(i) + chart.parity(j) + chart.parity(k);
                    let v = random_poly(&mut r, chart, p, shape);
                    if v.is_zero() {
                        continue;
                    }
                    if i != j {
                        gamma.insert((k, j, i), if both_odd { -&v } else { v.clone() });
                    }
                    gamma.insert((k, i, j), v);
                }
            }
        }
        Connection {
            chart: chart.clone(),
            gamma,
            label: format!("random(seed={seed})"),
            derivations: OnceLock::new(),
            curvature: OnceLock::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn christoffels(&self) -> &Christoffels {
        &self.gamma
    }

    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> SuperPolynomial {
        self.gamma
            .get(&(k, i, j))
            .cloned()
            .unwrap_or_else(|| SuperPolynomial::zero(&self.chart))
    }

    /// Same symbols on a chart that extends this one.
    pub fn embed(&self, target: &Arc<Chart>) -> Result<Self> {
        let gamma = self
            .gamma
            .iter()
            .map(|(k, v)| Ok((*k, v.embed(target)?)))
            .collect::<Result<Christoffels>>()?;
        Ok(Connection {
            chart: target.clone(),
            gamma,
            label: self.label.clone(),
            derivations: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    /// `∇_t = t∇₁ + (1 − t)∇₀` where `t` is the even coordinate `t_index` of
    /// `target`; both connections are embedded into `target` first.
    pub fn interpolate(c0: &Connection, c1: &Connection, target: &Arc<Chart>, t_index: usize) -> Result<Self> {
        if !same_chart(&c0.chart, &c1.chart) {
            return Err(Error::ChartMismatch);
        }
        if target.parity(t_index).is_odd() {
            return Err(Error::Invalid("interpolation parameter must be even".into()));
        }
        let t = SuperPolynomial::coordinate(target, t_index)?;
        let one_minus_t = &SuperPolynomial::one(target) - &t;
        let mut gamma = Christoffels::new();
        for (key, v) in &c1.gamma {
            gamma.insert(*key, &t * &v.embed(target)?);
        }
        for (key, v) in &c0.gamma {
            let term = &one_minus_t * &v.embed(target)?;
            let slot = gamma.entry(*key).or_insert_with(|| SuperPolynomial::zero(target));
            slot.add_assign_ref(&term);
        }
        gamma.retain(|_, v| !v.is_zero());
        Ok(Connection {
            chart: target.clone(),
            gamma,
            label: format!("t*{} + (1-t)*{}", c1.label, c0.label),
            derivations: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    fn derivations(&self) -> &[Derivation] {
        self.derivations.get_or_init(|| {
            let dim = self.chart.dim();
            (0..dim)
                .map(|a| {
                    let field = (0..dim)
                        .map(|i| {
                            if i == a {
                                SuperPolynomial::one(&self.chart)
                            } else {
                                SuperPolynomial::zero(&self.chart)
                            }
                        })
                        .collect();
                    let on_vectors = (0..dim)
                        .map(|j| (0..dim).map(|k| self.christoffel(k, a, j)).collect())
                        .collect();
                    Derivation::new(&self.chart, self.chart.parity(a), field, on_vectors)
                })
                .collect()
        })
    }

    fn check(&self, t: &TensorField) -> Result<()> {
        if same_chart(&self.chart, t.chart()) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// `∇_{∂_a} T`.
    pub fn covariant_along_coordinate(&self, a: usize, t: &TensorField) -> Result<TensorField> {
        self.check(t)?;
        self.chart.check_index(a)?;
        Ok(self.derivations()[a].apply(t))
    }

    /// `∇_X T = Σ_a X^a ∇_{∂_a} T`.
    pub fn covariant_along(&self, x: &VectorField, t: &TensorField) -> Result<TensorField> {
        self.check(t)?;
        self.check(x)?;
        if !x.is_vector() {
            return Err(Error::SignatureMismatch(1, 0, x.upper(), x.lower()));
        }
        let mut out = TensorField::zero(&self.chart, t.upper(), t.lower(), t.parity() + x.parity());
        for (key, xa) in x.components() {
            let term = self.derivations()[key[0]].apply(t).mul_function(xa)?;
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// The full covariant derivative `∇T`, with the new lower slot first:
    /// inserting `X` into it from the left gives `∇_X T`.
    pub fn covariant_derivative(&self, t: &TensorField) -> Result<TensorField> {
        self.check(t)?;
        let slices: Vec<TensorField> = (0..self.chart.dim())
            .into_par_iter()
            .map(|a| self.derivations()[a].apply(t))
            .collect();
        from_first_slot_insertions(&self.chart, t.upper(), t.lower(), t.parity(), &slices)
    }

    /// `R_{∂_a ∂_b}` for all coordinate pairs, computed once.
    fn curvature_table(&self) -> &Vec<Vec<Endomorphism>> {
        self.curvature.get_or_init(|| {
            let dim = self.chart.dim();
            (0..dim)
                .into_par_iter()
                .map(|a| {
                    (0..dim)
                        .map(|b| {
                            let (da, db) = (&self.derivations()[a], &self.derivations()[b]);
                            let swap_negative = self.chart.parity(a).is_odd() && self.chart.parity(b).is_odd();
                            let columns = (0..dim)
                                .map(|j| {
                                    let dj = TensorField::coordinate_vector(&self.chart, j).expect("index in range");
                                    let ab = da.apply(&db.apply(&dj));
                                    let ba = db.apply(&da.apply(&dj));
                                    if swap_negative {
                                        ab.checked_add(&ba)
                                    } else {
                                        ab.checked_sub(&ba)
                                    }
                                    .expect("same signature")
                                })
                                .collect::<Vec<_>>();
                            endo_from_columns(&self.chart, self.chart.parity(a) + self.chart.parity(b), &columns)
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// `R_{∂_a ∂_b}`.
    pub fn curvature_coordinate(&self, a: usize, b: usize) -> Result<Endomorphism> {
        self.chart.check_index(a)?;
        self.chart.check_index(b)?;
        Ok(self.curvature_table()[a][b].clone())
    }

    /// `R_{XY} = [∇_X, ∇_Y] − ∇_{[X,Y]}`, assembled from the coordinate
    /// table: `R_{XY} = Σ X^a (−1)^{ε_a |Y^b|} Y^b R_{ab}`.
    pub fn curvature_endo(&self, x: &VectorField, y: &VectorField) -> Result<Endomorphism> {
        self.check(x)?;
        self.check(y)?;
        for v in [x, y] {
            if !v.is_vector() {
                return Err(Error::SignatureMismatch(1, 0, v.upper(), v.lower()));
            }
        }
        let table = self.curvature_table();
        let mut out = TensorField::zero(&self.chart, 1, 1, x.parity() + y.parity());
        for (ka, xa) in x.components() {
            let a = ka[0];
            for (kb, yb) in y.components() {
                let b = kb[0];
                let r = &table[a][b];
                if r.is_zero() {
                    continue;
                }
                let yb_bit = y.parity().bit() as u32 + self.chart.bit(b);
                let mut coeff = xa * yb;
                if odd(self.chart.bit(a) * yb_bit) {
                    coeff = -coeff;
                }
                out = out.checked_add(&r.mul_function(&coeff)?)?;
            }
        }
        Ok(out)
    }

    /// Direct evaluation `Z ↦ ∇_X∇_Y Z − (−1)^{|X||Y|}∇_Y∇_X Z − ∇_{[X,Y]}Z`
    /// on coordinate fields, independent of the memoized table.
    pub fn curvature_endo_direct(&self, x: &VectorField, y: &VectorField) -> Result<Endomorphism> {
        let xy = bracket(x, y)?;
        let swap_negative = x.parity().is_odd() && y.parity().is_odd();
        let mut columns = Vec::with_capacity(self.chart.dim());
        for j in 0..self.chart.dim() {
            let dj = TensorField::coordinate_vector(&self.chart, j)?;
            let a = self.covariant_along(x, &self.covariant_along(y, &dj)?)?;
            let b = self.covariant_along(y, &self.covariant_along(x, &dj)?)?;
            let c = self.covariant_along(&xy, &dj)?;
            let col = if swap_negative {
                a.checked_add(&b)?
            } else {
                a.checked_sub(&b)?
            };
            columns.push(col.checked_sub(&c)?);
        }
        Ok(endo_from_columns(&self.chart, x.parity() + y.parity(), &columns))
    }

    /// The curvature as a `(1,3)` tensor. Inserting `X` and then `Y` into
    /// the first lower slot yields `(−1)^{|X||Y|} R_{XY}`: the second
    /// argument has to pass the first on its way in.
    pub fn curvature_tensor(&self) -> Result<TensorField> {
        let dim = self.chart.dim();
        let table = self.curvature_table();
        let mut slices = Vec::with_capacity(dim);
        for (a, row) in table.iter().enumerate() {
            let inner: Vec<TensorField> = row
                .iter()
                .enumerate()
                .map(|(b, r)| {
                    // inserting ∂_b must pass the already inserted ∂_a
                    if odd(self.chart.bit(a) * self.chart.bit(b)) {
                        r.neg()
                    } else {
                        r.clone()
                    }
                })
                .collect();
            slices.push(from_first_slot_insertions(
                &self.chart,
                1,
                1,
                self.chart.parity(a),
                &inner,
            )?);
        }
        from_first_slot_insertions(&self.chart, 1, 2, Parity::Even, &slices)
    }

    pub fn is_flat(&self) -> bool {
        self.curvature_table().iter().flatten().all(|r| r.is_zero())
    }

    /// `Λ = ∇Q`, an odd endomorphism. Inserting `X` from the left gives
    /// `∇_X Q`; as an endomorphism acting on `X` it returns
    /// `(−1)^{|X|} ∇_X Q = ∇_Q X − [Q, X]`.
    pub fn lambda_endo(&self, q: &HomologicalField) -> Result<Endomorphism> {
        self.covariant_derivative(q.field())
    }

    /// Residuals of the structural identities.
    pub fn verify_structural_relations(&self, q: &HomologicalField) -> Result<StructuralReport> {
        let qf = q.field();
        self.check(qf)?;
        let nabla_q_q = self.covariant_along(qf, qf)?;
        let lambda = self.lambda_endo(q)?;
        let r_qq = self.curvature_endo(qf, qf)?;
        let second = self
            .covariant_along(qf, &lambda)?
            .checked_sub(&r_qq.scale(&rational(1, 2)))?
            .checked_sub(&endo_compose(&lambda, &lambda)?)?;
        let dim = self.chart.dim();
        let third: Vec<(usize, TensorField)> = (0..dim)
            .into_par_iter()
            .map(|a| -> Result<(usize, TensorField)> {
                let x = TensorField::coordinate_vector(&self.chart, a)?;
                let lhs = self.covariant_along(&x, &r_qq)?;
                let xq = bracket(&x, qf)?;
                let rhs = self
                    .curvature_endo(&xq, qf)?
                    .checked_sub(&self.covariant_along(qf, &self.curvature_endo(qf, &x)?)?)?
                    .scale(&rational(2, 1));
                Ok((a, lhs.checked_sub(&rhs)?))
            })
            .collect::<Result<_>>()?;
        Ok(StructuralReport {
            nabla_q_q,
            second,
            third,
        })
    }

    /// Residual of `∇_Q A = L_Q A + [Λ, A]`.
    pub fn verify_cov_lie_relation(&self, q: &HomologicalField, a: &Endomorphism) -> Result<TensorField> {
        self.check(a)?;
        let lambda = self.lambda_endo(q)?;
        let lhs = self.covariant_along(q.field(), a)?;
        let lie = crate::lie::delta(q, a)?;
        lhs.checked_sub(&lie)?.checked_sub(&endo_commutator(&lambda, a)?)
    }
}

/// Endomorphism `E` with `E(∂_j) = columns[j]`.
pub fn endo_from_columns(chart: &Arc<Chart>, parity: Parity, columns: &[TensorField]) -> Endomorphism {
    let mut out = TensorField::zero(chart, 1, 1, parity);
    for (j, col) in columns.iter().enumerate() {
        for (key, v) in col.components() {
            out.accumulate(vec![key[0], j], v);
        }
    }
    out.debug_check()
}

/// Residuals of `∇_Q Q = 0`, `∇_Q Λ = ½R_{QQ} + Λ²` and, per coordinate
/// field `X`, `∇_X R_{QQ} = 2(R_{[X,Q]Q} − ∇_Q R_{QX})`.
#[derive(Clone, Debug)]
pub struct StructuralReport {
    pub nabla_q_q: TensorField,
    pub second: TensorField,
    pub third: Vec<(usize, TensorField)>,
}

impl StructuralReport {
    pub fn all_zero(&self) -> bool {
        self.nabla_q_q.is_zero() && self.second.is_zero() && self.third.iter().all(|(_, r)| r.is_zero())
    }

    /// Coordinates whose third-identity residual is nonzero.
    pub fn failing_third(&self) -> Vec<usize> {
        self.third
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(a, _)| *a)
            .collect()
    }
}
