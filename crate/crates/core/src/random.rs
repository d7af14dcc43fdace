//! Seeded generators for polynomials, tensors and connections used by the
//! identity checks. ChaCha streams keep results identical across platforms.

use std::sync::Arc;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Chart, Monomial, Parity, SuperPolynomial};
use crate::tensor::TensorField;

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as SeededRng;

pub fn rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct PolyShape {
    /// Bound on the total degree of every monomial.
    pub max_degree: usize,
    pub max_terms: usize,
    /// Coefficients are drawn from `[-coeff_range, coeff_range] \ {0}`.
    pub coeff_range: i64,
}

impl Default for PolyShape {
    fn default() -> Self {
        PolyShape {
            max_degree: 2,
            max_terms: 3,
            coeff_range: 3,
        }
    }
}

fn random_monomial<R: Rng>(rng: &mut R, chart: &Chart, parity: Parity, max_degree: usize) -> Option<Monomial> {
    let odd: Vec<usize> = (0..chart.dim()).filter(|&i| chart.parity(i).is_odd()).collect();
    let even: Vec<usize> = (0..chart.dim()).filter(|&i| chart.parity(i).is_even()).collect();
    let wanted = parity.bit() as usize;
    let sizes: Vec<usize> = (0..=odd.len().min(max_degree)).filter(|k| k % 2 == wanted).collect();
    let &k = sizes.choose(rng)?;
    let mut exps = vec![0u16; chart.dim()];
    for &i in odd.choose_multiple(rng, k) {
        exps[i] = 1;
    }
    if !even.is_empty() {
        let budget = rng.gen_range(0..=max_degree - k);
        for _ in 0..budget {
            exps[*even.choose(rng).unwrap()] += 1;
        }
    }
    Monomial::from_exponents(chart, exps)
}

fn random_coefficient<R: Rng>(rng: &mut R, range: i64) -> BigRational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-range..=range);
    }
    BigRational::from_integer(c.into())
}

/// A homogeneous polynomial of the requested parity (possibly zero when no
/// monomial of that parity fits the degree bound).
pub fn random_poly<R: Rng>(rng: &mut R, chart: &Arc<Chart>, parity: Parity, shape: PolyShape) -> SuperPolynomial {
    let terms = rng.gen_range(1..=shape.max_terms.max(1));
    let mut out = SuperPolynomial::zero(chart);
    for _ in 0..terms {
        if let Some(m) = random_monomial(rng, chart, parity, shape.max_degree) {
            let c = random_coefficient(rng, shape.coeff_range);
            out.add_term(m, c);
        }
    }
    out
}

/// A homogeneous tensor where each component is present with probability
/// `density`.
pub fn random_tensor<R: Rng>(
    rng: &mut R,
    chart: &Arc<Chart>,
    upper: usize,
    lower: usize,
    parity: Parity,
    density: f64,
    shape: PolyShape,
) -> TensorField {
    let dim = chart.dim();
    let rank = upper + lower;
    let mut out = TensorField::zero(chart, upper, lower, parity);
    let total = dim.pow(rank as u32);
    for flat in 0..total {
        if !rng.gen_bool(density) {
            continue;
        }
        let mut key = Vec::with_capacity(rank);
        let mut rest = flat;
        for _ in 0..rank {
            key.push(rest % dim);
            rest /= dim;
        }
        key.reverse();
        let p = parity + Parity::from_bit(chart.index_parity(&key) as u8);
        out.accumulate(key, &random_poly(rng, chart, p, shape));
    }
    out
}

/// A random vector field of the given parity.
pub fn random_vector<R: Rng>(rng: &mut R, chart: &Arc<Chart>, parity: Parity, shape: PolyShape) -> TensorField {
    random_tensor(rng, chart, 1, 0, parity, 0.8, shape)
}
