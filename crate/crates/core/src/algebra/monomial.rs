use super::{Chart, Parity};

/// A monomial `x^a ⋯ θ_i θ_j ⋯` in canonical form.
///
/// One exponent per chart coordinate; odd coordinates carry exponent 0 or 1
/// and are understood to appear in ascending chart order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial { exps: vec![0; dim] }
    }

    pub fn variable(dim: usize, index: usize) -> Self {
        let mut m = Self::one(dim);
        m.exps[index] = 1;
        m
    }

    /// Builds a monomial from raw exponents. Returns `None` when an odd
    /// coordinate has exponent above one.
    pub fn from_exponents(chart: &Chart, exps: Vec<u16>) -> Option<Self> {
        assert_eq!(exps.len(), chart.dim());
        for (i, &e) in exps.iter().enumerate() {
            if chart.parity(i).is_odd() && e > 1 {
                return None;
            }
        }
        Some(Monomial { exps })
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.exps[index]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Odd coordinate indices present, ascending.
    pub fn odd_indices<'a>(&'a self, chart: &'a Chart) -> impl Iterator<Item = usize> + 'a {
        (0..self.exps.len()).filter(move |&i| chart.parity(i).is_odd() && self.exps[i] == 1)
    }

    pub fn parity(&self, chart: &Chart) -> Parity {
        Parity::from_bit(self.odd_degree(chart) as u8)
    }

    pub fn odd_degree(&self, chart: &Chart) -> usize {
        self.odd_indices(chart).count()
    }

    pub fn even_degree(&self, chart: &Chart) -> usize {
        (0..self.exps.len())
            .filter(|&i| chart.parity(i).is_even())
            .map(|i| self.exps[i] as usize)
            .sum()
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    /// Product in canonical form together with the sign `true = negative`
    /// of the permutation that sorts the odd factors. `None` if an odd
    /// factor repeats.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(Monomial, bool)> {
        let mut exps = self.exps.clone();
        let mut swaps = 0u32;
        for (b, &e) in other.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if chart.parity(b).is_odd() {
                if self.exps[b] == 1 {
                    return None;
                }
                // odd factors of `self` with larger index must hop over θ_b
                swaps += self.exps[b + 1..]
                    .iter()
                    .enumerate()
                    .filter(|(k, &x)| x == 1 && chart.parity(b + 1 + k).is_odd())
                    .count() as u32;
            }
            exps[b] += e;
        }
        Some((Monomial { exps }, swaps & 1 == 1))
    }

    /// Left derivative `∂_index`: returns the multiplicity, the remaining
    /// monomial and whether the sign is negative.
    pub fn left_partial(&self, index: usize, chart: &Chart) -> Option<(u16, Monomial, bool)> {
        let e = self.exps[index];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[index] -= 1;
        let negative = if chart.parity(index).is_odd() {
            let before = (0..index)
                .filter(|&i| chart.parity(i).is_odd() && self.exps[i] == 1)
                .count();
            before % 2 == 1
        } else {
            false
        };
        Some((e, Monomial { exps }, negative))
    }

    pub(crate) fn extended(&self, dim: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.resize(dim, 0);
        Monomial { exps }
    }

    pub(crate) fn truncated(&self, dim: usize) -> Option<Monomial> {
        if self.exps[dim..].iter().any(|&e| e != 0) {
            return None;
        }
        Some(Monomial {
            exps: self.exps[..dim].to_vec(),
        })
    }

    pub(crate) fn with_exponent(&self, index: usize, e: u16) -> Monomial {
        let mut exps = self.exps.clone();
        exps[index] = e;
        Monomial { exps }
    }
}
