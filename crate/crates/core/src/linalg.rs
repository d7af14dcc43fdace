//! Exact linear algebra over ℚ by fraction-free elimination: every row is
//! scaled to integers, rows are combined by cross multiplication, and each
//! updated row is divided by its content to keep entries small.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|q| !q.is_zero())
        .fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect()
}

fn remove_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g > BigInt::from(1) {
        for v in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// Reduced echelon form (each pivot column is zero outside its pivot
/// row). Returns the surviving rows and their pivot columns.
fn echelon(mut rows: Vec<Vec<BigInt>>, columns: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..columns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        let pv = pivot_row[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pv - &f * y;
            }
            remove_content(row);
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank of a dense rational matrix given by rows.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let columns = first.len();
    let int_rows = rows
        .iter()
        .map(|r| integer_row(r))
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .collect();
    echelon(int_rows, columns).1.len()
}

/// Solves `Σ_j x_j · columns[j] = rhs` where vectors are sparse maps from
/// row labels to coefficients. Returns one solution (free variables set
/// to zero) or `None` if the system is inconsistent.
pub fn solve<K: Ord + Clone + std::hash::Hash>(
    columns: &[BTreeMap<K, BigRational>],
    rhs: &BTreeMap<K, BigRational>,
) -> Option<Vec<BigRational>> {
    let mut labels: HashMap<K, usize> = HashMap::new();
    for key in columns.iter().flat_map(|c| c.keys()).chain(rhs.keys()) {
        let next = labels.len();
        labels.entry(key.clone()).or_insert(next);
    }
    let n = columns.len();
    let mut dense = vec![vec![BigRational::zero(); n + 1]; labels.len()];
    for (j, col) in columns.iter().enumerate() {
        for (k, v) in col {
            dense[labels[k]][j] = v.clone();
        }
    }
    for (k, v) in rhs {
        dense[labels[k]][n] = v.clone();
    }
    let int_rows = dense
        .iter()
        .map(|r| integer_row(r))
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .collect();
    let (rows, pivots) = echelon(int_rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (row, &c) in rows.iter().zip(&pivots) {
        x[c] = BigRational::new(row[n].clone(), row[c].clone());
    }
    Some(x)
}
