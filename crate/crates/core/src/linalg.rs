//! Dense linear algebra over a [`FiniteField`].

use crate::finite_field::{Elem, FiniteField};

/// Rank by Gaussian elimination. The input is left untouched.
pub fn rank(field: &FiniteField, rows: &[Vec<Elem>]) -> usize {
    let mut m: Vec<Vec<Elem>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][c]).expect("pivot is nonzero");
        for x in m[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let factor = row[c];
            for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, pv));
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Evaluates at `x` the unique polynomial of degree `< xs.len()` through
/// `(xs[i], ys[i])`. The `xs` must be pairwise distinct.
pub fn lagrange_eval(field: &FiniteField, xs: &[Elem], ys: &[Elem], x: Elem) -> Elem {
    debug_assert_eq!(xs.len(), ys.len());
    if let Some(i) = xs.iter().position(|&xi| xi == x) {
        return ys[i];
    }
    let mut acc = Elem::ZERO;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut num = Elem::ONE;
        let mut den = Elem::ONE;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                num = field.mul(num, field.sub(x, xj));
                den = field.mul(den, field.sub(xi, xj));
            }
        }
        let basis = field.div(num, den).expect("interpolation nodes are distinct");
        acc = field.add(acc, field.mul(yi, basis));
    }
    acc
}
