//! Smith normal form of integer matrices with unrestricted row and column operations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Invariant factors `d_1 | d_2 | ...` (non-negative), padded with zeros to
/// `min(rows, cols)` entries.
pub fn smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let k = rows.min(cols);
    let mut diag = Vec::with_capacity(k);
    for t in 0..k {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.resize(k, BigInt::zero());
                return diag;
            };
            a.swap(t, pi);
            for r in a.iter_mut() {
                r.swap(t, pj);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&pivot);
                let (top, rest) = a.split_at_mut(i);
                for (x, p) in rest[0][t..].iter_mut().zip(&top[t][t..]) {
                    *x -= &q * p;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&pivot);
                for r in a.iter_mut().skip(t) {
                    let v = &q * &r[t];
                    r[j] -= v;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the rest by the pivot
            let bad_row = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => {
                    let (top, rest) = a.split_at_mut(i);
                    for (x, v) in top[t][t..].iter_mut().zip(&rest[0][t..]) {
                        *x += v;
                    }
                }
                None => {
                    diag.push(pivot.abs());
                    break;
                }
            }
        }
    }
    diag
}
