#![allow(dead_code)]

use colourings::colmatrix::ColouringMatrix;
use colourings::diagram::{KnotDiagram, Sign};
use colourings::laurent::{LaurentPoly, QuandleSpec};
use colourings::reduce::{ElementaryOp, Unit};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;

/// Every valid quandle with `n <= n_max`.
pub fn quandles_up_to(n_max: u64) -> Vec<QuandleSpec> {
    (2..=n_max)
        .flat_map(|n| (1..n).filter(move |m| m.gcd(&n) == 1).map(move |m| QuandleSpec::new(m, n).unwrap()))
        .collect()
}

pub fn random_poly<R: Rng>(rng: &mut R) -> LaurentPoly {
    if rng.gen_bool(0.3) {
        return LaurentPoly::zero();
    }
    let terms: Vec<(i32, BigInt)> = (0..rng.gen_range(1..=3))
        .map(|_| (rng.gen_range(-2..=2), BigInt::from(rng.gen_range(-3..=3))))
        .collect();
    LaurentPoly::from_terms(terms)
}

/// Random `size x size` matrix whose rows sum to zero (the last column balances each row).
pub fn random_row_sum_zero<R: Rng>(rng: &mut R, size: usize) -> ColouringMatrix {
    let rows = (0..size)
        .map(|_| {
            let mut row: Vec<LaurentPoly> = (0..size - 1).map(|_| random_poly(rng)).collect();
            let s = row.iter().fold(LaurentPoly::zero(), |acc, e| &acc + e);
            row.push(-s);
            row
        })
        .collect();
    ColouringMatrix::from_rows(rows).unwrap()
}

pub fn random_op<R: Rng>(rng: &mut R, size: usize) -> ElementaryOp {
    let i = rng.gen_range(0..size);
    let mut j = rng.gen_range(0..size);
    match rng.gen_range(0..4) {
        0 => {
            let unit = [Unit::M, Unit::MInv, Unit::MinusOne][rng.gen_range(0..3)];
            ElementaryOp::ScaleRow { row: i, unit }
        }
        1 => {
            if j == i {
                j = (i + 1) % size;
            }
            ElementaryOp::AddRow { src: i, dst: j }
        }
        2 => ElementaryOp::SwapRows(i, j),
        _ => ElementaryOp::SwapCols(i, j),
    }
}

/// The same knot with arc labels shifted down by `r`.
pub fn rotate(d: &KnotDiagram, r: usize) -> KnotDiagram {
    let n = d.len();
    let relabel = |a: usize| (a - 1 + n - r % n) % n + 1;
    let mut pairs = vec![(Sign::Positive, 0); n];
    for c in &d.crossings {
        pairs[relabel(c.index) - 1] = (c.sign, relabel(c.over_arc));
    }
    KnotDiagram::from_pairs(&format!("{}~r{r}", d.name), &pairs).unwrap()
}

/// Reflection of the diagram in a line of the plane: every sign flips.
pub fn mirror(d: &KnotDiagram) -> KnotDiagram {
    let pairs: Vec<(Sign, usize)> = d
        .crossings
        .iter()
        .map(|c| {
            let s = match c.sign {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
            };
            (s, c.over_arc)
        })
        .collect();
    KnotDiagram::from_pairs(&format!("{}~mirror", d.name), &pairs).unwrap()
}

/// `p(m)` as an integer after clearing negative powers, which does not change its gcd
/// with anything coprime to `m`.
pub fn value_at(p: &LaurentPoly, m: u64) -> BigInt {
    let lo = p.min_exp().unwrap_or(0).min(0);
    p.shift(-lo).eval_int(&BigInt::from(m)).unwrap()
}
