//! Counting colourings, i.e. solutions of `A X = 0` over `Z_n`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colmatrix::{ColouringMatrix, EvaluatedMatrix};
use crate::laurent::{LaurentPoly, QuandleSpec};
use crate::par::{self, Execution};
use crate::reduce::{Classification, ReducedForm, Relevant};
use crate::snf::smith_diagonal;

/// Default limit on `n^N` for exhaustive enumeration, and on `n^3` for block counting.
pub const DEFAULT_BRUTE_CAP: u64 = 10_000_000;

/// Default limit on search nodes when solving a triangular system branch by branch.
pub const DEFAULT_TRIANGULAR_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountMethod {
    FormulaI,
    FormulaII,
    GeneralTriangular,
    BlockBrute,
    SnfOracle,
    FullBrute,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CountMethod::FormulaI => "formula-I",
            CountMethod::FormulaII => "formula-II",
            CountMethod::GeneralTriangular => "general-triangular",
            CountMethod::BlockBrute => "block-brute",
            CountMethod::SnfOracle => "snf-oracle",
            CountMethod::FullBrute => "full-brute",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub count: u128,
    pub method: CountMethod,
    pub quandle: QuandleSpec,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("enumeration needs {needed} steps, above the cap {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("reduced form is {0}, which this method cannot count")]
    WrongClassification(Classification),
    #[error("count does not fit in 128 bits")]
    Overflow,
}

/// `gcd(p(m) mod n, n)` with `gcd(0, n) = n`.
pub fn gcd_at(p: &LaurentPoly, q: &QuandleSpec) -> u64 {
    p.eval_mod(q).gcd(&q.n())
}

pub fn count_type_i(alex: &LaurentPoly, q: &QuandleSpec) -> CountResult {
    let count = q.n() as u128 * gcd_at(alex, q) as u128;
    CountResult { count, method: CountMethod::FormulaI, quandle: *q }
}

/// `n * d2 * gcd(beta1(m) * n / d2, gcd(alpha1(m), n))` with `d2 = gcd(alpha2(m), n)`.
pub fn count_type_ii(
    alpha1: &LaurentPoly,
    beta1: &LaurentPoly,
    alpha2: &LaurentPoly,
    q: &QuandleSpec,
) -> CountResult {
    let n = q.n() as u128;
    let d2 = gcd_at(alpha2, q) as u128;
    let g1 = gcd_at(alpha1, q) as u128;
    let b = beta1.eval_mod(q) as u128;
    let inner = (b * (n / d2)).gcd(&g1);
    CountResult { count: n * d2 * inner, method: CountMethod::FormulaII, quandle: *q }
}

/// Counts solutions of an upper-triangular evaluated system whose last row is zero by
/// solving each diagonal congruence `a x = r (mod n)` from the bottom up and following
/// every branch.
pub fn count_triangular_evaluated(e: &EvaluatedMatrix, cap: u64) -> Result<u128, CountError> {
    let size = e.size();
    let n = e.n;
    let mut x = vec![0u64; size];
    let mut nodes = 0u64;
    // With zero row sums, adding a constant to every unknown preserves solutions, so the
    // last unknown can be pinned to 0.
    let shift_invariant = e.rows_sum_to_zero();
    let last_values: Vec<u64> = if shift_invariant { vec![0] } else { (0..n).collect() };
    let mut total: u128 = 0;
    for v in last_values {
        x[size - 1] = v;
        total += solve_upward(e, size as isize - 2, &mut x, &mut nodes, cap)?;
    }
    Ok(if shift_invariant { total * n as u128 } else { total })
}

fn solve_upward(
    e: &EvaluatedMatrix,
    i: isize,
    x: &mut [u64],
    nodes: &mut u64,
    cap: u64,
) -> Result<u128, CountError> {
    if i < 0 {
        return Ok(1);
    }
    *nodes += 1;
    if *nodes > cap {
        return Err(CountError::CapExceeded { needed: format!("more than {cap}"), cap });
    }
    let i = i as usize;
    let n = e.n as u128;
    let row = &e.entries[i];
    let mut known: u128 = 0;
    for j in i + 1..row.len() {
        known = (known + row[j] as u128 * x[j] as u128) % n;
    }
    let rhs = (n - known) % n;
    let a = row[i] as u128;
    let g = a.gcd(&n);
    if !rhs.is_multiple_of(g) {
        return Ok(0);
    }
    let step = n / g;
    let x0 = if step == 1 {
        0
    } else {
        let inv = mod_inverse(a / g % step, step);
        (rhs / g) % step * inv % step
    };
    let mut total = 0u128;
    for k in 0..g {
        x[i] = (x0 + k * step) as u64;
        total += solve_upward(e, i as isize - 1, x, nodes, cap)?;
    }
    Ok(total)
}

fn mod_inverse(a: u128, n: u128) -> u128 {
    let e = (a as i128).extended_gcd(&(n as i128));
    e.x.rem_euclid(n as i128) as u128
}

pub fn count_general_triangular(
    form: &ReducedForm,
    q: &QuandleSpec,
    cap: u64,
) -> Result<CountResult, CountError> {
    if !form.classification.is_triangular() {
        return Err(CountError::WrongClassification(form.classification));
    }
    let count = count_triangular_evaluated(&form.matrix.evaluate(q), cap)?;
    Ok(CountResult { count, method: CountMethod::GeneralTriangular, quandle: *q })
}

/// Brute force over the last three unknowns of a simplified block form. `rows` are the
/// two relevant rows restricted to their three nonzero columns.
pub fn count_block_rows(
    rows: &[[LaurentPoly; 3]; 2],
    q: &QuandleSpec,
    cap: u64,
) -> Result<CountResult, CountError> {
    let n = q.n();
    let cube = (n as u128).pow(3);
    if cube > cap as u128 {
        return Err(CountError::CapExceeded { needed: cube.to_string(), cap });
    }
    let v: Vec<[u128; 3]> = rows
        .iter()
        .map(|r| [r[0].eval_mod(q) as u128, r[1].eval_mod(q) as u128, r[2].eval_mod(q) as u128])
        .collect();
    let n128 = n as u128;
    let mut count = 0u128;
    for x in 0..n128 {
        for y in 0..n128 {
            for z in 0..n128 {
                if v.iter().all(|r| (r[0] * x + r[1] * y + r[2] * z) % n128 == 0) {
                    count += 1;
                }
            }
        }
    }
    Ok(CountResult { count, method: CountMethod::BlockBrute, quandle: *q })
}

pub fn count_block_brute(form: &ReducedForm, q: &QuandleSpec, cap: u64) -> Result<CountResult, CountError> {
    match &form.relevant {
        Relevant::SimplifiedBlock { rows, .. } => count_block_rows(rows, q, cap),
        _ => Err(CountError::WrongClassification(form.classification)),
    }
}

/// Rows multiplied by powers of `m` so that no negative exponents remain, then evaluated
/// as integers at `m` and reduced into `[0, n)`.
pub fn integer_matrix(a: &ColouringMatrix, q: &QuandleSpec) -> Vec<Vec<BigInt>> {
    let m = BigInt::from(q.m());
    let n = BigInt::from(q.n());
    a.rows
        .iter()
        .map(|row| {
            let lo = row.iter().filter_map(LaurentPoly::min_exp).min().unwrap_or(0).min(0);
            row.iter()
                .map(|e| e.shift(-lo).eval_int(&m).expect("no negative exponents").mod_floor(&n))
                .collect()
        })
        .collect()
}

/// Independent count through the Smith normal form over the integers:
/// `prod_i gcd(d_i, n)` over all invariant factors, with `gcd(0, n) = n`.
pub fn count_snf_oracle(a: &ColouringMatrix, q: &QuandleSpec) -> Result<CountResult, CountError> {
    let diag = smith_diagonal(integer_matrix(a, q));
    let n = BigInt::from(q.n());
    let mut count: u128 = 1;
    for d in diag {
        let g = d.gcd(&n).to_u128().ok_or(CountError::Overflow)?;
        count = count.checked_mul(g).ok_or(CountError::Overflow)?;
    }
    Ok(CountResult { count, method: CountMethod::SnfOracle, quandle: *q })
}

/// Exhaustive enumeration of all `n^N` assignments (subtrees are cut as soon as a row is
/// fully assigned and violated). Works for any modulus, including `n = 1`.
pub fn brute_force_evaluated(e: &EvaluatedMatrix, cap: u64, exec: Execution) -> Result<u128, CountError> {
    let size = e.size();
    let n = e.n;
    let total = (n as u128).checked_pow(size as u32);
    match total {
        Some(t) if t <= cap as u128 => {}
        _ => {
            return Err(CountError::CapExceeded {
                needed: total.map_or_else(|| "overflow".into(), |t| t.to_string()),
                cap,
            })
        }
    }
    // rows become checkable once their last nonzero column is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (r, row) in e.entries.iter().enumerate() {
        let last = row.iter().rposition(|&v| n > 0 && v % n != 0).unwrap_or(0);
        ready[last].push(r);
    }
    let count = par::sum(exec, 0..n, |first| {
        let mut x = vec![0u64; size];
        x[0] = first;
        brute_dfs(e, &ready, 1, &mut x)
    });
    Ok(count)
}

fn brute_dfs(e: &EvaluatedMatrix, ready: &[Vec<usize>], next: usize, x: &mut [u64]) -> u128 {
    let n = e.n as u128;
    let col = next - 1;
    for &r in &ready[col] {
        let s: u128 = e.entries[r].iter().zip(x.iter()).map(|(&a, &v)| a as u128 * v as u128).sum();
        if !s.is_multiple_of(n) {
            return 0;
        }
    }
    if next == x.len() {
        return 1;
    }
    let mut total = 0;
    for v in 0..e.n {
        x[next] = v;
        total += brute_dfs(e, ready, next + 1, x);
    }
    total
}

pub fn count_full_brute(a: &ColouringMatrix, q: &QuandleSpec, cap: u64) -> Result<CountResult, CountError> {
    let count = brute_force_evaluated(&a.evaluate(q), cap, Execution::default())?;
    Ok(CountResult { count, method: CountMethod::FullBrute, quandle: *q })
}

/// Anything a count can be obtained from.
#[derive(Clone, Debug)]
pub enum Countable {
    Reduced(ReducedForm),
    Matrix(ColouringMatrix),
    TypeI { alex: LaurentPoly },
    TypeII { alpha1: LaurentPoly, beta1: LaurentPoly, alpha2: LaurentPoly },
    Block { rows: [[LaurentPoly; 3]; 2] },
}

/// Picks the closed formula, triangular solver or block count by the shape of the data,
/// and the Smith normal form oracle for anything else.
pub fn count_auto(k: &Countable, q: &QuandleSpec) -> Result<CountResult, CountError> {
    match k {
        Countable::TypeI { alex } => Ok(count_type_i(alex, q)),
        Countable::TypeII { alpha1, beta1, alpha2 } => Ok(count_type_ii(alpha1, beta1, alpha2, q)),
        Countable::Block { rows } => count_block_rows(rows, q, DEFAULT_BRUTE_CAP),
        Countable::Matrix(a) => count_snf_oracle(a, q),
        Countable::Reduced(form) => match &form.relevant {
            Relevant::TypeI { alpha } => Ok(count_type_i(alpha, q)),
            Relevant::TypeII { alpha1, beta1, alpha2 } => Ok(count_type_ii(alpha1, beta1, alpha2, q)),
            Relevant::GeneralTriangular { .. } => {
                count_general_triangular(form, q, DEFAULT_TRIANGULAR_CAP)
                    .or_else(|_| count_snf_oracle(&form.matrix, q))
            }
            Relevant::SimplifiedBlock { rows, .. } => count_block_rows(rows, q, DEFAULT_BRUTE_CAP)
                .or_else(|_| count_snf_oracle(&form.matrix, q)),
            Relevant::None => count_snf_oracle(&form.matrix, q),
        },
    }
}

impl Countable {
    /// A matrix with the same colourings: the reduced or given matrix, or the smallest
    /// template (`[alpha, -alpha; 0, 0]` for type I, the last three rows for type II and
    /// blocks) that the table data describes.
    pub fn matrix(&self) -> ColouringMatrix {
        let z = LaurentPoly::zero;
        let rows = match self {
            Countable::Reduced(form) => return form.matrix.clone(),
            Countable::Matrix(a) => return a.clone(),
            Countable::TypeI { alex } => vec![vec![alex.clone(), -alex], vec![z(), z()]],
            Countable::TypeII { alpha1, beta1, alpha2 } => vec![
                vec![alpha1.clone(), beta1.clone(), -(alpha1 + beta1)],
                vec![z(), alpha2.clone(), -alpha2],
                vec![z(), z(), z()],
            ],
            Countable::Block { rows } => vec![rows[0].to_vec(), rows[1].to_vec(), vec![z(), z(), z()]],
        };
        ColouringMatrix::from_rows(rows).expect("templates are square")
    }
}
