//! Telling knots apart with linear quandles: the constructive choice of a separating
//! quandle, exhaustive grid sweeps, and witnesses that a block matrix is not equivalent
//! to a type I matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::alexander::{is_properly_factorizable, AlexanderError};
use crate::count::{count_auto, count_block_rows, count_snf_oracle, count_type_i, CountError, Countable, DEFAULT_BRUTE_CAP};
use crate::laurent::{LaurentPoly, QuandleSpec};
use crate::par::{self, Execution};
use crate::reduce::{ReducedForm, Relevant};

/// Largest `m` tried by the constructive search.
pub const CONSTRUCTIVE_M_LIMIT: u64 = 1000;

/// Largest modulus scanned by the minimal-n search before falling back to the
/// constructive quandle.
pub const MINIMAL_N_LIMIT: u64 = 5000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistinguishError {
    #[error("Alexander polynomials are unit-equal; use a grid sweep instead")]
    UnitEqualAlexander,
    #[error("{0} is not in a triangular form")]
    NotTriangular(String),
    #[error("no admissible m below {0}")]
    NoAdmissibleM(u64),
    #[error("constructed modulus {0} does not fit in 64 bits")]
    ModulusTooLarge(String),
    #[error("constructed quandle {q} gives equal counts {count}; the construction is broken")]
    ConstructionFailed { q: QuandleSpec, count: u128 },
    #[error("count methods disagree at {q}: {a} by the fast path, {b} by the oracle")]
    Disagreement { q: QuandleSpec, a: u128, b: u128 },
    #[error("{0} has a properly factorizable Alexander polynomial; the witness argument does not apply")]
    Factorizable(String),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// Scan `(m, n)` with `n` increasing first and fall back to the construction.
    #[default]
    MinimalN,
    /// The quandle built from the diagonal values, as is.
    Constructive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinguishWitness {
    pub knots: (String, String),
    pub q: QuandleSpec,
    pub count1: u128,
    pub count2: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonTriangWitness {
    pub knot: String,
    pub q: QuandleSpec,
    pub actual_count: u128,
    pub type_i_prediction: u128,
}

/// A knot given by a triangular matrix: its diagonal and how to count it.
#[derive(Clone, Debug)]
pub struct TriangularKnot {
    pub name: String,
    pub diagonal: Vec<LaurentPoly>,
    pub countable: Countable,
}

impl TriangularKnot {
    pub fn type_i(name: &str, alex: LaurentPoly) -> Self {
        Self {
            name: name.to_string(),
            diagonal: vec![alex.clone()],
            countable: Countable::TypeI { alex },
        }
    }

    pub fn type_ii(name: &str, alpha1: LaurentPoly, beta1: LaurentPoly, alpha2: LaurentPoly) -> Self {
        Self {
            name: name.to_string(),
            diagonal: vec![alpha1.clone(), alpha2.clone()],
            countable: Countable::TypeII { alpha1, beta1, alpha2 },
        }
    }

    pub fn from_reduced(name: &str, form: &ReducedForm) -> Result<Self, DistinguishError> {
        let diagonal = match &form.relevant {
            Relevant::TypeI { alpha } => vec![alpha.clone()],
            Relevant::TypeII { alpha1, alpha2, .. } => vec![alpha1.clone(), alpha2.clone()],
            Relevant::GeneralTriangular { diagonal } => diagonal.clone(),
            _ => return Err(DistinguishError::NotTriangular(name.to_string())),
        };
        Ok(Self { name: name.to_string(), diagonal, countable: Countable::Reduced(form.clone()) })
    }

    pub fn alexander(&self) -> LaurentPoly {
        self.diagonal.iter().fold(LaurentPoly::one(), |acc, d| &acc * d)
    }

    fn normalized_diagonal(&self) -> Result<Vec<LaurentPoly>, DistinguishError> {
        self.diagonal
            .iter()
            .map(|d| d.normalize_alexander().map_err(|e| DistinguishError::Alexander(e.into())))
            .collect()
    }
}

fn next_prime_above(m: u64) -> u64 {
    let is_prime = |v: u64| v >= 2 && (2..).take_while(|d| d * d <= v).all(|d| !v.is_multiple_of(d));
    (m + 1..).find(|&v| is_prime(v)).expect("primes are unbounded")
}

/// The quandle of the constructive argument: the least `m >= 2` at which no diagonal entry
/// vanishes, the two Alexander values differ in absolute value, and `m` is coprime to the
/// constant term of every normalized diagonal entry; then `n` is the product `M` of the
/// absolute diagonal values, times the first prime above `m` when `M <= m`.
pub fn constructive_quandle(k1: &TriangularKnot, k2: &TriangularKnot) -> Result<QuandleSpec, DistinguishError> {
    if k1.alexander().unit_equal(&k2.alexander()) {
        return Err(DistinguishError::UnitEqualAlexander);
    }
    let d1 = k1.normalized_diagonal()?;
    let d2 = k2.normalized_diagonal()?;
    'scan: for m in 2..CONSTRUCTIVE_M_LIMIT {
        let x = BigInt::from(m);
        let mut product = BigInt::one();
        let mut alex = [BigInt::one(), BigInt::one()];
        for (side, diag) in [&d1, &d2].into_iter().enumerate() {
            for p in diag {
                let v = p.eval_int(&x).expect("normalized entries have no negative powers");
                if v.is_zero() || !p.coeff(0).gcd(&x).is_one() {
                    continue 'scan;
                }
                product *= v.abs();
                alex[side] *= &v;
            }
        }
        if alex[0].abs() == alex[1].abs() {
            continue;
        }
        let n = if product > x { product } else { product * BigInt::from(next_prime_above(m)) };
        let n = n.to_u64().ok_or_else(|| DistinguishError::ModulusTooLarge(n.to_string()))?;
        // coprimality follows from the constant terms: p(m) = p(0) mod m
        return QuandleSpec::new(m, n).map_err(|_| DistinguishError::NoAdmissibleM(m));
    }
    Err(DistinguishError::NoAdmissibleM(CONSTRUCTIVE_M_LIMIT))
}

fn counts(k1: &TriangularKnot, k2: &TriangularKnot, q: &QuandleSpec) -> Result<(u128, u128), DistinguishError> {
    Ok((count_auto(&k1.countable, q)?.count, count_auto(&k2.countable, q)?.count))
}

pub fn find_distinguishing_quandle(
    k1: &TriangularKnot,
    k2: &TriangularKnot,
    strategy: Strategy,
) -> Result<DistinguishWitness, DistinguishError> {
    let constructive = constructive_quandle(k1, k2);
    let witness = |q: QuandleSpec, (count1, count2): (u128, u128)| DistinguishWitness {
        knots: (k1.name.clone(), k2.name.clone()),
        q,
        count1,
        count2,
    };
    if strategy == Strategy::MinimalN {
        let limit = match &constructive {
            Ok(q) => q.n().min(MINIMAL_N_LIMIT),
            Err(DistinguishError::UnitEqualAlexander) => return Err(DistinguishError::UnitEqualAlexander),
            Err(_) => MINIMAL_N_LIMIT,
        };
        for n in 2..=limit {
            for q in QuandleSpec::all_for_modulus(n, n) {
                let c = counts(k1, k2, &q)?;
                if c.0 != c.1 {
                    return Ok(witness(q, c));
                }
            }
        }
    }
    let q = constructive?;
    let c = counts(k1, k2, &q)?;
    if c.0 == c.1 {
        return Err(DistinguishError::ConstructionFailed { q, count: c.0 });
    }
    Ok(witness(q, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub m: u64,
    pub n: u64,
    pub count1: u128,
    pub count2: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub cells_checked: usize,
    /// Sorted by `(n, m)`.
    pub cells: Vec<GridCell>,
    pub differing: Vec<GridCell>,
}

/// Every valid quandle with `2 <= n <= n_max` and `1 <= m < min(m_max, n)`, ordered by
/// `(n, m)`.
pub fn grid(m_max: u64, n_max: u64) -> Vec<QuandleSpec> {
    (2..=n_max).flat_map(|n| QuandleSpec::all_for_modulus(n, m_max)).collect()
}

fn checked_count(k: &Countable, q: &QuandleSpec) -> Result<u128, DistinguishError> {
    let fast = count_auto(k, q)?.count;
    if let Countable::Reduced(form) = k {
        let oracle = count_snf_oracle(&form.matrix, q)?.count;
        if oracle != fast {
            return Err(DistinguishError::Disagreement { q: *q, a: fast, b: oracle });
        }
    }
    Ok(fast)
}

/// Counts both knots on every cell of the grid. When a knot comes with a matrix, each
/// count is also checked against the Smith normal form oracle and any disagreement aborts
/// the sweep.
pub fn grid_compare(
    k1: &Countable,
    k2: &Countable,
    m_max: u64,
    n_max: u64,
    exec: Execution,
) -> Result<GridReport, DistinguishError> {
    let quandles = grid(m_max, n_max);
    let results = par::map(exec, &quandles, |q| -> Result<GridCell, DistinguishError> {
        Ok(GridCell {
            m: q.m(),
            n: q.n(),
            count1: checked_count(k1, q)?,
            count2: checked_count(k2, q)?,
        })
    });
    let cells = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let differing = cells.iter().filter(|c| c.count1 != c.count2).copied().collect();
    Ok(GridReport { cells_checked: cells.len(), cells, differing })
}

/// One quandle where the block count and the type I formula were compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockComparison {
    pub q: QuandleSpec,
    pub actual_count: u128,
    pub type_i_prediction: u128,
}

/// Block count against `n * gcd(Alex(m), n)` on every grid cell with `m < m_max`,
/// `n < n_max`.
pub fn compare_block_with_type_i(
    rows: &[[LaurentPoly; 3]; 2],
    alex: &LaurentPoly,
    m_max: u64,
    n_max: u64,
    exec: Execution,
) -> Result<Vec<BlockComparison>, DistinguishError> {
    let quandles = grid(m_max, n_max.saturating_sub(1));
    par::map(exec, &quandles, |q| -> Result<BlockComparison, DistinguishError> {
        Ok(BlockComparison {
            q: *q,
            actual_count: count_block_rows(rows, q, DEFAULT_BRUTE_CAP)?.count,
            type_i_prediction: count_type_i(alex, q).count,
        })
    })
    .into_iter()
    .collect()
}

/// First quandle (by `n`, then `m`, both below the bounds) where the block count differs
/// from the type I prediction. `Ok(None)` is inconclusive, not a proof of anything.
pub fn witness_nontriangularizable(
    name: &str,
    rows: &[[LaurentPoly; 3]; 2],
    alex: &LaurentPoly,
    m_max: u64,
    n_max: u64,
) -> Result<Option<NonTriangWitness>, DistinguishError> {
    if is_properly_factorizable(alex)?.properly_factorizable {
        return Err(DistinguishError::Factorizable(name.to_string()));
    }
    for q in grid(m_max, n_max.saturating_sub(1)) {
        let actual = count_block_rows(rows, &q, DEFAULT_BRUTE_CAP)?.count;
        let prediction = count_type_i(alex, &q).count;
        if actual != prediction {
            return Ok(Some(NonTriangWitness {
                knot: name.to_string(),
                q,
                actual_count: actual,
                type_i_prediction: prediction,
            }));
        }
    }
    Ok(None)
}

pub fn witness_nontriangularizable_form(
    name: &str,
    form: &ReducedForm,
    alex: &LaurentPoly,
    m_max: u64,
    n_max: u64,
) -> Result<Option<NonTriangWitness>, DistinguishError> {
    match &form.relevant {
        Relevant::SimplifiedBlock { rows, .. } => witness_nontriangularizable(name, rows, alex, m_max, n_max),
        _ => Err(DistinguishError::NotTriangular(name.to_string())),
    }
}
