//! Triangularization of colouring matrices using only the restricted operations: scaling
//! a row by `m`, `m^-1` or `-1`, adding one row to another, and swapping rows or columns.
//!
//! The heuristic is deterministic:
//!
//! 1. If every cofactor along the last column is a unit multiple of the last one, the
//!    last row is cleared using the left-kernel relation between the rows.
//! 2. Columns are processed left to right. A unit `±m^k` in the active block is moved to
//!    the pivot, scaled to 1 and used to clear the entries below it.
//! 3. When no unit is available, each column is run through a Euclid-like reduction
//!    (subtract `q m^s` times one row from another while the entry shrinks). A column that
//!    produces a unit, or failing that collapses to a single entry, is committed.
//! 4. Non-unit diagonal entries are moved to the bottom of the diagonal so the result
//!    matches the type I / type II templates when possible.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alexander::determinant;
use crate::colmatrix::ColouringMatrix;
use crate::laurent::LaurentPoly;

pub const DEFAULT_BUDGET: usize = 20_000;

/// Steps of the Euclid-like reduction tried on one column before giving up.
const EUCLID_STEPS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    M,
    MInv,
    MinusOne,
}

impl Unit {
    pub fn poly(self) -> LaurentPoly {
        match self {
            Unit::M => LaurentPoly::m(),
            Unit::MInv => LaurentPoly::m_inv(),
            Unit::MinusOne => LaurentPoly::constant(-1),
        }
    }
}

/// Indices are 0-based in memory and 1-based in the text trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryOp {
    ScaleRow { row: usize, unit: Unit },
    /// Row `dst` becomes row `dst` plus row `src`.
    AddRow { src: usize, dst: usize },
    SwapRows(usize, usize),
    SwapCols(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("index {index} out of range for a {size}x{size} matrix")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("a row cannot be added to itself")]
    SelfAdd,
    #[error("cannot parse trace line {0:?}")]
    BadTrace(String),
}

impl fmt::Display for ElementaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ElementaryOp::ScaleRow { row, unit } => {
                let u = match unit {
                    Unit::M => "m",
                    Unit::MInv => "m^-1",
                    Unit::MinusOne => "-1",
                };
                write!(f, "scale r{} {u}", row + 1)
            }
            ElementaryOp::AddRow { src, dst } => write!(f, "add r{} r{}", src + 1, dst + 1),
            ElementaryOp::SwapRows(i, j) => write!(f, "swapr {} {}", i + 1, j + 1),
            ElementaryOp::SwapCols(i, j) => write!(f, "swapc {} {}", i + 1, j + 1),
        }
    }
}

impl FromStr for ElementaryOp {
    type Err = ReduceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ReduceError::BadTrace(s.to_string());
        let idx = |t: &str| -> Result<usize, ReduceError> {
            let t = t.strip_prefix('r').unwrap_or(t);
            match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(bad()),
            }
        };
        let tokens: Vec<&str> = s.split_whitespace().collect();
        match tokens.as_slice() {
            ["scale", r, u] => {
                let unit = match *u {
                    "m" => Unit::M,
                    "m^-1" => Unit::MInv,
                    "-1" => Unit::MinusOne,
                    _ => return Err(bad()),
                };
                Ok(ElementaryOp::ScaleRow { row: idx(r)?, unit })
            }
            ["add", a, b] => Ok(ElementaryOp::AddRow { src: idx(a)?, dst: idx(b)? }),
            ["swapr", a, b] => Ok(ElementaryOp::SwapRows(idx(a)?, idx(b)?)),
            ["swapc", a, b] => Ok(ElementaryOp::SwapCols(idx(a)?, idx(b)?)),
            _ => Err(bad()),
        }
    }
}

/// One op per line, in the text form of [`ElementaryOp`].
pub fn format_trace(ops: &[ElementaryOp]) -> String {
    ops.iter().map(|o| format!("{o}\n")).collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<ElementaryOp>, ReduceError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

pub fn apply_op_in_place(a: &mut ColouringMatrix, op: &ElementaryOp) -> Result<(), ReduceError> {
    let size = a.size();
    let check = |index: usize| {
        if index < size {
            Ok(())
        } else {
            Err(ReduceError::IndexOutOfRange { index, size })
        }
    };
    match *op {
        ElementaryOp::ScaleRow { row, unit } => {
            check(row)?;
            for e in a.rows[row].iter_mut() {
                *e = match unit {
                    Unit::M => e.shift(1),
                    Unit::MInv => e.shift(-1),
                    Unit::MinusOne => -&*e,
                };
            }
        }
        ElementaryOp::AddRow { src, dst } => {
            check(src)?;
            check(dst)?;
            if src == dst {
                return Err(ReduceError::SelfAdd);
            }
            let source = a.rows[src].clone();
            for (e, s) in a.rows[dst].iter_mut().zip(&source) {
                *e += s;
            }
        }
        ElementaryOp::SwapRows(i, j) => {
            check(i)?;
            check(j)?;
            a.rows.swap(i, j);
        }
        ElementaryOp::SwapCols(i, j) => {
            check(i)?;
            check(j)?;
            for r in a.rows.iter_mut() {
                r.swap(i, j);
            }
            a.column_labels.swap(i, j);
        }
    }
    Ok(())
}

pub fn apply_op(a: &ColouringMatrix, op: &ElementaryOp) -> Result<ColouringMatrix, ReduceError> {
    let mut out = a.clone();
    apply_op_in_place(&mut out, op)?;
    Ok(out)
}

pub fn replay(a: &ColouringMatrix, ops: &[ElementaryOp]) -> Result<ColouringMatrix, ReduceError> {
    let mut out = a.clone();
    for op in ops {
        apply_op_in_place(&mut out, op)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    TypeI,
    TypeII,
    GeneralTriangular,
    SimplifiedBlock,
    Unreduced,
}

impl Classification {
    pub fn is_triangular(self) -> bool {
        matches!(
            self,
            Classification::TypeI | Classification::TypeII | Classification::GeneralTriangular
        )
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::TypeI => "type I",
            Classification::TypeII => "type II",
            Classification::GeneralTriangular => "general triangular",
            Classification::SimplifiedBlock => "simplified block",
            Classification::Unreduced => "unreduced",
        };
        f.write_str(s)
    }
}

/// The entries that determine the colouring count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relevant {
    TypeI {
        alpha: LaurentPoly,
    },
    TypeII {
        alpha1: LaurentPoly,
        beta1: LaurentPoly,
        alpha2: LaurentPoly,
    },
    /// The first `N - 1` diagonal entries.
    GeneralTriangular {
        diagonal: Vec<LaurentPoly>,
    },
    /// `block` is the 2x2 block in rows/columns `N-3, N-2`; `rows` are those two rows
    /// restricted to the last three columns (everything to their left is zero).
    SimplifiedBlock {
        block: [[LaurentPoly; 2]; 2],
        rows: [[LaurentPoly; 3]; 2],
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub classification: Classification,
    pub matrix: ColouringMatrix,
    pub op_log: Vec<ElementaryOp>,
    pub relevant: Relevant,
    pub budget_exhausted: bool,
}

fn lower_zero(a: &ColouringMatrix) -> bool {
    let n = a.size();
    (0..n).all(|i| (0..i).all(|j| a.rows[i][j].is_zero()))
}

fn last_row_zero(a: &ColouringMatrix) -> bool {
    a.rows[a.size() - 1].iter().all(LaurentPoly::is_zero)
}

/// Strongest classification whose template `a` matches as it stands, with its
/// relevant entries.
pub fn classify_with_relevant(a: &ColouringMatrix) -> (Classification, Relevant) {
    let n = a.size();
    let last_zero = last_row_zero(a);
    if last_zero && lower_zero(a) {
        let unit_diag_below = |k: usize| (0..k).all(|i| a.rows[i][i].is_one());
        if n >= 2 && unit_diag_below(n - 2) {
            let alpha = a.rows[n - 2][n - 2].clone();
            if a.rows[n - 2][n - 1] == -&alpha {
                return (Classification::TypeI, Relevant::TypeI { alpha });
            }
        }
        if n >= 3 && unit_diag_below(n - 3) {
            let alpha1 = a.rows[n - 3][n - 3].clone();
            let beta1 = a.rows[n - 3][n - 2].clone();
            let alpha2 = a.rows[n - 2][n - 2].clone();
            if a.rows[n - 3][n - 1] == -(&alpha1 + &beta1) && a.rows[n - 2][n - 1] == -&alpha2 {
                return (Classification::TypeII, Relevant::TypeII { alpha1, beta1, alpha2 });
            }
        }
        let diagonal = (0..n - 1).map(|i| a.rows[i][i].clone()).collect();
        return (Classification::GeneralTriangular, Relevant::GeneralTriangular { diagonal });
    }
    if n >= 3 && last_zero {
        let top_ok = (0..n - 3).all(|j| {
            a.rows[j][j].is_unit() && (j + 1..n).all(|i| a.rows[i][j].is_zero())
        });
        if top_ok {
            let r = |i: usize, j: usize| a.rows[i][j].clone();
            let block = [[r(n - 3, n - 3), r(n - 3, n - 2)], [r(n - 2, n - 3), r(n - 2, n - 2)]];
            let rows = [
                [r(n - 3, n - 3), r(n - 3, n - 2), r(n - 3, n - 1)],
                [r(n - 2, n - 3), r(n - 2, n - 2), r(n - 2, n - 1)],
            ];
            return (Classification::SimplifiedBlock, Relevant::SimplifiedBlock { block, rows });
        }
    }
    (Classification::Unreduced, Relevant::None)
}

pub fn classify(a: &ColouringMatrix) -> Classification {
    classify_with_relevant(a).0
}

pub fn reduce_matrix(a: &ColouringMatrix, budget: usize) -> ReducedForm {
    let mut r = Reducer::new(a.clone(), budget);
    let exhausted = r.run().is_err();
    let (classification, relevant) = if exhausted {
        (Classification::Unreduced, Relevant::None)
    } else {
        classify_with_relevant(&r.a)
    };
    ReducedForm {
        classification,
        matrix: r.a,
        op_log: r.log,
        relevant,
        budget_exhausted: exhausted,
    }
}

#[derive(Debug)]
struct Exhausted;

enum ColumnOutcome {
    Unit,
    Single(usize),
    Stuck,
}

#[derive(Clone)]
struct Reducer {
    a: ColouringMatrix,
    log: Vec<ElementaryOp>,
    budget: usize,
    check_sums: bool,
}

/// Size of an entry for the Euclid-like reduction: span first, then coefficient mass.
fn norm(p: &LaurentPoly) -> (u32, BigInt) {
    (p.span(), p.l1_norm())
}

fn unit_inverse(u: &LaurentPoly) -> LaurentPoly {
    let (neg, k) = u.as_unit().expect("unit");
    let inv = LaurentPoly::monomial(BigInt::from(1), -k);
    if neg {
        -inv
    } else {
        inv
    }
}

impl Reducer {
    fn new(a: ColouringMatrix, budget: usize) -> Self {
        let check_sums = a.row_sums_zero();
        Self { a, log: Vec::new(), budget, check_sums }
    }

    fn n(&self) -> usize {
        self.a.size()
    }

    fn op(&mut self, op: ElementaryOp) -> Result<(), Exhausted> {
        if self.log.len() >= self.budget {
            return Err(Exhausted);
        }
        apply_op_in_place(&mut self.a, &op).expect("reducer only emits valid ops");
        if self.check_sums {
            if let ElementaryOp::ScaleRow { row, .. } | ElementaryOp::AddRow { dst: row, .. } = op {
                debug_assert!(self.a.row_sum(row).is_zero(), "row sum broken by {op}");
            }
        }
        self.log.push(op);
        Ok(())
    }

    /// Row `dst` += `e` * row `src`, spelled out in elementary operations.
    fn add_multiple(&mut self, src: usize, dst: usize, e: &LaurentPoly) -> Result<(), Exhausted> {
        let terms: Vec<(i32, BigInt)> = e.terms().iter().map(|(k, c)| (*k, c.clone())).collect();
        let mut cur_k = 0i32;
        let mut cur_neg = false;
        for (k, c) in terms {
            self.move_scale(src, cur_k, k)?;
            cur_k = k;
            let want_neg = c.is_negative();
            if want_neg != cur_neg {
                self.op(ElementaryOp::ScaleRow { row: src, unit: Unit::MinusOne })?;
                cur_neg = want_neg;
            }
            let times = c.abs().to_u64().unwrap_or(u64::MAX);
            for _ in 0..times {
                self.op(ElementaryOp::AddRow { src, dst })?;
            }
        }
        self.move_scale(src, cur_k, 0)?;
        if cur_neg {
            self.op(ElementaryOp::ScaleRow { row: src, unit: Unit::MinusOne })?;
        }
        Ok(())
    }

    fn move_scale(&mut self, row: usize, from: i32, to: i32) -> Result<(), Exhausted> {
        let unit = if to > from { Unit::M } else { Unit::MInv };
        for _ in 0..from.abs_diff(to) {
            self.op(ElementaryOp::ScaleRow { row, unit })?;
        }
        Ok(())
    }

    fn scale_by_inverse_unit(&mut self, row: usize, u: &LaurentPoly) -> Result<(), Exhausted> {
        let (neg, k) = u.as_unit().expect("unit");
        if neg {
            self.op(ElementaryOp::ScaleRow { row, unit: Unit::MinusOne })?;
        }
        self.move_scale(row, 0, -k)
    }

    fn run(&mut self) -> Result<(), Exhausted> {
        let n = self.n();
        if n == 1 {
            return Ok(());
        }
        self.clear_last_row()?;
        let last = if last_row_zero(&self.a) { n - 2 } else { n - 1 };
        let mut p = 0;
        while p < n - 1 {
            if (p..=last).all(|i| (p..n).all(|j| self.a.rows[i][j].is_zero())) {
                break;
            }
            if let Some((r, c)) = self.find_unit(p, last) {
                self.place_unit_pivot(p, r, c, last)?;
                p += 1;
                continue;
            }
            if let Some(j) = (p..n).find(|&j| (p..=last).all(|i| self.a.rows[i][j].is_zero())) {
                if j != p {
                    self.op(ElementaryOp::SwapCols(p, j))?;
                }
                p += 1;
                continue;
            }
            let mut single: Option<(Reducer, usize, usize)> = None;
            let mut found_unit = false;
            for j in p..n {
                let mut trial = self.clone();
                match trial.euclid_column(j, p, last) {
                    Err(Exhausted) => continue,
                    Ok(ColumnOutcome::Unit) => {
                        *self = trial;
                        found_unit = true;
                        break;
                    }
                    Ok(ColumnOutcome::Single(r)) => {
                        if single.is_none() {
                            single = Some((trial, j, r));
                        }
                    }
                    Ok(ColumnOutcome::Stuck) => {}
                }
            }
            if found_unit {
                continue;
            }
            match single {
                Some((trial, j, r)) => {
                    *self = trial;
                    if r != p {
                        self.op(ElementaryOp::SwapRows(p, r))?;
                    }
                    if j != p {
                        self.op(ElementaryOp::SwapCols(p, j))?;
                    }
                    p += 1;
                }
                None => break,
            }
        }
        if last_row_zero(&self.a) && lower_zero(&self.a) {
            self.sink_non_units()?;
        }
        Ok(())
    }

    /// Makes the last row zero when the cofactors along the last column are unit multiples
    /// of each other, which holds for matrices of knot diagrams.
    fn clear_last_row(&mut self) -> Result<(), Exhausted> {
        let n = self.n();
        if last_row_zero(&self.a) {
            return Ok(());
        }
        let cofactor = |i: usize| -> LaurentPoly {
            let minor: Vec<Vec<LaurentPoly>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| self.a.rows[r][..n - 1].to_vec())
                .collect();
            let d = determinant(&minor);
            if (i + n - 1).is_multiple_of(2) {
                d
            } else {
                -d
            }
        };
        let last = cofactor(n - 1);
        if last.is_zero() {
            return Ok(());
        }
        let mut ratios = Vec::new();
        for i in 0..n - 1 {
            let c = cofactor(i);
            if c.is_zero() {
                continue;
            }
            match c.unit_ratio(&last) {
                Some((neg, k)) => {
                    let u = LaurentPoly::monomial(BigInt::from(if neg { -1 } else { 1 }), k);
                    ratios.push((i, u));
                }
                None => return Ok(()),
            }
        }
        let mut trial = self.clone();
        for (i, u) in &ratios {
            trial.add_multiple(*i, n - 1, u)?;
        }
        if last_row_zero(&trial.a) {
            *self = trial;
        }
        Ok(())
    }

    fn find_unit(&self, p: usize, last: usize) -> Option<(usize, usize)> {
        let n = self.n();
        for j in p..n {
            let mut best: Option<(usize, (u32, bool))> = None;
            for i in p..=last {
                if let Some((neg, k)) = self.a.rows[i][j].as_unit() {
                    let key = (k.unsigned_abs(), neg);
                    if best.as_ref().is_none_or(|(_, b)| key < *b) {
                        best = Some((i, key));
                    }
                    if key == (0, false) {
                        break;
                    }
                }
            }
            if let Some((i, _)) = best {
                return Some((i, j));
            }
        }
        None
    }

    fn place_unit_pivot(&mut self, p: usize, r: usize, c: usize, last: usize) -> Result<(), Exhausted> {
        if r != p {
            self.op(ElementaryOp::SwapRows(p, r))?;
        }
        if c != p {
            self.op(ElementaryOp::SwapCols(p, c))?;
        }
        let u = self.a.rows[p][p].clone();
        self.scale_by_inverse_unit(p, &u)?;
        for i in p + 1..=last {
            let e = self.a.rows[i][p].clone();
            if !e.is_zero() {
                self.add_multiple(p, i, &-e)?;
            }
        }
        Ok(())
    }

    /// Shrinks the entries of column `j` in rows `p..=last` by row operations until a unit
    /// appears in the active block, a single nonzero entry is left in the column, or no
    /// step makes progress.
    fn euclid_column(&mut self, j: usize, p: usize, last: usize) -> Result<ColumnOutcome, Exhausted> {
        let n = self.n();
        for _ in 0..EUCLID_STEPS {
            if (p..=last).any(|i| (p..n).any(|c| self.a.rows[i][c].is_unit())) {
                return Ok(ColumnOutcome::Unit);
            }
            let nz: Vec<usize> = (p..=last).filter(|&i| !self.a.rows[i][j].is_zero()).collect();
            if nz.len() == 1 {
                return Ok(ColumnOutcome::Single(nz[0]));
            }
            let mut best: Option<((u32, BigInt), usize, usize, LaurentPoly)> = None;
            for &f in &nz {
                let fe = &self.a.rows[f][j];
                let current = norm(fe);
                for &g in &nz {
                    if f == g {
                        continue;
                    }
                    let ge = &self.a.rows[g][j];
                    for mult in candidate_multipliers(fe, ge) {
                        let reduced = fe - &(&mult * ge);
                        let nr = norm(&reduced);
                        if nr < current && best.as_ref().is_none_or(|b| nr < b.0) {
                            best = Some((nr, f, g, mult));
                        }
                    }
                }
            }
            match best {
                Some((_, f, g, mult)) => self.add_multiple(g, f, &-mult)?,
                None => return Ok(ColumnOutcome::Stuck),
            }
        }
        Ok(ColumnOutcome::Stuck)
    }

    /// Moves non-unit diagonal entries of a triangular matrix to the end of the diagonal.
    fn sink_non_units(&mut self) -> Result<(), Exhausted> {
        let n = self.n();
        if n < 3 {
            return Ok(());
        }
        loop {
            let mut changed = false;
            for i in 0..n - 2 {
                if !self.a.rows[i][i].is_unit() && self.a.rows[i + 1][i + 1].is_unit() {
                    self.op(ElementaryOp::SwapRows(i, i + 1))?;
                    self.op(ElementaryOp::SwapCols(i, i + 1))?;
                    let u = self.a.rows[i][i].clone();
                    let b = self.a.rows[i + 1][i].clone();
                    if !b.is_zero() {
                        self.add_multiple(i, i + 1, &-(&b * &unit_inverse(&u)))?;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n - 1 {
            let u = self.a.rows[i][i].clone();
            if u.is_unit() && !u.is_one() {
                self.scale_by_inverse_unit(i, &u)?;
            }
        }
        Ok(())
    }
}

/// Multipliers `q m^s` that cancel the top or bottom term of `f` against `g`.
fn candidate_multipliers(f: &LaurentPoly, g: &LaurentPoly) -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    let ends = [
        (f.max_exp().unwrap(), g.max_exp().unwrap()),
        (f.min_exp().unwrap(), g.min_exp().unwrap()),
    ];
    for (ef, eg) in ends {
        let cf = f.coeff(ef);
        let cg = g.coeff(eg);
        let s = ef - eg;
        let fl = cf.div_floor(&cg);
        let mut qs = vec![fl.clone(), fl + 1];
        qs.push(BigInt::from(1));
        qs.push(BigInt::from(-1));
        for q in qs {
            if q.is_zero() {
                continue;
            }
            let m = LaurentPoly::monomial(q, s);
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}
