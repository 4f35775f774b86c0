//! Colouring matrices `A` with `A X = 0` encoding the crossing relations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{validate_diagram, KnotDiagram, Sign, Violation};
use crate::laurent::{LaurentPoly, QuandleSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("invalid diagram: {0:?}")]
    InvalidDiagram(Vec<Violation>),
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("column labels are not a permutation of 1..=N")]
    BadLabels,
}

/// How the relation of a negative crossing is written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RowConvention {
    /// `t^-1 X_k + (1 - t^-1) X_over - X_{k+1}`.
    #[default]
    Standard,
    /// The same row multiplied by `-t`: `-X_k + (1 - t) X_over + t X_{k+1}`.
    NegativeTimesMinusT,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringMatrix {
    /// Column `j` currently holds unknown `X_{column_labels[j]}`.
    pub column_labels: Vec<usize>,
    pub rows: Vec<Vec<LaurentPoly>>,
}

impl ColouringMatrix {
    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare);
        }
        Ok(Self { column_labels: (1..=n).collect(), rows })
    }

    /// Checks shape and labels, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), MatrixError> {
        let n = self.rows.len();
        if n == 0 || self.rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare);
        }
        let mut seen = vec![false; n + 1];
        for &l in &self.column_labels {
            if l == 0 || l > n || seen[l] {
                return Err(MatrixError::BadLabels);
            }
            seen[l] = true;
        }
        if self.column_labels.len() != n {
            return Err(MatrixError::BadLabels);
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.rows[i][j]
    }

    pub fn row_sum(&self, i: usize) -> LaurentPoly {
        let mut s = LaurentPoly::zero();
        for e in &self.rows[i] {
            s += e;
        }
        s
    }

    pub fn row_sums_zero(&self) -> bool {
        (0..self.size()).all(|i| self.row_sum(i).is_zero())
    }

    /// The `(N-1) x (N-1)` minor obtained by deleting the last row and column.
    pub fn alexander_minor(&self) -> Vec<Vec<LaurentPoly>> {
        let n = self.size();
        self.rows[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect()
    }

    pub fn evaluate(&self, q: &QuandleSpec) -> EvaluatedMatrix {
        EvaluatedMatrix {
            n: q.n(),
            entries: self
                .rows
                .iter()
                .map(|r| r.iter().map(|e| e.eval_mod(q)).collect())
                .collect(),
        }
    }

    /// Aligned text rendering with a header of column labels.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect();
        let headers: Vec<String> = self.column_labels.iter().map(|l| format!("X{l}")).collect();
        let widths: Vec<usize> = (0..self.size())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(headers[j].len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = String::new();
        let line = |items: &[String]| -> String {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        out.push_str(&line(&headers));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ColouringMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn build_colouring_matrix(d: &KnotDiagram) -> Result<ColouringMatrix, MatrixError> {
    build_colouring_matrix_with(d, RowConvention::Standard)
}

pub fn build_colouring_matrix_with(
    d: &KnotDiagram,
    convention: RowConvention,
) -> Result<ColouringMatrix, MatrixError> {
    let v = validate_diagram(d);
    if !v.is_empty() {
        return Err(MatrixError::InvalidDiagram(v));
    }
    let n = d.len();
    let t = LaurentPoly::m();
    let t_inv = LaurentPoly::m_inv();
    let one = LaurentPoly::one();
    let minus_one = LaurentPoly::constant(-1);
    let mut rows = vec![vec![LaurentPoly::zero(); n]; n];
    for c in &d.crossings {
        let k = c.index - 1;
        let over = c.over_arc - 1;
        let out = d.outgoing_arc(c.index) - 1;
        let row = &mut rows[k];
        match (c.sign, convention) {
            (Sign::Positive, _) => {
                row[k] += &t;
                row[over] += &(&one - &t);
                row[out] += &minus_one;
            }
            (Sign::Negative, RowConvention::Standard) => {
                row[k] += &t_inv;
                row[over] += &(&one - &t_inv);
                row[out] += &minus_one;
            }
            (Sign::Negative, RowConvention::NegativeTimesMinusT) => {
                row[k] += &minus_one;
                row[over] += &(&one - &t);
                row[out] += &t;
            }
        }
    }
    ColouringMatrix::from_rows(rows)
}

/// A colouring matrix with entries reduced into `Z_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluatedMatrix {
    pub n: u64,
    pub entries: Vec<Vec<u64>>,
}

impl EvaluatedMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn rows_sum_to_zero(&self) -> bool {
        self.entries.iter().all(|r| {
            r.iter().map(|&v| v as u128).sum::<u128>() % self.n.max(1) as u128 == 0
        })
    }

    /// Whether `x` satisfies every row modulo `n`.
    pub fn satisfies(&self, x: &[u64]) -> bool {
        let n = self.n as u128;
        self.entries.iter().all(|r| {
            r.iter().zip(x).map(|(&a, &v)| a as u128 * v as u128).sum::<u128>() % n == 0
        })
    }
}

pub fn evaluate_matrix(a: &ColouringMatrix, q: &QuandleSpec) -> EvaluatedMatrix {
    a.evaluate(q)
}
