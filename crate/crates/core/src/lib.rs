//! Quandle colourings of knot diagrams in the linear Alexander quandles
//! `Z_n[t, t^-1]/(t - m)`.
//!
//! A diagram gives a colouring matrix over the Laurent polynomials in `m`; the number of
//! colourings in a quandle is the number of solutions of `A X = 0` over `Z_n`. Matrices
//! are brought into triangular (type I / type II) or block form with row operations and
//! row/column swaps, after which closed formulas or a tiny brute force give the count.
//! Two independent oracles (Smith normal form and exhaustive enumeration) back every
//! formula.

pub mod alexander;
pub mod census;
pub mod colmatrix;
pub mod count;
pub mod diagram;
pub mod distinguish;
pub mod laurent;
pub mod par;
pub mod reduce;
pub mod snf;

pub use alexander::{alexander_from_matrix, alexander_from_triangular, is_properly_factorizable, AlexanderPolynomial};
pub use census::{Census, CensusEntry, EntryKind};
pub use colmatrix::{build_colouring_matrix, ColouringMatrix, EvaluatedMatrix};
pub use count::{count_auto, CountMethod, CountResult, Countable};
pub use diagram::{parse_diagram, KnotDiagram, Sign};
pub use laurent::{LaurentPoly, QuandleSpec};
pub use reduce::{reduce_matrix, Classification, ReducedForm};
