//! Oriented knot diagrams as crossing lists.
//!
//! Arcs and crossings are numbered together: crossing `k` has incoming under-arc `k`
//! and outgoing under-arc `k + 1` (wrapping `N -> 1`), so a crossing is fully described
//! by its sign and the arc passing over it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// Row `t X_k + (1 - t) X_over - X_{k+1} = 0`.
    Positive,
    /// Row `t^-1 X_k + (1 - t^-1) X_over - X_{k+1} = 0`.
    Negative,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    /// 1-based crossing number.
    pub index: usize,
    pub sign: Sign,
    /// 1-based arc passing over the crossing.
    pub over_arc: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotDiagram {
    pub name: String,
    pub crossings: Vec<Crossing>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    NoCrossings,
    DuplicateIndex { index: usize },
    IndexOutOfOrder { position: usize, index: usize },
    OverArcOutOfRange { index: usize, over_arc: usize, arcs: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCrossings => write!(f, "diagram has no crossings"),
            Violation::DuplicateIndex { index } => write!(f, "crossing index {index} is used twice"),
            Violation::IndexOutOfOrder { position, index } => {
                write!(f, "crossing at position {position} has index {index}")
            }
            Violation::OverArcOutOfRange { index, over_arc, arcs } => write!(
                f,
                "crossing {index}: over arc {over_arc} is outside 1..={arcs}"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl KnotDiagram {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Builds a diagram from `(sign, over_arc)` pairs, numbering crossings in order.
    pub fn from_pairs(name: &str, pairs: &[(Sign, usize)]) -> Result<Self, DiagramError> {
        let d = KnotDiagram {
            name: name.to_string(),
            crossings: pairs
                .iter()
                .enumerate()
                .map(|(i, &(sign, over_arc))| Crossing { index: i + 1, sign, over_arc })
                .collect(),
        };
        let v = validate_diagram(&d);
        if v.is_empty() {
            Ok(d)
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    /// Arc leaving crossing `k` underneath.
    pub fn outgoing_arc(&self, k: usize) -> usize {
        k % self.len() + 1
    }

    /// Census text form, accepted back by [`parse_diagram`].
    pub fn to_census_text(&self) -> String {
        let mut s = format!("knot {}\ncrossings {}\n", self.name, self.len());
        for c in &self.crossings {
            s.push_str(&format!("{} {}\n", c.sign.symbol(), c.over_arc));
        }
        s
    }
}

pub fn validate_diagram(d: &KnotDiagram) -> Vec<Violation> {
    let n = d.crossings.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Violation::NoCrossings);
        return out;
    }
    let mut seen = vec![false; n + 1];
    for (pos, c) in d.crossings.iter().enumerate() {
        if c.index >= 1 && c.index <= n && seen[c.index] {
            out.push(Violation::DuplicateIndex { index: c.index });
        } else if c.index != pos + 1 {
            out.push(Violation::IndexOutOfOrder { position: pos + 1, index: c.index });
        }
        if c.index >= 1 && c.index <= n {
            seen[c.index] = true;
        }
        if c.over_arc < 1 || c.over_arc > n {
            out.push(Violation::OverArcOutOfRange {
                index: c.index,
                over_arc: c.over_arc,
                arcs: n,
            });
        }
    }
    out
}

/// Parses the census format:
///
/// ```text
/// # comment
/// knot 4_1
/// crossings 4
/// - 4
/// + 1
/// - 2
/// + 3
/// ```
///
/// Crossing lines are `<+|-> <over_arc>`; an explicit leading index (`3 - 2`) and the
/// word `over` before the arc (`- over 2`) are also accepted.
pub fn parse_diagram(text: &str) -> Result<KnotDiagram, DiagramError> {
    let mut name: Option<String> = None;
    let mut declared: Option<(usize, usize)> = None;
    let mut crossings = Vec::new();
    let syntax = |line: usize, column: usize, msg: &str| DiagramError::Syntax {
        line,
        column,
        msg: msg.to_string(),
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(body);
        if tokens.is_empty() {
            continue;
        }
        let (col0, first) = tokens[0];
        match first {
            "knot" => {
                if name.is_some() {
                    return Err(syntax(lineno, col0, "repeated 'knot' header"));
                }
                match tokens.get(1) {
                    Some(&(_, v)) if tokens.len() == 2 => name = Some(v.to_string()),
                    _ => return Err(syntax(lineno, col0, "expected 'knot <name>'")),
                }
            }
            "crossings" => {
                if declared.is_some() {
                    return Err(syntax(lineno, col0, "repeated 'crossings' header"));
                }
                match tokens.get(1) {
                    Some(&(c, v)) if tokens.len() == 2 => {
                        let n = v
                            .parse::<usize>()
                            .map_err(|_| syntax(lineno, c, "expected a crossing count"))?;
                        declared = Some((n, lineno));
                    }
                    _ => return Err(syntax(lineno, col0, "expected 'crossings <N>'")),
                }
            }
            _ => {
                if declared.is_none() {
                    return Err(syntax(lineno, col0, "crossing line before 'crossings <N>'"));
                }
                crossings.push(parse_crossing_line(&tokens, lineno, crossings.len() + 1)?);
            }
        }
    }

    let name = name.ok_or_else(|| syntax(1, 1, "missing 'knot <name>' header"))?;
    let (declared_n, decl_line) =
        declared.ok_or_else(|| syntax(1, 1, "missing 'crossings <N>' header"))?;
    if declared_n != crossings.len() {
        return Err(syntax(
            decl_line,
            1,
            &format!("declared {declared_n} crossings but found {}", crossings.len()),
        ));
    }
    let d = KnotDiagram { name, crossings };
    let v = validate_diagram(&d);
    if v.is_empty() {
        Ok(d)
    } else {
        Err(DiagramError::Invalid(v))
    }
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_crossing_line(
    tokens: &[(usize, &str)],
    line: usize,
    position: usize,
) -> Result<Crossing, DiagramError> {
    let syntax = |column: usize, msg: &str| DiagramError::Syntax {
        line,
        column,
        msg: msg.to_string(),
    };
    let mut rest = tokens;
    let mut index = position;
    if let Some(&(c, t)) = rest.first() {
        if t.chars().all(|ch| ch.is_ascii_digit()) {
            index = t.parse().map_err(|_| syntax(c, "bad crossing index"))?;
            rest = &rest[1..];
        }
    }
    let (scol, stok) = *rest.first().ok_or_else(|| syntax(1, "expected a sign"))?;
    let (sign, attached) = match stok.chars().next() {
        Some('+') => (Sign::Positive, &stok[1..]),
        Some('-') => (Sign::Negative, &stok[1..]),
        _ => return Err(syntax(scol, "expected '+' or '-'")),
    };
    let mut arc_tokens: Vec<(usize, &str)> = Vec::new();
    if !attached.is_empty() {
        arc_tokens.push((scol + 1, attached));
    }
    arc_tokens.extend_from_slice(&rest[1..]);
    if arc_tokens.first().map(|t| t.1) == Some("over") {
        arc_tokens.remove(0);
    }
    match arc_tokens.as_slice() {
        [(c, t)] => {
            let over_arc = t.parse().map_err(|_| syntax(*c, "expected an arc number"))?;
            Ok(Crossing { index, sign, over_arc })
        }
        [] => Err(syntax(scol, "missing over arc")),
        [_, (c, _), ..] => Err(syntax(*c, "unexpected trailing token")),
    }
}
