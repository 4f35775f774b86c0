//! Bundled knot data: type I Alexander polynomials, type II relevant entries, the 2x2
//! blocks of the matrices that were not triangularized, diagrams, and lists of related
//! knots.

use std::fmt;
use std::fs;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::count::Countable;
use crate::diagram::{parse_diagram, DiagramError, KnotDiagram};
use crate::laurent::LaurentPoly;

/// Environment variable overriding the data directory.
pub const DATA_DIR_ENV: &str = "COLOURINGS_DATA";

pub fn default_data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(p) => PathBuf::from(p),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}, line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Diagram { path: PathBuf, source: DiagramError },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockStatus {
    /// Shown not to be equivalent to a triangular matrix.
    Proven,
    /// Believed non-triangularizable, no witness quandle known.
    Conjectured,
    /// Unknown either way.
    Open,
    /// Triangularizable only if column operations are allowed.
    ColumnOperations,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockData {
    /// `[[a, b], [c, d]]`.
    pub block: [[LaurentPoly; 2]; 2],
    /// The two relevant rows over the last three columns.
    pub rows: [[LaurentPoly; 3]; 2],
    /// Whether the full rows were given explicitly rather than completed from the block.
    pub rows_given: bool,
    pub status: BlockStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    TypeI { alex: LaurentPoly },
    TypeII { alpha1: LaurentPoly, beta1: LaurentPoly, alpha2: LaurentPoly },
    Block(BlockData),
    Diagram(KnotDiagram),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KindTag {
    TypeI,
    TypeII,
    Block,
    Diagram,
}

impl EntryKind {
    pub fn tag(&self) -> KindTag {
        match self {
            EntryKind::TypeI { .. } => KindTag::TypeI,
            EntryKind::TypeII { .. } => KindTag::TypeII,
            EntryKind::Block(_) => KindTag::Block,
            EntryKind::Diagram(_) => KindTag::Diagram,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub name: String,
    pub kind: EntryKind,
    pub source: String,
}

impl CensusEntry {
    /// Counting data for table entries; diagrams need a matrix built first.
    pub fn countable(&self) -> Option<Countable> {
        match &self.kind {
            EntryKind::TypeI { alex } => Some(Countable::TypeI { alex: alex.clone() }),
            EntryKind::TypeII { alpha1, beta1, alpha2 } => Some(Countable::TypeII {
                alpha1: alpha1.clone(),
                beta1: beta1.clone(),
                alpha2: alpha2.clone(),
            }),
            EntryKind::Block(b) => Some(Countable::Block { rows: b.rows.clone() }),
            EntryKind::Diagram(_) => None,
        }
    }

    /// Alexander polynomial implied by a table entry (unnormalized for type II).
    pub fn alexander(&self) -> Option<LaurentPoly> {
        match &self.kind {
            EntryKind::TypeI { alex } => Some(alex.clone()),
            EntryKind::TypeII { alpha1, alpha2, .. } => Some(alpha1 * alpha2),
            EntryKind::Block(b) => Some(
                &(&b.block[0][0] * &b.block[1][1]) - &(&b.block[0][1] * &b.block[1][0]),
            ),
            EntryKind::Diagram(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct TypeIGroup {
    pub knots: Vec<String>,
    pub alexander: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct DistinguishedPair {
    pub type_i: String,
    pub type_ii: String,
    pub m: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct KnotPair {
    pub type_i: String,
    pub type_ii: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct ConjecturedPairs {
    pub tag: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct Relations {
    pub source: String,
    pub type_i_groups: Vec<TypeIGroup>,
    pub distinguished_pairs: Vec<DistinguishedPair>,
    pub proven_indistinguishable: Vec<KnotPair>,
    /// Pairs conjectured to be indistinguishable. Only ever swept, never asserted.
    pub conjectured_indistinguishable: ConjecturedPairs,
    #[serde(deserialize_with = "ordered_entries")]
    pub not_properly_factorizable: Vec<(String, Vec<i64>)>,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub entries: Vec<CensusEntry>,
    pub relations: Relations,
    pub dir: PathBuf,
}

/// Object entries in file order; a repeated key is an error.
fn ordered_entries<'de, D, T>(d: D) -> Result<Vec<(String, T)>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    struct V<T>(PhantomData<T>);
    impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
        type Value = Vec<(String, T)>;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            write!(f, "an object keyed by knot name")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out: Vec<(String, T)> = Vec::new();
            while let Some((k, v)) = access.next_entry::<String, T>()? {
                if out.iter().any(|(name, _)| *name == k) {
                    return Err(serde::de::Error::custom(format!("duplicate knot name {k}")));
                }
                out.push((k, v));
            }
            Ok(out)
        }
    }
    d.deserialize_map(V(PhantomData))
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
struct TableFile<T> {
    source: String,
    #[serde(deserialize_with = "ordered_entries")]
    entries: Vec<(String, T)>,
}

#[derive(Deserialize)]
struct TypeIIRecord {
    alpha1: Vec<i64>,
    beta1: Vec<i64>,
    alpha2: Vec<i64>,
}

type RowsRecord = [[Vec<i64>; 3]; 2];

#[derive(Deserialize)]
struct BlockRecord {
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
    d: Vec<i64>,
    nontriangularizable: BlockStatus,
    rows: Option<RowsRecord>,
}

fn read(path: &Path) -> Result<String, CensusError> {
    fs::read_to_string(path).map_err(|source| CensusError::Io { path: path.to_path_buf(), source })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CensusError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CensusError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })
}

fn poly(c: &[i64]) -> LaurentPoly {
    LaurentPoly::from_coeffs(c)
}

impl Census {
    /// Loads `typeI.json`, `typeII.json`, `blocks.json`, `relations.json` and every
    /// `diagrams/*.knot` file from `dir`.
    pub fn load(dir: &Path) -> Result<Census, CensusError> {
        let mut entries = Vec::new();

        let path = dir.join("typeI.json");
        let t1: TableFile<Vec<i64>> = read_json(&path)?;
        for (name, coeffs) in t1.entries {
            let alex = poly(&coeffs);
            if alex.is_zero() {
                return Err(CensusError::Invalid { path, msg: format!("{name}: zero polynomial") });
            }
            entries.push(CensusEntry { name, kind: EntryKind::TypeI { alex }, source: t1.source.clone() });
        }

        let path = dir.join("typeII.json");
        let t2: TableFile<TypeIIRecord> = read_json(&path)?;
        for (name, r) in t2.entries {
            entries.push(CensusEntry {
                name,
                kind: EntryKind::TypeII {
                    alpha1: poly(&r.alpha1),
                    beta1: poly(&r.beta1),
                    alpha2: poly(&r.alpha2),
                },
                source: t2.source.clone(),
            });
        }

        let path = dir.join("blocks.json");
        let bl: TableFile<BlockRecord> = read_json(&path)?;
        for (name, r) in bl.entries {
            let [a, b, c, d] = [&r.a, &r.b, &r.c, &r.d].map(|v| poly(v));
            let completed = [
                [a.clone(), b.clone(), -(&a + &b)],
                [c.clone(), d.clone(), -(&c + &d)],
            ];
            let rows_given = r.rows.is_some();
            if let Some(given) = r.rows {
                let given = given.map(|row| row.map(|e| poly(&e)));
                if given != completed {
                    return Err(CensusError::Invalid {
                        path,
                        msg: format!("{name}: rows disagree with the block or do not sum to zero"),
                    });
                }
            }
            entries.push(CensusEntry {
                name,
                kind: EntryKind::Block(BlockData {
                    block: [[a, b], [c, d]],
                    rows: completed,
                    rows_given,
                    status: r.nontriangularizable,
                }),
                source: bl.source.clone(),
            });
        }

        let diag_dir = dir.join("diagrams");
        let mut files: Vec<PathBuf> = fs::read_dir(&diag_dir)
            .map_err(|source| CensusError::Io { path: diag_dir.clone(), source })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "knot"))
            .collect();
        files.sort();
        for path in files {
            let text = read(&path)?;
            let d = parse_diagram(&text).map_err(|source| CensusError::Diagram { path: path.clone(), source })?;
            let source = text
                .lines()
                .find_map(|l| l.trim().strip_prefix('#').map(|s| s.trim().to_string()))
                .unwrap_or_else(|| path.display().to_string());
            entries.push(CensusEntry { name: d.name.clone(), kind: EntryKind::Diagram(d), source });
        }

        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.name == e.name && o.kind.tag() == e.kind.tag()) {
                return Err(CensusError::Invalid {
                    path: dir.to_path_buf(),
                    msg: format!("{} appears twice as {:?}", e.name, e.kind.tag()),
                });
            }
        }

        let relations: Relations = read_json(&dir.join("relations.json"))?;
        Ok(Census { entries, relations, dir: dir.to_path_buf() })
    }

    pub fn load_default() -> Result<Census, CensusError> {
        Self::load(&default_data_dir())
    }

    /// A table entry for `name` if there is one, otherwise its diagram.
    pub fn lookup(&self, name: &str) -> Option<&CensusEntry> {
        [KindTag::TypeI, KindTag::TypeII, KindTag::Block, KindTag::Diagram]
            .into_iter()
            .find_map(|t| self.lookup_kind(name, t))
    }

    pub fn lookup_kind(&self, name: &str, tag: KindTag) -> Option<&CensusEntry> {
        self.entries.iter().find(|e| e.name == name && e.kind.tag() == tag)
    }

    pub fn of_kind(&self, tag: KindTag) -> impl Iterator<Item = &CensusEntry> {
        self.entries.iter().filter(move |e| e.kind.tag() == tag)
    }

    pub fn diagram(&self, name: &str) -> Option<&KnotDiagram> {
        match &self.lookup_kind(name, KindTag::Diagram)?.kind {
            EntryKind::Diagram(d) => Some(d),
            _ => None,
        }
    }

    pub fn diagrams(&self) -> impl Iterator<Item = &KnotDiagram> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Diagram(d) => Some(d),
            _ => None,
        })
    }

    pub fn block(&self, name: &str) -> Option<&BlockData> {
        match &self.lookup_kind(name, KindTag::Block)?.kind {
            EntryKind::Block(b) => Some(b),
            _ => None,
        }
    }

    /// Table-based counting data for `name`.
    pub fn countable(&self, name: &str) -> Option<Countable> {
        [KindTag::TypeI, KindTag::TypeII, KindTag::Block]
            .into_iter()
            .find_map(|t| self.lookup_kind(name, t))
            .and_then(CensusEntry::countable)
    }
}

pub fn load_census(path: &Path) -> Result<Census, CensusError> {
    Census::load(path)
}

pub fn lookup<'a>(census: &'a Census, name: &str) -> Option<&'a CensusEntry> {
    census.lookup(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        #[derive(Deserialize)]
        struct W {
            #[serde(deserialize_with = "ordered_entries")]
            e: Vec<(String, i64)>,
        }
        let w = serde_json::from_str::<W>(r#"{"e": {"a": 1, "b": 2}}"#).unwrap();
        assert_eq!(w.e, vec![("a".to_string(), 1), ("b".to_string(), 2)]);
        let err = serde_json::from_str::<W>(r#"{"e": {"a": 1, "a": 2}}"#).err().unwrap();
        assert!(err.to_string().contains("duplicate"));
    }
}
