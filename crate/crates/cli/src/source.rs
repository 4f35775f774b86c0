//! Resolving a knot argument to something countable.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use colourings::census::{Census, KindTag};
use colourings::colmatrix::{build_colouring_matrix, ColouringMatrix};
use colourings::count::Countable;
use colourings::diagram::{parse_diagram, KnotDiagram};
use colourings::distinguish::TriangularKnot;
use colourings::reduce::{reduce_matrix, ReducedForm};
use colourings::EntryKind;
use sha2::{Digest, Sha256};

use crate::CliError;

pub enum Resolution {
    File(PathBuf),
    CensusDiagram,
    CensusTable(KindTag),
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::File(p) => write!(f, "diagram file {}", p.display()),
            Resolution::CensusDiagram => f.write_str("census diagram"),
            Resolution::CensusTable(KindTag::TypeI) => f.write_str("census table (type I)"),
            Resolution::CensusTable(KindTag::TypeII) => f.write_str("census table (type II)"),
            Resolution::CensusTable(_) => f.write_str("census table (block)"),
        }
    }
}

pub enum Data {
    Diagram(KnotDiagram),
    Table(EntryKind),
}

pub struct Knot {
    pub name: String,
    pub resolution: Resolution,
    pub data: Data,
    /// SHA-256 of the file the knot was read from.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_file(path: &Path) -> String {
    fs::read(path).map(|b| sha256_hex(&b)).unwrap_or_default()
}

fn looks_like_path(arg: &str) -> bool {
    arg.contains('/') || arg.ends_with(".knot") || Path::new(arg).is_file()
}

pub fn read_diagram_file(path: &Path) -> Result<(KnotDiagram, String), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: file not found ({e})", path.display())))?;
    let d = parse_diagram(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((d, sha256_hex(text.as_bytes())))
}

/// Explicit file, then census diagram, then census table entry.
pub fn resolve(arg: &str, census: &Census) -> Result<Knot, CliError> {
    if looks_like_path(arg) {
        let path = PathBuf::from(arg);
        let (d, digest) = read_diagram_file(&path)?;
        return Ok(Knot { name: d.name.clone(), resolution: Resolution::File(path), data: Data::Diagram(d), digest });
    }
    if let Some(d) = census.diagram(arg) {
        let digest = digest_file(&census.dir.join("diagrams").join(format!("{arg}.knot")));
        return Ok(Knot { name: arg.into(), resolution: Resolution::CensusDiagram, data: Data::Diagram(d.clone()), digest });
    }
    for (tag, file) in [(KindTag::TypeI, "typeI.json"), (KindTag::TypeII, "typeII.json"), (KindTag::Block, "blocks.json")] {
        if let Some(e) = census.lookup_kind(arg, tag) {
            return Ok(Knot {
                name: arg.into(),
                resolution: Resolution::CensusTable(tag),
                data: Data::Table(e.kind.clone()),
                digest: digest_file(&census.dir.join(file)),
            });
        }
    }
    Err(CliError::Usage(format!("{arg}: not a file and not in the census")))
}

impl Knot {
    pub fn matrix(&self) -> Option<ColouringMatrix> {
        match &self.data {
            Data::Diagram(d) => Some(build_colouring_matrix(d).expect("parsed diagrams are valid")),
            Data::Table(_) => None,
        }
    }

    pub fn reduced(&self, budget: usize) -> Option<ReducedForm> {
        self.matrix().map(|a| reduce_matrix(&a, budget))
    }

    pub fn countable(&self, budget: usize) -> Countable {
        match &self.data {
            Data::Diagram(_) => Countable::Reduced(self.reduced(budget).unwrap()),
            Data::Table(kind) => table_countable(kind),
        }
    }

    pub fn triangular(&self, budget: usize) -> Result<TriangularKnot, CliError> {
        match &self.data {
            Data::Diagram(_) => TriangularKnot::from_reduced(&self.name, &self.reduced(budget).unwrap())
                .map_err(|e| CliError::Usage(e.to_string())),
            Data::Table(EntryKind::TypeI { alex }) => Ok(TriangularKnot::type_i(&self.name, alex.clone())),
            Data::Table(EntryKind::TypeII { alpha1, beta1, alpha2 }) => {
                Ok(TriangularKnot::type_ii(&self.name, alpha1.clone(), beta1.clone(), alpha2.clone()))
            }
            Data::Table(_) => Err(CliError::Usage(format!("{} is not triangular", self.name))),
        }
    }
}

fn table_countable(kind: &EntryKind) -> Countable {
    match kind {
        EntryKind::TypeI { alex } => Countable::TypeI { alex: alex.clone() },
        EntryKind::TypeII { alpha1, beta1, alpha2 } => Countable::TypeII {
            alpha1: alpha1.clone(),
            beta1: beta1.clone(),
            alpha2: alpha2.clone(),
        },
        EntryKind::Block(b) => Countable::Block { rows: b.rows.clone() },
        EntryKind::Diagram(_) => unreachable!("diagrams resolve as diagrams"),
    }
}
