//! Finite cellular multipointed d-spaces as combinatorial globular complexes.
//!
//! A [`GlobularComplex`] is a set of states together with globular cells
//! listed in attachment order. A cell of dimension `n + 1` is a globe over an
//! `n`-disk running from its source state to its target state. Instead of a
//! continuous attaching map, each cell stores the integer incidence data that
//! the branching and merging spaces need:
//!
//! * `branch`: a signed sum of cells of dimension `dim − 1` leaving the same
//!   source. This is the boundary of the cell's `(dim − 1)`-disk in the
//!   branching space at `src`.
//! * `merge`: the same at the target, for the merging space.
//! * `flow` (optional): the chain-level attaching map of the globe's boundary,
//!   as a signed sum of composable chains of cells running from `src` to
//!   `tgt`. Projecting each chain on its first factor recovers `branch`; on
//!   its last factor, `merge`.
//!
//! Cells of dimension 1 attach along the empty sphere and carry no boundary.

mod construct;

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use construct::{globe, op, realize};

/// A signed formal sum of cells, `[(coefficient, cell id)]`.
pub type CellSum = Vec<(i64, String)>;

/// A signed formal sum of composable cell chains.
pub type ChainSum = Vec<(i64, Vec<String>)>;

/// Adds up repeated terms, dropping zero coefficients. Order of first
/// appearance is kept.
pub fn combine<K, I>(terms: I) -> Vec<(i64, K)>
where
    K: std::hash::Hash + Eq,
    I: IntoIterator<Item = (i64, K)>,
{
    let mut acc: IndexMap<K, i64> = IndexMap::new();
    for (c, k) in terms {
        *acc.entry(k).or_insert(0) += c;
    }
    acc.into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(k, c)| (c, k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobularCell {
    pub id: String,
    pub dim: usize,
    pub src: String,
    pub tgt: String,
    #[serde(default)]
    pub branch: CellSum,
    #[serde(default)]
    pub merge: CellSum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<ChainSum>,
}

impl GlobularCell {
    /// A dimension-1 cell from `src` to `tgt`.
    pub fn edge(id: impl Into<String>, src: impl Into<String>, tgt: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            dim: 1,
            src: src.into(),
            tgt: tgt.into(),
            branch: Vec::new(),
            merge: Vec::new(),
            flow: None,
        }
    }

    /// Every cell id this cell refers to, with the field it appears in.
    fn references(&self) -> impl Iterator<Item = (Field, &str)> {
        let b = self.branch.iter().map(|(_, id)| (Field::Branch, id.as_str()));
        let m = self.merge.iter().map(|(_, id)| (Field::Merge, id.as_str()));
        let f = self
            .flow
            .iter()
            .flatten()
            .flat_map(|(_, chain)| chain.iter().map(|id| (Field::Flow, id.as_str())));
        b.chain(m).chain(f)
    }
}

/// A finite globular complex. Cells are kept in attachment order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct GlobularComplex {
    states: Vec<String>,
    cells: Vec<GlobularCell>,
    index: HashMap<String, usize>,
    state_set: HashSet<String>,
}

impl PartialEq for GlobularComplex {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.cells == other.cells
    }
}

impl Eq for GlobularComplex {}

/// Which incidence field a reference or violation concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Branch,
    Merge,
    Flow,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Branch => "branch",
            Field::Merge => "merge",
            Field::Flow => "flow",
        })
    }
}

/// One problem found by [`GlobularComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GlobularViolation {
    DuplicateState {
        state: String,
    },
    DuplicateCell {
        cell: String,
    },
    UnknownState {
        cell: String,
        state: String,
    },
    ZeroDimension {
        cell: String,
    },
    /// A dimension-1 cell with boundary data.
    EdgeWithBoundary {
        cell: String,
    },
    UnknownReference {
        cell: String,
        field: Field,
        referenced: String,
    },
    /// A referenced cell does not precede the referencing one.
    AttachmentOrder {
        cell: String,
        field: Field,
        referenced: String,
    },
    WrongDegree {
        cell: String,
        field: Field,
        referenced: String,
        expected: usize,
        found: usize,
    },
    /// A branch summand leaves a different state than the cell.
    SourceMismatch {
        cell: String,
        referenced: String,
    },
    /// A merge summand reaches a different state than the cell.
    TargetMismatch {
        cell: String,
        referenced: String,
    },
    /// `∂∂ ≠ 0`: coefficient of `face` in the boundary of the boundary.
    BoundaryNotClosed {
        cell: String,
        field: Field,
        face: String,
        value: i64,
    },
    FlowPresence {
        dim: usize,
    },
    EmptyChain {
        cell: String,
        chain: usize,
    },
    ChainNotComposable {
        cell: String,
        chain: usize,
        position: usize,
    },
    ChainEndpoints {
        cell: String,
        chain: usize,
    },
    /// The first- (branch) or last-factor (merge) projection of the flow
    /// boundary disagrees with the stored incidence.
    FlowProjection {
        cell: String,
        field: Field,
        referenced: String,
        expected: i64,
        found: i64,
    },
}

impl fmt::Display for GlobularViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GlobularViolation::*;
        match self {
            DuplicateState { state } => write!(f, "duplicate state `{state}`"),
            DuplicateCell { cell } => write!(f, "duplicate cell `{cell}`"),
            UnknownState { cell, state } => {
                write!(f, "cell `{cell}` refers to unknown state `{state}`")
            }
            ZeroDimension { cell } => write!(f, "cell `{cell}` has dimension 0"),
            EdgeWithBoundary { cell } => {
                write!(f, "dimension-1 cell `{cell}` carries boundary data")
            }
            UnknownReference {
                cell,
                field,
                referenced,
            } => write!(f, "{field} of `{cell}` refers to unknown cell `{referenced}`"),
            AttachmentOrder {
                cell,
                field,
                referenced,
            } => write!(
                f,
                "{field} of `{cell}` refers to `{referenced}`, which is not attached earlier"
            ),
            WrongDegree {
                cell,
                field,
                referenced,
                expected,
                found,
            } => write!(
                f,
                "{field} of `{cell}` refers to `{referenced}` of dimension {found}, expected {expected}"
            ),
            SourceMismatch { cell, referenced } => write!(
                f,
                "branch of `{cell}` contains `{referenced}`, which has a different source"
            ),
            TargetMismatch { cell, referenced } => write!(
                f,
                "merge of `{cell}` contains `{referenced}`, which has a different target"
            ),
            BoundaryNotClosed {
                cell,
                field,
                face,
                value,
            } => write!(
                f,
                "{field} boundary of `{cell}` does not square to zero: coefficient {value} on `{face}`"
            ),
            FlowPresence { dim } => write!(
                f,
                "flow data present on some but not all cells of dimension {dim}"
            ),
            EmptyChain { cell, chain } => write!(f, "flow chain {chain} of `{cell}` is empty"),
            ChainNotComposable {
                cell,
                chain,
                position,
            } => write!(
                f,
                "flow chain {chain} of `{cell}` does not compose at position {position}"
            ),
            ChainEndpoints { cell, chain } => write!(
                f,
                "flow chain {chain} of `{cell}` does not run from its source to its target"
            ),
            FlowProjection {
                cell,
                field,
                referenced,
                expected,
                found,
            } => write!(
                f,
                "flow of `{cell}` projects to coefficient {found} on `{referenced}` but {field} has {expected}"
            ),
        }
    }
}

impl GlobularComplex {
    /// Assembles a complex without validating it.
    pub fn new(states: Vec<String>, cells: Vec<GlobularCell>) -> Self {
        let mut index = HashMap::new();
        for (pos, c) in cells.iter().enumerate() {
            index.entry(c.id.clone()).or_insert(pos);
        }
        let state_set = states.iter().cloned().collect();
        Self {
            states,
            cells,
            index,
            state_set,
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cells(&self) -> &[GlobularCell] {
        &self.cells
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<GlobularCell>) {
        (self.states, self.cells)
    }

    pub fn cell(&self, id: &str) -> Option<&GlobularCell> {
        self.index.get(id).map(|&p| &self.cells[p])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn has_state(&self, state: &str) -> bool {
        self.state_set.contains(state)
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Number of states followed by the number of cells of each dimension.
    pub fn census(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_dim() + 1];
        out[0] = self.states.len();
        for c in &self.cells {
            out[c.dim] += 1;
        }
        out
    }

    /// States with no outgoing cell.
    pub fn final_states(&self) -> Vec<&str> {
        let sources: HashSet<&str> = self.cells.iter().map(|c| c.src.as_str()).collect();
        self.states
            .iter()
            .map(String::as_str)
            .filter(|s| !sources.contains(s))
            .collect()
    }

    /// States with no incoming cell.
    pub fn initial_states(&self) -> Vec<&str> {
        let targets: HashSet<&str> = self.cells.iter().map(|c| c.tgt.as_str()).collect();
        self.states
            .iter()
            .map(String::as_str)
            .filter(|s| !targets.contains(s))
            .collect()
    }

    /// True when every cell of dimension ≥ 2 carries flow data.
    pub fn has_flow(&self) -> bool {
        self.cells.iter().all(|c| c.dim < 2 || c.flow.is_some())
    }

    /// Every invariant violation. An empty report means the complex is valid.
    pub fn validate(&self) -> Vec<GlobularViolation> {
        use GlobularViolation::*;
        let mut report = Vec::new();

        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                report.push(DuplicateState { state: s.clone() });
            }
        }
        let mut seen = HashSet::new();
        for c in &self.cells {
            if !seen.insert(&c.id) {
                report.push(DuplicateCell { cell: c.id.clone() });
            }
        }

        let mut flow_dims: IndexMap<usize, (usize, usize)> = IndexMap::new();
        for (pos, c) in self.cells.iter().enumerate() {
            for s in [&c.src, &c.tgt] {
                if !self.has_state(s) {
                    report.push(UnknownState {
                        cell: c.id.clone(),
                        state: s.clone(),
                    });
                }
            }
            if c.dim == 0 {
                report.push(ZeroDimension { cell: c.id.clone() });
                continue;
            }
            if c.dim == 1 {
                let flow_empty = c.flow.as_ref().map_or(true, Vec::is_empty);
                if !c.branch.is_empty() || !c.merge.is_empty() || !flow_empty {
                    report.push(EdgeWithBoundary { cell: c.id.clone() });
                }
                continue;
            }
            let entry = flow_dims.entry(c.dim).or_insert((0, 0));
            if c.flow.is_some() {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }

            let mut refs_ok = true;
            for (field, r) in c.references() {
                match self.index.get(r) {
                    None => {
                        report.push(UnknownReference {
                            cell: c.id.clone(),
                            field,
                            referenced: r.to_string(),
                        });
                        refs_ok = false;
                    }
                    Some(&p) if p >= pos => {
                        report.push(AttachmentOrder {
                            cell: c.id.clone(),
                            field,
                            referenced: r.to_string(),
                        });
                        refs_ok = false;
                    }
                    Some(_) => {}
                }
            }
            if !refs_ok {
                continue;
            }

            for (field, sum) in [(Field::Branch, &c.branch), (Field::Merge, &c.merge)] {
                for (_, r) in sum {
                    let other = self.cell(r).expect("checked above");
                    if other.dim != c.dim - 1 {
                        report.push(WrongDegree {
                            cell: c.id.clone(),
                            field,
                            referenced: r.clone(),
                            expected: c.dim - 1,
                            found: other.dim,
                        });
                    } else if field == Field::Branch && other.src != c.src {
                        report.push(SourceMismatch {
                            cell: c.id.clone(),
                            referenced: r.clone(),
                        });
                    } else if field == Field::Merge && other.tgt != c.tgt {
                        report.push(TargetMismatch {
                            cell: c.id.clone(),
                            referenced: r.clone(),
                        });
                    }
                }
                let squared = combine(sum.iter().flat_map(|(k, r)| {
                    let other = self.cell(r).expect("checked above");
                    let inner = if field == Field::Branch {
                        &other.branch
                    } else {
                        &other.merge
                    };
                    inner.iter().map(move |(j, f)| (k * j, f.as_str()))
                }));
                for (value, face) in squared {
                    report.push(BoundaryNotClosed {
                        cell: c.id.clone(),
                        field,
                        face: face.to_string(),
                        value,
                    });
                }
            }

            if let Some(flow) = &c.flow {
                self.check_flow(c, flow, &mut report);
            }
        }
        for (dim, (with, without)) in flow_dims {
            if with > 0 && without > 0 {
                report.push(FlowPresence { dim });
            }
        }
        report
    }

    fn check_flow(&self, c: &GlobularCell, flow: &ChainSum, report: &mut Vec<GlobularViolation>) {
        use GlobularViolation::*;
        let mut chains_ok = true;
        for (k, (_, chain)) in flow.iter().enumerate() {
            let (Some(first), Some(last)) = (chain.first(), chain.last()) else {
                report.push(EmptyChain {
                    cell: c.id.clone(),
                    chain: k,
                });
                chains_ok = false;
                continue;
            };
            for (p, pair) in chain.windows(2).enumerate() {
                let (a, b) = (self.cell(&pair[0]).unwrap(), self.cell(&pair[1]).unwrap());
                if a.tgt != b.src {
                    report.push(ChainNotComposable {
                        cell: c.id.clone(),
                        chain: k,
                        position: p + 1,
                    });
                    chains_ok = false;
                }
            }
            if self.cell(first).unwrap().src != c.src || self.cell(last).unwrap().tgt != c.tgt {
                report.push(ChainEndpoints {
                    cell: c.id.clone(),
                    chain: k,
                });
                chains_ok = false;
            }
        }
        if !chains_ok {
            return;
        }
        for (field, stored) in [(Field::Branch, &c.branch), (Field::Merge, &c.merge)] {
            let projected = self.project_flow(c, field);
            let stored = combine(stored.iter().map(|(k, r)| (*k, r.as_str())));
            let mut keys: IndexMap<&str, (i64, i64)> = IndexMap::new();
            for (k, r) in &stored {
                keys.entry(r).or_default().0 = *k;
            }
            for (k, r) in &projected {
                keys.entry(r).or_default().1 = *k;
            }
            for (r, (expected, found)) in keys {
                if expected != found {
                    report.push(FlowProjection {
                        cell: c.id.clone(),
                        field,
                        referenced: r.to_string(),
                        expected,
                        found,
                    });
                }
            }
        }
    }

    /// First- (`Branch`) or last-factor (`Merge`) projection of a cell's flow
    /// boundary, keeping only factors of dimension `dim − 1`.
    pub(crate) fn project_flow<'a>(&'a self, c: &'a GlobularCell, field: Field) -> Vec<(i64, &'a str)> {
        let Some(flow) = &c.flow else {
            return Vec::new();
        };
        combine(flow.iter().filter_map(|(k, chain)| {
            let factor = match field {
                Field::Merge => chain.last(),
                _ => chain.first(),
            }?;
            let d = self.cell(factor)?.dim;
            (d + 1 == c.dim).then_some((*k, factor.as_str()))
        }))
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidComplex(v.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("globular complexes always serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    states: Vec<String>,
    cells: Vec<GlobularCell>,
}

impl TryFrom<ComplexRepr> for GlobularComplex {
    type Error = Error;

    fn try_from(repr: ComplexRepr) -> Result<Self> {
        match repr.format.as_deref() {
            None | Some("globular") => Ok(GlobularComplex::new(repr.states, repr.cells)),
            Some(other) => Err(Error::Malformed(format!(
                "format `{other}` is not `globular`"
            ))),
        }
    }
}

impl From<GlobularComplex> for ComplexRepr {
    fn from(x: GlobularComplex) -> Self {
        ComplexRepr {
            format: Some("globular".into()),
            states: x.states,
            cells: x.cells,
        }
    }
}
