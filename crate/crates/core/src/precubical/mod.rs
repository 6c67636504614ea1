//! Precubical sets: graded cubes with front (`d⁰`) and back (`d¹`) face maps.
//!
//! Faces are indexed `1..=n` for an `n`-cube. The identities checked by
//! [`PrecubicalSet::validate`] are, for `α, β ∈ {0, 1}` and `1 ≤ i < j ≤ n`,
//!
//! ```text
//! dᵅᵢ dᵝⱼ c = dᵝⱼ₋₁ dᵅᵢ c
//! ```
//!
//! Cube identifiers are opaque strings. Within a dimension, cubes keep the
//! order in which they were given; that order fixes matrix columns downstream.

mod catalog;
pub mod random;

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::{gen_cube, gen_example, CATALOG};

/// The two face lists of a cube of dimension `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeFaces {
    #[serde(rename = "d0")]
    pub front: Vec<String>,
    #[serde(rename = "d1")]
    pub back: Vec<String>,
}

impl CubeFaces {
    pub fn side(&self, alpha: u8) -> &[String] {
        if alpha == 0 {
            &self.front
        } else {
            &self.back
        }
    }
}

/// A finite precubical set.
///
/// The value may be structurally invalid (dangling faces, broken
/// identities); [`validate`](Self::validate) reports such problems and every
/// construction that needs a genuine precubical set checks it first.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PrecubicalRepr", into = "PrecubicalRepr")]
pub struct PrecubicalSet {
    cubes: Vec<Vec<String>>,
    faces: IndexMap<String, CubeFaces>,
    index: HashMap<String, (usize, usize)>,
}

impl PartialEq for PrecubicalSet {
    fn eq(&self, other: &Self) -> bool {
        self.cubes == other.cubes && self.faces == other.faces
    }
}

impl Eq for PrecubicalSet {}

/// One problem found by [`PrecubicalSet::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecubicalViolation {
    DuplicateId {
        id: String,
    },
    MissingFaces {
        cube: String,
    },
    UnexpectedFaces {
        id: String,
    },
    WrongFaceCount {
        cube: String,
        dim: usize,
        front: usize,
        back: usize,
    },
    DanglingFace {
        cube: String,
        alpha: u8,
        index: usize,
        face: String,
    },
    WrongFaceDimension {
        cube: String,
        alpha: u8,
        index: usize,
        face: String,
        expected: usize,
        found: usize,
    },
    /// `dᵅᵢ dᵝⱼ c ≠ dᵝⱼ₋₁ dᵅᵢ c`.
    Identity {
        cube: String,
        alpha: u8,
        i: usize,
        beta: u8,
        j: usize,
    },
}

impl fmt::Display for PrecubicalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PrecubicalViolation::*;
        match self {
            DuplicateId { id } => write!(f, "duplicate cube id `{id}`"),
            MissingFaces { cube } => write!(f, "cube `{cube}` has no face entry"),
            UnexpectedFaces { id } => {
                write!(f, "face entry `{id}` does not belong to a cube of dimension ≥ 1")
            }
            WrongFaceCount {
                cube,
                dim,
                front,
                back,
            } => write!(
                f,
                "cube `{cube}` of dimension {dim} has {front} front and {back} back faces"
            ),
            DanglingFace {
                cube,
                alpha,
                index,
                face,
            } => write!(f, "d{alpha}_{index}(`{cube}`) = `{face}` does not exist"),
            WrongFaceDimension {
                cube,
                alpha,
                index,
                face,
                expected,
                found,
            } => write!(
                f,
                "d{alpha}_{index}(`{cube}`) = `{face}` has dimension {found}, expected {expected}"
            ),
            Identity {
                cube,
                alpha,
                i,
                beta,
                j,
            } => write!(
                f,
                "identity fails at `{cube}`: d{alpha}_{i} d{beta}_{j} ≠ d{beta}_{} d{alpha}_{i} (cube, α, i, β, j) = ({cube}, {alpha}, {i}, {beta}, {j})",
                j - 1
            ),
        }
    }
}

impl PrecubicalSet {
    /// Assembles a precubical set from cubes per dimension and face entries.
    ///
    /// No validation happens here. Trailing empty dimensions are dropped.
    pub fn new(mut cubes: Vec<Vec<String>>, faces: IndexMap<String, CubeFaces>) -> Self {
        while cubes.last().is_some_and(|c| c.is_empty()) {
            cubes.pop();
        }
        let mut index = HashMap::new();
        for (dim, ids) in cubes.iter().enumerate() {
            for (pos, id) in ids.iter().enumerate() {
                index.entry(id.clone()).or_insert((dim, pos));
            }
        }
        Self {
            cubes,
            faces,
            index,
        }
    }

    pub fn builder() -> PrecubicalBuilder {
        PrecubicalBuilder::default()
    }

    /// Highest dimension with at least one cube, or `None` when empty.
    pub fn max_dim(&self) -> Option<usize> {
        self.cubes.len().checked_sub(1)
    }

    /// Cubes of dimension `dim`, in file order.
    pub fn cubes(&self, dim: usize) -> &[String] {
        self.cubes.get(dim).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn all_cubes(&self) -> impl Iterator<Item = (usize, &str)> {
        self.cubes
            .iter()
            .enumerate()
            .flat_map(|(d, ids)| ids.iter().map(move |id| (d, id.as_str())))
    }

    /// Number of cubes per dimension, `0..=max_dim`.
    pub fn census(&self) -> Vec<usize> {
        self.cubes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.cubes.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).map(|&(d, _)| d)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn faces_of(&self, id: &str) -> Option<&CubeFaces> {
        self.faces.get(id)
    }

    pub fn face_entries(&self) -> &IndexMap<String, CubeFaces> {
        &self.faces
    }

    /// `dᵅᵢ c` with `i` counted from 1.
    pub fn face(&self, cube: &str, alpha: u8, i: usize) -> Option<&str> {
        let faces = self.faces.get(cube)?;
        faces.side(alpha).get(i.checked_sub(1)?).map(String::as_str)
    }

    /// Applies `d^{αₖ}_{iₖ}` for the pairs in order, innermost first.
    pub fn iterated_face(&self, cube: &str, steps: &[(u8, usize)]) -> Option<&str> {
        let mut cur = self.index.get_key_value(cube)?.0.as_str();
        for &(alpha, i) in steps {
            cur = self.face(cur, alpha, i)?;
        }
        Some(cur)
    }

    /// The vertex reached by taking `d^α₁` until dimension 0.
    pub fn corner(&self, cube: &str, alpha: u8) -> Option<&str> {
        let dim = self.dim_of(cube)?;
        let steps = vec![(alpha, 1); dim];
        self.iterated_face(cube, &steps)
    }

    /// Every violated structural rule or precubical identity.
    ///
    /// An empty report means the value is a precubical set.
    pub fn validate(&self) -> Vec<PrecubicalViolation> {
        use PrecubicalViolation::*;
        let mut report = Vec::new();

        let mut seen = HashMap::new();
        for (_, id) in self.all_cubes() {
            if seen.insert(id, ()).is_some() {
                report.push(DuplicateId { id: id.to_string() });
            }
        }
        for id in self.faces.keys() {
            if !self.dim_of(id).is_some_and(|d| d >= 1) {
                report.push(UnexpectedFaces { id: id.clone() });
            }
        }

        let mut well_formed = true;
        for (dim, cube) in self.all_cubes().filter(|&(d, _)| d >= 1) {
            let Some(faces) = self.faces.get(cube) else {
                report.push(MissingFaces {
                    cube: cube.to_string(),
                });
                well_formed = false;
                continue;
            };
            if faces.front.len() != dim || faces.back.len() != dim {
                report.push(WrongFaceCount {
                    cube: cube.to_string(),
                    dim,
                    front: faces.front.len(),
                    back: faces.back.len(),
                });
                well_formed = false;
                continue;
            }
            for alpha in 0..=1u8 {
                for (k, face) in faces.side(alpha).iter().enumerate() {
                    match self.dim_of(face) {
                        None => {
                            report.push(DanglingFace {
                                cube: cube.to_string(),
                                alpha,
                                index: k + 1,
                                face: face.clone(),
                            });
                            well_formed = false;
                        }
                        Some(found) if found != dim - 1 => {
                            report.push(WrongFaceDimension {
                                cube: cube.to_string(),
                                alpha,
                                index: k + 1,
                                face: face.clone(),
                                expected: dim - 1,
                                found,
                            });
                            well_formed = false;
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        if !well_formed {
            return report;
        }

        for (dim, cube) in self.all_cubes().filter(|&(d, _)| d >= 2) {
            for j in 2..=dim {
                for i in 1..j {
                    for alpha in 0..=1u8 {
                        for beta in 0..=1u8 {
                            let lhs = self.iterated_face(cube, &[(beta, j), (alpha, i)]);
                            let rhs = self.iterated_face(cube, &[(alpha, i), (beta, j - 1)]);
                            if lhs != rhs {
                                report.push(Identity {
                                    cube: cube.to_string(),
                                    alpha,
                                    i,
                                    beta,
                                    j,
                                });
                            }
                        }
                    }
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Fails with the first violation when the set is not valid.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidPrecubical(v.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("precubical sets always serialize")
    }
}

/// Incremental construction of a [`PrecubicalSet`] in file order.
#[derive(Debug, Default, Clone)]
pub struct PrecubicalBuilder {
    cubes: Vec<Vec<String>>,
    faces: IndexMap<String, CubeFaces>,
}

impl PrecubicalBuilder {
    pub fn vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.push(0, id.into());
        self
    }

    /// Adds a cube whose dimension is the number of front faces.
    pub fn cube<S: Into<String>>(
        &mut self,
        id: impl Into<String>,
        front: impl IntoIterator<Item = S>,
        back: impl IntoIterator<Item = S>,
    ) -> &mut Self {
        let id = id.into();
        let front: Vec<String> = front.into_iter().map(Into::into).collect();
        let back: Vec<String> = back.into_iter().map(Into::into).collect();
        self.push(front.len(), id.clone());
        self.faces.insert(id, CubeFaces { front, back });
        self
    }

    /// Adds a 1-cube from `src` to `tgt`.
    pub fn edge(
        &mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) -> &mut Self {
        self.cube(id, [src.into()], [tgt.into()])
    }

    pub fn len(&self) -> usize {
        self.cubes.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&mut self, dim: usize, id: String) {
        if self.cubes.len() <= dim {
            self.cubes.resize(dim + 1, Vec::new());
        }
        self.cubes[dim].push(id);
    }

    pub fn build(&self) -> PrecubicalSet {
        PrecubicalSet::new(self.cubes.clone(), self.faces.clone())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrecubicalRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    cubes: IndexMap<String, Vec<String>>,
    #[serde(default)]
    faces: IndexMap<String, CubeFaces>,
}

impl TryFrom<PrecubicalRepr> for PrecubicalSet {
    type Error = Error;

    fn try_from(repr: PrecubicalRepr) -> Result<Self> {
        if let Some(fmt) = repr.format.as_deref() {
            if fmt != "precubical" {
                return Err(Error::Malformed(format!(
                    "format `{fmt}` is not `precubical`"
                )));
            }
        }
        let mut cubes: Vec<Vec<String>> = Vec::new();
        for (key, ids) in repr.cubes {
            let dim: usize = key
                .parse()
                .map_err(|_| Error::Malformed(format!("dimension key `{key}` is not an integer")))?;
            if cubes.len() <= dim {
                cubes.resize(dim + 1, Vec::new());
            }
            cubes[dim].extend(ids);
        }
        Ok(PrecubicalSet::new(cubes, repr.faces))
    }
}

impl From<PrecubicalSet> for PrecubicalRepr {
    fn from(k: PrecubicalSet) -> Self {
        let cubes = k
            .cubes
            .iter()
            .enumerate()
            .map(|(d, ids)| (d.to_string(), ids.clone()))
            .collect();
        // faces follow cube order; stray entries keep their place at the end
        let mut faces = IndexMap::new();
        for (_, id) in k.all_cubes() {
            if let Some(f) = k.faces.get(id) {
                faces.insert(id.to_string(), f.clone());
            }
        }
        for (id, f) in &k.faces {
            faces.entry(id.clone()).or_insert_with(|| f.clone());
        }
        PrecubicalRepr {
            format: Some("precubical".into()),
            cubes,
            faces,
        }
    }
}
