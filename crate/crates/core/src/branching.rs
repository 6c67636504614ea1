//! Branching and merging spaces of a globular complex.
//!
//! Every short directed path leaving a state `α` starts inside exactly one
//! globular cell with source `α`, so the branching space `𝒢⁻_α(X)` is a CW
//! complex with one `(n − 1)`-cell for each `n`-dimensional cell leaving `α`.
//! Attaching cells one at a time in attachment order adds one disk at a time,
//! glued along the `branch` incidence of the cell. The merging space
//! `𝒢⁺_α(X)` is the branching space of the time-reversed complex.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::globular::GlobularComplex;
use crate::homology::ChainComplex;
use crate::matrix::IntMatrix;
use crate::unionfind::UnionFind;

/// Branching (`𝒢⁻`) or merging (`𝒢⁺`) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Branching,
    Merging,
}

/// A finite CW complex given by its cells and integer boundary matrices.
///
/// `cells[k]` lists the degree-`k` cells by the id of the globular cell they
/// come from. `boundary[k - 1]` is `∂_k`, with one row per degree-`(k-1)`
/// cell and one column per degree-`k` cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CWComplexData {
    pub state: String,
    pub cells: Vec<Vec<String>>,
    pub boundary: Vec<IntMatrix>,
}

impl CWComplexData {
    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    /// Number of cells in each degree.
    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn chain_complex(&self) -> ChainComplex {
        ChainComplex::new(self.f_vector(), self.boundary.clone())
            .expect("branching spaces have consistent shapes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("CW data always serializes")
    }

    /// The 1-skeleton as a DOT graph: 0-cells are nodes, 1-cells edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "graph {} {{", quote(&self.state)).unwrap();
        self.write_dot_body(&mut out, "  ");
        out.push_str("}\n");
        out
    }

    fn write_dot_body(&self, out: &mut String, indent: &str) {
        let empty = Vec::new();
        let vertices = self.cells.first().unwrap_or(&empty);
        for v in vertices {
            writeln!(out, "{indent}{} [label={}];", quote(v), quote(v)).unwrap();
        }
        if let (Some(edges), Some(d1)) = (self.cells.get(1), self.boundary.first()) {
            for (j, e) in edges.iter().enumerate() {
                let ends: Vec<&String> = d1
                    .column(j)
                    .enumerate()
                    .filter(|&(_, x)| x != 0)
                    .map(|(i, _)| &vertices[i])
                    .collect();
                let (a, b) = match ends.as_slice() {
                    [a, b] => (*a, *b),
                    [a] => (*a, *a),
                    _ => continue,
                };
                writeln!(out, "{indent}{} -- {} [label={}];", quote(a), quote(b), quote(e)).unwrap();
            }
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Branching => "branching",
        Side::Merging => "merging",
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One DOT graph holding the 1-skeleta of several spaces as clusters.
pub fn dot_export(spaces: &[CWComplexData], side: Side) -> String {
    let mut out = String::from("graph germs {\n");
    for (i, c) in spaces.iter().enumerate() {
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        writeln!(out, "    label={};", quote(&format!("{} at {}", side_name(side), c.state))).unwrap();
        c.write_dot_body(&mut out, "    ");
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// The branching space `𝒢⁻_α(X)`.
///
/// Degree-`k` cells are the globular cells of dimension `k + 1` with source
/// `α`, in attachment order; `∂_k` is read off their `branch` incidence. A
/// state with no outgoing cell gives the empty complex.
pub fn branching_space(x: &GlobularComplex, state: &str) -> Result<CWComplexData> {
    space(x, state, Side::Branching)
}

/// The merging space `𝒢⁺_α(X)`, equal to the branching space of `op(X)`.
pub fn merging_space(x: &GlobularComplex, state: &str) -> Result<CWComplexData> {
    space(x, state, Side::Merging)
}

pub fn space(x: &GlobularComplex, state: &str, side: Side) -> Result<CWComplexData> {
    if !x.has_state(state) {
        return Err(Error::UnknownState(state.to_string()));
    }
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut members = Vec::new();
    for c in x.cells() {
        let base = match side {
            Side::Branching => &c.src,
            Side::Merging => &c.tgt,
        };
        if base != state || c.dim == 0 {
            continue;
        }
        let degree = c.dim - 1;
        if cells.len() <= degree {
            cells.resize(degree + 1, Vec::new());
        }
        cells[degree].push(c.id.clone());
        members.push(c);
    }

    let row_of: Vec<std::collections::HashMap<&str, usize>> = cells
        .iter()
        .map(|ids| ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect())
        .collect();
    let mut boundary: Vec<IntMatrix> = (1..cells.len())
        .map(|k| IntMatrix::zeros(cells[k - 1].len(), cells[k].len()))
        .collect();
    let mut col = vec![0usize; cells.len()];
    for c in members {
        let degree = c.dim - 1;
        let j = col[degree];
        col[degree] += 1;
        if degree == 0 {
            continue;
        }
        let sum = match side {
            Side::Branching => &c.branch,
            Side::Merging => &c.merge,
        };
        for (coef, r) in sum {
            let i = *row_of[degree - 1].get(r.as_str()).ok_or_else(|| {
                Error::InvalidComplex(format!(
                    "boundary of `{}` refers to `{r}`, which is not a degree-{} cell at `{state}`",
                    c.id,
                    degree - 1
                ))
            })?;
            boundary[degree - 1][(i, j)] += coef;
        }
    }
    Ok(CWComplexData {
        state: state.to_string(),
        cells,
        boundary,
    })
}

/// Path components of a CW complex and their augmentation to its state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentMap {
    pub state: String,
    /// Component label of each 0-cell, numbered by first appearance.
    pub component: Vec<usize>,
    pub count: usize,
}

impl ComponentMap {
    /// `ε`: every component maps to the state the space lives over.
    pub fn augment(&self, component: usize) -> Option<&str> {
        (component < self.count).then_some(self.state.as_str())
    }

    /// Rank of `ker ε` on `Z[π₀]`.
    pub fn reduced_rank(&self) -> usize {
        self.count.saturating_sub(1)
    }
}

/// π₀ of a CW complex, from its 1-skeleton.
///
/// Every 1-cell joins the 0-cells carrying a nonzero coefficient in its
/// boundary column. Higher cells attach along connected spheres and never
/// merge components.
pub fn pi0(c: &CWComplexData) -> ComponentMap {
    let n = c.cells.first().map_or(0, Vec::len);
    let mut uf = UnionFind::new(n);
    if let Some(d1) = c.boundary.first() {
        for j in 0..d1.cols() {
            let mut ends = d1.column(j).enumerate().filter(|&(_, x)| x != 0).map(|(i, _)| i);
            if let Some(first) = ends.next() {
                for other in ends {
                    uf.union(first, other);
                }
            }
        }
    }
    ComponentMap {
        state: c.state.clone(),
        count: uf.sets(),
        component: uf.labels(),
    }
}
