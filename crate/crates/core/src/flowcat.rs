//! The flow side: categorization of a globular complex and the branching
//! space of the resulting flow.
//!
//! `cat(X)` keeps the cell structure: a globular cell of dimension `n + 1`
//! becomes a flow cell of dimension `n`, a `Glob(Dⁿ)` attached along the
//! composable chains of its flow boundary. The branching space `ℙ⁻_α` of a
//! flow is the quotient of the path spaces out of `α` by `u * v = u`. On a
//! cellular flow that identification retracts every composite onto its first
//! factor, so the chain-level boundary of a cell in `ℙ⁻_α` is the first-factor
//! collapse of its attaching chains, where chains whose first factor lies in a
//! lower skeleton contribute nothing.
//!
//! This path never reads the `branch` incidence of a cell, which makes
//! [`oracle_check`] an independent comparison against
//! [`branching_space`](crate::branching::branching_space).

use std::collections::HashMap;

use serde::Serialize;

use crate::branching::branching_space;
use crate::error::{Error, Result};
use crate::globular::{ChainSum, GlobularComplex};
use crate::homology::ChainComplex;
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowCell {
    pub id: String,
    /// Dimension of the disk `Dⁿ` the cell is a globe over.
    pub dim: usize,
    pub src: String,
    pub tgt: String,
    /// Attachment of `Glob(S^{n−1})` as composable chains of flow cells.
    pub attachment: ChainSum,
}

/// A cellular flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowPresentation {
    pub states: Vec<String>,
    pub cells: Vec<FlowCell>,
}

impl FlowPresentation {
    /// Chains that do not compose or do not span their cell, as
    /// `(cell, chain index)`.
    pub fn broken_chains(&self) -> Vec<(String, usize)> {
        let by_id: HashMap<&str, &FlowCell> = self.cells.iter().map(|c| (c.id.as_str(), c)).collect();
        let mut out = Vec::new();
        for c in &self.cells {
            for (k, (_, chain)) in c.attachment.iter().enumerate() {
                let cells: Option<Vec<&&FlowCell>> = chain.iter().map(|id| by_id.get(id.as_str())).collect();
                let ok = cells.is_some_and(|cells| {
                    !cells.is_empty()
                        && cells[0].src == c.src
                        && cells[cells.len() - 1].tgt == c.tgt
                        && cells.windows(2).all(|w| w[0].tgt == w[1].src)
                });
                if !ok {
                    out.push((c.id.clone(), k));
                }
            }
        }
        out
    }
}

/// The categorization `cat(X)`.
///
/// Needs flow data on every cell of dimension ≥ 2.
pub fn cat(x: &GlobularComplex) -> Result<FlowPresentation> {
    let mut cells = Vec::with_capacity(x.cells().len());
    for c in x.cells() {
        let attachment = match (&c.flow, c.dim) {
            (Some(flow), _) => flow.clone(),
            (None, 1) => Vec::new(),
            (None, _) => {
                return Err(Error::Unsupported(format!(
                    "cell `{}` of dimension {} has no flow boundary",
                    c.id, c.dim
                )))
            }
        };
        cells.push(FlowCell {
            id: c.id.clone(),
            dim: c.dim.checked_sub(1).ok_or_else(|| {
                Error::InvalidComplex(format!("cell `{}` has dimension 0", c.id))
            })?,
            src: c.src.clone(),
            tgt: c.tgt.clone(),
            attachment,
        });
    }
    Ok(FlowPresentation {
        states: x.states().to_vec(),
        cells,
    })
}

/// Cellular chains of `ℙ⁻_α` with the cells of each degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowChains {
    pub state: String,
    pub cells: Vec<Vec<String>>,
    pub complex: ChainComplex,
}

/// Cellular chains of the branching space `ℙ⁻_α` of a cellular flow.
///
/// Degree-`k` generators are the flow cells of dimension `k` leaving `α`.
/// Each attaching chain `(c₁, …, c_m)` collapses to `c₁` and contributes its
/// coefficient to `∂ c` when `c₁` has dimension `k − 1`.
pub fn flow_branching_chain(f: &FlowPresentation, state: &str) -> Result<FlowChains> {
    if !f.states.iter().any(|s| s == state) {
        return Err(Error::UnknownState(state.to_string()));
    }
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut members = Vec::new();
    for c in f.cells.iter().filter(|c| c.src == state) {
        if cells.len() <= c.dim {
            cells.resize(c.dim + 1, Vec::new());
        }
        cells[c.dim].push(c.id.clone());
        members.push(c);
    }
    let dims: HashMap<&str, usize> = f.cells.iter().map(|c| (c.id.as_str(), c.dim)).collect();
    let rows: Vec<HashMap<&str, usize>> = cells
        .iter()
        .map(|ids| ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect())
        .collect();
    let mut boundaries: Vec<IntMatrix> = (1..cells.len())
        .map(|k| IntMatrix::zeros(cells[k - 1].len(), cells[k].len()))
        .collect();
    let mut next_col = vec![0usize; cells.len()];
    for c in members {
        let j = next_col[c.dim];
        next_col[c.dim] += 1;
        if c.dim == 0 {
            continue;
        }
        for (coef, chain) in &c.attachment {
            let Some(head) = chain.first() else { continue };
            if dims.get(head.as_str()).copied() != Some(c.dim - 1) {
                continue;
            }
            let i = *rows[c.dim - 1].get(head.as_str()).ok_or_else(|| {
                Error::InvalidComplex(format!(
                    "attaching chain of `{}` starts with `{head}`, which does not leave `{state}`",
                    c.id
                ))
            })?;
            boundaries[c.dim - 1][(i, j)] += coef;
        }
    }
    let ranks = cells.iter().map(Vec::len).collect();
    Ok(FlowChains {
        state: state.to_string(),
        cells,
        complex: ChainComplex::new(ranks, boundaries)?,
    })
}

/// One disagreement between the germ path and the flow path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleMismatch {
    Cells {
        state: String,
        degree: usize,
        germ: Vec<String>,
        flow: Vec<String>,
    },
    Entry {
        state: String,
        degree: usize,
        row: usize,
        col: usize,
        germ: i64,
        flow: i64,
    },
}

impl std::fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleMismatch::Cells { state, degree, germ, flow } => write!(
                f,
                "state `{state}`, degree {degree}: germ cells {germ:?} but flow cells {flow:?}"
            ),
            OracleMismatch::Entry { state, degree, row, col, germ, flow } => write!(
                f,
                "state `{state}`, ∂_{degree}[{row}, {col}]: germ {germ}, flow {flow}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub states_checked: usize,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `𝒢⁻_α(X)` with `ℙ⁻_α cat(X)` at every state, cell lists and
/// boundary matrices entrywise.
pub fn oracle_check(x: &GlobularComplex) -> Result<OracleReport> {
    let flow = cat(x)?;
    let mut mismatches = Vec::new();
    for state in x.states() {
        let germ = branching_space(x, state)?;
        let chains = flow_branching_chain(&flow, state)?;
        let degrees = germ.cells.len().max(chains.cells.len());
        let empty = Vec::new();
        let mut shapes_agree = true;
        for k in 0..degrees {
            let g = germ.cells.get(k).unwrap_or(&empty);
            let f = chains.cells.get(k).unwrap_or(&empty);
            if g != f {
                shapes_agree = false;
                mismatches.push(OracleMismatch::Cells {
                    state: state.clone(),
                    degree: k,
                    germ: g.clone(),
                    flow: f.clone(),
                });
            }
        }
        if !shapes_agree {
            continue;
        }
        for k in 1..degrees {
            let g = &germ.boundary[k - 1];
            let f = chains.complex.boundary(k).expect("same shape");
            for i in 0..g.rows() {
                for j in 0..g.cols() {
                    if g[(i, j)] != f[(i, j)] {
                        mismatches.push(OracleMismatch::Entry {
                            state: state.clone(),
                            degree: k,
                            row: i,
                            col: j,
                            germ: g[(i, j)],
                            flow: f[(i, j)],
                        });
                    }
                }
            }
        }
    }
    Ok(OracleReport {
        states_checked: x.states().len(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::globular::{globe, realize, GlobularCell};
    use crate::precubical::{gen_cube, gen_example, CATALOG};

    #[test]
    fn cat_of_globe1() {
        let f = cat(&globe(1)).unwrap();
        let dims: Vec<usize> = f.cells.iter().map(|c| c.dim).collect();
        assert_eq!(dims, vec![0, 0, 1]);
        let chains = flow_branching_chain(&f, "0").unwrap();
        assert_eq!(chains.complex.ranks(), &[2, 1]);
        assert_eq!(chains.complex.boundary(1).unwrap().to_rows(), vec![vec![1], vec![-1]]);
        assert!(f.broken_chains().is_empty());
    }

    #[test]
    fn two_step_path() {
        let x = realize(&gen_example("two_step_path").unwrap()).unwrap();
        let f = cat(&x).unwrap();
        assert_eq!(f.cells.len(), 2);
        assert_eq!(f.cells[0].tgt, f.cells[1].src);
        let chains = flow_branching_chain(&f, "u").unwrap();
        assert_eq!(chains.cells, vec![vec!["e1".to_string()]]);
        assert!(flow_branching_chain(&f, "w").unwrap().cells.is_empty());
    }

    #[test]
    fn composite_collapses_onto_its_first_factor() {
        // a 2-cell attached along (e1·e2) − (f): the composite counts as e1
        let mut t = GlobularCell {
            id: "t".into(),
            dim: 2,
            src: "u".into(),
            tgt: "w".into(),
            branch: vec![(1, "e1".into()), (-1, "f".into())],
            merge: vec![(1, "e2".into()), (-1, "f".into())],
            flow: Some(vec![(1, vec!["e1".into(), "e2".into()]), (-1, vec!["f".into()])]),
        };
        let x = GlobularComplex::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                GlobularCell::edge("e1", "u", "v"),
                GlobularCell::edge("e2", "v", "w"),
                GlobularCell::edge("f", "u", "w"),
                t.clone(),
            ],
        );
        assert!(x.is_valid());
        let chains = flow_branching_chain(&cat(&x).unwrap(), "u").unwrap();
        assert_eq!(chains.complex.boundary(1).unwrap().to_rows(), vec![vec![1], vec![-1]]);
        assert!(oracle_check(&x).unwrap().passed());

        t.flow = None;
        let (states, mut cells) = x.into_parts();
        cells[3] = t;
        let err = cat(&GlobularComplex::new(states, cells)).unwrap_err();
        assert!(err.to_string().contains("`t`"));
    }

    #[test]
    fn oracle_passes_on_catalog_globes_and_cubes() {
        for name in CATALOG {
            let x = realize(&gen_example(name).unwrap()).unwrap();
            assert!(oracle_check(&x).unwrap().passed(), "{name}");
        }
        for n in 0..=3 {
            assert!(oracle_check(&globe(n)).unwrap().passed(), "globe {n}");
        }
        assert!(oracle_check(&realize(&gen_cube(4)).unwrap()).unwrap().passed());
    }

    #[test]
    fn corrupted_branch_incidence_is_located() {
        let x = realize(&gen_example("filled_square").unwrap()).unwrap();
        let (states, mut cells) = x.into_parts();
        let s = cells.iter_mut().find(|c| c.id == "s").unwrap();
        s.branch = vec![(1, "a".into()), (1, "c".into())];
        let report = oracle_check(&GlobularComplex::new(states, cells)).unwrap();
        assert_eq!(
            report.mismatches,
            vec![OracleMismatch::Entry {
                state: "v00".into(),
                degree: 1,
                row: 1,
                col: 0,
                germ: 1,
                flow: -1
            }]
        );
    }
}
