//! Elementary globular subdivisions and the invariance harness.
//!
//! Three operators are provided:
//!
//! * [`subdivide_edge`] cuts a 1-cell into a chain of `k + 1` edges;
//! * [`subdivide_lens`] adds one interior state to a 2-cell, splitting it in
//!   two along a fresh two-edge path;
//! * [`subdivide_precubical`] refines every cube of a precubical set into a
//!   grid of sub-cubes.
//!
//! [`check_invariance`] applies a sequence of them and compares branching and
//! merging homology, and the component count of every branching and merging
//! space at the original states, before and after.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::branching::{pi0, space, Side};
use crate::error::{Error, Result};
use crate::globular::{combine, realize, ChainSum, GlobularCell, GlobularComplex};
use crate::homology::{directed_homology, HomologyGroup, HomologyTable};
use crate::precubical::{CubeFaces, PrecubicalSet};
use crate::unionfind::UnionFind;

/// One elementary subdivision step, as read from an op-sequence file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubdivisionOp {
    Edge { cell: String, k: usize },
    Lens { cell: String },
    Grid { factors: Vec<usize> },
}

impl fmt::Display for SubdivisionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubdivisionOp::Edge { cell, k } => write!(f, "edge `{cell}` k={k}"),
            SubdivisionOp::Lens { cell } => write!(f, "lens `{cell}`"),
            SubdivisionOp::Grid { factors } => write!(f, "grid {factors:?}"),
        }
    }
}

impl SubdivisionOp {
    pub fn parse_list(text: &str) -> Result<Vec<SubdivisionOp>> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Where each state of the input went. Subdivisions only add states, so this
/// is the identity on the original states.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StateInjection {
    pub map: IndexMap<String, String>,
}

impl StateInjection {
    pub fn identity<'a>(states: impl IntoIterator<Item = &'a String>) -> Self {
        Self {
            map: states.into_iter().map(|s| (s.clone(), s.clone())).collect(),
        }
    }

    pub fn get(&self, state: &str) -> Option<&str> {
        self.map.get(state).map(String::as_str)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &StateInjection) -> StateInjection {
        Self {
            map: self
                .map
                .iter()
                .filter_map(|(a, b)| next.map.get(b).map(|c| (a.clone(), c.clone())))
                .collect(),
        }
    }
}

/// Picks `base`, or `base'`, `base''`, … if taken, and reserves it.
fn fresh(taken: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

fn all_names(x: &GlobularComplex) -> HashSet<String> {
    x.states().iter().chain(x.cells().iter().map(|c| &c.id)).cloned().collect()
}

/// Replaces the 1-cell `e` by a chain `e₁, …, e_{k+1}` through `k` fresh
/// states.
///
/// Branch occurrences of `e` become `e₁`, merge occurrences `e_{k+1}`, and
/// every flow chain through `e` runs through the whole new chain.
pub fn subdivide_edge(x: &GlobularComplex, e: &str, k: usize) -> Result<(GlobularComplex, StateInjection)> {
    let edge = x.cell(e).ok_or_else(|| Error::UnknownCell(e.to_string()))?;
    if edge.dim != 1 {
        return Err(Error::WrongDimension {
            cell: e.to_string(),
            expected: 1,
            found: edge.dim,
        });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("edge subdivision needs k ≥ 1".into()));
    }
    let mut taken = all_names(x);
    let mids: Vec<String> = (1..=k).map(|i| fresh(&mut taken, format!("{e}.v{i}"))).collect();
    let pieces: Vec<String> = (1..=k + 1).map(|i| fresh(&mut taken, format!("{e}.{i}"))).collect();
    let mut stops = vec![edge.src.clone()];
    stops.extend(mids.iter().cloned());
    stops.push(edge.tgt.clone());

    let mut states = x.states().to_vec();
    states.extend(mids);
    let mut cells = Vec::with_capacity(x.cells().len() + k);
    for c in x.cells() {
        if c.id == e {
            for (i, id) in pieces.iter().enumerate() {
                cells.push(GlobularCell::edge(id.clone(), stops[i].clone(), stops[i + 1].clone()));
            }
            continue;
        }
        let rename = |sum: &[(i64, String)], to: &String| -> Vec<(i64, String)> {
            sum.iter()
                .map(|(n, r)| (*n, if r == e { to.clone() } else { r.clone() }))
                .collect()
        };
        let flow = c.flow.as_ref().map(|f| {
            f.iter()
                .map(|(n, chain)| {
                    let mut out = Vec::with_capacity(chain.len());
                    for f in chain {
                        if f == e {
                            out.extend(pieces.iter().cloned());
                        } else {
                            out.push(f.clone());
                        }
                    }
                    (*n, out)
                })
                .collect()
        });
        cells.push(GlobularCell {
            branch: rename(&c.branch, &pieces[0]),
            merge: rename(&c.merge, &pieces[k]),
            flow,
            ..c.clone()
        });
    }
    Ok((GlobularComplex::new(states, cells), StateInjection::identity(x.states())))
}

/// The two chains `(κ₁, κ₂)` of a 2-cell the lens operator can split, or the
/// reason it cannot.
pub fn lens_chains<'a>(x: &'a GlobularComplex, c: &str) -> Result<(&'a [String], &'a [String])> {
    let cell = x.cell(c).ok_or_else(|| Error::UnknownCell(c.to_string()))?;
    if cell.dim != 2 {
        return Err(Error::WrongDimension {
            cell: c.to_string(),
            expected: 2,
            found: cell.dim,
        });
    }
    let flow = cell
        .flow
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("cell `{c}` has no flow boundary")))?;
    let plus: Vec<&Vec<String>> = flow.iter().filter(|(n, _)| *n == 1).map(|(_, ch)| ch).collect();
    let minus: Vec<&Vec<String>> = flow.iter().filter(|(n, _)| *n == -1).map(|(_, ch)| ch).collect();
    if flow.len() != 2 || plus.len() != 1 || minus.len() != 1 {
        return Err(Error::Unsupported(format!(
            "flow boundary of `{c}` is not one chain with coefficient +1 and one with −1"
        )));
    }
    for f in plus[0].iter().chain(minus[0].iter()) {
        if x.cell(f).map(|g| g.dim) != Some(1) {
            return Err(Error::Unsupported(format!(
                "flow boundary of `{c}` passes through `{f}`, which is not a 1-cell"
            )));
        }
    }
    Ok((plus[0], minus[0]))
}

/// Splits the 2-cell `c` along a fresh path `a·b` through a fresh state.
///
/// With flow boundary `κ₁ − κ₂`, the two halves get `κ₁ − (a, b)` and
/// `(a, b) − κ₂`; their branch and merge incidences are the first- and
/// last-factor projections. Higher cells see `c` as `c₋ + c₊`.
pub fn subdivide_lens(x: &GlobularComplex, c: &str) -> Result<(GlobularComplex, StateInjection)> {
    let (k1, k2) = lens_chains(x, c)?;
    let (k1, k2) = (k1.to_vec(), k2.to_vec());
    let cell = x.cell(c).expect("checked");
    let mut taken = all_names(x);
    let p = fresh(&mut taken, "p".into());
    let a = fresh(&mut taken, format!("{c}.a"));
    let b = fresh(&mut taken, format!("{c}.b"));
    let lo = fresh(&mut taken, format!("{c}-"));
    let hi = fresh(&mut taken, format!("{c}+"));
    let ab = vec![a.clone(), b.clone()];
    let first = |ch: &[String]| ch[0].clone();
    let last = |ch: &[String]| ch[ch.len() - 1].clone();

    let mut states = x.states().to_vec();
    states.push(p.clone());
    let mut cells = Vec::with_capacity(x.cells().len() + 3);
    let split = |sum: &[(i64, String)]| -> Vec<(i64, String)> {
        combine(sum.iter().flat_map(|(n, r)| {
            if r == c {
                vec![(*n, lo.clone()), (*n, hi.clone())]
            } else {
                vec![(*n, r.clone())]
            }
        }))
    };
    for g in x.cells() {
        if g.id == c {
            cells.push(GlobularCell::edge(a.clone(), cell.src.clone(), p.clone()));
            cells.push(GlobularCell::edge(b.clone(), p.clone(), cell.tgt.clone()));
            cells.push(GlobularCell {
                id: lo.clone(),
                dim: 2,
                src: cell.src.clone(),
                tgt: cell.tgt.clone(),
                branch: combine([(1, first(&k1)), (-1, a.clone())]),
                merge: combine([(1, last(&k1)), (-1, b.clone())]),
                flow: Some(vec![(1, k1.clone()), (-1, ab.clone())]),
            });
            cells.push(GlobularCell {
                id: hi.clone(),
                dim: 2,
                src: cell.src.clone(),
                tgt: cell.tgt.clone(),
                branch: combine([(1, a.clone()), (-1, first(&k2))]),
                merge: combine([(1, b.clone()), (-1, last(&k2))]),
                flow: Some(vec![(1, ab.clone()), (-1, k2.clone())]),
            });
            continue;
        }
        let flow: Option<ChainSum> = g.flow.as_ref().map(|f| {
            let mut out = Vec::new();
            for (n, chain) in f {
                match chain.iter().position(|f| f == c) {
                    None => out.push((*n, chain.clone())),
                    Some(_) => {
                        // a chain through c becomes one chain per half,
                        // expanded at every occurrence
                        let mut variants = vec![Vec::new()];
                        for f in chain {
                            if f == c {
                                variants = variants
                                    .into_iter()
                                    .flat_map(|v: Vec<String>| {
                                        [lo.clone(), hi.clone()].map(|h| {
                                            let mut v = v.clone();
                                            v.push(h);
                                            v
                                        })
                                    })
                                    .collect();
                            } else {
                                for v in &mut variants {
                                    v.push(f.clone());
                                }
                            }
                        }
                        out.extend(variants.into_iter().map(|v| (*n, v)));
                    }
                }
            }
            combine(out)
        });
        cells.push(GlobularCell {
            branch: split(&g.branch),
            merge: split(&g.merge),
            flow,
            ..g.clone()
        });
    }
    Ok((GlobularComplex::new(states, cells), StateInjection::identity(x.states())))
}

/// Parallel classes of edges: edges on opposite sides of some square are
/// parallel. Classes are numbered by their first edge in file order.
pub fn parallel_classes(k: &PrecubicalSet) -> Vec<Vec<String>> {
    let edges = k.cubes(1);
    let at: HashMap<&str, usize> = edges.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let mut uf = UnionFind::new(edges.len());
    for s in k.cubes(2) {
        for i in 1..=2 {
            if let (Some(x), Some(y)) = (k.face(s, 0, i), k.face(s, 1, i)) {
                if let (Some(&x), Some(&y)) = (at.get(x), at.get(y)) {
                    uf.union(x, y);
                }
            }
        }
    }
    let labels = uf.labels();
    let mut out: Vec<Vec<String>> = vec![Vec::new(); uf.sets()];
    for (e, l) in edges.iter().zip(labels) {
        out[l].push(e.clone());
    }
    out
}

/// Grid refinement of a precubical set.
///
/// `factors` gives the number of pieces for each parallel class of edges (see
/// [`parallel_classes`]); a single factor applies to every class. Every
/// `n`-cube becomes `∏ mᵢ` sub-cubes along with their shared faces. Vertices
/// keep their names, and so does every cube whose factors are all 1. New
/// cells are named `cube@p₁.p₂…` by their position in the doubled grid of
/// the cube that owns them.
pub fn subdivide_precubical(k: &PrecubicalSet, factors: &[usize]) -> Result<PrecubicalSet> {
    k.ensure_valid()?;
    let classes = parallel_classes(k);
    if factors.contains(&0) {
        return Err(Error::InvalidArgument("grid factors must be ≥ 1".into()));
    }
    let per_class: Vec<usize> = match factors.len() {
        1 => vec![factors[0]; classes.len()],
        n if n == classes.len() => factors.to_vec(),
        n => {
            return Err(Error::InvalidArgument(format!(
                "{n} grid factors given for {} parallel classes of edges",
                classes.len()
            )))
        }
    };
    let grid = Grid::new(k, &classes, &per_class);
    let mut cubes: Vec<Vec<String>> = vec![Vec::new(); k.max_dim().map_or(0, |d| d + 1)];
    let mut faces = IndexMap::new();
    for (n, c) in k.all_cubes() {
        let m = &grid.factors[c];
        for p in owned_positions(m) {
            let name = grid.name(c, &p, m);
            let odd: Vec<usize> = (0..n).filter(|&i| p[i] % 2 == 1).collect();
            if !odd.is_empty() {
                let side = |eps: usize| -> Vec<String> {
                    odd.iter()
                        .map(|&i| {
                            let mut q = p.clone();
                            q[i] = p[i] - 1 + 2 * eps;
                            grid.canonical(c, q, m.clone())
                        })
                        .collect()
                };
                faces.insert(name.clone(), CubeFaces { front: side(0), back: side(1) });
            }
            cubes[odd.len()].push(name);
        }
    }
    Ok(PrecubicalSet::new(cubes, faces))
}

/// Positions owned by a cube: every coordinate odd or strictly interior.
fn owned_positions(m: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &mi in m {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..2 * mi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

struct Grid<'a> {
    k: &'a PrecubicalSet,
    factors: HashMap<&'a str, Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(k: &'a PrecubicalSet, classes: &[Vec<String>], per_class: &[usize]) -> Self {
        let mut factor_of: HashMap<&str, usize> = HashMap::new();
        for (class, &m) in classes.iter().zip(per_class) {
            for e in class {
                factor_of.insert(e.as_str(), m);
            }
        }
        let mut factors = HashMap::new();
        for (n, c) in k.all_cubes() {
            let m: Vec<usize> = (1..=n)
                .map(|i| {
                    // the edge along axis i at the lowest corner
                    let steps: Vec<(u8, usize)> = (1..=n).rev().filter(|&j| j != i).map(|j| (0, j)).collect();
                    let e = k.iterated_face(c, &steps).expect("valid set");
                    factor_of[e]
                })
                .collect();
            factors.insert(c, m);
        }
        Self { k, factors }
    }

    fn name(&self, c: &str, p: &[usize], m: &[usize]) -> String {
        if p.is_empty() || m.iter().all(|&x| x == 1) {
            c.to_string()
        } else {
            let coords: Vec<String> = p.iter().map(usize::to_string).collect();
            format!("{c}@{}", coords.join("."))
        }
    }

    /// Name of the sub-cell at position `p` of cube `c`, after moving to the
    /// face that owns it.
    fn canonical(&self, c: &str, mut p: Vec<usize>, mut m: Vec<usize>) -> String {
        let mut c = c;
        while let Some(j) = (0..p.len()).find(|&j| p[j] == 0 || p[j] == 2 * m[j]) {
            let eps = u8::from(p[j] != 0);
            c = self.k.face(c, eps, j + 1).expect("valid set");
            p.remove(j);
            m.remove(j);
        }
        self.name(c, &p, &m)
    }
}

/// A complex at some point of a subdivision sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Complex {
    Precubical(PrecubicalSet),
    Globular(GlobularComplex),
}

impl Complex {
    pub fn to_globular(&self) -> Result<GlobularComplex> {
        match self {
            Complex::Precubical(k) => realize(k),
            Complex::Globular(x) => Ok(x.clone()),
        }
    }

    pub fn states(&self) -> Vec<String> {
        match self {
            Complex::Precubical(k) => k.cubes(0).to_vec(),
            Complex::Globular(x) => x.states().to_vec(),
        }
    }
}

/// Applies one step. Grid steps need a precubical set; edge and lens steps
/// realize a precubical set first.
pub fn apply(input: &Complex, op: &SubdivisionOp) -> Result<(Complex, StateInjection)> {
    match op {
        SubdivisionOp::Grid { factors } => match input {
            Complex::Precubical(k) => {
                let out = subdivide_precubical(k, factors)?;
                Ok((Complex::Precubical(out), StateInjection::identity(k.cubes(0))))
            }
            Complex::Globular(_) => Err(Error::Unsupported(
                "grid subdivision applies to precubical sets only".into(),
            )),
        },
        SubdivisionOp::Edge { cell, k } => {
            let (x, f) = subdivide_edge(&input.to_globular()?, cell, *k)?;
            Ok((Complex::Globular(x), f))
        }
        SubdivisionOp::Lens { cell } => {
            let (x, f) = subdivide_lens(&input.to_globular()?, cell)?;
            Ok((Complex::Globular(x), f))
        }
    }
}

/// Applies a sequence of steps, naming the first one that fails.
pub fn apply_all(input: &Complex, ops: &[SubdivisionOp]) -> Result<(Complex, StateInjection)> {
    let mut current = input.clone();
    let mut f = StateInjection::identity(&input.states());
    for (step, op) in ops.iter().enumerate() {
        let (next, g) = apply(&current, op).map_err(|e| Error::Inapplicable {
            step: step + 1,
            op: op.to_string(),
            reason: e.to_string(),
        })?;
        f = f.then(&g);
        current = next;
    }
    Ok((current, f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeComparison {
    pub degree: usize,
    pub before: HomologyGroup,
    pub after: HomologyGroup,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentComparison {
    pub state: String,
    pub side: Side,
    pub before: usize,
    pub after: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub verdict: Verdict,
    pub ops: Vec<SubdivisionOp>,
    pub census_before: Vec<usize>,
    pub census_after: Vec<usize>,
    pub branching: Vec<DegreeComparison>,
    pub merging: Vec<DegreeComparison>,
    pub components: Vec<ComponentComparison>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Human-readable descriptions of every disagreement.
    pub fn discrepancies(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, rows) in [("H⁻", &self.branching), ("H⁺", &self.merging)] {
            for d in rows.iter().filter(|d| !d.equal) {
                out.push(format!("{name}_{}: {} before, {} after", d.degree, d.before, d.after));
            }
        }
        for c in self.components.iter().filter(|c| !c.equal) {
            out.push(format!(
                "π₀ of the {} space at `{}`: {} before, {} after",
                match c.side {
                    Side::Branching => "branching",
                    Side::Merging => "merging",
                },
                c.state,
                c.before,
                c.after
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "census {:?} -> {:?}\n",
            self.census_before, self.census_after
        ));
        for (name, rows) in [("H⁻", &self.branching), ("H⁺", &self.merging)] {
            for d in rows {
                out.push_str(&format!(
                    "{name}_{}  {}  ->  {}{}\n",
                    d.degree,
                    d.before,
                    d.after,
                    if d.equal { "" } else { "   MISMATCH" }
                ));
            }
        }
        for line in self.discrepancies().iter().filter(|l| l.starts_with("π₀")) {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("{}\n", self.verdict));
        out
    }
}

fn compare_tables(before: &HomologyTable, after: &HomologyTable) -> Vec<DegreeComparison> {
    let degrees: BTreeMap<usize, ()> = before.keys().chain(after.keys()).map(|&k| (k, ())).collect();
    degrees
        .into_keys()
        .map(|k| {
            let b = before.get(&k).cloned().unwrap_or_default();
            let a = after.get(&k).cloned().unwrap_or_default();
            DegreeComparison {
                degree: k,
                equal: a == b,
                before: b,
                after: a,
            }
        })
        .collect()
}

/// Compares homology and per-state component counts of two complexes.
///
/// Neither side is validated, so a broken `after` shows up as a located
/// discrepancy instead of an error.
pub fn compare_invariants(
    before: &GlobularComplex,
    after: &GlobularComplex,
    injection: &StateInjection,
) -> Result<InvarianceReport> {
    let mut components = Vec::new();
    for side in [Side::Branching, Side::Merging] {
        for state in before.states() {
            let image = injection
                .get(state)
                .ok_or_else(|| Error::UnknownState(state.clone()))?;
            let b = pi0(&space(before, state, side)?).count;
            let a = pi0(&space(after, image, side)?).count;
            components.push(ComponentComparison {
                state: state.clone(),
                side,
                before: b,
                after: a,
                equal: a == b,
            });
        }
    }
    let branching = compare_tables(
        &directed_homology(before, Side::Branching, false)?,
        &directed_homology(after, Side::Branching, false)?,
    );
    let merging = compare_tables(
        &directed_homology(before, Side::Merging, false)?,
        &directed_homology(after, Side::Merging, false)?,
    );
    let pass = branching.iter().chain(&merging).all(|d| d.equal) && components.iter().all(|c| c.equal);
    Ok(InvarianceReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        ops: Vec::new(),
        census_before: before.census(),
        census_after: after.census(),
        branching,
        merging,
        components,
    })
}

/// Applies `ops` to `input` and compares invariants before and after.
pub fn check_invariance(input: &Complex, ops: &[SubdivisionOp]) -> Result<InvarianceReport> {
    let before = input.to_globular()?;
    before.ensure_valid()?;
    let (after, f) = apply_all(input, ops)?;
    let after = after.to_globular()?;
    let mut report = compare_invariants(&before, &after, &f)?;
    report.ops = ops.to_vec();
    Ok(report)
}
