//! Integer homology and the branching/merging homology of a complex.
//!
//! Cellular homology of a [`ChainComplex`] comes from Smith normal form of
//! its boundary matrices. The branching homology of a globular complex `X`
//! is assembled from the branching spaces `𝒢⁻_α(X)`, one per state:
//!
//! * `H⁻₀(X) = Z[X⁰] / im ε` is free on the states whose branching space is
//!   empty, i.e. the final states;
//! * `H⁻₁(X) = ker ε / im ∂`. The image of `∂(f) = f(0) − f(1)` identifies
//!   points in the same path component, so `Z[𝒢⁻] / im ∂ = Z[π₀ 𝒢⁻]` and the
//!   kernel of `ε` has rank `Σ_α max(0, c_α − 1)` where `c_α` counts the
//!   components over `α`;
//! * `H⁻ₙ₊₁(X) = Hₙ(𝒢⁻(X)) = ⊕_α Hₙ(𝒢⁻_α(X))` for `n ≥ 1`.
//!
//! Merging homology is branching homology of the time-reversed complex.

mod snf;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::branching::{pi0, space, Side};
use crate::error::{Error, Result};
use crate::globular::GlobularComplex;
use crate::matrix::IntMatrix;

pub use snf::{invariant_factors, normalize_torsion, snf, BigMatrix, SnfResult};

/// A chain complex of free abelian groups of finite rank.
///
/// `boundaries[k - 1]` is `∂_k : C_k → C_{k−1}`, of shape
/// `ranks[k - 1] × ranks[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    /// Checks shapes only; see [`ChainComplex::check`] for `∂∂ = 0`.
    pub fn new(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != ranks.len().max(1) {
            return Err(Error::Shape(format!(
                "{} ranks need {} boundary maps, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            if d.rows() != ranks[k] || d.cols() != ranks[k + 1] {
                return Err(Error::Shape(format!(
                    "∂_{} is {}x{}, expected {}x{}",
                    k + 1,
                    d.rows(),
                    d.cols(),
                    ranks[k],
                    ranks[k + 1]
                )));
            }
        }
        Ok(Self { ranks, boundaries })
    }

    pub fn empty() -> Self {
        Self {
            ranks: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `∂_k`, for `1 ≤ k < ranks().len()`.
    pub fn boundary(&self, k: usize) -> Option<&IntMatrix> {
        k.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    /// Fails on the first nonzero entry of some `∂_k ∘ ∂_{k+1}`.
    pub fn check(&self) -> Result<()> {
        for (k, pair) in self.boundaries.windows(2).enumerate() {
            let product = pair[0].mul(&pair[1])?;
            if let Some((row, col, value)) = product.first_nonzero() {
                return Err(Error::NotAComplex {
                    degree: k + 1,
                    row,
                    col,
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// A finitely generated abelian group `Z^free_rank ⊕ Z/t₁ ⊕ … ⊕ Z/t_m` with
/// `2 ≤ t₁ | t₂ | … | t_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct HomologyGroup {
    #[serde(rename = "rank")]
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<BigInt>,
}

fn serialize_torsion<S: Serializer>(t: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for x in t {
        match x.to_u64() {
            Some(v) => seq.serialize_element(&v)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with_torsion(free_rank: usize, torsion: &[u64]) -> Self {
        Self {
            free_rank,
            torsion: torsion.iter().map(|&t| BigInt::from(t)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// True when the torsion coefficients are ≥ 2 and each divides the next.
    pub fn is_normalized(&self) -> bool {
        let two = BigInt::from(2);
        self.torsion.iter().all(|t| *t >= two)
            && self.torsion.windows(2).all(|w| (&w[1] % &w[0]) == BigInt::from(0))
    }

    /// Direct sum, renormalized.
    pub fn direct_sum(&self, other: &HomologyGroup) -> HomologyGroup {
        let all: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        HomologyGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: normalize_torsion(&all),
        }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" ⊕ "))
        }
    }
}

/// Homology groups by degree.
pub type HomologyTable = BTreeMap<usize, HomologyGroup>;

/// `H_k = ker ∂_k / im ∂_{k+1}` for every degree of the complex.
///
/// The empty complex has a single trivial group in degree 0.
pub fn homology(c: &ChainComplex) -> Result<HomologyTable> {
    c.check()?;
    let factors: Vec<Vec<BigInt>> = c.boundaries.iter().map(invariant_factors).collect();
    let mut out = BTreeMap::new();
    if c.ranks.is_empty() {
        out.insert(0, HomologyGroup::zero());
        return Ok(out);
    }
    let one = BigInt::from(1);
    for (k, &n) in c.ranks.iter().enumerate() {
        let rank_out = if k == 0 { 0 } else { factors[k - 1].len() };
        let incoming = factors.get(k).map(Vec::as_slice).unwrap_or(&[]);
        out.insert(
            k,
            HomologyGroup {
                free_rank: n - rank_out - incoming.len(),
                torsion: incoming.iter().filter(|&d| *d != one).cloned().collect(),
            },
        );
    }
    Ok(out)
}

pub(crate) fn directed_homology(x: &GlobularComplex, side: Side, validate: bool) -> Result<HomologyTable> {
    if validate {
        x.ensure_valid()?;
    }
    let top = x.max_dim().max(1);
    let mut table: HomologyTable = (0..=top).map(|n| (n, HomologyGroup::zero())).collect();
    for state in x.states() {
        let c = space(x, state, side)?;
        if c.is_empty() {
            table.get_mut(&0).unwrap().free_rank += 1;
            continue;
        }
        table.get_mut(&1).unwrap().free_rank += pi0(&c).reduced_rank();
        for (k, group) in homology(&c.chain_complex())? {
            if k == 0 {
                continue;
            }
            let slot = table.get_mut(&(k + 1)).expect("degree bounded by max_dim");
            *slot = slot.direct_sum(&group);
        }
    }
    Ok(table)
}

/// Branching homology `H⁻_n(X)` for `0 ≤ n ≤ max(1, dim X)`.
pub fn branching_homology(x: &GlobularComplex) -> Result<HomologyTable> {
    directed_homology(x, Side::Branching, true)
}

/// Merging homology `H⁺_n(X) = H⁻_n(op X)`.
pub fn merging_homology(x: &GlobularComplex) -> Result<HomologyTable> {
    directed_homology(x, Side::Merging, true)
}

/// Both homology tables, as written by the CLI's `--json` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branching: Option<HomologyTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merging: Option<HomologyTable>,
}

impl HomologyReport {
    pub fn compute(x: &GlobularComplex, branching: bool, merging: bool) -> Result<Self> {
        Ok(Self {
            branching: branching.then(|| branching_homology(x)).transpose()?,
            merging: merging.then(|| merging_homology(x)).transpose()?,
        })
    }

    /// A plain-text table, one row per degree.
    pub fn table(&self) -> String {
        let degrees = self
            .branching
            .iter()
            .chain(self.merging.iter())
            .flat_map(|t| t.keys().copied())
            .max()
            .unwrap_or(0);
        let mut header = vec!["n".to_string()];
        if self.branching.is_some() {
            header.push("H⁻_n".into());
        }
        if self.merging.is_some() {
            header.push("H⁺_n".into());
        }
        let mut rows = vec![header];
        for n in 0..=degrees {
            let mut row = vec![n.to_string()];
            for t in self.branching.iter().chain(self.merging.iter()) {
                row.push(t.get(&n).map_or_else(|| "0".into(), ToString::to_string));
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap())
            .collect();
        let mut out = String::new();
        for r in rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}
