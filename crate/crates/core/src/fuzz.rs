//! Deterministic random instances for the invariance and oracle checks.
//!
//! Instance `i` of a run with seed `s` draws from its own ChaCha stream, so
//! instances can be generated and checked in any order or in parallel and
//! still give identical results.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::flowcat::oracle_check;
use crate::globular::GlobularComplex;
use crate::precubical::random::{random_precubical, RandomPrecubicalConfig};
use crate::precubical::PrecubicalSet;
use crate::subdivision::{
    apply, check_invariance, lens_chains, parallel_classes, Complex, SubdivisionOp,
};

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub complex: RandomPrecubicalConfig,
    /// Longest op sequence.
    pub max_ops: usize,
    /// Grid steps that would produce more cubes than this are skipped.
    pub max_grid_cubes: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            complex: RandomPrecubicalConfig::default(),
            max_ops: 5,
            max_grid_cubes: 600,
        }
    }
}

/// Seed of instance `index` in a run seeded with `seed` (splitmix64).
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct FuzzInstance {
    pub index: u64,
    pub seed: u64,
    pub input: PrecubicalSet,
    pub ops: Vec<SubdivisionOp>,
}

pub fn gen_instance(seed: u64, index: u64, cfg: &FuzzConfig) -> FuzzInstance {
    let s = instance_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let input = random_precubical(&mut rng, cfg.complex);
    let ops = random_ops(&mut rng, &input, cfg);
    FuzzInstance { index, seed: s, input, ops }
}

/// A random sequence of at most `cfg.max_ops` steps, each applicable to the
/// result of the previous ones.
pub fn random_ops<R: Rng>(rng: &mut R, k: &PrecubicalSet, cfg: &FuzzConfig) -> Vec<SubdivisionOp> {
    let len = rng.gen_range(0..=cfg.max_ops);
    let mut ops = Vec::with_capacity(len);
    let mut current = Complex::Precubical(k.clone());
    if len > 0 && rng.gen_bool(0.35) {
        let classes = parallel_classes(k).len();
        if classes > 0 {
            let factors = if rng.gen_bool(0.5) {
                vec![2]
            } else {
                (0..classes).map(|_| rng.gen_range(1..=3)).collect()
            };
            let op = SubdivisionOp::Grid { factors };
            if let Ok((next, _)) = apply(&current, &op) {
                let Complex::Precubical(g) = &next else { unreachable!() };
                if g.len() <= cfg.max_grid_cubes {
                    ops.push(op);
                    current = next;
                }
            }
        }
    }
    let mut x: GlobularComplex = match current.to_globular() {
        Ok(x) => x,
        Err(_) => return ops,
    };
    while ops.len() < len {
        let edges: Vec<&str> = x.cells().iter().filter(|c| c.dim == 1).map(|c| c.id.as_str()).collect();
        let lenses: Vec<&str> = x
            .cells()
            .iter()
            .filter(|c| c.dim == 2 && lens_chains(&x, &c.id).is_ok())
            .map(|c| c.id.as_str())
            .collect();
        let op = if !lenses.is_empty() && (edges.is_empty() || rng.gen_bool(0.4)) {
            SubdivisionOp::Lens {
                cell: lenses.choose(rng).unwrap().to_string(),
            }
        } else if let Some(e) = edges.choose(rng) {
            SubdivisionOp::Edge {
                cell: e.to_string(),
                k: rng.gen_range(1..=3),
            }
        } else {
            break;
        };
        match apply(&Complex::Globular(x.clone()), &op) {
            Ok((Complex::Globular(y), _)) => x = y,
            _ => break,
        }
        ops.push(op);
    }
    ops
}

/// What one instance checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzOutcome {
    pub index: u64,
    pub seed: u64,
    pub census: Vec<usize>,
    pub ops: Vec<SubdivisionOp>,
    pub valid: bool,
    pub invariance: bool,
    pub oracle: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

impl FuzzOutcome {
    pub fn passed(&self) -> bool {
        self.valid && self.invariance && self.oracle
    }
}

/// Runs every check on one instance: validity of the realization and of the
/// subdivided complex, homology and component invariance, and the flow
/// oracle on both ends.
pub fn run_instance(inst: &FuzzInstance) -> Result<FuzzOutcome> {
    let mut problems = Vec::new();
    let input = Complex::Precubical(inst.input.clone());
    let before = input.to_globular()?;
    let (after, _) = crate::subdivision::apply_all(&input, &inst.ops)?;
    let after = after.to_globular()?;
    let mut valid = true;
    for (label, x) in [("input", &before), ("output", &after)] {
        let v = x.validate();
        if !v.is_empty() {
            valid = false;
            problems.push(format!("{label}: {}", v[0]));
        }
    }
    let report = check_invariance(&input, &inst.ops)?;
    problems.extend(report.discrepancies());
    let mut oracle = true;
    for (label, x) in [("input", &before), ("output", &after)] {
        let r = oracle_check(x)?;
        if let Some(m) = r.mismatches.first() {
            oracle = false;
            problems.push(format!("oracle on {label}: {m}"));
        }
    }
    Ok(FuzzOutcome {
        index: inst.index,
        seed: inst.seed,
        census: inst.input.census(),
        ops: inst.ops.clone(),
        valid,
        invariance: report.passed(),
        oracle,
        problems,
    })
}
