//! Acceptance run: one PASS/FAIL line per criterion, with its time budget.
//!
//! Runs as a plain binary (`harness = false`) so the lines land in the test
//! log in order. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digerm::branching::{pi0, space, Side};
use digerm::flowcat::oracle_check;
use digerm::fuzz::{gen_instance, run_instance, FuzzConfig};
use digerm::homology::HomologyTable;
use digerm::precubical::random::{random_precubical, RandomPrecubicalConfig};
use digerm::precubical::CATALOG;
use digerm::subdivision::{check_invariance, Complex, SubdivisionOp};
use digerm::{
    branching_homology, gen_cube, gen_example, globe, merging_homology, op, realize, snf,
    GlobularComplex, HomologyGroup, IntMatrix,
};

const SEED: u64 = 0x5eed_d1ce;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn only_degree_zero(t: &HomologyTable) -> bool {
    t.iter().all(|(&k, g)| if k == 0 { *g == HomologyGroup::free(1) } else { g.is_zero() })
}

fn catalog() -> Vec<(String, GlobularComplex)> {
    CATALOG
        .iter()
        .map(|n| (n.to_string(), realize(&gen_example(n).unwrap()).unwrap()))
        .collect()
}

fn fuzzed(count: u64) -> Vec<(String, GlobularComplex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|i| {
            let k = random_precubical(&mut rng, RandomPrecubicalConfig::default());
            (format!("random #{i}"), realize(&k).unwrap())
        })
        .collect()
}

fn globes() -> Outcome {
    for n in 0..=4 {
        let x = globe(n);
        let b = branching_homology(&x).unwrap();
        let m = merging_homology(&x).unwrap();
        if !only_degree_zero(&b) || !only_degree_zero(&m) {
            return fail(format!("globe({n}): H⁻ = {b:?}, H⁺ = {m:?}"));
        }
    }
    pass("globe(0..=4): H₀ = Z and zero above, both sides")
}

fn squares() -> Outcome {
    let hollow = realize(&gen_example("hollow_square").unwrap()).unwrap();
    let filled = realize(&gen_example("filled_square").unwrap()).unwrap();
    let h1 = |x: &GlobularComplex, side: Side| {
        let t = match side {
            Side::Branching => branching_homology(x).unwrap(),
            Side::Merging => merging_homology(x).unwrap(),
        };
        t[&1].clone()
    };
    let expect = [
        ("hollow H⁻₁", h1(&hollow, Side::Branching), 1),
        ("filled H⁻₁", h1(&filled, Side::Branching), 0),
        ("hollow H⁺₁", h1(&hollow, Side::Merging), 1),
        ("filled H⁺₁", h1(&filled, Side::Merging), 0),
    ];
    for (what, got, rank) in expect {
        if got != HomologyGroup::free(rank) {
            return fail(format!("{what} = {got}"));
        }
    }
    // component counts by hand: two separate edges leave v00 in the hollow
    // square, the square joins them in the filled one; dually at v11
    let by_hand = [
        (&hollow, "v00", Side::Branching, 2),
        (&filled, "v00", Side::Branching, 1),
        (&hollow, "v11", Side::Merging, 2),
        (&filled, "v11", Side::Merging, 1),
    ];
    for (x, s, side, count) in by_hand {
        let got = pi0(&space(x, s, side).unwrap()).count;
        if got != count {
            return fail(format!("π₀ at {s} ({side:?}) = {got}, expected {count}"));
        }
    }
    pass("hollow H₁ = Z, filled H₁ = 0 on both sides; π₀ matches hand count")
}

fn invariance() -> Outcome {
    let cfg = FuzzConfig::default();
    let mut ops_total = 0;
    for i in 0..240 {
        let inst = gen_instance(SEED, i, &cfg);
        ops_total += inst.ops.len();
        let out = match run_instance(&inst) {
            Ok(out) => out,
            Err(e) => return fail(format!("instance {i}: {e}")),
        };
        if !out.valid || !out.invariance {
            return fail(format!("instance {i} (seed {:#x}): {:?}", inst.seed, out.problems));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for name in CATALOG {
        let k = gen_example(name).unwrap();
        for _ in 0..4 {
            let ops = digerm::fuzz::random_ops(&mut rng, &k, &cfg);
            ops_total += ops.len();
            match check_invariance(&Complex::Precubical(k.clone()), &ops) {
                Ok(r) if r.passed() => {}
                Ok(r) => return fail(format!("{name} {ops:?}: {:?}", r.discrepancies())),
                Err(e) => return fail(format!("{name} {ops:?}: {e}")),
            }
        }
        let all_edges: Vec<SubdivisionOp> = k
            .cubes(1)
            .iter()
            .map(|e| SubdivisionOp::Edge { cell: e.clone(), k: 1 })
            .take(5)
            .collect();
        if !check_invariance(&Complex::Precubical(k.clone()), &all_edges).unwrap().passed() {
            return fail(format!("{name}: edge subdivisions"));
        }
    }
    pass(format!("240 fuzzed + catalog, {ops_total} ops: homology and π₀ unchanged"))
}

fn oracle() -> Outcome {
    let corpus: Vec<_> = catalog().into_iter().chain(fuzzed(520)).collect();
    for (name, x) in &corpus {
        let r = oracle_check(x).unwrap();
        if let Some(m) = r.mismatches.first() {
            return fail(format!("{name}: {m}"));
        }
    }
    pass(format!("{} complexes, germ and flow matrices agree", corpus.len()))
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Bareiss fraction-free determinant.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn soundness() -> Outcome {
    let corpus: Vec<_> = catalog()
        .into_iter()
        .chain((0..=4).map(|n| (format!("globe({n})"), globe(n))))
        .chain((1..=4).map(|n| (format!("cube({n})"), realize(&gen_cube(n)).unwrap())))
        .chain(fuzzed(300))
        .collect();
    for (name, x) in &corpus {
        for state in x.states() {
            for side in [Side::Branching, Side::Merging] {
                if let Err(e) = space(x, state, side).unwrap().chain_complex().check() {
                    return fail(format!("{name} at {state} ({side:?}): {e}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x51f);
    for t in 0..1000 {
        let rows = rng.gen_range(1..=40);
        let cols = rng.gen_range(1..=40);
        let density = rng.gen_range(0.05..=1.0);
        let entries: Vec<Vec<i64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| if rng.gen_bool(density) { rng.gen_range(-9..=9) } else { 0 })
                    .collect()
            })
            .collect();
        let a = IntMatrix::from_rows(&entries, cols).unwrap();
        let r = snf(&a);
        let uav = mat_mul(&mat_mul(&r.u, &a.to_big(), rows, cols), &r.v, cols, cols);
        if uav != r.d {
            return fail(format!("matrix #{t}: U·A·V ≠ D"));
        }
        for (i, row) in r.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j && !x.is_zero() {
                    return fail(format!("matrix #{t}: D not diagonal at ({i}, {j})"));
                }
            }
        }
        let f = r.invariant_factors();
        if f.iter().any(|x| !x.is_positive()) || f.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return fail(format!("matrix #{t}: invariant factors {f:?} do not divide"));
        }
        if !det(&r.u).abs().is_one() || !det(&r.v).abs().is_one() {
            return fail(format!("matrix #{t}: transform not unimodular"));
        }
    }
    pass(format!("∂∂ = 0 on {} complexes; SNF checked on 1000 matrices", corpus.len()))
}

fn duality() -> Outcome {
    let corpus: Vec<_> = catalog()
        .into_iter()
        .chain((0..=4).map(|n| (format!("globe({n})"), globe(n))))
        .chain((1..=3).map(|n| (format!("cube({n})"), realize(&gen_cube(n)).unwrap())))
        .chain(fuzzed(150))
        .collect();
    for (name, x) in &corpus {
        let y = op(x);
        if op(&y) != *x {
            return fail(format!("{name}: op∘op ≠ id"));
        }
        if merging_homology(x).unwrap() != branching_homology(&y).unwrap() {
            return fail(format!("{name}: H⁺(X) ≠ H⁻(op X)"));
        }
    }
    pass(format!("{} complexes: op involutive, H⁺ = H⁻∘op", corpus.len()))
}

fn torus() -> Outcome {
    let x = realize(&gen_example("torus").unwrap()).unwrap();
    let b = branching_homology(&x).unwrap();
    let m = merging_homology(&x).unwrap();
    if b.values().chain(m.values()).all(HomologyGroup::is_zero) {
        pass("torus: every H⁻_n and H⁺_n vanishes")
    } else {
        fail(format!("torus: H⁻ = {b:?}, H⁺ = {m:?}"))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("globe suite", globes, Duration::from_secs(1)),
        ("branching detects choice", squares, Duration::from_secs(1)),
        ("subdivision invariance", invariance, Duration::from_secs(60)),
        ("flow oracle", oracle, Duration::from_secs(60)),
        ("chain-level soundness", soundness, Duration::from_secs(30)),
        ("duality", duality, Duration::from_secs(5)),
        ("torus regression", torus, Duration::from_secs(1)),
    ];
    let mut all = true;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.ok && took <= budget;
        all &= ok;
        println!(
            "criterion {} {:<26} {}  {:>8.3}s / {}s  {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
