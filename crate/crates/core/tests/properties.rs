use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digerm::branching::{space, Side};
use digerm::flowcat::{cat, flow_branching_chain, oracle_check};
use digerm::precubical::random::{random_precubical, RandomPrecubicalConfig};
use digerm::subdivision::{subdivide_edge, subdivide_lens, subdivide_precubical, lens_chains};
use digerm::{
    branching_homology, homology, merging_homology, op, realize, ChainComplex, GlobularComplex,
    HomologyGroup, IntMatrix, PrecubicalSet,
};

fn random_set(seed: u64) -> PrecubicalSet {
    random_precubical(&mut ChaCha8Rng::seed_from_u64(seed), RandomPrecubicalConfig::default())
}

/// Invariant factors from a list of cyclic orders, via prime powers.
fn expected_torsion(orders: &[u64]) -> Vec<u64> {
    let mut powers: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &n in orders {
        let mut n = n;
        let mut p = 2;
        while n > 1 {
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                powers.entry(p).or_default().push(q);
            }
            p += 1;
        }
    }
    let len = powers.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for qs in powers.values_mut() {
        qs.sort_unstable();
        // the largest powers go to the last factors
        for (slot, q) in out.iter_mut().rev().zip(qs.iter().rev()) {
            *slot *= q;
        }
    }
    out
}

/// A chain complex with known homology: a direct sum of `Z` summands and
/// `Z --d--> Z` pieces, scrambled by random unimodular changes of basis.
fn scrambled_complex(seed: u64) -> (ChainComplex, Vec<HomologyGroup>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = rng.gen_range(0..=3usize);
    let free: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=2)).collect();
    // pieces[k]: diagonal entries of ∂_{k+1}
    let pieces: Vec<Vec<u64>> = (0..top)
        .map(|_| (0..rng.gen_range(0..=3)).map(|_| *[1, 1, 2, 3, 4, 6].choose(&mut rng).unwrap()).collect())
        .collect();
    // basis of C_k: free, then sources of ∂_k, then targets of ∂_{k+1}
    let ranks: Vec<usize> = (0..=top)
        .map(|k| {
            free[k] + if k > 0 { pieces[k - 1].len() } else { 0 } + pieces.get(k).map_or(0, Vec::len)
        })
        .collect();
    let mut d: Vec<Vec<Vec<i64>>> = (1..=top).map(|k| vec![vec![0; ranks[k]]; ranks[k - 1]]).collect();
    for k in 1..=top {
        let targets = free[k - 1] + if k > 1 { pieces[k - 2].len() } else { 0 };
        for (i, &x) in pieces[k - 1].iter().enumerate() {
            d[k - 1][targets + i][free[k] + i] = x as i64;
        }
    }
    for _ in 0..40 {
        let k = rng.gen_range(0..=top);
        if ranks[k] < 2 {
            continue;
        }
        let i = rng.gen_range(0..ranks[k]);
        let j = rng.gen_range(0..ranks[k]);
        let c: i64 = *[-1, 1, 2].choose(&mut rng).unwrap();
        if i == j {
            continue;
        }
        let mut trial = d.clone();
        if k > 0 {
            for row in trial[k - 1].iter_mut() {
                row[i] += c * row[j];
            }
        }
        if k < top {
            let (ri, rj) = (trial[k][i].clone(), &mut trial[k][j]);
            for (x, y) in rj.iter_mut().zip(ri) {
                *x -= c * y;
            }
        }
        if trial.iter().flatten().flatten().all(|x| x.abs() <= 40) {
            d = trial;
        }
    }
    let boundaries = (1..=top)
        .map(|k| IntMatrix::from_rows(&d[k - 1], ranks[k]).unwrap())
        .collect();
    let expect = (0..=top)
        .map(|k| {
            let t: Vec<u64> = pieces.get(k).map_or(Vec::new(), |p| p.iter().copied().filter(|&x| x > 1).collect());
            HomologyGroup::with_torsion(free[k], &expected_torsion(&t))
        })
        .collect();
    (ChainComplex::new(ranks, boundaries).unwrap(), expect)
}

fn rank_mod(m: &IntMatrix, p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = (1..p).find(|&x| x * a[rank][c] % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for cc in 0..cols {
                    a[r][cc] = (a[r][cc] - f * a[rank][cc]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// dim H_k(C; F_p) from ranks mod p, against the universal coefficient
/// count from the integral answer.
fn check_mod_p(c: &ChainComplex, groups: &BTreeMap<usize, HomologyGroup>) {
    let divisible = |g: &HomologyGroup, p: i64| {
        g.torsion.iter().filter(|t| (*t % BigInt::from(p)).to_i64() == Some(0)).count()
    };
    for p in [2, 3, 5, 7] {
        for (k, &n) in c.ranks().iter().enumerate() {
            let out = if k == 0 { 0 } else { rank_mod(c.boundary(k).unwrap(), p) };
            let inc = c.boundary(k + 1).map_or(0, |m| rank_mod(m, p));
            let lhs = n - out - inc;
            let g = &groups[&k];
            let below = if k == 0 { 0 } else { divisible(&groups[&(k - 1)], p) };
            assert_eq!(lhs, g.free_rank + divisible(g, p) + below, "degree {k}, p = {p}");
        }
    }
}

#[test]
fn torsion_normalization_oracle() {
    assert_eq!(expected_torsion(&[4, 6]), vec![2, 12]);
    assert_eq!(expected_torsion(&[2, 3]), vec![6]);
    assert_eq!(expected_torsion(&[]), Vec::<u64>::new());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn homology_of_scrambled_complexes(seed in any::<u64>()) {
        let (c, expect) = scrambled_complex(seed);
        c.check().unwrap();
        let got = homology(&c).unwrap();
        let got: Vec<HomologyGroup> = got.into_values().collect();
        prop_assert_eq!(&got, &expect);
        check_mod_p(&c, &homology(&c).unwrap());
    }

    #[test]
    fn realizations_are_valid_complexes(seed in any::<u64>()) {
        let x = realize(&random_set(seed)).unwrap();
        prop_assert!(x.validate().is_empty());
        for s in x.states() {
            for side in [Side::Branching, Side::Merging] {
                let c = space(&x, s, side).unwrap().chain_complex();
                c.check().unwrap();
                check_mod_p(&c, &homology(&c).unwrap());
            }
        }
        prop_assert_eq!(op(&op(&x)), x.clone());
        prop_assert_eq!(merging_homology(&x).unwrap(), branching_homology(&op(&x)).unwrap());
        prop_assert!(oracle_check(&x).unwrap().passed());
    }

    #[test]
    fn collapse_ignores_chain_tails(seed in any::<u64>()) {
        // u * v = u: dropping everything after the first factor changes nothing
        let x = realize(&random_set(seed)).unwrap();
        let f = cat(&x).unwrap();
        let mut g = f.clone();
        for c in &mut g.cells {
            for (_, chain) in &mut c.attachment {
                chain.truncate(1);
            }
        }
        for s in &f.states {
            prop_assert_eq!(flow_branching_chain(&f, s).unwrap(), flow_branching_chain(&g, s).unwrap());
        }
    }

    #[test]
    fn census_per_state_matches(seed in any::<u64>()) {
        let x = realize(&random_set(seed)).unwrap();
        let f = cat(&x).unwrap();
        for s in x.states() {
            let ranks = flow_branching_chain(&f, s).unwrap().complex.ranks().to_vec();
            let expect: Vec<usize> = (0..ranks.len())
                .map(|k| f.cells.iter().filter(|c| &c.src == s && c.dim == k).count())
                .collect();
            prop_assert_eq!(ranks, expect);
        }
    }

    #[test]
    fn elementary_subdivisions_preserve_homology(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = realize(&random_set(seed)).unwrap();
        let h = (branching_homology(&x).unwrap(), merging_homology(&x).unwrap());
        let mut y: GlobularComplex = x.clone();
        for _ in 0..3 {
            let lenses: Vec<String> = y.cells().iter()
                .filter(|c| c.dim == 2 && lens_chains(&y, &c.id).is_ok())
                .map(|c| c.id.clone()).collect();
            let edges: Vec<String> = y.cells().iter().filter(|c| c.dim == 1).map(|c| c.id.clone()).collect();
            let before = y.census();
            if let Some(c) = lenses.choose(&mut rng) {
                y = subdivide_lens(&y, c).unwrap().0;
                let after = y.census();
                prop_assert_eq!((after[0], after[1], after[2]), (before[0] + 1, before[1] + 2, before[2] + 1));
            } else if let Some(e) = edges.choose(&mut rng) {
                let k = rng.gen_range(1..=3);
                y = subdivide_edge(&y, e, k).unwrap().0;
                let after = y.census();
                prop_assert_eq!((after[0], after[1]), (before[0] + k, before[1] + k));
                prop_assert_eq!(&after[2..], &before[2..]);
            }
            prop_assert!(y.validate().is_empty(), "{:?}", y.validate());
        }
        prop_assert_eq!(h, (branching_homology(&y).unwrap(), merging_homology(&y).unwrap()));
        prop_assert!(oracle_check(&y).unwrap().passed());
    }

    #[test]
    fn grid_refinement(seed in any::<u64>()) {
        let k = random_set(seed);
        prop_assert_eq!(&subdivide_precubical(&k, &[1]).unwrap(), &k);
        let g = subdivide_precubical(&k, &[2]).unwrap();
        prop_assert!(g.validate().is_empty());
        // every cube owns ∏(2mᵢ − 1) cells
        let owned: usize = k.all_cubes().map(|(n, _)| 3usize.pow(n as u32)).sum();
        prop_assert_eq!(g.len(), owned);
        let (x, y) = (realize(&k).unwrap(), realize(&g).unwrap());
        prop_assert_eq!(branching_homology(&x).unwrap(), branching_homology(&y).unwrap());
        prop_assert_eq!(merging_homology(&x).unwrap(), merging_homology(&y).unwrap());
    }
}
