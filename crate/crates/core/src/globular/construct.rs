use super::{combine, ChainSum, GlobularCell, GlobularComplex};
use crate::error::Result;
use crate::precubical::PrecubicalSet;

/// Realizes a precubical set as a globular complex.
///
/// Vertices become states and every `n`-cube `c` becomes a cell of dimension
/// `n` from its lowest to its highest vertex, with
///
/// ```text
/// branch(c) = Σᵢ (−1)^(i−1) d⁰ᵢ c
/// merge(c)  = Σᵢ (−1)^i     d¹ᵢ c
/// ```
///
/// For `n ≥ 2` the flow boundary runs over the two-step paths through the
/// shell of the cube: for each nonempty proper set `S` of axes, the face
/// spanned by `S` at the lowest vertex followed by the face spanned by the
/// complementary axes `T`, with sign `(−1)^|S| · sgn(S|T)`. Its first- and
/// last-factor projections are exactly `branch` and `merge`.
pub fn realize(k: &PrecubicalSet) -> Result<GlobularComplex> {
    k.ensure_valid()?;
    let states = k.cubes(0).to_vec();
    let mut cells = Vec::new();
    for (n, cube) in k.all_cubes().filter(|&(d, _)| d >= 1) {
        let faces = k.faces_of(cube).expect("valid set");
        let sign = |i: usize| if i % 2 == 0 { 1 } else { -1 };
        let (branch, merge) = if n == 1 {
            (Vec::new(), Vec::new())
        } else {
            (
                combine(faces.front.iter().enumerate().map(|(i, f)| (sign(i), f.clone()))),
                combine(faces.back.iter().enumerate().map(|(i, f)| (-sign(i), f.clone()))),
            )
        };
        let flow = (n >= 2).then(|| shell_paths(k, cube, n));
        cells.push(GlobularCell {
            id: cube.to_string(),
            dim: n,
            src: k.corner(cube, 0).expect("valid set").to_string(),
            tgt: k.corner(cube, 1).expect("valid set").to_string(),
            branch,
            merge,
            flow,
        });
    }
    Ok(GlobularComplex::new(states, cells))
}

/// The face of `cube` obtained by fixing the axes in `fixed` (1-based, any
/// order) to `value`.
fn fix_axes<'a>(k: &'a PrecubicalSet, cube: &'a str, fixed: &[usize], value: u8) -> &'a str {
    let mut axes = fixed.to_vec();
    axes.sort_unstable_by(|a, b| b.cmp(a));
    let steps: Vec<(u8, usize)> = axes.into_iter().map(|i| (value, i)).collect();
    k.iterated_face(cube, &steps).expect("valid set")
}

fn shell_paths(k: &PrecubicalSet, cube: &str, n: usize) -> ChainSum {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let (s, t): (Vec<usize>, Vec<usize>) = (1..=n).partition(|&i| mask & (1 << (i - 1)) != 0);
        let inversions = s
            .iter()
            .map(|&a| t.iter().filter(|&&b| a > b).count())
            .sum::<usize>();
        let sign = if (s.len() + inversions) % 2 == 0 { 1 } else { -1 };
        let lower = fix_axes(k, cube, &t, 0).to_string();
        let upper = fix_axes(k, cube, &s, 1).to_string();
        out.push((sign, vec![lower, upper]));
    }
    combine(out)
}

/// The globe over the `n`-disk, `Glob(Dⁿ)`, from state `0` to state `1`.
///
/// `globe(0)` is the directed segment: a single cell `t` of dimension 1. For
/// `n ≥ 1` the disk carries its hemispherical cell structure: cells
/// `e{k}+`, `e{k}-` of dimension `k` for `1 ≤ k ≤ n` and the top cell `t` of
/// dimension `n + 1`. In branching degree `d = k − 1`,
///
/// ```text
/// ∂ e{k}± = e{k−1}± + (−1)^d e{k−1}∓      (k ≥ 2)
/// ∂ t     = e{n}+  + (−1)^n e{n}−
/// ```
///
/// Branch and merge incidence agree, and every flow chain is a single cell.
pub fn globe(n: usize) -> GlobularComplex {
    let states = vec!["0".to_string(), "1".to_string()];
    let name = |k: usize, plus: bool| format!("e{k}{}", if plus { '+' } else { '-' });
    let sign = |d: usize| if d % 2 == 0 { 1 } else { -1 };
    let mut cells = Vec::new();
    let mut push = |id: String, dim: usize, boundary: Vec<(i64, String)>| {
        cells.push(GlobularCell {
            id,
            dim,
            src: "0".into(),
            tgt: "1".into(),
            flow: (dim >= 2).then(|| boundary.iter().map(|(c, r)| (*c, vec![r.clone()])).collect()),
            merge: boundary.clone(),
            branch: boundary,
        });
    };
    for k in 1..=n {
        for plus in [true, false] {
            let boundary = if k == 1 {
                Vec::new()
            } else {
                vec![(1, name(k - 1, plus)), (sign(k - 1), name(k - 1, !plus))]
            };
            push(name(k, plus), k, boundary);
        }
    }
    let top = if n == 0 {
        Vec::new()
    } else {
        vec![(1, name(n, true)), (sign(n), name(n, false))]
    };
    push("t".into(), n + 1, top);
    GlobularComplex::new(states, cells)
}

/// Time reversal: swaps source and target, branch and merge, and reverses
/// every flow chain.
pub fn op(x: &GlobularComplex) -> GlobularComplex {
    let cells = x
        .cells()
        .iter()
        .map(|c| GlobularCell {
            id: c.id.clone(),
            dim: c.dim,
            src: c.tgt.clone(),
            tgt: c.src.clone(),
            branch: c.merge.clone(),
            merge: c.branch.clone(),
            flow: c.flow.as_ref().map(|f| {
                f.iter()
                    .map(|(k, chain)| (*k, chain.iter().rev().cloned().collect()))
                    .collect()
            }),
        })
        .collect();
    GlobularComplex::new(x.states().to_vec(), cells)
}
