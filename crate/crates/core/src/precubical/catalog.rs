use super::{PrecubicalBuilder, PrecubicalSet};
use crate::error::{Error, Result};

/// Names accepted by [`gen_example`].
pub const CATALOG: &[&str] = &[
    "hollow_square",
    "filled_square",
    "torus",
    "wedge_two_edges",
    "directed_circle",
    "two_step_path",
];

/// The full combinatorial `n`-cube.
///
/// Each face is named by its coordinate pattern over `{0, 1, *}`: `c01*` is
/// the edge with `x₁ = 0`, `x₂ = 1` and `x₃` free. `dᵅᵢ` replaces the `i`-th
/// free coordinate by `α`. The cube has `C(n,k)·2^(n−k)` faces of
/// dimension `k`.
pub fn gen_cube(n: usize) -> PrecubicalSet {
    let mut patterns: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..n {
        patterns = patterns
            .into_iter()
            .flat_map(|p| {
                [b'0', b'1', b'*'].into_iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    let name = |p: &[u8]| format!("c{}", String::from_utf8_lossy(p));

    let mut by_dim: Vec<Vec<&Vec<u8>>> = vec![Vec::new(); n + 1];
    for p in &patterns {
        by_dim[p.iter().filter(|&&c| c == b'*').count()].push(p);
    }
    let mut b = PrecubicalBuilder::default();
    for (dim, pats) in by_dim.iter().enumerate() {
        for p in pats {
            if dim == 0 {
                b.vertex(name(p));
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|&k| p[k] == b'*').collect();
            let side = |alpha: u8| {
                free.iter()
                    .map(|&k| {
                        let mut q = (*p).clone();
                        q[k] = b'0' + alpha;
                        name(&q)
                    })
                    .collect::<Vec<_>>()
            };
            b.cube(name(p), side(0), side(1));
        }
    }
    b.build()
}

/// A named complex from the regression catalog.
pub fn gen_example(name: &str) -> Result<PrecubicalSet> {
    let mut b = PrecubicalBuilder::default();
    match name {
        "hollow_square" | "filled_square" => {
            // vXY has x₁ = X, x₂ = Y; s = [0,1]²
            b.vertex("v00").vertex("v10").vertex("v01").vertex("v11");
            b.edge("a", "v00", "v01")
                .edge("c", "v00", "v10")
                .edge("b", "v10", "v11")
                .edge("d", "v01", "v11");
            if name == "filled_square" {
                b.cube("s", ["a", "c"], ["b", "d"]);
            }
        }
        "torus" => {
            b.vertex("v").edge("a", "v", "v").edge("b", "v", "v");
            b.cube("s", ["b", "a"], ["b", "a"]);
        }
        "wedge_two_edges" => {
            b.vertex("o").vertex("x").vertex("y");
            b.edge("a", "o", "x").edge("b", "o", "y");
        }
        "directed_circle" => {
            b.vertex("v").edge("e", "v", "v");
        }
        "two_step_path" => {
            b.vertex("u").vertex("v").vertex("w");
            b.edge("e1", "u", "v").edge("e2", "v", "w");
        }
        _ => {
            return Err(Error::UnknownCatalog {
                name: name.to_string(),
                valid: CATALOG.join(", "),
            })
        }
    }
    Ok(b.build())
}
