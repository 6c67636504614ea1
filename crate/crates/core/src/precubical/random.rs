//! Random valid precubical sets for property tests and the fuzz harness.
//!
//! Instances grow constructively, so every output satisfies the cubical
//! identities without rejection sampling:
//!
//! * squares close an existing 2-path `x·y` with a second 2-path `u·w` of the
//!   same endpoints, reusing edges when such a path exists and adding fresh
//!   edges otherwise;
//! * higher cubes are prisms `f × I` over an existing cube `f`, whose far
//!   end is a fresh copy of `f`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{PrecubicalBuilder, PrecubicalSet};

#[derive(Debug, Clone, Copy)]
pub struct RandomPrecubicalConfig {
    /// Highest cube dimension, at most 3 in practice.
    pub max_dim: usize,
    /// Upper bound on the total number of cubes.
    pub max_cubes: usize,
}

impl Default for RandomPrecubicalConfig {
    fn default() -> Self {
        Self {
            max_dim: 3,
            max_cubes: 200,
        }
    }
}

struct Grower {
    b: PrecubicalBuilder,
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    by_dim: Vec<Vec<String>>,
    faces: HashMap<String, (Vec<String>, Vec<String>)>,
    next: usize,
}

impl Grower {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn len(&self) -> usize {
        self.b.len()
    }

    fn record(&mut self, dim: usize, id: &str) {
        if self.by_dim.len() <= dim {
            self.by_dim.resize(dim + 1, Vec::new());
        }
        self.by_dim[dim].push(id.to_string());
    }

    fn add_vertex(&mut self) -> String {
        let v = self.fresh("v");
        self.b.vertex(v.clone());
        self.vertices.push(v.clone());
        self.record(0, &v);
        v
    }

    fn add_edge(&mut self, src: &str, tgt: &str) -> String {
        let e = self.fresh("e");
        self.b.edge(e.clone(), src, tgt);
        self.edges.push((e.clone(), src.to_string(), tgt.to_string()));
        self.faces
            .insert(e.clone(), (vec![src.to_string()], vec![tgt.to_string()]));
        self.record(1, &e);
        e
    }

    fn add_cube(&mut self, prefix: &str, front: Vec<String>, back: Vec<String>) -> String {
        let id = self.fresh(prefix);
        let dim = front.len();
        self.b.cube(id.clone(), front.clone(), back.clone());
        self.faces.insert(id.clone(), (front, back));
        self.record(dim, &id);
        id
    }

    fn random_vertex<R: Rng>(&mut self, rng: &mut R) -> String {
        if self.vertices.is_empty() || rng.gen_bool(0.25) {
            self.add_vertex()
        } else {
            self.vertices.choose(rng).unwrap().clone()
        }
    }

    fn grow_edge<R: Rng>(&mut self, rng: &mut R) {
        let src = self.random_vertex(rng);
        let tgt = if rng.gen_bool(0.05) {
            src.clone()
        } else {
            self.random_vertex(rng)
        };
        self.add_edge(&src, &tgt);
    }

    fn edges_from(&self, v: &str) -> Vec<(String, String, String)> {
        self.edges.iter().filter(|e| e.1 == v).cloned().collect()
    }

    fn grow_square<R: Rng>(&mut self, rng: &mut R) {
        if self.edges.is_empty() {
            self.grow_edge(rng);
        }
        let x = self.edges.choose(rng).unwrap().clone();
        let y = match self.edges_from(&x.2).choose(rng) {
            Some(y) if rng.gen_bool(0.8) => y.clone(),
            _ => {
                let t = self.random_vertex(rng);
                let id = self.add_edge(&x.2, &t);
                (id, x.2.clone(), t)
            }
        };
        let mut closing = Vec::new();
        for u in self.edges_from(&x.1) {
            for w in self.edges_from(&u.2) {
                if w.2 == y.2 && !(u.0 == x.0 && w.0 == y.0) {
                    closing.push((u.0.clone(), w.0.clone()));
                }
            }
        }
        let (u, w) = match closing.choose(rng) {
            Some(p) if rng.gen_bool(0.7) => p.clone(),
            _ => {
                let mid = if rng.gen_bool(0.8) {
                    self.add_vertex()
                } else {
                    self.random_vertex(rng)
                };
                let u = self.add_edge(&x.1, &mid);
                let w = self.add_edge(&mid, &y.2);
                (u, w)
            }
        };
        self.add_cube("s", vec![x.0, u], vec![w, y.0]);
    }

    /// Builds `f × I` with `f` at the front of the new last axis.
    fn prism(&mut self, f: &str, memo: &mut HashMap<String, (String, String)>) -> (String, String) {
        if let Some(p) = memo.get(f) {
            return p.clone();
        }
        let result = match self.faces.get(f).cloned() {
            None => {
                let copy = self.add_vertex();
                let side = self.add_edge(f, &copy);
                (side, copy)
            }
            Some((front, back)) => {
                let dim = front.len();
                let mut pf = Vec::with_capacity(dim + 1);
                let mut pb = Vec::with_capacity(dim + 1);
                let mut cf = Vec::with_capacity(dim);
                let mut cb = Vec::with_capacity(dim);
                for g in &front {
                    let (side, copy) = self.prism(g, memo);
                    pf.push(side);
                    cf.push(copy);
                }
                for g in &back {
                    let (side, copy) = self.prism(g, memo);
                    pb.push(side);
                    cb.push(copy);
                }
                let copy = if dim == 1 {
                    let id = self.fresh("e");
                    self.b.cube(id.clone(), cf.clone(), cb.clone());
                    self.edges.push((id.clone(), cf[0].clone(), cb[0].clone()));
                    self.faces.insert(id.clone(), (cf, cb));
                    self.record(1, &id);
                    id
                } else {
                    self.add_cube(if dim == 2 { "s" } else { "k" }, cf, cb)
                };
                pf.push(f.to_string());
                pb.push(copy.clone());
                let side = self.add_cube(if dim + 1 == 2 { "s" } else { "k" }, pf, pb);
                (side, copy)
            }
        };
        memo.insert(f.to_string(), result.clone());
        result
    }

    fn closure_size(&self, f: &str) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f.to_string()];
        while let Some(c) = stack.pop() {
            if seen.insert(c.clone()) {
                if let Some((front, back)) = self.faces.get(&c) {
                    stack.extend(front.iter().cloned());
                    stack.extend(back.iter().cloned());
                }
            }
        }
        seen.len()
    }
}

/// Draws a random valid precubical set.
pub fn random_precubical<R: Rng>(rng: &mut R, cfg: RandomPrecubicalConfig) -> PrecubicalSet {
    let max_cubes = cfg.max_cubes.max(1);
    let target = rng.gen_range(1..=max_cubes.min(60).max(1));
    let mut g = Grower {
        b: PrecubicalBuilder::default(),
        vertices: Vec::new(),
        edges: Vec::new(),
        by_dim: Vec::new(),
        faces: HashMap::new(),
        next: 0,
    };
    g.add_vertex();
    let mut attempts = 0;
    // a vertex, edge or square step adds at most 4 cubes
    while g.len() < target && g.len() + 4 <= max_cubes && attempts < 10 * max_cubes {
        attempts += 1;
        let roll: f64 = rng.gen();
        if cfg.max_dim == 0 || roll < 0.1 {
            g.add_vertex();
        } else if cfg.max_dim == 1 || roll < 0.45 {
            g.grow_edge(rng);
        } else if cfg.max_dim == 2 || roll < 0.85 || g.by_dim.len() < 3 {
            g.grow_square(rng);
        } else {
            let dim = rng.gen_range(1..cfg.max_dim.min(g.by_dim.len()));
            let Some(f) = g.by_dim[dim].choose(rng).cloned() else {
                continue;
            };
            if g.len() + 2 * g.closure_size(&f) > max_cubes {
                continue;
            }
            g.prism(&f, &mut HashMap::new());
        }
    }
    g.b.build()
}
