#![allow(dead_code)]

use causal_power::{ChengModel, ModelSpec, Scope};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Shape {
    pub max_vars: usize,
    pub max_edges: usize,
    pub preventers: bool,
    /// Chance that a facilitating edge gets q = 1.
    pub sure_edge: f64,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        max_vars: 6,
        max_edges: 8,
        preventers: true,
        sure_edge: 0.1,
    };
    pub const MEDIUM: Shape = Shape {
        max_vars: 8,
        max_edges: 12,
        preventers: true,
        sure_edge: 0.1,
    };
    pub const FACILITATING: Shape = Shape {
        max_vars: 6,
        max_edges: 10,
        preventers: false,
        sure_edge: 0.0,
    };
}

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn prob(&mut self) -> f64 {
        0.05 + 0.9 * self.unit()
    }
}

pub fn name(i: usize) -> String {
    format!("V{i}")
}

/// A random valid model whose variables `V0..Vn` are already in topological order.
pub fn random_model(seed: u64, shape: &Shape) -> ChengModel {
    let mut g = Gen::new(seed);
    let n = 2 + g.below(shape.max_vars - 1);
    let mut spec = ModelSpec::new();
    let mut edges = 0;
    for i in 0..n {
        let mut parents = Vec::new();
        for j in 0..i {
            if edges < shape.max_edges && g.chance(0.45) {
                parents.push(j);
                edges += 1;
            }
        }
        let base = parents.is_empty().then(|| g.prob());
        spec = if g.chance(0.75) {
            spec.observed(&name(i), base)
        } else {
            spec.unobserved(&name(i), base)
        };
        for &j in &parents {
            let q = if g.chance(shape.sure_edge) { 1.0 } else { g.prob() };
            spec = spec.fac(&name(j), &name(i), q);
        }
        if !shape.preventers || parents.is_empty() {
            continue;
        }
        for j in 0..i {
            if parents.contains(&j) || edges >= shape.max_edges || !g.chance(0.3) {
                continue;
            }
            let scope = if g.chance(0.5) {
                Scope::All
            } else {
                let mut covered: Vec<_> = parents
                    .iter()
                    .filter(|_| g.chance(0.5))
                    .map(|&p| causal_power::EdgeId::new(name(p), name(i)))
                    .collect();
                if covered.is_empty() {
                    covered.push(causal_power::EdgeId::new(name(parents[0]), name(i)));
                }
                Scope::Edges(covered)
            };
            let q = g.prob();
            spec = spec.prev(&name(j), &name(i), q, scope);
            edges += 1;
        }
    }
    spec.build().expect("generated model is valid")
}
