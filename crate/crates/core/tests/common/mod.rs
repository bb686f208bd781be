#![allow(dead_code)]

use iwg_core::voltage::is_automorphism;
use iwg_core::{
    derive, galois_action, intermediate_cover, DerivedGraph, Graph, Laurent, LaurentMatrix,
    VoltageAssignment,
};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Leibniz expansion over the Laurent ring; independent of the Bareiss path.
pub fn permutation_determinant(m: &LaurentMatrix) -> Laurent {
    let n = m.size();
    let mut total = Laurent::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &LaurentMatrix, total: &mut Laurent) {
    let n = perm.len();
    if k == n {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut term = Laurent::one();
        for (i, &j) in perm.iter().enumerate() {
            term = &term * m.get(i, j);
            if term.is_zero() {
                return;
            }
        }
        *total = if inversions % 2 == 0 {
            &*total + &term
        } else {
            &*total - &term
        };
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

/// Uniform-ish random connected simple graph on `n` vertices: a random
/// spanning tree plus each remaining pair with probability `density`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push((parent.min(order[k]), parent.max(order[k])));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if !edges.contains(&(i, j)) && rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("simple by construction")
}

pub fn random_voltages(rng: &mut ChaCha8Rng, g: &Graph, p: u64, range: i64) -> VoltageAssignment {
    let volts: Vec<((usize, usize), i64)> = g
        .edges()
        .map(|e| (e, rng.gen_range(-range..=range)))
        .collect();
    VoltageAssignment::new(g.clone(), p, volts).expect("valid voltages")
}

/// Checks every structural property of a derived graph; returns a
/// description of the first violation.
pub fn check_derived_structure(va: &VoltageAssignment, d: &DerivedGraph) -> Result<(), String> {
    let base = va.base();
    let n = base.vertex_count();
    let sheets = d.sheets as usize;
    if d.graph.vertex_count() != n * sheets {
        return Err(format!(
            "vertex count {} != {n} * {sheets}",
            d.graph.vertex_count()
        ));
    }
    for i in 1..=n {
        let fiber = d.fiber(i);
        if fiber.len() != sheets || fiber.iter().any(|&v| d.project(v) != i) {
            return Err(format!("fiber over {i} malformed"));
        }
    }
    for (a, b) in d.graph.edges() {
        if d.project(a) == d.project(b) {
            return Err(format!("intra-fiber edge {a}-{b}"));
        }
        if !base.has_edge(d.project(a), d.project(b)) {
            return Err(format!("edge {a}-{b} does not project to a base edge"));
        }
    }
    let base_deg = base.degrees();
    for (v, deg) in d.graph.degrees().into_iter().enumerate() {
        if deg != base_deg[d.project(v + 1) - 1] {
            return Err(format!("degree of {} is {deg}", v + 1));
        }
    }
    // deck transformations: all automorphisms commuting with projection,
    // pairwise distinct, and a homomorphic image of Z/p^m generated by 1
    let generator = galois_action(d, 1);
    let mut power: Vec<usize> = (1..=d.graph.vertex_count()).collect();
    let mut seen = std::collections::HashSet::new();
    for g in 0..d.sheets {
        let action = galois_action(d, g);
        if action != power {
            return Err(format!("action({g}) is not the {g}-th power of action(1)"));
        }
        if !is_automorphism(&d.graph, &action) {
            return Err(format!("action({g}) is not an automorphism"));
        }
        if action
            .iter()
            .enumerate()
            .any(|(v, &w)| d.project(v + 1) != d.project(w))
        {
            return Err(format!("action({g}) does not commute with projection"));
        }
        if !seen.insert(action) {
            return Err(format!(
                "action({g}) repeats an earlier deck transformation"
            ));
        }
        power = power.iter().map(|&v| generator[v - 1]).collect();
    }
    if power != (1..=d.graph.vertex_count()).collect::<Vec<_>>() {
        return Err("action(1) does not have order p^m".into());
    }
    // intermediate covers: the quotient by p^k Z/p^m Z is the level-k cover,
    // and (i, g) -> (i, g mod p^k) maps edges onto its edges
    for k in 0..=d.level {
        let lower = intermediate_cover(va, d.level, k).map_err(|e| e.to_string())?;
        let direct = derive(va, k).map_err(|e| e.to_string())?;
        if lower != direct {
            return Err(format!(
                "intermediate cover {k} of level {} differs from level {k}",
                d.level
            ));
        }
        for (a, b) in d.graph.edges() {
            let down = |v: usize| {
                let (i, g) = d.label(v);
                lower.vertex(i, g % lower.sheets)
            };
            if !lower.graph.has_edge(down(a), down(b)) {
                return Err(format!("edge {a}-{b} does not descend to level {k}"));
            }
        }
    }
    Ok(())
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}
