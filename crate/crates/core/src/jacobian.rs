//! Laplacians, spanning-tree counts and Jacobian invariant factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{check_prime, valuation};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::IntegerMatrix;
use crate::par::Execution;
use crate::snf::{smith_normal_form_with, SnfOptions};

/// Largest edge count `brute_force_tree_count` will enumerate.
pub const BRUTE_FORCE_EDGE_LIMIT: usize = 25;

/// Invariant factor decomposition `Z/f_1 + ... + Z/f_k + Z^r` of a Jacobian.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantFactors {
    #[serde(serialize_with = "crate::laurent::ser_bigints")]
    pub factors: Vec<BigInt>,
    pub rank_of_free_part: usize,
}

impl InvariantFactors {
    /// Group order; `None` when the free part is nontrivial.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank_of_free_part == 0).then(|| self.factors.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.rank_of_free_part == 0
    }

    /// `Z/3 x Z/12`-style rendering; `0` for the trivial group.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.factors.iter().map(|f| format!("Z/{f}")).collect();
        match self.rank_of_free_part {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" x ")
        }
    }
}

/// Sylow p-subgroup data extracted from invariant factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PSylow {
    pub order_exponent: u64,
    pub p_rank: usize,
    #[serde(serialize_with = "crate::laurent::ser_bigints")]
    pub p_part_factors: Vec<BigInt>,
}

pub fn laplacian(g: &Graph) -> IntegerMatrix {
    let n = g.vertex_count();
    let mut l = IntegerMatrix::zeros(n, n);
    for (a, b) in g.edges() {
        let (i, j) = (a - 1, b - 1);
        l[(i, i)] += 1;
        l[(j, j)] += 1;
        l[(i, j)] -= 1;
        l[(j, i)] -= 1;
    }
    l
}

pub fn reduced_laplacian(g: &Graph, removed: usize) -> Result<IntegerMatrix> {
    g.check_vertex(removed)?;
    Ok(laplacian(g).principal_minor_without(removed - 1))
}

pub fn is_connected(g: &Graph) -> bool {
    g.components().len() == 1
}

/// Jacobian as the cokernel of the reduced Laplacian at vertex 1.
pub fn jacobian(g: &Graph) -> Result<InvariantFactors> {
    jacobian_with(g, 1, Execution::default())
}

pub fn jacobian_with_removed(g: &Graph, removed: usize) -> Result<InvariantFactors> {
    jacobian_with(g, removed, Execution::default())
}

pub fn jacobian_with(g: &Graph, removed: usize, execution: Execution) -> Result<InvariantFactors> {
    g.check_vertex(removed)?;
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let reduced = reduced_laplacian(g, removed)?;
    let snf = smith_normal_form_with(
        &reduced,
        SnfOptions {
            execution,
            ..Default::default()
        },
    );
    // A connected graph has a nonsingular reduced Laplacian.
    debug_assert_eq!(snf.rank(), reduced.rows());
    Ok(InvariantFactors {
        factors: snf.nontrivial_factors(),
        rank_of_free_part: 0,
    })
}

/// Determinant of the reduced Laplacian at vertex 1; zero when disconnected.
pub fn spanning_tree_count(g: &Graph) -> BigInt {
    if !is_connected(g) {
        return BigInt::zero();
    }
    laplacian(g)
        .principal_minor_without(0)
        .determinant()
        .expect("square")
}

/// Counts spanning trees by enumerating all `(n - 1)`-edge subsets.
pub fn brute_force_tree_count(g: &Graph) -> Result<BigInt> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.len() > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::EnumerationGuard {
            edges: edges.len(),
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    let n = g.vertex_count();
    let k = n - 1;
    if k > edges.len() {
        return Ok(BigInt::zero());
    }
    let mut count: u64 = 0;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        if is_forest(n, pick.iter().map(|&e| edges[e])) {
            count += 1;
        }
        // next k-combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| pick[i] != i + edges.len() - k) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
    Ok(BigInt::from(count))
}

/// `n - 1` acyclic edges on `n` vertices form a spanning tree.
fn is_forest(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

pub fn p_sylow(f: &InvariantFactors, p: u64) -> Result<PSylow> {
    check_prime(p)?;
    let pb = BigInt::from(p);
    let mut order_exponent = 0u64;
    let mut p_part_factors = Vec::new();
    for factor in &f.factors {
        let v = valuation(factor, p).unwrap_or(0);
        if v > 0 {
            order_exponent += u64::from(v);
            p_part_factors.push(num_traits::pow(pb.clone(), v as usize));
        }
    }
    Ok(PSylow {
        order_exponent,
        p_rank: p_part_factors.len(),
        p_part_factors,
    })
}

/// Distinct prime divisors of `x` by trial division; for test-sized values.
pub fn prime_divisors(x: &BigInt) -> Vec<u64> {
    let mut x = x.clone();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= x {
        let db = BigInt::from(d);
        if x.is_multiple_of(&db) {
            out.push(d);
            while x.is_multiple_of(&db) {
                x /= &db;
            }
        }
        d += 1;
    }
    if x > BigInt::one() {
        out.push(u64::try_from(&x).expect("remaining prime fits u64 for test-sized input"));
    }
    out
}
