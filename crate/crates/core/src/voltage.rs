//! Integer voltage assignments and their derived covers over `Z/p^m`.
//!
//! Each base edge `{i, j}` with `i < j` carries an integer voltage `a`; the
//! reverse orientation carries `-a`. At level `m` the voltage is read modulo
//! `p^m` with representative in `[0, p^m)`. Because the same integers serve
//! every level, the covers at different levels are automatically compatible.
//!
//! Derived-graph vertex `(i, g)` has label `g * n + i`, so each sheet occupies
//! a contiguous block of `n` labels.
//!
//! Voltage file format: non-comment lines `i j a` with `{i, j}` a base edge
//! (`i < j`) and `a` an integer. Unlisted edges carry voltage zero; an edge
//! may appear at most once.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::arith::check_prime;
use crate::error::{Error, Result};
use crate::graph::{content_lines, parse_err, parse_field, Graph};
use crate::laurent::{Laurent, LaurentMatrix};

/// Default bound on the vertex count of any derived graph.
pub const DEFAULT_MAX_VERTICES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageAssignment {
    base: Graph,
    volts: BTreeMap<(usize, usize), i64>,
    prime: u64,
}

impl VoltageAssignment {
    /// Edges absent from `volts` get voltage zero. Keys may be given in
    /// either orientation; `(j, i)` with `j > i` stores `-a` on `(i, j)`.
    pub fn new(
        base: Graph,
        prime: u64,
        volts: impl IntoIterator<Item = ((usize, usize), i64)>,
    ) -> Result<Self> {
        check_prime(prime)?;
        let mut map: BTreeMap<(usize, usize), i64> = base.edges().map(|e| (e, 0)).collect();
        let mut seen = std::collections::BTreeSet::new();
        for ((i, j), a) in volts {
            if !base.has_edge(i, j) {
                return Err(Error::NotAnEdge(i, j));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            let a = if i < j {
                a
            } else {
                a.checked_neg().ok_or_else(|| {
                    Error::InvalidArgument(format!("voltage {a} cannot be negated"))
                })?
            };
            map.insert(key, a);
        }
        Ok(VoltageAssignment {
            base,
            volts: map,
            prime,
        })
    }

    /// `K_n` with voltage 1 on `{1, 2}` and 0 elsewhere.
    pub fn single_voltage_complete(n: usize, prime: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("K_n needs n >= 2, got {n}")));
        }
        Self::new(Graph::complete(n)?, prime, [((1, 2), 1)])
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Voltage on the oriented edge `i -> j`, if `{i, j}` is an edge.
    pub fn voltage(&self, i: usize, j: usize) -> Option<i64> {
        if i < j {
            self.volts.get(&(i, j)).copied()
        } else {
            self.volts.get(&(j, i)).map(|a| -a)
        }
    }

    /// Standard-orientation voltages, sorted by edge.
    pub fn voltages(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.volts.iter().map(|(&e, &a)| (e, a))
    }

    /// Voltage of `(i, j)`, `i < j`, reduced into `[0, modulus)`.
    pub fn level_voltage(&self, edge: (usize, usize), modulus: u64) -> u64 {
        let a = self.volts[&edge] as i128;
        a.rem_euclid(modulus as i128) as u64
    }

    /// Parses a voltage file against `base`.
    pub fn parse(base: Graph, prime: u64, text: &str) -> Result<Self> {
        let mut volts = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (line_no, line) in content_lines(text) {
            let mut fields = line.split_whitespace();
            let i: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
            let j: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
            let a: i64 = parse_field(fields.next(), line_no, "voltage")?;
            if fields.next().is_some() {
                return Err(parse_err(line_no, "expected 'i j voltage'"));
            }
            if i >= j {
                return Err(parse_err(line_no, &format!("edge {i} {j} must have i < j")));
            }
            if !base.has_edge(i, j) {
                return Err(parse_err(line_no, &format!("{i} {j} is not a base edge")));
            }
            if !seen.insert((i, j)) {
                return Err(parse_err(
                    line_no,
                    &format!("duplicate voltage for {i} {j}"),
                ));
            }
            volts.push(((i, j), a));
        }
        Self::new(base, prime, volts)
    }

    /// Voltage file text listing every nonzero voltage.
    pub fn to_voltage_list(&self) -> String {
        self.voltages()
            .filter(|&(_, a)| a != 0)
            .map(|((i, j), a)| format!("{i} {j} {a}\n"))
            .collect()
    }
}

/// A cover of the base graph with its sheet labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedGraph {
    pub graph: Graph,
    pub base_vertices: usize,
    /// Order of the voltage group, `p^m`.
    pub sheets: u64,
    pub level: u32,
}

impl DerivedGraph {
    pub fn vertex(&self, base_vertex: usize, sheet: u64) -> usize {
        sheet as usize * self.base_vertices + base_vertex
    }

    /// `label -> (base vertex, sheet)`.
    pub fn label(&self, v: usize) -> (usize, u64) {
        let n = self.base_vertices;
        ((v - 1) % n + 1, ((v - 1) / n) as u64)
    }

    pub fn project(&self, v: usize) -> usize {
        self.label(v).0
    }

    pub fn fiber(&self, base_vertex: usize) -> Vec<usize> {
        (0..self.sheets)
            .map(|g| self.vertex(base_vertex, g))
            .collect()
    }
}

pub(crate) fn level_vertices(n: usize, p: u64, m: u32) -> Option<u128> {
    (p as u128).checked_pow(m)?.checked_mul(n as u128)
}

pub fn derive(va: &VoltageAssignment, m: u32) -> Result<DerivedGraph> {
    derive_with_limit(va, m, DEFAULT_MAX_VERTICES)
}

/// Level-`m` derived graph, refusing covers with more than `max_vertices`.
pub fn derive_with_limit(
    va: &VoltageAssignment,
    m: u32,
    max_vertices: usize,
) -> Result<DerivedGraph> {
    let n = va.base.vertex_count();
    let guard = Error::SizeGuard {
        level: m,
        vertices: level_vertices(n, va.prime, m).unwrap_or(u128::MAX),
        limit: max_vertices,
    };
    let total = match level_vertices(n, va.prime, m) {
        Some(t) if t <= max_vertices as u128 => t as usize,
        _ => return Err(guard),
    };
    let sheets = va.prime.pow(m);
    let mut edges = Vec::with_capacity(va.base.edge_count() * sheets as usize);
    for ((i, j), _) in va.voltages() {
        let a = va.level_voltage((i, j), sheets);
        for g in 0..sheets {
            let h = (g + a) % sheets;
            edges.push((g as usize * n + i, h as usize * n + j));
        }
    }
    let graph = Graph::new(total, edges)?;
    Ok(DerivedGraph {
        graph,
        base_vertices: n,
        sheets,
        level: m,
    })
}

/// The level-`k` quotient of the level-`m` cover: voltages reduced modulo
/// the subgroup `p^k Z / p^m Z`, which is the level-`k` derived graph.
pub fn intermediate_cover(va: &VoltageAssignment, m: u32, k: u32) -> Result<DerivedGraph> {
    intermediate_cover_with_limit(va, m, k, DEFAULT_MAX_VERTICES)
}

pub fn intermediate_cover_with_limit(
    va: &VoltageAssignment,
    m: u32,
    k: u32,
    max_vertices: usize,
) -> Result<DerivedGraph> {
    if k > m {
        return Err(Error::SublevelTooLarge { k, m });
    }
    let n = va.base.vertex_count();
    let modulus = va.prime.checked_pow(m).ok_or(Error::SizeGuard {
        level: m,
        vertices: u128::MAX,
        limit: max_vertices,
    })?;
    let sub = va.prime.pow(k);
    let total = n * sub as usize;
    if total > max_vertices {
        return Err(Error::SizeGuard {
            level: k,
            vertices: total as u128,
            limit: max_vertices,
        });
    }
    let mut edges = Vec::new();
    for ((i, j), _) in va.voltages() {
        // reduce the level-m voltage, then reduce again modulo the subgroup
        let a = va.level_voltage((i, j), modulus) % sub;
        for g in 0..sub {
            edges.push((g as usize * n + i, ((g + a) % sub) as usize * n + j));
        }
    }
    Ok(DerivedGraph {
        graph: Graph::new(total, edges)?,
        base_vertices: n,
        sheets: sub,
        level: k,
    })
}

/// Deck transformation `(i, h) -> (i, h + g)` as a map `label - 1 -> label`.
pub fn galois_action(d: &DerivedGraph, g: u64) -> Vec<usize> {
    let shift = g % d.sheets;
    (1..=d.graph.vertex_count())
        .map(|v| {
            let (i, h) = d.label(v);
            d.vertex(i, (h + shift) % d.sheets)
        })
        .collect()
}

/// Whether `perm` (`label - 1 -> label`) maps edges onto edges.
pub fn is_automorphism(g: &Graph, perm: &[usize]) -> bool {
    perm.len() == g.vertex_count() && g.edges().all(|(a, b)| g.has_edge(perm[a - 1], perm[b - 1]))
}

/// Voltage Laplacian over the group ring: `deg(i)` on the diagonal,
/// `-x^{a}` at `(i, j)` for each edge oriented `i -> j` with voltage `a`.
pub fn voltage_laplacian(va: &VoltageAssignment) -> LaurentMatrix {
    let n = va.base.vertex_count();
    let mut m = vec![vec![Laurent::zero(); n]; n];
    for (i, d) in va.base.degrees().into_iter().enumerate() {
        m[i][i] = Laurent::constant(d as i64);
    }
    for ((i, j), a) in va.voltages() {
        m[i - 1][j - 1] = Laurent::monomial(BigInt::from(-1), a);
        m[j - 1][i - 1] = Laurent::monomial(BigInt::from(-1), -a);
    }
    LaurentMatrix::new(m)
}
