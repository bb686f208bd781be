//! Simple undirected graphs on vertices `1..=n`, divisors, and the edge-list
//! text format.
//!
//! The text format is line oriented: the first non-comment line holds the
//! vertex count `n`, every further non-comment line holds one edge `i j` with
//! `1 <= i < j <= n`. A `#` starts a comment that runs to the end of the line.
//! Duplicate edges are rejected.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A simple graph: no loops, no multi-edges, vertex labels exactly `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalizing every edge to `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::InvalidVertex { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::Loop(a));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Graph { n, edges: set })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cycle needs n >= 3, got {n}"
            )));
        }
        Self::new(n, (1..=n).map(|i| (i, i % n + 1)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i, i + 1)))
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in the standard orientation `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::InvalidVertex {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Degrees indexed by `label - 1`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a - 1] += 1;
            deg[b - 1] += 1;
        }
        deg
    }

    /// Sorted neighbour lists indexed by `label - 1`.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a - 1].push(b);
            adj[b - 1].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components as sorted label lists, ordered by smallest label.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 1..=self.n {
            if seen[start - 1] {
                continue;
            }
            seen[start - 1] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v - 1] {
                    if !seen[w - 1] {
                        seen[w - 1] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Applies a relabeling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(
            self.n,
            self.edges.iter().map(|&(a, b)| (perm[a - 1], perm[b - 1])),
        )
    }

    /// Serializes to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (a, b) in self.edges() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    /// Parses the edge-list text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line_no, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing vertex count".into(),
        })?;
        let mut fields = first.split_whitespace();
        let n: usize = parse_field(fields.next(), line_no, "vertex count")?;
        if fields.next().is_some() {
            return Err(parse_err(line_no, "expected a single vertex count"));
        }
        if n == 0 {
            return Err(parse_err(line_no, "vertex count must be positive"));
        }
        let mut edges = BTreeSet::new();
        for (line_no, line) in lines {
            let mut fields = line.split_whitespace();
            let i: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
            let j: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
            if fields.next().is_some() {
                return Err(parse_err(line_no, "expected exactly two endpoints"));
            }
            if !(1 <= i && i < j && j <= n) {
                return Err(parse_err(
                    line_no,
                    &format!("edge {i} {j} must satisfy 1 <= i < j <= {n}"),
                ));
            }
            if !edges.insert((i, j)) {
                return Err(parse_err(line_no, &format!("duplicate edge {i} {j}")));
            }
        }
        Ok(Graph { n, edges })
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Graph::parse(s)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

pub(crate) fn parse_field<T: FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    let field = field.ok_or_else(|| parse_err(line, &format!("missing {what}")))?;
    field
        .parse()
        .map_err(|_| parse_err(line, &format!("invalid {what} '{field}'")))
}

/// A finitely supported integer combination of vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Divisor {
    coefficients: BTreeMap<usize, BigInt>,
}

impl Divisor {
    pub fn new(coefficients: impl IntoIterator<Item = (usize, BigInt)>) -> Self {
        let mut d = Divisor::default();
        for (v, c) in coefficients {
            d.add(v, c);
        }
        d
    }

    pub fn add(&mut self, vertex: usize, c: BigInt) {
        let entry = self.coefficients.entry(vertex).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&vertex);
        }
    }

    pub fn coefficient(&self, vertex: usize) -> BigInt {
        self.coefficients.get(&vertex).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> BigInt {
        self.coefficients.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coefficients.iter().map(|(&v, c)| (v, c))
    }

    /// The principal divisor of `f`: at each vertex `v`, the sum over
    /// neighbours `w` of `f(v) - f(w)`. `f` is indexed by `label - 1`.
    pub fn principal(g: &Graph, f: &[BigInt]) -> Result<Self> {
        if f.len() != g.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "function has {} values for {} vertices",
                f.len(),
                g.vertex_count()
            )));
        }
        let mut d = Divisor::default();
        for (a, b) in g.edges() {
            let diff = &f[a - 1] - &f[b - 1];
            d.add(b, -diff.clone());
            d.add(a, diff);
        }
        Ok(d)
    }
}
