//! Undirected simple graphs stored as one adjacency bitset per vertex.
//!
//! Rows are packed into a single `Vec<u64>`; row `v` occupies
//! `words_per_row` consecutive words. Bit `u` of row `v` is set iff `{u, v}`
//! is an edge. The adjacency is kept symmetric and loop-free by every
//! mutator, so callers never see a half-inserted edge.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Number of 64-bit words needed to hold `n` bits.
#[inline]
pub(crate) const fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A set of vertices of a graph on `n` vertices, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            let hi = (lo + 64).min(n);
            *w = if hi - lo == 64 { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
        }
        s
    }

    pub fn from_vertices(n: usize, vertices: &[usize]) -> Result<Self> {
        let mut s = Self::empty(n);
        for &v in vertices {
            if v >= n {
                return Err(Error::invalid(format!("vertex {v} out of range for n = {n}")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Set whose members are the bits of `mask` (vertices `0..min(n, 64)`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        if n > 0 {
            let keep = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn intersect_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= !b;
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterate the set bit positions of a word slice in increasing order.
pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

#[inline]
pub(crate) fn popcount_and(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Canonical index of an unordered vertex pair.
///
/// Pairs `{u, v}` with `u < v` are ordered colexicographically on `(v, u)`,
/// which gives `index = v(v-1)/2 + u`. The index does not depend on the
/// vertex count, so a graph's edges keep their indices when vertices are
/// appended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIndex(pub u64);

impl EdgeIndex {
    #[inline]
    pub fn from_pair(u: usize, v: usize) -> Self {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        debug_assert!(u != v);
        EdgeIndex((v as u64) * (v as u64 - 1) / 2 + u as u64)
    }

    /// Endpoints `(u, v)` with `u < v`.
    pub fn endpoints(self) -> (usize, usize) {
        let k = self.0;
        // v is the largest integer with v(v-1)/2 <= k.
        let mut v = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as u64;
        while v * (v - 1) / 2 > k {
            v -= 1;
        }
        while (v + 1) * v / 2 <= k {
            v += 1;
        }
        let u = k - v * (v - 1) / 2;
        (u as usize, v as usize)
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Number of potential edges `n(n-1)/2`.
#[inline]
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Checked canonical index of `{u, v}` in a graph on `n` vertices.
pub fn edge_index(u: usize, v: usize, n: usize) -> Result<EdgeIndex> {
    if u >= n || v >= n {
        return Err(Error::invalid(format!("pair ({u}, {v}) out of range for n = {n}")));
    }
    if u == v {
        return Err(Error::invalid(format!("self-pair ({u}, {u}) has no edge index")));
    }
    Ok(EdgeIndex::from_pair(u, v))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n >= 1` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "a graph needs at least one vertex");
        let words_per_row = words_for(n);
        Graph {
            n,
            words_per_row,
            rows: vec![0; n * words_per_row],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 0..n {
            for u in 0..v {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Build from an edge list, rejecting loops and out-of-range endpoints.
    /// Repeated edges are collapsed.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            edge_index(u, v, n)?;
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`, `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Self::empty(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n);
        }
        g
    }

    /// Path with `edges` edges on `edges + 1` vertices.
    pub fn path(edges: usize) -> Self {
        let mut g = Self::empty(edges + 1);
        for v in 0..edges {
            g.add_edge(v, v + 1);
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        let start = v * self.words_per_row;
        &self.rows[start..start + self.words_per_row]
    }

    /// Insert `{u, v}`. Panics on a loop or an out-of-range vertex.
    #[inline]
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        let w = self.words_per_row;
        self.rows[u * w + v / 64] |= 1u64 << (v % 64);
        self.rows[v * w + u / 64] |= 1u64 << (u % 64);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n);
        let w = self.words_per_row;
        self.rows[u * w + v / 64] &= !(1u64 << (v % 64));
        self.rows[v * w + u / 64] &= !(1u64 << (u % 64));
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Remove every edge, keeping the vertex count.
    pub fn clear(&mut self) {
        self.rows.fill(0);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    /// Edges `(u, v)` with `u < v`, sorted by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// `e(A, B)`: ordered pairs `(a, b)` with `a in A`, `b in B` and `ab` an
    /// edge. An edge inside `A ∩ B` is therefore counted twice.
    pub fn count_edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        debug_assert_eq!(a.universe(), self.n);
        debug_assert_eq!(b.universe(), self.n);
        a.iter().map(|u| popcount_and(self.row(u), b.words())).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn component_count(&self) -> usize {
        let mut unseen = VertexSet::full(self.n);
        let mut frontier = VertexSet::empty(self.n);
        let mut components = 0;
        while let Some(root) = unseen.first() {
            components += 1;
            unseen.remove(root);
            frontier.words.fill(0);
            frontier.insert(root);
            while let Some(v) = frontier.first() {
                frontier.remove(v);
                // Unvisited neighbors of v join the frontier.
                for (i, (f, u)) in frontier.words.iter_mut().zip(unseen.words.iter_mut()).enumerate() {
                    let fresh = self.rows[v * self.words_per_row + i] & *u;
                    *f |= fresh;
                    *u &= !fresh;
                }
            }
        }
        components
    }

    pub fn has_isolated_vertex(&self) -> bool {
        (0..self.n).any(|v| self.row(v).iter().all(|&w| w == 0))
    }

    pub fn isolated_vertex_count(&self) -> usize {
        (0..self.n).filter(|&v| self.row(v).iter().all(|&w| w == 0)).count()
    }

    /// Common neighbourhood of all vertices in `s` (the whole vertex set
    /// when `s` is empty).
    pub fn common_neighbors(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::full(self.n);
        for v in s.iter() {
            out.intersect_with(self.row(v));
        }
        out
    }

    /// Write the edge-list text format: a header `n <count>` followed by one
    /// `u v` line per edge (`u < v`, sorted).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Parse the edge-list text format. Blank lines and lines starting with
    /// `#` are ignored.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (first, second) = (parts.next(), parts.next());
            if parts.next().is_some() {
                return Err(Error::parse(format!("line {}: expected two fields", lineno + 1)));
            }
            match (&mut graph, first, second) {
                (None, Some("n"), Some(count)) => {
                    let n: usize = count
                        .parse()
                        .map_err(|_| Error::parse(format!("line {}: bad vertex count {count:?}", lineno + 1)))?;
                    if n == 0 {
                        return Err(Error::parse("vertex count must be positive"));
                    }
                    graph = Some(Graph::empty(n));
                }
                (None, _, _) => {
                    return Err(Error::parse("edge list must start with a header line `n <count>`"));
                }
                (Some(g), Some(a), Some(b)) => {
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| Error::parse(format!("line {}: bad vertex {s:?}", lineno + 1)))
                    };
                    let (u, v) = (parse(a)?, parse(b)?);
                    edge_index(u, v, g.n).map_err(|e| Error::parse(format!("line {}: {e}", lineno + 1)))?;
                    g.add_edge(u, v);
                }
                (Some(_), _, _) => {
                    return Err(Error::parse(format!("line {}: expected `u v`", lineno + 1)));
                }
            }
        }
        graph.ok_or_else(|| Error::parse("empty edge list"))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}
