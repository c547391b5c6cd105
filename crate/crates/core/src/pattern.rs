//! Small target graphs `H` and the combinatorics of their edge subsets.
//!
//! A subgraph `Γ ⊆ H` is always a nonempty subset of `E(H)`; its vertex set
//! is the set of endpoints, so `Γ` never has isolated vertices.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{iter_bits, Graph};

/// Upper limit on pattern vertices for the bitmask-based routines.
pub const MAX_PATTERN_VERTICES: usize = 24;
/// Upper limit on pattern edges for routines that sum over all edge subsets.
pub const MAX_PATTERN_EDGES: usize = 24;

/// Names accepted by [`SubgraphPattern::named`].
pub const PATTERN_NAMES: &[&str] = &["k2", "k3", "k4", "c4", "c5", "path2", "path3"];

#[derive(Clone, PartialEq, Eq)]
pub struct SubgraphPattern {
    graph: Graph,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
}

impl SubgraphPattern {
    pub fn from_graph(graph: Graph) -> Self {
        let edges = graph.edges().collect();
        SubgraphPattern { graph, edges, name: None }
    }

    /// Library pattern: `k2` (single edge), `k3`, `k4`, `c4`, `c5`, and
    /// `path2` / `path3` (paths with two and three edges).
    pub fn named(name: &str) -> Result<Self> {
        let graph = match name {
            "k2" => Graph::complete(2),
            "k3" => Graph::complete(3),
            "k4" => Graph::complete(4),
            "c4" => Graph::cycle(4),
            "c5" => Graph::cycle(5),
            "path2" => Graph::path(2),
            "path3" => Graph::path(3),
            _ => {
                return Err(Error::invalid(format!(
                    "unknown pattern {name:?}; available: {}",
                    PATTERN_NAMES.join(", ")
                )))
            }
        };
        let mut p = Self::from_graph(graph);
        p.name = Some(name.to_string());
        Ok(p)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn check_vertex_budget(&self) -> Result<()> {
        if self.vertex_count() > MAX_PATTERN_VERTICES {
            return Err(Error::budget(format!(
                "pattern has {} vertices; at most {MAX_PATTERN_VERTICES} are supported",
                self.vertex_count()
            )));
        }
        Ok(())
    }

    /// Vertex mask and edge count of the edge subset selected by `mask`.
    pub(crate) fn subset_shape(&self, mask: u64) -> (u64, usize) {
        let mut vertices = 0u64;
        for i in iter_bits(&[mask]) {
            let (u, v) = self.edges[i];
            vertices |= (1 << u) | (1 << v);
        }
        (vertices, mask.count_ones() as usize)
    }

    /// Edge cover number of the edge subset selected by `mask`: the fewest
    /// of its edges whose endpoints cover all of its endpoints.
    pub(crate) fn subset_edge_cover(&self, mask: u64) -> usize {
        let mut adj = [0u64; MAX_PATTERN_VERTICES];
        let mut vertices = 0u64;
        for i in iter_bits(&[mask]) {
            let (u, v) = self.edges[i];
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            vertices |= (1 << u) | (1 << v);
        }
        // Gallai: without isolated vertices, cover = |V| - maximum matching.
        vertices.count_ones() as usize - max_matching(&adj, vertices)
    }

    /// Edge cover number of `H` itself, over the endpoints of its edges.
    pub fn edge_cover_number(&self) -> Result<usize> {
        if self.edges.is_empty() {
            return Err(Error::invalid("edge cover number of an edgeless pattern is undefined"));
        }
        self.check_vertex_budget()?;
        if self.edge_count() > 64 {
            return Err(Error::budget("pattern has more than 64 edges"));
        }
        let all = if self.edge_count() == 64 { u64::MAX } else { (1u64 << self.edge_count()) - 1 };
        Ok(self.subset_edge_cover(all))
    }

    /// `m(H)`: the maximum of `|E(Γ)| / |V(Γ)|` over nonempty edge subsets,
    /// with an edge subset attaining it.
    ///
    /// The maximum is attained by the edges induced on some vertex subset,
    /// so the search runs over vertex subsets rather than edge subsets.
    pub fn max_subgraph_density(&self) -> Result<Density> {
        if self.edges.is_empty() {
            return Err(Error::invalid("max subgraph density of an edgeless pattern is undefined"));
        }
        self.check_vertex_budget()?;
        let k = self.vertex_count();
        let mut adj = vec![0u64; k];
        for &(u, v) in &self.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        // Induced edge counts by adding the highest vertex of each mask.
        let mut induced = vec![0u32; 1 << k];
        let mut best = (0usize, 1usize, 0u64);
        for mask in 1u64..(1 << k) {
            let top = 63 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            let e = induced[rest as usize] + (adj[top] & rest).count_ones();
            induced[mask as usize] = e;
            let (e, size) = (e as usize, mask.count_ones() as usize);
            // e / size > best.0 / best.1
            if e > 0 && e * best.1 > best.0 * size {
                best = (e, size, mask);
            }
        }
        let (e, size, mask) = best;
        let witness = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .collect();
        Ok(Density {
            value: Ratio::new(e as u64, size as u64),
            witness,
        })
    }
}

/// Maximum matching size among `alive` vertices.
fn max_matching(adj: &[u64], alive: u64) -> usize {
    let Some(v) = iter_bits(&[alive]).find(|&v| adj[v] & alive != 0) else {
        return 0;
    };
    let rest = alive & !(1 << v);
    let mut best = max_matching(adj, rest);
    for w in iter_bits(&[adj[v] & rest]) {
        best = best.max(1 + max_matching(adj, rest & !(1 << w)));
    }
    best
}

/// The value of `m(H)` and an edge subset attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Density {
    pub value: Ratio<u64>,
    pub witness: Vec<(usize, usize)>,
}

/// Whether `g` has a (not necessarily induced) subgraph isomorphic to `h`.
///
/// Backtracking over injective maps of the non-isolated vertices of `h`,
/// with candidates drawn from the common neighbourhood of already-mapped
/// neighbours. Isolated pattern vertices only need `|V(H)| <= n`.
pub fn contains_subgraph(g: &Graph, h: &SubgraphPattern) -> bool {
    let n = g.vertex_count();
    let hg = h.graph();
    if hg.vertex_count() > n {
        return false;
    }
    if h.edge_count() == 0 {
        return true;
    }
    let order = embedding_order(hg);
    let hdeg: Vec<usize> = hg.degree_sequence();
    let gdeg: Vec<usize> = g.degree_sequence();
    // For each position, the earlier positions holding its neighbours.
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &x)| (0..i).filter(|&j| hg.has_edge(order[j], x)).collect())
        .collect();
    let words = n.div_ceil(64);
    let mut used = vec![0u64; words];
    let mut image = vec![0usize; order.len()];
    extend(g, &order, &back, &hdeg, &gdeg, &mut used, &mut image, 0)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    order: &[usize],
    back: &[Vec<usize>],
    hdeg: &[usize],
    gdeg: &[usize],
    used: &mut [u64],
    image: &mut [usize],
    pos: usize,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let n = g.vertex_count();
    let mut cand: Vec<u64> = match back[pos].first() {
        Some(&j) => g.row(image[j]).to_vec(),
        None => {
            let mut all = vec![u64::MAX; n.div_ceil(64)];
            if !n.is_multiple_of(64) {
                *all.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
            }
            all
        }
    };
    for &j in back[pos].iter().skip(1) {
        for (c, r) in cand.iter_mut().zip(g.row(image[j])) {
            *c &= r;
        }
    }
    for (c, u) in cand.iter_mut().zip(used.iter()) {
        *c &= !u;
    }
    let need = hdeg[order[pos]];
    let candidates: Vec<usize> = iter_bits(&cand).filter(|&v| gdeg[v] >= need).collect();
    for v in candidates {
        used[v / 64] |= 1 << (v % 64);
        image[pos] = v;
        if extend(g, order, back, hdeg, gdeg, used, image, pos + 1) {
            return true;
        }
        used[v / 64] &= !(1 << (v % 64));
    }
    false
}

/// Non-isolated pattern vertices, each next vertex chosen to have the most
/// already-placed neighbours (ties: higher degree, then lower label).
fn embedding_order(h: &Graph) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..h.vertex_count()).filter(|&v| h.degree(v) > 0).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(_, &v)| {
                let placed = order.iter().filter(|&&u| h.has_edge(u, v)).count();
                (placed, h.degree(v), std::cmp::Reverse(v))
            })
            .unwrap();
        order.push(remaining.swap_remove(idx));
    }
    order
}

impl fmt::Debug for SubgraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgraphPattern({self})")
    }
}

/// Library name, or the inline form `u-v,u-v,...`.
impl fmt::Display for SubgraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            return f.write_str(name);
        }
        let parts: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SubgraphPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if PATTERN_NAMES.contains(&s) {
            return Self::named(s);
        }
        if !s.contains('-') {
            return Self::named(s);
        }
        let mut edges = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .trim()
                .split_once('-')
                .ok_or_else(|| Error::parse(format!("bad pattern edge {part:?}")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(format!("bad pattern vertex {x:?}")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        Ok(Self::from_graph(Graph::from_edges(n, &edges)?))
    }
}

impl Serialize for SubgraphPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubgraphPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
