//! d-dependent random graph constructions.
//!
//! Every model is a list of latent variables, each controlling a disjoint
//! block of potential edges:
//!
//! * a **coin** is one Bernoulli(p) draw that switches its whole block on or
//!   off together;
//! * a **choice** keeps a uniformly random `a`-subset of its `m` edges.
//!
//! Every potential edge belongs to exactly one latent, so edges in different
//! blocks are independent and the dependency graph is a disjoint union of
//! cliques, one per block. A model's declared `d` is at least the largest
//! block size minus one.
//!
//! Latents are drawn in declaration order from a single ChaCha8 stream
//! seeded by the caller, which makes a sample a pure function of
//! `(model, seed)`.

use std::ops::Range;

use rand::distr::{Bernoulli, Distribution};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::dependency::DependencySpec;
use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgeIndex, Graph};
use crate::probability::Probability;
use crate::seed::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    ErdosRenyi,
    CorrelatedStar,
    ConnectivityGadget,
    EdgeBlockExact,
    CustomBlocks,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::ErdosRenyi => "erdos-renyi",
            ModelKind::CorrelatedStar => "correlated-star",
            ModelKind::ConnectivityGadget => "connectivity-gadget",
            ModelKind::EdgeBlockExact => "edge-block-exact",
            ModelKind::CustomBlocks => "custom-blocks",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a latent variable acts on its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Latent {
    /// One Bernoulli(p) coin for the whole block.
    Coin,
    /// A uniform `keep`-subset of the block.
    Choice { keep: u32 },
}

/// One latent variable and the edges it controls.
#[derive(Clone, Copy, Debug)]
pub struct LatentView<'a> {
    pub latent: Latent,
    pub edges: &'a [(u32, u32)],
}

impl LatentView<'_> {
    /// Number of equally likely outcomes of a choice latent, or 2 for a coin.
    pub fn outcome_count(&self) -> u64 {
        match self.latent {
            Latent::Coin => 2,
            Latent::Choice { keep } => binomial(self.edges.len() as u64, keep as u64),
        }
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// A realized latent variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatentValue {
    Coin(bool),
    /// Sorted positions (within the block) of the kept edges.
    Choice(Vec<u32>),
}

/// A sampled graph together with the latent assignment that produced it.
#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub graph: Graph,
    pub latent_state: Vec<LatentValue>,
}

/// Summary of a model's vertex and edge partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Layout {
    /// One coin per edge.
    Independent { edges: u64 },
    /// `S = {0, .., star_size - 1}`; each outside vertex has one coin for
    /// all of its edges into `S`; the rest is independent.
    Star { star_size: usize },
    /// `A = {0, .., a_size - 1}` split into groups of `group_size`,
    /// `B = {a_size, .., n - 1}` split into blocks of `block_size`; trailing
    /// groups and blocks may be smaller.
    Gadget {
        a_size: usize,
        group_size: usize,
        group_count: usize,
        block_size: usize,
        block_count: usize,
    },
    /// Consecutive canonical edge indices in blocks of `block_size`.
    EdgeBlocks { block_size: usize, block_count: usize },
    /// Caller-provided partition.
    Custom { block_count: usize, max_block_size: usize },
}

#[derive(Clone, Debug)]
pub struct DistributionModel {
    kind: ModelKind,
    n: usize,
    p: Probability,
    d: usize,
    layout: Layout,
    coin: Bernoulli,
    latents: Vec<Latent>,
    offsets: Vec<u32>,
    pairs: Vec<(u32, u32)>,
    custom_blocks: Option<Vec<Vec<EdgeIndex>>>,
}

/// Accumulates latents and checks that the blocks partition all pairs.
struct LayoutBuilder {
    n: usize,
    latents: Vec<Latent>,
    offsets: Vec<u32>,
    pairs: Vec<(u32, u32)>,
    covered: Vec<u64>,
}

impl LayoutBuilder {
    fn new(n: usize) -> Result<Self> {
        let total = pair_count(n);
        if total > u32::MAX as u64 {
            return Err(Error::budget(format!("n = {n} has too many potential edges")));
        }
        Ok(LayoutBuilder {
            n,
            latents: Vec::new(),
            offsets: vec![0],
            pairs: Vec::with_capacity(total as usize),
            covered: vec![0; (total as usize).div_ceil(64)],
        })
    }

    fn push<I>(&mut self, latent: Latent, edges: I) -> Result<()>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let start = self.pairs.len();
        for (u, v) in edges {
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            let k = EdgeIndex::from_pair(u, v).0 as usize;
            if self.covered[k / 64] >> (k % 64) & 1 == 1 {
                return Err(Error::invalid(format!("edge {{{u}, {v}}} is assigned to two blocks")));
            }
            self.covered[k / 64] |= 1 << (k % 64);
            self.pairs.push((u as u32, v as u32));
        }
        if self.pairs.len() > start {
            self.latents.push(latent);
            self.offsets.push(self.pairs.len() as u32);
        }
        Ok(())
    }

    /// One coin for every pair not yet assigned, in canonical order.
    fn fill_independent(&mut self) {
        for v in 0..self.n {
            for u in 0..v {
                let k = EdgeIndex::from_pair(u, v).0 as usize;
                if self.covered[k / 64] >> (k % 64) & 1 == 0 {
                    self.covered[k / 64] |= 1 << (k % 64);
                    self.pairs.push((u as u32, v as u32));
                    self.latents.push(Latent::Coin);
                    self.offsets.push(self.pairs.len() as u32);
                }
            }
        }
    }

    fn is_complete(&self) -> bool {
        self.pairs.len() as u64 == pair_count(self.n)
    }
}

fn require_vertices(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("a graph needs at least one vertex"));
    }
    Ok(())
}

impl DistributionModel {
    fn assemble(
        kind: ModelKind,
        p: Probability,
        d: usize,
        layout: Layout,
        builder: LayoutBuilder,
        custom_blocks: Option<Vec<Vec<EdgeIndex>>>,
    ) -> Result<Self> {
        if !builder.is_complete() {
            return Err(Error::invalid("blocks do not cover every potential edge"));
        }
        let coin = Bernoulli::new(p.value()).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(DistributionModel {
            kind,
            n: builder.n,
            p,
            d,
            layout,
            coin,
            latents: builder.latents,
            offsets: builder.offsets,
            pairs: builder.pairs,
            custom_blocks,
        })
    }

    /// Every edge independent with probability `p` (`d = 0`).
    pub fn erdos_renyi(n: usize, p: Probability) -> Result<Self> {
        require_vertices(n)?;
        let mut b = LayoutBuilder::new(n)?;
        b.fill_independent();
        let layout = Layout::Independent { edges: pair_count(n) };
        Self::assemble(ModelKind::ErdosRenyi, p, 0, layout, b, None)
    }

    /// `S = {0, .., d}`; every other vertex `x` joins all of `S` or none of
    /// it on a single coin. Edges inside `S` and outside `S` are independent.
    pub fn correlated_star(n: usize, p: Probability, d: usize) -> Result<Self> {
        require_vertices(n)?;
        let s = d + 1;
        if s >= n {
            return Err(Error::invalid(format!(
                "correlated star needs d + 1 < n (got d = {d}, n = {n})"
            )));
        }
        let mut b = LayoutBuilder::new(n)?;
        for x in s..n {
            b.push(Latent::Coin, (0..s).map(|c| (c, x)))?;
        }
        b.fill_independent();
        Self::assemble(ModelKind::CorrelatedStar, p, d, Layout::Star { star_size: s }, b, None)
    }

    /// Two-level block construction that stays disconnected well above the
    /// independent connectivity threshold.
    ///
    /// `A` holds the first `⌈n / (ln(n)·√(d+1))⌉` vertices, split into
    /// groups of `√(d+1)`; `B` holds the rest, split into blocks of `d + 1`.
    /// One coin per (vertex of `A`, block of `B`) drives all edges between
    /// them, one coin per pair of groups (including a group with itself)
    /// drives all edges between the groups, and edges inside `B` are
    /// independent. `d + 1` must be a perfect square.
    pub fn connectivity_gadget(n: usize, p: Probability, d: usize) -> Result<Self> {
        let d1 = d + 1;
        let group = d1.isqrt();
        if group * group != d1 {
            return Err(Error::invalid(format!("connectivity gadget needs d + 1 to be a perfect square (d = {d})")));
        }
        if n < 2 {
            return Err(Error::invalid("connectivity gadget needs n >= 2"));
        }
        let a_size = (n as f64 / ((n as f64).ln() * group as f64)).ceil() as usize;
        if a_size < group || a_size > n {
            return Err(Error::invalid(format!(
                "connectivity gadget needs sqrt(d + 1) <= |A| <= n; got |A| = {a_size} for n = {n}, d = {d}"
            )));
        }
        let groups: Vec<Range<usize>> = chunks(0..a_size, group);
        let blocks: Vec<Range<usize>> = chunks(a_size..n, d1);

        let mut b = LayoutBuilder::new(n)?;
        for x in 0..a_size {
            for block in &blocks {
                b.push(Latent::Coin, block.clone().map(|y| (x, y)))?;
            }
        }
        for (i, gi) in groups.iter().enumerate() {
            for gj in &groups[i..] {
                if gi == gj {
                    let members = gi.clone();
                    let within = members.clone().flat_map(|u| (u + 1..members.end).map(move |v| (u, v)));
                    b.push(Latent::Coin, within)?;
                } else {
                    b.push(Latent::Coin, gi.clone().flat_map(|u| gj.clone().map(move |v| (u, v))))?;
                }
            }
        }
        b.fill_independent();
        let layout = Layout::Gadget {
            a_size,
            group_size: group,
            group_count: groups.len(),
            block_size: d1,
            block_count: blocks.len(),
        };
        Self::assemble(ModelKind::ConnectivityGadget, p, d, layout, b, None)
    }

    /// Consecutive canonical edge indices form blocks of `m`; each block
    /// keeps a uniform `a`-subset. Every sample has exactly
    /// `a·n(n-1)/(2m)` edges; `p = a/m` and `d = m - 1`.
    pub fn edge_block_exact(n: usize, a: usize, m: usize) -> Result<Self> {
        require_vertices(n)?;
        if a == 0 || a > m {
            return Err(Error::invalid(format!("edge blocks need 1 <= a <= m (a = {a}, m = {m})")));
        }
        let total = pair_count(n);
        if total == 0 || !total.is_multiple_of(m as u64) {
            return Err(Error::invalid(format!("block size {m} does not divide {total} potential edges")));
        }
        let mut b = LayoutBuilder::new(n)?;
        let block_count = (total / m as u64) as usize;
        for blk in 0..block_count as u64 {
            let range = blk * m as u64..(blk + 1) * m as u64;
            b.push(Latent::Choice { keep: a as u32 }, range.map(|k| EdgeIndex(k).endpoints()))?;
        }
        let p = Probability::ratio(a as u64, m as u64)?;
        let layout = Layout::EdgeBlocks { block_size: m, block_count };
        Self::assemble(ModelKind::EdgeBlockExact, p, m - 1, layout, b, None)
    }

    /// One coin per caller-supplied block. The blocks must partition all
    /// `n(n-1)/2` edge indices; `d` is the largest block size minus one.
    pub fn custom_blocks(n: usize, p: Probability, blocks: Vec<Vec<EdgeIndex>>) -> Result<Self> {
        require_vertices(n)?;
        let total = pair_count(n);
        let mut b = LayoutBuilder::new(n)?;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("custom blocks must be nonempty"));
            }
            if let Some(e) = block.iter().find(|e| e.0 >= total) {
                return Err(Error::invalid(format!("edge index {} out of range for n = {n}", e.0)));
            }
            b.push(Latent::Coin, block.iter().map(|e| e.endpoints()))?;
        }
        if !b.is_complete() {
            return Err(Error::invalid(format!(
                "custom blocks cover {} of {total} potential edges",
                b.pairs.len()
            )));
        }
        let max_block = blocks.iter().map(Vec::len).max().unwrap_or(1);
        let layout = Layout::Custom {
            block_count: blocks.len(),
            max_block_size: max_block,
        };
        Self::assemble(ModelKind::CustomBlocks, p, max_block.saturating_sub(1), layout, b, Some(blocks))
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> Probability {
        self.p
    }

    /// Declared dependence bound.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn latent_count(&self) -> usize {
        self.latents.len()
    }

    pub fn latents(&self) -> impl ExactSizeIterator<Item = LatentView<'_>> + '_ {
        self.latents.iter().enumerate().map(move |(i, &latent)| LatentView {
            latent,
            edges: &self.pairs[self.offsets[i] as usize..self.offsets[i + 1] as usize],
        })
    }

    /// Vertices of the correlated set `S` of a correlated star.
    pub fn star_vertices(&self) -> Option<Range<usize>> {
        match self.layout {
            Layout::Star { star_size } => Some(0..star_size),
            _ => None,
        }
    }

    pub fn dependency_spec(&self) -> DependencySpec {
        let blocks: Vec<Vec<EdgeIndex>> = self
            .latents()
            .map(|l| l.edges.iter().map(|&(u, v)| EdgeIndex::from_pair(u as usize, v as usize)).collect())
            .collect();
        DependencySpec::from_blocks(self.n, self.d, blocks.iter().map(Vec::as_slice))
    }

    pub fn sample(&self, seed: u64) -> Graph {
        let mut g = Graph::empty(self.n);
        self.draw(seed, &mut g, None);
        g
    }

    /// Overwrite `g` (which must have the model's vertex count) with the
    /// sample for `seed`.
    pub fn sample_into(&self, seed: u64, g: &mut Graph) {
        assert_eq!(g.vertex_count(), self.n);
        g.clear();
        self.draw(seed, g, None);
    }

    /// Sample for `seed` together with its latent assignment.
    pub fn sample_outcome(&self, seed: u64) -> SampleOutcome {
        let mut graph = Graph::empty(self.n);
        let mut state = Vec::with_capacity(self.latents.len());
        self.draw(seed, &mut graph, Some(&mut state));
        SampleOutcome {
            graph,
            latent_state: state,
        }
    }

    fn draw(&self, seed: u64, g: &mut Graph, mut record: Option<&mut Vec<LatentValue>>) {
        let mut rng = rng_from_seed(seed);
        for view in self.latents() {
            match view.latent {
                Latent::Coin => {
                    let on = self.coin.sample(&mut rng);
                    if on {
                        for &(u, v) in view.edges {
                            g.add_edge(u as usize, v as usize);
                        }
                    }
                    if let Some(state) = record.as_deref_mut() {
                        state.push(LatentValue::Coin(on));
                    }
                }
                Latent::Choice { keep } => {
                    let picked = index::sample(&mut rng, view.edges.len(), keep as usize);
                    for i in picked.iter() {
                        let (u, v) = view.edges[i];
                        g.add_edge(u as usize, v as usize);
                    }
                    if let Some(state) = record.as_deref_mut() {
                        let mut positions: Vec<u32> = picked.iter().map(|i| i as u32).collect();
                        positions.sort_unstable();
                        state.push(LatentValue::Choice(positions));
                    }
                }
            }
        }
    }

    /// The graph determined by a full latent assignment.
    pub fn realize(&self, state: &[LatentValue]) -> Result<Graph> {
        if state.len() != self.latents.len() {
            return Err(Error::invalid(format!(
                "expected {} latent values, got {}",
                self.latents.len(),
                state.len()
            )));
        }
        let mut g = Graph::empty(self.n);
        for (view, value) in self.latents().zip(state) {
            match (view.latent, value) {
                (Latent::Coin, LatentValue::Coin(on)) => {
                    if *on {
                        for &(u, v) in view.edges {
                            g.add_edge(u as usize, v as usize);
                        }
                    }
                }
                (Latent::Choice { keep }, LatentValue::Choice(positions)) => {
                    let distinct = positions.windows(2).all(|w| w[0] < w[1]);
                    if positions.len() != keep as usize
                        || !distinct
                        || positions.iter().any(|&i| i as usize >= view.edges.len())
                    {
                        return Err(Error::invalid("invalid choice latent value"));
                    }
                    for &i in positions {
                        let (u, v) = view.edges[i as usize];
                        g.add_edge(u as usize, v as usize);
                    }
                }
                _ => return Err(Error::invalid("latent value does not match latent kind")),
            }
        }
        Ok(g)
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        let (a, m) = match self.kind {
            ModelKind::EdgeBlockExact => {
                let r = self.p.exact().expect("edge-block probability is exact");
                let m = self.d + 1;
                let a = (*r.numer() * m as u64 / *r.denom()) as usize;
                (Some(a), Some(m))
            }
            _ => (None, None),
        };
        ModelDescriptor {
            kind: self.kind,
            n: self.n,
            p: Some(self.p),
            d: Some(self.d),
            a,
            m,
            blocks: self
                .custom_blocks
                .as_ref()
                .map(|b| b.iter().map(|blk| blk.iter().map(|e| e.0).collect()).collect()),
            layout: Some(self.layout.clone()),
        }
    }

    /// Human-readable key-value document describing the model.
    pub fn to_document(&self) -> String {
        toml::to_string(&self.descriptor()).expect("model descriptors always serialize")
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let desc: ModelDescriptor = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        desc.build()
    }
}

fn chunks(range: Range<usize>, size: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = (start + size).min(range.end);
        out.push(start..end);
        start = end;
    }
    out
}

/// Serializable description of a model: enough to rebuild it exactly.
///
/// Derived fields (`d` for fixed-`d` kinds, `p` for edge blocks, `layout`)
/// are optional on input and, when present, must agree with the rebuilt
/// model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Probability>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
}

impl ModelDescriptor {
    pub fn new(kind: ModelKind, n: usize) -> Self {
        ModelDescriptor {
            kind,
            n,
            p: None,
            d: None,
            a: None,
            m: None,
            blocks: None,
            layout: None,
        }
    }

    pub fn build(&self) -> Result<DistributionModel> {
        let need_p = || {
            self.p
                .ok_or_else(|| Error::invalid(format!("{} needs an edge probability p", self.kind)))
        };
        let need = |field: Option<usize>, name: &str| {
            field.ok_or_else(|| Error::invalid(format!("{} needs parameter {name}", self.kind)))
        };
        let model = match self.kind {
            ModelKind::ErdosRenyi => DistributionModel::erdos_renyi(self.n, need_p()?)?,
            ModelKind::CorrelatedStar => DistributionModel::correlated_star(self.n, need_p()?, need(self.d, "d")?)?,
            ModelKind::ConnectivityGadget => {
                DistributionModel::connectivity_gadget(self.n, need_p()?, need(self.d, "d")?)?
            }
            ModelKind::EdgeBlockExact => {
                let m = DistributionModel::edge_block_exact(self.n, need(self.a, "a")?, need(self.m, "m")?)?;
                if let Some(p) = self.p {
                    if p != m.p() {
                        return Err(Error::invalid(format!("p = {p} disagrees with a/m = {}", m.p())));
                    }
                }
                m
            }
            ModelKind::CustomBlocks => {
                let blocks = self
                    .blocks
                    .as_ref()
                    .ok_or_else(|| Error::invalid("custom-blocks needs a block list"))?;
                let blocks = blocks
                    .iter()
                    .map(|b| b.iter().map(|&k| EdgeIndex(k)).collect())
                    .collect();
                DistributionModel::custom_blocks(self.n, need_p()?, blocks)?
            }
        };
        if let Some(d) = self.d {
            if d != model.d() {
                return Err(Error::invalid(format!(
                    "declared d = {d} disagrees with the construction's d = {}",
                    model.d()
                )));
            }
        }
        if let Some(layout) = &self.layout {
            if layout != model.layout() {
                return Err(Error::invalid(format!(
                    "layout {layout:?} disagrees with the rebuilt layout {:?}",
                    model.layout()
                )));
            }
        }
        Ok(model)
    }
}
