//! Empirical audit of a model's marginals and independence structure.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{pair_count, EdgeIndex, Graph};
use crate::model::DistributionModel;
use crate::seed::{rng_from_seed, trial_seed};
use crate::stats::{rejection_allowance, wilson_interval, Interval, Table2x2};

pub const MARGINAL_CONFIDENCE: f64 = 0.99;
pub const INDEPENDENCE_LEVEL: f64 = 0.001;
/// Level at which a count of individual rejections becomes a flag.
pub const FAMILY_LEVEL: f64 = 0.001;
/// Number of non-dependent edge pairs tested for independence.
pub const PAIR_SAMPLE: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct EdgeAudit {
    pub u: usize,
    pub v: usize,
    pub count: u64,
    pub frequency: f64,
    pub interval: Interval,
    /// `p` lies outside the interval.
    pub miss: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAudit {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub table: Table2x2,
    pub chi_squared: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub model: String,
    pub n: usize,
    pub p: f64,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub edges: Vec<EdgeAudit>,
    pub marginal_misses: u64,
    /// Misses needed before the marginal flag fires.
    pub marginal_allowance: u64,
    pub marginal_flag: bool,
    pub max_dependency_degree: usize,
    pub dependency_valid: bool,
    pub pairs: Vec<PairAudit>,
    pub independence_rejections: u64,
    pub independence_allowance: u64,
    pub independence_flag: bool,
}

impl AuditReport {
    pub fn flagged(&self) -> bool {
        self.marginal_flag || self.independence_flag || !self.dependency_valid
    }
}

/// Edge pairs in different latent blocks, either all of them or a seeded
/// sample of [`PAIR_SAMPLE`] distinct ones.
fn independent_pairs(model: &DistributionModel, seed: u64) -> Vec<(EdgeIndex, EdgeIndex)> {
    let spec = model.dependency_spec();
    let total = pair_count(model.vertex_count());
    let candidates = total * total.saturating_sub(1) / 2;
    if candidates <= 4 * PAIR_SAMPLE as u64 {
        let mut all = Vec::new();
        for a in 0..total {
            for b in a + 1..total {
                if !spec.are_dependent(EdgeIndex(a), EdgeIndex(b)) {
                    all.push((EdgeIndex(a), EdgeIndex(b)));
                }
            }
        }
        if all.len() <= PAIR_SAMPLE {
            return all;
        }
    }
    let mut rng = rng_from_seed(trial_seed(seed, u64::MAX, 0));
    let mut picked = std::collections::BTreeSet::new();
    let mut attempts = 0;
    while picked.len() < PAIR_SAMPLE && attempts < 100 * PAIR_SAMPLE {
        attempts += 1;
        let a = rng.random_range(0..total);
        let b = rng.random_range(0..total);
        if a != b && !spec.are_dependent(EdgeIndex(a), EdgeIndex(b)) {
            picked.insert((EdgeIndex(a.min(b)), EdgeIndex(a.max(b))));
        }
    }
    picked.into_iter().collect()
}

struct Tally {
    edges: Vec<u64>,
    tables: Vec<[[u64; 2]; 2]>,
}

/// Sample `trials` graphs (trial `i` seeded by `trial_seed(seed, 0, i)`) and
/// check per-edge frequencies against `p`, the dependency bound, and
/// pairwise independence of edges in different blocks.
///
/// Individual misses are expected at the stated levels, so the two flags
/// fire only when the number of misses is itself significant at
/// [`FAMILY_LEVEL`] under a binomial null.
pub fn audit_model(model: &DistributionModel, trials: u64, seed: u64) -> Result<AuditReport> {
    audit_samples(model, model, trials, seed)
}

/// Audit the structure declared by `model` against samples from `source`.
fn audit_samples(
    model: &DistributionModel,
    source: &DistributionModel,
    trials: u64,
    seed: u64,
) -> Result<AuditReport> {
    if trials == 0 {
        return Err(crate::error::Error::invalid("audit needs at least one trial"));
    }
    let n = model.vertex_count();
    let total = pair_count(n) as usize;
    let pairs = independent_pairs(model, seed);
    let endpoints: Vec<((usize, usize), (usize, usize))> =
        pairs.iter().map(|(a, b)| (a.endpoints(), b.endpoints())).collect();

    let empty = || Tally {
        edges: vec![0; total],
        tables: vec![[[0; 2]; 2]; pairs.len()],
    };
    let tally = (0..trials)
        .into_par_iter()
        .fold(
            || (empty(), Graph::empty(n)),
            |(mut t, mut g), i| {
                source.sample_into(trial_seed(seed, 0, i), &mut g);
                for (u, v) in g.edges() {
                    t.edges[EdgeIndex::from_pair(u, v).0 as usize] += 1;
                }
                for (k, &((a, b), (c, d))) in endpoints.iter().enumerate() {
                    t.tables[k][g.has_edge(a, b) as usize][g.has_edge(c, d) as usize] += 1;
                }
                (t, g)
            },
        )
        .map(|(t, _)| t)
        .reduce(empty, |mut x, y| {
            x.edges.iter_mut().zip(y.edges).for_each(|(a, b)| *a += b);
            for (a, b) in x.tables.iter_mut().zip(y.tables) {
                for r in 0..2 {
                    for c in 0..2 {
                        a[r][c] += b[r][c];
                    }
                }
            }
            x
        });

    let p = model.p().value();
    let edges: Vec<EdgeAudit> = tally
        .edges
        .iter()
        .enumerate()
        .map(|(e, &count)| {
            let (u, v) = EdgeIndex(e as u64).endpoints();
            let interval = wilson_interval(count, trials, MARGINAL_CONFIDENCE);
            EdgeAudit {
                u,
                v,
                count,
                frequency: count as f64 / trials as f64,
                interval,
                miss: !interval.contains(p),
            }
        })
        .collect();
    let marginal_misses = edges.iter().filter(|e| e.miss).count() as u64;
    let marginal_allowance = rejection_allowance(total as u64, 1.0 - MARGINAL_CONFIDENCE, FAMILY_LEVEL);

    let pair_audits: Vec<PairAudit> = endpoints
        .iter()
        .zip(&tally.tables)
        .map(|(&(first, second), &counts)| {
            let table = Table2x2 { counts };
            let p_value = table.p_value();
            PairAudit {
                first,
                second,
                table,
                chi_squared: table.chi_squared(),
                p_value,
                reject: p_value < INDEPENDENCE_LEVEL,
            }
        })
        .collect();
    let independence_rejections = pair_audits.iter().filter(|a| a.reject).count() as u64;
    let independence_allowance = rejection_allowance(pair_audits.len() as u64, INDEPENDENCE_LEVEL, FAMILY_LEVEL);

    let spec = model.dependency_spec();
    Ok(AuditReport {
        model: model.kind().to_string(),
        n,
        p,
        d: model.d(),
        trials,
        seed,
        marginal_flag: marginal_misses >= marginal_allowance,
        edges,
        marginal_misses,
        marginal_allowance,
        max_dependency_degree: spec.max_degree(),
        dependency_valid: spec.validate().is_ok(),
        independence_flag: independence_rejections >= independence_allowance,
        pairs: pair_audits,
        independence_rejections,
        independence_allowance,
    })
}
