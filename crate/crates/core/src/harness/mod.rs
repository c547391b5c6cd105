//! Seeded, parallel Monte Carlo experiments over model grids.
//!
//! Trial `t` at grid point `g` samples with `trial_seed(master, g, t)` and
//! per-trial outcomes are merged in trial order, so results are identical
//! for any number of workers.

mod config;
mod expr;

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{Event, ExperimentConfig, GridPoint, ModelGrid, ProbSpec, TheoryRef, DEFAULT_WITNESS_SLACK};

use crate::bounds::{
    clique_bounds, connectivity_example_threshold, connectivity_upper_threshold, degree_interval,
    jumbledness_witness_floor, phi_functional, DegreeInterval,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::model::{DistributionModel, ModelKind};
use crate::pattern::SubgraphPattern;
use crate::predicate::{Predicate, Statistic};
use crate::seed::trial_seed;
use crate::stats::{wilson_interval, Interval};

/// Largest `n` for which the clique experiment runs the exact solver.
pub const CLIQUE_MAX_VERTICES: usize = 60;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl RunOptions {
    pub fn workers(workers: usize) -> Self {
        RunOptions { workers }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatSummary {
    pub min: u64,
    pub mean: f64,
    pub max: u64,
    /// `(value, count)` pairs in increasing value order.
    pub histogram: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub grid_index: usize,
    pub kind: ModelKind,
    pub n: usize,
    pub d: usize,
    /// The grid's probability spec, or `a/m` for edge blocks.
    pub p_spec: String,
    pub p: Option<f64>,
    pub estimate: Option<Estimate>,
    pub statistic: Option<StatSummary>,
    pub theory: Vec<(String, f64)>,
    pub flags: Vec<(String, bool)>,
    pub error: Option<String>,
    #[serde(skip)]
    pub duration_secs: f64,
}

impl PointResult {
    pub fn theory_value(&self, name: &str) -> Option<f64> {
        self.theory.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
}

pub const CSV_HEADER: [&str; 17] = [
    "experiment",
    "seed",
    "grid_index",
    "kind",
    "n",
    "d",
    "p_spec",
    "p",
    "successes",
    "trials",
    "estimate",
    "ci_low",
    "ci_high",
    "stat_min_mean_max",
    "theory",
    "flags",
    "error",
];

fn join_pairs<T: ToString>(pairs: &[(String, T)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={}", v.to_string()))
        .collect::<Vec<_>>()
        .join(";")
}

impl ExperimentResult {
    pub fn all_failed(&self) -> bool {
        self.points.iter().all(|p| p.error.is_some())
    }

    pub fn total_duration_secs(&self) -> f64 {
        self.points.iter().map(|p| p.duration_secs).sum()
    }

    /// One row per grid point under [`CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(crate::bounds::csv_err)?;
        for pt in &self.points {
            let opt = |v: Option<String>| v.unwrap_or_default();
            let est = pt.estimate.as_ref();
            let stat = pt.statistic.as_ref().map(|s| {
                let hist: Vec<String> = s.histogram.iter().map(|(v, c)| format!("{v}:{c}")).collect();
                format!("{}/{}/{} [{}]", s.min, s.mean, s.max, hist.join(" "))
            });
            let row = [
                self.name.clone(),
                self.seed.to_string(),
                pt.grid_index.to_string(),
                pt.kind.to_string(),
                pt.n.to_string(),
                pt.d.to_string(),
                pt.p_spec.clone(),
                opt(pt.p.map(|p| p.to_string())),
                opt(est.map(|e| e.successes.to_string())),
                opt(est.map(|e| e.trials.to_string())),
                opt(est.map(|e| e.estimate.to_string())),
                opt(est.map(|e| e.interval.low.to_string())),
                opt(est.map(|e| e.interval.high.to_string())),
                opt(stat),
                join_pairs(&pt.theory),
                join_pairs(&pt.flags),
                opt(pt.error.clone()),
            ];
            w.write_record(&row).map_err(crate::bounds::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Pretty JSON embedding the full config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }
}

/// Per-point state the trial evaluator needs.
struct PointContext<'a> {
    model: &'a DistributionModel,
    event: Option<&'a Event>,
    statistic: Option<&'a Statistic>,
    degree: Option<DegreeInterval>,
    star: Option<VertexSet>,
}

impl PointContext<'_> {
    fn trial(&self, g: &Graph) -> (bool, u64) {
        let hit = match self.event {
            None => false,
            Some(Event::Graph(p)) => p.evaluate(g),
            Some(Event::DegreeViolation) => {
                let iv = self.degree.expect("degree interval prepared");
                (0..g.vertex_count()).any(|v| !iv.contains(g.degree(v)))
            }
            Some(Event::JumblednessWitness { slack }) => {
                let s = self.star.as_ref().expect("star prepared");
                witness_holds(g, s, self.model, *slack)
            }
        };
        (hit, self.statistic.map_or(0, |st| st.evaluate(g)))
    }
}

/// With `B` the common neighbourhood of `S`, compare `e(S,B) - p|S||B|`
/// against `slack` times the witness floor.
fn witness_holds(g: &Graph, s: &VertexSet, model: &DistributionModel, slack: f64) -> bool {
    let b = g.common_neighbors(s);
    let (n, p, d) = (model.vertex_count(), model.p().value(), model.d());
    let e = g.count_edges_between(s, &b) as f64;
    let dev = e - p * s.len() as f64 * b.len() as f64;
    match jumbledness_witness_floor(s.len() as u64, b.len() as u64, n as u64, p, d as u64) {
        Ok(floor) => dev > slack * floor,
        Err(_) => false,
    }
}

fn theory_for(
    refs: &[TheoryRef],
    model: &DistributionModel,
    theory: &mut Vec<(String, f64)>,
    flags: &mut Vec<(String, bool)>,
) {
    let (n, p, d) = (model.vertex_count() as u64, model.p().value(), model.d() as u64);
    for r in refs {
        match r {
            TheoryRef::ConnectivityUpper { fval } => {
                theory.push(("connectivity-upper".into(), connectivity_upper_threshold(n, d, *fval)));
            }
            TheoryRef::ConnectivityExample { eps } => match connectivity_example_threshold(n, d, *eps) {
                Ok(t) => {
                    theory.push(("connectivity-example".into(), t.value));
                    flags.push(("small-dependence".into(), t.small_dependence));
                }
                Err(_) => theory.push(("connectivity-example".into(), f64::NAN)),
            },
            TheoryRef::DegreeInterval => match degree_interval(n, p, d) {
                Ok(iv) => {
                    theory.push(("degree-low".into(), iv.low));
                    theory.push(("degree-high".into(), iv.high));
                    flags.push(("degree-hypothesis".into(), iv.hypothesis));
                }
                Err(_) => theory.push(("degree-low".into(), f64::NAN)),
            },
            TheoryRef::Phi(h) => match phi_functional(h, n, p, d) {
                Ok(r) => {
                    theory.push(("phi".into(), r.phi));
                    theory.push(("no-copy-bound".into(), r.containment_bound.min(1.0)));
                    flags.push(("phi-hypothesis".into(), r.hypothesis));
                }
                Err(_) => theory.push(("phi".into(), f64::NAN)),
            },
            TheoryRef::CliqueBounds => match clique_bounds(n, p, d, 1.0, 1.0, 1.0) {
                Ok(cb) => {
                    theory.push(("clique-low".into(), cb.low));
                    theory.push(("clique-high".into(), cb.high));
                    flags.push(("clique-hypothesis".into(), cb.hypothesis));
                }
                Err(_) => theory.push(("clique-low".into(), f64::NAN)),
            },
        }
    }
}

fn run_point(cfg: &ExperimentConfig, point: &GridPoint) -> PointResult {
    let start = Instant::now();
    let mut result = PointResult {
        grid_index: point.index,
        kind: cfg.model.kind,
        n: point.n,
        d: point.d,
        p_spec: point.p.as_ref().map(|p| p.to_string()).unwrap_or_default(),
        p: None,
        estimate: None,
        statistic: None,
        theory: Vec::new(),
        flags: Vec::new(),
        error: None,
        duration_secs: 0.0,
    };
    if let Err(e) = fill_point(cfg, point, &mut result) {
        result.error = Some(e.to_string());
    }
    result.duration_secs = start.elapsed().as_secs_f64();
    result
}

fn fill_point(cfg: &ExperimentConfig, point: &GridPoint, out: &mut PointResult) -> Result<()> {
    let model = cfg.model.descriptor(point)?.build()?;
    out.p = Some(model.p().value());
    if out.p_spec.is_empty() {
        out.p_spec = model.p().to_string();
    }
    let n = model.vertex_count();
    if let Some(Event::Graph(pred)) = &cfg.event {
        pred.validate(n)?;
    }
    if let Some(st) = &cfg.statistic {
        st.validate(n)?;
        if *st == Statistic::CliqueNumber && n > CLIQUE_MAX_VERTICES {
            return Err(Error::budget(format!(
                "exact clique number is limited to n <= {CLIQUE_MAX_VERTICES} (n = {n})"
            )));
        }
    }
    let mut ctx = PointContext {
        model: &model,
        event: cfg.event.as_ref(),
        statistic: cfg.statistic.as_ref(),
        degree: None,
        star: None,
    };
    match cfg.event {
        Some(Event::DegreeViolation) => {
            ctx.degree = Some(degree_interval(n as u64, model.p().value(), model.d() as u64)?);
        }
        Some(Event::JumblednessWitness { .. }) => {
            let s = model
                .star_vertices()
                .ok_or_else(|| Error::invalid("the jumbledness witness needs a correlated-star model"))?;
            let s: Vec<usize> = s.collect();
            ctx.star = Some(VertexSet::from_vertices(n, &s)?);
            out.theory.push(("np".into(), n as f64 * model.p().value()));
        }
        _ => {}
    }
    theory_for(&cfg.theory, &model, &mut out.theory, &mut out.flags);

    let outcomes: Vec<(bool, u64)> = (0..cfg.trials)
        .into_par_iter()
        .map_init(
            || Graph::empty(n),
            |g, t| {
                model.sample_into(trial_seed(cfg.seed, point.index as u64, t), g);
                ctx.trial(g)
            },
        )
        .collect();

    if cfg.event.is_some() {
        let successes = outcomes.iter().filter(|o| o.0).count() as u64;
        out.estimate = Some(Estimate {
            successes,
            trials: cfg.trials,
            estimate: successes as f64 / cfg.trials as f64,
            interval: wilson_interval(successes, cfg.trials, cfg.confidence),
        });
    }
    if cfg.statistic.is_some() {
        let mut hist = std::collections::BTreeMap::new();
        let mut sum = 0u128;
        for &(_, v) in &outcomes {
            *hist.entry(v).or_insert(0u64) += 1;
            sum += v as u128;
        }
        out.statistic = Some(StatSummary {
            min: *hist.keys().next().expect("trials >= 1"),
            mean: sum as f64 / cfg.trials as f64,
            max: *hist.keys().next_back().expect("trials >= 1"),
            histogram: hist.into_iter().collect(),
        });
    }
    Ok(())
}

fn with_pool<T: Send>(opts: RunOptions, f: impl FnOnce() -> T + Send) -> Result<T> {
    if opts.workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::budget(format!("cannot start {} workers: {e}", opts.workers)))?;
    Ok(pool.install(f))
}

/// Run every grid point. Points whose model cannot be built carry an
/// error entry; the rest still run.
pub fn estimate_probability(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentResult> {
    cfg.validate()?;
    let points = with_pool(opts, || {
        cfg.model.points().iter().map(|pt| run_point(cfg, pt)).collect::<Vec<_>>()
    })?;
    Ok(ExperimentResult {
        name: cfg.name.clone(),
        seed: cfg.seed,
        config: cfg.clone(),
        points,
    })
}

/// Connectivity (or the configured monotone event) along an increasing
/// p-grid, annotated with both connectivity thresholds.
pub fn threshold_sweep(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentResult> {
    let mut cfg = cfg.clone();
    if cfg.event.is_none() {
        cfg.event = Some(Event::Graph(Predicate::Connected));
    }
    if !cfg.theory.iter().any(|t| matches!(t, TheoryRef::ConnectivityUpper { .. })) {
        cfg.theory.push(TheoryRef::ConnectivityUpper { fval: 0.0 });
    }
    if !cfg.theory.iter().any(|t| matches!(t, TheoryRef::ConnectivityExample { .. })) {
        cfg.theory.push(TheoryRef::ConnectivityExample { eps: 0.1 });
    }
    cfg.validate()?;
    if cfg.model.kind != ModelKind::EdgeBlockExact {
        for &n in &cfg.model.n {
            for &d in &cfg.model.d {
                let values: Vec<f64> = cfg
                    .model
                    .p
                    .iter()
                    .map(|p| p.resolve(n, d).map(|p| p.value()))
                    .collect::<Result<_>>()?;
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(format!(
                        "sweep p-grid must be strictly increasing (n = {n}, d = {d}: {values:?})"
                    )));
                }
            }
        }
    }
    estimate_probability(&cfg, opts)
}

/// Fraction of trials in which some vertex degree leaves the concentration
/// interval, with the interval and its hypothesis per point.
pub fn degree_violation_rate(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentResult> {
    let cfg = cfg
        .clone()
        .with_event(Event::DegreeViolation)
        .with_theory(TheoryRef::DegreeInterval);
    estimate_probability(&cfg, opts)
}

/// Correlated-star witness for the lower jumbledness bound.
pub fn jumbledness_witness_experiment(
    n: usize,
    p: ProbSpec,
    d: usize,
    trials: u64,
    seed: u64,
    opts: RunOptions,
) -> Result<ExperimentResult> {
    if !((d as f64) < 0.99 * n as f64) {
        return Err(Error::invalid(format!("witness experiment needs d < 0.99 n (d = {d}, n = {n})")));
    }
    let grid = ModelGrid::new(ModelKind::CorrelatedStar, vec![n], vec![p], vec![d]);
    let mut cfg = ExperimentConfig::new(grid, trials, seed).with_event(Event::JumblednessWitness {
        slack: DEFAULT_WITNESS_SLACK,
    });
    cfg.name = "jumbledness-witness".into();
    estimate_probability(&cfg, opts)
}

/// Probability of containing no copy of `h`, next to `min(1, 10 Φ(h))`.
pub fn containment_experiment(
    h: &SubgraphPattern,
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<ExperimentResult> {
    let cfg = cfg
        .clone()
        .with_event(Event::Graph(Predicate::Contains(h.clone()).negate()))
        .with_theory(TheoryRef::Phi(h.clone()));
    estimate_probability(&cfg, opts)
}

/// Clique-number distribution per point, next to the clique bounds.
pub fn clique_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentResult> {
    let cfg = cfg
        .clone()
        .with_statistic(Statistic::CliqueNumber)
        .with_theory(TheoryRef::CliqueBounds);
    estimate_probability(&cfg, opts)
}
