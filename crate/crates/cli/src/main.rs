//! `locdep`: sample, audit, bound and simulate d-dependent random graphs.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 resource limit,
//! 3 audit flag.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use locdep::audit::{audit_model, AuditReport};
use locdep::bounds::{self, BoundParams};
use locdep::harness::{self, ExperimentConfig, ExperimentResult, ModelGrid, RunOptions};
use locdep::oracle::{exact_event_probability, ExactEventQuery};
use locdep::{
    DistributionModel, Error, Graph, ModelDescriptor, ModelKind, Predicate, Probability, Result, Statistic,
    SubgraphPattern,
};

const SEED_ENV: &str = "LOCDEP_SEED";

#[derive(Parser, Debug)]
#[command(name = "locdep", version, about = "Tools for d-dependent random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one graph and write it as an edge list.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        io: SeedOut,
    },
    /// Evaluate a named bound, threshold or functional.
    Bounds(BoundsArgs),
    /// Run a Monte Carlo experiment over a model grid.
    Experiment(ExperimentArgs),
    /// Like `experiment`, for a monotone event along an increasing p-grid.
    Sweep(ExperimentArgs),
    /// Check a model's edge marginals, dependency degree and independence.
    Audit {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        io: SeedOut,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exact probability of an event by latent enumeration.
    Oracle {
        #[command(flatten)]
        dist: DistArgs,
        /// Event, e.g. `connected`, `contains:k3`, `has-edge:0-1`.
        #[arg(long)]
        predicate: String,
        /// Edge-list file for `contains` / `no-copy` without an inline pattern.
        #[arg(long)]
        pattern_file: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Dist {
    #[value(alias = "erdos-renyi")]
    Er,
    #[value(alias = "correlated-star")]
    Star,
    #[value(alias = "connectivity-gadget")]
    Gadget,
    #[value(alias = "edge-block-exact")]
    EdgeBlock,
    #[value(alias = "custom-blocks")]
    Custom,
}

impl Dist {
    fn kind(self) -> ModelKind {
        match self {
            Dist::Er => ModelKind::ErdosRenyi,
            Dist::Star => ModelKind::CorrelatedStar,
            Dist::Gadget => ModelKind::ConnectivityGadget,
            Dist::EdgeBlock => ModelKind::EdgeBlockExact,
            Dist::Custom => ModelKind::CustomBlocks,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct DistArgs {
    #[arg(long, value_enum, required_unless_present = "model")]
    dist: Option<Dist>,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability, decimal or rational (`1/3`).
    #[arg(long)]
    p: Option<Probability>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Edge-index blocks for custom models, e.g. `0,1,2;3;4;5`.
    #[arg(long)]
    blocks: Option<String>,
    /// Model document (TOML) instead of the flags above.
    #[arg(long, conflicts_with = "dist")]
    model: Option<PathBuf>,
}

impl DistArgs {
    fn build(&self) -> Result<DistributionModel> {
        if let Some(path) = &self.model {
            return DistributionModel::from_document(&read(path)?);
        }
        let dist = self.dist.expect("clap requires --dist without --model");
        let n = self.n.ok_or_else(|| Error::InvalidArgument("--n is required".into()))?;
        let mut desc = ModelDescriptor::new(dist.kind(), n);
        desc.p = self.p;
        desc.d = self.d;
        desc.a = self.a;
        desc.m = self.m;
        if let Some(text) = &self.blocks {
            desc.blocks = Some(parse_blocks(text)?);
        }
        desc.build()
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Vec<u64>>> {
    text.split(';')
        .map(|block| {
            block
                .split(',')
                .map(|k| {
                    k.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad edge index {k:?} in --blocks")))
                })
                .collect()
        })
        .collect()
}

#[derive(Args, Debug, Clone)]
struct SeedOut {
    /// Master seed; defaults to $LOCDEP_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}={v:?} is not a 64-bit seed"))),
        Err(_) => Ok(None),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// One of the bound names; see `locdep bounds list`.
    name: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    p: Option<Probability>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    fval: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    slack: Option<f64>,
    /// Library pattern (`k3`, `c4`, ...) or inline edges `0-1,1-2`.
    #[arg(long, conflicts_with = "pattern_file")]
    pattern: Option<SubgraphPattern>,
    /// Edge-list file describing the pattern.
    #[arg(long)]
    pattern_file: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment config (TOML). Flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum)]
    dist: Option<Dist>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Probability per grid point; repeat for a grid. Expressions such as
    /// `2 ln(n)/n` are evaluated per point.
    #[arg(long)]
    p: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    event: Option<String>,
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    theory: Vec<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    confidence: Option<f64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    io: SeedOut,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

const DEFAULT_TRIALS: u64 = 1000;

impl ExperimentArgs {
    fn effective_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_toml(&read(path)?)?,
            None => {
                let dist = self
                    .dist
                    .ok_or_else(|| Error::InvalidArgument("give --config or --dist with --n and --p".into()))?;
                let grid = ModelGrid::new(dist.kind(), Vec::new(), Vec::new(), vec![0]);
                ExperimentConfig::new(grid, DEFAULT_TRIALS, resolve_seed(None)?)
            }
        };
        if let Some(dist) = self.dist {
            cfg.model.kind = dist.kind();
        }
        if !self.n.is_empty() {
            cfg.model.n = self.n.clone();
        }
        if !self.p.is_empty() {
            cfg.model.p = self.p.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        if !self.d.is_empty() {
            cfg.model.d = self.d.clone();
        }
        if self.a.is_some() {
            cfg.model.a = self.a;
        }
        if self.m.is_some() {
            cfg.model.m = self.m;
        }
        if let Some(name) = &self.name {
            cfg.name = name.clone();
        }
        if let Some(e) = &self.event {
            cfg.event = Some(e.parse()?);
        }
        if let Some(s) = &self.statistic {
            cfg.statistic = Some(s.parse::<Statistic>()?);
        }
        for t in &self.theory {
            cfg = cfg.with_theory(t.parse()?);
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(c) = self.confidence {
            cfg.confidence = c;
        }
        if let Some(s) = self.io.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    text.into_bytes()
}

fn cmd_sample(dist: &DistArgs, io: &SeedOut) -> Result<ExitCode> {
    let model = dist.build()?;
    let seed = resolve_seed(io.seed)?;
    let graph = model.sample(seed);
    let mut out = format!("# locdep sample\n# seed = {seed}\n");
    for line in model.to_document().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&graph.to_edge_list_string());
    emit(io.output.as_deref(), out.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<ExitCode> {
    if args.name == "list" {
        let mut text = bounds::BOUND_NAMES.join("\n");
        text.push('\n');
        emit(args.output.as_deref(), text.as_bytes())?;
        return Ok(ExitCode::SUCCESS);
    }
    let pattern = match (&args.pattern, &args.pattern_file) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(path)) => Some(pattern_from_file(path)?),
        (None, None) => None,
    };
    let params = BoundParams {
        n: args.n,
        p: args.p.map(|p| p.value()),
        d: args.d,
        mu: args.mu,
        t: args.t,
        a: args.a,
        b: args.b,
        s: args.s,
        c: args.c,
        fval: args.fval,
        eps: args.eps,
        c1: args.c1,
        c2: args.c2,
        slack: args.slack,
        pattern,
    };
    let reports = bounds::evaluate(&args.name, &params)?;
    let bytes = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            bounds::write_reports_csv(&reports, &mut buf)?;
            buf
        }
        Format::Json => to_json(&reports),
    };
    emit(args.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn pattern_from_file(path: &Path) -> Result<SubgraphPattern> {
    let g = Graph::read_edge_list(read(path)?.as_bytes())?;
    Ok(SubgraphPattern::from_graph(g))
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    seed: u64,
    workers: usize,
    config: &'a ExperimentConfig,
}

fn cmd_experiment(args: &ExperimentArgs, sweep: bool) -> Result<ExitCode> {
    let cfg = args.effective_config()?;
    let opts = RunOptions::workers(args.workers);
    let result: ExperimentResult = if sweep {
        harness::threshold_sweep(&cfg, opts)?
    } else {
        harness::estimate_probability(&cfg, opts)?
    };
    let command = if sweep { "sweep" } else { "experiment" };
    match args.format {
        Format::Json => emit(args.io.output.as_deref(), &to_json(&result))?,
        Format::Csv => {
            emit(args.io.output.as_deref(), result.to_csv_string().as_bytes())?;
            let provenance = to_json(&Provenance {
                command,
                seed: result.seed,
                workers: args.workers,
                config: &result.config,
            });
            match &args.io.output {
                Some(path) => {
                    let mut side = path.clone().into_os_string();
                    side.push(".provenance.json");
                    fs::write(side, provenance)?;
                }
                None => io::stderr().write_all(&provenance)?,
            }
        }
    }
    eprintln!(
        "{command} {:?}: {} points in {:.2}s",
        result.name,
        result.points.len(),
        result.total_duration_secs()
    );
    for pt in &result.points {
        if let Some(e) = &pt.error {
            eprintln!("point {} (n = {}, d = {}, p = {}): {e}", pt.grid_index, pt.n, pt.d, pt.p_spec);
        }
    }
    Ok(if result.all_failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

#[derive(Serialize)]
struct AuditDocument<'a> {
    model: ModelDescriptor,
    report: &'a AuditReport,
}

fn cmd_audit(dist: &DistArgs, trials: u64, io: &SeedOut, format: Format) -> Result<ExitCode> {
    let model = dist.build()?;
    let seed = resolve_seed(io.seed)?;
    let report = audit_model(&model, trials, seed)?;
    let bytes = match format {
        Format::Json => to_json(&AuditDocument {
            model: model.descriptor(),
            report: &report,
        }),
        Format::Csv => audit_csv(&report)?,
    };
    emit(io.output.as_deref(), &bytes)?;
    if report.flagged() {
        eprintln!(
            "audit flagged: {} marginal misses (allowance {}), {} independence rejections (allowance {}), dependency spec {}",
            report.marginal_misses,
            report.marginal_allowance,
            report.independence_rejections,
            report.independence_allowance,
            if report.dependency_valid { "valid" } else { "invalid" },
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Long format: `record` is `summary`, `edge` or `pair`.
fn audit_csv(r: &AuditReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "n", "p", "d", "trials", "seed", "record", "key", "value"])
        .map_err(csv_error)?;
    let mut row = |record: &str, key: String, value: String| {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.d.to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
            record.to_string(),
            key,
            value,
        ])
        .map_err(csv_error)
    };
    let summary = [
        ("max_dependency_degree", r.max_dependency_degree.to_string()),
        ("dependency_valid", r.dependency_valid.to_string()),
        ("marginal_misses", r.marginal_misses.to_string()),
        ("marginal_allowance", r.marginal_allowance.to_string()),
        ("marginal_flag", r.marginal_flag.to_string()),
        ("pairs_tested", r.pairs.len().to_string()),
        ("independence_rejections", r.independence_rejections.to_string()),
        ("independence_allowance", r.independence_allowance.to_string()),
        ("independence_flag", r.independence_flag.to_string()),
    ];
    for (k, v) in summary {
        row("summary", k.to_string(), v)?;
    }
    for e in &r.edges {
        row(
            "edge",
            format!("{}-{}", e.u, e.v),
            format!(
                "count={};frequency={};ci_low={};ci_high={};miss={}",
                e.count, e.frequency, e.interval.low, e.interval.high, e.miss
            ),
        )?;
    }
    for pa in &r.pairs {
        row(
            "pair",
            format!("{}-{}|{}-{}", pa.first.0, pa.first.1, pa.second.0, pa.second.1),
            format!("chi_squared={};p_value={};reject={}", pa.chi_squared, pa.p_value, pa.reject),
        )?;
    }
    w.into_inner().map_err(csv_error)
}

#[derive(Serialize)]
struct OracleDocument {
    model: ModelDescriptor,
    predicate: String,
    exact: String,
    decimal: f64,
    error: f64,
}

fn cmd_oracle(dist: &DistArgs, predicate: &str, pattern_file: Option<&Path>, output: Option<&Path>, format: Format) -> Result<ExitCode> {
    let model = dist.build()?;
    let predicate: Predicate = match (predicate.trim(), pattern_file) {
        ("contains", Some(path)) => Predicate::Contains(pattern_from_file(path)?),
        ("no-copy", Some(path)) => Predicate::Contains(pattern_from_file(path)?).negate(),
        (_, Some(_)) => {
            return Err(Error::InvalidArgument(
                "--pattern-file goes with --predicate contains or no-copy".into(),
            ))
        }
        (text, None) => text.parse()?,
    };
    let value = exact_event_probability(&ExactEventQuery {
        model: &model,
        predicate: &predicate,
    })?;
    let doc = OracleDocument {
        model: model.descriptor(),
        predicate: predicate.to_string(),
        exact: value.to_string(),
        decimal: value.to_f64(),
        error: value.error(),
    };
    let bytes = match format {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["model", "n", "p", "d", "predicate", "exact", "decimal", "error"])
                .map_err(csv_error)?;
            w.write_record([
                doc.model.kind.to_string(),
                doc.model.n.to_string(),
                model.p().to_string(),
                model.d().to_string(),
                doc.predicate.clone(),
                doc.exact.clone(),
                doc.decimal.to_string(),
                doc.error.to_string(),
            ])
            .map_err(csv_error)?;
            w.into_inner().map_err(csv_error)?
        }
    };
    emit(output, &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Sample { dist, io } => cmd_sample(dist, io),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Experiment(args) => cmd_experiment(args, false),
        Command::Sweep(args) => cmd_experiment(args, true),
        Command::Audit {
            dist,
            trials,
            io,
            format,
        } => cmd_audit(dist, *trials, io, *format),
        Command::Oracle {
            dist,
            predicate,
            pattern_file,
            output,
            format,
        } => cmd_oracle(dist, predicate, pattern_file.as_deref(), output.as_deref(), *format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit(_) => 2,
                _ => 1,
            })
        }
    }
}
