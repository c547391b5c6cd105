//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;

use locdep::bounds::{janson_bernstein, janson_phi, phi_functional};
use locdep::harness::{
    clique_experiment, degree_violation_rate, estimate_probability, jumbledness_witness_experiment,
    Event, ExperimentConfig, ExperimentResult, ModelGrid, ProbSpec, RunOptions,
};
use locdep::oracle::{exact_binomial_two_sided_tail, exact_event_probability, exhaustive_jumbledness_check, ExactEventQuery};
use locdep::seed::{rng_from_seed, trial_seed};
use locdep::stats::wilson_interval;
use locdep::{
    clique_number, contains_subgraph, DistributionModel, EdgeIndex, Graph, ModelKind, Predicate, Probability,
    SubgraphPattern,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ratio(num: u64, den: u64) -> Probability {
    Probability::ratio(num, den).unwrap()
}

fn spec(s: &str) -> ProbSpec {
    s.parse().unwrap()
}

fn grid(kind: ModelKind, n: &[usize], p: &[&str], d: &[usize]) -> ModelGrid {
    ModelGrid::new(kind, n.to_vec(), p.iter().map(|s| spec(s)).collect(), d.to_vec())
}

fn estimate(cfg: &ExperimentConfig) -> Vec<f64> {
    estimate_probability(cfg, RunOptions::default())
        .unwrap()
        .points
        .iter()
        .map(|pt| pt.estimate.as_ref().unwrap_or_else(|| panic!("{:?}", pt.error)).estimate)
        .collect()
}

/// Random partition of all edges into blocks of at most `max_block`.
fn random_blocks(n: usize, max_block: usize, seed: u64) -> Vec<Vec<EdgeIndex>> {
    let mut rng = rng_from_seed(seed);
    let mut edges: Vec<u64> = (0..(n * (n - 1) / 2) as u64).collect();
    for i in (1..edges.len()).rev() {
        edges.swap(i, rng.random_range(0..=i));
    }
    let mut blocks = Vec::new();
    let mut rest = &edges[..];
    while !rest.is_empty() {
        let size = rng.random_range(1..=max_block.min(rest.len()));
        blocks.push(rest[..size].iter().map(|&k| EdgeIndex(k)).collect());
        rest = &rest[size..];
    }
    blocks
}

/// Every built-in construction that accepts `(n, p, d)`; edge blocks use
/// `a = 1, m = d + 1` and ignore `p`.
fn constructions(n: usize, p: Probability, d: usize, seed: u64) -> Vec<(String, DistributionModel)> {
    let mut out = Vec::new();
    let mut push = |name: &str, m: locdep::Result<DistributionModel>| {
        if let Ok(m) = m {
            out.push((format!("{name}(n={n},p={p},d={d})"), m));
        }
    };
    if d == 0 {
        push("er", DistributionModel::erdos_renyi(n, p));
    }
    push("star", DistributionModel::correlated_star(n, p, d));
    push("gadget", DistributionModel::connectivity_gadget(n, p, d));
    push("edge-block", DistributionModel::edge_block_exact(n, 1, d + 1));
    push("custom", DistributionModel::custom_blocks(n, p, random_blocks(n, d + 1, seed)));
    out
}

fn janson_dominance() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for big_n in [10u64, 50, 100, 200] {
        for p in [0.1, 0.3, 0.5] {
            let mu = big_n as f64 * p;
            for k in 1..=20 {
                let t = big_n as f64 * k as f64 / 20.0;
                let bound = janson_bernstein(mu, t, 0).unwrap().min(janson_phi(mu, t, 0).unwrap());
                let tail = exact_binomial_two_sided_tail(big_n, p, t);
                checked += 1;
                if !(bound >= tail) {
                    failures.push(format!("N={big_n} p={p} t={t}: {bound} < {tail}"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} (N, p, t) points, {} dominated violations {failures:?}", failures.len()),
    }
}

fn marginal_exactness() -> Outcome {
    let mut models = Vec::new();
    for n in 2..=6 {
        for (num, den) in [(1, 2), (1, 3), (2, 5)] {
            for d in [0, 1, 2, 3] {
                models.extend(constructions(n, ratio(num, den), d, (n * 100 + d) as u64));
            }
        }
    }
    let mut failures = Vec::new();
    let mut edges = 0;
    for (name, model) in &models {
        let n = model.vertex_count();
        let p = model.p().exact().unwrap();
        let want = BigRational::new((*p.numer()).into(), (*p.denom()).into());
        for u in 0..n {
            for v in u + 1..n {
                let predicate = Predicate::HasEdge(u, v);
                let got = exact_event_probability(&ExactEventQuery { model, predicate: &predicate }).unwrap();
                edges += 1;
                if got.as_rational() != Some(&want) {
                    failures.push(format!("{name} edge {u}-{v}: {got} != {want}"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && !models.is_empty(),
        detail: format!("{} models, {edges} edge marginals, mismatches {failures:?}", models.len()),
    }
}

fn dependency_degree() -> Outcome {
    let mut points = 0;
    let mut models = 0;
    let mut failures = Vec::new();
    for n in [5, 8, 12, 20, 30] {
        for d in [0, 1, 3, 8, 15] {
            for p in [ratio(1, 10), ratio(1, 2)] {
                points += 1;
                for (name, model) in constructions(n, p, d, (n * 1000 + d) as u64) {
                    models += 1;
                    let dep = model.dependency_spec();
                    if dep.max_degree() > d || dep.validate().is_err() {
                        failures.push(format!("{name}: max degree {}", dep.max_degree()));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && points == 50,
        detail: format!("{points} grid points, {models} models built, violations {failures:?}"),
    }
}

fn degree_concentration() -> Outcome {
    let er = ExperimentConfig::new(grid(ModelKind::ErdosRenyi, &[2000], &["2 ln(n)/n"], &[0]), 200, 4);
    let star = ExperimentConfig::new(grid(ModelKind::CorrelatedStar, &[2000], &["8 ln(n)/n"], &[7]), 200, 4);
    let rate = |cfg: &ExperimentConfig| {
        let r = degree_violation_rate(cfg, RunOptions::default()).unwrap();
        r.points[0].estimate.as_ref().unwrap().estimate
    };
    let (a, b) = (rate(&er), rate(&star));
    Outcome {
        pass: a <= 0.05 && b <= 0.05,
        detail: format!("violation rate er {a}, correlated-star {b} (limit 0.05)"),
    }
}

fn jumbledness_exact() -> Outcome {
    let c = 10.0;
    let p = 0.3;
    let models = [
        ("er", DistributionModel::erdos_renyi(10, Probability::new(p).unwrap()).unwrap()),
        ("star", DistributionModel::correlated_star(10, Probability::new(p).unwrap(), 3).unwrap()),
        ("gadget", DistributionModel::connectivity_gadget(10, Probability::new(p).unwrap(), 3).unwrap()),
        ("edge-block", DistributionModel::edge_block_exact(10, 1, 3).unwrap()),
        (
            "custom",
            DistributionModel::custom_blocks(10, Probability::new(p).unwrap(), random_blocks(10, 4, 5)).unwrap(),
        ),
    ];
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for (i, (name, model)) in models.iter().enumerate() {
        let (n, p, d) = (model.vertex_count(), model.p().value(), model.d() as u64);
        for t in 0..200 {
            let g = model.sample(trial_seed(5, i as u64, t));
            if g.max_degree() as f64 > c * c / 14.0 * n as f64 * p {
                skipped += 1;
                continue;
            }
            checked += 1;
            if let Some(v) = exhaustive_jumbledness_check(&g, p, d, c).unwrap() {
                failures.push(format!("{name} trial {t}: {v:?}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} samples checked, {skipped} outside the max-degree hypothesis, violations {failures:?}"),
    }
}

fn jumbledness_witness() -> Outcome {
    let r = jumbledness_witness_experiment(4000, spec("0.2"), 39, 100, 6, RunOptions::default()).unwrap();
    let e = r.points[0].estimate.as_ref().unwrap();
    Outcome {
        pass: e.successes >= 90,
        detail: format!("{} of {} trials exceed 0.9 x witness floor (need 90)", e.successes, e.trials),
    }
}

fn connectivity_direction() -> Outcome {
    let connected = Event::Graph(Predicate::Connected);
    let cfg = ExperimentConfig::new(grid(ModelKind::ErdosRenyi, &[200, 500, 1000], &["0.2/n", "2 ln(n)/n"], &[0]), 200, 7)
        .with_event(connected.clone());
    let er = estimate(&cfg);
    let mut pass = true;
    let mut detail = String::new();
    for (i, n) in [200, 500, 1000].iter().enumerate() {
        let (low, high) = (er[2 * i], er[2 * i + 1]);
        pass &= low <= 0.1 && high >= 0.9;
        detail += &format!("er n={n}: P(conn) {low} at 0.2/n, {high} at 2ln(n)/n; ");
    }
    let gadget = ExperimentConfig::new(grid(ModelKind::ConnectivityGadget, &[2000], &["0.5 example(0.1)"], &[15]), 100, 7)
        .with_event(Event::Graph(Predicate::Connected.negate()));
    let disconnected = estimate(&gadget)[0];
    pass &= disconnected >= 0.7;
    detail += &format!("gadget n=2000 d=15: P(not conn) {disconnected} (need 0.7)");
    Outcome { pass, detail }
}

fn containment_bound() -> Outcome {
    let k3 = SubgraphPattern::named("k3").unwrap();
    let trials = 2000u64;
    let mut qualifying = 0;
    let mut failures = Vec::new();
    let mut supplementary = Vec::new();
    let mut min_bound = f64::INFINITY;
    let mut index = 0u64;
    for kind in ["er", "star"] {
        for n in [50usize, 100, 200] {
            for p in [0.1, 0.3, 0.5] {
                for d in [0usize, 3] {
                    index += 1;
                    let prob = Probability::new(p).unwrap();
                    let model = match kind {
                        "er" => DistributionModel::erdos_renyi(n, prob),
                        _ => DistributionModel::correlated_star(n, prob, d),
                    }
                    .unwrap();
                    let bound = 10.0 * phi_functional(&k3, n as u64, p, d as u64).unwrap().phi;
                    min_bound = min_bound.min(bound);
                    let misses = (0..trials)
                        .filter(|&t| !contains_subgraph(&model.sample(trial_seed(8, index, t)), &k3))
                        .count() as u64;
                    let iv = wilson_interval(misses, trials, 0.99);
                    let est = misses as f64 / trials as f64;
                    let limit = bound + 3.0 * iv.half_width();
                    if bound < 0.5 {
                        qualifying += 1;
                        if est > limit {
                            failures.push(format!("{kind} n={n} p={p} d={d}: {est} > {limit}"));
                        }
                    }
                    if est > bound.min(1.0) + 3.0 * iv.half_width() {
                        supplementary.push(format!("{kind} n={n} p={p} d={d}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{qualifying} of 36 grid points have 10*Phi(K3) < 0.5 (smallest 10*Phi {min_bound:.3}); \
             violations {failures:?}; against min(1, 10*Phi) at all points, violations {supplementary:?}"
        ),
    }
}

fn edge_block_exactness() -> Outcome {
    let model = DistributionModel::edge_block_exact(10, 1, 3).unwrap();
    let trials = 100_000u64;
    let mut counts = vec![0u64; 45];
    let mut wrong_size = 0;
    for t in 0..trials {
        let g = model.sample(trial_seed(9, 0, t));
        if g.edge_count() != 15 {
            wrong_size += 1;
        }
        for (u, v) in g.edges() {
            counts[EdgeIndex::from_pair(u, v).get() as usize] += 1;
        }
    }
    let sd = (trials as f64 * 2.0 / 9.0).sqrt();
    let outside: Vec<String> = (0..45)
        .filter(|&k| !wilson_interval(counts[k], trials, 0.99).contains(1.0 / 3.0))
        .map(|k| format!("edge {k} count {} z {:.2}", counts[k], (counts[k] as f64 - trials as f64 / 3.0) / sd))
        .collect();
    Outcome {
        pass: wrong_size == 0 && outside.is_empty(),
        detail: format!(
            "{wrong_size} samples without 15 edges; 99% intervals missing 1/3 (0.45 expected among 45 edges): {outside:?}"
        ),
    }
}

fn oracle_agreement() -> Outcome {
    let k3 = SubgraphPattern::named("k3").unwrap();
    let c4 = SubgraphPattern::named("c4").unwrap();
    let custom = vec![
        vec![EdgeIndex(0), EdgeIndex(1), EdgeIndex(2)],
        vec![EdgeIndex(3), EdgeIndex(4), EdgeIndex(5)],
    ];
    let cases: Vec<(&str, DistributionModel, Predicate)> = vec![
        ("er n=3 p=1/2 connected", DistributionModel::erdos_renyi(3, ratio(1, 2)).unwrap(), Predicate::Connected),
        (
            "star n=3 p=1/2 d=1 contains k3",
            DistributionModel::correlated_star(3, ratio(1, 2), 1).unwrap(),
            Predicate::Contains(k3.clone()),
        ),
        ("er n=4 p=1/2 connected", DistributionModel::erdos_renyi(4, ratio(1, 2)).unwrap(), Predicate::Connected),
        ("er n=5 p=1/3 isolated vertex", DistributionModel::erdos_renyi(5, ratio(1, 3)).unwrap(), Predicate::IsolatedVertex),
        (
            "star n=5 p=1/2 d=1 connected",
            DistributionModel::correlated_star(5, ratio(1, 2), 1).unwrap(),
            Predicate::Connected,
        ),
        (
            "gadget n=5 p=1/2 d=3 connected",
            DistributionModel::connectivity_gadget(5, ratio(1, 2), 3).unwrap(),
            Predicate::Connected,
        ),
        (
            "edge-block n=4 a=1 m=2 contains k3",
            DistributionModel::edge_block_exact(4, 1, 2).unwrap(),
            Predicate::Contains(k3.clone()),
        ),
        ("er n=5 p=1/2 contains c4", DistributionModel::erdos_renyi(5, ratio(1, 2)).unwrap(), Predicate::Contains(c4)),
        (
            "star n=4 p=2/5 d=2 degrees in [1,3]",
            DistributionModel::correlated_star(4, ratio(2, 5), 2).unwrap(),
            Predicate::DegreesInRange { low: 1.0, high: 3.0 },
        ),
        (
            "custom n=4 p=1/2 edge count 3",
            DistributionModel::custom_blocks(4, ratio(1, 2), custom).unwrap(),
            Predicate::EdgeCount(3),
        ),
    ];
    let trials = 100_000u64;
    let mut inside = 0;
    let mut lines = Vec::new();
    let mut anchors_ok = true;
    for (i, (name, model, predicate)) in cases.iter().enumerate() {
        let exact = exact_event_probability(&ExactEventQuery { model, predicate }).unwrap();
        if i == 0 {
            anchors_ok &= exact.equals_ratio(1, 2);
        }
        if i == 1 {
            anchors_ok &= exact.equals_ratio(1, 4);
        }
        let hits = (0..trials)
            .filter(|&t| predicate.evaluate(&model.sample(trial_seed(10, i as u64, t))))
            .count() as u64;
        let iv = wilson_interval(hits, trials, 0.99);
        let ok = iv.contains(exact.to_f64());
        inside += ok as usize;
        lines.push(format!("{name}: exact {exact}, mc {:.5}{}", hits as f64 / trials as f64, if ok { "" } else { " (outside)" }));
    }
    Outcome {
        pass: anchors_ok && inside >= 9,
        detail: format!("{inside} of 10 inside; {}", lines.join("; ")),
    }
}

/// Bitmask of the endpoints of every edge subset of `edges`.
fn endpoint_masks(edges: &[(usize, usize)]) -> Vec<u8> {
    let mut masks = vec![0u8; 1 << edges.len()];
    for s in 1..masks.len() {
        let low = s.trailing_zeros() as usize;
        let (u, v) = edges[low];
        masks[s] = masks[s & (s - 1)] | 1 << u | 1 << v;
    }
    masks
}

fn brute_edge_cover(edges: &[(usize, usize)]) -> usize {
    let masks = endpoint_masks(edges);
    let all = masks[masks.len() - 1];
    (1..masks.len())
        .filter(|&s| masks[s] == all)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

fn brute_density(edges: &[(usize, usize)]) -> (u64, u64) {
    let masks = endpoint_masks(edges);
    let mut best = (0u64, 1u64);
    for s in 1..masks.len() {
        let (e, v) = (s.count_ones() as u64, masks[s].count_ones() as u64);
        if e * best.1 > best.0 * v {
            best = (e, v);
        }
    }
    let g = gcd(best.0, best.1);
    (best.0 / g, best.1 / g)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn brute_clique(g: &Graph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|&s| {
            (0..n).all(|u| (u + 1..n).all(|v| s >> u & 1 == 0 || s >> v & 1 == 0 || g.has_edge(u, v)))
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

fn combinatorial_oracles() -> Outcome {
    let mut rng = rng_from_seed(11);
    let mut failures = Vec::new();
    let mut with_edges = 0;
    for i in 0..500 {
        let n = rng.random_range(1..=7);
        let p: f64 = rng.random_range(0.1..0.9);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        if clique_number(&g) != brute_clique(&g) {
            failures.push(format!("graph {i}: clique {} vs {}", clique_number(&g), brute_clique(&g)));
        }
        let edges: Vec<(usize, usize)> = g.edges().collect();
        if edges.is_empty() {
            continue;
        }
        with_edges += 1;
        let h = SubgraphPattern::from_graph(g);
        let cover = h.edge_cover_number().unwrap();
        if cover != brute_edge_cover(&edges) {
            failures.push(format!("graph {i}: edge cover {cover} vs {}", brute_edge_cover(&edges)));
        }
        let density = h.max_subgraph_density().unwrap().value;
        let want = brute_density(&edges);
        if (*density.numer(), *density.denom()) != want {
            failures.push(format!("graph {i}: density {density} vs {}/{}", want.0, want.1));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("500 graphs ({with_edges} with edges), mismatches {failures:?}"),
    }
}

fn determinism() -> Outcome {
    let sweep = ExperimentConfig::new(
        grid(ModelKind::ErdosRenyi, &[60, 120], &["0.5 ln(n)/n", "ln(n)/n", "2 ln(n)/n"], &[0]),
        300,
        12,
    )
    .with_event(Event::Graph(Predicate::Connected));
    let degrees = ExperimentConfig::new(grid(ModelKind::CorrelatedStar, &[300], &["8 ln(n)/n"], &[3, 7]), 100, 13);
    let mut blocks = grid(ModelKind::EdgeBlockExact, &[16], &[], &[2]);
    blocks.a = Some(1);
    blocks.m = Some(3);
    let cliques = ExperimentConfig::new(blocks, 200, 14);

    type Runner = fn(&ExperimentConfig, RunOptions) -> locdep::Result<ExperimentResult>;
    let runs: [(&str, Runner, &ExperimentConfig); 3] = [
        ("connectivity", estimate_probability, &sweep),
        ("degree-violation", degree_violation_rate, &degrees),
        ("clique", clique_experiment, &cliques),
    ];
    let mut differing = Vec::new();
    for (name, run, cfg) in runs {
        let one = run(cfg, RunOptions::workers(1)).unwrap().to_csv_string();
        let many = run(cfg, RunOptions::workers(4)).unwrap().to_csv_string();
        if one != many {
            differing.push(name);
        }
    }
    Outcome {
        pass: differing.is_empty(),
        detail: format!("3 configs at 1 and 4 workers, differing {differing:?}"),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("janson dominance", Duration::from_secs(1), janson_dominance),
        ("marginal exactness", Duration::from_secs(10), marginal_exactness),
        ("dependency degree", Duration::MAX, dependency_degree),
        ("degree concentration", Duration::from_secs(120), degree_concentration),
        ("jumbledness exact", Duration::from_secs(120), jumbledness_exact),
        ("jumbledness witness", Duration::from_secs(120), jumbledness_witness),
        ("connectivity direction", Duration::from_secs(300), connectivity_direction),
        ("containment bound", Duration::from_secs(300), containment_bound),
        ("edge-block exactness", Duration::from_secs(30), edge_block_exactness),
        ("oracle agreement", Duration::from_secs(60), oracle_agreement),
        ("combinatorial oracles", Duration::from_secs(60), combinatorial_oracles),
        ("determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = outcome.pass && in_time;
        failed += !pass as usize;
        let timing = if *limit == Duration::MAX {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs())
        };
        println!(
            "{} {:>2} {name}: {} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
