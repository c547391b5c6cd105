//! Closed-form tail bounds, thresholds and functionals for d-dependent
//! random graphs, evaluated in double precision.
//!
//! Probability-type bounds are returned exactly as computed, including
//! values of 1 or more; [`BoundReport::vacuous`] marks those.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{SubgraphPattern, MAX_PATTERN_EDGES};

/// `φ(x) = (1 + x) ln(1 + x) - x`.
pub fn bennett_phi(x: f64) -> f64 {
    (1.0 + x) * x.ln_1p() - x
}

/// Janson/Bernstein form: `2 exp(-8t² / (50 (d+1) (μ + t/3)))`.
pub fn janson_bernstein(mu: f64, t: f64, d: u64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("deviation t must be positive (t = {t})")));
    }
    if !(mu >= 0.0) {
        return Err(Error::invalid(format!("mean must be nonnegative (mu = {mu})")));
    }
    let d1 = (d + 1) as f64;
    Ok(2.0 * (-8.0 * t * t / (50.0 * d1 * (mu + t / 3.0))).exp())
}

/// Janson/Bennett form: `2 exp(-(μ / (2(d+1))) φ(4t / (5μ)))`.
pub fn janson_phi(mu: f64, t: f64, d: u64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mean must be positive (mu = {mu})")));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("deviation t must be positive (t = {t})")));
    }
    let d1 = (d + 1) as f64;
    Ok(2.0 * (-(mu / (2.0 * d1)) * bennett_phi(4.0 * t / (5.0 * mu))).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeInterval {
    pub low: f64,
    pub high: f64,
    /// Whether `p >= (d+1) ln(n) / n`.
    pub hypothesis: bool,
}

impl DegreeInterval {
    pub fn contains(&self, degree: usize) -> bool {
        let x = degree as f64;
        self.low <= x && x <= self.high
    }
}

/// `np ± 4 sqrt(np (d+1) ln n)`.
pub fn degree_interval(n: u64, p: f64, d: u64) -> Result<DegreeInterval> {
    if n == 0 {
        return Err(Error::invalid("degree interval needs n >= 1"));
    }
    let (nf, d1) = (n as f64, (d + 1) as f64);
    let np = nf * p;
    let spread = 4.0 * (np * d1 * nf.ln()).sqrt();
    Ok(DegreeInterval {
        low: np - spread,
        high: np + spread,
        hypothesis: p >= d1 * nf.ln() / nf,
    })
}

/// `C sqrt(a b n p (d+1))`, the allowed deviation of `e(A, B)` from
/// `p|A||B|` for `|A| = a`, `|B| = b`. The guarantee needs `C >= 10`; smaller
/// constants are evaluated anyway.
pub fn jumbledness_deviation(a: u64, b: u64, n: u64, p: f64, d: u64, c: f64) -> Result<f64> {
    if a == 0 || b == 0 || a > n || b > n {
        return Err(Error::invalid(format!("set sizes must lie in [1, n] (a = {a}, b = {b}, n = {n})")));
    }
    Ok(c * (a as f64 * b as f64 * n as f64 * p * (d + 1) as f64).sqrt())
}

/// `(1-p) sqrt(1 - d/n) sqrt(s b n p (d+1))`: the lower witness for
/// jumbledness without its `1 - o(1)` factor. Needs `d < 0.99 n`.
pub fn jumbledness_witness_floor(s: u64, b: u64, n: u64, p: f64, d: u64) -> Result<f64> {
    let (nf, df) = (n as f64, d as f64);
    if !(df < 0.99 * nf) {
        return Err(Error::invalid(format!("witness floor needs d < 0.99 n (d = {d}, n = {n})")));
    }
    Ok((1.0 - p) * (1.0 - df / nf).sqrt() * (s as f64 * b as f64 * nf * p * (df + 1.0)).sqrt())
}

/// `(d+1)(ln n + f) / n`: above this every d-dependent graph is connected
/// almost surely when `f → ∞`.
pub fn connectivity_upper_threshold(n: u64, d: u64, fval: f64) -> f64 {
    let nf = n as f64;
    (d + 1) as f64 * (nf.ln() + fval) / nf
}

/// Cut-off below which `d ln(n) / n` counts as small for
/// [`connectivity_example_threshold`].
pub const SMALL_DEPENDENCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExampleThreshold {
    pub value: f64,
    /// Whether `d ln(n) / n <= SMALL_DEPENDENCE`.
    pub small_dependence: bool,
}

/// `(1-ε)(d+1) ln(n / sqrt(d+1)) / n`: below this the connectivity gadget
/// is disconnected almost surely.
pub fn connectivity_example_threshold(n: u64, d: u64, eps: f64) -> Result<ExampleThreshold> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1) (eps = {eps})")));
    }
    let (nf, d1) = (n as f64, (d + 1) as f64);
    if n == 0 || d1 > nf * nf {
        return Err(Error::invalid(format!("need d + 1 <= n² (d = {d}, n = {n})")));
    }
    Ok(ExampleThreshold {
        value: (1.0 - eps) * d1 * (nf / d1.sqrt()).ln() / nf,
        small_dependence: d as f64 * nf.ln() / nf <= SMALL_DEPENDENCE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiReport {
    pub phi: f64,
    /// `10 Φ(H)`, the bound on the probability of containing no copy of H.
    pub containment_bound: f64,
    /// Whether `d |E(H)| |V(H)| / n < 0.9`.
    pub hypothesis: bool,
}

/// The containment functional
/// `Φ(H) = Σ_Γ (20|V(H)|/n)^|V(Γ)| (d+1)^f(Γ) / p^|E(Γ)|`
/// over all nonempty edge subsets `Γ` of `H`, with `f` the edge cover
/// number.
pub fn phi_functional(h: &SubgraphPattern, n: u64, p: f64, d: u64) -> Result<PhiReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("phi needs 0 < p <= 1 (p = {p})")));
    }
    if h.edge_count() == 0 {
        return Err(Error::invalid("phi needs a pattern with at least one edge"));
    }
    if h.edge_count() > MAX_PATTERN_EDGES {
        return Err(Error::budget(format!(
            "phi sums over 2^{} edge subsets; at most {MAX_PATTERN_EDGES} edges are supported",
            h.edge_count()
        )));
    }
    if h.vertex_count() > crate::pattern::MAX_PATTERN_VERTICES {
        return Err(Error::budget("pattern has too many vertices"));
    }
    let scale = 20.0 * h.vertex_count() as f64 / n as f64;
    let d1 = (d + 1) as f64;
    let mut phi = 0.0;
    for mask in 1u64..(1 << h.edge_count()) {
        let (vertices, edges) = h.subset_shape(mask);
        let cover = h.subset_edge_cover(mask);
        phi += scale.powi(vertices.count_ones() as i32) * d1.powi(cover as i32) / p.powi(edges as i32);
    }
    let hyp = d as f64 * h.edge_count() as f64 * h.vertex_count() as f64 / n as f64;
    Ok(PhiReport {
        phi,
        containment_bound: 10.0 * phi,
        hypothesis: hyp < 0.9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CliqueBounds {
    pub low: f64,
    pub high: f64,
    /// Whether `d / sqrt(n) <= slack · p` and `p <= 1/4`.
    pub hypothesis: bool,
}

/// `(C1 ln n / ln(1/p), C2 (d+1) ln n / ln(1/p))`.
pub fn clique_bounds(n: u64, p: f64, d: u64, c1: f64, c2: f64, slack: f64) -> Result<CliqueBounds> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("clique bounds need 0 < p < 1 (p = {p})")));
    }
    let nf = n as f64;
    let base = nf.ln() / (1.0 / p).ln();
    Ok(CliqueBounds {
        low: c1 * base,
        high: c2 * (d + 1) as f64 * base,
        hypothesis: d as f64 / nf.sqrt() <= slack * p && p <= 0.25,
    })
}

/// Names accepted by [`evaluate`].
pub const BOUND_NAMES: &[&str] = &[
    "janson-bernstein",
    "janson-phi",
    "degree-interval",
    "jumbledness-deviation",
    "jumbledness-witness-floor",
    "connectivity-upper",
    "connectivity-example",
    "phi",
    "clique-bounds",
];

/// Parameters for [`evaluate`]; each bound reads the fields it needs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: Option<u64>,
    pub p: Option<f64>,
    pub d: Option<u64>,
    pub mu: Option<f64>,
    pub t: Option<f64>,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub s: Option<u64>,
    pub c: Option<f64>,
    pub fval: Option<f64>,
    pub eps: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub slack: Option<f64>,
    pub pattern: Option<SubgraphPattern>,
}

/// One evaluated bound, as written to CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub value: f64,
    /// Set for probability bounds: whether the value is at least 1.
    pub vacuous: Option<bool>,
    /// Set when the bound carries a checkable hypothesis.
    pub hypothesis: Option<bool>,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 5] = ["name", "params", "value", "vacuous", "hypothesis"];

    fn row(&self) -> [String; 5] {
        let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        [
            self.name.clone(),
            params.join(";"),
            self.value.to_string(),
            flag(self.vacuous),
            flag(self.hypothesis),
        ]
    }
}

pub fn write_reports_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BoundReport::CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        w.write_record(r.row()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(format!("{other:?}")),
    }
}

/// Evaluate a bound by name. Missing optional constants default to
/// `C = 10`, `C1 = C2 = 1`, `slack = 1`, `fval = 0`, `eps = 0.1`.
pub fn evaluate(name: &str, q: &BoundParams) -> Result<Vec<BoundReport>> {
    fn req<T: Copy>(v: Option<T>, field: &str, bound: &str) -> Result<T> {
        v.ok_or_else(|| Error::invalid(format!("bound {bound} needs --{field}")))
    }
    let n = || req(q.n, "n", name);
    let p = || req(q.p, "p", name);
    let d = q.d.unwrap_or(0);
    let mut params: Vec<(String, String)> = Vec::new();
    let mut record = |k: &str, v: String| params.push((k.to_string(), v));

    let one = |value: f64, vacuous: Option<bool>, hypothesis: Option<bool>, params: Vec<(String, String)>| {
        BoundReport {
            name: name.to_string(),
            params,
            value,
            vacuous,
            hypothesis,
        }
    };
    let reports = match name {
        "janson-bernstein" | "janson-phi" => {
            let (mu, t) = (req(q.mu, "mu", name)?, req(q.t, "t", name)?);
            record("mu", mu.to_string());
            record("t", t.to_string());
            record("d", d.to_string());
            let v = if name == "janson-bernstein" {
                janson_bernstein(mu, t, d)?
            } else {
                janson_phi(mu, t, d)?
            };
            vec![one(v, Some(v >= 1.0), None, params)]
        }
        "degree-interval" => {
            let (n, p) = (n()?, p()?);
            record("n", n.to_string());
            record("p", p.to_string());
            record("d", d.to_string());
            let iv = degree_interval(n, p, d)?;
            vec![
                BoundReport {
                    name: format!("{name}.low"),
                    ..one(iv.low, None, Some(iv.hypothesis), params.clone())
                },
                BoundReport {
                    name: format!("{name}.high"),
                    ..one(iv.high, None, Some(iv.hypothesis), params)
                },
            ]
        }
        "jumbledness-deviation" => {
            let (n, p) = (n()?, p()?);
            let (a, b, c) = (req(q.a, "a", name)?, req(q.b, "b", name)?, q.c.unwrap_or(10.0));
            for (k, v) in [("a", a.to_string()), ("b", b.to_string()), ("n", n.to_string())] {
                record(k, v);
            }
            record("p", p.to_string());
            record("d", d.to_string());
            record("c", c.to_string());
            let v = jumbledness_deviation(a, b, n, p, d, c)?;
            vec![one(v, None, Some(c >= 10.0), params)]
        }
        "jumbledness-witness-floor" => {
            let (n, p) = (n()?, p()?);
            let (s, b) = (req(q.s, "s", name)?, req(q.b, "b", name)?);
            for (k, v) in [("s", s.to_string()), ("b", b.to_string()), ("n", n.to_string())] {
                record(k, v);
            }
            record("p", p.to_string());
            record("d", d.to_string());
            vec![one(jumbledness_witness_floor(s, b, n, p, d)?, None, None, params)]
        }
        "connectivity-upper" => {
            let (n, fval) = (n()?, q.fval.unwrap_or(0.0));
            record("n", n.to_string());
            record("d", d.to_string());
            record("fval", fval.to_string());
            vec![one(connectivity_upper_threshold(n, d, fval), None, None, params)]
        }
        "connectivity-example" => {
            let (n, eps) = (n()?, q.eps.unwrap_or(0.1));
            record("n", n.to_string());
            record("d", d.to_string());
            record("eps", eps.to_string());
            let th = connectivity_example_threshold(n, d, eps)?;
            vec![one(th.value, None, Some(th.small_dependence), params)]
        }
        "phi" => {
            let (n, p) = (n()?, p()?);
            let h = q
                .pattern
                .as_ref()
                .ok_or_else(|| Error::invalid("bound phi needs --pattern"))?;
            record("pattern", h.to_string());
            record("n", n.to_string());
            record("p", p.to_string());
            record("d", d.to_string());
            let r = phi_functional(h, n, p, d)?;
            vec![
                one(r.phi, None, Some(r.hypothesis), params.clone()),
                BoundReport {
                    name: "phi.containment".to_string(),
                    ..one(r.containment_bound, Some(r.containment_bound >= 1.0), Some(r.hypothesis), params)
                },
            ]
        }
        "clique-bounds" => {
            let (n, p) = (n()?, p()?);
            let (c1, c2, slack) = (q.c1.unwrap_or(1.0), q.c2.unwrap_or(1.0), q.slack.unwrap_or(1.0));
            record("n", n.to_string());
            record("p", p.to_string());
            record("d", d.to_string());
            record("c1", c1.to_string());
            record("c2", c2.to_string());
            record("slack", slack.to_string());
            let cb = clique_bounds(n, p, d, c1, c2, slack)?;
            vec![
                BoundReport {
                    name: format!("{name}.low"),
                    ..one(cb.low, None, Some(cb.hypothesis), params.clone())
                },
                BoundReport {
                    name: format!("{name}.high"),
                    ..one(cb.high, None, Some(cb.hypothesis), params)
                },
            ]
        }
        _ => {
            return Err(Error::invalid(format!(
                "unknown bound {name:?}; available: {}",
                BOUND_NAMES.join(", ")
            )))
        }
    };
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn bernstein_examples() {
        let v = janson_bernstein(10.0, 1e-9, 0).unwrap();
        assert!(v <= 2.0 && v > 2.0 - 1e-9);
        // 50 · (100 + 50/3) = 5833.33..; 8 · 2500 = 20000.
        let v = janson_bernstein(100.0, 50.0, 0).unwrap();
        assert!(close(v, 2.0 * (-20000.0f64 / (50.0 * (100.0 + 50.0 / 3.0))).exp()));
        assert!(close(v, 2.0 * (-3.428_571_428_571_428_6f64).exp()));
        // Going from d + 1 = 1 to d + 1 = 2 halves the exponent.
        let e0 = (janson_bernstein(40.0, 7.0, 0).unwrap() / 2.0).ln();
        let e1 = (janson_bernstein(40.0, 7.0, 1).unwrap() / 2.0).ln();
        assert!(close(e1, e0 / 2.0));
        assert!(janson_bernstein(1.0, 0.0, 0).is_err());
        assert!(janson_bernstein(-1.0, 1.0, 0).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(bennett_phi(0.0), 0.0);
        assert!(close(bennett_phi(E - 1.0), 1.0));
        assert!(close(bennett_phi(1.0), 2.0 * LN_2 - 1.0));
        let v = janson_phi(100.0, 125.0, 0).unwrap();
        assert!(close(v, 2.0 * (-50.0 * (2.0 * LN_2 - 1.0)).exp()));
        let near_zero = janson_phi(10.0, 1e-12, 0).unwrap();
        assert!(near_zero > 2.0 - 1e-9);
        assert!(janson_phi(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn phi_is_convex_nonnegative_on_grid() {
        let h = 1e-3;
        for i in 0..5000 {
            let x = i as f64 * 0.01;
            assert!(bennett_phi(x) >= 0.0);
            let second = bennett_phi(x + h) - 2.0 * bennett_phi(x + 2.0 * h) + bennett_phi(x + 3.0 * h);
            assert!(second >= -1e-12, "x = {x}: {second}");
        }
    }

    #[test]
    fn bounds_monotone_in_t_and_d() {
        for &mu in &[0.5, 5.0, 50.0, 500.0] {
            for d in 0..4u64 {
                let mut prev = (f64::INFINITY, f64::INFINITY);
                for i in 1..200 {
                    let t = i as f64 * mu / 40.0;
                    let cur = (janson_bernstein(mu, t, d).unwrap(), janson_phi(mu, t, d).unwrap());
                    assert!(cur.0 <= prev.0 && cur.1 <= prev.1);
                    let next_d = (janson_bernstein(mu, t, d + 1).unwrap(), janson_phi(mu, t, d + 1).unwrap());
                    assert!(next_d.0 >= cur.0 && next_d.1 >= cur.1);
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn degree_interval_examples() {
        let z = degree_interval(2, 0.0, 0).unwrap();
        assert_eq!((z.low, z.high), (0.0, 0.0));
        let spread = 4.0 * (10_000.0f64 * 0.01 * 4.0 * (10_000.0f64).ln()).sqrt();
        let iv = degree_interval(10_000, 0.01, 3).unwrap();
        assert!(close(iv.low, 100.0 - spread) && close(iv.high, 100.0 + spread));
        assert!(close(spread, 4.0 * (400.0 * 4.0 * 10f64.ln()).sqrt()));
        assert!(iv.hypothesis);
        assert!(!degree_interval(10_000, 0.003, 3).unwrap().hypothesis);
    }

    #[test]
    fn jumbledness_examples() {
        assert_eq!(jumbledness_deviation(3, 4, 10, 0.0, 2, 10.0).unwrap(), 0.0);
        let n = 50u64;
        let v = jumbledness_deviation(n, n, n, 0.2, 0, 10.0).unwrap();
        assert!(close(v, 10.0 * n as f64 * (n as f64 * 0.2).sqrt()));
        let base = jumbledness_deviation(5, 7, 20, 0.3, 0, 10.0).unwrap();
        let quad = jumbledness_deviation(5, 7, 20, 0.3, 3, 10.0).unwrap();
        assert!(close(quad, 2.0 * base));
        assert!(jumbledness_deviation(0, 1, 5, 0.5, 0, 10.0).is_err());

        assert_eq!(jumbledness_witness_floor(4, 9, 100, 1.0, 3).unwrap(), 0.0);
        let d0 = jumbledness_witness_floor(4, 9, 100, 0.3, 0).unwrap();
        assert!(close(d0, 0.7 * (4.0f64 * 9.0 * 100.0 * 0.3).sqrt()));
        let v = jumbledness_witness_floor(10, 99, 1000, 0.1, 9).unwrap();
        assert!(close(v, 0.9 * (0.991f64).sqrt() * (10.0f64 * 99.0 * 1000.0 * 0.1 * 10.0).sqrt()));
        assert!(jumbledness_witness_floor(1, 1, 100, 0.5, 99).is_err());
    }

    #[test]
    fn connectivity_threshold_examples() {
        let d0 = connectivity_upper_threshold(1000, 0, 2.0);
        assert!(close(connectivity_upper_threshold(1000, 1, 2.0), 2.0 * d0));
        let n = 1_000_000f64;
        let v = connectivity_upper_threshold(1_000_000, 0, n.ln().ln());
        assert!(close(v, (n.ln() + n.ln().ln()) / n));

        let t = connectivity_example_threshold(10_000, 15, 0.1).unwrap();
        assert!(close(t.value, 0.9 * 16.0 * 2500f64.ln() / 10_000.0));
        let t0 = connectivity_example_threshold(500, 0, 0.25).unwrap();
        assert!(close(t0.value, 0.75 * 500f64.ln() / 500.0));
        let t1 = connectivity_example_threshold(500, 3, 1.0 - 1e-12).unwrap();
        assert!(t1.value.abs() < 1e-12);
        assert!(connectivity_example_threshold(500, 3, 0.0).is_err());
    }

    #[test]
    fn phi_single_edge_closed_form() {
        let h = SubgraphPattern::named("k2").unwrap();
        for &(n, p, d) in &[(100u64, 0.5, 0u64), (1000, 0.01, 7), (40, 1.0, 2)] {
            let r = phi_functional(&h, n, p, d).unwrap();
            let expect = (40.0 / n as f64).powi(2) * (d + 1) as f64 / p;
            assert!(close(r.phi, expect));
            assert!(close(r.containment_bound, 10.0 * expect));
        }
        assert!(phi_functional(&h, 10, 0.0, 0).is_err());
    }

    #[test]
    fn phi_triangle_term_groups() {
        // Per the worked triangle example the three subset classes scale as
        // n^-2 p^-1, n^-3 p^-2 and n^-3 p^-3 (times powers of d+1).
        let k3 = SubgraphPattern::named("k3").unwrap();
        let s = 60.0f64;
        for &(n, p, d) in &[(100u64, 0.5, 0u64), (1000, 0.05, 3)] {
            let (nf, d1) = (n as f64, (d + 1) as f64);
            let expect = 3.0 * (s / nf).powi(2) * d1 / p
                + 3.0 * (s / nf).powi(3) * d1 * d1 / (p * p)
                + (s / nf).powi(3) * d1 * d1 / (p * p * p);
            assert!(close(phi_functional(&k3, n, p, d).unwrap().phi, expect));
        }
    }

    #[test]
    fn phi_monotone_grid() {
        let k3 = SubgraphPattern::named("k3").unwrap();
        let c4 = SubgraphPattern::named("c4").unwrap();
        for h in [&k3, &c4] {
            for d in 0..4u64 {
                let mut prev = f64::INFINITY;
                for i in 1..=20 {
                    let p = i as f64 / 20.0;
                    let v = phi_functional(h, 200, p, d).unwrap().phi;
                    assert!(v < prev);
                    assert!(phi_functional(h, 200, p, d + 1).unwrap().phi > v);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn clique_bound_examples() {
        let cb = clique_bounds(1000, 0.2, 0, 0.5, 3.0, 1.0).unwrap();
        assert!(close(cb.high / cb.low, 6.0));
        let cb = clique_bounds(1_000_000, 0.25, 3, 1.0, 1.0, 1.0).unwrap();
        let base = (1e6f64).ln() / 4f64.ln();
        assert!(close(cb.low, base) && close(cb.high, 4.0 * base));
        assert!(cb.hypothesis);
        assert!(clique_bounds(10, 1.0, 0, 1.0, 1.0, 1.0).is_err());
        assert!(clique_bounds(10, 0.0, 0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn evaluate_by_name() {
        let q = BoundParams {
            n: Some(2),
            p: Some(0.0),
            ..Default::default()
        };
        let r = evaluate("degree-interval", &q).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].value, r[1].value), (0.0, 0.0));
        assert!(matches!(evaluate("nosuch", &q), Err(Error::InvalidArgument(_))));
        assert!(evaluate("janson-phi", &q).is_err());

        let q = BoundParams {
            mu: Some(10.0),
            t: Some(1e-9),
            ..Default::default()
        };
        let r = evaluate("janson-bernstein", &q).unwrap();
        assert_eq!(r[0].vacuous, Some(true));

        let mut buf = Vec::new();
        write_reports_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("name,params,value,vacuous,hypothesis\njanson-bernstein,mu=10;t=0.000000001;d=0,"));
    }
}
