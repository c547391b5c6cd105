//! Exact reference computations: latent-state enumeration, binomial tails
//! and exhaustive jumbledness search.
//!
//! Enumeration walks every joint outcome of a model's latents (a mixed-radix
//! counter over `2` per coin and `C(m, a)` per choice), grouping outcomes by
//! the number `k` of coins that came up heads. The weight of a group is
//! `p^k (1-p)^(L-k) / Π C(m, a)`, so integer per-group tallies combine into
//! an exact rational at the end.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{DistributionModel, Latent};
use crate::predicate::{Predicate, Statistic};
use crate::seed::trial_seed;
use crate::stats::binomial_pmf;

/// Largest number of joint latent outcomes the oracle will enumerate.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Largest denominator of `p` for which results are exact rationals.
pub const RATIONAL_DENOMINATOR_LIMIT: u64 = 1 << 16;

/// Largest vertex count accepted by [`exhaustive_jumbledness_check`].
pub const JUMBLEDNESS_MAX_VERTICES: usize = 12;

const CHUNK: u64 = 4096;

/// An exact rational, or a double with an absolute error bound when `p`
/// has no small rational form.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactValue {
    Rational(BigRational),
    Approximate { value: f64, error: f64 },
}

impl ExactValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactValue::Rational(r) => ratio_to_f64(r),
            ExactValue::Approximate { value, .. } => *value,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactValue::Rational(r) => Some(r),
            ExactValue::Approximate { .. } => None,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            ExactValue::Rational(_) => 0.0,
            ExactValue::Approximate { error, .. } => *error,
        }
    }

    /// Whether the value equals `num / den`, up to the error bound for
    /// approximations.
    pub fn equals_ratio(&self, num: u64, den: u64) -> bool {
        match self {
            ExactValue::Rational(r) => *r == BigRational::new(num.into(), den.into()),
            ExactValue::Approximate { value, error } => (value - num as f64 / den as f64).abs() <= *error,
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rationals print as `num/den` (also when `den = 1`).
impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExactValue::Approximate { value, error } => write!(f, "{value} ± {error:e}"),
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExactEventQuery<'a> {
    pub model: &'a DistributionModel,
    pub predicate: &'a Predicate,
}

/// Number of joint latent outcomes of `model`, or a resource-limit error
/// past [`ENUMERATION_BUDGET`].
pub fn outcome_count(model: &DistributionModel) -> Result<u64> {
    let mut total: u64 = 1;
    for view in model.latents() {
        total = total
            .checked_mul(view.outcome_count())
            .filter(|&t| t <= ENUMERATION_BUDGET)
            .ok_or_else(|| {
                Error::budget(format!(
                    "{} latents exceed the enumeration budget of 2^24 joint outcomes",
                    model.latent_count()
                ))
            })?;
    }
    Ok(total)
}

/// Per-latent outcome tables for the mixed-radix walk.
struct Enumerator<'a> {
    model: &'a DistributionModel,
    radices: Vec<u64>,
    /// For each choice latent, every kept-position subset in colex order.
    subsets: Vec<Vec<Vec<u32>>>,
    coins: usize,
    total: u64,
    choice_total: u64,
}

fn subsets_of(m: u32, a: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..a).collect();
    loop {
        out.push(cur.clone());
        let mut i = a as usize;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m - a + i as u32 {
                cur[i] += 1;
                for j in i + 1..a as usize {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl<'a> Enumerator<'a> {
    fn new(model: &'a DistributionModel) -> Result<Self> {
        let total = outcome_count(model)?;
        let mut radices = Vec::new();
        let mut subsets = Vec::new();
        let mut coins = 0;
        let mut choice_total = 1u64;
        for view in model.latents() {
            radices.push(view.outcome_count());
            match view.latent {
                Latent::Coin => {
                    coins += 1;
                    subsets.push(Vec::new());
                }
                Latent::Choice { keep } => {
                    choice_total *= view.outcome_count();
                    subsets.push(subsets_of(view.edges.len() as u32, keep));
                }
            }
        }
        Ok(Enumerator {
            model,
            radices,
            subsets,
            coins,
            total,
            choice_total,
        })
    }

    /// Build the graph for outcome `index` and return the number of heads.
    fn realize(&self, mut index: u64, g: &mut Graph) -> usize {
        g.clear();
        let mut heads = 0;
        for (i, view) in self.model.latents().enumerate() {
            let digit = index % self.radices[i];
            index /= self.radices[i];
            match view.latent {
                Latent::Coin => {
                    if digit == 1 {
                        heads += 1;
                        for &(u, v) in view.edges {
                            g.add_edge(u as usize, v as usize);
                        }
                    }
                }
                Latent::Choice { .. } => {
                    for &pos in &self.subsets[i][digit as usize] {
                        let (u, v) = view.edges[pos as usize];
                        g.add_edge(u as usize, v as usize);
                    }
                }
            }
        }
        heads
    }

    /// Per-head-count sums of `f` and `f²` over all outcomes.
    fn tally<F>(&self, f: F) -> Vec<[u128; 2]>
    where
        F: Fn(&Graph) -> u64 + Sync,
    {
        let width = self.coins + 1;
        let chunks = self.total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![[0u128; 2]; width];
                let mut g = Graph::empty(self.model.vertex_count());
                for index in c * CHUNK..((c + 1) * CHUNK).min(self.total) {
                    let k = self.realize(index, &mut g);
                    let x = f(&g) as u128;
                    acc[k][0] += x;
                    acc[k][1] += x * x;
                }
                acc
            })
            .reduce(
                || vec![[0u128; 2]; width],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x[0] += y[0];
                        x[1] += y[1];
                    }
                    a
                },
            )
    }

    /// `Σ_k sums[k] p^k (1-p)^(L-k) / Π C(m, a)`.
    fn combine(&self, sums: impl Iterator<Item = u128> + Clone) -> ExactValue {
        let p = self.model.p();
        let l = self.coins;
        let rational = match p.exact() {
            Some(r) if *r.denom() <= RATIONAL_DENOMINATOR_LIMIT => Some((*r.numer(), *r.denom())),
            _ if l == 0 => Some((0, 1)),
            _ => None,
        };
        match rational {
            Some((num, den)) => {
                let (num, den) = (BigInt::from(num), BigInt::from(den));
                let rest = &den - &num;
                let mut total = BigInt::zero();
                for (k, s) in sums.enumerate() {
                    if s == 0 {
                        continue;
                    }
                    total += BigInt::from(s) * num.pow(k as u32) * rest.pow((l - k) as u32);
                }
                let denom = den.pow(l as u32) * BigInt::from(self.choice_total);
                ExactValue::Rational(BigRational::new(total, denom))
            }
            None => {
                let pv = p.value();
                let mut value = 0.0;
                let mut magnitude = 0.0;
                for (k, s) in sums.enumerate() {
                    let term = s as f64 * pv.powi(k as i32) * (1.0 - pv).powi((l - k) as i32);
                    value += term;
                    magnitude += term.abs();
                }
                let value = value / self.choice_total as f64;
                let magnitude = magnitude / self.choice_total as f64;
                let error = (2 * l + 8) as f64 * f64::EPSILON * magnitude;
                ExactValue::Approximate { value, error }
            }
        }
    }
}

/// Probability that the query's predicate holds, summed over every latent
/// assignment.
pub fn exact_event_probability(q: &ExactEventQuery<'_>) -> Result<ExactValue> {
    q.predicate.validate(q.model.vertex_count())?;
    let e = Enumerator::new(q.model)?;
    let sums = e.tally(|g| q.predicate.evaluate(g) as u64);
    Ok(e.combine(sums.iter().map(|s| s[0])))
}

/// Exact mean and variance of an integer statistic.
pub fn exact_moments(model: &DistributionModel, statistic: &Statistic) -> Result<(ExactValue, ExactValue)> {
    statistic.validate(model.vertex_count())?;
    let e = Enumerator::new(model)?;
    let sums = e.tally(|g| statistic.evaluate(g));
    let mean = e.combine(sums.iter().map(|s| s[0]));
    let second = e.combine(sums.iter().map(|s| s[1]));
    let variance = match (&mean, &second) {
        (ExactValue::Rational(m), ExactValue::Rational(s)) => ExactValue::Rational(s - m * m),
        _ => {
            let (m, s) = (mean.to_f64(), second.to_f64());
            ExactValue::Approximate {
                value: s - m * m,
                error: second.error() + 2.0 * m.abs() * mean.error() + mean.error().powi(2),
            }
        }
    };
    Ok((mean, variance))
}

/// `P(|X - Np| >= t)` for `X ~ Bin(N, p)`, by direct summation of the
/// probability mass in log space.
pub fn exact_binomial_two_sided_tail(n: u64, p: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mean = n as f64 * p;
    let tail: f64 = (0..=n)
        .filter(|&k| (k as f64 - mean).abs() >= t)
        .map(|k| binomial_pmf(n, p, k))
        .sum();
    tail.clamp(0.0, 1.0)
}

/// The pair `(A, B)` with the largest excess
/// `|e(A,B) - p|A||B|| - C sqrt(|A||B| n p (d+1))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumbleViolation {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub edges: usize,
    pub deviation: f64,
    pub bound: f64,
}

impl JumbleViolation {
    pub fn excess(&self) -> f64 {
        self.deviation - self.bound
    }
}

/// Search all `4^n` pairs `(A, B)` of vertex subsets and return the worst
/// one if its excess is positive. Ties go to the smallest `(B, A)` masks.
pub fn exhaustive_jumbledness_check(g: &Graph, p: f64, d: u64, c: f64) -> Result<Option<JumbleViolation>> {
    let n = g.vertex_count();
    if n > JUMBLEDNESS_MAX_VERTICES {
        return Err(Error::budget(format!(
            "exhaustive jumbledness search is limited to n <= {JUMBLEDNESS_MAX_VERTICES} (n = {n})"
        )));
    }
    let scale = n as f64 * p * (d + 1) as f64;
    let rows: Vec<u64> = (0..n).map(|v| g.row(v)[0]).collect();
    let size = 1usize << n;

    let best = (0..size as u64)
        .into_par_iter()
        .map(|b_mask| {
            let b_len = b_mask.count_ones() as f64;
            let mut sums = vec![0u32; size];
            let mut best: Option<(f64, u64)> = None;
            for a_mask in 1..size {
                let low = a_mask.trailing_zeros() as usize;
                sums[a_mask] = sums[a_mask & (a_mask - 1)] + (rows[low] & b_mask).count_ones();
                let a_len = a_mask.count_ones() as f64;
                let dev = (sums[a_mask] as f64 - p * a_len * b_len).abs();
                let excess = dev - c * (a_len * b_len * scale).sqrt();
                if best.is_none_or(|(e, _)| excess > e) {
                    best = Some((excess, a_mask as u64));
                }
            }
            best.map(|(e, a)| (e, b_mask, a))
        })
        .flatten()
        .reduce_with(|x, y| {
            let later_wins = y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2));
            if later_wins {
                y
            } else {
                x
            }
        });

    Ok(best.filter(|&(excess, _, _)| excess > 0.0).map(|(_, b_mask, a_mask)| {
        let bits = |m: u64| (0..n).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>();
        let (a, b) = (bits(a_mask), bits(b_mask));
        let edges: usize = a.iter().map(|&v| (rows[v] & b_mask).count_ones() as usize).sum();
        let (al, bl) = (a.len() as f64, b.len() as f64);
        JumbleViolation {
            edges,
            deviation: (edges as f64 - p * al * bl).abs(),
            bound: c * (al * bl * scale).sqrt(),
            a,
            b,
        }
    }))
}

/// Empirical against exact moments of a statistic.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub statistic: String,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub exact_mean: Option<ExactValue>,
    pub exact_variance: Option<ExactValue>,
    /// Empirical mean more than four standard errors from the exact mean.
    pub mean_flag: bool,
    pub variance_flag: bool,
}

/// Flag distance, in standard errors.
pub const MOMENT_FLAG_SE: f64 = 4.0;

/// Sample `trials` graphs (trial `i` uses `trial_seed(seed, 0, i)`) and
/// compare mean and variance of the statistic with exact values, when the
/// model is small enough to enumerate.
pub fn mean_variance_check(
    model: &DistributionModel,
    statistic: &Statistic,
    trials: u64,
    seed: u64,
) -> Result<MomentReport> {
    if trials < 2 {
        return Err(Error::invalid("mean/variance check needs at least 2 trials"));
    }
    statistic.validate(model.vertex_count())?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map_init(
            || Graph::empty(model.vertex_count()),
            |g, i| {
                model.sample_into(trial_seed(seed, 0, i), g);
                statistic.evaluate(g) as f64
            },
        )
        .collect();
    let nt = trials as f64;
    let mean = values.iter().sum::<f64>() / nt;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nt;
    let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nt;
    let variance = m2 * nt / (nt - 1.0);
    let mean_se = (variance / nt).sqrt();
    let variance_se = ((m4 - m2 * m2 * (nt - 3.0) / (nt - 1.0)).max(0.0) / nt).sqrt();

    let exact = match exact_moments(model, statistic) {
        Ok(m) => Some(m),
        Err(Error::ResourceLimit(_)) => None,
        Err(e) => return Err(e),
    };
    let flag = |emp: f64, exact: Option<&ExactValue>, se: f64| {
        exact.is_some_and(|x| (emp - x.to_f64()).abs() > MOMENT_FLAG_SE * se + x.error())
    };
    let (exact_mean, exact_variance) = exact.unzip();
    Ok(MomentReport {
        statistic: statistic.to_string(),
        trials,
        seed,
        mean,
        mean_se,
        variance,
        variance_se,
        mean_flag: flag(mean, exact_mean.as_ref(), mean_se),
        variance_flag: flag(variance, exact_variance.as_ref(), variance_se),
        exact_mean,
        exact_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::SubgraphPattern;
    use crate::probability::Probability;

    fn half() -> Probability {
        Probability::ratio(1, 2).unwrap()
    }

    fn prob(model: &DistributionModel, predicate: &Predicate) -> ExactValue {
        exact_event_probability(&ExactEventQuery { model, predicate }).unwrap()
    }

    #[test]
    fn colex_subsets() {
        assert_eq!(subsets_of(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(subsets_of(4, 2).len(), 6);
        assert_eq!(subsets_of(2, 2), vec![vec![0, 1]]);
        assert_eq!(subsets_of(4, 0), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn small_model_examples() {
        let er = DistributionModel::erdos_renyi(3, half()).unwrap();
        assert_eq!(prob(&er, &Predicate::Connected).to_string(), "1/2");
        assert_eq!(prob(&er, &Predicate::Always).to_string(), "1/1");
        let k3 = Predicate::Contains(SubgraphPattern::named("k3").unwrap());
        assert_eq!(prob(&er, &k3).to_string(), "1/8");

        let star = DistributionModel::correlated_star(3, half(), 1).unwrap();
        assert_eq!(prob(&star, &k3).to_string(), "1/4");
        let star4 = DistributionModel::correlated_star(4, half(), 1).unwrap();
        let both = Predicate::All(vec![Predicate::HasEdge(0, 2), Predicate::HasEdge(1, 2)]);
        assert_eq!(prob(&star4, &both).to_string(), "1/2");

        let blocks = DistributionModel::edge_block_exact(4, 1, 3).unwrap();
        for (u, v) in Graph::complete(4).edges() {
            assert_eq!(prob(&blocks, &Predicate::HasEdge(u, v)).to_string(), "1/3");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let er = DistributionModel::erdos_renyi(50, half()).unwrap();
        let q = ExactEventQuery {
            model: &er,
            predicate: &Predicate::Connected,
        };
        assert!(matches!(exact_event_probability(&q), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn float_probability_path() {
        let er = DistributionModel::erdos_renyi(3, Probability::new(0.3).unwrap()).unwrap();
        let v = prob(&er, &Predicate::EdgeCount(3));
        assert!(v.as_rational().is_none());
        assert!((v.to_f64() - 0.027).abs() <= v.error() + 1e-15);
        let big_den = Probability::ratio(1, 100_003).unwrap();
        let er = DistributionModel::erdos_renyi(2, big_den).unwrap();
        assert!(prob(&er, &Predicate::Always).as_rational().is_none());
    }

    #[test]
    fn binomial_tail_examples() {
        assert_eq!(exact_binomial_two_sided_tail(10, 0.3, 0.0), 1.0);
        assert!((exact_binomial_two_sided_tail(2, 0.5, 1.0) - 0.5).abs() < 1e-15);
        let direct: f64 = (0..=100u64)
            .filter(|&k| (k as f64 - 30.0).abs() >= 15.0)
            .map(|k| binomial_pmf(100, 0.3, k))
            .sum();
        assert_eq!(exact_binomial_two_sided_tail(100, 0.3, 15.0), direct);
    }

    #[test]
    fn jumbledness_examples() {
        assert!(exhaustive_jumbledness_check(&Graph::empty(5), 0.0, 0, 1.0).unwrap().is_none());
        assert!(exhaustive_jumbledness_check(&Graph::complete(4), 1.0, 0, 1.0).unwrap().is_none());
        let v = exhaustive_jumbledness_check(&Graph::complete(4), 0.01, 0, 1.0)
            .unwrap()
            .expect("violation");
        assert_eq!((v.a.len(), v.b.len(), v.edges), (4, 4, 12));
        assert!((v.deviation - 11.84).abs() < 1e-12);
        assert!((v.bound - 0.8).abs() < 1e-12);
        assert!(exhaustive_jumbledness_check(&Graph::empty(13), 0.5, 0, 1.0).is_err());
    }

    #[test]
    fn moments_examples() {
        let blocks = DistributionModel::edge_block_exact(4, 1, 2).unwrap();
        let (mean, var) = exact_moments(&blocks, &Statistic::EdgeCount).unwrap();
        assert_eq!((mean.to_string(), var.to_string()), ("3/1".to_string(), "0/1".to_string()));

        let star = DistributionModel::correlated_star(4, half(), 1).unwrap();
        let e2s = Statistic::EdgesBetween { a: vec![2], b: vec![0, 1] };
        let (mean, var) = exact_moments(&star, &e2s).unwrap();
        assert_eq!((mean.to_string(), var.to_string()), ("1/1".to_string(), "1/1".to_string()));

        let r = mean_variance_check(&blocks, &Statistic::EdgeCount, 500, 3).unwrap();
        assert_eq!((r.mean, r.variance), (3.0, 0.0));
        assert!(!r.mean_flag && !r.variance_flag);
        let r = mean_variance_check(&star, &e2s, 4000, 11).unwrap();
        assert!(!r.mean_flag && !r.variance_flag, "{r:?}");
    }
}
