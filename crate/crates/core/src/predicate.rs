//! Named graph events and integer-valued graph statistics.
//!
//! Both have a compact text form used in config files and on the command
//! line, e.g. `connected`, `contains:k3`, `not:contains:c4`,
//! `has-edge:0-1`, `deviation:0,1|2,3:1/2:1.5`, `edges-between:0|1,2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clique::clique_number;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::pattern::{contains_subgraph, SubgraphPattern};

#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Always,
    Connected,
    Contains(SubgraphPattern),
    HasEdge(usize, usize),
    /// Every vertex degree lies in `[low, high]`.
    DegreesInRange { low: f64, high: f64 },
    IsolatedVertex,
    /// `|e(A, B) - p|A||B|| > t`.
    DeviationExceeds { a: Vec<usize>, b: Vec<usize>, p: f64, t: f64 },
    EdgeCount(usize),
    CliqueAtLeast(usize),
    Not(Box<Predicate>),
    All(Vec<Predicate>),
}

impl Predicate {
    pub fn negate(self) -> Predicate {
        Predicate::Not(Box::new(self))
    }

    /// Check vertex references against a graph on `n` vertices.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |vs: &[usize]| match vs.iter().find(|&&v| v >= n) {
            Some(v) => Err(Error::invalid(format!("vertex {v} out of range for n = {n}"))),
            None => Ok(()),
        };
        match self {
            Predicate::HasEdge(u, v) => {
                check(&[*u, *v])?;
                if u == v {
                    return Err(Error::invalid(format!("has-edge needs two distinct vertices, got {u}-{v}")));
                }
                Ok(())
            }
            Predicate::DeviationExceeds { a, b, .. } => {
                check(a)?;
                check(b)
            }
            Predicate::Not(inner) => inner.validate(n),
            Predicate::All(parts) => parts.iter().try_for_each(|p| p.validate(n)),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, g: &Graph) -> bool {
        match self {
            Predicate::Always => true,
            Predicate::Connected => g.is_connected(),
            Predicate::Contains(h) => contains_subgraph(g, h),
            Predicate::HasEdge(u, v) => g.has_edge(*u, *v),
            Predicate::DegreesInRange { low, high } => (0..g.vertex_count()).all(|v| {
                let x = g.degree(v) as f64;
                *low <= x && x <= *high
            }),
            Predicate::IsolatedVertex => g.has_isolated_vertex(),
            Predicate::DeviationExceeds { a, b, p, t } => {
                let n = g.vertex_count();
                let sa = VertexSet::from_vertices(n, a).expect("validated vertex set");
                let sb = VertexSet::from_vertices(n, b).expect("validated vertex set");
                let e = g.count_edges_between(&sa, &sb) as f64;
                (e - p * sa.len() as f64 * sb.len() as f64).abs() > *t
            }
            Predicate::EdgeCount(k) => g.edge_count() == *k,
            Predicate::CliqueAtLeast(k) => clique_number(g) >= *k,
            Predicate::Not(inner) => !inner.evaluate(g),
            Predicate::All(parts) => parts.iter().all(|p| p.evaluate(g)),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, vs: &[usize]) -> fmt::Result {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::parse(format!("bad vertex {t:?}"))))
        .collect()
}

fn parse_pair(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let (a, b) = s
        .split_once('|')
        .ok_or_else(|| Error::parse(format!("expected A|B vertex lists, got {s:?}")))?;
    Ok((parse_list(a)?, parse_list(b)?))
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::parse(format!("bad {what} {s:?}")))
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    match s.split_once('/') {
        Some((a, b)) => Ok(parse_num::<f64>(a, what)? / parse_num::<f64>(b, what)?),
        None => parse_num(s, what),
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Always => f.write_str("always"),
            Predicate::Connected => f.write_str("connected"),
            Predicate::Contains(h) => write!(f, "contains:{h}"),
            Predicate::HasEdge(u, v) => write!(f, "has-edge:{u}-{v}"),
            Predicate::DegreesInRange { low, high } => write!(f, "degrees-in:{low}:{high}"),
            Predicate::IsolatedVertex => f.write_str("isolated-vertex"),
            Predicate::DeviationExceeds { a, b, p, t } => {
                f.write_str("deviation:")?;
                write_list(f, a)?;
                f.write_str("|")?;
                write_list(f, b)?;
                write!(f, ":{p}:{t}")
            }
            Predicate::EdgeCount(k) => write!(f, "edge-count:{k}"),
            Predicate::CliqueAtLeast(k) => write!(f, "clique-at-least:{k}"),
            Predicate::Not(inner) => write!(f, "not:{inner}"),
            Predicate::All(parts) => {
                f.write_str("all(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("all(").and_then(|r| r.strip_suffix(')')) {
            return inner.split(';').map(str::parse).collect::<Result<_>>().map(Predicate::All);
        }
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let arg = |name: &str| rest.ok_or_else(|| Error::parse(format!("predicate {name} needs an argument")));
        match head {
            "always" => Ok(Predicate::Always),
            "connected" => Ok(Predicate::Connected),
            "disconnected" => Ok(Predicate::Connected.negate()),
            "isolated-vertex" => Ok(Predicate::IsolatedVertex),
            "contains" => Ok(Predicate::Contains(arg(head)?.parse()?)),
            "no-copy" => Ok(Predicate::Contains(arg(head)?.parse()?).negate()),
            "has-edge" => {
                let r = arg(head)?;
                let (u, v) = r
                    .split_once('-')
                    .ok_or_else(|| Error::parse(format!("expected u-v, got {r:?}")))?;
                Ok(Predicate::HasEdge(parse_num(u, "vertex")?, parse_num(v, "vertex")?))
            }
            "degrees-in" => {
                let r = arg(head)?;
                let (lo, hi) = r
                    .split_once(':')
                    .ok_or_else(|| Error::parse(format!("expected low:high, got {r:?}")))?;
                Ok(Predicate::DegreesInRange {
                    low: parse_real(lo, "degree")?,
                    high: parse_real(hi, "degree")?,
                })
            }
            "deviation" => {
                let parts: Vec<&str> = arg(head)?.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::parse("expected deviation:A|B:p:t"));
                }
                let (a, b) = parse_pair(parts[0])?;
                Ok(Predicate::DeviationExceeds {
                    a,
                    b,
                    p: parse_real(parts[1], "probability")?,
                    t: parse_real(parts[2], "deviation")?,
                })
            }
            "edge-count" => Ok(Predicate::EdgeCount(parse_num(arg(head)?, "edge count")?)),
            "clique-at-least" => Ok(Predicate::CliqueAtLeast(parse_num(arg(head)?, "clique size")?)),
            "not" => Ok(arg(head)?.parse::<Predicate>()?.negate()),
            _ => Err(Error::parse(format!("unknown predicate {s:?}"))),
        }
    }
}

impl Serialize for Predicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Predicate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A nonnegative integer graph statistic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statistic {
    EdgeCount,
    /// `e(A, B)`, edges inside `A ∩ B` counted twice.
    EdgesBetween { a: Vec<usize>, b: Vec<usize> },
    IsolatedCount,
    CliqueNumber,
    MaxDegree,
}

impl Statistic {
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Statistic::EdgesBetween { a, b } = self {
            if let Some(v) = a.iter().chain(b).find(|&&v| v >= n) {
                return Err(Error::invalid(format!("vertex {v} out of range for n = {n}")));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, g: &Graph) -> u64 {
        match self {
            Statistic::EdgeCount => g.edge_count() as u64,
            Statistic::EdgesBetween { a, b } => {
                let n = g.vertex_count();
                let sa = VertexSet::from_vertices(n, a).expect("validated vertex set");
                let sb = VertexSet::from_vertices(n, b).expect("validated vertex set");
                g.count_edges_between(&sa, &sb) as u64
            }
            Statistic::IsolatedCount => g.isolated_vertex_count() as u64,
            Statistic::CliqueNumber => clique_number(g) as u64,
            Statistic::MaxDegree => g.max_degree() as u64,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::EdgeCount => f.write_str("edge-count"),
            Statistic::EdgesBetween { a, b } => {
                f.write_str("edges-between:")?;
                write_list(f, a)?;
                f.write_str("|")?;
                write_list(f, b)
            }
            Statistic::IsolatedCount => f.write_str("isolated-count"),
            Statistic::CliqueNumber => f.write_str("clique-number"),
            Statistic::MaxDegree => f.write_str("max-degree"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "edge-count" => Ok(Statistic::EdgeCount),
            "isolated-count" => Ok(Statistic::IsolatedCount),
            "clique-number" => Ok(Statistic::CliqueNumber),
            "max-degree" => Ok(Statistic::MaxDegree),
            other => match other.strip_prefix("edges-between:") {
                Some(rest) => {
                    let (a, b) = parse_pair(rest)?;
                    Ok(Statistic::EdgesBetween { a, b })
                }
                None => Err(Error::parse(format!("unknown statistic {other:?}"))),
            },
        }
    }
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Statistic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in [
            "always",
            "connected",
            "not:connected",
            "contains:k3",
            "not:contains:0-1,0-3,1-2,2-3",
            "has-edge:0-2",
            "degrees-in:1.5:7",
            "isolated-vertex",
            "deviation:0,1|2:0.5:1.25",
            "edge-count:3",
            "clique-at-least:4",
            "all(has-edge:0-1;has-edge:2-3)",
        ] {
            let p: Predicate = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(p.to_string().parse::<Predicate>().unwrap(), p);
        }
        assert_eq!("disconnected".parse::<Predicate>().unwrap(), Predicate::Connected.negate());
        assert!("nope".parse::<Predicate>().is_err());
        assert!("has-edge:1".parse::<Predicate>().is_err());

        for s in ["edge-count", "isolated-count", "clique-number", "max-degree", "edges-between:2|0,1"] {
            let st: Statistic = s.parse().unwrap();
            assert_eq!(st.to_string(), s);
        }
    }

    #[test]
    fn evaluation() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!("contains:k3".parse::<Predicate>().unwrap().evaluate(&g));
        assert!(Predicate::IsolatedVertex.evaluate(&g));
        assert!(!Predicate::Connected.evaluate(&g));
        assert!(Predicate::CliqueAtLeast(3).evaluate(&g));
        assert!(Predicate::EdgeCount(3).evaluate(&g));
        assert!(!Predicate::DegreesInRange { low: 1.0, high: 2.0 }.evaluate(&g));
        // e({0,1,2},{0,1,2}) = 6 against p·9 = 4.5.
        let dev = Predicate::DeviationExceeds {
            a: vec![0, 1, 2],
            b: vec![0, 1, 2],
            p: 0.5,
            t: 1.4,
        };
        assert!(dev.evaluate(&g));
        assert_eq!(Statistic::EdgesBetween { a: vec![0, 1, 2], b: vec![0, 1, 2] }.evaluate(&g), 6);
        assert_eq!(Statistic::IsolatedCount.evaluate(&g), 1);
        assert!(Predicate::HasEdge(0, 4).validate(4).is_err());
        assert!(Predicate::HasEdge(1, 1).validate(4).is_err());
    }
}
