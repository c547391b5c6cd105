use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::{self, Expr};
use crate::error::{Error, Result};
use crate::model::{ModelDescriptor, ModelKind};
use crate::pattern::SubgraphPattern;
use crate::predicate::{Predicate, Statistic};
use crate::probability::Probability;

/// Edge probability at a grid point: a literal (`0.3`, `1/3`) kept exact, or
/// an expression in `n` and `d` such as `2 ln(n)/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbSpec {
    text: String,
    kind: ProbKind,
}

#[derive(Clone, Debug, PartialEq)]
enum ProbKind {
    Literal(Probability),
    Expr(Expr),
}

impl ProbSpec {
    pub fn resolve(&self, n: usize, d: usize) -> Result<Probability> {
        match &self.kind {
            ProbKind::Literal(p) => Ok(*p),
            ProbKind::Expr(e) => {
                let v = e.eval(n, d)?;
                Probability::new(v)
                    .map_err(|_| Error::invalid(format!("{} = {v} at n = {n}, d = {d} is not a probability", self.text)))
            }
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl FromStr for ProbSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim().to_string();
        let kind = match text.parse::<Probability>() {
            Ok(p) => ProbKind::Literal(p),
            Err(_) => ProbKind::Expr(expr::parse(&text)?),
        };
        Ok(ProbSpec { text, kind })
    }
}

impl fmt::Display for ProbSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for ProbSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProbSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Num(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Num(v) => v.to_string(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// What a trial records as a success.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Graph(Predicate),
    /// Some vertex degree leaves `np ± 4 sqrt(np (d+1) ln n)`.
    DegreeViolation,
    /// On a correlated star, with `B` the common neighbourhood of `S`:
    /// `e(S, B) - p|S||B| > slack · witness floor(|S|, |B|)`.
    JumblednessWitness { slack: f64 },
}

pub const DEFAULT_WITNESS_SLACK: f64 = 0.9;

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "degree-violation" {
            return Ok(Event::DegreeViolation);
        }
        if s == "jumbledness-witness" {
            return Ok(Event::JumblednessWitness {
                slack: DEFAULT_WITNESS_SLACK,
            });
        }
        if let Some(slack) = s.strip_prefix("jumbledness-witness:") {
            let slack = slack
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad witness slack {slack:?}")))?;
            return Ok(Event::JumblednessWitness { slack });
        }
        s.parse().map(Event::Graph)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Graph(p) => write!(f, "{p}"),
            Event::DegreeViolation => f.write_str("degree-violation"),
            Event::JumblednessWitness { slack } => write!(f, "jumbledness-witness:{slack}"),
        }
    }
}

/// A theory value evaluated at each grid point and written next to the
/// estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum TheoryRef {
    ConnectivityUpper { fval: f64 },
    ConnectivityExample { eps: f64 },
    DegreeInterval,
    Phi(SubgraphPattern),
    CliqueBounds,
}

impl FromStr for TheoryRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad theory argument {a:?}")))
            })
        };
        match head {
            "connectivity-upper" => Ok(TheoryRef::ConnectivityUpper { fval: num(0.0)? }),
            "connectivity-example" => Ok(TheoryRef::ConnectivityExample { eps: num(0.1)? }),
            "degree-interval" => Ok(TheoryRef::DegreeInterval),
            "clique-bounds" => Ok(TheoryRef::CliqueBounds),
            "phi" => {
                let h = arg.ok_or_else(|| Error::parse("phi needs a pattern, e.g. phi:k3"))?;
                Ok(TheoryRef::Phi(h.parse()?))
            }
            _ => Err(Error::parse(format!("unknown theory reference {s:?}"))),
        }
    }
}

impl fmt::Display for TheoryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryRef::ConnectivityUpper { fval } => write!(f, "connectivity-upper:{fval}"),
            TheoryRef::ConnectivityExample { eps } => write!(f, "connectivity-example:{eps}"),
            TheoryRef::DegreeInterval => f.write_str("degree-interval"),
            TheoryRef::Phi(h) => write!(f, "phi:{h}"),
            TheoryRef::CliqueBounds => f.write_str("clique-bounds"),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Event);
string_serde!(TheoryRef);

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

fn zero_d() -> Vec<usize> {
    vec![0]
}

/// A model family and the grid of `(n, d, p)` values to run it at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelGrid {
    pub kind: ModelKind,
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub p: Vec<ProbSpec>,
    #[serde(default = "zero_d", deserialize_with = "one_or_many")]
    pub d: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

/// One point of a [`ModelGrid`]. `p` is `None` for edge-block models, whose
/// `p` is `a/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub n: usize,
    pub d: usize,
    pub p: Option<ProbSpec>,
}

impl ModelGrid {
    pub fn new(kind: ModelKind, n: Vec<usize>, p: Vec<ProbSpec>, d: Vec<usize>) -> Self {
        ModelGrid {
            kind,
            n,
            p,
            d,
            a: None,
            m: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.d.is_empty() {
            return Err(Error::invalid("model grid needs at least one n and one d"));
        }
        match self.kind {
            ModelKind::EdgeBlockExact => {
                if self.a.is_none() || self.m.is_none() {
                    return Err(Error::invalid("edge-block-exact grids need a and m"));
                }
                if !self.p.is_empty() {
                    return Err(Error::invalid("edge-block-exact grids take p from a/m; drop the p list"));
                }
            }
            ModelKind::CustomBlocks => {
                return Err(Error::invalid("custom-blocks models cannot be gridded; use a model document"));
            }
            _ => {
                if self.p.is_empty() {
                    return Err(Error::invalid("model grid needs at least one p"));
                }
            }
        }
        Ok(())
    }

    /// Grid points in `n`-major, then `d`, then `p` order.
    pub fn points(&self) -> Vec<GridPoint> {
        let ps: Vec<Option<ProbSpec>> = if self.kind == ModelKind::EdgeBlockExact {
            vec![None]
        } else {
            self.p.iter().cloned().map(Some).collect()
        };
        let mut out = Vec::new();
        for &n in &self.n {
            for &d in &self.d {
                for p in &ps {
                    out.push(GridPoint {
                        index: out.len(),
                        n,
                        d,
                        p: p.clone(),
                    });
                }
            }
        }
        out
    }

    pub(crate) fn descriptor(&self, point: &GridPoint) -> Result<ModelDescriptor> {
        let mut desc = ModelDescriptor::new(self.kind, point.n);
        desc.d = Some(point.d);
        desc.a = self.a;
        desc.m = self.m;
        if self.kind == ModelKind::EdgeBlockExact {
            desc.d = None;
        }
        if let Some(p) = &point.p {
            desc.p = Some(p.resolve(point.n, point.d)?);
        }
        Ok(desc)
    }
}

fn default_confidence() -> f64 {
    0.99
}

fn default_name() -> String {
    "experiment".to_string()
}

/// A Monte Carlo experiment: a model grid, what to measure, and how often.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub model: ModelGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<Event>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<Statistic>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theory: Vec<TheoryRef>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl ExperimentConfig {
    pub fn new(model: ModelGrid, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            name: default_name(),
            model,
            event: None,
            statistic: None,
            trials,
            seed,
            theory: Vec::new(),
            confidence: default_confidence(),
        }
    }

    pub fn with_event(mut self, event: Event) -> Self {
        self.event = Some(event);
        self
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = Some(statistic);
        self
    }

    pub fn with_theory(mut self, theory: TheoryRef) -> Self {
        if !self.theory.contains(&theory) {
            self.theory.push(theory);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        if self.event.is_none() && self.statistic.is_none() {
            return Err(Error::invalid("an experiment needs an event, a statistic, or both"));
        }
        self.model.validate()
    }

    /// Parse and validate a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs serialize")
    }
}
