//! Edge probabilities that remember an exact rational form when they have one.
//!
//! Text forms: `a/b` and plain decimals (`0.25`) are exact; scientific
//! notation (`2.5e-1`) is a binary floating-point value. `Display` writes
//! exact values as `a/b` and floating values in scientific notation, so
//! parsing the displayed form always gives back the same value.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Probability {
    value: f64,
    exact: Option<Ratio<u64>>,
}

impl Probability {
    pub const ZERO: Probability = Probability {
        value: 0.0,
        exact: Some(Ratio::new_raw(0, 1)),
    };
    pub const ONE: Probability = Probability {
        value: 1.0,
        exact: Some(Ratio::new_raw(1, 1)),
    };

    /// Floating-point probability in `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::invalid(format!("probability {value} is outside [0, 1]")));
        }
        Ok(Probability { value, exact: None })
    }

    /// Exact probability `num / den`.
    pub fn ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::invalid(format!("{num}/{den} is not a probability")));
        }
        let r = Ratio::new(num, den);
        Ok(Probability {
            value: num as f64 / den as f64,
            exact: Some(r),
        })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<Ratio<u64>> {
        self.exact
    }
}

impl PartialEq for Probability {
    fn eq(&self, other: &Self) -> bool {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.value == other.value,
            _ => false,
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{:e}", self.value),
        }
    }
}

impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("cannot parse probability {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num = num.trim().parse::<u64>().map_err(|_| bad())?;
            let den = den.trim().parse::<u64>().map_err(|_| bad())?;
            return Probability::ratio(num, den);
        }
        if s.contains(['e', 'E']) {
            let value = s.parse::<f64>().map_err(|_| bad())?;
            return Probability::new(value);
        }
        // Plain decimal: exact when the digits fit in u64.
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let den = 10u64.checked_pow(frac.len() as u32);
        match (digits.parse::<u64>(), den) {
            (Ok(num), Some(den)) => Probability::ratio(num, den),
            _ => Probability::new(s.parse::<f64>().map_err(|_| bad())?),
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) => Probability::new(x).map_err(serde::de::Error::custom),
        }
    }
}
