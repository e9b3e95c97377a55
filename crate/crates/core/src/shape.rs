//! Shape-parameter sequences `gamma_j^2`, `j = 1, 2, ...`.
//!
//! A sequence is either one of the registered closed-form families or an
//! explicit finite prefix. All values are produced in the log domain so that
//! fast-decaying families (`exp`, `doubleexp`) never underflow before use.
//!
//! # Text grammar
//!
//! ```text
//! shape    := family ":" body
//! family   := "power" | "loglaw" | "exp" | "doubleexp" | "const" | "explicit"
//! body     := param ("," param)*            for every family but explicit
//!           | "[" number ("," number)* "]"  for explicit
//! param    := key "=" number
//! ```
//!
//! | family      | keys        | `gamma_j^2`             | constraints          |
//! |-------------|-------------|-------------------------|----------------------|
//! | `power`     | `c`, `a`    | `c * j^(-a)`            | `c > 0`, `a >= 0`    |
//! | `loglaw`    | `c`, `p`, `b` | `c / ln(j + b)^p`     | `c > 0`, `p > 0`, `b > 0` |
//! | `exp`       | `c`, `b`    | `exp(-c * j^b)`         | `c > 0`, `b > 0`     |
//! | `doubleexp` | `c`         | `exp(-exp(c * j))`      | `c > 0`              |
//! | `const`     | `c`         | `c`                     | `c > 0`              |
//! | `explicit`  | list        | the listed values       | positive, non-increasing |
//!
//! Every key of a family is required, keys may appear in any order, and
//! whitespace around tokens is ignored. Examples: `power:c=1,a=3`,
//! `loglaw:c=1,p=1,b=1`, `explicit:[0.9,0.5,0.1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GkError, Result};
use crate::univariate::UnivariateSpectrum;

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeSequence {
    PowerLaw { c: f64, a: f64 },
    LogLaw { c: f64, p: f64, b: f64 },
    ExpLaw { c: f64, b: f64 },
    DoubleExp { c: f64 },
    Constant { c: f64 },
    Explicit(Vec<f64>),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GkError::domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl ShapeSequence {
    pub fn power(c: f64, a: f64) -> Result<Self> {
        positive("c", c)?;
        if !(a.is_finite() && a >= 0.0) {
            return Err(GkError::domain(format!("a must be finite and >= 0, got {a}")));
        }
        Ok(ShapeSequence::PowerLaw { c, a })
    }

    pub fn log_law(c: f64, p: f64, b: f64) -> Result<Self> {
        positive("c", c)?;
        positive("p", p)?;
        // ln(1 + b) must be positive at j = 1
        positive("b", b)?;
        Ok(ShapeSequence::LogLaw { c, p, b })
    }

    pub fn exp_law(c: f64, b: f64) -> Result<Self> {
        positive("c", c)?;
        positive("b", b)?;
        Ok(ShapeSequence::ExpLaw { c, b })
    }

    pub fn double_exp(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(ShapeSequence::DoubleExp { c })
    }

    pub fn constant(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(ShapeSequence::Constant { c })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(GkError::domain("explicit shape sequence is empty"));
        }
        for (i, &v) in values.iter().enumerate() {
            positive("gamma^2", v)?;
            if i > 0 && v > values[i - 1] {
                return Err(GkError::domain(format!(
                    "explicit shape sequence increases at position {}: {} > {}",
                    i + 1,
                    v,
                    values[i - 1]
                )));
            }
        }
        Ok(ShapeSequence::Explicit(values))
    }

    /// True for every closed-form family (everything but `Explicit`).
    pub fn is_registered(&self) -> bool {
        !matches!(self, ShapeSequence::Explicit(_))
    }

    /// Number of available terms; `None` for infinite families.
    pub fn len(&self) -> Option<usize> {
        match self {
            ShapeSequence::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }

    /// `ln gamma_j^2` for `j >= 1`. May be `-inf` when `gamma_j^2` is below
    /// every representable double (double-exponential families).
    pub fn ln_gamma2(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(GkError::domain("shape index j starts at 1"));
        }
        let jf = j as f64;
        Ok(match *self {
            ShapeSequence::PowerLaw { c, a } => c.ln() - a * jf.ln(),
            ShapeSequence::LogLaw { c, p, b } => c.ln() - p * (jf + b).ln().ln(),
            ShapeSequence::ExpLaw { c, b } => -c * jf.powf(b),
            ShapeSequence::DoubleExp { c } => -(c * jf).exp(),
            ShapeSequence::Constant { c } => c.ln(),
            ShapeSequence::Explicit(ref v) => {
                let g = v.get(j - 1).ok_or_else(|| {
                    GkError::domain(format!(
                        "explicit shape sequence has {} terms, index {j} requested",
                        v.len()
                    ))
                })?;
                g.ln()
            }
        })
    }

    /// `gamma_j^2` in the linear domain (may underflow to zero).
    pub fn gamma2(&self, j: usize) -> Result<f64> {
        self.ln_gamma2(j).map(f64::exp)
    }

    /// Fails unless the sequence yields at least `d >= 1` values.
    pub fn check_dimension(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(GkError::domain("dimension d must be >= 1"));
        }
        match self.len() {
            Some(n) if n < d => Err(GkError::domain(format!(
                "explicit shape sequence has {n} terms but d = {d}"
            ))),
            _ => Ok(()),
        }
    }

    /// Univariate spectra of the first `d` coordinates.
    pub fn spectra(&self, d: usize) -> Result<Vec<UnivariateSpectrum>> {
        self.check_dimension(d)?;
        (1..=d)
            .map(|j| UnivariateSpectrum::from_ln_gamma2(self.ln_gamma2(j)?))
            .collect()
    }
}

impl fmt::Display for ShapeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSequence::PowerLaw { c, a } => write!(f, "power:c={c},a={a}"),
            ShapeSequence::LogLaw { c, p, b } => write!(f, "loglaw:c={c},p={p},b={b}"),
            ShapeSequence::ExpLaw { c, b } => write!(f, "exp:c={c},b={b}"),
            ShapeSequence::DoubleExp { c } => write!(f, "doubleexp:c={c}"),
            ShapeSequence::Constant { c } => write!(f, "const:c={c}"),
            ShapeSequence::Explicit(v) => {
                write!(f, "explicit:[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn parse_number(input: &str, tok: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|e| GkError::parse("shape", input, format!("bad number `{}`: {e}", tok.trim())))
}

fn parse_params(input: &str, body: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let mut out = vec![None; keys.len()];
    for item in body.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| GkError::parse("shape", input, format!("expected key=value, got `{}`", item.trim())))?;
        let k = k.trim();
        let pos = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| GkError::parse("shape", input, format!("unknown key `{k}`")))?;
        if out[pos].is_some() {
            return Err(GkError::parse("shape", input, format!("duplicate key `{k}`")));
        }
        out[pos] = Some(parse_number(input, v)?);
    }
    keys.iter()
        .zip(out)
        .map(|(k, v)| v.ok_or_else(|| GkError::parse("shape", input, format!("missing key `{k}`"))))
        .collect()
}

impl FromStr for ShapeSequence {
    type Err = GkError;

    fn from_str(input: &str) -> Result<Self> {
        let (family, body) = input
            .split_once(':')
            .ok_or_else(|| GkError::parse("shape", input, "expected `family:params`"))?;
        let body = body.trim();
        match family.trim() {
            "power" => {
                let p = parse_params(input, body, &["c", "a"])?;
                ShapeSequence::power(p[0], p[1])
            }
            "loglaw" => {
                let p = parse_params(input, body, &["c", "p", "b"])?;
                ShapeSequence::log_law(p[0], p[1], p[2])
            }
            "exp" => {
                let p = parse_params(input, body, &["c", "b"])?;
                ShapeSequence::exp_law(p[0], p[1])
            }
            "doubleexp" => {
                let p = parse_params(input, body, &["c"])?;
                ShapeSequence::double_exp(p[0])
            }
            "const" => {
                let p = parse_params(input, body, &["c"])?;
                ShapeSequence::constant(p[0])
            }
            "explicit" => {
                let inner = body
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| GkError::parse("shape", input, "explicit values must be in [...]"))?;
                let values = inner
                    .split(',')
                    .map(|t| parse_number(input, t))
                    .collect::<Result<Vec<_>>>()?;
                ShapeSequence::explicit(values)
            }
            other => Err(GkError::parse("shape", input, format!("unknown family `{other}`"))),
        }
    }
}

impl Serialize for ShapeSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ShapeSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
