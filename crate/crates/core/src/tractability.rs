//! Tractability verdicts for the registered shape families.
//!
//! Every asymptotic condition is decided symbolically from the family's
//! closed form. Finite explicit prefixes only get trend diagnostics; the
//! notions that hold or fail for every admissible sequence are still decided.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{GkError, Result};
use crate::shape::ShapeSequence;

/// Terms required before an explicit prefix gets a numeric decay estimate.
pub const MIN_ESTIMATE_TERMS: usize = 32;

/// Terms required by [`condition_trend`].
pub const MIN_TREND_TERMS: usize = 8;

/// Largest `d` visited by [`qpt_probe`].
pub const QPT_PROBE_MAX_D: usize = 1_000_000;

/// (s,t) pairs tabulated by [`classify_all`].
pub const ST_GRID: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Notion {
    Spt,
    Pt,
    Qpt,
    Uwt,
    Wt,
    StWt { s: f64, t: f64 },
    Curse,
    EcSpt,
    EcPt,
    EcQpt,
    EcUwt,
    EcWt,
    EcStWt { s: f64, t: f64 },
    Exp,
    Uexp,
}

fn check_st(s: f64, t: f64) -> Result<()> {
    if s.is_finite() && t.is_finite() && s > 0.0 && t > 0.0 {
        Ok(())
    } else {
        Err(GkError::domain(format!("s and t must be finite and > 0, got s={s}, t={t}")))
    }
}

impl Notion {
    /// Builds a notion from its bare name plus optional `(s,t)`.
    pub fn from_name(name: &str, s: Option<f64>, t: Option<f64>) -> Result<Self> {
        let key = name.trim().to_ascii_uppercase().replace('-', "_");
        let plain = match key.as_str() {
            "SPT" => Some(Notion::Spt),
            "PT" => Some(Notion::Pt),
            "QPT" => Some(Notion::Qpt),
            "UWT" => Some(Notion::Uwt),
            "WT" => Some(Notion::Wt),
            "CURSE" => Some(Notion::Curse),
            "EC_SPT" => Some(Notion::EcSpt),
            "EC_PT" => Some(Notion::EcPt),
            "EC_QPT" => Some(Notion::EcQpt),
            "EC_UWT" => Some(Notion::EcUwt),
            "EC_WT" => Some(Notion::EcWt),
            "EXP" => Some(Notion::Exp),
            "UEXP" => Some(Notion::Uexp),
            _ => None,
        };
        if let Some(n) = plain {
            if s.is_some() || t.is_some() {
                return Err(GkError::parse("notion", name, "s and t only apply to ST_WT and EC_ST_WT"));
            }
            return Ok(n);
        }
        let (Some(s), Some(t)) = (s, t) else {
            return Err(GkError::parse("notion", name, "ST_WT and EC_ST_WT need both s and t"));
        };
        check_st(s, t)?;
        match key.as_str() {
            "ST_WT" => Ok(Notion::StWt { s, t }),
            "EC_ST_WT" => Ok(Notion::EcStWt { s, t }),
            _ => Err(GkError::parse("notion", name, "unknown notion")),
        }
    }

    pub fn is_ec(&self) -> bool {
        matches!(
            self,
            Notion::EcSpt | Notion::EcPt | Notion::EcQpt | Notion::EcUwt | Notion::EcWt | Notion::EcStWt { .. } | Notion::Exp | Notion::Uexp
        )
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notion::Spt => f.write_str("SPT"),
            Notion::Pt => f.write_str("PT"),
            Notion::Qpt => f.write_str("QPT"),
            Notion::Uwt => f.write_str("UWT"),
            Notion::Wt => f.write_str("WT"),
            Notion::StWt { s, t } => write!(f, "ST_WT({s},{t})"),
            Notion::Curse => f.write_str("CURSE"),
            Notion::EcSpt => f.write_str("EC_SPT"),
            Notion::EcPt => f.write_str("EC_PT"),
            Notion::EcQpt => f.write_str("EC_QPT"),
            Notion::EcUwt => f.write_str("EC_UWT"),
            Notion::EcWt => f.write_str("EC_WT"),
            Notion::EcStWt { s, t } => write!(f, "EC_ST_WT({s},{t})"),
            Notion::Exp => f.write_str("EXP"),
            Notion::Uexp => f.write_str("UEXP"),
        }
    }
}

/// Accepts `WT`, `ec-uwt`, `ST_WT(0.5,1)` and the like.
impl FromStr for Notion {
    type Err = GkError;
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let Some(open) = text.find('(') else {
            return Notion::from_name(text, None, None);
        };
        let inner = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| GkError::parse("notion", text, "missing closing parenthesis"))?;
        let mut parts = inner.split(',').map(|p| p.trim().parse::<f64>());
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(s)), Some(Ok(t)), None) => Notion::from_name(&text[..open], Some(s), Some(t)),
            _ => Err(GkError::parse("notion", text, "expected two numbers in (s,t)")),
        }
    }
}

impl Serialize for Notion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub notion: Notion,
    pub status: Status,
    /// Evaluated limit or liminf behind the verdict, when there is one.
    #[serde(with = "crate::extreal::option")]
    pub condition_value: Option<f64>,
    /// The condition the verdict rests on.
    pub condition_ref: &'static str,
    /// Exponent attached to SPT/EXP verdicts.
    #[serde(with = "crate::extreal::option", skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// True when `condition_value` comes from a finite prefix or probe.
    pub estimated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendReport>,
}

impl Verdict {
    fn new(notion: Notion, status: Status, value: Option<f64>, condition_ref: &'static str) -> Self {
        Verdict {
            notion,
            status,
            condition_value: value,
            condition_ref,
            exponent: None,
            estimated: false,
            note: None,
            trend: None,
        }
    }

    fn decided(notion: Notion, holds: bool, value: Option<f64>, condition_ref: &'static str) -> Self {
        let status = if holds { Status::Holds } else { Status::Fails };
        Verdict::new(notion, status, value, condition_ref)
    }
}

/// `r = liminf ln(gamma_j^-2) / ln j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayRate {
    Exact(f64),
    /// Minimum of the ratio over the second half of an explicit prefix.
    Estimated { r: f64, terms: usize },
    /// Explicit prefix too short to estimate.
    Inconclusive { terms: usize },
}

impl DecayRate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            DecayRate::Exact(r) | DecayRate::Estimated { r, .. } => Some(r),
            DecayRate::Inconclusive { .. } => None,
        }
    }
}

impl Serialize for DecayRate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            #[serde(with = "crate::extreal::option")]
            r: Option<f64>,
            estimated: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            terms: Option<usize>,
        }
        let repr = match *self {
            DecayRate::Exact(r) => Repr { r: Some(r), estimated: false, terms: None },
            DecayRate::Estimated { r, terms } => Repr { r: Some(r), estimated: true, terms: Some(terms) },
            DecayRate::Inconclusive { terms } => Repr { r: None, estimated: true, terms: Some(terms) },
        };
        repr.serialize(s)
    }
}

pub fn decay_rate(shape: &ShapeSequence) -> DecayRate {
    match shape {
        ShapeSequence::PowerLaw { a, .. } => DecayRate::Exact(*a),
        ShapeSequence::LogLaw { .. } | ShapeSequence::Constant { .. } => DecayRate::Exact(0.0),
        ShapeSequence::ExpLaw { .. } | ShapeSequence::DoubleExp { .. } => DecayRate::Exact(f64::INFINITY),
        ShapeSequence::Explicit(v) => {
            let n = v.len();
            if n < MIN_ESTIMATE_TERMS {
                return DecayRate::Inconclusive { terms: n };
            }
            let r = (n / 2..=n)
                .map(|j| -v[j - 1].ln() / (j as f64).ln())
                .fold(f64::INFINITY, f64::min)
                .max(0.0);
            DecayRate::Estimated { r, terms: n }
        }
    }
}

/// `(1 / ln+ d) sum_{j<=d} gamma_j^2 (1 + ln(1 + gamma_j^-2))`, maximized over
/// `d <= d_max`. Returns `(sup, argmax)`.
pub fn qpt_probe(shape: &ShapeSequence, d_max: usize) -> Result<(f64, usize)> {
    let d_max = match shape.len() {
        Some(n) => d_max.min(n),
        None => d_max,
    };
    if d_max == 0 {
        return Err(GkError::domain("qpt probe needs d_max >= 1"));
    }
    let mut acc = crate::sum::NeumaierSum::default();
    let mut best = (f64::NEG_INFINITY, 1);
    for d in 1..=d_max {
        let lg = shape.ln_gamma2(d)?;
        let g = lg.exp();
        if g > 0.0 {
            // ln(1 + 1/g) = -ln g + ln(1 + g)
            acc += g * (1.0 + g.ln_1p() - lg);
        }
        let q = acc.sum() / crate::complexity::ln_plus(d as f64);
        if q > best.0 {
            best = (q, d);
        }
    }
    Ok(best)
}

fn lim_gamma2(shape: &ShapeSequence) -> f64 {
    match *shape {
        ShapeSequence::PowerLaw { c, a } if a == 0.0 => c,
        ShapeSequence::Constant { c } => c,
        _ => 0.0,
    }
}

/// `lim j^{1-t} gamma_j^2 ln+(gamma_j^-2)`, `t < 1`.
fn weighted_limit(shape: &ShapeSequence, t: f64) -> f64 {
    match *shape {
        ShapeSequence::PowerLaw { a, .. } if a > 1.0 - t => 0.0,
        ShapeSequence::ExpLaw { .. } | ShapeSequence::DoubleExp { .. } => 0.0,
        _ => f64::INFINITY,
    }
}

fn qpt_holds(shape: &ShapeSequence) -> bool {
    match *shape {
        ShapeSequence::PowerLaw { a, .. } => a > 1.0,
        ShapeSequence::ExpLaw { .. } | ShapeSequence::DoubleExp { .. } => true,
        _ => false,
    }
}

/// `lim j^{(1-s)/s} / ln(gamma_j^-2)`, `s < 1`.
fn ec_power_limit(shape: &ShapeSequence, s: f64) -> f64 {
    let q = (1.0 - s) / s;
    match *shape {
        ShapeSequence::ExpLaw { c, b } => {
            if (q - b).abs() <= 1e-12 * b.max(1.0) {
                1.0 / c
            } else if q < b {
                0.0
            } else {
                f64::INFINITY
            }
        }
        ShapeSequence::DoubleExp { .. } => 0.0,
        _ => f64::INFINITY,
    }
}

/// `lim ln j / ln(gamma_j^-2)`.
fn ec_log_limit(shape: &ShapeSequence) -> f64 {
    match *shape {
        ShapeSequence::PowerLaw { a, .. } if a > 0.0 => 1.0 / a,
        ShapeSequence::ExpLaw { .. } | ShapeSequence::DoubleExp { .. } => 0.0,
        _ => f64::INFINITY,
    }
}

/// `lim ln(ln gamma_j^-2) / ln j`.
fn ec_uwt_limit(shape: &ShapeSequence) -> f64 {
    match *shape {
        ShapeSequence::ExpLaw { b, .. } => b,
        ShapeSequence::DoubleExp { .. } => f64::INFINITY,
        _ => 0.0,
    }
}

const REF_R: &str = "liminf ln(gamma_j^-2)/ln j > 1";
const REF_QPT: &str = "sup_d (1/ln+ d) sum_{j<=d} gamma_j^2 (1 + ln(1 + gamma_j^-2)) < inf";
const REF_UWT: &str = "liminf ln(gamma_j^-2)/ln j >= 1";
const REF_WT: &str = "lim gamma_j^2 = 0";
const REF_T_GT_1: &str = "t > 1: holds for every shape sequence";
const REF_WEIGHTED: &str = "lim j^(1-t) gamma_j^2 ln+(gamma_j^-2) = 0";
const REF_CURSE: &str = "curse if lim gamma_j^2 > 0; excluded by WT";
const REF_EXP: &str = "holds for every shape sequence, exponent 1/d";
const REF_UEXP: &str = "fails for every shape sequence";
const REF_EC_POLY: &str = "EC-SPT, EC-PT, EC-QPT fail for every shape sequence";
const REF_EC_MAX_GT_1: &str = "EC with t > 1: holds for every shape sequence";
const REF_EC_T1: &str = "EC with t = 1, s >= 1: lim gamma_j^2 = 0";
const REF_EC_S_LT_1: &str = "EC with s < 1, t <= 1: lim j^((1-s)/s) / ln(gamma_j^-2) = 0";
const REF_EC_S1: &str = "EC with s = 1, t < 1: lim ln j / ln(gamma_j^-2) = 0";
const REF_EC_S_GT_1: &str = "EC with s > 1, t < 1: lim j^(1-t) gamma_j^2 ln+(gamma_j^-2) = 0";
const REF_EC_UWT: &str = "lim ln(ln gamma_j^-2)/ln j = inf";

/// Which condition governs an EC-(s,t)-WT question.
enum EcCase {
    Always,
    LimGamma,
    PowerRatio,
    LogRatio,
    Weighted,
}

fn ec_case(s: f64, t: f64) -> (EcCase, &'static str) {
    if t > 1.0 {
        (EcCase::Always, REF_EC_MAX_GT_1)
    } else if t == 1.0 && s >= 1.0 {
        (EcCase::LimGamma, REF_EC_T1)
    } else if s < 1.0 {
        (EcCase::PowerRatio, REF_EC_S_LT_1)
    } else if s == 1.0 {
        (EcCase::LogRatio, REF_EC_S1)
    } else {
        (EcCase::Weighted, REF_EC_S_GT_1)
    }
}

/// Verdicts that do not depend on the shape sequence at all.
fn unconditional(notion: Notion) -> Option<Verdict> {
    Some(match notion {
        Notion::StWt { t, .. } if t > 1.0 => Verdict::decided(notion, true, None, REF_T_GT_1),
        Notion::EcStWt { t, .. } if t > 1.0 => Verdict::decided(notion, true, None, REF_EC_MAX_GT_1),
        Notion::Exp => {
            let mut v = Verdict::decided(notion, true, None, REF_EXP);
            v.note = Some("exponent p*_d = 1/d".into());
            v
        }
        Notion::Uexp => Verdict::decided(notion, false, None, REF_UEXP),
        Notion::EcSpt | Notion::EcPt | Notion::EcQpt => Verdict::decided(notion, false, None, REF_EC_POLY),
        _ => return None,
    })
}

fn validate(notion: Notion) -> Result<()> {
    match notion {
        Notion::StWt { s, t } | Notion::EcStWt { s, t } => check_st(s, t),
        _ => Ok(()),
    }
}

fn classify_registered(shape: &ShapeSequence, notion: Notion) -> Result<Verdict> {
    let r = decay_rate(shape).value().expect("registered families have an exact rate");
    let lim_g = lim_gamma2(shape);
    Ok(match notion {
        Notion::Spt | Notion::Pt => {
            let mut v = Verdict::decided(notion, r > 1.0, Some(r), REF_R);
            if notion == Notion::Spt && r > 1.0 {
                v.exponent = Some(if r.is_infinite() { 0.0 } else { 2.0 / (r - 1.0) });
            }
            v
        }
        Notion::Qpt => {
            let holds = qpt_holds(shape);
            let mut v = Verdict::decided(notion, holds, None, REF_QPT);
            if holds {
                let (sup, _) = qpt_probe(shape, QPT_PROBE_MAX_D)?;
                v.condition_value = Some(sup);
                v.note = Some(format!("condition value is the maximum over d <= {QPT_PROBE_MAX_D}"));
            } else {
                v.condition_value = Some(f64::INFINITY);
            }
            v
        }
        Notion::Uwt => Verdict::decided(notion, r >= 1.0, Some(r), REF_UWT),
        Notion::Wt => Verdict::decided(notion, lim_g == 0.0, Some(lim_g), REF_WT),
        Notion::StWt { t, .. } => {
            if t == 1.0 {
                Verdict::decided(notion, lim_g == 0.0, Some(lim_g), REF_WT)
            } else {
                let l = weighted_limit(shape, t);
                Verdict::decided(notion, l == 0.0, Some(l), REF_WEIGHTED)
            }
        }
        Notion::Curse => Verdict::decided(notion, lim_g > 0.0, Some(lim_g), REF_CURSE),
        Notion::EcUwt => {
            let l = ec_uwt_limit(shape);
            Verdict::decided(notion, l == f64::INFINITY, Some(l), REF_EC_UWT)
        }
        Notion::EcWt => Verdict::decided(notion, lim_g == 0.0, Some(lim_g), REF_EC_T1),
        Notion::EcStWt { s, t } => {
            let (case, reference) = ec_case(s, t);
            let l = match case {
                EcCase::Always => unreachable!("handled as unconditional"),
                EcCase::LimGamma => lim_g,
                EcCase::PowerRatio => ec_power_limit(shape, s),
                EcCase::LogRatio => ec_log_limit(shape),
                EcCase::Weighted => weighted_limit(shape, t),
            };
            Verdict::decided(notion, l == 0.0, Some(l), reference)
        }
        Notion::Exp | Notion::Uexp | Notion::EcSpt | Notion::EcPt | Notion::EcQpt => {
            unreachable!("handled as unconditional")
        }
    })
}

fn classify_explicit(values: &[f64], notion: Notion) -> Result<Verdict> {
    let n = values.len();
    let last = *values.last().expect("explicit sequences are non-empty");
    let ln_j = (n as f64).ln();
    let ln_inv = -last.ln();
    let shape = ShapeSequence::Explicit(values.to_vec());
    let (value, reference) = match notion {
        Notion::Spt | Notion::Pt => (decay_rate(&shape).value(), REF_R),
        Notion::Uwt => (decay_rate(&shape).value(), REF_UWT),
        Notion::Qpt => (Some(qpt_probe(&shape, n)?.0), REF_QPT),
        Notion::Wt | Notion::EcWt => (Some(last), REF_WT),
        Notion::Curse => (Some(last), REF_CURSE),
        Notion::StWt { t, .. } if t == 1.0 => (Some(last), REF_WT),
        Notion::StWt { .. } => (None, REF_WEIGHTED),
        Notion::EcUwt => (Some(ln_inv.ln() / ln_j), REF_EC_UWT),
        Notion::EcStWt { s, t } => {
            let (case, reference) = ec_case(s, t);
            let v = match case {
                EcCase::LimGamma => Some(last),
                EcCase::PowerRatio => Some((n as f64).powf((1.0 - s) / s) / ln_inv),
                EcCase::LogRatio => Some(ln_j / ln_inv),
                EcCase::Weighted | EcCase::Always => None,
            };
            (v, reference)
        }
        _ => unreachable!("unconditional notions handled earlier"),
    };
    let mut v = Verdict::new(notion, Status::Inconclusive, value.filter(|x| !x.is_nan()), reference);
    v.estimated = true;
    v.note = Some(format!(
        "explicit prefix of {n} terms; the value is evaluated on the prefix and decides nothing"
    ));
    let t = match notion {
        Notion::StWt { t, .. } if t < 1.0 => Some(t),
        Notion::EcStWt { s, t } if s > 1.0 && t < 1.0 => Some(t),
        _ => None,
    };
    if let Some(t) = t {
        if n >= MIN_TREND_TERMS {
            let trend = condition_trend(values, t)?;
            v.condition_value = trend.weighted_ln.last().copied();
            v.trend = Some(trend);
        }
    }
    Ok(v)
}

/// Verdict for one notion.
pub fn classify(shape: &ShapeSequence, notion: Notion) -> Result<Verdict> {
    validate(notion)?;
    if let Some(v) = unconditional(notion) {
        return Ok(v);
    }
    match shape {
        ShapeSequence::Explicit(values) => classify_explicit(values, notion),
        _ => classify_registered(shape, notion),
    }
}

/// Every notion in a fixed order, with (s,t) over [`ST_GRID`] squared.
pub fn all_notions() -> Vec<Notion> {
    let grid = || ST_GRID.iter().flat_map(|&s| ST_GRID.iter().map(move |&t| (s, t)));
    let mut out = vec![Notion::Spt, Notion::Pt, Notion::Qpt];
    out.extend(grid().map(|(s, t)| Notion::StWt { s, t }));
    out.extend([Notion::Wt, Notion::Uwt, Notion::Curse, Notion::Exp, Notion::Uexp]);
    out.extend([Notion::EcSpt, Notion::EcPt, Notion::EcQpt]);
    out.extend(grid().map(|(s, t)| Notion::EcStWt { s, t }));
    out.extend([Notion::EcWt, Notion::EcUwt]);
    out
}

pub fn classify_all(shape: &ShapeSequence) -> Result<Vec<Verdict>> {
    all_notions().into_iter().map(|n| classify(shape, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decreasing,
    Increasing,
    Flat,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendReport {
    pub t: f64,
    /// `j^{1-t} gamma_j^2 ln+(gamma_j^-2)` for `j = 1..n`.
    pub weighted_ln: Vec<f64>,
    /// `j^{1-t} gamma_j^2` for `j = 1..n`.
    pub weighted: Vec<f64>,
    /// Monotonicity of `weighted_ln` over its second half.
    pub tail_trend: Trend,
    /// Log-log slope of `weighted_ln` over its second half.
    pub tail_slope: f64,
}

fn trend_of(xs: &[f64]) -> Trend {
    let (mut up, mut down) = (false, false);
    for w in xs.windows(2) {
        if w[1] > w[0] {
            up = true;
        } else if w[1] < w[0] {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Trend::Flat,
        (false, true) => Trend::Decreasing,
        (true, false) => Trend::Increasing,
        (true, true) => Trend::Mixed,
    }
}

/// Evaluates the weighted sequences behind the `t < 1` weak-tractability
/// condition over an explicit prefix. Never a verdict.
pub fn condition_trend(values: &[f64], t: f64) -> Result<TrendReport> {
    if values.len() < MIN_TREND_TERMS {
        return Err(GkError::domain(format!(
            "trend needs at least {MIN_TREND_TERMS} terms, got {}",
            values.len()
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(GkError::domain(format!("t must lie in (0,1), got {t}")));
    }
    let weighted: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, &g)| ((i + 1) as f64).powf(1.0 - t) * g)
        .collect();
    let weighted_ln: Vec<f64> = weighted
        .iter()
        .zip(values)
        .map(|(&w, &g)| w * crate::complexity::ln_plus(1.0 / g))
        .collect();
    let start = values.len() / 2;
    let tail = &weighted_ln[start..];
    let xs: Vec<f64> = (start + 1..=values.len()).map(|j| (j as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(TrendReport {
        t,
        tail_trend: trend_of(tail),
        tail_slope: sxy / sxx,
        weighted_ln,
        weighted,
    })
}
