//! Parameter sweeps over `(d, epsilon)` grids and their plot data.
//!
//! # Config grammar
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | entry
//! comment  := ("#" | ";") any text
//! section  := "[" ("sweep" | "output") "]"
//! entry    := key "=" value        (split at the first "=")
//! ```
//!
//! `[sweep]` keys:
//!
//! | key       | value                                   | default     |
//! |-----------|-----------------------------------------|-------------|
//! | `shape`   | shape string, e.g. `power:c=1,a=3`        | required    |
//! | `d`       | comma list of integers or `lo..hi` ranges | required  |
//! | `eps`     | comma list of reals in (0,1)            | required    |
//! | `notions` | comma list of notions, may be empty     | empty       |
//! | `budget`  | positive integer                        | 10^7        |
//! | `seed`    | unsigned integer                        | 0           |
//!
//! `[output]` keys: `path` (results file, stdout when absent), `format`
//! (`csv` or `json`, default from the extension, else `csv`) and `plot`
//! (repeatable, `kind:path` with kind `n_vs_d` or `n_vs_eps`). Relative paths
//! are resolved against the directory of the config file.
//!
//! Keys must be unique within a section except `plot`; unknown sections and
//! keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complexity::{ln_n_bounds, n_avg, n_worst, ComplexityQuery, Criterion, DEFAULT_BUDGET};
use crate::error::{GkError, Result};
use crate::logreal::LogReal;
use crate::shape::ShapeSequence;
use crate::tensor::TensorIndex;
use crate::tractability::{classify, Notion, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = GkError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(GkError::parse("format", s, "expected csv or json")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    NVsD,
    NVsEps,
    Spectrum,
}

impl FromStr for PlotKind {
    type Err = GkError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n_vs_d" => Ok(PlotKind::NVsD),
            "n_vs_eps" => Ok(PlotKind::NVsEps),
            "spectrum" => Ok(PlotKind::Spectrum),
            _ => Err(GkError::parse("plot kind", s, "expected n_vs_d, n_vs_eps or spectrum")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub shape: ShapeSequence,
    pub d_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub notions: Vec<Notion>,
    pub budget: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub plots: Vec<(PlotKind, PathBuf)>,
}

fn split_top_level(value: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in value.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(value[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(value[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

fn parse_d_list(value: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in split_top_level(value) {
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
            let hi: usize = hi.trim().parse().map_err(|_| format!("bad range end `{hi}`"))?;
            if lo > hi {
                return Err(format!("empty range `{item}`"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().map_err(|_| format!("bad integer `{item}`"))?);
        }
    }
    if out.is_empty() {
        return Err("d list is empty".into());
    }
    if out.contains(&0) {
        return Err("d must be >= 1".into());
    }
    Ok(out)
}

fn parse_eps_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    let out: Vec<f64> = split_top_level(value)
        .into_iter()
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad number `{s}`")))
        .collect::<std::result::Result<_, _>>()?;
    if out.is_empty() {
        return Err("eps list is empty".into());
    }
    if let Some(e) = out.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(format!("eps must lie in (0,1), got {e}"));
    }
    Ok(out)
}

impl SweepConfig {
    /// Reads a config file; relative output paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GkError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse_with_base(&text, base)
    }

    pub fn parse_with_base(text: &str, base: &Path) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Sweep,
            Output,
        }
        let mut section = Section::None;
        let mut seen: Vec<(bool, String)> = Vec::new();
        let mut shape = None;
        let mut d_list = None;
        let mut eps_list = None;
        let mut notions = Vec::new();
        let mut budget = DEFAULT_BUDGET;
        let mut seed = 0u64;
        let mut output = None;
        let mut format = None;
        let mut plots = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            let err = |msg: String| GkError::parse("sweep config", raw, format!("line {lineno}: {msg}"));
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err("unterminated section header".into()))?
                    .trim();
                section = match name {
                    "sweep" => Section::Sweep,
                    "output" => Section::Output,
                    _ => return Err(err(format!("unknown section `{name}`"))),
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let in_sweep = match section {
                Section::None => return Err(err("entry before any section".into())),
                Section::Sweep => true,
                Section::Output => false,
            };
            if key != "plot" {
                if seen.iter().any(|(s, k)| *s == in_sweep && k == key) {
                    return Err(err(format!("duplicate key `{key}`")));
                }
                seen.push((in_sweep, key.to_string()));
            }
            match (in_sweep, key) {
                (true, "shape") => {
                    shape = Some(value.parse::<ShapeSequence>().map_err(|e| err(e.to_string()))?)
                }
                (true, "d") => d_list = Some(parse_d_list(value).map_err(err)?),
                (true, "eps") => eps_list = Some(parse_eps_list(value).map_err(err)?),
                (true, "notions") => {
                    notions = split_top_level(value)
                        .into_iter()
                        .map(|s| s.parse::<Notion>())
                        .collect::<Result<_>>()
                        .map_err(|e| err(e.to_string()))?
                }
                (true, "budget") => {
                    budget = value
                        .parse()
                        .ok()
                        .filter(|b| *b > 0)
                        .ok_or_else(|| err(format!("bad budget `{value}`")))?
                }
                (true, "seed") => seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                (false, "path") => output = Some(base.join(value)),
                (false, "format") => format = Some(value.parse::<Format>().map_err(|e| err(e.to_string()))?),
                (false, "plot") => {
                    let (kind, path) = value
                        .split_once(':')
                        .ok_or_else(|| err("expected `plot = kind:path`".into()))?;
                    let kind: PlotKind = kind.parse().map_err(|e: GkError| err(e.to_string()))?;
                    if kind == PlotKind::Spectrum {
                        return Err(err("spectrum plots come from `gk spectrum --plot`".into()));
                    }
                    plots.push((kind, base.join(path.trim())));
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| GkError::parse("sweep config", text.lines().next().unwrap_or(""), format!("missing required key `{k}` in [sweep]"));
        let shape = shape.ok_or_else(|| missing("shape"))?;
        let d_list = d_list.ok_or_else(|| missing("d"))?;
        let eps_list = eps_list.ok_or_else(|| missing("eps"))?;
        for &d in &d_list {
            shape.check_dimension(d)?;
        }
        let format = format.unwrap_or_else(|| match output.as_ref().and_then(|p: &PathBuf| p.extension()) {
            Some(ext) if ext == "json" => Format::Json,
            _ => Format::Csv,
        });
        Ok(SweepConfig {
            shape,
            d_list,
            eps_list,
            notions,
            budget,
            seed,
            output,
            format,
            plots,
        })
    }
}

impl FromStr for SweepConfig {
    type Err = GkError;
    fn from_str(text: &str) -> Result<Self> {
        Self::parse_with_base(text, Path::new(""))
    }
}

/// One complexity cell of a sweep row.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Value(u64),
    /// Budget or frontier cap exhausted.
    Budget,
    Error(String),
}

impl Cell {
    fn from_result(r: Result<u64>) -> Self {
        match r {
            Ok(n) => Cell::Value(n),
            Err(GkError::Budget { .. } | GkError::BudgetRequest { .. } | GkError::FrontierCap { .. }) => Cell::Budget,
            Err(e) => Cell::Error(e.to_string()),
        }
    }

    pub fn value(&self) -> Option<u64> {
        match self {
            Cell::Value(n) => Some(*n),
            _ => None,
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Value(n) => n.to_string(),
            Cell::Budget => "BUDGET".into(),
            Cell::Error(_) => "ERROR".into(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Value(n) => s.serialize_u64(*n),
            Cell::Budget => s.serialize_str("BUDGET"),
            Cell::Error(msg) => s.serialize_str(&format!("ERROR: {msg}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NotionStatus {
    pub notion: Notion,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub eps: f64,
    pub n_avg: Cell,
    pub n_worst_abs: Cell,
    pub n_worst_nor: Cell,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub verdicts: Vec<NotionStatus>,
}

impl SweepRow {
    pub fn has_error(&self) -> bool {
        [&self.n_avg, &self.n_worst_abs, &self.n_worst_nor]
            .iter()
            .any(|c| !matches!(c, Cell::Value(_)))
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn run_cell(cfg: &SweepConfig, d: usize, eps: f64, verdicts: &[NotionStatus]) -> Result<SweepRow> {
    let q = ComplexityQuery::new(cfg.shape.clone(), d, eps)?.budget(cfg.budget);
    let bounds = ln_n_bounds(&cfg.shape, d, eps)?;
    Ok(SweepRow {
        d,
        eps,
        n_avg: Cell::from_result(n_avg(&q).map(|c| c.n)),
        n_worst_abs: Cell::from_result(n_worst(&q).map(|c| c.n)),
        n_worst_nor: Cell::from_result(n_worst(&q.clone().criterion(Criterion::Nor)).map(|c| c.n)),
        ln_lower: bounds.ln_lower,
        ln_upper: bounds.ln_upper,
        verdicts: verdicts.to_vec(),
    })
}

/// One row per `(d, eps)` in config order (d outer, eps inner).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let verdicts: Vec<NotionStatus> = cfg
        .notions
        .iter()
        .map(|&n| classify(&cfg.shape, n).map(|v| NotionStatus { notion: n, status: v.status }))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, f64)> = cfg
        .d_list
        .iter()
        .flat_map(|&d| cfg.eps_list.iter().map(move |&e| (d, e)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, eps)| run_cell(cfg, d, eps, &verdicts))
        .collect()
}

pub fn rows_to_csv(rows: &[SweepRow], notions: &[Notion]) -> String {
    let mut out = String::from("d,eps,n_avg,n_worst_abs,n_worst_nor,ln_lower,ln_upper");
    for n in notions {
        // notions with (s,t) contain a comma
        let _ = write!(out, ",\"{n}\"");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.d,
            fmt17(r.eps),
            r.n_avg.text(),
            r.n_worst_abs.text(),
            r.n_worst_nor.text(),
            fmt17(r.ln_lower),
            fmt17(r.ln_upper)
        );
        for v in &r.verdicts {
            let _ = write!(out, ",{}", v.status);
        }
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[SweepRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Two-column CSV with a header.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotTable {
    pub header: [&'static str; 2],
    pub rows: Vec<(String, String)>,
}

impl PlotTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.header[0], self.header[1]);
        for (a, b) in &self.rows {
            let _ = writeln!(out, "{a},{b}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| GkError::io(path, e))
    }
}

/// `n_vs_d`: `(d, ln n_avg)` at the first eps; `n_vs_eps`: `(ln(1/eps), n_avg)`
/// at the first d. Cells without a value are skipped.
pub fn plot_from_rows(rows: &[SweepRow], kind: PlotKind) -> Result<PlotTable> {
    let Some(first) = rows.first() else {
        return Ok(PlotTable { header: ["x", "y"], rows: Vec::new() });
    };
    match kind {
        PlotKind::NVsD => Ok(PlotTable {
            header: ["d", "ln_n_avg"],
            rows: rows
                .iter()
                .filter(|r| r.eps == first.eps)
                .filter_map(|r| r.n_avg.value().map(|n| (r.d.to_string(), fmt17((n as f64).ln()))))
                .collect(),
        }),
        PlotKind::NVsEps => Ok(PlotTable {
            header: ["ln_inv_eps", "n_avg"],
            rows: rows
                .iter()
                .filter(|r| r.d == first.d)
                .filter_map(|r| r.n_avg.value().map(|n| (fmt17((1.0 / r.eps).ln()), n.to_string())))
                .collect(),
        }),
        PlotKind::Spectrum => Err(GkError::domain("spectrum plots are built from eigenvalue batches")),
    }
}

/// `(rank, ln lambda)` for a batch whose first entry has rank `first_rank`.
pub fn spectrum_plot(first_rank: u64, batch: &[(LogReal, TensorIndex)]) -> PlotTable {
    PlotTable {
        header: ["rank", "log_lambda"],
        rows: batch
            .iter()
            .enumerate()
            .map(|(i, (l, _))| ((first_rank + i as u64).to_string(), fmt17(l.ln())))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# sweep over a cubic decay
[sweep]
shape = power:c=1,a=3
d = 1, 2, 4, 8
eps = 0.1, 0.01
notions = SPT, ST_WT(0.5,1), EC_UWT

[output]
path = out.csv
plot = n_vs_d:nd.csv
plot = n_vs_eps:ne.csv
";

    #[test]
    fn parses_basic_config() {
        let c: SweepConfig = BASIC.parse().unwrap();
        assert_eq!(c.d_list, vec![1, 2, 4, 8]);
        assert_eq!(c.eps_list, vec![0.1, 0.01]);
        assert_eq!(c.notions.len(), 3);
        assert_eq!(c.notions[1], Notion::StWt { s: 0.5, t: 1.0 });
        assert_eq!(c.budget, DEFAULT_BUDGET);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.plots.len(), 2);
        assert_eq!(c.output, Some(PathBuf::from("out.csv")));
    }

    #[test]
    fn ranges_and_errors() {
        let c: SweepConfig = "[sweep]\nshape=const:c=1\nd=1..3, 7\neps=0.5\n".parse().unwrap();
        assert_eq!(c.d_list, vec![1, 2, 3, 7]);
        assert!(c.notions.is_empty());
        for bad in [
            "shape=const:c=1\n",
            "[sweep]\nshape=const:c=1\nd=1\n",
            "[sweep]\nshape=const:c=1\nd=1\neps=1.5\n",
            "[sweep]\nshape=const:c=1\nd=0\neps=0.5\n",
            "[sweep]\nshape=const:c=1\nd=3..1\neps=0.5\n",
            "[sweep]\nshape=const:c=1\nd=1\nd=2\neps=0.5\n",
            "[sweep]\nshape=const:c=1\nd=1\neps=0.5\nfoo=1\n",
            "[weird]\n",
            "[sweep]\nshape=const:c=1\nd=1\neps=0.5\n[output]\nplot=spectrum:x.csv\n",
            "[sweep]\nshape=explicit:[0.5,0.2]\nd=3\neps=0.5\n",
        ] {
            assert!(bad.parse::<SweepConfig>().is_err(), "{bad}");
        }
        let e = "[sweep]\nshape=const:c=1\nbogus\n".parse::<SweepConfig>().unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn spt_regime_rows() {
        let c: SweepConfig = BASIC.parse().unwrap();
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| !r.has_error()));
        // SPT: n(eps, d) saturates in d, so the growth ratio eventually shrinks
        for eps in [0.1, 0.01] {
            let ns: Vec<f64> = rows.iter().filter(|r| r.eps == eps).map(|r| r.n_avg.value().unwrap() as f64).collect();
            assert!(ns.windows(2).all(|w| w[0] <= w[1]));
            let ratios: Vec<f64> = ns.windows(2).map(|w| w[1] / w[0]).collect();
            let last = ratios[ratios.len() - 1];
            assert!(last < ratios[ratios.len() - 2], "{ratios:?}");
        }
        assert_eq!(rows[0].verdicts[0].status, Status::Holds);
        let csv = rows_to_csv(&rows, &c.notions);
        assert!(csv.starts_with("d,eps,n_avg,n_worst_abs,n_worst_nor,ln_lower,ln_upper,\"SPT\""));
        assert_eq!(csv.lines().count(), 9);
        assert_eq!(csv, rows_to_csv(&run_sweep(&c).unwrap(), &c.notions));
    }

    #[test]
    fn curse_rows_and_budget_cells() {
        let c: SweepConfig = "[sweep]\nshape=const:c=1\nd=1..8\neps=0.5\nbudget=50\n".parse().unwrap();
        let rows = run_sweep(&c).unwrap();
        let mut saw_budget = false;
        for r in &rows {
            match r.n_avg {
                Cell::Value(n) => assert!((n as f64).ln() >= r.ln_lower),
                Cell::Budget => saw_budget = true,
                Cell::Error(ref e) => panic!("{e}"),
            }
        }
        assert!(saw_budget);
        let csv = rows_to_csv(&rows, &[]);
        assert!(csv.contains("BUDGET"));
    }

    #[test]
    fn plot_tables() {
        let c: SweepConfig = "[sweep]\nshape=const:c=1\nd=1..6\neps=0.5,0.1\n".parse().unwrap();
        let rows = run_sweep(&c).unwrap();
        let nd = plot_from_rows(&rows, PlotKind::NVsD).unwrap();
        assert_eq!(nd.header, ["d", "ln_n_avg"]);
        assert_eq!(nd.rows.len(), 6);
        let ys: Vec<f64> = nd.rows.iter().map(|(_, y)| y.parse().unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] <= w[1]));
        let ne = plot_from_rows(&rows, PlotKind::NVsEps).unwrap();
        assert_eq!(ne.rows.len(), 2);
        assert_eq!(ne.rows[1].1, "5");

        let mut s = crate::tensor::open_stream(&c.shape, 1).unwrap();
        let batch = s.next_batch(10).unwrap();
        let sp = spectrum_plot(1, &batch);
        let ys: Vec<f64> = sp.rows.iter().map(|(_, y)| y.parse().unwrap()).collect();
        let step = ys[1] - ys[0];
        assert!(ys.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-12));
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(f64::INFINITY), "inf");
    }
}
