//! `gk`: spectra, errors, complexity, bounds and tractability verdicts for
//! tensor-product Gaussian covariance kernels. Results go to stdout as JSON
//! (or CSV where noted); diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 computation or input error, 2 usage error, 3 a
//! verification tolerance was exceeded or a sweep cell failed.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gk_core::complexity::{self, ComplexityQuery, Criterion, DEFAULT_BUDGET};
use gk_core::sweep::{self, Format, SweepConfig};
use gk_core::tensor::{self, DEFAULT_FRONTIER_CAP};
use gk_core::tractability::{self, Notion};
use gk_core::verify::{self, McConfig, McPath, SpectralReport};
use gk_core::{GkError, ShapeSequence, UnivariateSpectrum};

#[derive(Parser)]
#[command(name = "gk", version, about = "Spectra, complexity and tractability for product Gaussian kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Setting {
    Avg,
    Worst,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Abs,
    Nor,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Abs => Criterion::Abs,
            CriterionArg::Nor => Criterion::Nor,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Mercer,
    Ortho,
    Identity,
    Mc,
    Cov,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Auto,
    FunctionSpace,
    Analytic,
}

#[derive(Subcommand)]
enum Command {
    /// Univariate eigenvalues, optionally with eigenfunction values
    Eigen {
        #[arg(long, default_value_t = 1.0)]
        gamma2: f64,
        /// Number of leading eigenpairs
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Points at which to evaluate the eigenfunctions (repeatable)
        #[arg(long = "x", allow_negative_numbers = true)]
        xs: Vec<f64>,
    },
    /// Leading tensor-product eigenvalues in non-increasing order
    Spectrum {
        #[arg(long)]
        shape: ShapeSequence,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        /// Also write `rank,log_lambda` plot data here
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
        frontier_cap: usize,
    },
    /// Information complexity n(eps, d)
    N {
        #[arg(long)]
        shape: ShapeSequence,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = CriterionArg::Abs)]
        criterion: CriterionArg,
        #[arg(long, value_enum, default_value_t = Setting::Avg)]
        setting: Setting,
        #[arg(long, env = "GK_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
        frontier_cap: usize,
    },
    /// n-th minimal average-case and worst-case errors
    Error {
        #[arg(long)]
        shape: ShapeSequence,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, env = "GK_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Lower and upper bounds on ln n(eps, d)
    Bounds {
        #[arg(long)]
        shape: ShapeSequence,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Tractability verdicts
    Classify {
        #[arg(long)]
        shape: ShapeSequence,
        /// Single notion (SPT, PT, QPT, UWT, WT, ST_WT, CURSE, EC_*, EXP, UEXP)
        #[arg(long)]
        notion: Option<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value_t = ClassifyFormat::Json)]
        format: ClassifyFormat,
    },
    /// Numerical verification of the spectral formulas
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        /// Shape sequence for mc/cov; mercer/ortho/identity use its first term
        #[arg(long)]
        shape: Option<ShapeSequence>,
        /// Univariate gamma^2 for mercer/ortho/identity (overrides --shape)
        #[arg(long)]
        gamma2: Option<f64>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Truncation J for mercer/ortho/identity
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, default_value_t = verify::SPECTRAL_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// KL truncation M for mc (default: smallest M with mass >= 1 - 1e-6)
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
        /// Points for cov, as comma-separated coordinates (repeatable)
        #[arg(long = "point", allow_negative_numbers = true)]
        points: Vec<String>,
    },
    /// Run a sweep described by a config file
    Sweep {
        config: PathBuf,
    },
    /// Fit the exponent p of e(n,d) ~ exp(-c n^p)
    Fit {
        #[arg(long)]
        shape: ShapeSequence,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        nmax: u64,
        /// Number of geometric grid points from nmax/10 to nmax
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, env = "GK_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    println!("{text}");
}

fn tolerance_exit(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("tolerance exceeded");
        ExitCode::from(3)
    }
}

fn parse_point(text: &str) -> Result<Vec<f64>, GkError> {
    text.split(',')
        .map(|p| {
            p.trim().parse::<f64>().map_err(|e| GkError::Parse {
                what: "point",
                input: text.to_string(),
                msg: e.to_string(),
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, GkError> {
    match cli.command {
        Command::Eigen { gamma2, count, xs } => {
            let s = UnivariateSpectrum::new(gamma2)?;
            let funcs: Vec<Vec<f64>> = xs.iter().map(|&x| s.eigenfunctions(count, x)).collect::<Result<_, _>>()?;
            let pairs: Vec<_> = (1..=count)
                .map(|j| {
                    let l = s.eigenvalue(j)?;
                    Ok(json!({
                        "j": j,
                        "log_lambda": l.ln(),
                        "lambda": l.value(),
                        "eigenfunction": funcs.iter().map(|f| f[j - 1]).collect::<Vec<_>>(),
                    }))
                })
                .collect::<Result<_, GkError>>()?;
            print_json(&json!({
                "gamma2": gamma2,
                "omega": s.omega,
                "ln_omega": s.ln_omega,
                "x": xs,
                "eigenpairs": pairs,
            }));
        }
        Command::Spectrum { shape, d, count, format, plot, frontier_cap } => {
            let mut stream = tensor::open_stream(&shape, d)?.with_frontier_cap(frontier_cap);
            let batch = stream.next_batch(count)?;
            match format {
                OutFormat::Csv => {
                    let stdout = std::io::stdout();
                    tensor::write_spectrum_csv(stdout.lock(), 1, &batch, true)
                        .map_err(|e| GkError::Io { path: "<stdout>".into(), source: e })?;
                }
                OutFormat::Json => {
                    let rows: Vec<_> = batch
                        .iter()
                        .enumerate()
                        .map(|(i, (l, idx))| json!({"rank": i + 1, "log_lambda": l.ln(), "lambda": l.value(), "index": idx}))
                        .collect();
                    print_json(&rows);
                }
            }
            if let Some(path) = plot {
                sweep::spectrum_plot(1, &batch).write(&path)?;
            }
        }
        Command::N { shape, d, eps, criterion, setting, budget, frontier_cap } => {
            let q = ComplexityQuery::new(shape.clone(), d, eps)?
                .criterion(criterion.into())
                .budget(budget)
                .frontier_cap(frontier_cap);
            let c = match setting {
                Setting::Avg => complexity::n_avg(&q)?,
                Setting::Worst => complexity::n_worst(&q)?,
            };
            let b = complexity::ln_n_bounds(&shape, d, eps)?;
            print_json(&json!({
                "n": c.n,
                "tail": c.tail,
                "bounds": {"lower": b.ln_lower, "upper": b.ln_upper},
                "setting": match setting { Setting::Avg => "avg", Setting::Worst => "worst" },
                "criterion": q.criterion,
            }));
        }
        Command::Error { shape, d, n, budget } => {
            print_json(&tensor::error_pair(&shape, d, n, budget)?);
        }
        Command::Bounds { shape, d, eps } => {
            print_json(&complexity::ln_n_bounds(&shape, d, eps)?);
        }
        Command::Classify { shape, notion, s, t, format } => {
            let verdicts = match notion {
                Some(name) => vec![tractability::classify(&shape, Notion::from_name(&name, s, t)?)?],
                None => tractability::classify_all(&shape)?,
            };
            match format {
                ClassifyFormat::Json if verdicts.len() == 1 => print_json(&verdicts[0]),
                ClassifyFormat::Json => print_json(&json!({
                    "shape": shape,
                    "decay_rate": tractability::decay_rate(&shape),
                    "verdicts": verdicts,
                })),
                ClassifyFormat::Table => {
                    let width = verdicts.iter().map(|v| v.notion.to_string().len()).max().unwrap_or(0);
                    let mut out = std::io::stdout().lock();
                    for v in &verdicts {
                        let value = v.condition_value.map_or("-".to_string(), sweep::fmt17);
                        let _ = writeln!(out, "{:<width$}  {:<12}  {:<24}  {}", v.notion.to_string(), v.status.to_string(), value, v.condition_ref);
                    }
                }
            }
        }
        Command::Verify { kind, shape, gamma2, d, j, order, n, m, samples, seed, path, points } => {
            let univariate_g = || -> Result<f64, GkError> {
                match (gamma2, &shape) {
                    (Some(g), _) => Ok(g),
                    (None, Some(s)) => s.gamma2(1),
                    (None, None) => Ok(1.0),
                }
            };
            let need_shape = || {
                shape.clone().ok_or_else(|| GkError::Domain("this check needs --shape".into()))
            };
            match kind {
                VerifyKind::Mercer => {
                    let g = univariate_g()?;
                    let j = j.unwrap_or(60);
                    let r = verify::mercer_residual(g, j, &verify::default_mercer_grid())?;
                    let rep = SpectralReport::new("mercer", g, j, r, verify::MERCER_TOL);
                    print_json(&rep);
                    return Ok(tolerance_exit(rep.passed));
                }
                VerifyKind::Ortho => {
                    let g = univariate_g()?;
                    let j = j.unwrap_or(10);
                    let r = verify::orthonormality_residual(g, j, order)?;
                    let rep = SpectralReport::new("ortho", g, j, r, verify::ORTHO_TOL);
                    print_json(&rep);
                    return Ok(tolerance_exit(rep.passed));
                }
                VerifyKind::Identity => {
                    let g = univariate_g()?;
                    let j = j.unwrap_or(10);
                    let r = verify::eigen_identity_residual(g, j, &verify::default_identity_points(), order)?;
                    let rep = SpectralReport::new("identity", g, j, r, verify::EIGEN_IDENTITY_TOL);
                    print_json(&rep);
                    return Ok(tolerance_exit(rep.passed));
                }
                VerifyKind::Mc => {
                    let shape = need_shape()?;
                    let m = match m {
                        Some(m) => m,
                        None => verify::required_truncation(&shape, d, verify::MC_MASS_DEFICIT)?.max(n + 1),
                    };
                    let path = match path {
                        PathArg::Auto => McPath::Auto,
                        PathArg::FunctionSpace => McPath::FunctionSpace,
                        PathArg::Analytic => McPath::Analytic,
                    };
                    let rep = verify::mc_avg_error(&shape, d, &McConfig { n, truncation: m, samples, seed, path })?;
                    print_json(&rep);
                    return Ok(tolerance_exit(rep.passed));
                }
                VerifyKind::Cov => {
                    let shape = need_shape()?;
                    let pts: Vec<Vec<f64>> = if points.is_empty() {
                        [-1.0, 0.0, 1.0].iter().map(|&x| vec![x; d]).collect()
                    } else {
                        points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?
                    };
                    let rep = verify::covariance_check(&shape, d, &pts, samples, seed)?;
                    print_json(&rep);
                    return Ok(tolerance_exit(rep.passed));
                }
            }
        }
        Command::Sweep { config } => {
            let cfg = SweepConfig::load(&config)?;
            let rows = sweep::run_sweep(&cfg)?;
            let text = match cfg.format {
                Format::Csv => sweep::rows_to_csv(&rows, &cfg.notions),
                Format::Json => sweep::rows_to_json(&rows),
            };
            match &cfg.output {
                Some(path) => std::fs::write(path, &text).map_err(|e| GkError::Io { path: path.clone(), source: e })?,
                None => print!("{text}"),
            }
            for (kind, path) in &cfg.plots {
                sweep::plot_from_rows(&rows, *kind)?.write(path)?;
            }
            let failed: Vec<_> = rows.iter().filter(|r| r.has_error()).collect();
            for r in &failed {
                eprintln!("cell d={} eps={} did not complete", r.d, r.eps);
            }
            if !failed.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Fit { shape, d, nmax, points, budget } => {
            let grid = complexity::fit_grid(nmax, points);
            let fit = complexity::fit_exp_decay(&shape, d, &grid, budget)?;
            print_json(&json!({
                "p": fit.p,
                "residual": fit.residual,
                "intercept": fit.intercept,
                "grid": grid,
            }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

