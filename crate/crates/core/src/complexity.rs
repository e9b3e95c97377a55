//! Information complexity, its computable bounds, and decay-rate fits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::shape::ShapeSequence;
use crate::tensor::{open_stream, DEFAULT_FRONTIER_CAP};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Smallest `epsilon^2` the streamed average-case complexity accepts for `d > 1`.
pub const TAIL_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Abs,
    Nor,
}

impl FromStr for Criterion {
    type Err = GkError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abs" => Ok(Criterion::Abs),
            "nor" => Ok(Criterion::Nor),
            _ => Err(GkError::parse("criterion", s, "expected abs or nor")),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Abs => "abs",
            Criterion::Nor => "nor",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ComplexityQuery {
    pub shape: ShapeSequence,
    pub d: usize,
    pub epsilon: f64,
    pub criterion: Criterion,
    pub budget: u64,
    pub frontier_cap: usize,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(GkError::domain(format!("epsilon must lie in (0,1), got {epsilon}")))
    }
}

impl ComplexityQuery {
    pub fn new(shape: ShapeSequence, d: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        shape.check_dimension(d)?;
        Ok(ComplexityQuery {
            shape,
            d,
            epsilon,
            criterion: Criterion::Abs,
            budget: DEFAULT_BUDGET,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        })
    }

    pub fn criterion(mut self, criterion: Criterion) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn frontier_cap(mut self, cap: usize) -> Self {
        self.frontier_cap = cap;
        self
    }
}

/// A complexity value with the squared error it achieves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complexity {
    pub n: u64,
    /// `e(n,d)^2` for the average case, `lambda_{d,n+1}` for the worst case.
    pub tail: f64,
}

/// Minimal `n` with `e(n,d) <= epsilon`. Identical under both criteria.
pub fn n_avg(q: &ComplexityQuery) -> Result<Complexity> {
    check_epsilon(q.epsilon)?;
    let ln_eps2 = 2.0 * q.epsilon.ln();
    if q.d == 1 {
        let sp = q.shape.spectra(1)?[0];
        let lw = sp.ln_omega;
        if lw == f64::NEG_INFINITY {
            return Ok(Complexity { n: 1, tail: 0.0 });
        }
        // tail after n terms is omega^n
        let mut n = (ln_eps2 / lw).ceil().max(1.0);
        while n > 1.0 && (n - 1.0) * lw <= ln_eps2 {
            n -= 1.0;
        }
        while n * lw > ln_eps2 {
            n += 1.0;
        }
        if n > q.budget as f64 {
            return Err(GkError::Budget {
                budget: q.budget,
                mass_reached: -(q.budget as f64 * lw).exp_m1(),
                last_log_lambda: sp.ln_one_minus_omega + (q.budget as f64 - 1.0) * lw,
            });
        }
        return Ok(Complexity {
            n: n as u64,
            tail: (n * lw).exp(),
        });
    }
    let eps2 = q.epsilon * q.epsilon;
    if eps2 < TAIL_FLOOR {
        return Err(GkError::Precision(format!(
            "epsilon^2 = {eps2:e} is below the tail floor {TAIL_FLOOR:e} for d > 1"
        )));
    }
    let mut stream = open_stream(&q.shape, q.d)?.with_frontier_cap(q.frontier_cap);
    while stream.remaining_mass() > eps2 {
        if stream.emitted() >= q.budget {
            return Err(GkError::Budget {
                budget: q.budget,
                mass_reached: stream.partial_mass(),
                last_log_lambda: stream.last_ln(),
            });
        }
        if stream.next_entry()?.is_none() {
            break;
        }
    }
    Ok(Complexity {
        n: stream.emitted(),
        tail: stream.remaining_mass().max(0.0),
    })
}

/// Minimal `n` with `lambda_{d,n+1} <= epsilon^2 CRI_d^2`.
pub fn n_worst(q: &ComplexityQuery) -> Result<Complexity> {
    check_epsilon(q.epsilon)?;
    let mut stream = open_stream(&q.shape, q.d)?.with_frontier_cap(q.frontier_cap);
    let mut threshold = 2.0 * q.epsilon.ln();
    if q.criterion == Criterion::Nor {
        threshold += stream.ln_lambda_d1();
    }
    loop {
        let Some(next) = stream.peek_ln() else {
            return Ok(Complexity {
                n: stream.emitted(),
                tail: 0.0,
            });
        };
        if next <= threshold {
            return Ok(Complexity {
                n: stream.emitted(),
                tail: next.exp(),
            });
        }
        if stream.emitted() >= q.budget {
            return Err(GkError::Budget {
                budget: q.budget,
                mass_reached: stream.partial_mass(),
                last_log_lambda: stream.last_ln(),
            });
        }
        stream.next_entry()?;
    }
}

/// `max(1, ln x)`.
pub fn ln_plus(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// Lower bound `ln(1 - epsilon^2) + d omega_d` on `ln n(epsilon, d)`.
pub fn ln_n_lower_bound(shape: &ShapeSequence, d: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let spectra = shape.spectra(d)?;
    Ok((-epsilon * epsilon).ln_1p() + d as f64 * spectra[d - 1].omega)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundPair {
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub s_d: f64,
    pub u_d: f64,
}

/// Both bounds on `ln n(epsilon, d)`; the upper one uses
/// `u_d = max(omega_d, 1/(2d))` and `s_d = 1 / (2 ln+(1/u_d))`.
pub fn ln_n_bounds(shape: &ShapeSequence, d: usize, epsilon: f64) -> Result<BoundPair> {
    check_epsilon(epsilon)?;
    let spectra = shape.spectra(d)?;
    let df = d as f64;
    let u_d = spectra[d - 1].omega.max(0.5 / df);
    let s_d = 0.5 / ln_plus(1.0 / u_d);
    let l = ln_plus(2.0 * df);
    // ln sum_k lambda_k^{1-s} = sum_k [(1-s) ln(1-omega_k) - ln(1 - omega_k^{1-s})]
    let mut ln_sum = 0.0;
    for sp in &spectra {
        let one_minus = -((1.0 - s_d) * sp.ln_omega).exp_m1();
        ln_sum += (1.0 - s_d) * sp.ln_one_minus_omega - one_minus.ln();
    }
    let ln_upper = std::f64::consts::LN_2
        + 4.0 * l * (1.0 / epsilon).ln()
        + 2.0 * l * (2.0 * l).ln()
        + ln_sum / s_d;
    Ok(BoundPair {
        ln_lower: (-epsilon * epsilon).ln_1p() + df * spectra[d - 1].omega,
        ln_upper,
        s_d,
        u_d,
    })
}

pub fn ln_n_upper_bound(shape: &ShapeSequence, d: usize, epsilon: f64) -> Result<BoundPair> {
    ln_n_bounds(shape, d, epsilon)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpFit {
    /// Least-squares slope of `ln ln(1/e(n,d))` against `ln n`.
    pub p: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// `(n, ln ln(1/e(n,d)))` pairs used.
    pub points: Vec<(u64, f64)>,
}

/// `count` geometrically spaced distinct integers from `nmax/10` to `nmax`.
pub fn fit_grid(nmax: u64, count: usize) -> Vec<u64> {
    let lo = (nmax / 10).max(1) as f64;
    let hi = nmax.max(1) as f64;
    let count = count.max(2);
    let mut grid: Vec<u64> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (lo * (hi / lo).powf(t)).round() as u64
        })
        .collect();
    grid.dedup();
    grid
}

/// Fits the exponent `p` of `e(n,d) ~ exp(-c n^p)` over an increasing grid.
pub fn fit_exp_decay(shape: &ShapeSequence, d: usize, n_grid: &[u64], budget: u64) -> Result<ExpFit> {
    if n_grid.len() < 2 {
        return Err(GkError::domain("fit needs at least two grid points"));
    }
    if n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GkError::domain("fit grid must be positive and strictly increasing"));
    }
    let last = *n_grid.last().expect("non-empty");
    if last > budget {
        return Err(GkError::BudgetRequest {
            requested: last,
            budget,
        });
    }
    let mut stream = open_stream(shape, d)?;
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        stream.advance_to(n)?;
        let ln_e2 = stream.tail_ln();
        if !(ln_e2 < 0.0) || ln_e2 == f64::NEG_INFINITY {
            return Err(GkError::Precision(format!(
                "e(n,d) at n = {n} is not representable in (0,1) (ln e^2 = {ln_e2})"
            )));
        }
        points.push((n, (-0.5 * ln_e2).ln()));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let p = sxy / sxx;
    let intercept = my - p * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - p * x).powi(2))
        .sum();
    Ok(ExpFit {
        p,
        intercept,
        residual: (sse / m).sqrt(),
        points,
    })
}
