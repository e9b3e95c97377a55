//! Eigenpairs of the one-dimensional Gaussian covariance operator.
//!
//! For the kernel `K(x, y) = exp(-g (x - y)^2)` acting on `L2(R, exp(-x^2)/sqrt(pi))`
//! the eigenvalues are geometric, `lambda_j = (1 - omega) omega^(j-1)` with
//! `omega = 2g / (1 + 2g + sqrt(1 + 4g))`, and the eigenfunctions are scaled
//! Hermite functions.
//!
//! Eigenfunctions are evaluated through the orthonormal Hermite-function
//! recurrence with a running log scale, so neither `2^n n!` nor `exp(x^2)`
//! is ever formed. Values whose magnitude falls below the smallest double
//! (very large `|x|`) are returned as `0`.

use serde::Serialize;

use crate::error::{GkError, Result};
use crate::logreal::LogReal;

/// Below this `gamma^2` the series `omega = g (1 - 2g + 5g^2)` is used.
pub const OMEGA_SERIES_THRESHOLD: f64 = 1e-8;

/// Largest degree accepted by the raw Hermite polynomial.
pub const RAW_HERMITE_MAX_DEGREE: usize = 150;

/// Largest degree accepted by the normalized Hermite function.
pub const HERMITE_FUNCTION_MAX_DEGREE: usize = 100_000;

const PI_QUARTER: f64 = 1.331_335_363_800_389_7; // pi^(1/4)

fn check_gamma2(gamma2: f64) -> Result<()> {
    if gamma2.is_finite() && gamma2 > 0.0 {
        Ok(())
    } else {
        Err(GkError::domain(format!("gamma^2 must be finite and > 0, got {gamma2}")))
    }
}

fn omega_unchecked(g: f64) -> f64 {
    if g < OMEGA_SERIES_THRESHOLD {
        g * (1.0 - 2.0 * g + 5.0 * g * g)
    } else if g < 1e300 {
        2.0 * g / (1.0 + 2.0 * g + (1.0 + 4.0 * g).sqrt())
    } else {
        // same rational form divided through by 2g
        1.0 / (0.5 / g + 1.0 + (0.25 / (g * g) + 1.0 / g).sqrt())
    }
}

/// Geometric ratio `omega = 2g / (1 + 2g + sqrt(1 + 4g))` of the eigenvalues.
pub fn omega(gamma2: f64) -> Result<f64> {
    check_gamma2(gamma2)?;
    Ok(omega_unchecked(gamma2))
}

/// Gaussian kernel `exp(-gamma2 (x - y)^2)`. Expects `gamma2 > 0`.
pub fn kernel_1d(gamma2: f64, x: f64, y: f64) -> f64 {
    let t = x - y;
    (-gamma2 * t * t).exp()
}

/// Per-coordinate spectral data derived from one shape parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnivariateSpectrum {
    pub gamma2: f64,
    pub ln_gamma2: f64,
    /// Linear `omega`; underflows to 0 only when `ln_omega < -745`.
    pub omega: f64,
    pub ln_omega: f64,
    pub ln_one_minus_omega: f64,
}

impl UnivariateSpectrum {
    pub fn new(gamma2: f64) -> Result<Self> {
        check_gamma2(gamma2)?;
        Self::from_ln_gamma2(gamma2.ln())
    }

    /// Builds the spectrum from `ln gamma^2`; `-inf` gives the degenerate
    /// spectrum `omega = 0` (all mass on the first eigenvalue).
    pub fn from_ln_gamma2(ln_gamma2: f64) -> Result<Self> {
        if ln_gamma2.is_nan() || ln_gamma2 == f64::INFINITY || ln_gamma2 > f64::MAX.ln() {
            return Err(GkError::domain(format!("ln gamma^2 out of range: {ln_gamma2}")));
        }
        let g = ln_gamma2.exp();
        if g < OMEGA_SERIES_THRESHOLD {
            let ln_omega = if ln_gamma2 == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                ln_gamma2 + (-2.0 * g + 5.0 * g * g).ln_1p()
            };
            let omega = ln_omega.exp();
            return Ok(UnivariateSpectrum {
                gamma2: g,
                ln_gamma2,
                omega,
                ln_omega,
                ln_one_minus_omega: (-omega).ln_1p(),
            });
        }
        let omega = omega_unchecked(g);
        let ln_one_minus_omega = if g < 1e300 {
            // 1 - omega = (1 + s) / (1 + 2g + s), s = sqrt(1 + 4g)
            let s = (1.0 + 4.0 * g).sqrt();
            (1.0 + s).ln() - (1.0 + 2.0 * g + s).ln()
        } else {
            // 1 - omega ~ 1 / sqrt(g)
            -0.5 * ln_gamma2
        };
        Ok(UnivariateSpectrum {
            gamma2: g,
            ln_gamma2,
            omega,
            ln_omega: if omega < 0.5 {
                omega.ln()
            } else {
                (-ln_one_minus_omega.exp()).ln_1p()
            },
            ln_one_minus_omega,
        })
    }

    /// `-ln omega`, the cost of one step along this coordinate.
    pub fn step(&self) -> f64 {
        -self.ln_omega
    }

    /// `sqrt(1 + 4 gamma^2)`.
    fn root(&self) -> f64 {
        (1.0 + 4.0 * self.gamma2).sqrt()
    }

    /// `lambda_j = (1 - omega) omega^(j-1)` for `j >= 1`.
    pub fn eigenvalue(&self, j: usize) -> Result<LogReal> {
        if j == 0 {
            return Err(GkError::domain("eigenvalue index j starts at 1"));
        }
        if j == 1 {
            return Ok(LogReal::from_ln(self.ln_one_minus_omega));
        }
        Ok(LogReal::from_ln(
            self.ln_one_minus_omega + (j - 1) as f64 * self.ln_omega,
        ))
    }

    /// Eigenfunction `eta_j(x)`, `j >= 1`.
    pub fn eigenfunction(&self, j: usize, x: f64) -> Result<f64> {
        if j == 0 {
            return Err(GkError::domain("eigenfunction index j starts at 1"));
        }
        let mut out = [0.0];
        self.eigenfunctions_into(j - 1, x, &mut out)?;
        Ok(out[0])
    }

    /// `eta_1(x), ..., eta_count(x)` in one recurrence pass.
    pub fn eigenfunctions(&self, count: usize, x: f64) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let mut out = vec![0.0; count];
        self.eigenfunctions_into(count - 1, x, &mut out)?;
        Ok(out)
    }

    fn eigenfunctions_into(&self, max_degree: usize, x: f64, out: &mut [f64]) -> Result<()> {
        // eta_j(x) = sqrt(beta) pi^(1/4) psi_{j-1}(beta x) exp(x^2 / 2), beta^2 = sqrt(1 + 4g),
        // and the Gaussian factors combine to exp(-(beta^2 - 1) x^2 / 2).
        let s = self.root();
        let beta = s.sqrt();
        let ln_scale = -0.5 * (s - 1.0) * x * x + 0.5 * beta.ln();
        hermite_functions_scaled(max_degree, beta * x, ln_scale + PI_QUARTER.ln(), out)
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by three-term recurrence.
///
/// Limited to `n <= 150`; use [`hermite_function`] beyond.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > RAW_HERMITE_MAX_DEGREE {
        return Err(GkError::Range(format!(
            "raw Hermite degree {n} exceeds {RAW_HERMITE_MAX_DEGREE}; use the normalized hermite_function"
        )));
    }
    if !x.is_finite() {
        return Err(GkError::domain(format!("hermite argument must be finite, got {x}")));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    if !cur.is_finite() {
        return Err(GkError::Range(format!(
            "H_{n}({x}) overflows; use the normalized hermite_function"
        )));
    }
    Ok(cur)
}

/// Orthonormal Hermite function `H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))`.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    let mut out = vec![0.0; n + 1];
    hermite_functions_scaled(n, x, -0.5 * x * x, &mut out)?;
    Ok(out[n])
}

/// Writes `exp(ln_scale) pi^(-1/4) H_k(z) / sqrt(2^k k!)` for
/// `k = max_degree + 1 - out.len() ..= max_degree` into `out`.
fn hermite_functions_scaled(max_degree: usize, z: f64, ln_scale: f64, out: &mut [f64]) -> Result<()> {
    const BIG: f64 = 1e200;
    const LN_BIG: f64 = 460.517_018_598_809_1; // ln 1e200
    if max_degree > HERMITE_FUNCTION_MAX_DEGREE {
        return Err(GkError::Range(format!(
            "Hermite function degree {max_degree} exceeds {HERMITE_FUNCTION_MAX_DEGREE}"
        )));
    }
    if !z.is_finite() {
        return Err(GkError::domain(format!("hermite argument must be finite, got {z}")));
    }
    let first = max_degree + 1 - out.len();
    let mut ln_scale = ln_scale;
    let emit = |v: f64, ln_scale: f64| -> f64 {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * (v.abs().ln() + ln_scale).exp()
        }
    };
    let mut prev = 0.0;
    let mut cur = 1.0 / PI_QUARTER;
    for k in 0..=max_degree {
        if k >= first {
            out[k - first] = emit(cur, ln_scale);
        }
        if k == max_degree {
            break;
        }
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            ln_scale += LN_BIG;
        }
    }
    Ok(())
}
