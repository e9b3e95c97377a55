//! Numerical checks of the spectral formulas and Monte Carlo estimates of the
//! average-case error.
//!
//! Random functions are drawn from the truncated Karhunen-Loeve expansion
//! `f = sum_{j<=M} sqrt(lambda_j) xi_j eta_j`. Sample `i` of a run with seed `s`
//! always uses ChaCha8 stream `i` of seed `s`, so results do not depend on how
//! samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GkError, Result};
use crate::quadrature::{gauss_hermite, QuadratureRule, DEFAULT_ORDER, MAX_ORDER};
use crate::shape::ShapeSequence;
use crate::sum::pairwise_sum;
use crate::tensor::{open_stream, tensor_kernel, TensorIndex};
use crate::univariate::{kernel_1d, UnivariateSpectrum};

pub const MERCER_TOL: f64 = 1e-8;
pub const ORTHO_TOL: f64 = 1e-8;
pub const EIGEN_IDENTITY_TOL: f64 = 1e-7;
pub const MC_Z_TOL: f64 = 4.0;
pub const COV_Z_TOL: f64 = 5.0;

/// Largest mass a Monte Carlo truncation may leave out.
pub const MC_MASS_DEFICIT: f64 = 1e-6;
pub const MC_MIN_SAMPLES: usize = 1_000;
pub const COV_MIN_SAMPLES: usize = 10_000;
/// Largest `d` evaluated through quadrature in function space.
pub const FUNCTION_SPACE_MAX_D: usize = 3;

const TRUNCATION_SEARCH_LIMIT: u64 = 10_000_000;

/// `[-2, 2]^2` lattice with spacing 0.25.
pub fn default_mercer_grid() -> Vec<(f64, f64)> {
    let pts: Vec<f64> = (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect();
    pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect()
}

/// `[-3, 3]` with spacing 0.25.
pub fn default_identity_points() -> Vec<f64> {
    (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect()
}

/// `max |K(x,y) - sum_{j<=J} lambda_j eta_j(x) eta_j(y)|` over the grid.
pub fn mercer_residual(gamma2: f64, j_max: usize, grid: &[(f64, f64)]) -> Result<f64> {
    if j_max == 0 {
        return Err(GkError::domain("Mercer truncation J must be >= 1"));
    }
    let s = UnivariateSpectrum::new(gamma2)?;
    let lambdas: Vec<f64> = (1..=j_max).map(|j| s.eigenvalue(j).map(|l| l.value())).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for &(x, y) in grid {
        let ex = s.eigenfunctions(j_max, x)?;
        let ey = s.eigenfunctions(j_max, y)?;
        let terms: Vec<f64> = (0..j_max).map(|j| lambdas[j] * ex[j] * ey[j]).collect();
        let r = (kernel_1d(gamma2, x, y) - pairwise_sum(&terms)).abs();
        worst = worst.max(r);
    }
    Ok(worst)
}

fn eigen_table(s: &UnivariateSpectrum, count: usize, rule: &QuadratureRule) -> Result<Vec<Vec<f64>>> {
    rule.nodes.iter().map(|&x| s.eigenfunctions(count, x)).collect()
}

/// `max |G - I|` for the Gram matrix of `eta_1..eta_J` under Gauss-Hermite
/// quadrature of the given order.
pub fn orthonormality_residual(gamma2: f64, j_max: usize, order: usize) -> Result<f64> {
    if j_max == 0 {
        return Err(GkError::domain("J must be >= 1"));
    }
    if order < 4 * j_max {
        return Err(GkError::domain(format!(
            "quadrature order {order} is below 4J = {}",
            4 * j_max
        )));
    }
    let s = UnivariateSpectrum::new(gamma2)?;
    let rule = gauss_hermite(order)?;
    let table = eigen_table(&s, j_max, &rule)?;
    let mut worst: f64 = 0.0;
    for i in 0..j_max {
        for j in i..j_max {
            let g = rule
                .weights
                .iter()
                .zip(&table)
                .fold(crate::sum::NeumaierSum::default(), |acc, (w, e)| acc + w * e[i] * e[j])
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    Ok(worst)
}

/// `max |int K(x,y) eta_j(y) w(y) dy - lambda_j eta_j(x)|` over `j <= J` and
/// the points `xs`, with the integral done by quadrature.
pub fn eigen_identity_residual(gamma2: f64, j_max: usize, xs: &[f64], order: usize) -> Result<f64> {
    if j_max == 0 {
        return Err(GkError::domain("J must be >= 1"));
    }
    let s = UnivariateSpectrum::new(gamma2)?;
    let rule = gauss_hermite(order)?;
    let table = eigen_table(&s, j_max, &rule)?;
    let mut worst: f64 = 0.0;
    for &x in xs {
        let at_x = s.eigenfunctions(j_max, x)?;
        let kx: Vec<f64> = rule.nodes.iter().map(|&y| kernel_1d(gamma2, x, y)).collect();
        for j in 0..j_max {
            let lhs = rule
                .weights
                .iter()
                .zip(&kx)
                .zip(&table)
                .fold(crate::sum::NeumaierSum::default(), |acc, ((w, k), e)| acc + w * k * e[j])
                .sum();
            let rhs = s.eigenvalue(j + 1)?.value() * at_x[j];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Residual of one deterministic spectral check against its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub check: &'static str,
    pub gamma2: f64,
    pub truncation: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SpectralReport {
    pub fn new(check: &'static str, gamma2: f64, truncation: usize, residual: f64, tolerance: f64) -> Self {
        SpectralReport {
            check,
            gamma2,
            truncation,
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

/// Smallest `M` whose leading eigenvalues leave at most `deficit` of the mass.
pub fn required_truncation(shape: &ShapeSequence, d: usize, deficit: f64) -> Result<usize> {
    let mut stream = open_stream(shape, d)?;
    while stream.remaining_mass() > deficit {
        if stream.emitted() >= TRUNCATION_SEARCH_LIMIT {
            return Err(GkError::Budget {
                budget: TRUNCATION_SEARCH_LIMIT,
                mass_reached: stream.partial_mass(),
                last_log_lambda: stream.last_ln(),
            });
        }
        if stream.next_entry()?.is_none() {
            break;
        }
    }
    Ok(stream.emitted().max(1) as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McPath {
    /// Function space for `d <= 3`, coefficients otherwise.
    Auto,
    FunctionSpace,
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub n: usize,
    pub truncation: usize,
    pub samples: usize,
    pub seed: u64,
    pub path: McPath,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCReport {
    pub d: usize,
    pub n: usize,
    pub truncation: usize,
    pub truncated_mass: f64,
    pub samples: usize,
    pub seed: u64,
    pub path: McPath,
    pub estimate: f64,
    pub std_error: f64,
    /// Exact `e(n,d)^2`.
    pub reference: f64,
    pub z_score: f64,
    pub passed: bool,
}

fn draw_normals(seed: u64, sample: usize, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = pairwise_sum(values) / m;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Dense row-major tensor with up to three axes.
struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Contracts `axis` with `mat` (`rows x dims[axis]`, row-major).
    fn mode_product(&self, axis: usize, mat: &[f64], rows: usize) -> Tensor {
        let cols = self.dims[axis];
        let outer: usize = self.dims[..axis].iter().product();
        let inner: usize = self.dims[axis + 1..].iter().product();
        let mut data = vec![0.0; outer * rows * inner];
        for o in 0..outer {
            for r in 0..rows {
                let dst = &mut data[(o * rows + r) * inner..(o * rows + r + 1) * inner];
                for c in 0..cols {
                    let b = mat[r * cols + c];
                    if b == 0.0 {
                        continue;
                    }
                    let src = &self.data[(o * cols + c) * inner..(o * cols + c + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += b * s;
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims[axis] = rows;
        Tensor { dims, data }
    }
}

fn flat_offset(dims: &[usize], idx: &TensorIndex) -> usize {
    idx.0
        .iter()
        .zip(dims)
        .fold(0, |acc, (&m, &n)| acc * n + m as usize)
}

/// Quadrature data shared by every function-space sample.
struct FunctionSpace {
    coef_dims: Vec<usize>,
    grid_dims: Vec<usize>,
    /// Per axis: `Q x K` values of `eta_{m+1}` at the nodes.
    synth: Vec<Vec<f64>>,
    /// Per axis: `K x Q` weighted transpose, for inner products.
    analyse: Vec<Vec<f64>>,
    weights: Vec<f64>,
    offsets: Vec<usize>,
}

impl FunctionSpace {
    fn new(spectra: &[UnivariateSpectrum], indices: &[TensorIndex]) -> Result<Self> {
        let d = spectra.len();
        let coef_dims: Vec<usize> = (0..d)
            .map(|k| indices.iter().map(|i| i.0[k] as usize + 1).max().unwrap_or(1))
            .collect();
        let mut synth = Vec::with_capacity(d);
        let mut analyse = Vec::with_capacity(d);
        let mut grid_dims = Vec::with_capacity(d);
        let mut rules = Vec::with_capacity(d);
        for k in 0..d {
            let kk = coef_dims[k];
            let q = (4 * kk + 20).clamp(40, MAX_ORDER);
            let rule = gauss_hermite(q)?;
            let mut e = vec![0.0; q * kk];
            for (r, &x) in rule.nodes.iter().enumerate() {
                let vals = spectra[k].eigenfunctions(kk, x)?;
                e[r * kk..(r + 1) * kk].copy_from_slice(&vals);
            }
            let mut a = vec![0.0; kk * q];
            for r in 0..q {
                for c in 0..kk {
                    a[c * q + r] = rule.weights[r] * e[r * kk + c];
                }
            }
            synth.push(e);
            analyse.push(a);
            grid_dims.push(q);
            rules.push(rule);
        }
        let mut weights = vec![1.0];
        for rule in &rules {
            weights = weights
                .iter()
                .flat_map(|&w| rule.weights.iter().map(move |&v| w * v))
                .collect();
        }
        let offsets = indices.iter().map(|i| flat_offset(&coef_dims, i)).collect();
        Ok(FunctionSpace {
            coef_dims,
            grid_dims,
            synth,
            analyse,
            weights,
            offsets,
        })
    }

    fn synthesize(&self, coef: Tensor) -> Tensor {
        let mut t = coef;
        for k in 0..self.coef_dims.len() {
            t = t.mode_product(k, &self.synth[k], self.grid_dims[k]);
        }
        t
    }

    /// `||f - A*_n f||^2` for the sample with scaled coefficients `a`
    /// (ordered by rank), evaluated entirely on the quadrature grid.
    fn residual_norm(&self, a: &[f64], n: usize) -> f64 {
        let mut coef = Tensor {
            dims: self.coef_dims.clone(),
            data: vec![0.0; self.coef_dims.iter().product()],
        };
        for (&off, &v) in self.offsets.iter().zip(a) {
            coef.data[off] = v;
        }
        let f = self.synthesize(coef);
        // numerical inner products <f, eta_j>
        let mut c = Tensor {
            dims: f.dims.clone(),
            data: f.data.clone(),
        };
        for k in 0..self.coef_dims.len() {
            c = c.mode_product(k, &self.analyse[k], self.coef_dims[k]);
        }
        let mut kept = Tensor {
            dims: self.coef_dims.clone(),
            data: vec![0.0; c.data.len()],
        };
        for &off in &self.offsets[..n] {
            kept.data[off] = c.data[off];
        }
        let proj = self.synthesize(kept);
        let terms: Vec<f64> = f
            .data
            .iter()
            .zip(&proj.data)
            .zip(&self.weights)
            .map(|((x, p), w)| w * (x - p) * (x - p))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Monte Carlo estimate of `e(n,d)^2` from truncated Karhunen-Loeve samples.
pub fn mc_avg_error(shape: &ShapeSequence, d: usize, cfg: &McConfig) -> Result<MCReport> {
    let McConfig {
        n,
        truncation: m,
        samples,
        seed,
        path,
    } = *cfg;
    if samples < MC_MIN_SAMPLES {
        return Err(GkError::domain(format!(
            "Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if m <= n {
        return Err(GkError::domain(format!("truncation M = {m} must exceed n = {n}")));
    }
    let path = match path {
        McPath::Auto if d <= FUNCTION_SPACE_MAX_D => McPath::FunctionSpace,
        McPath::Auto => McPath::Analytic,
        McPath::FunctionSpace if d > FUNCTION_SPACE_MAX_D => {
            return Err(GkError::domain(format!(
                "function-space evaluation supports d <= {FUNCTION_SPACE_MAX_D}"
            )))
        }
        p => p,
    };
    let mut stream = open_stream(shape, d)?;
    let reference = {
        let mut s = open_stream(shape, d)?;
        s.advance_to(n as u64)?;
        s.tail_ln().exp()
    };
    let batch = stream.next_batch(m)?;
    if stream.remaining_mass() > MC_MASS_DEFICIT {
        let need = required_truncation(shape, d, MC_MASS_DEFICIT)?;
        return Err(GkError::domain(format!(
            "truncation M = {m} keeps mass {:.9}; M >= {need} is required for 1 - {MC_MASS_DEFICIT:e}",
            stream.partial_mass()
        )));
    }
    let sqrt_l: Vec<f64> = batch.iter().map(|(l, _)| l.sqrt().value()).collect();
    let indices: Vec<TensorIndex> = batch.into_iter().map(|(_, i)| i).collect();
    let fs = if path == McPath::FunctionSpace {
        Some(FunctionSpace::new(stream.spectra(), &indices)?)
    } else {
        None
    };
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut xi = vec![0.0; m];
            draw_normals(seed, i, &mut xi);
            let a: Vec<f64> = xi.iter().zip(&sqrt_l).map(|(x, s)| x * s).collect();
            match &fs {
                Some(fs) => fs.residual_norm(&a, n),
                None => {
                    let sq: Vec<f64> = a[n..].iter().map(|v| v * v).collect();
                    pairwise_sum(&sq)
                }
            }
        })
        .collect();
    let (estimate, std_error) = mean_and_std_error(&values);
    let z_score = (estimate - reference) / std_error;
    Ok(MCReport {
        d,
        n,
        truncation: m,
        truncated_mass: stream.partial_mass(),
        samples,
        seed,
        path,
        estimate,
        std_error,
        reference,
        z_score,
        passed: z_score.abs() <= MC_Z_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovEntry {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub empirical: f64,
    pub kernel: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovReport {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub truncation: usize,
    pub entries: Vec<CovEntry>,
    /// Largest `|empirical - kernel|` over all point pairs.
    pub max_deviation: f64,
    /// Monte Carlo standard error of the entry attaining `max_deviation`.
    pub std_error: f64,
    /// Largest `|empirical - kernel| / std_error` over all pairs.
    pub max_z: f64,
    pub passed: bool,
}

/// Empirical covariance of KL samples at every pair of `points` against the
/// tensor kernel.
pub fn covariance_check(
    shape: &ShapeSequence,
    d: usize,
    points: &[Vec<f64>],
    samples: usize,
    seed: u64,
) -> Result<CovReport> {
    if d == 0 || d > 2 {
        return Err(GkError::domain(format!("covariance check supports d in 1..=2, got {d}")));
    }
    if samples < COV_MIN_SAMPLES {
        return Err(GkError::domain(format!(
            "covariance check needs at least {COV_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if points.is_empty() || points.iter().any(|p| p.len() != d) {
        return Err(GkError::domain(format!("points must be non-empty vectors of length d = {d}")));
    }
    let m = required_truncation(shape, d, 1e-12)?;
    let mut stream = open_stream(shape, d)?;
    let batch = stream.next_batch(m)?;
    let spectra = stream.spectra().to_vec();
    let kmax: Vec<usize> = (0..d)
        .map(|k| batch.iter().map(|(_, i)| i.0[k] as usize + 1).max().unwrap_or(1))
        .collect();
    // phi[p][j] = sqrt(lambda_j) eta_j(points[p])
    let mut phi = Vec::with_capacity(points.len());
    for p in points {
        let tables: Vec<Vec<f64>> = (0..d)
            .map(|k| spectra[k].eigenfunctions(kmax[k], p[k]))
            .collect::<Result<_>>()?;
        let row: Vec<f64> = batch
            .iter()
            .map(|(l, idx)| {
                idx.0
                    .iter()
                    .enumerate()
                    .fold(l.sqrt().value(), |acc, (k, &mk)| acc * tables[k][mk as usize])
            })
            .collect();
        phi.push(row);
    }
    let values: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut xi = vec![0.0; m];
            draw_normals(seed, i, &mut xi);
            phi.iter()
                .map(|row| {
                    let t: Vec<f64> = row.iter().zip(&xi).map(|(a, b)| a * b).collect();
                    pairwise_sum(&t)
                })
                .collect()
        })
        .collect();
    let mut entries = Vec::new();
    let (mut max_dev, mut se_at_max, mut max_z) = (0.0f64, 0.0, 0.0f64);
    for a in 0..points.len() {
        for b in a..points.len() {
            let prods: Vec<f64> = values.iter().map(|v| v[a] * v[b]).collect();
            let (mean, se) = mean_and_std_error(&prods);
            let kernel = tensor_kernel(shape, d, &points[a], &points[b])?;
            let dev = (mean - kernel).abs();
            if dev > max_dev {
                max_dev = dev;
                se_at_max = se;
            }
            max_z = max_z.max(dev / se);
            entries.push(CovEntry {
                x: points[a].clone(),
                y: points[b].clone(),
                empirical: mean,
                kernel,
                std_error: se,
            });
        }
    }
    Ok(CovReport {
        d,
        samples,
        seed,
        truncation: m,
        entries,
        max_deviation: max_dev,
        std_error: se_at_max,
        max_z,
        passed: max_z <= COV_Z_TOL,
    })
}

/// Default quadrature order for the spectral identities.
pub const SPECTRAL_ORDER: usize = DEFAULT_ORDER;

#[cfg(test)]
mod tests {
    use super::*;

    fn const1() -> ShapeSequence {
        ShapeSequence::constant(1.0).unwrap()
    }

    #[test]
    fn mercer_examples() {
        let r = mercer_residual(1.0, 60, &default_mercer_grid()).unwrap();
        assert!(r <= MERCER_TOL, "{r}");
        let r1 = mercer_residual(1.0, 1, &[(0.0, 0.0)]).unwrap();
        assert!((r1 - 0.075_823_628_169_555_12).abs() < 1e-12);
        assert!(mercer_residual(1.0, 0, &[(0.0, 0.0)]).is_err());
    }

    #[test]
    fn mercer_diagonal_nonincreasing_and_nonnegative() {
        let s = UnivariateSpectrum::new(1.0).unwrap();
        for x in [-1.5, 0.0, 0.7, 2.0] {
            let mut prev = f64::INFINITY;
            for j in 1..=40 {
                let r = mercer_residual(1.0, j, &[(x, x)]).unwrap();
                assert!(r <= prev + 1e-15);
                prev = r;
                let eta = s.eigenfunctions(j, x).unwrap();
                let partial: f64 = (0..j).map(|i| s.eigenvalue(i + 1).unwrap().value() * eta[i] * eta[i]).sum();
                assert!(1.0 - partial >= -1e-14);
            }
        }
    }

    #[test]
    fn orthonormality_examples() {
        assert!(orthonormality_residual(1.0, 10, 200).unwrap() <= ORTHO_TOL);
        assert!(orthonormality_residual(1.0, 1, 200).unwrap() <= 1e-10);
        assert!(orthonormality_residual(4.0, 10, 200).unwrap() <= 1e-6);
        assert!(matches!(orthonormality_residual(1.0, 60, 200), Err(GkError::Domain(_))));
    }

    #[test]
    fn eigen_identity_examples() {
        for g in [0.25, 1.0, 4.0] {
            let r = eigen_identity_residual(g, 10, &default_identity_points(), 200).unwrap();
            assert!(r <= EIGEN_IDENTITY_TOL, "g={g}: {r}");
        }
    }

    #[test]
    fn truncation_requirement() {
        let w = crate::univariate::omega(1.0).unwrap();
        let m = required_truncation(&const1(), 1, 1e-6).unwrap();
        assert_eq!(m, (1e-6f64.ln() / w.ln()).ceil() as usize);
    }

    #[test]
    fn mc_preconditions() {
        let c = const1();
        let cfg = |n, m, samples| McConfig { n, truncation: m, samples, seed: 1, path: McPath::Auto };
        assert!(mc_avg_error(&c, 1, &cfg(5, 60, 10)).is_err());
        assert!(mc_avg_error(&c, 1, &cfg(5, 5, 1000)).is_err());
        let err = mc_avg_error(&c, 1, &cfg(5, 10, 1000)).unwrap_err();
        assert!(err.to_string().contains("M >= 15"), "{err}");
        let fs = McConfig { path: McPath::FunctionSpace, ..cfg(1, 60, 1000) };
        assert!(mc_avg_error(&c, 4, &fs).is_err());
    }

    #[test]
    fn mc_one_dimension_and_paths_agree() {
        let c = const1();
        let base = McConfig { n: 5, truncation: 60, samples: 4000, seed: 7, path: McPath::FunctionSpace };
        let fs = mc_avg_error(&c, 1, &base).unwrap();
        assert!(fs.z_score.abs() <= MC_Z_TOL, "{fs:?}");
        assert!((fs.reference - 0.008_130_618_8).abs() < 1e-9);
        let an = mc_avg_error(&c, 1, &McConfig { path: McPath::Analytic, ..base.clone() }).unwrap();
        assert!((fs.estimate - an.estimate).abs() <= 1e-8, "{} vs {}", fs.estimate, an.estimate);
        let again = mc_avg_error(&c, 1, &base).unwrap();
        assert_eq!(fs, again);
    }

    #[test]
    fn mc_initial_error() {
        let c = const1();
        let r = mc_avg_error(&c, 1, &McConfig { n: 0, truncation: 60, samples: 2000, seed: 3, path: McPath::Auto }).unwrap();
        assert_eq!(r.reference, 1.0);
        assert!(r.z_score.abs() <= MC_Z_TOL);
    }

    #[test]
    fn mc_analytic_high_dimension() {
        let s = ShapeSequence::power(1.0, 3.0).unwrap();
        let m = required_truncation(&s, 5, MC_MASS_DEFICIT).unwrap();
        let r = mc_avg_error(&s, 5, &McConfig { n: 3, truncation: m, samples: 2000, seed: 11, path: McPath::Auto }).unwrap();
        assert_eq!(r.path, McPath::Analytic);
        assert!(r.z_score.abs() <= MC_Z_TOL);
    }

    #[test]
    fn covariance_examples() {
        let c = const1();
        let pts = vec![vec![-1.0], vec![0.0], vec![1.0]];
        let r = covariance_check(&c, 1, &pts, 20_000, 5).unwrap();
        assert!(r.passed, "{r:?}");
        let diag = r.entries.iter().find(|e| e.x == vec![0.0] && e.y == vec![0.0]).unwrap();
        assert!((diag.empirical - 1.0).abs() < 5.0 * diag.std_error);
        let r2 = covariance_check(&c, 2, &[vec![0.0, 0.0], vec![1.0, 1.0]], 20_000, 9).unwrap();
        let off = &r2.entries[1];
        assert!((off.kernel - (-2.0f64).exp()).abs() < 1e-15);
        assert!(r2.passed, "{r2:?}");
        assert!(covariance_check(&c, 3, &[vec![0.0; 3]], 20_000, 1).is_err());
        assert!(covariance_check(&c, 1, &pts, 100, 1).is_err());
    }
}
