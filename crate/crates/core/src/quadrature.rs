//! Gauss-Hermite quadrature for the probability weight `exp(-x^2) / sqrt(pi)`.
//!
//! Nodes start from the eigenvalues of the symmetric Jacobi matrix
//! (Golub-Welsch) and are polished by Newton steps on the orthonormal
//! Hermite recurrence. Weights come from the Christoffel formula
//! `w_i = 1 / (n p_{n-1}(x_i)^2)` evaluated in the log domain; for orders
//! above roughly 380 the outermost weights underflow to zero.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GkError, Result};
use crate::sum::NeumaierSum;

pub const MAX_ORDER: usize = 500;
pub const DEFAULT_ORDER: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x);
        }
        acc.sum()
    }
}

/// Orthonormal `p_{n-1}(x)`, `p_n(x)` as (mantissa, mantissa, shared ln scale).
fn orthonormal_pair(n: usize, x: f64) -> (f64, f64, f64) {
    let mut ln_scale = 0.0;
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            ln_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (prev, cur, ln_scale)
}

/// Gauss-Hermite rule of the given order, exact for polynomials of degree
/// `<= 2 order - 1` against `exp(-x^2) / sqrt(pi)`.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(GkError::domain("quadrature order must be >= 1"));
    }
    if order > MAX_ORDER {
        return Err(GkError::Range(format!(
            "quadrature order {order} exceeds {MAX_ORDER}"
        )));
    }
    let n = order;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let nf = n as f64;
    let mut ln_w = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pm1, p, _) = orthonormal_pair(n, *x);
            if pm1 == 0.0 {
                break;
            }
            let dx = p / ((2.0 * nf).sqrt() * pm1);
            *x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (pm1, _, ln_scale) = orthonormal_pair(n, *x);
        ln_w.push(-nf.ln() - 2.0 * (pm1.abs().ln() + ln_scale));
    }

    // enforce exact symmetry about the origin
    let mut weights: Vec<f64> = ln_w.iter().map(|l| l.exp()).collect();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total: NeumaierSum = weights.iter().copied().sum();
    let total = total.sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(QuadratureRule { order, nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment(rule: &QuadratureRule, k: i32) -> f64 {
        rule.integrate(|x| x.powi(k))
    }

    #[test]
    fn order_limits() {
        assert!(gauss_hermite(0).is_err());
        assert!(matches!(gauss_hermite(501), Err(GkError::Range(_))));
        assert!(gauss_hermite(500).is_ok());
    }

    #[test]
    fn one_point_rule() {
        let r = gauss_hermite(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn two_point_rule_is_textbook() {
        let r = gauss_hermite(2).unwrap();
        assert!((r.nodes[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn moments_at_many_orders() {
        for order in [1usize, 2, 3, 5, 10, 40, 100, 200, 300, 500] {
            let r = gauss_hermite(order).unwrap();
            assert!((moment(&r, 0) - 1.0).abs() <= 1e-14, "order {order}");
            if order >= 2 {
                assert!((moment(&r, 2) - 0.5).abs() <= 1e-12, "order {order}");
            }
            if order >= 3 {
                assert!((moment(&r, 4) - 0.75).abs() <= 1e-12, "order {order}");
            }
            if order >= 4 {
                // (2k - 1)!! / 2^k with k = 3
                assert!((moment(&r, 6) - 15.0 / 8.0).abs() <= 1e-11, "order {order}");
            }
            assert!((moment(&r, 3)).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_up_to_degree_2n_minus_1() {
        let r = gauss_hermite(6).unwrap();
        // degree 10 = 2*6 - 2, known moment 945/32
        assert!((moment(&r, 10) - 945.0 / 32.0).abs() <= 1e-10);
        // degree 12 is not integrated exactly
        assert!((moment(&r, 12) - 10395.0 / 64.0).abs() > 1e-3);
    }

    #[test]
    fn nodes_symmetric_weights_positive() {
        let r = gauss_hermite(200).unwrap();
        for i in 0..r.order {
            assert_eq!(r.nodes[i], -r.nodes[r.order - 1 - i]);
            assert_eq!(r.weights[i], r.weights[r.order - 1 - i]);
            assert!(r.weights[i] > 0.0);
        }
        for w in r.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn integrates_gaussian_exactly_enough() {
        // E[exp(-a x^2)] under N(0, 1/2) is 1 / sqrt(1 + a)
        let r = gauss_hermite(200).unwrap();
        for a in [0.1, 1.0, 3.0] {
            let v = r.integrate(|x| (-a * x * x).exp());
            assert!((v - 1.0 / (1.0 + a).sqrt()).abs() < 1e-13);
        }
    }
}
