//! Poisson reference distribution and total variation distance.

use crate::error::{precondition, Result};

/// `ln j!`.
pub fn ln_factorial(j: u64) -> f64 {
    if j < 1024 {
        (2..=j).map(|i| (i as f64).ln()).sum()
    } else {
        // Stirling series; the next term is below 1e-15 at this size.
        let x = j as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

/// `e^{-λ} λ^j / j!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    debug_assert!(lambda > 0.0);
    if j == 0 {
        return (-lambda).exp();
    }
    (-lambda + j as f64 * lambda.ln() - ln_factorial(j)).exp()
}

/// The pmf of `Po(λ)` on `0..=j_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonRef {
    pub lambda: f64,
    pub pmf: Vec<f64>,
}

impl PoissonRef {
    pub fn new(lambda: f64, j_max: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return precondition(format!("lambda must be positive and finite, got {lambda}"));
        }
        let pmf = (0..=j_max as u64).map(|j| poisson_pmf(lambda, j)).collect();
        Ok(Self { lambda, pmf })
    }

    pub fn get(&self, j: usize) -> f64 {
        self.pmf.get(j).copied().unwrap_or(0.0)
    }
}

/// Total variation distance between two distributions on `0, 1, 2, …` given
/// as probability vectors, `½ Σ_j |p_j − q_j|`.
///
/// Vectors may be truncated. Mass missing from a vector (one minus its sum) is
/// treated as a single shared tail bucket, so two truncations of the same
/// distribution still compare as close.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
    let body: f64 = (0..len).map(|j| (at(p, j) - at(q, j)).abs()).sum();
    let tail = |v: &[f64]| (1.0 - v.iter().sum::<f64>()).max(0.0);
    (0.5 * (body + (tail(p) - tail(q)).abs())).clamp(0.0, 1.0)
}

/// Truncation level for [`tv_poisson`]: both upper tails fall below this.
pub const POISSON_TAIL: f64 = 1e-12;

/// `d_TV(Po(λ), Po(λ'))` by direct summation, stopping once both upper tails
/// are below [`POISSON_TAIL`].
pub fn tv_poisson(lambda: f64, lambda_prime: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda_prime > 0.0 && lambda.is_finite() && lambda_prime.is_finite()) {
        return precondition("Poisson means must be positive and finite");
    }
    let mut sum = 0.0;
    let (mut cdf_a, mut cdf_b) = (0.0, 0.0);
    let peak = lambda.max(lambda_prime);
    let mut j = 0u64;
    loop {
        let a = poisson_pmf(lambda, j);
        let b = poisson_pmf(lambda_prime, j);
        sum += (a - b).abs();
        cdf_a += a;
        cdf_b += b;
        if j as f64 > peak && 1.0 - cdf_a < POISSON_TAIL && 1.0 - cdf_b < POISSON_TAIL {
            break;
        }
        j += 1;
    }
    Ok((0.5 * sum).clamp(0.0, 1.0))
}
