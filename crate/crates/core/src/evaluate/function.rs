use serde::Serialize;

use crate::error::{Error, Result};
use crate::routing::{threshold, RoutedTree};

/// A concave nondecreasing cost `f(x) = sum_i a_i * min(x, M_i)` with
/// `a_i >= 0` over the grid `M_i = (1+eps)^i`, `i = 0..=K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcaveFunction {
    eps: f64,
    coeffs: Vec<f64>,
}

impl ConcaveFunction {
    pub fn new(eps: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidFunction(format!("eps must be positive, got {eps}")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidFunction("no coefficients".into()));
        }
        if let Some((i, a)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, a)| !(**a >= 0.0) || !a.is_finite())
        {
            return Err(Error::InvalidFunction(format!("coefficient a_{i} = {a} is negative")));
        }
        Ok(ConcaveFunction { eps, coeffs })
    }

    /// The single basis function `min(x, M_j)` on a grid with top index `k`.
    pub fn basis(eps: f64, k: usize, j: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[j] = 1.0;
        ConcaveFunction { eps, coeffs }
    }

    /// Decomposes grid samples `g(M_0), ..., g(M_K)` into basis
    /// coefficients. Each coefficient is the drop in slope at its
    /// breakpoint; the slope after `M_K` is taken to be zero.
    pub fn from_samples(samples: &[f64], eps: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidFunction("no samples".into()));
        }
        let grid: Vec<f64> = (0..samples.len()).map(|i| threshold(i, eps)).collect();
        let mut slopes = Vec::with_capacity(samples.len() + 1);
        slopes.push(samples[0] / grid[0]);
        for i in 1..samples.len() {
            slopes.push((samples[i] - samples[i - 1]) / (grid[i] - grid[i - 1]));
        }
        slopes.push(0.0);

        let scale = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        if let Some(i) = slopes.iter().position(|&s| s < -tol || !s.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "samples decrease before breakpoint {i}"
            )));
        }
        let mut coeffs = Vec::with_capacity(samples.len());
        for i in 0..samples.len() {
            let drop = slopes[i] - slopes[i + 1];
            if drop < -tol {
                return Err(Error::InvalidFunction(format!(
                    "samples are not concave at breakpoint {i}"
                )));
            }
            coeffs.push(drop.max(0.0));
        }
        Ok(ConcaveFunction { eps, coeffs })
    }

    /// Samples `f` at the grid points `M_0..M_K` and decomposes.
    pub fn sample(eps: f64, k: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = (0..=k).map(|i| f(threshold(i, eps))).collect();
        Self::from_samples(&samples, eps)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Top grid index.
    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * x.min(threshold(i, self.eps)))
            .sum()
    }
}

/// `f(T) = sum_i a_i * A_i(T)`.
pub fn eval_cost(t: &RoutedTree, f: &ConcaveFunction) -> f64 {
    f.coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(i, a)| a * t.basis_cost(threshold(i, f.eps)))
        .sum()
}
