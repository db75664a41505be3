//! Construction parameters and their optimum.
//!
//! The guarantee is `(1+eps) * lambda * max(c_B * gamma, c_R * delta)` with
//! `c_B = beta*gamma/(gamma-1)` and `c_R = alpha*delta/(delta-alpha-1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::last::beta_for;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parameters {
    pub eps: f64,
    /// Shortest-path stretch of each LAST.
    pub alpha: f64,
    /// MST weight factor of each LAST.
    pub beta: f64,
    /// Required drop in normalized buy cost between layers.
    pub gamma: f64,
    /// Required growth in rent cost between layers.
    pub delta: f64,
}

impl Parameters {
    pub fn new(eps: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = Parameters {
            eps,
            alpha,
            beta,
            gamma,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// `beta` set to the smallest value the LAST construction guarantees.
    pub fn with_tight_beta(eps: f64, alpha: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::InvalidParameters(format!("alpha must exceed 1, got {alpha}")));
        }
        Self::new(eps, alpha, beta_for(alpha), gamma, delta)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must exceed 1, got {}", self.alpha));
        }
        if !(self.beta >= beta_for(self.alpha) * (1.0 - 1e-12)) {
            return bad(format!(
                "beta {} is below (alpha+1)/(alpha-1) = {}",
                self.beta,
                beta_for(self.alpha)
            ));
        }
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.delta > self.alpha + 1.0) || !self.delta.is_finite() {
            return bad(format!(
                "delta must exceed alpha + 1 = {}, got {}",
                self.alpha + 1.0,
                self.delta
            ));
        }
        Ok(())
    }

    /// Buy-side layer constant.
    pub fn c_b(&self) -> f64 {
        self.beta * self.gamma / (self.gamma - 1.0)
    }

    /// Rent-side layer constant.
    pub fn c_r(&self) -> f64 {
        self.alpha * self.delta / (self.delta - self.alpha - 1.0)
    }

    /// `max(c_B * gamma, c_R * delta)`: the per-basis-function factor.
    pub fn layer_bound(&self) -> f64 {
        (self.c_b() * self.gamma).max(self.c_r() * self.delta)
    }

    /// Bound for arbitrary concave functions with an exact rent-or-buy
    /// solver; multiply by the solver's ratio otherwise.
    pub fn headline_ratio(&self) -> f64 {
        (1.0 + self.eps) * self.layer_bound()
    }
}

/// The closed-form optimum: `alpha` the golden ratio, `beta = 2+sqrt 5`,
/// `gamma = 2`, `delta = 3+sqrt 5`, where both branches equal `8+4 sqrt 5`.
pub fn optimal_parameters(eps: f64) -> Parameters {
    let root5 = 5f64.sqrt();
    Parameters {
        eps,
        alpha: (1.0 + root5) / 2.0,
        beta: 2.0 + root5,
        gamma: 2.0,
        delta: 3.0 + root5,
    }
}

/// `8 + 4 sqrt 5`, the optimal layer bound.
pub fn optimal_layer_bound() -> f64 {
    8.0 + 4.0 * 5f64.sqrt()
}

/// The two branches of the layer bound, `beta gamma^2/(gamma-1)` and
/// `alpha delta^2/(delta-alpha-1)`.
pub fn branches(alpha: f64, beta: f64, gamma: f64, delta: f64) -> (f64, f64) {
    (
        beta * gamma * gamma / (gamma - 1.0),
        alpha * delta * delta / (delta - alpha - 1.0),
    )
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Reoptimized {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub value: f64,
}

const GOLDEN_TOL: f64 = 1e-13;

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > GOLDEN_TOL * (1.0 + lo.abs()) {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    (lo + hi) / 2.0
}

/// Grid scan then golden-section refinement between the grid neighbours of
/// the best point.
fn grid_then_refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let step = (hi - lo) / points as f64;
    let best = (1..points)
        .min_by(|&a, &b| f(lo + a as f64 * step).total_cmp(&f(lo + b as f64 * step)))
        .unwrap_or(1);
    golden_section(&f, lo + (best - 1) as f64 * step, lo + (best + 1) as f64 * step)
}

/// Numeric minimisation of the layer bound over `alpha > 1`, `gamma > 1`,
/// `delta > alpha + 1` with `beta = (alpha+1)/(alpha-1)`.
///
/// For fixed `alpha`, `gamma` only affects the buy branch and `delta` only
/// the rent branch, so each is minimised on its own; the outer search is
/// over `alpha`. Search intervals are scaled from the starting point.
pub fn reoptimize(start_alpha: f64, start_gamma: f64, start_delta: f64) -> Reoptimized {
    const GRID: usize = 400;
    let span = |x: f64| 4.0 * x.max(2.0);

    let best_gamma = |_alpha: f64| {
        grid_then_refine(|g| g * g / (g - 1.0), 1.0, 1.0 + span(start_gamma), GRID)
    };
    let best_delta = |alpha: f64| {
        let lo = alpha + 1.0;
        grid_then_refine(
            |d| alpha * d * d / (d - alpha - 1.0),
            lo,
            lo + span(start_delta),
            GRID,
        )
    };
    let value_at = |alpha: f64| {
        let (gamma, delta) = (best_gamma(alpha), best_delta(alpha));
        let (b, r) = branches(alpha, beta_for(alpha), gamma, delta);
        b.max(r)
    };
    let alpha = grid_then_refine(value_at, 1.0, 1.0 + span(start_alpha), GRID);
    let (gamma, delta) = (best_gamma(alpha), best_delta(alpha));
    Reoptimized {
        alpha,
        beta: beta_for(alpha),
        gamma,
        delta,
        value: value_at(alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let p = optimal_parameters(0.1);
        assert!((p.alpha - 1.618_033_988_7).abs() < 1e-9);
        assert!((p.beta - 4.236_067_977_5).abs() < 1e-9);
        assert!((p.delta - 5.236_067_977_5).abs() < 1e-9);
        assert_eq!(p.gamma, 2.0);
        assert!((beta_for(p.alpha) - p.beta).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn both_branches_hit_the_optimum() {
        let p = optimal_parameters(0.5);
        let bound = optimal_layer_bound();
        assert!((bound - 16.944_271_910_0).abs() < 1e-9);
        assert!((p.c_b() * p.gamma - bound).abs() < 1e-9);
        assert!((p.c_r() * p.delta - bound).abs() < 1e-9);
        let (b, r) = branches(p.alpha, p.beta, p.gamma, p.delta);
        assert!((b - r).abs() < 1e-9);
        // max{4 beta, 4 alpha (alpha+1)}
        assert!((4.0 * p.beta - bound).abs() < 1e-9);
        assert!((4.0 * p.alpha * (p.alpha + 1.0) - bound).abs() < 1e-9);
        assert!((p.headline_ratio() - 1.5 * bound).abs() < 1e-9);
    }

    #[test]
    fn reoptimizer_lands_on_closed_form() {
        let r = reoptimize(2.0, 3.0, 8.0);
        let p = optimal_parameters(0.1);
        assert!((r.alpha - p.alpha).abs() < 1e-6, "{r:?}");
        assert!((r.beta - p.beta).abs() < 1e-6);
        assert!((r.gamma - p.gamma).abs() < 1e-6);
        assert!((r.delta - p.delta).abs() < 1e-6);
        assert!((r.value - optimal_layer_bound()).abs() < 1e-6);
    }

    #[test]
    fn domain_checks() {
        assert!(Parameters::new(0.1, 1.0, 10.0, 2.0, 5.0).is_err());
        assert!(Parameters::new(0.1, 2.0, 2.9, 2.0, 5.0).is_err());
        assert!(Parameters::new(0.1, 2.0, 3.0, 1.0, 5.0).is_err());
        // delta below alpha + 1 makes the rent constant's denominator nonpositive
        assert!(Parameters::new(0.1, 2.0, 3.0, 2.0, 3.0).is_err());
        assert!(Parameters::new(0.0, 2.0, 3.0, 2.0, 5.0).is_err());
        assert!(Parameters::with_tight_beta(0.1, 2.0, 2.0, 5.0).is_ok());
    }
}
