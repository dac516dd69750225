//! Decay-rate calculator from comparison with a Bessel-profile subsolution
//! of the variable-coefficient parabolic operator q_t = a_kj q,_kj + b_k q,_k.
//!
//! With normalized ellipticity α (a ξ·ξ >= α tr(a) |ξ|²), k₀ = inf 1/tr(a),
//! and drift bound β = sup b·x, the comparison profile has order
//! μ = (β+1)/(2α) − 1 and the decay rate is λ = α ξ₀²/k₀ where ξ₀ is the
//! first positive zero of J_μ. Identity coefficients give exactly μ = 0 and
//! λ = λ₁, the optimal linear heat rate.

use crate::bessel::bessel_zero;
use crate::error::{Error, Result};
use crate::solver::VariableCoefficients;

#[derive(Debug, Clone, Copy)]
pub struct OddsonRate {
    /// Normalized ellipticity constant, in (0, 1/2].
    pub alpha: f64,
    /// inf of 1/tr(a).
    pub k0: f64,
    /// sup of b·x.
    pub beta_drift: f64,
    /// Comparison Bessel order.
    pub mu: f64,
    /// First positive zero of J_mu.
    pub xi0: f64,
    /// Decay rate α ξ₀² / k₀.
    pub lambda: f64,
}

/// Pointwise extrema of one coefficient snapshot, to be folded over a window.
#[derive(Debug, Clone, Copy)]
pub struct OddsonSample {
    /// min over nodes of (smallest eigenvalue of a)/tr(a).
    pub alpha: f64,
    /// min over nodes of 1/tr(a).
    pub k0: f64,
    /// max over nodes of b·x.
    pub beta_drift: f64,
}

pub fn sample_coefficients(coeffs: &VariableCoefficients) -> Result<OddsonSample> {
    let grid = &coeffs.a.grid;
    let mut alpha = f64::INFINITY;
    let mut k0 = f64::INFINITY;
    let mut beta = f64::NEG_INFINITY;
    for i in 0..grid.n_r {
        for j in 0..grid.n_theta {
            let k = grid.idx(i, j);
            let eig = coeffs.min_eigenvalue_at(k);
            let tr = coeffs.trace_at(k);
            if eig <= 0.0 || tr <= 0.0 {
                return Err(Error::Ellipticity(format!(
                    "coefficient matrix not positive definite at node ({i}, {j})"
                )));
            }
            alpha = alpha.min(eig / tr);
            k0 = k0.min(1.0 / tr);
            let x = grid.r[i] * grid.theta[j].cos();
            let y = grid.r[i] * grid.theta[j].sin();
            beta = beta.max(coeffs.b.x[k] * x + coeffs.b.y[k] * y);
        }
    }
    Ok(OddsonSample {
        alpha,
        k0,
        beta_drift: beta,
    })
}

/// Fold per-time samples over a window and evaluate the rate formulas.
pub fn oddson_rate(samples: &[OddsonSample]) -> Result<OddsonRate> {
    if samples.is_empty() {
        return Err(Error::Coverage("no coefficient samples in window".into()));
    }
    let alpha = samples.iter().map(|s| s.alpha).fold(f64::INFINITY, f64::min);
    let k0 = samples.iter().map(|s| s.k0).fold(f64::INFINITY, f64::min);
    let beta = samples
        .iter()
        .map(|s| s.beta_drift)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(alpha > 0.0 && alpha <= 0.5 + 1e-12) {
        return Err(Error::Ellipticity(format!(
            "normalized ellipticity α = {alpha} outside (0, 1/2]"
        )));
    }
    let mu = (beta + 1.0) / (2.0 * alpha) - 1.0;
    if mu < 0.0 {
        return Err(Error::Ellipticity(format!(
            "comparison order μ = {mu} negative (drift too strong)"
        )));
    }
    let xi0 = bessel_zero(mu, 1)?;
    Ok(OddsonRate {
        alpha,
        k0,
        beta_drift: beta,
        mu,
        xi0,
        lambda: alpha * xi0 * xi0 / k0,
    })
}
