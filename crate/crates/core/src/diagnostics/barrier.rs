//! Comparison-function residual for the sign-persistence argument.
//!
//! The barrier is P(t, r) = κ₁ e^{−(3/2)λ₁ t} (φ₁(r) − κ₂(1 − r²)); both
//! factors vanish at r = 1. Applying the parabolic operator with identity
//! coefficients gives the closed form
//! κ₁ e^{−(3/2)λ₁ t} (−½λ₁ φ₁ − 4κ₂ + (3/2)λ₁ κ₂ (1 − r²)),
//! which must be strictly negative at every node for an admissible κ₂. The
//! residual with measured coefficients (a, b) uses the analytic radial
//! derivatives of φ₁ and 1 − r², contracted nodewise.

use crate::eigen::EigenBasis;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::solver::VariableCoefficients;

#[derive(Debug, Clone, Copy)]
pub struct BarrierParams {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl BarrierParams {
    /// Decay rate of the barrier, (3/2)λ₁.
    pub fn rate(basis: &EigenBasis) -> f64 {
        1.5 * basis.lambda1()
    }
}

/// Barrier value at (t, r).
pub fn barrier_value(params: &BarrierParams, basis: &EigenBasis, t: f64, r: f64) -> f64 {
    let mode = &basis.modes[0];
    params.kappa1
        * (-1.5 * basis.lambda1() * t).exp()
        * (mode.radial(r) - params.kappa2 * (1.0 - r * r))
}

/// (∂_t − a_ij ∂_ij − b_i ∂_i) P at every node, plus the max over nodes.
pub fn barrier_residual(
    params: &BarrierParams,
    coeffs: &VariableCoefficients,
    basis: &EigenBasis,
    t: f64,
) -> Result<(ScalarField, f64)> {
    if params.kappa1 <= 0.0 || params.kappa2 <= 0.0 {
        return Err(Error::Domain("barrier constants must be positive".into()));
    }
    let grid = coeffs.a.grid.clone();
    if !grid.same_layout(&basis.grid) {
        return Err(Error::Shape("coefficients and basis on different grids".into()));
    }
    let mode = &basis.modes[0];
    let lam1 = basis.lambda1();
    let scale = params.kappa1 * (-1.5 * lam1 * t).exp();

    let mut out = ScalarField::zeros(grid.clone());
    let mut max_res = f64::NEG_INFINITY;
    for i in 0..grid.n_r {
        let r = grid.r[i];
        // F = φ₁ − κ₂(1 − r²) and its radial derivatives, all analytic
        let f = mode.radial(r) - params.kappa2 * (1.0 - r * r);
        let fp = mode.radial_derivative(r) + 2.0 * params.kappa2 * r;
        let fpp = mode.radial_second_derivative(r) + 2.0 * params.kappa2;
        for j in 0..grid.n_theta {
            let k = grid.idx(i, j);
            let (c, s) = (grid.theta[j].cos(), grid.theta[j].sin());
            // Cartesian Hessian of a radial function:
            // H = F'' x̂x̂ + (F'/r)(Id − x̂x̂)
            let quad = coeffs.a.xx[k] * c * c
                + (coeffs.a.xy[k] + coeffs.a.yx[k]) * c * s
                + coeffs.a.yy[k] * s * s;
            let tr = coeffs.a.xx[k] + coeffs.a.yy[k];
            let a_contract = fpp * quad + fp / r * (tr - quad);
            let b_radial = coeffs.b.x[k] * c + coeffs.b.y[k] * s;
            let res = scale * (-1.5 * lam1 * f - a_contract - b_radial * fp);
            out.data[k] = res;
            max_res = max_res.max(res);
        }
    }
    Ok((out, max_res))
}

/// Largest κ₂ on the geometric grid {2⁻⁸, …, 2⁻¹} whose identity-coefficient
/// residual is negative at every node, together with the margin
/// C₁ = min over nodes of −residual/(κ₁ e^{−(3/2)λ₁ t}).
pub fn select_kappa2(basis: &EigenBasis) -> Result<(f64, f64)> {
    let grid = basis.grid.clone();
    let identity = VariableCoefficients {
        a: crate::field::TensorField::identity(grid.clone()),
        b: crate::field::VectorField::zeros(grid.clone()),
    };
    // largest admissible value wins: scan 2⁻¹, 2⁻², …, 2⁻⁸
    for p in 1..=8 {
        let kappa2 = 0.5_f64.powi(p);
        let params = BarrierParams {
            kappa1: 1.0,
            kappa2,
        };
        let (_, max_res) = barrier_residual(&params, &identity, basis, 0.0)?;
        if max_res < 0.0 {
            return Ok((kappa2, -max_res));
        }
    }
    Err(Error::Numerical(
        "no admissible barrier κ₂ on the geometric grid".into(),
    ))
}
