//! Polar discretization of the unit disk.
//!
//! Angular nodes are equispaced on [0, 2π); radial nodes live in (0, 1] and
//! always include r = 1. The origin is never a node: values "across" the
//! center are reached through the antipodal ring, `f(-r, θ) = f(r, θ+π)`.
//!
//! Two radial layouts are provided:
//!
//! * `gauss_legendre` — Gauss–Legendre nodes on (0, 1) plus the boundary
//!   node, with weights for ∫ f r dr. Used by the eigenbasis, where
//!   projections and Gram matrices need spectral-quality quadrature.
//! * `graded` — nodes `r_i = sin(π i / 2 n_r)` clustered at r = 1, with
//!   mass-lumped trapezoid weights. Used by the solver, where the boundary
//!   heat flux drives the dynamics.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    pub n_theta: usize,
    pub n_r: usize,
    /// Equispaced angular nodes on [0, 2π).
    pub theta: Vec<f64>,
    /// Strictly increasing radial nodes in (0, 1], last node exactly 1.
    pub r: Vec<f64>,
    /// Radial quadrature weights for ∫₀¹ f(r) r dr ≈ Σ w_i f(r_i).
    pub r_weight: Vec<f64>,
}

impl DiskGrid {
    /// Gauss–Legendre radial layout: `n_r - 1` interior nodes on (0, 1) and
    /// the boundary node r = 1 with zero weight.
    pub fn gauss_legendre(n_theta: usize, n_r: usize) -> Result<Arc<Self>> {
        Self::validate(n_theta, n_r)?;
        let (nodes, weights) = gauss_legendre_unit(n_r - 1);
        let mut r = Vec::with_capacity(n_r);
        let mut w = Vec::with_capacity(n_r);
        for i in 0..n_r - 1 {
            r.push(nodes[i]);
            // weight carries the polar r factor
            w.push(weights[i] * nodes[i]);
        }
        r.push(1.0);
        w.push(0.0);
        Ok(Arc::new(Self::assemble(n_theta, n_r, r, w)))
    }

    /// Boundary-clustered radial layout `r_i = sin(π i / 2 n_r)`, i = 1..n_r.
    pub fn graded(n_theta: usize, n_r: usize) -> Result<Arc<Self>> {
        Self::validate(n_theta, n_r)?;
        let r: Vec<f64> = (1..=n_r)
            .map(|i| (0.5 * PI * i as f64 / n_r as f64).sin().min(1.0))
            .collect();
        let w = graded_radial_weights(n_r);
        Ok(Arc::new(Self::assemble(n_theta, n_r, r, w)))
    }

    fn validate(n_theta: usize, n_r: usize) -> Result<()> {
        if n_theta < 16 || n_theta % 2 != 0 {
            return Err(Error::Resolution(format!(
                "n_theta must be even and >= 16, got {n_theta}"
            )));
        }
        if n_r < 8 {
            return Err(Error::Resolution(format!("n_r must be >= 8, got {n_r}")));
        }
        Ok(())
    }

    fn assemble(n_theta: usize, n_r: usize, r: Vec<f64>, r_weight: Vec<f64>) -> Self {
        let theta = (0..n_theta)
            .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
            .collect();
        debug_assert_eq!(r.len(), n_r);
        debug_assert_eq!(*r.last().unwrap(), 1.0);
        Self {
            n_theta,
            n_r,
            theta,
            r,
            r_weight,
        }
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    /// Flattened index of node (i_r, i_theta); storage is ring-major.
    #[inline]
    pub fn idx(&self, i_r: usize, i_theta: usize) -> usize {
        i_r * self.n_theta + i_theta
    }

    pub fn n_nodes(&self) -> usize {
        self.n_r * self.n_theta
    }

    /// Index of the ring at r = 1.
    pub fn boundary_ring(&self) -> usize {
        self.n_r - 1
    }

    /// Area quadrature ∫_Ω f dx ≈ Σ_{i,j} w_i Δθ f(i, j).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_nodes());
        let dth = self.d_theta();
        let mut total = 0.0;
        for i in 0..self.n_r {
            let mut ring = 0.0;
            for j in 0..self.n_theta {
                ring += values[self.idx(i, j)];
            }
            total += self.r_weight[i] * ring;
        }
        total * dth
    }

    /// L²(Ω) norm under the grid quadrature.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        let dth = self.d_theta();
        let mut total = 0.0;
        for i in 0..self.n_r {
            let mut ring = 0.0;
            for j in 0..self.n_theta {
                let v = values[self.idx(i, j)];
                ring += v * v;
            }
            total += self.r_weight[i] * ring;
        }
        (total * dth).max(0.0).sqrt()
    }

    /// Trapezoid quadrature on the boundary circle: ∫_Γ g dθ.
    pub fn integrate_boundary(&self, ring_values: &[f64]) -> f64 {
        debug_assert_eq!(ring_values.len(), self.n_theta);
        ring_values.iter().sum::<f64>() * self.d_theta()
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.n_theta == other.n_theta && self.n_r == other.n_r && self.r == other.r
    }
}

/// Weights for ∫₀¹ f r dr on the sin-graded nodes. In the map parameter
/// x ∈ [0, 1], r = sin(πx/2), the integrand g(x) = f(r) r r'(x) is smooth and
/// vanishes at x = 0, so composite Simpson over the uniform parameter grid
/// (with the known-zero virtual endpoint) gives 4th-order weights.
fn graded_radial_weights(n_r: usize) -> Vec<f64> {
    let dx = 1.0 / n_r as f64;
    let mut w = vec![0.0; n_r];
    for i in 1..=n_r {
        let x = i as f64 * dx;
        let r = (0.5 * PI * x).sin();
        let dr = 0.5 * PI * (0.5 * PI * x).cos();
        // Simpson coefficients over points 0..n_r; point 0 is virtual. For
        // odd n_r, Simpson runs to point n_r − 1 and the last interval is a
        // trapezoid patch (its weight is tiny anyway: r' vanishes at r = 1).
        let coeff = if n_r % 2 == 0 {
            if i == n_r {
                1.0 / 3.0
            } else if i % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            }
        } else if i == n_r {
            0.5
        } else if i == n_r - 1 {
            1.0 / 3.0 + 0.5
        } else if i % 2 == 1 {
            4.0 / 3.0
        } else {
            2.0 / 3.0
        };
        w[i - 1] = coeff * dx * r * dr;
    }
    w
}

/// Gauss–Legendre nodes and weights on (0, 1), by Newton iteration on the
/// Legendre polynomial evaluated with the three-term recurrence.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess on [-1, 1]
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> (0, 1); cos guess decreases, store ascending
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 0.5 * w;
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
