//! Differential operators on disk fields: spectral in θ, finite differences
//! on the (generally nonuniform) radial grid.
//!
//! The innermost ring has no neighbor toward the origin; its radial stencils
//! use the antipodal node, `f(-r_0, θ) = f(r_0, θ+π)`, which is exact
//! geometry rather than an extrapolation. The boundary ring r = 1 uses
//! one-sided stencils; the normal-derivative stencil there is 5 nodes wide
//! (4th order) since the boundary flux is the quantity everything else keys
//! off.

use crate::field::{ScalarField, TensorField, VectorField};
use crate::fourier::ThetaFft;
use crate::grid::DiskGrid;
use std::sync::Arc;

/// Default width of the one-sided boundary-flux stencil.
pub const FLUX_STENCIL_WIDTH: usize = 5;

/// Finite-difference weights for the `m`-th derivative at `x0` on arbitrary
/// nodes (Fornberg's recursion).
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(m < n, "need more nodes than derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

#[derive(Debug, Clone)]
pub struct DiskOps {
    pub grid: Arc<DiskGrid>,
    pub fft: ThetaFft,
    /// 3-point first-derivative weights per ring (ring 0 on nodes (-r0, r0, r1)).
    d1: Vec<[f64; 3]>,
    /// 3-point second-derivative weights per ring.
    d2: Vec<[f64; 3]>,
    /// One-sided ∂_r weights at r = 1 over the last `FLUX_STENCIL_WIDTH` nodes.
    flux: Vec<f64>,
    /// One-sided ∂_rr weights at r = 1 (one node wider).
    flux2: Vec<f64>,
}

impl DiskOps {
    pub fn new(grid: Arc<DiskGrid>) -> Self {
        let n = grid.n_r;
        let r = &grid.r;
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        // ring 0: antipodal closure
        let inner = [-r[0], r[0], r[1]];
        d1.push(to3(&fd_weights(r[0], &inner, 1)));
        d2.push(to3(&fd_weights(r[0], &inner, 2)));
        for i in 1..n - 1 {
            let nodes = [r[i - 1], r[i], r[i + 1]];
            d1.push(to3(&fd_weights(r[i], &nodes, 1)));
            d2.push(to3(&fd_weights(r[i], &nodes, 2)));
        }
        // boundary ring: one-sided 3-point (generic use; flux uses the wide stencil)
        let nodes = [r[n - 3], r[n - 2], r[n - 1]];
        d1.push(to3(&fd_weights(r[n - 1], &nodes, 1)));
        d2.push(to3(&fd_weights(r[n - 1], &nodes, 2)));

        let w = FLUX_STENCIL_WIDTH.min(n);
        let flux = fd_weights(1.0, &r[n - w..], 1);
        let w2 = (FLUX_STENCIL_WIDTH + 1).min(n);
        let flux2 = fd_weights(1.0, &r[n - w2..], 2);

        Self {
            fft: ThetaFft::new(grid.n_theta),
            grid,
            d1,
            d2,
            flux,
            flux2,
        }
    }

    /// Spectral ∂_θ of every ring.
    pub fn d_theta(&self, f: &ScalarField) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid.clone());
        let nt = self.grid.n_theta;
        for i in 0..self.grid.n_r {
            let s = self.grid.idx(i, 0);
            self.fft
                .derivative(&f.data[s..s + nt], &mut out.data[s..s + nt]);
        }
        out
    }

    /// Spectral derivative of a single θ ring.
    pub fn d_theta_ring(&self, ring: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; ring.len()];
        self.fft.derivative(ring, &mut out);
        out
    }

    /// Spectral n-th θ-derivative of every ring, one transform per ring.
    pub fn d_theta_n(&self, f: &ScalarField, n: usize) -> ScalarField {
        if n == 0 {
            return f.clone();
        }
        let mut out = ScalarField::zeros(self.grid.clone());
        let nt = self.grid.n_theta;
        for i in 0..self.grid.n_r {
            let s = self.grid.idx(i, 0);
            let d = self.d_theta_ring_n(&f.data[s..s + nt], n);
            out.data[s..s + nt].copy_from_slice(&d);
        }
        out
    }

    /// Spectral n-th derivative of a θ ring via an (ik)^n multiplier.
    pub fn d_theta_ring_n(&self, ring: &[f64], n: usize) -> Vec<f64> {
        if n == 0 {
            return ring.to_vec();
        }
        let mut coeffs = self.fft.forward(ring);
        let nyquist = ring.len() / 2;
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k == nyquist {
                *c = num_complex::Complex::new(0.0, 0.0);
            } else {
                let f = self.fft.frequency(k) as f64;
                *c *= num_complex::Complex::new(0.0, f).powu(n as u32);
            }
        }
        let mut out = vec![0.0; ring.len()];
        self.fft.inverse(&coeffs, &mut out);
        out
    }

    /// Radial derivative; the boundary ring uses the wide one-sided stencil.
    pub fn d_r(&self, f: &ScalarField) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid.clone());
        let nt = self.grid.n_theta;
        let nr = self.grid.n_r;
        for j in 0..nt {
            let ja = (j + nt / 2) % nt;
            let w = &self.d1[0];
            out.data[self.grid.idx(0, j)] =
                w[0] * f.at(0, ja) + w[1] * f.at(0, j) + w[2] * f.at(1, j);
        }
        for i in 1..nr - 1 {
            let w = &self.d1[i];
            for j in 0..nt {
                out.data[self.grid.idx(i, j)] =
                    w[0] * f.at(i - 1, j) + w[1] * f.at(i, j) + w[2] * f.at(i + 1, j);
            }
        }
        let bnd = self.boundary_normal_derivative(f);
        for j in 0..nt {
            out.data[self.grid.idx(nr - 1, j)] = bnd[j];
        }
        out
    }

    /// Second radial derivative (3-point interior, one-sided at both ends).
    pub fn d_rr(&self, f: &ScalarField) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid.clone());
        let nt = self.grid.n_theta;
        let nr = self.grid.n_r;
        for j in 0..nt {
            let ja = (j + nt / 2) % nt;
            let w = &self.d2[0];
            out.data[self.grid.idx(0, j)] =
                w[0] * f.at(0, ja) + w[1] * f.at(0, j) + w[2] * f.at(1, j);
        }
        for i in 1..nr - 1 {
            let w = &self.d2[i];
            for j in 0..nt {
                out.data[self.grid.idx(i, j)] =
                    w[0] * f.at(i - 1, j) + w[1] * f.at(i, j) + w[2] * f.at(i + 1, j);
            }
        }
        let b = self.boundary_second_radial(f);
        for j in 0..nt {
            out.data[self.grid.idx(nr - 1, j)] = b[j];
        }
        out
    }

    /// One-sided high-order ∂_r at r = 1, one value per θ node.
    pub fn boundary_normal_derivative(&self, f: &ScalarField) -> Vec<f64> {
        self.boundary_normal_derivative_width(f, FLUX_STENCIL_WIDTH)
    }

    /// Same with a caller-chosen stencil width (for sensitivity reporting).
    pub fn boundary_normal_derivative_width(&self, f: &ScalarField, width: usize) -> Vec<f64> {
        let nr = self.grid.n_r;
        let nt = self.grid.n_theta;
        let w = width.clamp(2, nr);
        let weights: Vec<f64> = if w == FLUX_STENCIL_WIDTH {
            self.flux.clone()
        } else {
            fd_weights(1.0, &self.grid.r[nr - w..], 1)
        };
        let mut out = vec![0.0; nt];
        for j in 0..nt {
            let mut acc = 0.0;
            for (s, wt) in weights.iter().enumerate() {
                acc += wt * f.at(nr - w + s, j);
            }
            out[j] = acc;
        }
        out
    }

    /// One-sided ∂_rr at r = 1.
    pub fn boundary_second_radial(&self, f: &ScalarField) -> Vec<f64> {
        let nr = self.grid.n_r;
        let nt = self.grid.n_theta;
        let w = self.flux2.len();
        let mut out = vec![0.0; nt];
        for j in 0..nt {
            let mut acc = 0.0;
            for (s, wt) in self.flux2.iter().enumerate() {
                acc += wt * f.at(nr - w + s, j);
            }
            out[j] = acc;
        }
        out
    }

    /// Cartesian gradient (f_x, f_y) from polar derivatives.
    pub fn gradient(&self, f: &ScalarField) -> VectorField {
        let fr = self.d_r(f);
        let ft = self.d_theta(f);
        let mut out = VectorField::zeros(self.grid.clone());
        for i in 0..self.grid.n_r {
            let inv_r = 1.0 / self.grid.r[i];
            for j in 0..self.grid.n_theta {
                let k = self.grid.idx(i, j);
                let (c, s) = (self.grid.theta[j].cos(), self.grid.theta[j].sin());
                let ang = ft.data[k] * inv_r;
                out.x[k] = c * fr.data[k] - s * ang;
                out.y[k] = s * fr.data[k] + c * ang;
            }
        }
        out
    }

    /// Polar Laplacian f_rr + f_r/r + f_θθ/r².
    pub fn laplacian(&self, f: &ScalarField) -> ScalarField {
        let frr = self.d_rr(f);
        let fr = self.d_r(f);
        let ft = self.d_theta(f);
        let ftt = self.d_theta(&ft);
        let mut out = ScalarField::zeros(self.grid.clone());
        for i in 0..self.grid.n_r {
            let inv_r = 1.0 / self.grid.r[i];
            for j in 0..self.grid.n_theta {
                let k = self.grid.idx(i, j);
                out.data[k] = frr.data[k] + inv_r * fr.data[k] + inv_r * inv_r * ftt.data[k];
            }
        }
        out
    }

    /// Cartesian partial ∂_x^a ∂_y^b f by repeated gradient application
    /// (x-derivatives first).
    pub fn cartesian_derivative(&self, f: &ScalarField, a: usize, b: usize) -> ScalarField {
        let mut cur = f.clone();
        for _ in 0..a {
            cur = self.d_x(&cur);
        }
        for _ in 0..b {
            cur = self.d_y(&cur);
        }
        cur
    }

    pub fn d_x(&self, f: &ScalarField) -> ScalarField {
        let g = self.gradient(f);
        ScalarField {
            grid: self.grid.clone(),
            data: g.x,
        }
    }

    pub fn d_y(&self, f: &ScalarField) -> ScalarField {
        let g = self.gradient(f);
        ScalarField {
            grid: self.grid.clone(),
            data: g.y,
        }
    }

    /// Gradient of each component of a vector field, as a tensor with rows
    /// ∇v_x and ∇v_y: out[(i,j)] = ∂_j v_i.
    pub fn jacobian(&self, v: &VectorField) -> TensorField {
        let gx = self.gradient(&ScalarField {
            grid: self.grid.clone(),
            data: v.x.clone(),
        });
        let gy = self.gradient(&ScalarField {
            grid: self.grid.clone(),
            data: v.y.clone(),
        });
        TensorField {
            grid: self.grid.clone(),
            xx: gx.x,
            xy: gx.y,
            yx: gy.x,
            yy: gy.y,
        }
    }
}

fn to3(w: &[f64]) -> [f64; 3] {
    [w[0], w[1], w[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;

    fn ops(n_theta: usize, n_r: usize) -> DiskOps {
        DiskOps::new(DiskGrid::graded(n_theta, n_r).unwrap())
    }

    #[test]
    fn fornberg_standard_central_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-14 && w[1].abs() < 1e-14 && (w[2] - 0.5).abs() < 1e-14);
        let w2 = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w2[0] - 1.0).abs() < 1e-14 && (w2[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_exact_on_linear_field() {
        let o = ops(32, 48);
        // f = 3x - 2y has gradient (3, -2) everywhere
        let f = ScalarField::from_fn(o.grid.clone(), |r, th| 3.0 * r * th.cos() - 2.0 * r * th.sin());
        let g = o.gradient(&f);
        for k in 0..o.grid.n_nodes() {
            assert!((g.x[k] - 3.0).abs() < 1e-10, "gx {k}: {}", g.x[k]);
            assert!((g.y[k] + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_on_harmonic_polynomial() {
        let o = ops(32, 64);
        // f = x² - y² = r² cos 2θ is harmonic
        let f = ScalarField::from_fn(o.grid.clone(), |r, th| r * r * (2.0 * th).cos());
        let lap = o.laplacian(&f);
        for i in 0..o.grid.n_r - 1 {
            for j in 0..o.grid.n_theta {
                let v = lap.at(i, j);
                assert!(v.abs() < 1e-8, "Δf at ring {i} = {v:e}");
            }
        }
    }

    #[test]
    fn laplacian_on_radial_quadratic() {
        let o = ops(16, 64);
        // Δ(r²) = 4 exactly, and the stencils are exact on quadratics
        let f = ScalarField::from_fn(o.grid.clone(), |r, _| r * r);
        let lap = o.laplacian(&f);
        for i in 0..o.grid.n_r {
            assert!((lap.at(i, 0) - 4.0).abs() < 1e-8, "{}", lap.at(i, 0));
        }
    }

    #[test]
    fn boundary_flux_high_order() {
        let o = ops(16, 64);
        // f = J0-like smooth radial profile r³: f_r(1) = 3
        let f = ScalarField::from_fn(o.grid.clone(), |r, _| r * r * r);
        let flux = o.boundary_normal_derivative(&f);
        for v in flux {
            assert!((v - 3.0).abs() < 1e-9);
        }
        let f2 = o.boundary_second_radial(&f);
        for v in f2 {
            assert!((v - 6.0).abs() < 1e-7);
        }
    }

    #[test]
    fn innermost_ring_antipodal_closure() {
        let o = ops(32, 32);
        // odd-in-x field: f = x = r cos θ; d_r at the innermost ring must see
        // the sign flip across the center
        let f = ScalarField::from_fn(o.grid.clone(), |r, th| r * th.cos());
        let fr = o.d_r(&f);
        for j in 0..32 {
            let c = o.grid.theta[j].cos();
            assert!((fr.at(0, j) - c).abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_cartesian_derivatives_consistent() {
        let o = ops(32, 64);
        // f = x²y: f_xy = 2x, f_xxy = 2 (use a mid-radius ring to dodge
        // boundary one-sided noise)
        let f = ScalarField::from_fn(o.grid.clone(), |r, th| {
            let (x, y) = (r * th.cos(), r * th.sin());
            x * x * y
        });
        let fxy = o.cartesian_derivative(&f, 1, 1);
        let i = o.grid.n_r / 2;
        for j in 0..o.grid.n_theta {
            let x = o.grid.r[i] * o.grid.theta[j].cos();
            assert!(
                (fxy.at(i, j) - 2.0 * x).abs() < 2e-3,
                "f_xy {} vs {}",
                fxy.at(i, j),
                2.0 * x
            );
        }
    }
}
