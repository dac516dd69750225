//! Dirichlet-Laplacian eigenbasis of the unit disk.
//!
//! Modes are φ_{mk}(r, θ) = c_{mk} J_m(j_mk r) · {cos mθ, sin mθ} with
//! eigenvalue λ = j_mk², where j_mk is the k-th positive zero of J_m. The
//! normalization constant follows from ∫₀¹ J_m(j r)² r dr = J_{m+1}(j)²/2 at
//! a zero, so no quadrature enters the construction. Mode sign convention:
//! the radial factor has a positive leading coefficient, which makes the
//! ground state positive in the interior.

use crate::bessel::{bessel_j, bessel_j_derivative, bessel_zero};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::DiskGrid;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Cosine,
    Sine,
}

#[derive(Debug, Clone)]
pub struct EigenMode {
    /// Angular index m >= 0.
    pub angular_index: u32,
    /// Radial index k >= 1.
    pub radial_index: u32,
    pub parity: Parity,
    /// j_mk, the k-th positive zero of J_m.
    pub zero: f64,
    /// λ = j_mk².
    pub eigenvalue: f64,
    /// Multiplier making the mode unit-L² on the disk.
    pub norm_factor: f64,
}

impl EigenMode {
    fn build(m: u32, k: u32, parity: Parity) -> Result<Self> {
        if m == 0 && parity == Parity::Sine {
            return Err(Error::Domain("sine parity is forbidden for m = 0".into()));
        }
        let zero = bessel_zero(m as f64, k)?;
        let j_next = bessel_j(m as f64 + 1.0, zero)?;
        let norm_factor = if m == 0 {
            1.0 / (PI.sqrt() * j_next.abs())
        } else {
            (2.0 / PI).sqrt() / j_next.abs()
        };
        Ok(Self {
            angular_index: m,
            radial_index: k,
            parity,
            zero,
            eigenvalue: zero * zero,
            norm_factor,
        })
    }

    fn angular(&self, theta: f64) -> f64 {
        let m = self.angular_index as f64;
        match self.parity {
            Parity::Cosine => (m * theta).cos(),
            Parity::Sine => (m * theta).sin(),
        }
    }

    fn angular_derivative(&self, theta: f64) -> f64 {
        let m = self.angular_index as f64;
        match self.parity {
            Parity::Cosine => -m * (m * theta).sin(),
            Parity::Sine => m * (m * theta).cos(),
        }
    }

    /// Normalized radial factor c J_m(j r); exactly 0 at r = 1.
    pub fn radial(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        self.norm_factor * bessel_j(self.angular_index as f64, self.zero * r).unwrap_or(0.0)
    }

    /// d/dr of the radial factor.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        self.norm_factor
            * self.zero
            * bessel_j_derivative(self.angular_index as f64, self.zero * r).unwrap_or(0.0)
    }

    /// d²/dr² of the radial factor, from the Bessel equation.
    pub fn radial_second_derivative(&self, r: f64) -> f64 {
        let m = self.angular_index as f64;
        let x = self.zero * r;
        let j = bessel_j(m, x).unwrap_or(0.0);
        let jp = bessel_j_derivative(m, x).unwrap_or(0.0);
        let jpp = if x == 0.0 {
            0.0
        } else {
            -jp / x - (1.0 - m * m / (x * x)) * j
        };
        self.norm_factor * self.zero * self.zero * jpp
    }

    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        self.radial(r) * self.angular(theta)
    }

    /// Nodal values on a grid; the boundary ring is exactly zero.
    pub fn nodal(&self, grid: &Arc<DiskGrid>) -> ScalarField {
        let mut f = ScalarField::zeros(grid.clone());
        for i in 0..grid.n_r {
            let rad = self.radial(grid.r[i]);
            for j in 0..grid.n_theta {
                f.data[grid.idx(i, j)] = rad * self.angular(grid.theta[j]);
            }
        }
        f
    }

    /// Analytic Cartesian gradient sampled on the grid.
    pub fn nodal_gradient(&self, grid: &Arc<DiskGrid>) -> VectorField {
        let mut g = VectorField::zeros(grid.clone());
        for i in 0..grid.n_r {
            let r = grid.r[i];
            let dr = self.radial_derivative(r);
            let rad_over_r = self.radial(r) / r;
            for j in 0..grid.n_theta {
                let th = grid.theta[j];
                let fr = dr * self.angular(th);
                let fth_r = rad_over_r * self.angular_derivative(th);
                let (c, s) = (th.cos(), th.sin());
                let k = grid.idx(i, j);
                g.x[k] = c * fr - s * fth_r;
                g.y[k] = s * fr + c * fth_r;
            }
        }
        g
    }

    /// ∂_N φ on the boundary circle, per θ node (analytic).
    pub fn boundary_normal_derivative(&self, grid: &DiskGrid) -> Vec<f64> {
        let dr = self.radial_derivative(1.0);
        grid.theta.iter().map(|&th| dr * self.angular(th)).collect()
    }

    fn sort_key(&self) -> (u64, u32, u32, u8) {
        (
            self.eigenvalue.to_bits(),
            self.angular_index,
            self.radial_index,
            if self.parity == Parity::Cosine { 0 } else { 1 },
        )
    }
}

#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub modes: Vec<EigenMode>,
    pub grid: Arc<DiskGrid>,
    /// Precomputed nodal mode fields, index-aligned with `modes`.
    nodal: Vec<ScalarField>,
}

impl EigenBasis {
    /// The `n_modes` lowest Dirichlet eigenpairs (degenerate m >= 1 pairs
    /// count twice, cosine before sine).
    pub fn dirichlet(n_modes: usize, grid: Arc<DiskGrid>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Domain("n_modes must be >= 1".into()));
        }
        if n_modes > 128 {
            return Err(Error::Domain("n_modes > 128 is not supported".into()));
        }
        let mut cands: Vec<EigenMode> = Vec::new();
        // m = 0 row seeds the eigenvalue bound
        for k in 1..=n_modes as u32 {
            cands.push(EigenMode::build(0, k, Parity::Cosine)?);
        }
        let nth_bound = |c: &mut Vec<EigenMode>| -> f64 {
            c.sort_by_key(|m| m.sort_key());
            c[n_modes.min(c.len()) - 1].eigenvalue
        };
        let mut bound = nth_bound(&mut cands);
        let mut m = 1u32;
        loop {
            let first = bessel_zero(m as f64, 1)?;
            if first * first > bound {
                break;
            }
            let mut k = 1u32;
            loop {
                let z = bessel_zero(m as f64, k)?;
                if z * z > bound {
                    break;
                }
                cands.push(EigenMode::build(m, k, Parity::Cosine)?);
                cands.push(EigenMode::build(m, k, Parity::Sine)?);
                k += 1;
            }
            bound = nth_bound(&mut cands);
            m += 1;
        }
        cands.sort_by_key(|md| md.sort_key());
        cands.truncate(n_modes);

        let max_m = cands.iter().map(|md| md.angular_index).max().unwrap();
        let max_k = cands.iter().map(|md| md.radial_index).max().unwrap();
        if grid.n_theta < 4 * max_m.max(1) as usize {
            return Err(Error::Resolution(format!(
                "grid has {} angular nodes but mode m = {max_m} needs at least {}",
                grid.n_theta,
                4 * max_m
            )));
        }
        if grid.n_r < 2 * max_k as usize {
            return Err(Error::Resolution(format!(
                "grid has {} radial nodes but radial index {max_k} needs at least {}",
                grid.n_r,
                2 * max_k
            )));
        }

        let nodal = cands.iter().map(|md| md.nodal(&grid)).collect();
        Ok(Self {
            modes: cands,
            grid,
            nodal,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode_field(&self, j: usize) -> &ScalarField {
        &self.nodal[j]
    }

    /// λ₁, the lowest eigenvalue.
    pub fn lambda1(&self) -> f64 {
        self.modes[0].eigenvalue
    }

    /// Projection coefficients c_j = ∫ f φ_j dx under the grid quadrature.
    pub fn project(&self, f: &ScalarField) -> Result<Vec<f64>> {
        f.check_same_grid(&self.grid)?;
        let dth = self.grid.d_theta();
        let mut coeffs = Vec::with_capacity(self.modes.len());
        for phi in &self.nodal {
            let mut acc = 0.0;
            for i in 0..self.grid.n_r {
                let mut ring = 0.0;
                for j in 0..self.grid.n_theta {
                    let k = self.grid.idx(i, j);
                    ring += f.data[k] * phi.data[k];
                }
                acc += self.grid.r_weight[i] * ring;
            }
            coeffs.push(acc * dth);
        }
        Ok(coeffs)
    }

    /// Σ c_j φ_j as a nodal field.
    pub fn synthesize(&self, coeffs: &[f64]) -> ScalarField {
        let mut f = ScalarField::zeros(self.grid.clone());
        for (c, phi) in coeffs.iter().zip(&self.nodal) {
            if *c != 0.0 {
                f.add_scaled(*c, phi);
            }
        }
        f
    }

    /// Spectral Sobolev norm (Σ (1+λ_j)^s c_j²)^{1/2}. This is the working
    /// definition of ‖·‖_s throughout; it matches H^s only on smooth
    /// functions compatible with the Dirichlet basis.
    pub fn sobolev_norm(&self, f: &ScalarField, s: f64) -> Result<f64> {
        if s < 0.0 || s > 8.0 {
            return Err(Error::Domain(format!("sobolev_norm: s must be in [0, 8], got {s}")));
        }
        let coeffs = self.project(f)?;
        Ok(self.sobolev_norm_of_coeffs(&coeffs, s))
    }

    pub fn sobolev_norm_of_coeffs(&self, coeffs: &[f64], s: f64) -> f64 {
        coeffs
            .iter()
            .zip(&self.modes)
            .map(|(c, m)| (1.0 + m.eigenvalue).powf(s) * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// K = ‖q₀‖₄ / ‖q₀‖₀ in the spectral surrogate norms.
    pub fn ratio_k(&self, f: &ScalarField) -> Result<f64> {
        let coeffs = self.project(f)?;
        let n0 = self.sobolev_norm_of_coeffs(&coeffs, 0.0);
        if n0 == 0.0 || f.max_abs() == 0.0 {
            return Err(Error::DegenerateInput(
                "ratio_K is undefined for the zero field".into(),
            ));
        }
        Ok(self.sobolev_norm_of_coeffs(&coeffs, 4.0) / n0)
    }

    /// Gram matrix of the first `n` modes under the grid quadrature.
    pub fn gram(&self, n: usize) -> Vec<Vec<f64>> {
        let n = n.min(self.len());
        let dth = self.grid.d_theta();
        let mut g = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a..n {
                let mut acc = 0.0;
                for i in 0..self.grid.n_r {
                    let mut ring = 0.0;
                    for j in 0..self.grid.n_theta {
                        let k = self.grid.idx(i, j);
                        ring += self.nodal[a].data[k] * self.nodal[b].data[k];
                    }
                    acc += self.grid.r_weight[i] * ring;
                }
                g[a][b] = acc * dth;
                g[b][a] = g[a][b];
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize) -> EigenBasis {
        let grid = DiskGrid::gauss_legendre(64, 48).unwrap();
        EigenBasis::dirichlet(n, grid).unwrap()
    }

    #[test]
    fn ground_state_and_lambda1() {
        let b = basis(4);
        let m0 = &b.modes[0];
        assert_eq!(m0.angular_index, 0);
        assert_eq!(m0.radial_index, 1);
        assert!((m0.zero - 2.40482555769577277).abs() < 1e-10);
        assert!((m0.eigenvalue - 5.78318596294678452).abs() < 1e-9);
    }

    #[test]
    fn mode_ordering_matches_zero_table() {
        // (m, k, parity) of the first 16 modes, eigenvalues ascending
        let b = basis(16);
        let expect = [
            (0, 1, Parity::Cosine),
            (1, 1, Parity::Cosine),
            (1, 1, Parity::Sine),
            (2, 1, Parity::Cosine),
            (2, 1, Parity::Sine),
            (0, 2, Parity::Cosine),
            (3, 1, Parity::Cosine),
            (3, 1, Parity::Sine),
            (1, 2, Parity::Cosine),
            (1, 2, Parity::Sine),
            (4, 1, Parity::Cosine),
            (4, 1, Parity::Sine),
            (2, 2, Parity::Cosine),
            (2, 2, Parity::Sine),
            (0, 3, Parity::Cosine),
            (5, 1, Parity::Cosine),
        ];
        for (mode, &(m, k, p)) in b.modes.iter().zip(&expect) {
            assert_eq!(
                (mode.angular_index, mode.radial_index, mode.parity),
                (m, k, p)
            );
        }
        for w in b.modes.windows(2) {
            assert!(w[1].eigenvalue >= w[0].eigenvalue);
        }
    }

    #[test]
    fn modes_normalized_and_orthogonal() {
        let b = basis(16);
        let g = b.gram(16);
        for a in 0..16 {
            for c in 0..16 {
                let expect = if a == c { 1.0 } else { 0.0 };
                assert!(
                    (g[a][c] - expect).abs() < 1e-6,
                    "gram[{a}][{c}] = {}",
                    g[a][c]
                );
            }
        }
    }

    #[test]
    fn projection_recovers_coefficients() {
        let b = basis(8);
        let mut f = b.mode_field(0).scaled(2.0);
        f.add_scaled(3.0, b.mode_field(1));
        let c = b.project(&f).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-8);
        assert!((c[1] - 3.0).abs() < 1e-8);
        for j in 2..8 {
            assert!(c[j].abs() < 1e-8);
        }
    }

    #[test]
    fn sobolev_norm_single_and_mixed_modes() {
        let b = basis(4);
        let phi1 = b.mode_field(0).clone();
        assert!((b.sobolev_norm(&phi1, 0.0).unwrap() - 1.0).abs() < 1e-8);
        let lam1 = b.lambda1();
        for s in [1.0, 2.25, 4.0] {
            let expect = (1.0 + lam1).powf(s / 2.0);
            assert!((b.sobolev_norm(&phi1, s).unwrap() - expect).abs() < 1e-6 * expect);
        }
        let mut f = phi1.scaled(2.0);
        f.add_scaled(3.0, b.mode_field(1));
        assert!((b.sobolev_norm(&f, 0.0).unwrap() - 13.0_f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn ratio_k_values_and_scale_invariance() {
        let b = basis(4);
        let phi1 = b.mode_field(0).clone();
        let lam1 = b.lambda1();
        let k1 = b.ratio_k(&phi1).unwrap();
        assert!((k1 - (1.0 + lam1).powi(2)).abs() < 1e-6);
        let phi2 = b.mode_field(1).clone();
        let lam2 = b.modes[1].eigenvalue;
        assert!((b.ratio_k(&phi2).unwrap() - (1.0 + lam2).powi(2)).abs() < 1e-5);
        // scale invariance to machine precision
        for eps in [1e-6, 0.3, 40.0] {
            let scaled = phi1.scaled(eps);
            assert!((b.ratio_k(&scaled).unwrap() - k1).abs() < 1e-12 * k1);
        }
        // zero field is rejected
        let zero = ScalarField::zeros(b.grid.clone());
        assert!(b.ratio_k(&zero).is_err());
    }

    #[test]
    fn eigen_residual_under_discrete_laplacian() {
        use crate::operators::DiskOps;
        // residual ‖Δφ + λφ‖ / λ falls with radial refinement
        let mut residuals = Vec::new();
        for n_r in [32, 64] {
            let grid = DiskGrid::graded(32, n_r).unwrap();
            let b = EigenBasis::dirichlet(4, grid.clone()).unwrap();
            let ops = DiskOps::new(grid.clone());
            let phi = b.mode_field(0);
            let lap = ops.laplacian(phi);
            let mut num = 0.0;
            // skip the boundary ring where the one-sided second derivative is noisy
            for i in 0..grid.n_r - 1 {
                for j in 0..grid.n_theta {
                    let k = grid.idx(i, j);
                    let r = lap.data[k] + b.lambda1() * phi.data[k];
                    num += grid.r_weight[i] * r * r;
                }
            }
            residuals.push((num * grid.d_theta()).sqrt() / b.lambda1());
        }
        assert!(residuals[0] < 1e-2);
        assert!(residuals[1] < residuals[0] / 2.0, "{residuals:?}");
    }

    #[test]
    fn poincare_identity_for_modes() {
        let b = basis(8);
        for j in 0..8 {
            let g = b.modes[j].nodal_gradient(&b.grid);
            let mut sq = ScalarField::zeros(b.grid.clone());
            for k in 0..b.grid.n_nodes() {
                sq.data[k] = g.x[k] * g.x[k] + g.y[k] * g.y[k];
            }
            let ratio = sq.integral() / b.modes[j].eigenvalue;
            assert!(
                (ratio - 1.0).abs() < 1e-6,
                "‖∇φ_{j}‖²/λ = {ratio} off unity"
            );
        }
    }

    #[test]
    fn sine_forbidden_for_m0() {
        assert!(EigenMode::build(0, 1, Parity::Sine).is_err());
    }

    #[test]
    fn underresolved_grid_rejected() {
        let grid = DiskGrid::gauss_legendre(16, 8).unwrap();
        // 40 modes need far more angular resolution than 16 nodes
        assert!(EigenBasis::dirichlet(40, grid).is_err());
    }
}
