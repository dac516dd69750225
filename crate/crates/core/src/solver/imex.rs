//! Implicit constant-coefficient Laplacian solve, one tridiagonal system per
//! angular Fourier mode.
//!
//! For mode frequency f the radial operator is
//! L_f = d²/dr² + (1/r) d/dr − f²/r², discretized with the same 3-point
//! stencils the explicit operators use. The innermost ring couples to its
//! antipode, which in mode space folds into the diagonal with a (−1)^f
//! factor. The boundary row imposes q = 0 exactly.

use crate::field::ScalarField;
use crate::operators::{fd_weights, DiskOps};
use num_complex::Complex;

#[derive(Debug, Clone)]
struct ModeSystem {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

#[derive(Debug)]
pub struct ImexSolver {
    dt: f64,
    systems: Vec<ModeSystem>,
}

impl ImexSolver {
    /// Factor (assemble) I − dt·L_f for every angular mode.
    pub fn new(ops: &DiskOps, dt: f64) -> Self {
        let grid = &ops.grid;
        let nr = grid.n_r;
        let nt = grid.n_theta;
        let r = &grid.r;

        // raw stencil weights reproduced here so the implicit operator is
        // exactly the one the stability analysis assumes
        let inner_nodes = [-r[0], r[0], r[1]];
        let w1_in = fd_weights(r[0], &inner_nodes, 1);
        let w2_in = fd_weights(r[0], &inner_nodes, 2);

        let mut systems = Vec::with_capacity(nt);
        for k in 0..nt {
            let f = ops.fft.frequency(k);
            let f2 = (f * f) as f64;
            let parity = if f.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let mut sub = vec![0.0; nr];
            let mut diag = vec![0.0; nr];
            let mut sup = vec![0.0; nr];

            // ring 0 with antipodal fold
            {
                let c_in = w2_in[0] + w1_in[0] / r[0];
                let c_0 = w2_in[1] + w1_in[1] / r[0] - f2 / (r[0] * r[0]);
                let c_p = w2_in[2] + w1_in[2] / r[0];
                diag[0] = 1.0 - dt * (c_0 + parity * c_in);
                sup[0] = -dt * c_p;
            }
            for i in 1..nr - 1 {
                let nodes = [r[i - 1], r[i], r[i + 1]];
                let w1 = fd_weights(r[i], &nodes, 1);
                let w2 = fd_weights(r[i], &nodes, 2);
                sub[i] = -dt * (w2[0] + w1[0] / r[i]);
                diag[i] = 1.0 - dt * (w2[1] + w1[1] / r[i] - f2 / (r[i] * r[i]));
                sup[i] = -dt * (w2[2] + w1[2] / r[i]);
            }
            // Dirichlet boundary row
            diag[nr - 1] = 1.0;

            systems.push(ModeSystem { sub, diag, sup });
        }
        Self { dt, systems }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Solve (I − dt Δ) q_new = rhs with q_new = 0 on r = 1.
    pub fn solve(&self, ops: &DiskOps, rhs: &ScalarField) -> ScalarField {
        let grid = &ops.grid;
        let nr = grid.n_r;
        let nt = grid.n_theta;

        // forward FFT of every ring
        let mut modes: Vec<Vec<Complex<f64>>> = Vec::with_capacity(nr);
        for i in 0..nr {
            let s = grid.idx(i, 0);
            modes.push(ops.fft.forward(&rhs.data[s..s + nt]));
        }

        // per-mode Thomas solve (real matrix, complex right-hand side)
        let mut cp = vec![0.0; nr];
        let mut dp = vec![Complex::new(0.0, 0.0); nr];
        let mut out_modes: Vec<Vec<Complex<f64>>> =
            vec![vec![Complex::new(0.0, 0.0); nt]; nr];
        for k in 0..nt {
            let sys = &self.systems[k];
            let mut rhs_k: Vec<Complex<f64>> = (0..nr).map(|i| modes[i][k]).collect();
            // boundary condition
            rhs_k[nr - 1] = Complex::new(0.0, 0.0);

            cp[0] = sys.sup[0] / sys.diag[0];
            dp[0] = rhs_k[0] / sys.diag[0];
            for i in 1..nr {
                let m = sys.diag[i] - sys.sub[i] * cp[i - 1];
                cp[i] = if i < nr - 1 { sys.sup[i] / m } else { 0.0 };
                dp[i] = (rhs_k[i] - dp[i - 1] * sys.sub[i]) / m;
            }
            let mut prev = dp[nr - 1];
            out_modes[nr - 1][k] = prev;
            for i in (0..nr - 1).rev() {
                prev = dp[i] - cp[i] * prev;
                out_modes[i][k] = prev;
            }
        }

        let mut out = ScalarField::zeros(grid.clone());
        let mut row = vec![0.0; nt];
        for i in 0..nr {
            ops.fft.inverse(&out_modes[i], &mut row);
            let s = grid.idx(i, 0);
            out.data[s..s + nt].copy_from_slice(&row);
        }
        // exact homogeneous Dirichlet data
        let s = grid.idx(nr - 1, 0);
        for v in &mut out.data[s..s + nt] {
            *v = 0.0;
        }
        out
    }
}
