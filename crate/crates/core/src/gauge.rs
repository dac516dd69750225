//! Harmonic-gauge map of the fixed disk onto the moving domain.
//!
//! The map Ψ solves ΔΨ = 0 in the disk with boundary values (1+h(θ))·ξ(θ).
//! Every angular Fourier mode of the boundary data extends with the radial
//! factor r^{|k|}, so both Ψ and ∇Ψ are synthesized in closed form; the
//! scheme is exact on trigonometric height functions up to roundoff.

use crate::error::{Error, Result};
use crate::field::{HeightField, ScalarField, TensorField, VectorField};
use crate::operators::DiskOps;
use num_complex::Complex;

#[derive(Debug, Clone)]
pub struct GaugeState {
    /// The map Ψ, Cartesian components on the grid.
    pub psi: VectorField,
    /// DΨ, entries (i, j) = ∂_j Ψ_i.
    pub grad_psi: TensorField,
    /// A = [DΨ]⁻¹.
    pub a: TensorField,
    /// J = det DΨ.
    pub jac: ScalarField,
    /// Cofactor a = J·A.
    pub cof: TensorField,
    /// Held Ψ_t (zero when no previous gauge is available).
    pub psi_t: VectorField,
}

/// Solve the harmonic Dirichlet problem for Ψ; fills `psi` and `grad_psi`,
/// leaves the tensors at identity/unit until [`deformation_tensors`] runs.
pub fn harmonic_extend(h: &HeightField, ops: &DiskOps) -> Result<GaugeState> {
    let grid = &ops.grid;
    if h.values.len() != grid.n_theta {
        return Err(Error::Shape(format!(
            "height field has {} nodes, grid has {}",
            h.values.len(),
            grid.n_theta
        )));
    }
    if h.graph_margin() <= 0.0 {
        return Err(Error::Geometry(
            "harmonic_extend: boundary is not a graph (1 + h <= 0)".into(),
        ));
    }

    let nt = grid.n_theta;
    let nr = grid.n_r;
    // boundary data per Cartesian component
    let bx: Vec<f64> = (0..nt)
        .map(|j| (1.0 + h.values[j]) * grid.theta[j].cos())
        .collect();
    let by: Vec<f64> = (0..nt)
        .map(|j| (1.0 + h.values[j]) * grid.theta[j].sin())
        .collect();
    let cx = ops.fft.forward(&bx);
    let cy = ops.fft.forward(&by);

    let mut psi = VectorField::zeros(grid.clone());
    let mut psi_r = VectorField::zeros(grid.clone());
    let mut psi_th = VectorField::zeros(grid.clone());

    let mut buf = vec![Complex::new(0.0, 0.0); nt];
    let mut row = vec![0.0; nt];
    let nyquist = nt / 2;
    // component synthesis: value, radial derivative, angular derivative
    let mut synth = |coeffs: &Vec<Complex<f64>>,
                     value: &mut Vec<f64>,
                     rad: &mut Vec<f64>,
                     ang: &mut Vec<f64>| {
        for i in 0..nr {
            let r = grid.r[i];
            // Ψ(r, ·) = Σ_k ĝ_k r^|k| e^{ikθ}
            for (k, c) in coeffs.iter().enumerate() {
                let fk = ops.fft.frequency(k).unsigned_abs() as i32;
                buf[k] = c * r.powi(fk);
            }
            ops.fft.inverse(&buf, &mut row);
            value[grid.idx(i, 0)..grid.idx(i, 0) + nt].copy_from_slice(&row);
            // ∂_r: |k| r^{|k|-1}
            for (k, c) in coeffs.iter().enumerate() {
                let fk = ops.fft.frequency(k).unsigned_abs() as i32;
                buf[k] = if fk == 0 {
                    Complex::new(0.0, 0.0)
                } else {
                    c * (fk as f64) * r.powi(fk - 1)
                };
            }
            ops.fft.inverse(&buf, &mut row);
            rad[grid.idx(i, 0)..grid.idx(i, 0) + nt].copy_from_slice(&row);
            // ∂_θ: ik r^{|k|} (Nyquist dropped as usual for real data)
            for (k, c) in coeffs.iter().enumerate() {
                let f = ops.fft.frequency(k);
                let fk = f.unsigned_abs() as i32;
                buf[k] = if k == nyquist {
                    Complex::new(0.0, 0.0)
                } else {
                    c * Complex::new(0.0, f as f64) * r.powi(fk)
                };
            }
            ops.fft.inverse(&buf, &mut row);
            ang[grid.idx(i, 0)..grid.idx(i, 0) + nt].copy_from_slice(&row);
        }
    };
    synth(&cx, &mut psi.x, &mut psi_r.x, &mut psi_th.x);
    synth(&cy, &mut psi.y, &mut psi_r.y, &mut psi_th.y);

    // polar to Cartesian derivatives
    let mut grad = TensorField::zeros(grid.clone());
    for i in 0..nr {
        let inv_r = 1.0 / grid.r[i];
        for j in 0..nt {
            let k = grid.idx(i, j);
            let (c, s) = (grid.theta[j].cos(), grid.theta[j].sin());
            grad.xx[k] = c * psi_r.x[k] - s * inv_r * psi_th.x[k];
            grad.xy[k] = s * psi_r.x[k] + c * inv_r * psi_th.x[k];
            grad.yx[k] = c * psi_r.y[k] - s * inv_r * psi_th.y[k];
            grad.yy[k] = s * psi_r.y[k] + c * inv_r * psi_th.y[k];
        }
    }

    Ok(GaugeState {
        psi_t: VectorField::zeros(grid.clone()),
        a: TensorField::identity(grid.clone()),
        jac: ScalarField::from_fn(grid.clone(), |_, _| 1.0),
        cof: TensorField::identity(grid.clone()),
        psi,
        grad_psi: grad,
    })
}

/// Fill A = [DΨ]⁻¹, J = det DΨ, and the cofactor J·A from `grad_psi`.
pub fn deformation_tensors(state: &mut GaugeState) -> Result<()> {
    let n = state.grad_psi.xx.len();
    let mut min_j = f64::INFINITY;
    for k in 0..n {
        let d = state.grad_psi.at(k);
        let j = d[0][0] * d[1][1] - d[0][1] * d[1][0];
        min_j = min_j.min(j);
        state.jac.data[k] = j;
        if j <= 0.0 {
            continue; // reported below
        }
        let inv = 1.0 / j;
        state.a.xx[k] = d[1][1] * inv;
        state.a.xy[k] = -d[0][1] * inv;
        state.a.yx[k] = -d[1][0] * inv;
        state.a.yy[k] = d[0][0] * inv;
        state.cof.xx[k] = d[1][1];
        state.cof.xy[k] = -d[0][1];
        state.cof.yx[k] = -d[1][0];
        state.cof.yy[k] = d[0][0];
    }
    if min_j <= 0.0 {
        return Err(Error::GaugeDegenerate(format!(
            "Jacobian determinant reached {min_j:.3e}"
        )));
    }
    Ok(())
}

/// Harmonic extension with tensors filled; the common entry point.
pub fn build_gauge(h: &HeightField, ops: &DiskOps) -> Result<GaugeState> {
    let mut g = harmonic_extend(h, ops)?;
    deformation_tensors(&mut g)?;
    Ok(g)
}

/// Unit frames on the reference circle and on the moving boundary.
#[derive(Debug, Clone)]
pub struct BoundaryFrames {
    /// Reference outward normal N(θ) = ξ(θ).
    pub normal_ref: Vec<[f64; 2]>,
    /// Reference tangent τ(θ) = ξ_θ.
    pub tangent_ref: Vec<[f64; 2]>,
    /// Unit outward normal to the moving boundary, n = (R N − h_θ τ)/√(R²+R_θ²).
    pub normal_moving: Vec<[f64; 2]>,
    /// ñ = Aᵀ N on the boundary ring.
    pub n_tilde: Vec<[f64; 2]>,
    /// √(R² + R_θ²).
    pub metric: Vec<f64>,
    /// R·J⁻¹ on the boundary ring.
    pub r_over_j: Vec<f64>,
}

pub fn boundary_frames(h: &HeightField, gauge: &GaugeState, ops: &DiskOps) -> BoundaryFrames {
    let grid = &ops.grid;
    let nt = grid.n_theta;
    let ring = grid.boundary_ring();
    let h_theta = ops.d_theta_ring(&h.values);

    let mut frames = BoundaryFrames {
        normal_ref: Vec::with_capacity(nt),
        tangent_ref: Vec::with_capacity(nt),
        normal_moving: Vec::with_capacity(nt),
        n_tilde: Vec::with_capacity(nt),
        metric: Vec::with_capacity(nt),
        r_over_j: Vec::with_capacity(nt),
    };
    for j in 0..nt {
        let (c, s) = (grid.theta[j].cos(), grid.theta[j].sin());
        let n_ref = [c, s];
        let tau = [-s, c];
        let r_val = 1.0 + h.values[j];
        let ht = h_theta[j];
        let metric = (r_val * r_val + ht * ht).sqrt();
        let n_mov = [
            (r_val * n_ref[0] - ht * tau[0]) / metric,
            (r_val * n_ref[1] - ht * tau[1]) / metric,
        ];
        let k = grid.idx(ring, j);
        let a = gauge.a.at(k);
        // ñ_i = A_i^k N_k, i.e. ñ = Aᵀ N in matrix terms
        let n_til = [
            a[0][0] * n_ref[0] + a[1][0] * n_ref[1],
            a[0][1] * n_ref[0] + a[1][1] * n_ref[1],
        ];
        frames.normal_ref.push(n_ref);
        frames.tangent_ref.push(tau);
        frames.normal_moving.push(n_mov);
        frames.n_tilde.push(n_til);
        frames.metric.push(metric);
        frames.r_over_j.push(r_val / gauge.jac.data[k]);
    }
    frames
}

/// Deviation measures of the gauge from the identity, with a pass/fail
/// against configured thresholds.
#[derive(Debug, Clone)]
pub struct GaugeReport {
    /// ‖∇Ψ − Id‖_∞ over all nodes.
    pub grad_deviation_inf: f64,
    pub min_jacobian: f64,
    /// ‖Ψ − e‖_{L²(Ω)} / ‖h‖_{L²(Γ)} (zero for h ≡ 0).
    pub extension_ratio: f64,
    pub pass: bool,
}

pub fn gauge_validity(
    h: &HeightField,
    gauge: &GaugeState,
    ops: &DiskOps,
    max_grad_deviation: f64,
    min_jacobian_floor: f64,
) -> GaugeReport {
    let grid = &ops.grid;
    let grad_dev = {
        let mut m = 0.0_f64;
        for k in 0..grid.n_nodes() {
            let d = gauge.grad_psi.at(k);
            m = m
                .max((d[0][0] - 1.0).abs())
                .max(d[0][1].abs())
                .max(d[1][0].abs())
                .max((d[1][1] - 1.0).abs());
        }
        m
    };
    let min_j = gauge.jac.data.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut dev_sq = ScalarField::zeros(grid.clone());
    for i in 0..grid.n_r {
        for j in 0..grid.n_theta {
            let k = grid.idx(i, j);
            let ex = grid.r[i] * grid.theta[j].cos();
            let ey = grid.r[i] * grid.theta[j].sin();
            let dx = gauge.psi.x[k] - ex;
            let dy = gauge.psi.y[k] - ey;
            dev_sq.data[k] = dx * dx + dy * dy;
        }
    }
    let psi_dev = dev_sq.integral().max(0.0).sqrt();
    let h_l2 = (h.values.iter().map(|v| v * v).sum::<f64>() * grid.d_theta()).sqrt();
    let ratio = if h_l2 > 0.0 { psi_dev / h_l2 } else { 0.0 };
    GaugeReport {
        grad_deviation_inf: grad_dev,
        min_jacobian: min_j,
        extension_ratio: ratio,
        pass: grad_dev <= max_grad_deviation && min_j >= min_jacobian_floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;
    use std::f64::consts::PI;

    fn ops() -> DiskOps {
        DiskOps::new(DiskGrid::graded(64, 48).unwrap())
    }

    #[test]
    fn identity_for_zero_height() {
        let o = ops();
        let h = HeightField::zeros(64);
        let g = build_gauge(&h, &o).unwrap();
        for i in 0..o.grid.n_r {
            for j in 0..o.grid.n_theta {
                let k = o.grid.idx(i, j);
                let ex = o.grid.r[i] * o.grid.theta[j].cos();
                let ey = o.grid.r[i] * o.grid.theta[j].sin();
                assert!((g.psi.x[k] - ex).abs() < 1e-13);
                assert!((g.psi.y[k] - ey).abs() < 1e-13);
                assert!((g.jac.data[k] - 1.0).abs() < 1e-12);
            }
        }
        assert!(g.a.deviation_from_identity() < 1e-12);
    }

    #[test]
    fn closed_form_single_cosine_mode() {
        let o = ops();
        let a = 0.03;
        let h = HeightField::from_fn(64, |th| a * th.cos());
        let g = build_gauge(&h, &o).unwrap();
        for i in 0..o.grid.n_r {
            let r = o.grid.r[i];
            for j in 0..o.grid.n_theta {
                let th = o.grid.theta[j];
                let k = o.grid.idx(i, j);
                let ex = r * th.cos() + 0.5 * a * (1.0 + r * r * (2.0 * th).cos());
                let ey = r * th.sin() + 0.5 * a * r * r * (2.0 * th).sin();
                assert!((g.psi.x[k] - ex).abs() < 1e-12, "x mismatch at ({i},{j})");
                assert!((g.psi.y[k] - ey).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_cos3_mode() {
        let o = ops();
        let a = 0.02;
        let h = HeightField::from_fn(64, |th| a * (3.0 * th).cos());
        let g = build_gauge(&h, &o).unwrap();
        let mut max_err = 0.0_f64;
        for i in 0..o.grid.n_r {
            let r = o.grid.r[i];
            for j in 0..o.grid.n_theta {
                let th = o.grid.theta[j];
                let k = o.grid.idx(i, j);
                let ex = r * th.cos()
                    + 0.5 * a * (r.powi(4) * (4.0 * th).cos() + r * r * (2.0 * th).cos());
                let ey = r * th.sin()
                    + 0.5 * a * (r.powi(4) * (4.0 * th).sin() - r * r * (2.0 * th).sin());
                max_err = max_err
                    .max((g.psi.x[k] - ex).abs())
                    .max((g.psi.y[k] - ey).abs());
            }
        }
        assert!(max_err < 1e-10, "closed-form error {max_err:e}");
    }

    #[test]
    fn extension_is_linear_in_h() {
        let o = ops();
        let h1 = HeightField::from_fn(64, |th| 0.02 * (3.0 * th).cos());
        let h2 = HeightField::from_fn(64, |th| 0.015 * (2.0 * th).sin());
        let sum = HeightField {
            values: h1
                .values
                .iter()
                .zip(&h2.values)
                .map(|(a, b)| a + b)
                .collect(),
            t: 0.0,
        };
        let g1 = harmonic_extend(&h1, &o).unwrap();
        let g2 = harmonic_extend(&h2, &o).unwrap();
        let gs = harmonic_extend(&sum, &o).unwrap();
        for (i, j) in [(0usize, 5usize), (20, 17), (47, 63)] {
            let k = o.grid.idx(i, j);
            let ex = o.grid.r[i] * o.grid.theta[j].cos();
            let ey = o.grid.r[i] * o.grid.theta[j].sin();
            assert!((gs.psi.x[k] - (g1.psi.x[k] + g2.psi.x[k] - ex)).abs() < 1e-12);
            assert!((gs.psi.y[k] - (g1.psi.y[k] + g2.psi.y[k] - ey)).abs() < 1e-12);
        }
    }

    #[test]
    fn synthetic_linear_map_tensors() {
        let o = ops();
        let delta = 0.25;
        let mut g = harmonic_extend(&HeightField::zeros(64), &o).unwrap();
        for i in 0..o.grid.n_r {
            for j in 0..o.grid.n_theta {
                let k = o.grid.idx(i, j);
                g.psi.x[k] *= 1.0 + delta;
                g.grad_psi.xx[k] = 1.0 + delta;
            }
        }
        deformation_tensors(&mut g).unwrap();
        for k in [0usize, 777, 3000] {
            assert!((g.a.xx[k] - 1.0 / (1.0 + delta)).abs() < 1e-12);
            assert!((g.a.yy[k] - 1.0).abs() < 1e-12);
            assert!((g.jac.data[k] - (1.0 + delta)).abs() < 1e-12);
            // cof = J·A exactly
            assert!((g.cof.xx[k] - g.jac.data[k] * g.a.xx[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_consistency_and_smallness() {
        let o = ops();
        let h = HeightField::from_fn(64, |th| 0.01 * (2.0 * th).cos());
        let g = build_gauge(&h, &o).unwrap();
        let mut max_res = 0.0_f64;
        for k in 0..o.grid.n_nodes() {
            let d = g.grad_psi.at(k);
            let a = g.a.at(k);
            for row in 0..2 {
                for col in 0..2 {
                    let mut acc = 0.0;
                    for s in 0..2 {
                        acc += a[row][s] * d[s][col];
                    }
                    let expect = if row == col { 1.0 } else { 0.0 };
                    max_res = max_res.max((acc - expect).abs());
                }
            }
        }
        assert!(max_res < 1e-10, "A·DΨ − Id = {max_res:e}");
        assert!(g.a.deviation_from_identity() <= 0.05);
    }

    #[test]
    fn harmonicity_of_extension() {
        let o = ops();
        let h = HeightField::from_fn(64, |th| 0.04 * (2.0 * th).cos() + 0.02 * (5.0 * th).sin());
        let g = build_gauge(&h, &o).unwrap();
        let px = ScalarField {
            grid: o.grid.clone(),
            data: g.psi.x.clone(),
        };
        let lap = o.laplacian(&px);
        // the residual here is entirely finite-difference truncation of the
        // measuring operator; it must be small and shrink under refinement
        let max_res = |ops: &DiskOps, lap: &ScalarField| {
            let mut m = 0.0_f64;
            for i in 1..ops.grid.n_r - 4 {
                for j in 0..ops.grid.n_theta {
                    m = m.max(lap.at(i, j).abs());
                }
            }
            m
        };
        let coarse = max_res(&o, &lap);
        assert!(coarse < 1e-3, "ΔΨ_x residual {coarse:e}");

        let o2 = DiskOps::new(DiskGrid::graded(64, 96).unwrap());
        let h2 = HeightField::from_fn(64, |th| 0.04 * (2.0 * th).cos() + 0.02 * (5.0 * th).sin());
        let g2 = build_gauge(&h2, &o2).unwrap();
        let px2 = ScalarField {
            grid: o2.grid.clone(),
            data: g2.psi.x.clone(),
        };
        let fine = max_res(&o2, &o2.laplacian(&px2));
        assert!(fine < coarse / 1.5, "no refinement gain: {coarse:e} -> {fine:e}");
    }

    #[test]
    fn frames_trivial_cases() {
        let o = ops();
        let h = HeightField::zeros(64);
        let g = build_gauge(&h, &o).unwrap();
        let f = boundary_frames(&h, &g, &o);
        for j in 0..64 {
            assert!((f.metric[j] - 1.0).abs() < 1e-12);
            assert!((f.r_over_j[j] - 1.0).abs() < 1e-10);
            for c in 0..2 {
                assert!((f.normal_moving[j][c] - f.normal_ref[j][c]).abs() < 1e-12);
                assert!((f.n_tilde[j][c] - f.normal_ref[j][c]).abs() < 1e-10);
            }
            // orthonormality of the reference frame
            let n = f.normal_ref[j];
            let t = f.tangent_ref[j];
            assert!((n[0] * n[0] + n[1] * n[1] - 1.0).abs() < 1e-14);
            assert!((n[0] * t[0] + n[1] * t[1]).abs() < 1e-14);
        }
        let hc = HeightField {
            values: vec![0.12; 64],
            t: 0.0,
        };
        let gc = build_gauge(&hc, &o).unwrap();
        let fc = boundary_frames(&hc, &gc, &o);
        for j in 0..64 {
            assert!((fc.metric[j] - 1.12).abs() < 1e-12);
            assert!((fc.normal_moving[j][0] - fc.normal_ref[j][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn moving_normal_matches_level_set_oracle() {
        let o = ops();
        let amp = 0.05;
        let h = HeightField::from_fn(64, |th| amp * (2.0 * th).cos());
        let g = build_gauge(&h, &o).unwrap();
        let f = boundary_frames(&h, &g, &o);
        // oracle: normalized finite-difference gradient of F = r - 1 - h(θ)
        let level = |x: f64, y: f64| x.hypot(y) - 1.0 - amp * (2.0 * y.atan2(x)).cos();
        let step = 1e-6;
        for j in 0..64 {
            let th = o.grid.theta[j];
            let px = (1.0 + h.values[j]) * th.cos();
            let py = (1.0 + h.values[j]) * th.sin();
            let gx = (level(px + step, py) - level(px - step, py)) / (2.0 * step);
            let gy = (level(px, py + step) - level(px, py - step)) / (2.0 * step);
            let norm = gx.hypot(gy);
            assert!((f.normal_moving[j][0] - gx / norm).abs() < 1e-6);
            assert!((f.normal_moving[j][1] - gy / norm).abs() < 1e-6);
        }
    }

    #[test]
    fn frame_consistency_identity() {
        // ñ = J⁻¹ √(R² + R_θ²) n componentwise
        let o = ops();
        let h = HeightField::from_fn(64, |th| 0.04 * (3.0 * th).cos() + 0.01 * th.sin());
        let g = build_gauge(&h, &o).unwrap();
        let f = boundary_frames(&h, &g, &o);
        let ring = o.grid.boundary_ring();
        for j in 0..64 {
            let k = o.grid.idx(ring, j);
            let scale = f.metric[j] / g.jac.data[k];
            for c in 0..2 {
                let expect = scale * f.normal_moving[j][c];
                assert!(
                    (f.n_tilde[j][c] - expect).abs() < 1e-8,
                    "frame identity off at θ node {j}: {} vs {expect}",
                    f.n_tilde[j][c]
                );
            }
        }
    }

    #[test]
    fn validity_report_scaling() {
        let o = ops();
        let mut norms = Vec::new();
        for a in [0.01, 0.02, 0.04] {
            let h = HeightField::from_fn(64, |th| a * (3.0 * th).cos());
            let g = build_gauge(&h, &o).unwrap();
            let rep = gauge_validity(&h, &g, &o, 0.5, 0.2);
            assert!(rep.pass);
            // |h|₂ on the circle for a single k=3 cosine mode
            let h2 = (PI * a * a * (1.0 + 9.0_f64).powi(2)).sqrt();
            assert!(rep.grad_deviation_inf <= 10.0 * h2);
            norms.push(rep.extension_ratio);
        }
        // the ratio ‖Ψ − e‖₀ / |h|₀ is amplitude-independent for a fixed mode
        assert!((norms[0] - norms[1]).abs() < 0.01 * norms[0]);
        assert!((norms[1] - norms[2]).abs() < 0.01 * norms[1]);
    }

    #[test]
    fn graph_violation_rejected() {
        let o = ops();
        let h = HeightField {
            values: vec![-1.01; 64],
            t: 0.0,
        };
        assert!(matches!(
            harmonic_extend(&h, &o),
            Err(Error::Geometry(_))
        ));
    }
}
