//! Time stepping for the transformed Stefan system on the fixed disk:
//!
//! * q_t − A_i^j (A_i^k q,_k),_j = −v·Ψ_t  (heat flow in gauge coordinates),
//! * v = −Aᵀ∇q,
//! * q = 0 on Γ,
//! * h_t = v·N − (1+h)⁻¹ h_θ v·τ, gauge rebuilt from the new height.
//!
//! One step is first-order IMEX: the constant-coefficient Laplacian is
//! implicit (per-mode tridiagonal solves), the O(h)-sized coefficient
//! deviation Δ_Ψ − Δ and the transport term −v·Ψ_t are explicit, Ψ_t is the
//! backward difference of consecutive gauges.
//!
//! In frozen-gauge mode the boundary is pinned, the gauge is the identity,
//! and the temperature is advanced in the Dirichlet eigenbasis by the exact
//! heat semigroup; runs in this mode reproduce Σ c_j e^{−λ_j t} φ_j to
//! roundoff, which is what the linear-decay and Duhamel diagnostics are
//! calibrated against.

mod imex;
mod init;
mod run;

pub use imex::ImexSolver;
pub use init::{
    compatibility_residuals, CompatReport, CompatibilityMode, InitReport, InitialSpec,
};
pub use run::{run_simulation, FieldSnapshot, RunOutput, RunParams, RunStatus};

use crate::eigen::EigenBasis;
use crate::error::{Error, Result};
use crate::field::{HeightField, ScalarField, TensorField, VectorField};
use crate::gauge::{boundary_frames, build_gauge, BoundaryFrames, GaugeState};
use crate::operators::DiskOps;
use std::sync::Arc;

/// Pulled-back temperature on the fixed disk.
#[derive(Debug, Clone)]
pub struct TemperatureField {
    pub field: ScalarField,
    pub t: f64,
}

/// Velocity v = −Aᵀ∇q.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub field: VectorField,
    pub t: f64,
}

/// Coefficients of the non-divergence form q_t = a_kj q,_kj + b_k q,_k:
/// a = A Aᵀ and b_k = A_i^k,_j A_i^j + A_i^k Ψ_t^i.
#[derive(Debug, Clone)]
pub struct VariableCoefficients {
    pub a: TensorField,
    pub b: VectorField,
}

impl VariableCoefficients {
    /// Smallest eigenvalue of the symmetric part of `a` at node `k`.
    pub fn min_eigenvalue_at(&self, k: usize) -> f64 {
        let (axx, ayy) = (self.a.xx[k], self.a.yy[k]);
        let axy = 0.5 * (self.a.xy[k] + self.a.yx[k]);
        let tr = axx + ayy;
        let det = axx * ayy - axy * axy;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        0.5 * tr - disc
    }

    pub fn trace_at(&self, k: usize) -> f64 {
        self.a.xx[k] + self.a.yy[k]
    }
}

/// Previous-step data kept for differencing and per-step monitors.
#[derive(Debug, Clone)]
pub struct PrevFields {
    pub t: f64,
    pub q: ScalarField,
    pub h: HeightField,
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub q: TemperatureField,
    pub h: HeightField,
    pub gauge: GaugeState,
    pub frames: BoundaryFrames,
    pub v: VelocityField,
    /// Eigen-coefficients of q, maintained exactly in frozen-gauge runs.
    pub eigen_coeffs: Option<Vec<f64>>,
    pub prev: Option<Box<PrevFields>>,
}

impl SimState {
    /// min over θ of the per-step height increment (negative means the
    /// boundary receded); NaN when no previous step is held.
    pub fn min_height_increment(&self) -> f64 {
        match &self.prev {
            None => f64::NAN,
            Some(p) => self
                .h
                .values
                .iter()
                .zip(&p.h.values)
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Hold h fixed, identity gauge, exact spectral heat flow.
    pub frozen_gauge: bool,
    /// 1 + h must stay above this.
    pub graph_floor: f64,
    /// Abort when min J drops below this.
    pub jacobian_floor: f64,
    /// Taylor condition floor: −∂_N q₀ >= taylor_floor · ∫ q₀ φ₁.
    pub taylor_floor: f64,
    /// Interior q may not drop below −positivity_tol on valid runs.
    pub positivity_tol: f64,
    /// First-order compatibility enforcement target.
    pub enforce_tol: f64,
    /// CFL number for the explicit boundary transport.
    pub cfl_boundary: f64,
    pub dt_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            frozen_gauge: false,
            graph_floor: 0.2,
            jacobian_floor: 0.2,
            taylor_floor: 0.5,
            positivity_tol: 1e-8,
            enforce_tol: 1e-6,
            cfl_boundary: 0.5,
            dt_cap: 1e-3,
        }
    }
}

/// Everything a run shares: grid operators, eigenbasis, solver settings.
#[derive(Debug)]
pub struct Simulation {
    pub ops: Arc<DiskOps>,
    pub basis: Arc<EigenBasis>,
    pub cfg: SolverConfig,
}

impl Simulation {
    pub fn new(ops: Arc<DiskOps>, basis: Arc<EigenBasis>, cfg: SolverConfig) -> Result<Self> {
        if !basis.grid.same_layout(&ops.grid) {
            return Err(Error::Shape(
                "eigenbasis and operators live on different grids".into(),
            ));
        }
        Ok(Self { ops, basis, cfg })
    }

    /// v = −Aᵀ∇q nodewise.
    pub fn velocity_from_temperature(&self, q: &TemperatureField, gauge: &GaugeState) -> VelocityField {
        let grad = self.ops.gradient(&q.field);
        let mut v = VectorField::zeros(self.ops.grid.clone());
        for k in 0..self.ops.grid.n_nodes() {
            let a = gauge.a.at(k);
            v.x[k] = -(a[0][0] * grad.x[k] + a[1][0] * grad.y[k]);
            v.y[k] = -(a[0][1] * grad.x[k] + a[1][1] * grad.y[k]);
        }
        VelocityField { field: v, t: q.t }
    }

    /// a_kj = A_i^k A_i^j and b_k = A_i^k,_j A_i^j + A_i^k Ψ_t^i (the second
    /// summand uses the held Ψ_t).
    pub fn variable_coefficients(&self, gauge: &GaugeState) -> VariableCoefficients {
        let grid = &self.ops.grid;
        let n = grid.n_nodes();
        let mut coeff = VariableCoefficients {
            a: TensorField::zeros(grid.clone()),
            b: VectorField::zeros(grid.clone()),
        };
        // gradients of the four A entries for the drift term
        let comps = [&gauge.a.xx, &gauge.a.xy, &gauge.a.yx, &gauge.a.yy];
        let mut grads = Vec::with_capacity(4);
        for c in comps {
            grads.push(self.ops.gradient(&ScalarField {
                grid: grid.clone(),
                data: (*c).clone(),
            }));
        }
        // entry (row, col) of A: [xx xy; yx yy] -> grads index row*2+col
        let a_entry = |g: &GaugeState, row: usize, col: usize, k: usize| match (row, col) {
            (0, 0) => g.a.xx[k],
            (0, 1) => g.a.xy[k],
            (1, 0) => g.a.yx[k],
            _ => g.a.yy[k],
        };
        for k in 0..n {
            let a = gauge.a.at(k);
            // a = A Aᵀ
            coeff.a.xx[k] = a[0][0] * a[0][0] + a[0][1] * a[0][1];
            coeff.a.xy[k] = a[0][0] * a[1][0] + a[0][1] * a[1][1];
            coeff.a.yx[k] = coeff.a.xy[k];
            coeff.a.yy[k] = a[1][0] * a[1][0] + a[1][1] * a[1][1];
            // b_k = Σ_{i,j} (∂_j A_{ki}) A_{ji} + (A w)_k
            let w = (gauge.psi_t.x[k], gauge.psi_t.y[k]);
            for row in 0..2 {
                let mut acc = 0.0;
                for i in 0..2 {
                    let g = &grads[row * 2 + i];
                    let (dx, dy) = (g.x[k], g.y[k]);
                    acc += dx * a_entry(gauge, 0, i, k) + dy * a_entry(gauge, 1, i, k);
                }
                acc += a[row][0] * w.0 + a[row][1] * w.1;
                if row == 0 {
                    coeff.b.x[k] = acc;
                } else {
                    coeff.b.y[k] = acc;
                }
            }
        }
        coeff
    }

    /// Δ_Ψ q = A_i^j (A_i^k q,_k),_j in divergence form.
    pub fn gauge_laplacian(&self, q: &ScalarField, gauge: &GaugeState) -> ScalarField {
        let grid = &self.ops.grid;
        let grad = self.ops.gradient(q);
        let mut gx = ScalarField::zeros(grid.clone());
        let mut gy = ScalarField::zeros(grid.clone());
        for k in 0..grid.n_nodes() {
            let a = gauge.a.at(k);
            gx.data[k] = a[0][0] * grad.x[k] + a[1][0] * grad.y[k];
            gy.data[k] = a[0][1] * grad.x[k] + a[1][1] * grad.y[k];
        }
        let dgx = self.ops.gradient(&gx);
        let dgy = self.ops.gradient(&gy);
        let mut out = ScalarField::zeros(grid.clone());
        for k in 0..grid.n_nodes() {
            let a = gauge.a.at(k);
            out.data[k] = a[0][0] * dgx.x[k] + a[1][0] * dgx.y[k] + a[0][1] * dgy.x[k]
                + a[1][1] * dgy.y[k];
        }
        out
    }

    /// q_t by substitution of the equation: Δ_Ψ q − v·Ψ_t, with the boundary
    /// ring pinned to zero (q vanishes on Γ for all time). Frozen-gauge
    /// states with stored coefficients use the exact spectral form.
    pub fn substituted_q_t(&self, state: &SimState) -> ScalarField {
        if let Some(coeffs) = &state.eigen_coeffs {
            let decayed: Vec<f64> = coeffs
                .iter()
                .zip(&self.basis.modes)
                .map(|(c, m)| -c * m.eigenvalue)
                .collect();
            return self.basis.synthesize(&decayed);
        }
        let grid = &self.ops.grid;
        let mut qt = self.gauge_laplacian(&state.q.field, &state.gauge);
        for k in 0..grid.n_nodes() {
            qt.data[k] -=
                state.v.field.x[k] * state.gauge.psi_t.x[k] + state.v.field.y[k] * state.gauge.psi_t.y[k];
        }
        let s = grid.idx(grid.boundary_ring(), 0);
        for v in &mut qt.data[s..s + grid.n_theta] {
            *v = 0.0;
        }
        qt
    }

    /// Largest admissible step per the boundary-transport CFL rule.
    pub fn dt_max(&self, state: &SimState) -> f64 {
        let ring = self.ops.grid.boundary_ring();
        let nt = self.ops.grid.n_theta;
        let h_theta = self.ops.d_theta_ring(&state.h.values);
        let mut max_ht = 0.0_f64;
        for j in 0..nt {
            let k = self.ops.grid.idx(ring, j);
            let (vx, vy) = (state.v.field.x[k], state.v.field.y[k]);
            let n = state.frames.normal_ref[j];
            let tau = state.frames.tangent_ref[j];
            let ht = vx * n[0] + vy * n[1]
                - h_theta[j] / (1.0 + state.h.values[j]) * (vx * tau[0] + vy * tau[1]);
            max_ht = max_ht.max(ht.abs());
        }
        if max_ht == 0.0 {
            self.cfg.dt_cap
        } else {
            (self.cfg.cfl_boundary * self.ops.grid.d_theta() / max_ht).min(self.cfg.dt_cap)
        }
    }

    /// One IMEX step (or one exact spectral step in frozen-gauge mode).
    pub fn advance_step(&self, state: &SimState, dt: f64, imex: &ImexSolver) -> Result<SimState> {
        if dt <= 0.0 {
            return Err(Error::Domain("advance_step: dt must be positive".into()));
        }
        if self.cfg.frozen_gauge {
            return self.advance_frozen(state, dt);
        }
        self.advance_full(state, dt, imex)
            .map_err(|e| Error::StepFailure {
                t: state.t,
                source: Box::new(e),
            })
    }

    fn advance_frozen(&self, state: &SimState, dt: f64) -> Result<SimState> {
        let coeffs = state
            .eigen_coeffs
            .as_ref()
            .ok_or_else(|| Error::Precondition("frozen-gauge state lacks eigen coefficients".into()))?;
        let new_coeffs: Vec<f64> = coeffs
            .iter()
            .zip(&self.basis.modes)
            .map(|(c, m)| c * (-m.eigenvalue * dt).exp())
            .collect();
        let q_field = self.basis.synthesize(&new_coeffs);
        let t = state.t + dt;
        let q = TemperatureField { field: q_field, t };
        let v = self.velocity_from_temperature(&q, &state.gauge);
        Ok(SimState {
            t,
            prev: Some(Box::new(PrevFields {
                t: state.t,
                q: state.q.field.clone(),
                h: state.h.clone(),
            })),
            q,
            h: HeightField {
                values: state.h.values.clone(),
                t,
            },
            gauge: state.gauge.clone(),
            frames: state.frames.clone(),
            v,
            eigen_coeffs: Some(new_coeffs),
        })
    }

    fn advance_full(&self, state: &SimState, dt: f64, imex: &ImexSolver) -> Result<SimState> {
        debug_assert_eq!(imex.dt(), dt, "IMEX factorization built for another dt");
        let grid = &self.ops.grid;
        let nt = grid.n_theta;
        let ring = grid.boundary_ring();

        // (i) explicit height update from the current boundary velocity
        let h_theta = self.ops.d_theta_ring(&state.h.values);
        let mut h_new = HeightField {
            values: vec![0.0; nt],
            t: state.t + dt,
        };
        for j in 0..nt {
            let k = grid.idx(ring, j);
            let (vx, vy) = (state.v.field.x[k], state.v.field.y[k]);
            let n = state.frames.normal_ref[j];
            let tau = state.frames.tangent_ref[j];
            let ht = vx * n[0] + vy * n[1]
                - h_theta[j] / (1.0 + state.h.values[j]) * (vx * tau[0] + vy * tau[1]);
            h_new.values[j] = state.h.values[j] + dt * ht;
        }
        h_new.check_graph(self.cfg.graph_floor)?;

        // (ii) rebuild the gauge; Ψ_t by backward differencing
        let mut gauge_new = build_gauge(&h_new, &self.ops)?;
        let min_j = gauge_new
            .jac
            .data
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_j < self.cfg.jacobian_floor {
            return Err(Error::GaugeDegenerate(format!(
                "min J = {min_j:.4} below floor {}",
                self.cfg.jacobian_floor
            )));
        }
        for k in 0..grid.n_nodes() {
            gauge_new.psi_t.x[k] = (gauge_new.psi.x[k] - state.gauge.psi.x[k]) / dt;
            gauge_new.psi_t.y[k] = (gauge_new.psi.y[k] - state.gauge.psi.y[k]) / dt;
        }

        // (iii) explicit forcing: coefficient deviation (frozen A at step
        // start) and ALE transport
        let dev = {
            let gauge_lap = self.gauge_laplacian(&state.q.field, &state.gauge);
            let lap = self.ops.laplacian(&state.q.field);
            let mut f = ScalarField::zeros(grid.clone());
            for k in 0..grid.n_nodes() {
                f.data[k] = gauge_lap.data[k] - lap.data[k]
                    - (state.v.field.x[k] * gauge_new.psi_t.x[k]
                        + state.v.field.y[k] * gauge_new.psi_t.y[k]);
            }
            f
        };
        let mut rhs = state.q.field.clone();
        rhs.add_scaled(dt, &dev);

        // (iv) implicit diffusion with exact boundary condition
        let q_field = imex.solve(&self.ops, &rhs);
        if !q_field.data.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("temperature field became non-finite".into()));
        }
        if q_field.max_abs() > 1e6 {
            return Err(Error::Numerical("temperature field blew up".into()));
        }

        // (v) new velocity from the new gauge
        let t = state.t + dt;
        let q = TemperatureField { field: q_field, t };
        let v = self.velocity_from_temperature(&q, &gauge_new);
        let frames = boundary_frames(&h_new, &gauge_new, &self.ops);

        Ok(SimState {
            t,
            prev: Some(Box::new(PrevFields {
                t: state.t,
                q: state.q.field.clone(),
                h: state.h.clone(),
            })),
            q,
            h: h_new,
            gauge: gauge_new,
            frames,
            v,
            eigen_coeffs: None,
        })
    }

    /// Discrete enthalpy H = ∫ q J dx + |Ω(t)|.
    pub fn enthalpy(&self, state: &SimState) -> f64 {
        let grid = &self.ops.grid;
        let mut weighted = ScalarField::zeros(grid.clone());
        for k in 0..grid.n_nodes() {
            weighted.data[k] = state.q.field.data[k] * state.gauge.jac.data[k];
        }
        weighted.integral() + state.h.enclosed_area()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;

    fn sim(frozen: bool) -> Simulation {
        let grid = DiskGrid::graded(64, 64).unwrap();
        let ops = Arc::new(DiskOps::new(grid.clone()));
        let basis = Arc::new(EigenBasis::dirichlet(8, grid).unwrap());
        Simulation::new(
            ops,
            basis,
            SolverConfig {
                frozen_gauge: frozen,
                ..SolverConfig::default()
            },
        )
        .unwrap()
    }

    fn state_from_coeffs(sim: &Simulation, coeffs: Vec<f64>) -> SimState {
        let spec = InitialSpec {
            coefficients: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| (i + 1, *c))
                .collect(),
            amplitude: 1.0,
            h0_cos: vec![],
            h0_sin: vec![],
            compatibility_mode: CompatibilityMode::Report,
        };
        sim.build_initial_data(&spec).unwrap().0
    }

    #[test]
    fn velocity_residual_is_zero_by_construction() {
        let s = sim(false);
        let st = state_from_coeffs(&s, vec![0.05]);
        let grad = s.ops.gradient(&st.q.field);
        let mut max_res = 0.0_f64;
        for k in 0..s.ops.grid.n_nodes() {
            let a = st.gauge.a.at(k);
            let rx = st.v.field.x[k] + a[0][0] * grad.x[k] + a[1][0] * grad.y[k];
            let ry = st.v.field.y[k] + a[0][1] * grad.x[k] + a[1][1] * grad.y[k];
            max_res = max_res.max(rx.abs()).max(ry.abs());
        }
        assert!(max_res < 1e-14);
    }

    #[test]
    fn radial_temperature_gives_radial_velocity() {
        let s = sim(false);
        let st = state_from_coeffs(&s, vec![0.05]);
        // tangential component vanishes for a radial q under the identity gauge
        for i in 0..s.ops.grid.n_r {
            for j in 0..s.ops.grid.n_theta {
                let k = s.ops.grid.idx(i, j);
                let th = s.ops.grid.theta[j];
                let tangential = -st.v.field.x[k] * th.sin() + st.v.field.y[k] * th.cos();
                assert!(tangential.abs() < 1e-10);
            }
        }
        // outward at the boundary: v·N = −∂_N φ₁ > 0
        let ring = s.ops.grid.boundary_ring();
        for j in 0..s.ops.grid.n_theta {
            let k = s.ops.grid.idx(ring, j);
            let vn = st.v.field.x[k] * s.ops.grid.theta[j].cos()
                + st.v.field.y[k] * s.ops.grid.theta[j].sin();
            assert!(vn > 0.0);
        }
    }

    #[test]
    fn zero_temperature_is_equilibrium() {
        let s = sim(false);
        let spec = InitialSpec {
            coefficients: Default::default(),
            amplitude: 0.0,
            h0_cos: vec![],
            h0_sin: vec![],
            compatibility_mode: CompatibilityMode::Report,
        };
        let (st, _) = s.build_initial_data(&spec).unwrap();
        let imex = ImexSolver::new(&s.ops, 1e-3);
        let st2 = s.advance_step(&st, 1e-3, &imex).unwrap();
        assert_eq!(st2.q.field.max_abs(), 0.0);
        assert!(st2.h.max_abs() < 1e-15);
    }

    #[test]
    fn identity_gauge_coefficients() {
        let s = sim(false);
        let st = state_from_coeffs(&s, vec![0.05]);
        let vc = s.variable_coefficients(&st.gauge);
        assert!(vc.a.deviation_from_identity() < 1e-9);
        assert!(vc.b.max_abs() < 1e-8);
        for k in [0usize, 100, 2000] {
            assert!((vc.min_eigenvalue_at(k) - 1.0).abs() < 1e-9);
            assert!((vc.trace_at(k) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn coefficient_deviation_bound_for_small_height() {
        let s = sim(false);
        let h = HeightField::from_fn(64, |th| 0.01 * (2.0 * th).cos());
        let gauge = build_gauge(&h, &s.ops).unwrap();
        let vc = s.variable_coefficients(&gauge);
        let a_dev = gauge.a.deviation_from_identity();
        // ‖AAᵀ − Id‖ <= 2‖A − Id‖ + ‖A − Id‖² entrywise (up to the 2x2 norm
        // equivalence factor)
        let bound = 2.0 * (2.0 * a_dev + a_dev * a_dev);
        assert!(vc.a.deviation_from_identity() <= bound);
        // eigenvalue floor
        let mut min_eig = f64::INFINITY;
        for k in 0..s.ops.grid.n_nodes() {
            min_eig = min_eig.min(vc.min_eigenvalue_at(k));
        }
        assert!(min_eig >= (1.0 - a_dev) * (1.0 - a_dev) - 1e-12);
    }

    #[test]
    fn frozen_step_matches_exact_semigroup() {
        let s = sim(true);
        let st = state_from_coeffs(&s, vec![0.01]);
        let dt = 1e-2;
        let imex = ImexSolver::new(&s.ops, dt);
        let st2 = s.advance_step(&st, dt, &imex).unwrap();
        let lam = s.basis.lambda1();
        let expect = (-lam * dt).exp();
        let ratio = st2.q.field.l2() / st.q.field.l2();
        // exact in frozen mode, and in any case within C dt² of the semigroup
        assert!((ratio - expect).abs() < 1e-12, "{ratio} vs {expect}");
    }

    #[test]
    fn full_step_on_eigenmode_close_to_semigroup() {
        let s = sim(false);
        let st = state_from_coeffs(&s, vec![0.05]);
        let dt = 1e-2;
        let imex = ImexSolver::new(&s.ops, dt);
        let st2 = s.advance_step(&st, dt, &imex).unwrap();
        let lam = s.basis.lambda1();
        let expect = (-lam * dt).exp();
        let ratio = st2.q.field.l2() / st.q.field.l2();
        // backward-Euler one-step defect is O(dt²) plus radial truncation
        assert!(
            (ratio - expect).abs() < 10.0 * dt * dt + 1e-4,
            "{ratio} vs {expect}"
        );
    }

    #[test]
    fn symmetric_data_keeps_height_symmetric() {
        let s = sim(false);
        let mut st = state_from_coeffs(&s, vec![0.05]);
        let dt = 5e-4;
        let imex = ImexSolver::new(&s.ops, dt);
        for _ in 0..20 {
            st = s.advance_step(&st, dt, &imex).unwrap();
        }
        let mean = st.h.mean();
        assert!(mean > 0.0, "melting must push the boundary out");
        for &v in &st.h.values {
            assert!((v - mean).abs() < 1e-8, "asymmetry {:e}", (v - mean).abs());
        }
    }

    #[test]
    fn dt_refinement_first_order_self_convergence() {
        let s = sim(false);
        let st0 = state_from_coeffs(&s, vec![0.05]);
        let t_end = 0.02;
        let run = |dt: f64| {
            let imex = ImexSolver::new(&s.ops, dt);
            let mut st = st0.clone();
            let steps = (t_end / dt).round() as usize;
            for _ in 0..steps {
                st = s.advance_step(&st, dt, &imex).unwrap();
            }
            st
        };
        let reference = run(2.5e-5);
        let err = |st: &SimState| {
            let mut d = st.q.field.clone();
            d.add_scaled(-1.0, &reference.q.field);
            d.l2()
        };
        let e1 = err(&run(4e-4));
        let e2 = err(&run(2e-4));
        let rate = e1 / e2;
        assert!(
            rate > 1.5 && rate < 3.0,
            "self-convergence rate {rate} not first order (e1={e1:e}, e2={e2:e})"
        );
    }

    #[test]
    fn enthalpy_drift_small_over_short_run()  {
        let s = sim(false);
        let mut st = state_from_coeffs(&s, vec![0.05]);
        let h0 = s.enthalpy(&st);
        let dt = 2e-4;
        let imex = ImexSolver::new(&s.ops, dt);
        for _ in 0..250 {
            st = s.advance_step(&st, dt, &imex).unwrap();
        }
        let drift = (s.enthalpy(&st) - h0).abs() / h0;
        // 0.05 time units; the budget is 1e-4 per unit time
        assert!(drift < 2e-5, "enthalpy drift {drift:e}");
    }
}
