//! Per-time diagnostics: the boundary-flux floor χ, decay norms, truncated
//! energy/dissipation, sign monitors for ∂_N q_t, variable-coefficient
//! extremes for the comparison-rate calculator, and the nonlinearity
//! snapshots the Duhamel split integrates.

mod barrier;
mod duhamel;
mod energy;
mod fit;
mod oddson;
mod taylor;

pub use barrier::{barrier_residual, barrier_value, select_kappa2, BarrierParams};
pub use duhamel::{duhamel_split, x_positivity_margin, DuhamelSplit};
pub use energy::{cutoff_field, cutoff_mu, decay_norms, truncated_energy, EnergyInputs, EnergyPair};
pub use fit::fit_decay_exponent;
pub use oddson::{oddson_rate, sample_coefficients, OddsonRate, OddsonSample};
pub use taylor::{taylor_sign_monitor, TaylorSignReport};

use crate::error::Result;
use crate::field::{ScalarField, TensorField, VectorField};
use crate::solver::{SimState, Simulation};

#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsParams {
    /// Decay-rate slack η in β = 2λ₁ − η.
    pub eta: f64,
    /// Transient-horizon constant C̄ in T_K = C̄ ln K.
    pub c_bar: f64,
    /// Tangential truncation order of the energy functionals.
    pub max_tangential: usize,
    /// Time truncation order (b ≤ max_time).
    pub max_time: usize,
}

impl DiagnosticsParams {
    pub fn with_lambda1(lambda1: f64) -> Self {
        Self {
            eta: 0.1 * lambda1,
            c_bar: 2.0,
            max_tangential: 4,
            max_time: 1,
        }
    }
}

/// One sampled time of a run.
#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// χ = inf_Γ (−∂_N q).
    pub chi: f64,
    pub e_beta: f64,
    pub d_low: f64,
    pub e_trunc: f64,
    pub d_trunc: f64,
    /// Grid L² norm of q.
    pub q_l2: f64,
    /// Spectral-surrogate H⁴ norm of q.
    pub q_h4: f64,
    pub h_mean: f64,
    pub h_max: f64,
    pub h_l2: f64,
    /// min_Γ ∂_N q_t.
    pub min_dnqt: f64,
    /// max_Γ |∂_N q_t / ∂_N q|.
    pub hopf_ratio: f64,
    pub enthalpy: f64,
    pub min_q_interior: f64,
    /// ‖∂_t^l q‖_s table as (l, s, value).
    pub norm_table: Vec<(u32, f64, f64)>,
    /// Projection of q_t onto the eigenbasis (exact in frozen-gauge runs).
    pub q_t_coeffs: Vec<f64>,
    /// Projection of the nonlinearity N(q, h), for the Duhamel quadrature.
    pub duhamel_n_coeffs: Vec<f64>,
    /// sup-norm of the quadratic forcing a_t:∇²q + b_t·∇q (κ₁ calibration).
    pub nonlinear_forcing_inf: f64,
    /// Variable-coefficient extremes for the comparison-rate window.
    pub oddson: OddsonSample,
    pub chi_alarm: bool,
    pub weight_skipped: bool,
    pub history_incomplete: bool,
}

struct History {
    t: f64,
    q_t: ScalarField,
    v: VectorField,
    psi_t: VectorField,
    h_t: Vec<f64>,
    coeff_a: TensorField,
    coeff_b: VectorField,
}

pub struct DiagnosticsEngine {
    pub params: DiagnosticsParams,
    mu: ScalarField,
    prev: Option<History>,
}

impl DiagnosticsEngine {
    pub fn new(sim: &Simulation, params: DiagnosticsParams) -> Self {
        Self {
            params,
            mu: cutoff_field(&sim.ops),
            prev: None,
        }
    }

    /// Boundary h_t per Eq. (9d)-style transport from the current velocity.
    fn height_velocity(sim: &Simulation, state: &SimState) -> Vec<f64> {
        let grid = &sim.ops.grid;
        let ring = grid.boundary_ring();
        let h_theta = sim.ops.d_theta_ring(&state.h.values);
        (0..grid.n_theta)
            .map(|j| {
                let k = grid.idx(ring, j);
                let (vx, vy) = (state.v.field.x[k], state.v.field.y[k]);
                let n = state.frames.normal_ref[j];
                let tau = state.frames.tangent_ref[j];
                vx * n[0] + vy * n[1]
                    - h_theta[j] / (1.0 + state.h.values[j]) * (vx * tau[0] + vy * tau[1])
            })
            .collect()
    }

    pub fn record(&mut self, sim: &Simulation, state: &SimState) -> Result<DiagnosticsRecord> {
        let ops = &sim.ops;
        let grid = &ops.grid;
        let nt = grid.n_theta;
        let t = state.t;

        let q_t = sim.substituted_q_t(state);
        let flux_q = ops.boundary_normal_derivative(&state.q.field);
        let chi = flux_q.iter().fold(f64::INFINITY, |m, &f| m.min(-f));
        let chi_alarm = !(chi > 0.0);
        let flux_qt = ops.boundary_normal_derivative(&q_t);
        let min_dnqt = flux_qt.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut hopf_ratio = 0.0_f64;
        for j in 0..nt {
            if flux_q[j].abs() > 1e-300 {
                hopf_ratio = hopf_ratio.max((flux_qt[j] / flux_q[j]).abs());
            }
        }

        let h_t = Self::height_velocity(sim, state);

        // time-differenced quantities from the previous record
        let mut history_incomplete = self.prev.is_none();
        let mut v_t: Option<VectorField> = None;
        let mut q_tt: Option<ScalarField> = None;
        let mut psi_tt: Option<VectorField> = None;
        let mut h_tt: Option<Vec<f64>> = None;
        if let Some(prev) = &self.prev {
            let dtr = t - prev.t;
            if dtr > 1e-14 {
                let mut vt = VectorField::zeros(grid.clone());
                for k in 0..grid.n_nodes() {
                    vt.x[k] = (state.v.field.x[k] - prev.v.x[k]) / dtr;
                    vt.y[k] = (state.v.field.y[k] - prev.v.y[k]) / dtr;
                }
                v_t = Some(vt);
                let mut pt = VectorField::zeros(grid.clone());
                for k in 0..grid.n_nodes() {
                    pt.x[k] = (state.gauge.psi_t.x[k] - prev.psi_t.x[k]) / dtr;
                    pt.y[k] = (state.gauge.psi_t.y[k] - prev.psi_t.y[k]) / dtr;
                }
                psi_tt = Some(pt);
                h_tt = Some(
                    h_t.iter()
                        .zip(&prev.h_t)
                        .map(|(a, b)| (a - b) / dtr)
                        .collect(),
                );
                if state.eigen_coeffs.is_none() {
                    let mut qtt = q_t.clone();
                    qtt.add_scaled(-1.0, &prev.q_t);
                    for v in &mut qtt.data {
                        *v /= dtr;
                    }
                    q_tt = Some(qtt);
                }
            } else {
                history_incomplete = true;
            }
        }
        // frozen runs have the exact second time-derivative available
        if let Some(coeffs) = &state.eigen_coeffs {
            let c2: Vec<f64> = coeffs
                .iter()
                .zip(&sim.basis.modes)
                .map(|(c, m)| c * m.eigenvalue * m.eigenvalue)
                .collect();
            q_tt = Some(sim.basis.synthesize(&c2));
        }

        let decay = decay_norms(
            &sim.basis,
            t,
            self.params.eta,
            &state.q.field,
            &q_t,
            q_tt.as_ref(),
            &state.v.field,
            v_t.as_ref(),
        )?;

        let vc = sim.variable_coefficients(&state.gauge);
        let oddson = sample_coefficients(&vc)?;

        // nonlinearity N = (a − Id):∇²q_t + b·∇q_t + a_t:∇²q + b_t·∇q
        let (n_coeffs, forcing_inf) = if state.eigen_coeffs.is_some() {
            (vec![0.0; sim.basis.len()], 0.0)
        } else {
            let hess_qt = ops.jacobian(&ops.gradient(&q_t));
            let grad_qt = ops.gradient(&q_t);
            let hess_q = ops.jacobian(&ops.gradient(&state.q.field));
            let grad_q = ops.gradient(&state.q.field);
            let mut n_field = ScalarField::zeros(grid.clone());
            let mut forcing = 0.0_f64;
            let prev = self.prev.as_ref();
            for k in 0..grid.n_nodes() {
                let lin = (vc.a.xx[k] - 1.0) * hess_qt.xx[k]
                    + vc.a.xy[k] * hess_qt.xy[k]
                    + vc.a.yx[k] * hess_qt.yx[k]
                    + (vc.a.yy[k] - 1.0) * hess_qt.yy[k]
                    + vc.b.x[k] * grad_qt.x[k]
                    + vc.b.y[k] * grad_qt.y[k];
                let quad = match prev {
                    Some(p) if t - p.t > 1e-14 => {
                        let dtr = t - p.t;
                        let at_xx = (vc.a.xx[k] - p.coeff_a.xx[k]) / dtr;
                        let at_xy = (vc.a.xy[k] - p.coeff_a.xy[k]) / dtr;
                        let at_yx = (vc.a.yx[k] - p.coeff_a.yx[k]) / dtr;
                        let at_yy = (vc.a.yy[k] - p.coeff_a.yy[k]) / dtr;
                        let bt_x = (vc.b.x[k] - p.coeff_b.x[k]) / dtr;
                        let bt_y = (vc.b.y[k] - p.coeff_b.y[k]) / dtr;
                        at_xx * hess_q.xx[k]
                            + at_xy * hess_q.xy[k]
                            + at_yx * hess_q.yx[k]
                            + at_yy * hess_q.yy[k]
                            + bt_x * grad_q.x[k]
                            + bt_y * grad_q.y[k]
                    }
                    _ => 0.0,
                };
                forcing = forcing.max(quad.abs());
                n_field.data[k] = lin + quad;
            }
            (sim.basis.project(&n_field)?, forcing)
        };

        // q_t coefficients: exact in frozen mode, projected otherwise
        let q_t_coeffs = if let Some(coeffs) = &state.eigen_coeffs {
            coeffs
                .iter()
                .zip(&sim.basis.modes)
                .map(|(c, m)| -c * m.eigenvalue)
                .collect()
        } else {
            sim.basis.project(&q_t)?
        };

        let inputs = EnergyInputs {
            q: &state.q.field,
            v: &state.v.field,
            psi: &state.gauge.psi,
            h: &state.h.values,
            q_t: &q_t,
            psi_t: &state.gauge.psi_t,
            h_t: &h_t,
            v_t: v_t.as_ref(),
            q_tt: q_tt.as_ref(),
            psi_tt: psi_tt.as_ref(),
            h_tt: h_tt.as_deref(),
            flux: &flux_q,
            r_over_j: &state.frames.r_over_j,
        };
        let pair = truncated_energy(
            ops,
            &self.mu,
            &inputs,
            self.params.max_tangential,
            self.params.max_time,
        );

        let min_q_interior = {
            let mut m = f64::INFINITY;
            for i in 0..grid.n_r - 1 {
                for j in 0..nt {
                    m = m.min(state.q.field.data[grid.idx(i, j)]);
                }
            }
            m
        };
        let h_l2 = (state.h.values.iter().map(|v| v * v).sum::<f64>() * grid.d_theta()).sqrt();

        let record = DiagnosticsRecord {
            t,
            chi,
            e_beta: decay.e_beta,
            d_low: decay.d_low,
            e_trunc: pair.energy,
            d_trunc: pair.dissipation,
            q_l2: state.q.field.l2(),
            q_h4: sim.basis.sobolev_norm(&state.q.field, 4.0)?,
            h_mean: state.h.mean(),
            h_max: state.h.max_abs(),
            h_l2,
            min_dnqt,
            hopf_ratio,
            enthalpy: sim.enthalpy(state),
            min_q_interior,
            norm_table: decay.norm_table,
            q_t_coeffs,
            duhamel_n_coeffs: n_coeffs,
            nonlinear_forcing_inf: forcing_inf,
            oddson,
            chi_alarm,
            weight_skipped: pair.weight_skipped,
            history_incomplete: history_incomplete
                || decay.omitted_time_terms
                || pair.omitted_time_terms,
        };

        self.prev = Some(History {
            t,
            q_t,
            v: state.v.field.clone(),
            psi_t: state.gauge.psi_t.clone(),
            h_t,
            coeff_a: vc.a,
            coeff_b: vc.b,
        });
        Ok(record)
    }
}

/// χ from a one-sided boundary stencil of configurable width, for the
/// stencil-sensitivity report.
pub fn chi_stencil_sensitivity(
    sim: &Simulation,
    state: &SimState,
    widths: &[usize],
) -> Vec<(usize, f64)> {
    widths
        .iter()
        .map(|&w| {
            let flux = sim
                .ops
                .boundary_normal_derivative_width(&state.q.field, w);
            (w, flux.iter().fold(f64::INFINITY, |m, &f| m.min(-f)))
        })
        .collect()
}

/// Ratio ‖f‖₀² / ((∫ f φ₁ dx) ‖f‖₃) for strictly positive samples; the
/// first-mode mass controls the L² norm with a universal constant.
pub fn first_mode_mass_ratio(
    basis: &crate::eigen::EigenBasis,
    f: &ScalarField,
) -> Result<f64> {
    let coeffs = basis.project(f)?;
    let mass = coeffs[0];
    if mass <= 0.0 {
        return Err(crate::error::Error::DegenerateInput(
            "sample has nonpositive first-mode mass".into(),
        ));
    }
    let h3 = basis.sobolev_norm_of_coeffs(&coeffs, 3.0);
    let l2 = f.l2();
    Ok(l2 * l2 / (mass * h3))
}

/// Rayleigh quotient ‖Aᵀ∇f‖₀²/‖f‖₀² of the gauge-twisted gradient.
pub fn gauge_gradient_rayleigh(
    sim: &Simulation,
    gauge: &crate::gauge::GaugeState,
    f: &ScalarField,
) -> f64 {
    let grad = sim.ops.gradient(f);
    let grid = &sim.ops.grid;
    let mut twisted = ScalarField::zeros(grid.clone());
    for k in 0..grid.n_nodes() {
        let a = gauge.a.at(k);
        let gx = a[0][0] * grad.x[k] + a[1][0] * grad.y[k];
        let gy = a[0][1] * grad.x[k] + a[1][1] * grad.y[k];
        twisted.data[k] = gx * gx + gy * gy;
    }
    let denom = f.l2();
    twisted.integral() / (denom * denom)
}
