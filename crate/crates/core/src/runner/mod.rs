//! Experiment orchestration: build a simulation from a [`SimConfig`], run
//! it (plus the radial oracle and barrier analysis when enabled), derive the
//! summary quantities, and persist all artifacts to the run directory.

mod config;
mod output;

pub use config::{echo_config, parse_config, preset_config, SimConfig, PRESETS};
pub use output::{
    decode_snapshot, encode_snapshot, read_snapshot_file, timeseries_csv, write_snapshot_file,
    Summary, CSV_HEADER,
};

use crate::diagnostics::{
    self, duhamel_split, oddson_rate, select_kappa2, taylor_sign_monitor, x_positivity_margin,
    BarrierParams, DiagnosticsParams,
};
use crate::eigen::EigenBasis;
use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::operators::DiskOps;
use crate::radial::{cross_compare, solve_radial};
use crate::solver::{
    run_simulation, InitialSpec, RunOutput, RunParams, RunStatus, Simulation, SolverConfig,
};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub status: RunStatus,
    pub checks_passed: bool,
    pub summary: Summary,
}

pub fn simulation_from_config(cfg: &SimConfig) -> Result<Simulation> {
    let grid = DiskGrid::graded(cfg.n_theta, cfg.n_r)?;
    let ops = Arc::new(DiskOps::new(grid.clone()));
    let basis = Arc::new(EigenBasis::dirichlet(cfg.n_modes, grid)?);
    Simulation::new(
        ops,
        basis,
        SolverConfig {
            frozen_gauge: cfg.frozen_gauge,
            graph_floor: cfg.graph_floor,
            jacobian_floor: cfg.jacobian_floor,
            taylor_floor: cfg.taylor_floor,
            positivity_tol: cfg.positivity_tol,
            enforce_tol: cfg.enforce_tol,
            cfl_boundary: cfg.cfl_boundary,
            dt_cap: cfg.dt_cap,
        },
    )
}

pub fn initial_spec_from_config(cfg: &SimConfig) -> InitialSpec {
    let max_cos = cfg.h0_cos.keys().max().copied().unwrap_or(0);
    let mut h0_cos = vec![0.0; max_cos + 1];
    for (k, c) in &cfg.h0_cos {
        h0_cos[*k] = *c;
    }
    if cfg.h0_cos.is_empty() {
        h0_cos.clear();
    }
    let max_sin = cfg.h0_sin.keys().max().copied().unwrap_or(0);
    let mut h0_sin = vec![0.0; max_sin];
    for (k, c) in &cfg.h0_sin {
        h0_sin[*k - 1] = *c;
    }
    InitialSpec {
        coefficients: cfg.coefficients.clone(),
        amplitude: cfg.epsilon,
        h0_cos,
        h0_sin,
        compatibility_mode: cfg.compatibility_mode,
    }
}

pub fn diagnostics_params_from_config(cfg: &SimConfig, lambda1: f64) -> DiagnosticsParams {
    DiagnosticsParams {
        eta: cfg.eta_factor * lambda1,
        c_bar: cfg.c_bar,
        max_tangential: cfg.max_tangential,
        max_time: cfg.max_time,
    }
}

/// Execute the configured run and write `config.echo`, `timeseries.csv`,
/// `summary.txt`, and optional binary snapshots under the output directory.
/// Deterministic: identical configs produce byte-identical CSV output.
pub fn run_experiment(cfg: &SimConfig) -> Result<ExperimentReport> {
    let sim = simulation_from_config(cfg)?;
    let spec = initial_spec_from_config(cfg);
    let diag = diagnostics_params_from_config(cfg, sim.basis.lambda1());
    let params = RunParams {
        dt: cfg.dt,
        t_end: cfg.t_end,
        stride: cfg.snapshot_stride,
    };
    let out = run_simulation(&sim, &spec, &params, diag)?;
    let summary = summarize(cfg, &sim, &out, diag)?;

    let out_dir = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("config.echo"), echo_config(cfg))?;
    std::fs::write(out_dir.join("timeseries.csv"), timeseries_csv(&out.records))?;
    std::fs::write(out_dir.join("summary.txt"), summary.render())?;
    if cfg.store_fields {
        let dir = out_dir.join("snapshots");
        std::fs::create_dir_all(&dir)?;
        for (i, snap) in out.snapshots.iter().enumerate() {
            write_snapshot_file(
                &dir.join(format!("q_{i:06}.bin")),
                snap.t,
                snap.q.grid.n_r,
                snap.q.grid.n_theta,
                &snap.q.data,
            )?;
            write_snapshot_file(
                &dir.join(format!("h_{i:06}.bin")),
                snap.t,
                1,
                snap.h.values.len(),
                &snap.h.values,
            )?;
        }
    }
    if let RunStatus::Failed { .. } = &out.status {
        let st = &out.final_state;
        write_snapshot_file(
            &out_dir.join("failure_q.bin"),
            st.t,
            st.q.field.grid.n_r,
            st.q.field.grid.n_theta,
            &st.q.field.data,
        )?;
    }

    Ok(ExperimentReport {
        out_dir,
        status: out.status.clone(),
        checks_passed: summary.all_checks_pass() && out.completed(),
        summary,
    })
}

fn summarize(
    cfg: &SimConfig,
    sim: &Simulation,
    out: &RunOutput,
    diag: DiagnosticsParams,
) -> Result<Summary> {
    let mut s = Summary::default();
    let lambda1 = sim.basis.lambda1();
    let eta = diag.eta;

    s.push("preset", &cfg.preset);
    s.push(
        "status",
        match &out.status {
            RunStatus::Completed => "completed".to_string(),
            RunStatus::Failed { at_t, message } => format!("failed at t = {at_t}: {message}"),
        },
    );
    s.push_float("lambda1", lambda1);
    s.push_float("eta", eta);
    s.push_float("beta", 2.0 * lambda1 - eta);
    s.push("n_records", out.records.len());
    s.push("diagnostics_order_tangential", diag.max_tangential);
    s.push("diagnostics_order_time", diag.max_time);

    // initial-data report
    s.push_float("chi0", out.init.chi0);
    s.push_float("c1", out.init.c1);
    s.push_float("taylor_ratio", out.init.taylor_ratio);
    s.push_float("positivity_margin", out.init.positivity_margin);
    s.push_float("compat_r1_max", out.init.compat.r1_max);
    s.push_float("compat_r2_max", out.init.compat.r2_max);
    s.push("compat_enforced", out.init.enforced_first_order);

    // K and the smallness threshold F(K) under the configured constants
    let k_ratio = out.init.ratio_k;
    s.push_float("ratio_k", k_ratio);
    let ln_k = k_ratio.max(1.0 + 1e-15).ln();
    let ln_f1 = 8.0_f64.ln() + 2.0 * cfg.f_constant * cfg.c_bar * k_ratio * k_ratio * ln_k;
    let ln_f2 = 10.0 * cfg.c_bar.ln() + 10.0 * ln_k.max(1e-300).ln() + 20.0 * cfg.c_bar * lambda1 * ln_k;
    let ln_f = ln_f1.max(ln_f2);
    s.push_float("ln_f_k", ln_f);
    s.push(
        "f_k",
        if ln_f < 700.0 {
            format!("{:.16e}", ln_f.exp())
        } else {
            "inf".to_string()
        },
    );
    s.push_float("c_tilde", cfg.c_tilde);

    // decay fits
    let fit_end = if cfg.fit_end > 0.0 { cfg.fit_end } else { cfg.t_end };
    let q_sq = out.series(|r| r.q_l2 * r.q_l2);
    match diagnostics::fit_decay_exponent(&q_sq, cfg.fit_start, fit_end) {
        Ok(rate) => {
            s.push_float("fitted_exponent_q_l2_sq", rate);
            s.push_float("expected_exponent_2lambda1", 2.0 * lambda1);
        }
        Err(e) => s.push("fitted_exponent_q_l2_sq", format!("unavailable: {e}")),
    }
    let chi_positive = out.records.iter().all(|r| r.chi > 0.0);
    s.push("chi_positive", chi_positive);
    if chi_positive {
        let chi_series = out.series(|r| r.chi);
        if let Ok(rate) = diagnostics::fit_decay_exponent(&chi_series, cfg.fit_start, fit_end) {
            s.push_float("fitted_exponent_chi", rate);
            s.push_float("expected_exponent_lambda1", lambda1);
        }
    }
    // Hopf lower envelope: min over sampled t of e^{(λ₁+η/2)t} χ(t)
    if chi_positive {
        let envelope: Vec<f64> = out
            .records
            .iter()
            .map(|r| ((lambda1 + 0.5 * eta) * r.t).exp() * r.chi)
            .collect();
        let min_env = envelope.iter().cloned().fold(f64::INFINITY, f64::min);
        s.push_float("hopf_envelope_min", min_env);
        if let Some(r) = out.records.iter().find(|r| r.t >= 0.1) {
            let reference = ((lambda1 + 0.5 * eta) * r.t).exp() * r.chi;
            s.push_float("hopf_envelope_at_0.1", reference);
        }
    }

    // sign monitor
    let sign_series: Vec<(f64, f64, f64)> = out
        .records
        .iter()
        .map(|r| (r.t, r.min_dnqt, r.hopf_ratio))
        .collect();
    let taylor = taylor_sign_monitor(&sign_series, k_ratio, cfg.c_bar, eta);
    match taylor.t_star {
        Some(t) => s.push_float("sign_flip_time", t),
        None => s.push("sign_flip_time", "none"),
    }
    s.push_float("t_k", taylor.t_k);
    s.push("sign_persistent", taylor.persistent);
    s.push_float("hopf_envelope_c", taylor.hopf_envelope_c);
    s.push_float("min_dnqt_initial", taylor.initial_min);
    s.push_float("min_dnqt_final", taylor.final_min);

    // enthalpy (a coupled-system invariant; the frozen gauge does not move
    // the boundary, so no conservation is claimed there)
    let drift = out.enthalpy_drift();
    s.push_float("enthalpy_drift", drift);

    // boundary settling
    s.push_float("min_step_height_increment", out.min_step_height_increment);
    let h_max_final = out.records.last().map(|r| r.h_max).unwrap_or(0.0);
    s.push_float("h_max_final", h_max_final);
    s.push_float(
        "settling_constant_sqrt_eps",
        if cfg.epsilon > 0.0 {
            h_max_final / cfg.epsilon.sqrt()
        } else {
            0.0
        },
    );

    // Duhamel reconstruction over all sampled times
    let history: Vec<(f64, Vec<f64>)> = out
        .records
        .iter()
        .map(|r| (r.t, r.duhamel_n_coeffs.clone()))
        .collect();
    let mut max_rec_err = 0.0_f64;
    for r in &out.records {
        let split = duhamel_split(&sim.basis, &out.initial_coeffs, &out.y0_coeffs, &history, r.t)?;
        max_rec_err = max_rec_err.max(split.reconstruction_error(&r.q_t_coeffs));
    }
    s.push_float("duhamel_max_reconstruction_err", max_rec_err);
    // eigen-series positivity bound after the transient horizon
    let samples_after: Vec<f64> = out
        .records
        .iter()
        .filter(|r| r.t >= taylor.t_k)
        .map(|r| r.t)
        .collect();
    if samples_after.is_empty() {
        s.push("x_positivity_after_t_k", "not reached");
    } else {
        let mut min_margin = f64::INFINITY;
        for t in &samples_after {
            min_margin = min_margin.min(x_positivity_margin(&sim.basis, &out.initial_coeffs, *t));
        }
        s.push_float("x_positivity_margin_min", min_margin);
        s.check("x_positivity", min_margin >= 0.0);
    }

    // comparison-rate calculator over the run window
    let odd_samples: Vec<_> = out.records.iter().map(|r| r.oddson).collect();
    match oddson_rate(&odd_samples) {
        Ok(rate) => {
            s.push_float("oddson_alpha", rate.alpha);
            s.push_float("oddson_k0", rate.k0);
            s.push_float("oddson_beta_drift", rate.beta_drift);
            s.push_float("oddson_mu", rate.mu);
            s.push_float("oddson_lambda", rate.lambda);
            s.push_float("oddson_lambda_gap", (rate.lambda - lambda1).abs());
        }
        Err(e) => s.push("oddson_rate", format!("unavailable: {e}")),
    }

    // stencil-width sensitivity of χ on the final state
    for (w, chi) in diagnostics::chi_stencil_sensitivity(sim, &out.final_state, &[3, 4, 5, 6]) {
        s.push_float(&format!("chi_final_stencil_w{w}"), chi);
    }

    // radial oracle cross-validation
    if cfg.radial_enabled {
        let radial = run_radial_oracle(cfg, sim, out)?;
        s.push_float("radial_enthalpy_drift", radial.0);
        s.push_float("max_radius_diff", radial.1);
        s.push_float("max_profile_diff", radial.2);
        s.check("radial_compare", radial.1 <= 1e-3);
    }

    // barrier analysis
    if cfg.barrier_enabled {
        let (kappa2, c1_margin) = select_kappa2(&sim.basis)?;
        s.push_float("barrier_kappa2", kappa2);
        s.push_float("barrier_c1", c1_margin);
        // C₂ from the measured quadratic forcing against the barrier rate
        let c1_coeff = out.init.c1.max(1e-300);
        let mut c2 = 0.0_f64;
        for r in out.records.iter().skip(1) {
            let bound = c1_coeff * cfg.epsilon.max(1e-300) * (-1.5 * lambda1 * r.t).exp();
            c2 = c2.max(r.nonlinear_forcing_inf / bound);
        }
        s.push_float("barrier_c2", c2);
        let kappa1 = (c2 / c1_margin).max(1e-12) * c1_coeff * cfg.epsilon.max(1e-300);
        s.push_float("barrier_kappa1", kappa1);
        let params = BarrierParams { kappa1, kappa2 };
        let vc = sim.variable_coefficients(&out.final_state.gauge);
        let t_final = out.final_state.t;
        let (_, max_res) = diagnostics::barrier_residual(&params, &vc, &sim.basis, t_final)?;
        s.push_float("barrier_max_residual_measured", max_res);
        let target = -c1_margin * kappa1 * (-1.5 * lambda1 * t_final).exp();
        s.push_float("barrier_residual_target", target);
        s.check("barrier_negative", max_res < 0.0);
    }

    // invariant checks
    s.check("completed", out.completed());
    if !cfg.frozen_gauge {
        s.check("enthalpy", drift <= cfg.enthalpy_tol);
        s.check(
            "height_monotone",
            !out.min_step_height_increment.is_finite() || out.min_step_height_increment >= -1e-8,
        );
        let min_q = out
            .records
            .iter()
            .map(|r| r.min_q_interior)
            .fold(f64::INFINITY, f64::min);
        s.push_float("min_q_interior", min_q);
        s.check("positivity", min_q >= -cfg.positivity_tol);
        s.check("chi_positive", chi_positive);
    } else {
        s.check("duhamel", max_rec_err <= cfg.duhamel_tol);
    }

    Ok(s)
}

/// Run the front-fixing oracle on the same initial data and compare.
fn run_radial_oracle(
    cfg: &SimConfig,
    sim: &Simulation,
    out: &RunOutput,
) -> Result<(f64, f64, f64)> {
    // radially symmetric data only: every excited mode must have m = 0
    for (idx, c) in &cfg.coefficients {
        if *c != 0.0 && sim.basis.modes[idx - 1].angular_index != 0 {
            return Err(Error::Precondition(
                "radial comparison requires radially symmetric initial data (m = 0 modes)".into(),
            ));
        }
    }
    if !cfg.h0_cos.is_empty() || !cfg.h0_sin.is_empty() {
        return Err(Error::Precondition(
            "radial comparison requires h₀ = 0".into(),
        ));
    }
    let n = cfg.radial_n;
    let mut p0 = vec![0.0; n + 1];
    for (i, p) in p0.iter_mut().enumerate() {
        let sc = i as f64 / n as f64;
        let mut acc = 0.0;
        for (idx, c) in &cfg.coefficients {
            acc += c * sim.basis.modes[idx - 1].radial(sc);
        }
        *p = cfg.epsilon * acc;
    }
    let radial_dt = cfg.dt / cfg.radial_dt_factor as f64;
    let stride = cfg.snapshot_stride * cfg.radial_dt_factor;
    let run = solve_radial(&p0, 1.0, radial_dt, cfg.t_end, stride)?;
    let report = cross_compare(&out.snapshots, &run.states, 1e-8)?;
    Ok((
        run.max_enthalpy_drift,
        report.max_radius_diff,
        report.max_profile_diff,
    ))
}

/// Fast invariant suite behind the `check` CLI subcommand.
pub fn quick_check() -> Vec<(String, bool)> {
    let mut results = Vec::new();
    let mut push = |name: &str, pass: bool| results.push((name.to_string(), pass));

    // Bessel zero residuals
    let zero_ok = (|| -> Result<bool> {
        for m in 0..=4 {
            for k in 1..=3 {
                let z = crate::bessel::bessel_zero(m as f64, k)?;
                if crate::bessel::bessel_j(m as f64, z)?.abs() > 1e-10 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })()
    .unwrap_or(false);
    push("bessel_zero_residuals", zero_ok);

    // eigenbasis orthonormality on a Gauss grid
    let gram_ok = (|| -> Result<bool> {
        let grid = DiskGrid::gauss_legendre(32, 24)?;
        let basis = EigenBasis::dirichlet(8, grid)?;
        let g = basis.gram(8);
        for a in 0..8 {
            for b in 0..8 {
                let expect = if a == b { 1.0 } else { 0.0 };
                if (g[a][b] - expect).abs() > 1e-6 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })()
    .unwrap_or(false);
    push("eigenbasis_orthonormal", gram_ok);

    // harmonic extension closed form
    let gauge_ok = (|| -> Result<bool> {
        let grid = DiskGrid::graded(32, 32)?;
        let ops = DiskOps::new(grid.clone());
        let h = crate::field::HeightField::from_fn(32, |th| 0.02 * (3.0 * th).cos());
        let g = crate::gauge::build_gauge(&h, &ops)?;
        let mut max_err = 0.0_f64;
        for i in 0..grid.n_r {
            let r = grid.r[i];
            for j in 0..grid.n_theta {
                let th = grid.theta[j];
                let ex = r * th.cos()
                    + 0.01 * (r.powi(4) * (4.0 * th).cos() + r * r * (2.0 * th).cos());
                max_err = max_err.max((g.psi.x[grid.idx(i, j)] - ex).abs());
            }
        }
        Ok(max_err < 1e-10)
    })()
    .unwrap_or(false);
    push("harmonic_extension_exact", gauge_ok);

    // frozen-gauge decay over a short run
    let decay_ok = (|| -> Result<bool> {
        let mut cfg = preset_config("frozen-heat").unwrap();
        cfg.t_end = 0.2;
        cfg.dt = 1e-3;
        cfg.snapshot_stride = 20;
        cfg.n_theta = 32;
        cfg.n_r = 32;
        cfg.n_modes = 4;
        let sim = simulation_from_config(&cfg)?;
        let diag = diagnostics_params_from_config(&cfg, sim.basis.lambda1());
        let out = run_simulation(
            &sim,
            &initial_spec_from_config(&cfg),
            &RunParams {
                dt: cfg.dt,
                t_end: cfg.t_end,
                stride: cfg.snapshot_stride,
            },
            diag,
        )?;
        let q0 = out.records[0].q_l2;
        let q1 = out.records.last().unwrap().q_l2;
        let expect = (-sim.basis.lambda1() * 0.2).exp();
        Ok((q1 / q0 - expect).abs() < 0.01 * expect)
    })()
    .unwrap_or(false);
    push("frozen_gauge_decay", decay_ok);

    // radial oracle equilibrium
    let radial_ok = (|| -> Result<bool> {
        let p0 = vec![0.0; 64];
        let run = solve_radial(&p0, 1.0, 1e-3, 0.02, 10)?;
        Ok(run.states.iter().all(|st| st.front_radius == 1.0))
    })()
    .unwrap_or(false);
    push("radial_equilibrium", radial_ok);

    // snapshot format round trip
    let snap_ok = {
        let data: Vec<f64> = (0..12).map(|i| i as f64 * 0.25).collect();
        let bytes = encode_snapshot(0.5, 3, 4, &data);
        matches!(decode_snapshot(&bytes), Ok((t, 3, 4, d)) if t == 0.5 && d == data)
    };
    push("snapshot_round_trip", snap_ok);

    results
}

/// Output directory resolution: explicit override beats config.
pub fn resolve_out_dir(cfg: &mut SimConfig, cli_out: Option<&str>, env_out: Option<&str>) {
    if let Some(dir) = cli_out {
        cfg.out_dir = dir.to_string();
    } else if let Some(dir) = env_out {
        cfg.out_dir = Path::new(dir)
            .join(&cfg.out_dir)
            .to_string_lossy()
            .into_owned();
    }
}
