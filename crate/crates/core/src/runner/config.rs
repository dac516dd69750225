//! Line-oriented `key = value` configuration with named presets.
//!
//! Comments start with `#`. A `preset = <name>` line (anywhere in the file)
//! loads the preset's defaults first; every other line then overrides
//! individual fields. Unknown keys, malformed lines, and out-of-range values
//! are rejected with the offending line number. The effective configuration
//! is echoed verbatim into each run directory so a run can be reproduced
//! from its artifacts alone.

use crate::error::{Error, Result};
use crate::solver::CompatibilityMode;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub preset: String,
    pub n_theta: usize,
    pub n_r: usize,
    pub n_modes: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    /// Amplitude ε multiplying the eigen-coefficients.
    pub epsilon: f64,
    /// q₀ eigen-coefficients keyed by 1-based basis index (`c1`, `c2`, …).
    pub coefficients: BTreeMap<usize, f64>,
    /// h₀ Fourier coefficients (`h0_cos0`, `h0_cos1`, …, `h0_sin1`, …).
    pub h0_cos: BTreeMap<usize, f64>,
    pub h0_sin: BTreeMap<usize, f64>,
    pub compatibility_mode: CompatibilityMode,
    pub frozen_gauge: bool,
    /// η = eta_factor · λ₁.
    pub eta_factor: f64,
    /// Transient-horizon constant C̄.
    pub c_bar: f64,
    /// Bootstrap constant C̃ (reported).
    pub c_tilde: f64,
    /// Generic constant C entering the smallness threshold formula.
    pub f_constant: f64,
    pub graph_floor: f64,
    pub jacobian_floor: f64,
    pub taylor_floor: f64,
    pub positivity_tol: f64,
    pub enthalpy_tol: f64,
    pub enforce_tol: f64,
    pub duhamel_tol: f64,
    pub cfl_boundary: f64,
    pub dt_cap: f64,
    pub max_tangential: usize,
    pub max_time: usize,
    /// Decay-fit window; `fit_end <= 0` means the end of the run.
    pub fit_start: f64,
    pub fit_end: f64,
    pub radial_enabled: bool,
    pub radial_n: usize,
    /// Radial oracle substeps per gauge step.
    pub radial_dt_factor: usize,
    pub barrier_enabled: bool,
    pub store_fields: bool,
    pub out_dir: String,
}

impl Default for SimConfig {
    fn default() -> Self {
        preset_config("frozen-heat").expect("default preset must exist")
    }
}

pub const PRESETS: [&str; 5] = [
    "frozen-heat",
    "stefan-small",
    "stefan-mixture",
    "radial-compare",
    "barrier-check",
];

fn base_config() -> SimConfig {
    SimConfig {
        preset: String::new(),
        n_theta: 64,
        n_r: 64,
        n_modes: 16,
        dt: 1e-4,
        t_end: 1.0,
        snapshot_stride: 100,
        epsilon: 1.0,
        coefficients: BTreeMap::from([(1, 1.0)]),
        h0_cos: BTreeMap::new(),
        h0_sin: BTreeMap::new(),
        compatibility_mode: CompatibilityMode::Report,
        frozen_gauge: true,
        eta_factor: 0.1,
        c_bar: 2.0,
        c_tilde: 10.0,
        f_constant: 1.0,
        graph_floor: 0.2,
        jacobian_floor: 0.2,
        taylor_floor: 0.5,
        positivity_tol: 1e-8,
        enthalpy_tol: 1e-4,
        enforce_tol: 1e-6,
        duhamel_tol: 1e-6,
        cfl_boundary: 0.5,
        dt_cap: 1e-3,
        max_tangential: 4,
        max_time: 1,
        fit_start: 0.1,
        fit_end: 0.0,
        radial_enabled: false,
        radial_n: 400,
        radial_dt_factor: 10,
        barrier_enabled: false,
        store_fields: false,
        out_dir: "out".into(),
    }
}

/// Named preset table; every acceptance scenario has one.
pub fn preset_config(name: &str) -> Option<SimConfig> {
    let mut cfg = base_config();
    cfg.preset = name.to_string();
    match name {
        "frozen-heat" => {
            cfg.frozen_gauge = true;
            cfg.fit_start = 0.0;
        }
        "stefan-small" => {
            cfg.frozen_gauge = false;
            cfg.epsilon = 0.05;
        }
        "stefan-mixture" => {
            cfg.frozen_gauge = true;
            cfg.epsilon = 0.05;
            cfg.coefficients = BTreeMap::from([(1, 1.0), (6, 0.8)]);
            cfg.dt = 1e-3;
            cfg.t_end = 14.0;
            cfg.snapshot_stride = 10;
            // the long mixture run records densely; order 2 keeps the
            // energy assembly affordable and is reported in the summary
            cfg.max_tangential = 2;
            cfg.fit_start = 1.0;
            cfg.fit_end = 3.0;
        }
        "radial-compare" => {
            cfg.frozen_gauge = false;
            cfg.epsilon = 0.05;
            cfg.t_end = 0.5;
            cfg.snapshot_stride = 50;
            cfg.radial_enabled = true;
        }
        "barrier-check" => {
            cfg.frozen_gauge = false;
            cfg.epsilon = 0.05;
            cfg.t_end = 0.05;
            cfg.snapshot_stride = 10;
            cfg.barrier_enabled = true;
        }
        _ => return None,
    }
    Some(cfg)
}

/// Parse config text. Defaults come from the `preset` key (or `frozen-heat`
/// when absent); explicit keys override preset values.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    // first pass: locate the preset
    let mut preset: Option<(usize, String)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = split_kv(line, lineno + 1)?;
        if key == "preset" {
            if preset.is_some() {
                return Err(Error::Config {
                    line: lineno + 1,
                    key: "preset".into(),
                    message: "preset may only be set once".into(),
                });
            }
            preset = Some((lineno + 1, value.to_string()));
        }
    }
    let mut cfg = match &preset {
        None => SimConfig::default(),
        Some((line, name)) => preset_config(name).ok_or_else(|| Error::Config {
            line: *line,
            key: "preset".into(),
            message: format!("unknown preset `{name}` (expected one of {PRESETS:?})"),
        })?,
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = split_kv(line, lineno + 1)?;
        if key == "preset" {
            continue;
        }
        apply_key(&mut cfg, key, value, lineno + 1)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn strip_comment(raw: &str) -> &str {
    let line = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    line.trim()
}

fn split_kv(line: &str, lineno: usize) -> Result<(&str, &str)> {
    let eq = line.find('=').ok_or_else(|| Error::Config {
        line: lineno,
        key: line.split_whitespace().next().unwrap_or("").into(),
        message: "expected `key = value`".into(),
    })?;
    Ok((line[..eq].trim(), line[eq + 1..].trim()))
}

fn apply_key(cfg: &mut SimConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let bad = |message: String| Error::Config {
        line,
        key: key.to_string(),
        message,
    };
    let parse_f64 = |v: &str| -> Result<f64> {
        v.parse::<f64>()
            .map_err(|_| bad(format!("`{v}` is not a number")))
    };
    let parse_usize = |v: &str| -> Result<usize> {
        v.parse::<usize>()
            .map_err(|_| bad(format!("`{v}` is not a nonnegative integer")))
    };
    let parse_bool = |v: &str| -> Result<bool> {
        match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(bad(format!("`{v}` is not true/false"))),
        }
    };

    if let Some(rest) = key.strip_prefix('c') {
        if let Ok(idx) = rest.parse::<usize>() {
            if idx == 0 {
                return Err(bad("mode indices start at 1".into()));
            }
            cfg.coefficients.insert(idx, parse_f64(value)?);
            return Ok(());
        }
    }
    if let Some(rest) = key.strip_prefix("h0_cos") {
        if let Ok(k) = rest.parse::<usize>() {
            cfg.h0_cos.insert(k, parse_f64(value)?);
            return Ok(());
        }
    }
    if let Some(rest) = key.strip_prefix("h0_sin") {
        if let Ok(k) = rest.parse::<usize>() {
            if k == 0 {
                return Err(bad("sine wavenumbers start at 1".into()));
            }
            cfg.h0_sin.insert(k, parse_f64(value)?);
            return Ok(());
        }
    }

    match key {
        "n_theta" => cfg.n_theta = parse_usize(value)?,
        "n_r" => cfg.n_r = parse_usize(value)?,
        "n_modes" => cfg.n_modes = parse_usize(value)?,
        "dt" => cfg.dt = parse_f64(value)?,
        "t_end" => cfg.t_end = parse_f64(value)?,
        "snapshot_stride" => cfg.snapshot_stride = parse_usize(value)?,
        "epsilon" => cfg.epsilon = parse_f64(value)?,
        "compatibility_mode" => {
            cfg.compatibility_mode = match value {
                "report" => CompatibilityMode::Report,
                "enforce_first_order" => CompatibilityMode::EnforceFirstOrder,
                _ => return Err(bad("expected report | enforce_first_order".into())),
            }
        }
        "frozen_gauge" => cfg.frozen_gauge = parse_bool(value)?,
        "eta_factor" => cfg.eta_factor = parse_f64(value)?,
        "c_bar" => cfg.c_bar = parse_f64(value)?,
        "c_tilde" => cfg.c_tilde = parse_f64(value)?,
        "f_constant" => cfg.f_constant = parse_f64(value)?,
        "graph_floor" => cfg.graph_floor = parse_f64(value)?,
        "jacobian_floor" => cfg.jacobian_floor = parse_f64(value)?,
        "taylor_floor" => cfg.taylor_floor = parse_f64(value)?,
        "positivity_tol" => cfg.positivity_tol = parse_f64(value)?,
        "enthalpy_tol" => cfg.enthalpy_tol = parse_f64(value)?,
        "enforce_tol" => cfg.enforce_tol = parse_f64(value)?,
        "duhamel_tol" => cfg.duhamel_tol = parse_f64(value)?,
        "cfl_boundary" => cfg.cfl_boundary = parse_f64(value)?,
        "dt_cap" => cfg.dt_cap = parse_f64(value)?,
        "max_tangential" => cfg.max_tangential = parse_usize(value)?,
        "max_time" => cfg.max_time = parse_usize(value)?,
        "fit_start" => cfg.fit_start = parse_f64(value)?,
        "fit_end" => cfg.fit_end = parse_f64(value)?,
        "radial_enabled" => cfg.radial_enabled = parse_bool(value)?,
        "radial_n" => cfg.radial_n = parse_usize(value)?,
        "radial_dt_factor" => cfg.radial_dt_factor = parse_usize(value)?,
        "barrier_enabled" => cfg.barrier_enabled = parse_bool(value)?,
        "store_fields" => cfg.store_fields = parse_bool(value)?,
        "out_dir" => cfg.out_dir = value.to_string(),
        _ => return Err(bad("unknown key".into())),
    }
    Ok(())
}

fn validate(cfg: &SimConfig) -> Result<()> {
    let range = |key: &str, ok: bool, message: String| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::Config {
                line: 0,
                key: key.into(),
                message,
            })
        }
    };
    range("dt", cfg.dt > 0.0, format!("dt must be positive, got {}", cfg.dt))?;
    range(
        "t_end",
        cfg.t_end > 0.0,
        format!("t_end must be positive, got {}", cfg.t_end),
    )?;
    range(
        "n_theta",
        cfg.n_theta >= 16 && cfg.n_theta % 2 == 0,
        "n_theta must be even and >= 16".into(),
    )?;
    range("n_r", cfg.n_r >= 8, "n_r must be >= 8".into())?;
    range(
        "n_modes",
        cfg.n_modes >= 1 && cfg.n_modes <= 128,
        "n_modes must lie in 1..=128".into(),
    )?;
    range(
        "epsilon",
        cfg.epsilon >= 0.0 && cfg.epsilon.is_finite(),
        "epsilon must be a finite nonnegative number".into(),
    )?;
    range(
        "eta_factor",
        cfg.eta_factor > 0.0 && cfg.eta_factor < 2.0,
        "eta_factor must lie in (0, 2)".into(),
    )?;
    range(
        "max_tangential",
        (2..=4).contains(&cfg.max_tangential),
        "max_tangential must lie in 2..=4".into(),
    )?;
    range("max_time", cfg.max_time <= 1, "max_time must be 0 or 1".into())?;
    range(
        "snapshot_stride",
        cfg.snapshot_stride >= 1,
        "snapshot_stride must be >= 1".into(),
    )?;
    range(
        "radial_n",
        cfg.radial_n >= 16,
        "radial_n must be >= 16".into(),
    )?;
    range(
        "radial_dt_factor",
        cfg.radial_dt_factor >= 1,
        "radial_dt_factor must be >= 1".into(),
    )?;
    range(
        "graph_floor",
        cfg.graph_floor > 0.0 && cfg.graph_floor < 1.0,
        "graph_floor must lie in (0, 1)".into(),
    )?;
    Ok(())
}

/// Every effective parameter in a fixed order: the reproducibility echo.
pub fn echo_config(cfg: &SimConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    kv("preset", cfg.preset.clone());
    kv("n_theta", cfg.n_theta.to_string());
    kv("n_r", cfg.n_r.to_string());
    kv("n_modes", cfg.n_modes.to_string());
    kv("dt", format!("{:e}", cfg.dt));
    kv("t_end", format!("{:e}", cfg.t_end));
    kv("snapshot_stride", cfg.snapshot_stride.to_string());
    kv("epsilon", format!("{:e}", cfg.epsilon));
    for (idx, c) in &cfg.coefficients {
        kv(&format!("c{idx}"), format!("{c:e}"));
    }
    for (k, c) in &cfg.h0_cos {
        kv(&format!("h0_cos{k}"), format!("{c:e}"));
    }
    for (k, c) in &cfg.h0_sin {
        kv(&format!("h0_sin{k}"), format!("{c:e}"));
    }
    kv(
        "compatibility_mode",
        match cfg.compatibility_mode {
            CompatibilityMode::Report => "report".into(),
            CompatibilityMode::EnforceFirstOrder => "enforce_first_order".into(),
        },
    );
    kv("frozen_gauge", cfg.frozen_gauge.to_string());
    kv("eta_factor", format!("{:e}", cfg.eta_factor));
    kv("c_bar", format!("{:e}", cfg.c_bar));
    kv("c_tilde", format!("{:e}", cfg.c_tilde));
    kv("f_constant", format!("{:e}", cfg.f_constant));
    kv("graph_floor", format!("{:e}", cfg.graph_floor));
    kv("jacobian_floor", format!("{:e}", cfg.jacobian_floor));
    kv("taylor_floor", format!("{:e}", cfg.taylor_floor));
    kv("positivity_tol", format!("{:e}", cfg.positivity_tol));
    kv("enthalpy_tol", format!("{:e}", cfg.enthalpy_tol));
    kv("enforce_tol", format!("{:e}", cfg.enforce_tol));
    kv("duhamel_tol", format!("{:e}", cfg.duhamel_tol));
    kv("cfl_boundary", format!("{:e}", cfg.cfl_boundary));
    kv("dt_cap", format!("{:e}", cfg.dt_cap));
    kv("max_tangential", cfg.max_tangential.to_string());
    kv("max_time", cfg.max_time.to_string());
    kv("fit_start", format!("{:e}", cfg.fit_start));
    kv("fit_end", format!("{:e}", cfg.fit_end));
    kv("radial_enabled", cfg.radial_enabled.to_string());
    kv("radial_n", cfg.radial_n.to_string());
    kv("radial_dt_factor", cfg.radial_dt_factor.to_string());
    kv("barrier_enabled", cfg.barrier_enabled.to_string());
    kv("store_fields", cfg.store_fields.to_string());
    kv("out_dir", cfg.out_dir.clone());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_frozen_heat_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.preset, "frozen-heat");
        assert!(cfg.frozen_gauge);
        assert_eq!(cfg.n_theta, 64);
        assert_eq!(cfg.coefficients.get(&1), Some(&1.0));
    }

    #[test]
    fn negative_dt_rejected_with_key() {
        let err = parse_config("dt = -0.1").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "dt"),
            other => panic!("wrong error {other}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = parse_config("n_theta = 64\nbogus_key = 3\n").unwrap_err();
        match err {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "bogus_key");
            }
            other => panic!("wrong error {other}"),
        }
    }

    #[test]
    fn preset_selects_radial_compare() {
        let cfg = parse_config("preset = radial-compare\n").unwrap();
        assert!(cfg.radial_enabled);
        assert!(!cfg.frozen_gauge);
        assert_eq!(cfg.t_end, 0.5);
        // symmetric initial data: just the ground mode
        assert_eq!(cfg.coefficients.len(), 1);
    }

    #[test]
    fn overrides_apply_after_preset() {
        let cfg = parse_config("n_r = 96\npreset = stefan-small\n# comment\nepsilon = 0.025\n")
            .unwrap();
        assert_eq!(cfg.preset, "stefan-small");
        assert_eq!(cfg.n_r, 96);
        assert_eq!(cfg.epsilon, 0.025);
    }

    #[test]
    fn coefficient_keys_parse() {
        let cfg = parse_config("c1 = 1.0\nc6 = 0.8\nh0_cos2 = 0.01\nh0_sin3 = -0.005\n").unwrap();
        assert_eq!(cfg.coefficients.get(&6), Some(&0.8));
        assert_eq!(cfg.h0_cos.get(&2), Some(&0.01));
        assert_eq!(cfg.h0_sin.get(&3), Some(&-0.005));
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse_config("preset = stefan-mixture\nepsilon = 0.07\n").unwrap();
        let echo = echo_config(&cfg);
        let back = parse_config(&echo).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn all_presets_resolve() {
        for name in PRESETS {
            assert!(preset_config(name).is_some(), "missing preset {name}");
        }
        assert!(preset_config("no-such").is_none());
    }
}
