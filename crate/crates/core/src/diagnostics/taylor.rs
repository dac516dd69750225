//! Sign monitoring of ∂_N q_t along the boundary: first persistent
//! positivity time t*, comparison against the transient horizon T_K, and the
//! growth envelope of the flux ratio |∂_N q_t / ∂_N q|.

#[derive(Debug, Clone)]
pub struct TaylorSignReport {
    /// First time the boundary minimum of ∂_N q_t crosses into positivity
    /// and stays positive for the rest of the run (linear interpolation at
    /// the crossing); None if it never does.
    pub t_star: Option<f64>,
    /// Transient horizon C̄ ln K.
    pub t_k: f64,
    /// Whether positivity, once attained, persisted to the end of the run.
    pub persistent: bool,
    /// Fitted constant C with hopf_ratio(t) <= C K² e^{ηt} over the run.
    pub hopf_envelope_c: f64,
    /// min_Γ ∂_N q_t at the first and last samples.
    pub initial_min: f64,
    pub final_min: f64,
}

/// Scan a series of (t, min_Γ ∂_N q_t, hopf_ratio) samples.
pub fn taylor_sign_monitor(
    samples: &[(f64, f64, f64)],
    ratio_k: f64,
    c_bar: f64,
    eta: f64,
) -> TaylorSignReport {
    let t_k = c_bar * ratio_k.max(1.0 + 1e-15).ln();
    if samples.is_empty() {
        return TaylorSignReport {
            t_star: None,
            t_k,
            persistent: false,
            hopf_envelope_c: 0.0,
            initial_min: f64::NAN,
            final_min: f64::NAN,
        };
    }
    // last index where the sign is nonpositive
    let mut last_nonpositive: Option<usize> = None;
    for (i, (_, m, _)) in samples.iter().enumerate() {
        if *m <= 0.0 {
            last_nonpositive = Some(i);
        }
    }
    let t_star = match last_nonpositive {
        None => Some(samples[0].0),
        Some(i) if i + 1 < samples.len() => {
            let (t0, m0, _) = samples[i];
            let (t1, m1, _) = samples[i + 1];
            Some(if m1 > m0 {
                t0 + (t1 - t0) * (-m0) / (m1 - m0)
            } else {
                t1
            })
        }
        Some(_) => None, // still nonpositive at the end
    };
    let persistent = t_star.is_some();

    let mut env_c = 0.0_f64;
    for (t, _, ratio) in samples {
        if ratio.is_finite() {
            env_c = env_c.max(ratio / (ratio_k * ratio_k * (eta * t).exp()));
        }
    }

    TaylorSignReport {
        t_star,
        t_k,
        persistent,
        hopf_envelope_c: env_c,
        initial_min: samples[0].1,
        final_min: samples[samples.len() - 1].1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_mode_is_positive_from_the_start() {
        // ∂_N q_t = −λ₁ ∂_N q > 0 for all t when q = e^{−λ₁ t} φ₁
        let samples: Vec<(f64, f64, f64)> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.02;
                (t, 5.783 * 1.3568 * (-5.783 * t).exp(), 5.783)
            })
            .collect();
        let rep = taylor_sign_monitor(&samples, 46.0, 2.0, 0.578);
        assert_eq!(rep.t_star, Some(0.0));
        assert!(rep.persistent);
        assert!(rep.final_min > 0.0);
    }

    #[test]
    fn two_mode_crossing_detected_and_interpolated() {
        // g(t) = a e^{−λ₁ t} − b e^{−λ₂ t} crosses upward at
        // t* = ln(b/a)/(λ₂ − λ₁)
        let (a, b) = (13.908_f64, 134.573_f64);
        let (l1, l2) = (5.78318596294678452, 30.4712623436620864);
        let t_star_exact = (b / a).ln() / (l2 - l1);
        let samples: Vec<(f64, f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.005;
                let m = a * (-l1 * t).exp() - b * (-l2 * t).exp();
                (t, m, 1.0)
            })
            .collect();
        let rep = taylor_sign_monitor(&samples, 619.8, 2.0, 0.578);
        let t_star = rep.t_star.expect("crossing must be detected");
        assert!(
            (t_star - t_star_exact).abs() < 0.01 * t_star_exact,
            "t* = {t_star} vs {t_star_exact}"
        );
        assert!(rep.persistent);
        assert!(rep.initial_min < 0.0);
        assert!((rep.t_k - 2.0 * 619.8_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn no_crossing_reported_when_sign_stays_negative() {
        let samples: Vec<(f64, f64, f64)> =
            (0..20).map(|i| (i as f64 * 0.1, -1.0, 1.0)).collect();
        let rep = taylor_sign_monitor(&samples, 46.0, 2.0, 0.578);
        assert!(rep.t_star.is_none());
        assert!(!rep.persistent);
    }
}
