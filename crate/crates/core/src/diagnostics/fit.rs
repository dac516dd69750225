//! Log-linear least-squares rate estimation.

use crate::error::{Error, Result};

/// Least-squares slope of ln(value) against t over `[t_a, t_b]`, sign
/// flipped so that decaying series report a positive rate.
pub fn fit_decay_exponent(series: &[(f64, f64)], t_a: f64, t_b: f64) -> Result<f64> {
    let window: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= t_a - 1e-12 && *t <= t_b + 1e-12)
        .cloned()
        .collect();
    if window.len() < 8 {
        return Err(Error::Domain(format!(
            "fit_decay_exponent needs at least 8 samples in the window, got {}",
            window.len()
        )));
    }
    if window.iter().any(|(_, v)| *v <= 0.0 || !v.is_finite()) {
        return Err(Error::Domain(
            "fit_decay_exponent requires strictly positive finite values".into(),
        ));
    }
    let n = window.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for (t, v) in &window {
        let y = v.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(Error::Numerical("degenerate time samples in fit".into()));
    }
    let slope = (n * sty - st * sy) / denom;
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_recovered() {
        let series: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (-3.0 * t).exp())
            })
            .collect();
        let rate = fit_decay_exponent(&series, 0.0, 1.0).unwrap();
        assert!((rate - 3.0).abs() < 1e-10);
    }

    #[test]
    fn scaled_exponential_recovered() {
        let lam = 5.78318596294678452;
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.005;
                (t, 5.0 * (-lam * t).exp())
            })
            .collect();
        let rate = fit_decay_exponent(&series, 0.0, 1.0).unwrap();
        assert!((rate - lam).abs() < 1e-10);
    }

    #[test]
    fn rejects_nonpositive_and_sparse_data() {
        let mut series: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 1.0)).collect();
        series[3].1 = -1.0;
        assert!(fit_decay_exponent(&series, 0.0, 20.0).is_err());
        let sparse: Vec<(f64, f64)> = (0..4).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_decay_exponent(&sparse, 0.0, 4.0).is_err());
    }
}
