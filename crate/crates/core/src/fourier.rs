//! Angular Fourier transforms on equispaced θ rings.
//!
//! Coefficient convention: `forward` returns ĝ with ĝ[k] = (1/n) Σ_j g_j e^{-i k θ_j},
//! so that g_j = Σ_k ĝ[k] e^{i k θ_j} with the signed frequency of slot k being
//! k for k <= n/2 and k - n above.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Clone)]
pub struct ThetaFft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ThetaFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThetaFft").field("n", &self.n).finish()
    }
}

impl ThetaFft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Signed frequency of coefficient slot `k`.
    #[inline]
    pub fn frequency(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    pub fn forward(&self, ring: &[f64]) -> Vec<Complex<f64>> {
        debug_assert_eq!(ring.len(), self.n);
        let mut buf: Vec<Complex<f64>> = ring.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    pub fn inverse(&self, coeffs: &[Complex<f64>], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        for (o, c) in out.iter_mut().zip(&buf) {
            *o = c.re;
        }
    }

    /// Spectral d/dθ of one ring. The Nyquist mode derivative is set to zero,
    /// as usual for real data.
    pub fn derivative(&self, ring: &[f64], out: &mut [f64]) {
        let mut coeffs = self.forward(ring);
        let nyquist = self.n / 2;
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k == nyquist {
                *c = Complex::new(0.0, 0.0);
            } else {
                let f = self.frequency(k) as f64;
                *c *= Complex::new(0.0, f);
            }
        }
        self.inverse(&coeffs, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_exact_on_trig_modes() {
        let n = 32;
        let fft = ThetaFft::new(n);
        let ring: Vec<f64> = (0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                (3.0 * th).cos() + 0.5 * (7.0 * th).sin()
            })
            .collect();
        let mut d = vec![0.0; n];
        fft.derivative(&ring, &mut d);
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            let exact = -3.0 * (3.0 * th).sin() + 3.5 * (7.0 * th).cos();
            assert!((d[j] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let n = 16;
        let fft = ThetaFft::new(n);
        let ring: Vec<f64> = (0..n).map(|j| (j as f64).sin() + 0.1 * j as f64).collect();
        let coeffs = fft.forward(&ring);
        let mut back = vec![0.0; n];
        fft.inverse(&coeffs, &mut back);
        for (a, b) in ring.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
