//! Principal-value transforms on a uniform grid.
//!
//! For samples f_m = f(k_m) with spacing h, Maclaurin's rule
//!
//! ```text
//! PV ∫ f(k) / (k_j - k) dk  ≈  2 Σ_{j-m odd} f_m / (j - m)
//! ```
//!
//! is spectrally accurate for smooth f. The sum is a discrete convolution, evaluated by FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct HilbertPlan {
    n: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel: Vec<Complex64>,
}

impl HilbertPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let size = (3 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        // Kernel index q holds offset q - (n - 1).
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for (q, slot) in kernel.iter_mut().enumerate().take(2 * n - 1) {
            let off = q as i64 - (n as i64 - 1);
            if off % 2 != 0 {
                *slot = Complex64::new(2.0 / off as f64, 0.0);
            }
        }
        forward.process(&mut kernel);
        HilbertPlan { n, size, forward, inverse, kernel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// PV ∫ f(k) / (k_j - k) dk at every grid point.
    pub fn principal_value(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.n);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        buf[..self.n].copy_from_slice(f);
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf[self.n - 1..2 * self.n - 1].iter().map(|v| v * scale).collect()
    }

    /// ∫ f(k) / (k_j - k + i0) dk = PV - i pi f(k_j).
    pub fn retarded(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.principal_value(f);
        for (o, v) in out.iter_mut().zip(f) {
            *o -= Complex64::new(0.0, PI) * v;
        }
        out
    }
}
