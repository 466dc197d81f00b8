//! Small 2-D FFT engine on top of rustfft.
//!
//! Plans are built once per image shape and shared; `forward` is the
//! unnormalized DFT and `inverse_real` folds in the `1/P` factor, so
//! `inverse_real(forward(x)) == x` up to rounding.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Fourier {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fourier {
    pub fn new(height: usize, width: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            height,
            width,
            row_fwd: planner.plan_fft_forward(width),
            col_fwd: planner.plan_fft_forward(height),
            row_inv: planner.plan_fft_inverse(width),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    fn transform(&self, buf: &mut [Complex<f64>], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        for r in buf.chunks_exact_mut(self.width) {
            row.process(r);
        }
        let mut column = vec![Complex::default(); self.height];
        for c in 0..self.width {
            for r in 0..self.height {
                column[r] = buf[r * self.width + c];
            }
            col.process(&mut column);
            for r in 0..self.height {
                buf[r * self.width + c] = column[r];
            }
        }
    }

    /// Unnormalized 2-D DFT of a real row-major image.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex<f64>> {
        debug_assert_eq!(real.len(), self.len());
        let mut buf: Vec<Complex<f64>> = real.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.row_fwd, &self.col_fwd);
        buf
    }

    /// Inverse 2-D DFT, normalized by `1/P`, real part only. The inputs
    /// this crate produces are Hermitian-symmetric, so the imaginary
    /// part is rounding noise.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.len());
        self.transform(&mut spectrum, &self.row_inv, &self.col_inv);
        let scale = 1.0 / self.len() as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }
}
