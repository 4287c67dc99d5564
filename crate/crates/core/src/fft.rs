//! Centered 2-D discrete Fourier transform.
//!
//! Convention used throughout the crate:
//!
//! ```text
//! F(kx, ky) = sum_{row, col} I(row, col) * exp(-2 pi i (kx * x + ky * y))
//!     x = col - W/2,  y = row - H/2
//!     kx = (j - W/2) / W,  ky = (i - H/2) / H     (cycles per pixel)
//! ```
//!
//! The forward transform is unnormalized and the inverse carries the `1/(W H)`
//! factor, so `sum |F|^2 = W H sum |I|^2`. DC sits at grid index
//! `(H/2, W/2)`. All dimensions are even.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned centered FFT pair for one grid shape.
pub struct CenteredFft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl CenteredFft2 {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width % 2 == 0 && height % 2 == 0, "centered FFT needs even dimensions");
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut Vec<Complex64>) {
        self.transform(data, false);
    }

    /// Inverse transform including the `1/(W H)` normalization, in place.
    pub fn inverse(&self, data: &mut Vec<Complex64>) {
        self.transform(data, true);
        let scale = 1.0 / (self.width * self.height) as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Inverse transform without normalization, in place.
    pub fn inverse_unnormalized(&self, data: &mut Vec<Complex64>) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut Vec<Complex64>, inverse: bool) {
        let (w, h) = (self.width, self.height);
        assert_eq!(data.len(), w * h);
        let mut buf = half_shift(data, w, h);
        let (row, col) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        row.process(&mut buf);
        let mut column = vec![Complex64::default(); h];
        let mut scratch = vec![Complex64::default(); col.get_inplace_scratch_len()];
        for c in 0..w {
            for r in 0..h {
                column[r] = buf[r * w + c];
            }
            col.process_with_scratch(&mut column, &mut scratch);
            for r in 0..h {
                buf[r * w + c] = column[r];
            }
        }
        *data = half_shift(&buf, w, h);
    }
}

/// Circular shift by half the extent along both axes (`fftshift` and
/// `ifftshift` coincide for even sizes).
pub fn half_shift<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    let (hw, hh) = (width / 2, height / 2);
    for r in 0..height {
        let src_row = (r + hh) % height;
        let base = src_row * width;
        out.extend_from_slice(&data[base + hw..base + width]);
        out.extend_from_slice(&data[base..base + hw]);
    }
    out
}

/// Centered 1-D forward DFT of length `n` (even), unnormalized.
pub struct CenteredFft1 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
}

impl CenteredFft1 {
    pub fn new(n: usize) -> Self {
        assert!(n % 2 == 0);
        Self {
            n,
            fwd: FftPlanner::new().plan_fft_forward(n),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        data.rotate_left(self.n / 2);
        self.fwd.process(data);
        data.rotate_left(self.n / 2);
    }
}

pub fn real_to_complex(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
