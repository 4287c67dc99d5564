//! Non-uniform Fourier transforms by oversampled-grid interpolation.

use num_complex::Complex64;

use crate::fft::CenteredFft2;

use super::kernel::Kernel;

/// Type-2 (image to arbitrary k) and adjoint transforms for one image shape.
///
/// The forward direction approximates
/// `F(k) = sum I(row, col) exp(-2 pi i (kx x + ky y))` and the adjoint
/// computes `a(x, y) = sum_s v_s exp(+2 pi i (kx_s x + ky_s y))`, both with
/// the centered pixel coordinates of [`crate::fft`].
pub struct Nufft {
    width: usize,
    height: usize,
    grid_width: usize,
    grid_height: usize,
    kernel: Kernel,
    deapod_x: Vec<f64>,
    deapod_y: Vec<f64>,
    fft: CenteredFft2,
}

fn grid_size(n: usize, oversampling: f64) -> usize {
    let g = (n as f64 * oversampling).round() as usize;
    (g + g % 2).max(n)
}

impl Nufft {
    pub fn new(width: usize, height: usize, oversampling: f64, kernel: Kernel) -> Self {
        let grid_width = grid_size(width, oversampling);
        let grid_height = grid_size(height, oversampling);
        let deapod = |n: usize, g: usize| -> Vec<f64> {
            (0..n)
                .map(|i| kernel.fourier((i as f64 - (n / 2) as f64) / g as f64))
                .collect()
        };
        Self {
            width,
            height,
            grid_width,
            grid_height,
            kernel,
            deapod_x: deapod(width, grid_width),
            deapod_y: deapod(height, grid_height),
            fft: CenteredFft2::new(grid_width, grid_height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Oversampled spectrum of the deapodized, zero-padded image; feed it to
    /// [`Nufft::interpolate`] for any number of coordinate sets.
    pub fn spectrum(&self, pixels: &[f64]) -> Vec<Complex64> {
        assert_eq!(pixels.len(), self.width * self.height);
        let (gw, gh) = (self.grid_width, self.grid_height);
        let (ox, oy) = ((gw - self.width) / 2, (gh - self.height) / 2);
        let mut grid = vec![Complex64::default(); gw * gh];
        for r in 0..self.height {
            for c in 0..self.width {
                let v = pixels[r * self.width + c] / (self.deapod_y[r] * self.deapod_x[c]);
                grid[(r + oy) * gw + c + ox] = Complex64::new(v, 0.0);
            }
        }
        self.fft.forward(&mut grid);
        grid
    }

    pub fn interpolate(&self, spectrum: &[Complex64], coords: &[[f64; 2]]) -> Vec<Complex64> {
        let (gw, gh) = (self.grid_width as i64, self.grid_height as i64);
        let width = self.kernel.width();
        let mut wx = vec![0.0; width];
        let mut wy = vec![0.0; width];
        coords
            .iter()
            .map(|k| {
                let fx = self.kernel.taps(k[0] * gw as f64 + (gw / 2) as f64, &mut wx);
                let fy = self.kernel.taps(k[1] * gh as f64 + (gh / 2) as f64, &mut wy);
                let mut acc = Complex64::default();
                for (a, &wya) in wy.iter().enumerate() {
                    let row = (fy + a as i64).rem_euclid(gh) as usize * gw as usize;
                    let mut line = Complex64::default();
                    for (b, &wxb) in wx.iter().enumerate() {
                        line += spectrum[row + (fx + b as i64).rem_euclid(gw) as usize] * wxb;
                    }
                    acc += line * wya;
                }
                acc
            })
            .collect()
    }

    pub fn forward(&self, pixels: &[f64], coords: &[[f64; 2]]) -> Vec<Complex64> {
        self.interpolate(&self.spectrum(pixels), coords)
    }

    /// Spreads `values` onto the oversampled grid, transforms back, crops and
    /// deapodizes. The result is unnormalized (no `1/(W H)`).
    pub fn adjoint(&self, coords: &[[f64; 2]], values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coords.len(), values.len());
        let mut grid = self.spread(coords, values);
        self.fft.inverse_unnormalized(&mut grid);
        let (gw, gh) = (self.grid_width, self.grid_height);
        let (ox, oy) = ((gw - self.width) / 2, (gh - self.height) / 2);
        let mut out = Vec::with_capacity(self.width * self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                out.push(grid[(r + oy) * gw + c + ox] / (self.deapod_y[r] * self.deapod_x[c]));
            }
        }
        out
    }

    fn spread(&self, coords: &[[f64; 2]], values: &[Complex64]) -> Vec<Complex64> {
        let (gw, gh) = (self.grid_width as i64, self.grid_height as i64);
        let width = self.kernel.width();
        let mut wx = vec![0.0; width];
        let mut wy = vec![0.0; width];
        let mut grid = vec![Complex64::default(); (gw * gh) as usize];
        for (k, &v) in coords.iter().zip(values) {
            let fx = self.kernel.taps(k[0] * gw as f64 + (gw / 2) as f64, &mut wx);
            let fy = self.kernel.taps(k[1] * gh as f64 + (gh / 2) as f64, &mut wy);
            for (a, &wya) in wy.iter().enumerate() {
                let row = (fy + a as i64).rem_euclid(gh) as usize * gw as usize;
                let va = v * wya;
                for (b, &wxb) in wx.iter().enumerate() {
                    grid[row + (fx + b as i64).rem_euclid(gw) as usize] += va * wxb;
                }
            }
        }
        grid
    }

    /// Kernel self-convolution evaluated at every sample: spreads `weights`
    /// and interpolates the grid back without any FFT.
    pub(crate) fn convolve_at_samples(&self, coords: &[[f64; 2]], weights: &[f64]) -> Vec<f64> {
        let values: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let grid = self.spread(coords, &values);
        self.interpolate(&grid, coords).into_iter().map(|c| c.re).collect()
    }
}
