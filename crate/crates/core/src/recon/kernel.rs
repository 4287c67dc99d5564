//! Interpolation kernels for gridding and their Fourier transforms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Separable 1-D gridding kernel, evaluated in units of oversampled grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Kernel {
    KaiserBessel { width: usize, beta: f64 },
    /// Keys cubic convolution (`a = -0.5`), four cells wide.
    Cubic,
}

impl Kernel {
    /// Kaiser-Bessel kernel with the shape parameter matched to the
    /// oversampling ratio (Beatty et al.).
    pub fn kaiser_bessel(width: usize, oversampling: f64) -> Self {
        Kernel::KaiserBessel {
            width,
            beta: kaiser_bessel_beta(width, oversampling),
        }
    }

    pub fn width(&self) -> usize {
        match *self {
            Kernel::KaiserBessel { width, .. } => width,
            Kernel::Cubic => 4,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Kernel::KaiserBessel { width, beta } => {
                let x = 1.0 - (2.0 * u / width as f64).powi(2);
                if x < 0.0 {
                    0.0
                } else {
                    bessel_i0(beta * x.sqrt())
                }
            }
            Kernel::Cubic => keys_cubic(u),
        }
    }

    /// Continuous Fourier transform `int C(u) exp(-2 pi i u nu) du`.
    pub fn fourier(&self, nu: f64) -> f64 {
        match *self {
            Kernel::KaiserBessel { width, beta } => {
                let w = width as f64;
                let z2 = beta * beta - (PI * w * nu).powi(2);
                if z2 > 1e-12 {
                    let z = z2.sqrt();
                    w * z.sinh() / z
                } else if z2 < -1e-12 {
                    let z = (-z2).sqrt();
                    w * z.sin() / z
                } else {
                    w
                }
            }
            Kernel::Cubic => cubic_fourier(nu),
        }
    }

    /// Taps `(first_index, weights)` covering position `u` on an unwrapped grid.
    pub(crate) fn taps(&self, u: f64, weights: &mut [f64]) -> i64 {
        let w = self.width();
        let first = (u - w as f64 / 2.0).floor() as i64 + 1;
        for (t, slot) in weights.iter_mut().enumerate().take(w) {
            *slot = self.eval(u - (first + t as i64) as f64);
        }
        first
    }
}

pub fn kaiser_bessel_beta(width: usize, oversampling: f64) -> f64 {
    let w = width as f64;
    let a = (w / oversampling * (oversampling - 0.5)).powi(2) - 0.8;
    PI * a.max(0.0).sqrt()
}

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn keys_cubic(u: f64) -> f64 {
    let a = -0.5;
    let u = u.abs();
    if u < 1.0 {
        (a + 2.0) * u * u * u - (a + 3.0) * u * u + 1.0
    } else if u < 2.0 {
        a * u * u * u - 5.0 * a * u * u + 8.0 * a * u - 4.0 * a
    } else {
        0.0
    }
}

/// Composite Simpson quadrature of the (even) cubic kernel's transform.
fn cubic_fourier(nu: f64) -> f64 {
    const INTERVALS: usize = 4000;
    let h = 2.0 / INTERVALS as f64;
    let f = |u: f64| keys_cubic(u) * (2.0 * PI * u * nu).cos();
    let mut acc = f(0.0) + f(2.0);
    for i in 1..INTERVALS {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(i as f64 * h);
    }
    2.0 * acc * h / 3.0
}
