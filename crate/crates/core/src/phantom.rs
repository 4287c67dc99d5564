//! Synthetic test images.

use crate::error::Result;
use crate::image::ImageSlice;
use crate::rng::{rng_from_seed, uniform, SimRng};

/// Ellipse `(intensity, semi_axis_x, semi_axis_y, center_x, center_y, angle_deg)`
/// in coordinates normalized so the image spans `[-1, 1)`.
type Ellipse = (f64, f64, f64, f64, f64, f64);

/// Modified Shepp-Logan head (Toft's higher-contrast intensities).
const SHEPP_LOGAN: [Ellipse; 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

fn render(n: usize, ellipses: &[Ellipse]) -> Result<ImageSlice> {
    let half = n as f64 / 2.0;
    let prepared: Vec<(f64, f64, f64, f64, f64, f64, f64)> = ellipses
        .iter()
        .map(|&(a, ax, ay, x0, y0, deg)| {
            let (s, c) = deg.to_radians().sin_cos();
            (a, ax, ay, x0, y0, s, c)
        })
        .collect();
    ImageSlice::from_fn(n, n, 1.0, |r, c| {
        let x = (c as f64 - half) / half;
        let y = (r as f64 - half) / half;
        let v: f64 = prepared
            .iter()
            .filter(|&&(_, ax, ay, x0, y0, s, co)| {
                let xr = (x - x0) * co + (y - y0) * s;
                let yr = -(x - x0) * s + (y - y0) * co;
                (xr / ax).powi(2) + (yr / ay).powi(2) <= 1.0
            })
            .map(|e| e.0)
            .sum();
        v.max(0.0)
    })
}

pub fn shepp_logan(n: usize) -> Result<ImageSlice> {
    render(n, &SHEPP_LOGAN)
}

/// Shepp-Logan variant with randomly perturbed inner structures, 2 to 5
/// extra lesions, a global scale in `[0.8, 1]` and a rotation within
/// +-15 degrees. Deterministic per seed.
pub fn random_head_phantom(n: usize, seed: u64) -> Result<ImageSlice> {
    let mut rng = rng_from_seed(seed);
    render(n, &random_ellipses(&mut rng))
}

fn random_ellipses(rng: &mut SimRng) -> Vec<Ellipse> {
    let scale = uniform(rng, 0.8, 1.0);
    let turn = uniform(rng, -15.0, 15.0);
    let mut ellipses = SHEPP_LOGAN.to_vec();
    let lesions = 2 + (uniform(rng, 0.0, 4.0) as usize).min(3);
    for _ in 0..lesions {
        ellipses.push((
            uniform(rng, -0.15, 0.25),
            uniform(rng, 0.02, 0.12),
            uniform(rng, 0.02, 0.12),
            uniform(rng, -0.4, 0.4),
            uniform(rng, -0.5, 0.5),
            uniform(rng, 0.0, 180.0),
        ));
    }
    let (s, c) = turn.to_radians().sin_cos();
    ellipses
        .into_iter()
        .enumerate()
        .map(|(i, (mut a, mut ax, mut ay, mut x0, mut y0, mut deg))| {
            if (2..SHEPP_LOGAN.len()).contains(&i) {
                a *= uniform(rng, 0.6, 1.4);
                ax *= uniform(rng, 0.85, 1.15);
                ay *= uniform(rng, 0.85, 1.15);
                x0 += uniform(rng, -0.04, 0.04);
                y0 += uniform(rng, -0.04, 0.04);
                deg += uniform(rng, -10.0, 10.0);
            }
            let (sx, sy) = (x0 * scale, y0 * scale);
            (a, ax * scale, ay * scale, sx * c - sy * s, sx * s + sy * c, deg + turn)
        })
        .collect()
}

/// Isotropic Gaussian centered on the DFT origin `(n/2, n/2)`.
pub fn gaussian(n: usize, sigma_px: f64) -> Result<ImageSlice> {
    let half = (n / 2) as f64;
    ImageSlice::from_fn(n, n, 1.0, |r, c| {
        let d2 = (r as f64 - half).powi(2) + (c as f64 - half).powi(2);
        (-d2 / (2.0 * sigma_px * sigma_px)).exp()
    })
}

/// Unit disk of `radius_px` with a linear edge ramp `edge_px` wide.
pub fn smooth_disk(n: usize, radius_px: f64, edge_px: f64) -> Result<ImageSlice> {
    let half = (n / 2) as f64;
    ImageSlice::from_fn(n, n, 1.0, |r, c| {
        let d = (r as f64 - half).hypot(c as f64 - half);
        ((radius_px - d) / edge_px + 0.5).clamp(0.0, 1.0)
    })
}

/// Plus-shaped bars through `(n/2, n/2)`, symmetric under quarter turns
/// about that point.
pub fn cross(n: usize, arm_px: usize, half_thickness_px: usize) -> Result<ImageSlice> {
    let center = (n / 2) as i64;
    let (arm, t) = (arm_px as i64, half_thickness_px as i64);
    ImageSlice::from_fn(n, n, 1.0, |r, c| {
        let (dy, dx) = ((r as i64 - center).abs(), (c as i64 - center).abs());
        let horizontal = dx <= arm && dy <= t;
        let vertical = dy <= arm && dx <= t;
        if horizontal || vertical {
            1.0
        } else {
            0.0
        }
    })
}
