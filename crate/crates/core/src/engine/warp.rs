//! In-plane rigid resampling of images.

use crate::error::{Error, Result};
use crate::image::ImageSlice;
use crate::motion::RigidPose;

/// Moves the image content by `pose`: rotation by `rz_deg` about the image
/// center `(W/2, H/2)` followed by translation `(tx_mm, ty_mm)`.
///
/// Output pixel `p` takes the bilinearly interpolated input value at
/// `R^-1 (p - c - t) + c`; samples falling outside the input read as zero.
/// Rotation is counter-clockwise in `(x = col, y = row)` coordinates.
///
/// Through-plane components cannot be represented in a single slice: they
/// are an error unless `ignore_through_plane` is set, in which case they are
/// dropped.
pub fn apply_rigid(image: &ImageSlice, pose: &RigidPose, ignore_through_plane: bool) -> Result<ImageSlice> {
    if !pose.is_finite() {
        return Err(Error::InvalidParameter(format!("pose has non-finite components: {pose:?}")));
    }
    if pose.has_through_plane() && !ignore_through_plane {
        return Err(Error::UnsupportedMotion {
            tz: pose.tz_mm,
            rx: pose.rx_deg,
            ry: pose.ry_deg,
        });
    }
    if pose.tx_mm == 0.0 && pose.ty_mm == 0.0 && pose.rz_deg == 0.0 {
        return Ok(image.clone());
    }

    let (w, h) = (image.width(), image.height());
    let spacing = image.pixel_spacing_mm();
    let (tx, ty) = (pose.tx_mm / spacing, pose.ty_mm / spacing);
    let (sin, cos) = pose.rz_deg.to_radians().sin_cos();
    let (cx, cy) = ((w / 2) as f64, (h / 2) as f64);
    let src = image.pixels();
    let at = |r: i64, c: i64| -> f64 {
        if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
            0.0
        } else {
            src[r as usize * w + c as usize]
        }
    };

    let mut out = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let dx = col as f64 - cx - tx;
            let dy = row as f64 - cy - ty;
            let qx = cos * dx + sin * dy + cx;
            let qy = -sin * dx + cos * dy + cy;
            let (x0, y0) = (qx.floor(), qy.floor());
            let (fx, fy) = (qx - x0, qy - y0);
            let (c0, r0) = (x0 as i64, y0 as i64);
            let mut v = 0.0;
            if fy < 1.0 {
                let top = at(r0, c0) * (1.0 - fx) + if fx > 0.0 { at(r0, c0 + 1) * fx } else { 0.0 };
                v += top * (1.0 - fy);
            }
            if fy > 0.0 {
                let bottom = at(r0 + 1, c0) * (1.0 - fx) + if fx > 0.0 { at(r0 + 1, c0 + 1) * fx } else { 0.0 };
                v += bottom * fy;
            }
            out.push(v);
        }
    }
    Ok(ImageSlice::from_magnitudes(w, h, spacing, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> ImageSlice {
        ImageSlice::from_fn(w, h, 1.0, |r, c| (r * w + c) as f64).unwrap()
    }

    #[test]
    fn identity_is_bit_exact() {
        let img = ImageSlice::from_fn(16, 16, 0.7, |r, c| ((r * 31 + c * 17) % 13) as f64 / 3.0).unwrap();
        assert_eq!(apply_rigid(&img, &RigidPose::IDENTITY, false).unwrap(), img);
    }

    #[test]
    fn integer_shift_moves_pixels() {
        let img = ramp(8, 8);
        let out = apply_rigid(&img, &RigidPose::translation(2.0, -1.0), false).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let (sr, sc) = (r as i64 + 1, c as i64 - 2);
                let expected = if (0..8).contains(&sr) && (0..8).contains(&sc) {
                    img.get(sr as usize, sc as usize)
                } else {
                    0.0
                };
                assert_eq!(out.get(r, c), expected, "({r}, {c})");
            }
        }
    }

    #[test]
    fn translation_uses_pixel_spacing() {
        let img = ramp(8, 8).with_spacing(2.0).unwrap();
        let out = apply_rigid(&img, &RigidPose::translation(4.0, 0.0), false).unwrap();
        assert_eq!(out.get(3, 5), img.get(3, 3));
    }

    #[test]
    fn half_pixel_shift_averages_neighbours() {
        let img = ramp(8, 8);
        let out = apply_rigid(&img, &RigidPose::translation(0.5, 0.0), false).unwrap();
        assert!((out.get(4, 4) - 0.5 * (img.get(4, 3) + img.get(4, 4))).abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_maps_grid_onto_grid() {
        let img = ramp(8, 8);
        let out = apply_rigid(&img, &RigidPose::in_plane(0.0, 0.0, 90.0), false).unwrap();
        // p = R q about (4, 4): source (x, y) = (4 + dy, 4 - dx)
        for r in 1..8 {
            for c in 1..8 {
                let (dx, dy) = (c as f64 - 4.0, r as f64 - 4.0);
                let (sx, sy) = ((4.0 + dy) as usize, (4.0 - dx) as usize);
                assert!((out.get(r, c) - img.get(sy, sx)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn through_plane_needs_opt_in() {
        let img = ramp(8, 8);
        let pose = RigidPose {
            tz_mm: 1.0,
            tx_mm: 1.0,
            ..RigidPose::IDENTITY
        };
        assert!(matches!(apply_rigid(&img, &pose, false), Err(Error::UnsupportedMotion { .. })));
        let dropped = apply_rigid(&img, &pose, true).unwrap();
        assert_eq!(dropped, apply_rigid(&img, &RigidPose::translation(1.0, 0.0), false).unwrap());
    }
}
