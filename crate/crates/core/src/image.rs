//! Real-valued 2-D intensity images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-D magnitude image, row-major, with isotropic in-plane pixel spacing.
///
/// Row index runs along the phase-encode direction (`ky`), column index along
/// the frequency-encode direction (`kx`). Pixel `(row, col)` sits at the
/// centered coordinate `(col - width/2, row - height/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSlice {
    width: usize,
    height: usize,
    pixel_spacing_mm: f64,
    pixels: Vec<f64>,
}

impl ImageSlice {
    pub fn new(width: usize, height: usize, pixel_spacing_mm: f64, pixels: Vec<f64>) -> Result<Self> {
        validate_dims(width, height)?;
        if !(pixel_spacing_mm.is_finite() && pixel_spacing_mm > 0.0) {
            return Err(Error::InvalidImage(format!(
                "pixel spacing must be positive and finite, got {pixel_spacing_mm}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some((i, v)) = pixels.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidImage(format!(
                "pixel {i} has value {v}; intensities must be finite and non-negative"
            )));
        }
        Ok(Self {
            width,
            height,
            pixel_spacing_mm,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize, pixel_spacing_mm: f64) -> Result<Self> {
        Self::new(width, height, pixel_spacing_mm, vec![0.0; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        pixel_spacing_mm: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Self::new(width, height, pixel_spacing_mm, pixels)
    }

    /// Builds an image from values already known to satisfy the invariants
    /// (e.g. magnitudes). Negative zero and tiny negative rounding noise are
    /// clamped to zero.
    pub(crate) fn from_magnitudes(width: usize, height: usize, pixel_spacing_mm: f64, mut pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        for p in &mut pixels {
            if !(*p > 0.0) {
                *p = 0.0;
            }
        }
        Self {
            width,
            height,
            pixel_spacing_mm,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_spacing_mm(&self) -> f64 {
        self.pixel_spacing_mm
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn same_shape(&self, other: &ImageSlice) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.pixel_spacing_mm,
            self.pixels.iter().map(|v| v * factor).collect(),
        )
    }

    pub fn with_spacing(mut self, pixel_spacing_mm: f64) -> Result<Self> {
        if !(pixel_spacing_mm.is_finite() && pixel_spacing_mm > 0.0) {
            return Err(Error::InvalidImage(format!("invalid pixel spacing {pixel_spacing_mm}")));
        }
        self.pixel_spacing_mm = pixel_spacing_mm;
        Ok(self)
    }

    /// Rounds every pixel to the nearest `f32`, so the image survives float32
    /// storage bit-exactly.
    pub fn quantized_f32(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixel_spacing_mm: self.pixel_spacing_mm,
            pixels: self.pixels.iter().map(|&v| v as f32 as f64).collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    pub fn rms(&self) -> f64 {
        (self.pixels.iter().map(|v| v * v).sum::<f64>() / self.pixels.len() as f64).sqrt()
    }
}

pub(crate) fn validate_dims(width: usize, height: usize) -> Result<()> {
    for (name, d) in [("width", width), ("height", height)] {
        if d < 8 || d % 2 != 0 {
            return Err(Error::InvalidImage(format!("{name} must be even and at least 8, got {d}")));
        }
    }
    Ok(())
}

/// Bilinear resampling to `width` x `height` with edge clamping.
///
/// Pixel centers are aligned (`src = (dst + 0.5) * scale - 0.5`), so resizing
/// to the same size is the identity. Pixel spacing is rescaled so the field
/// of view is preserved along the width.
pub fn resize_bilinear(image: &ImageSlice, width: usize, height: usize) -> Result<ImageSlice> {
    validate_dims(width, height)?;
    if width == image.width && height == image.height {
        return Ok(image.clone());
    }
    let sx = image.width as f64 / width as f64;
    let sy = image.height as f64 / height as f64;
    let max_x = (image.width - 1) as f64;
    let max_y = (image.height - 1) as f64;
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = ((row as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let y0 = y.floor() as usize;
        let y1 = (y0 + 1).min(image.height - 1);
        let fy = y - y0 as f64;
        for col in 0..width {
            let x = ((col as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let x0 = x.floor() as usize;
            let x1 = (x0 + 1).min(image.width - 1);
            let fx = x - x0 as f64;
            let top = image.get(y0, x0) * (1.0 - fx) + image.get(y0, x1) * fx;
            let bottom = image.get(y1, x0) * (1.0 - fx) + image.get(y1, x1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    ImageSlice::new(width, height, image.pixel_spacing_mm * sx, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_dimensions() {
        assert!(ImageSlice::zeros(9, 8, 1.0).is_err());
        assert!(ImageSlice::zeros(6, 8, 1.0).is_err());
        assert!(ImageSlice::zeros(8, 8, 1.0).is_ok());
    }

    #[test]
    fn rejects_negative_and_nan_pixels() {
        let mut px = vec![0.0; 64];
        px[3] = -1.0;
        assert!(ImageSlice::new(8, 8, 1.0, px.clone()).is_err());
        px[3] = f64::NAN;
        assert!(ImageSlice::new(8, 8, 1.0, px).is_err());
    }

    #[test]
    fn resize_same_size_is_identity() {
        let img = ImageSlice::from_fn(16, 8, 1.0, |r, c| (r * 16 + c) as f64).unwrap();
        assert_eq!(resize_bilinear(&img, 16, 8).unwrap(), img);
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = ImageSlice::from_fn(8, 8, 1.0, |_, _| 3.25).unwrap();
        let out = resize_bilinear(&img, 26, 12).unwrap();
        assert!(out.pixels().iter().all(|&v| (v - 3.25).abs() < 1e-12));
    }

    #[test]
    fn resize_upscale_keeps_ramp_linear() {
        // f(col) = col on the source; the closed form on the target grid is
        // (col + 0.5) * sx - 0.5 away from the clamped borders.
        let img = ImageSlice::from_fn(16, 16, 1.0, |_, c| c as f64).unwrap();
        let out = resize_bilinear(&img, 32, 32).unwrap();
        for row in 0..32 {
            for col in 2..30 {
                let expected = (col as f64 + 0.5) * 0.5 - 0.5;
                assert!((out.get(row, col) - expected).abs() < 1e-9);
            }
        }
        assert_eq!(out.pixel_spacing_mm(), 0.5);
    }
}
