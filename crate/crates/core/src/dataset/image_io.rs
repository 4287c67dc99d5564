//! PGM and raw float32 image files.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageSlice;

/// JSON sidecar describing a raw float32 image (or adding spacing to a PGM).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub width: usize,
    pub height: usize,
    pub pixel_spacing_mm: f64,
    #[serde(default = "default_dtype")]
    pub dtype: String,
    #[serde(default = "default_byte_order")]
    pub byte_order: String,
}

fn default_dtype() -> String {
    "float32".into()
}

fn default_byte_order() -> String {
    "little-endian".into()
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn read_sidecar(path: &Path) -> Result<RawSidecar> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads an 8/16-bit binary PGM (normalized to `[0, 1]`) or a `.raw`/`.f32`
/// float32 image with a JSON sidecar next to it (`image.json`).
pub fn load_image(path: &Path) -> Result<ImageSlice> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" => load_pgm(path),
        "raw" | "f32" => load_raw(path),
        _ => Err(Error::UnknownFormat(path.to_path_buf())),
    }
}

fn load_raw(path: &Path) -> Result<ImageSlice> {
    let side_path = sidecar_path(path);
    let side = read_sidecar(&side_path)?;
    if side.dtype != "float32" {
        return Err(Error::malformed("image sidecar", &side_path, format!("unsupported dtype {:?}", side.dtype)));
    }
    let little = match side.byte_order.as_str() {
        "little-endian" | "little" => true,
        "big-endian" | "big" => false,
        other => return Err(Error::malformed("image sidecar", &side_path, format!("unknown byte order {other:?}"))),
    };
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let expected = side.width * side.height * 4;
    if bytes.len() != expected {
        return Err(Error::malformed(
            "raw image",
            path,
            format!("expected {expected} bytes for {}x{}, found {}", side.width, side.height, bytes.len()),
        ));
    }
    let pixels = bytes
        .chunks_exact(4)
        .map(|b| {
            let b = [b[0], b[1], b[2], b[3]];
            (if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) }) as f64
        })
        .collect();
    ImageSlice::new(side.width, side.height, side.pixel_spacing_mm, pixels)
}

/// Writes `image` as little-endian float32 plus its JSON sidecar. Pixels are
/// rounded to the nearest `f32`.
pub fn save_image(image: &ImageSlice, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(image.len() * 4);
    for &v in image.pixels() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = RawSidecar {
        width: image.width(),
        height: image.height(),
        pixel_spacing_mm: image.pixel_spacing_mm(),
        dtype: default_dtype(),
        byte_order: default_byte_order(),
    };
    let side_path = sidecar_path(path);
    let text = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    fs::write(&side_path, text + "\n").map_err(|e| Error::io(&side_path, e))
}

/// Parsed binary PGM: dimensions, maximum value and samples.
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

pub fn read_pgm(path: &Path) -> Result<Pgm> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |detail: String| Error::malformed("PGM", path, detail);
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(bad(format!("expected magic P5, found {:?}", fields[0])));
    }
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(format!("invalid {what} {s:?}")));
    let (width, height, maxval) = (num(&fields[1], "width")?, num(&fields[2], "height")?, num(&fields[3], "maxval")?);
    if maxval == 0 || maxval > 65535 {
        return Err(bad(format!("maxval {maxval} outside 1..=65535")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let depth = if maxval < 256 { 1 } else { 2 };
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() < width * height * depth {
        return Err(bad(format!(
            "raster has {} bytes, expected {}",
            raster.len(),
            width * height * depth
        )));
    }
    let samples = raster[..width * height * depth]
        .chunks_exact(depth)
        .map(|b| if depth == 1 { b[0] as u16 } else { u16::from_be_bytes([b[0], b[1]]) })
        .collect();
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        samples,
    })
}

fn load_pgm(path: &Path) -> Result<ImageSlice> {
    let pgm = read_pgm(path)?;
    let side_path = sidecar_path(path);
    let spacing = if side_path.exists() {
        read_sidecar(&side_path)?.pixel_spacing_mm
    } else {
        warn!("{}: no sidecar, assuming 1.0 mm pixel spacing", path.display());
        1.0
    };
    let scale = 1.0 / pgm.maxval as f64;
    ImageSlice::new(
        pgm.width,
        pgm.height,
        spacing,
        pgm.samples.iter().map(|&s| s as f64 * scale).collect(),
    )
}

pub fn write_pgm8(path: &Path, width: usize, height: usize, values: &[u8]) -> Result<()> {
    assert_eq!(values.len(), width * height);
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(values);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_pgm16(path: &Path, width: usize, height: usize, values: &[u16]) -> Result<()> {
    assert_eq!(values.len(), width * height);
    let mut bytes = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for v in values {
        bytes.extend_from_slice(&v.to_be_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// 8-bit preview of an image scaled so its maximum maps to 255.
pub fn save_preview_pgm(image: &ImageSlice, path: &Path) -> Result<()> {
    let max = image.max();
    let values: Vec<u8> = image
        .pixels()
        .iter()
        .map(|&v| if max > 0.0 { (255.0 * v / max + 0.5).floor() as u8 } else { 0 })
        .collect();
    write_pgm8(path, image.width(), image.height(), &values)
}
