//! Savitzky-Golay smoothing with mirror padding.

use crate::error::{Error, Result};

/// Smooths `values` with a Savitzky-Golay filter.
///
/// Every output sample is the value at the window center of the
/// least-squares polynomial of degree `order` fitted over `window` samples.
/// Edges are handled by mirroring about the first/last sample
/// (`x[-i] = x[i]`), so `window` may be as large as `2 * len - 1`.
pub fn smooth_savitzky_golay(values: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 {
        return Err(Error::InvalidParameter(format!("window must be odd, got {window}")));
    }
    if order == 0 || order >= window {
        return Err(Error::InvalidParameter(format!(
            "order must satisfy 1 <= order < window, got order {order} with window {window}"
        )));
    }
    let len = values.len();
    if len == 0 || window > 2 * len - 1 {
        return Err(Error::InvalidParameter(format!(
            "window {window} too long for {len} samples (mirror padding allows at most {})",
            (2 * len).saturating_sub(1)
        )));
    }

    let coeffs = center_coefficients(window, order);
    let half = (window / 2) as isize;
    let last = len as isize - 1;
    let mirror = |i: isize| -> usize {
        let j = if i < 0 {
            -i
        } else if i > last {
            2 * last - i
        } else {
            i
        };
        j as usize
    };
    Ok((0..len as isize)
        .map(|n| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * values[mirror(n + i as isize - half)])
                .sum()
        })
        .collect())
}

/// Convolution weights producing the fitted value at the window center.
///
/// Solves the normal equations of the polynomial fit on the abscissae
/// `t = (-h..=h) / h` (scaled for conditioning) and keeps the constant-term
/// row of the pseudo-inverse.
fn center_coefficients(window: usize, order: usize) -> Vec<f64> {
    let half = (window / 2) as f64;
    let scale = if half > 0.0 { half } else { 1.0 };
    let ts: Vec<f64> = (0..window).map(|i| (i as f64 - half) / scale).collect();
    let p = order + 1;

    // Gram matrix G[a][b] = sum t^(a+b); we need e0^T G^{-1} A^T.
    let mut gram = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            gram[a][b] = ts.iter().map(|t| t.powi((a + b) as i32)).sum();
        }
    }
    // G is symmetric, so e0^T G^{-1} = (G^{-1} e0)^T.
    let mut rhs = vec![0.0; p];
    rhs[0] = 1.0;
    let row = solve(gram, rhs);
    ts.iter()
        .map(|t| (0..p).map(|j| row[j] * t.powi(j as i32)).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting for a small dense system.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}
