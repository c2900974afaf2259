use image::GrayImage;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::wvd::TfGrid;

pub const DEFAULT_IMAGE_SIZE: usize = 64;
pub const DB_FLOOR: f64 = 60.0;

/// Grayscale spectrogram: rows are frequency (row 0 is the highest bin),
/// columns are time.
///
/// Magnitudes go to dB, are floored at `DB_FLOOR` below the peak, min-max
/// normalized, area-averaged to `height×width` and quantized to 8 bits. A grid
/// with no dynamic range (all zero or constant) yields an all-zero image.
pub fn to_image<T: Real>(grid: &TfGrid<T>, height: usize, width: usize) -> Result<GrayImage> {
    let unit = to_unit_matrix(grid, height, width)?;
    let pixels = unit
        .iter()
        .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::from_raw(width as u32, height as u32, pixels)
        .ok_or_else(|| Error::invalid("image buffer does not match requested size"))
}

/// Same pipeline as [`to_image`] without quantization; row-major `height×width`.
pub fn to_unit_matrix<T: Real>(grid: &TfGrid<T>, height: usize, width: usize) -> Result<Vec<f64>> {
    if height == 0 || width == 0 {
        return Err(Error::invalid("image dimensions must be positive"));
    }
    let (nt, nf) = (grid.n_time(), grid.n_freq());
    if nt == 0 || nf == 0 {
        return Err(Error::Empty("time-frequency grid"));
    }
    let mags: Vec<f64> = grid.values().iter().map(|v| v.to_f64_lossy().abs()).collect();
    if mags.iter().any(|m| !m.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(vec![0.0; height * width]);
    }
    let peak_db = 10.0 * peak.log10();
    let floor = peak_db - DB_FLOOR;
    let db: Vec<f64> = mags
        .iter()
        .map(|&m| if m > 0.0 { (10.0 * m.log10()).max(floor) } else { floor })
        .collect();
    let lo = db.iter().copied().fold(f64::INFINITY, f64::min);
    let range = peak_db - lo;
    if range <= 0.0 {
        return Ok(vec![0.0; height * width]);
    }

    // Source matrix: nf rows (highest frequency first) by nt columns.
    let mut src = vec![0.0; nf * nt];
    for t in 0..nt {
        for k in 0..nf {
            src[(nf - 1 - k) * nt + t] = (db[t * nf + k] - lo) / range;
        }
    }
    let col_w = area_weights(nt, width);
    let row_w = area_weights(nf, height);
    let mut cols = vec![0.0; nf * width];
    for r in 0..nf {
        for (c, ws) in col_w.iter().enumerate() {
            cols[r * width + c] = ws.iter().map(|&(i, w)| src[r * nt + i] * w).sum();
        }
    }
    let mut out = vec![0.0; height * width];
    for (r, ws) in row_w.iter().enumerate() {
        for c in 0..width {
            out[r * width + c] = ws
                .iter()
                .map(|&(i, w)| cols[i * width + c] * w)
                .sum::<f64>()
                .clamp(0.0, 1.0);
        }
    }
    Ok(out)
}

/// For each destination cell, the source indices it overlaps and their
/// fractional weights (summing to 1).
pub(crate) fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let (a, b) = (d as f64 * scale, (d + 1) as f64 * scale);
            let mut ws = Vec::new();
            let mut i = a.floor() as usize;
            while (i as f64) < b && i < src {
                let overlap = (b.min(i as f64 + 1.0) - a.max(i as f64)).max(0.0);
                if overlap > 0.0 {
                    ws.push((i, overlap / scale));
                }
                i += 1;
            }
            ws
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ComplexSeries;
    use crate::tfa::{spwvd, WindowSpec};
    use num_complex::Complex;

    fn grid_from(values: Vec<f64>, nt: usize, nf: usize) -> TfGrid<f64> {
        TfGrid::new(
            values,
            nt,
            nf,
            (0..nt).map(|t| t as f64).collect(),
            (0..nf).map(|k| k as f64).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_and_constant_grids_give_black_images() {
        for v in [0.0, 3.5] {
            let img = to_image(&grid_from(vec![v; 100 * 40], 100, 40), 64, 64).unwrap();
            assert!(img.pixels().all(|p| p.0[0] == 0));
        }
    }

    #[test]
    fn area_weights_partition_unity() {
        for (s, d) in [(600, 64), (256, 64), (10, 3), (3, 10)] {
            for ws in area_weights(s, d) {
                let total: f64 = ws.iter().map(|w| w.1).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn floor_limits_dynamic_range() {
        let mut v = vec![1e-12; 64 * 64];
        v[0] = 1.0;
        v[1] = 1e-3;
        let m = to_unit_matrix(&grid_from(v, 64, 64), 64, 64).unwrap();
        // 1e-3 is 30 dB down on a 60 dB span.
        assert!((m[63 * 64 + 0] - 1.0).abs() < 1e-12);
        assert!((m[62 * 64 + 0] - 0.5).abs() < 1e-12);
        assert_eq!(m[0], 0.0);
    }

    #[test]
    fn tone_lands_on_its_row() {
        let fs = 2e6;
        let f0 = 600e3;
        let s = (0..600)
            .map(|i| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * f0 * i as f64 / fs))
            .collect();
        let grid = spwvd(&ComplexSeries::new(s, fs).unwrap(), &WindowSpec::default(), 256).unwrap();
        let img = to_image(&grid, 64, 64).unwrap();
        let k = grid.bin_of(f0);
        let expected_row = (grid.n_freq() - 1 - k) * 64 / grid.n_freq();
        let col = 32;
        let best_row = (0..64u32).max_by_key(|&r| img.get_pixel(col, r).0[0]).unwrap();
        assert!(
            (best_row as usize).abs_diff(expected_row) <= 1,
            "{best_row} vs {expected_row}"
        );
        assert_eq!(img.dimensions(), (64, 64));
    }
}
