use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tfa::image::area_weights;

pub const FEATURE_GRID: usize = 8;

/// Area-averages a row-major `height×width` image onto a `grid×grid` block
/// grid and flattens it row by row.
pub fn pooled_features<T: Real>(pixels: &[T], height: usize, width: usize, grid: usize) -> Result<Vec<T>> {
    if pixels.len() != height * width {
        return Err(Error::Shape {
            expected: format!("{height}x{width}"),
            got: format!("{} pixels", pixels.len()),
        });
    }
    if grid == 0 || height == 0 || width == 0 {
        return Err(Error::invalid("feature grid and image size must be positive"));
    }
    let rows = area_weights(height, grid);
    let cols = area_weights(width, grid);
    let mut out = Vec::with_capacity(grid * grid);
    for rw in &rows {
        for cw in &cols {
            let mut acc = 0.0;
            for &(r, a) in rw {
                for &(c, b) in cw {
                    acc += pixels[r * width + c].to_f64_lossy() * a * b;
                }
            }
            out.push(T::lit(acc));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_means() {
        let px: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let f = pooled_features(&px, 4, 4, 2).unwrap();
        assert_eq!(f, vec![2.5, 4.5, 10.5, 12.5]);
        assert_eq!(
            pooled_features(&vec![0.5f32; 64 * 64], 64, 64, 8).unwrap(),
            vec![0.5f32; 64]
        );
        assert!(pooled_features(&px, 4, 5, 2).is_err());
    }
}
