//! Bare-bones raster plots. No text: the CSV files carry the numbers.

use image::{Rgb, RgbImage};

const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const AXIS: Rgb<u8> = Rgb([40, 40, 40]);
const GRID: Rgb<u8> = Rgb([215, 215, 215]);
const LINE: Rgb<u8> = Rgb([31, 90, 180]);

const WIDTH: u32 = 480;
const HEIGHT: u32 = 320;
const MARGIN: u32 = 32;

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

/// Bresenham with a 2-pixel pen.
fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        for (ox, oy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            put(img, x + ox, y + oy, c);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Accuracy (0..1) against group value, with gridlines every 0.1.
pub fn accuracy_curve(points: &[(f64, f64)]) -> RgbImage {
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, WHITE);
    let (x0, x1) = (MARGIN as i64, (WIDTH - MARGIN) as i64);
    let (y0, y1) = ((HEIGHT - MARGIN) as i64, MARGIN as i64);
    let to_y = |acc: f64| y0 - ((y0 - y1) as f64 * acc.clamp(0.0, 1.0)).round() as i64;
    for tick in 0..=10 {
        let y = to_y(tick as f64 / 10.0);
        for x in x0..=x1 {
            put(&mut img, x, y, GRID);
        }
    }
    line(&mut img, (x0, y0), (x1, y0), AXIS);
    line(&mut img, (x0, y0), (x0, y1), AXIS);

    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.0), hi.max(p.0))
    });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pad = 16;
    let to_x = |v: f64| {
        if hi > lo {
            x0 + pad + (((x1 - x0 - 2 * pad) as f64) * (v - lo) / span).round() as i64
        } else {
            (x0 + x1) / 2
        }
    };
    let pts: Vec<(i64, i64)> = points.iter().map(|&(v, a)| (to_x(v), to_y(a))).collect();
    for w in pts.windows(2) {
        line(&mut img, w[0], w[1], LINE);
    }
    for &(x, y) in &pts {
        for dx in -3..=3 {
            for dy in -3..=3 {
                put(&mut img, x + dx, y + dy, LINE);
            }
        }
        put(&mut img, x, y0 + 3, AXIS);
        put(&mut img, x, y0 + 4, AXIS);
    }
    img
}

/// Row-normalized confusion matrix; darker cells hold more of the row.
pub fn confusion_heatmap(matrix: &[Vec<usize>]) -> RgbImage {
    const CELL: u32 = 28;
    let n = matrix.len() as u32;
    let side = n * CELL + 2 * 4;
    let mut img = RgbImage::from_pixel(side.max(1), side.max(1), WHITE);
    for (r, row) in matrix.iter().enumerate() {
        let total: usize = row.iter().sum();
        for (c, &v) in row.iter().enumerate() {
            let frac = if total == 0 { 0.0 } else { v as f64 / total as f64 };
            let shade = |full: u8| (255.0 - (255.0 - full as f64) * frac).round() as u8;
            let colour = Rgb([shade(LINE.0[0]), shade(LINE.0[1]), shade(LINE.0[2])]);
            for y in 0..CELL - 1 {
                for x in 0..CELL - 1 {
                    img.put_pixel(4 + c as u32 * CELL + x, 4 + r as u32 * CELL + y, colour);
                }
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_marks_each_point() {
        let img = accuracy_curve(&[(-6.0, 0.2), (2.0, 0.9), (10.0, 1.0)]);
        assert_eq!(img.dimensions(), (WIDTH, HEIGHT));
        let blue = img.pixels().filter(|p| **p == LINE).count();
        assert!(blue > 3 * 49);
    }

    #[test]
    fn heatmap_diagonal_is_darkest() {
        let img = confusion_heatmap(&[vec![5, 0], vec![1, 4]]);
        let centre = |r: u32, c: u32| img.get_pixel(4 + c * 28 + 14, 4 + r * 28 + 14).0[0];
        assert_eq!(centre(0, 1), 255);
        assert!(centre(0, 0) < centre(1, 1));
        assert!(centre(1, 1) < centre(1, 0));
    }
}
