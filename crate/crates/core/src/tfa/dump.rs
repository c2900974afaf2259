use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::wvd::TfGrid;

/// Writes `u32 T`, `u32 F` then `T·F` f32 values, all little-endian.
pub fn write_grid<T: Real, W: Write>(grid: &TfGrid<T>, mut out: W) -> std::io::Result<()> {
    out.write_all(&(grid.n_time() as u32).to_le_bytes())?;
    out.write_all(&(grid.n_freq() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.values().len() * 4);
    for v in grid.values() {
        buf.extend_from_slice(&(v.to_f64_lossy() as f32).to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn save_grid<T: Real>(grid: &TfGrid<T>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_grid(grid, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Reads a dump back as `(n_time, n_freq, values)`.
pub fn read_grid<R: Read>(mut input: R) -> Result<(usize, usize, Vec<f32>)> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::invalid(format!("reading grid dump: {e}")))?;
    if bytes.len() < 8 {
        return Err(Error::invalid("grid dump shorter than its header"));
    }
    let nt = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let nf = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != nt * nf * 4 {
        return Err(Error::Shape {
            expected: format!("{} bytes", nt * nf * 4),
            got: format!("{} bytes", body.len()),
        });
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((nt, nf, values))
}
