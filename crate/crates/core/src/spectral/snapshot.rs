//! GFLD1 field snapshots.
//!
//! Byte layout (all integers and floats little-endian):
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 5    | ASCII tag `GFLD1`                         |
//! | 5      | 1    | `d` (u8)                                  |
//! | 6      | 4    | `n` (u32)                                 |
//! | 10     | 4    | cutoff `K` (u32)                          |
//! | 14     | 4    | components (u32)                          |
//! | 18     | 1    | hermitian flag (u8, 0 or 1)               |
//! | 19     | 16·c·nᵈ | coefficients as `(re: f64, im: f64)`   |
//!
//! Coefficients are component-major; within a component the lattice is
//! row-major with the last axis fastest, and axis index `i` stands for the
//! wavenumber `i` when `i < n/2` and `i - n` otherwise.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"GFLD1";
pub const HEADER_LEN: usize = 19;

pub fn write_field<W: Write>(mut w: W, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.push(g.dim() as u8);
    header.extend_from_slice(&(g.n() as u32).to_le_bytes());
    header.extend_from_slice(&(g.cutoff() as u32).to_le_bytes());
    header.extend_from_slice(&(f.components() as u32).to_le_bytes());
    header.push(f.flags().hermitian as u8);
    w.write_all(&header)?;
    let mut body = Vec::with_capacity(16 * f.coeffs().len());
    for c in f.coeffs() {
        body.extend_from_slice(&c.re.to_le_bytes());
        body.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&body)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|e| Error::Format(format!("truncated GFLD1 header: {e}")))?;
    if &header[..5] != MAGIC {
        return Err(Error::Format("missing GFLD1 tag".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap()) as usize;
    let dim = header[5] as usize;
    let (n, cutoff, components) = (u32_at(6), u32_at(10), u32_at(14));
    let grid = GridSpec::new(dim, n, cutoff)?;
    let count = components
        .checked_mul(grid.len())
        .ok_or_else(|| Error::Format("coefficient count overflows".into()))?;
    let mut body = vec![0u8; 16 * count];
    r.read_exact(&mut body).map_err(|e| Error::Format(format!("truncated GFLD1 body: {e}")))?;
    let coeffs = body
        .chunks_exact(16)
        .map(|b| {
            Complex64::new(
                f64::from_le_bytes(b[..8].try_into().unwrap()),
                f64::from_le_bytes(b[8..].try_into().unwrap()),
            )
        })
        .collect();
    let field = SpectralField::from_coeffs(grid, components, coeffs)?;
    if header[18] == 1 && !field.flags().hermitian {
        return Err(Error::Format("snapshot flagged hermitian but coefficients are not".into()));
    }
    Ok(field)
}
