//! Flat binary field layout.
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! n: u32 | m: u32 | h: f64 | R_max: f64 | axis sizes: n x u64 | values: f64 ...
//! ```
//!
//! Values are node-major, component-minor, in row-major node order (last
//! axis fastest).

use std::io::{Read, Write};
use std::sync::Arc;

use serde::Serialize;

use super::{Grid, NodeKind, VectorField};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldHeader {
    pub n: u32,
    pub m: u32,
    pub h: f64,
    pub r_max: f64,
    pub axis_sizes: Vec<u64>,
}

/// JSON sidecar written next to a binary field.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSidecar {
    pub format: &'static str,
    #[serde(flatten)]
    pub header: FieldHeader,
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
    pub payload_bytes: usize,
}

impl FieldHeader {
    pub fn of<T: Scalar>(field: &VectorField<T>) -> Self {
        let g = field.grid();
        Self {
            n: g.n() as u32,
            m: field.m() as u32,
            h: g.h().as_f64(),
            r_max: g.r_max().as_f64(),
            axis_sizes: vec![g.size() as u64; g.n()],
        }
    }
}

impl FieldSidecar {
    pub fn of<T: Scalar>(field: &VectorField<T>) -> Self {
        let g = field.grid();
        Self {
            format: "node-major component-minor little-endian f64",
            header: FieldHeader::of(field),
            interior_nodes: g.interior().len(),
            boundary_nodes: g.kinds().iter().filter(|&&k| k == NodeKind::Boundary).count(),
            payload_bytes: field.values().len() * 8,
        }
    }
}

pub fn write_field<T: Scalar, W: Write>(field: &VectorField<T>, mut w: W) -> Result<()> {
    let hdr = FieldHeader::of(field);
    w.write_all(&hdr.n.to_le_bytes())?;
    w.write_all(&hdr.m.to_le_bytes())?;
    w.write_all(&hdr.h.to_le_bytes())?;
    w.write_all(&hdr.r_max.to_le_bytes())?;
    for s in &hdr.axis_sizes {
        w.write_all(&s.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        buf.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

/// Read a field, rebuilding its grid from the header.
pub fn read_field<T: Scalar, R: Read>(mut r: R) -> Result<VectorField<T>> {
    let n = read_u32(&mut r)? as usize;
    let m = read_u32(&mut r)? as usize;
    let h = read_f64(&mut r)?;
    let r_max = read_f64(&mut r)?;
    if !(2..=3).contains(&n) || m == 0 {
        return Err(invalid(format!("bad field header: n = {n}, m = {m}")));
    }
    let mut sizes = Vec::with_capacity(n);
    for _ in 0..n {
        sizes.push(read_u64(&mut r)?);
    }
    let grid = Grid::new(n, T::lit(h), T::lit(r_max))?;
    if sizes.iter().any(|&s| s as usize != grid.size()) {
        return Err(invalid(format!(
            "axis sizes {sizes:?} do not match the grid rebuilt from h = {h}, R_max = {r_max}"
        )));
    }
    let count = grid.len() * m;
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    VectorField::from_values(Arc::new(grid), m, values)
}
