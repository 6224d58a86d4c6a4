//! Atomic file output and the `HFRM` binary form format.
//!
//! Layout (little-endian): magic `HFRM`, `u32` version 1, `u32 N`, `u32 ℓ`,
//! `u32 R_1..R_N`, `f64 L_1..L_N`, then each component as a row-major `f64` array
//! in multi-index order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::multi_index::binomial;

pub const HFRM_MAGIC: &[u8; 4] = b"HFRM";
pub const HFRM_VERSION: u32 = 1;

/// Writes via a temporary file in the target directory followed by a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| HodgeError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HodgeError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HodgeError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HodgeError::io(path, e))?;
    tmp.persist(path).map_err(|e| HodgeError::io(path, e.error))?;
    Ok(())
}

pub fn encode_hfrm(form: &Form) -> Vec<u8> {
    let grid = form.grid();
    let mut out = Vec::with_capacity(16 + 12 * grid.dim() + 8 * grid.len() * form.components().len());
    out.extend_from_slice(HFRM_MAGIC);
    out.extend_from_slice(&HFRM_VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(form.degree() as u32).to_le_bytes());
    for &r in grid.resolutions() {
        out.extend_from_slice(&(r as u32).to_le_bytes());
    }
    for &l in grid.periods() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for c in form.components() {
        for v in c {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            HodgeError::Format(format!("truncated HFRM data at byte {}", self.pos))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_hfrm(bytes: &[u8]) -> Result<Form> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != HFRM_MAGIC {
        return Err(HodgeError::Format("missing HFRM magic".into()));
    }
    let version = r.u32()?;
    if version != HFRM_VERSION {
        return Err(HodgeError::Format(format!("unsupported HFRM version {version}")));
    }
    let n = r.u32()? as usize;
    if !(2..=3).contains(&n) {
        return Err(HodgeError::Format(format!("unsupported dimension {n}")));
    }
    let degree = r.u32()? as usize;
    if degree > n {
        return Err(HodgeError::Format(format!("degree {degree} exceeds dimension {n}")));
    }
    let res = (0..n).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let periods = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let grid = TorusGrid::new(res, periods)?;
    let count = binomial(n, degree);
    let expected = r.pos + 8 * count * grid.len();
    if bytes.len() != expected {
        return Err(HodgeError::Format(format!(
            "HFRM payload has {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        components.push((0..grid.len()).map(|_| r.f64()).collect::<Result<Vec<_>>>()?);
    }
    Form::from_components(&grid, degree, components)
}

pub fn write_hfrm(path: &Path, form: &Form) -> Result<()> {
    write_atomic(path, &encode_hfrm(form))
}

pub fn read_hfrm(path: &Path) -> Result<Form> {
    let bytes = fs::read(path).map_err(|e| HodgeError::io(path, e))?;
    decode_hfrm(&bytes)
}
