//! CFLD1 binary field dumps.
//!
//! Layout (little-endian):
//!
//! | bytes | content                          |
//! |-------|----------------------------------|
//! | 8     | magic `"CFLD1\0\0\0"`            |
//! | 4     | `u32` nx                         |
//! | 4     | `u32` ny                         |
//! | 8     | `f64` pitch (metres or radians)  |
//! | 8     | `f64` origin x                   |
//! | 8     | `f64` origin y                   |
//! | 1     | `u8` plane tag (0 exit, 1 Fresnel, 2 Fraunhofer) |
//! | 16·nx·ny | `f64` (re, im) pairs, row-major |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, PlaneTag};
use crate::scalar::Real;

pub const MAGIC: [u8; 8] = *b"CFLD1\0\0\0";
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 8 + 8 + 1;

pub fn write<T: Real, W: Write>(field: &ComplexField<T>, mut w: W) -> Result<()> {
    let g = field.grid();
    let nx = u32::try_from(g.nx()).map_err(|_| Error::invalid("nx", "exceeds u32"))?;
    let ny = u32::try_from(g.ny()).map_err(|_| Error::invalid("ny", "exceeds u32"))?;
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&nx.to_le_bytes());
    header.extend_from_slice(&ny.to_le_bytes());
    header.extend_from_slice(&g.pitch().f64().to_le_bytes());
    header.extend_from_slice(&g.origin()[0].f64().to_le_bytes());
    header.extend_from_slice(&g.origin()[1].f64().to_le_bytes());
    header.push(field.plane().code());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(16 * g.nx());
    for row in field.values().chunks(g.nx()) {
        buf.clear();
        for v in row {
            buf.extend_from_slice(&v.re.f64().to_le_bytes());
            buf.extend_from_slice(&v.im.f64().to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read<T: Real, R: Read>(mut r: R) -> Result<ComplexField<T>> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::MalformedField("truncated header".into()))?;
    if header[..8] != MAGIC {
        return Err(Error::MalformedField("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap()) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let nx = u32_at(8);
    let ny = u32_at(12);
    let pitch = f64_at(16);
    let origin = [f64_at(24), f64_at(32)];
    let plane = PlaneTag::from_code(header[40])
        .ok_or_else(|| Error::MalformedField(format!("unknown plane tag {}", header[40])))?;
    let grid = GridSpec::new(nx, ny, T::of(pitch), [T::of(origin[0]), T::of(origin[1])])
        .map_err(|e| Error::MalformedField(e.to_string()))?;
    let mut values = Vec::with_capacity(nx * ny);
    let mut row = vec![0u8; 16 * nx];
    for _ in 0..ny {
        r.read_exact(&mut row)
            .map_err(|_| Error::MalformedField("truncated sample data".into()))?;
        for pair in row.chunks_exact(16) {
            let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
            values.push(Complex::new(T::of(re), T::of(im)));
        }
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::MalformedField("trailing bytes after sample data".into()));
    }
    ComplexField::new(grid, values, plane)
}

pub fn save<T: Real>(field: &ComplexField<T>, path: impl AsRef<Path>) -> Result<()> {
    write(field, BufWriter::new(File::create(path)?))
}

pub fn load<T: Real>(path: impl AsRef<Path>) -> Result<ComplexField<T>> {
    read(BufReader::new(File::open(path)?))
}
