//! The surface binary format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic  "MSRE"            4 bytes
//! version u32              = 1
//! d       u32
//! n       u32
//! lo[d]   i64 each
//! hi[d]   i64 each
//! |Λ|·n   f64 interior values, row-major vertex order (last axis fastest),
//!         components contiguous per vertex
//! count   u64              boundary records
//! per record: vertex (d × i64), then n × f64 values
//! ```

use std::io::{Read, Write};

use msre_core::lattice::{BoxDomain, Surface};
use msre_core::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MSRE";
pub const VERSION: u32 = 1;

pub fn write_surface<W: Write>(w: &mut W, s: &Surface) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("surface write failed: {e}"));
    let domain = s.domain();
    let d = domain.dim() as u32;
    let n = s.ncomp() as u32;
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&d.to_le_bytes()).map_err(io)?;
    w.write_all(&n.to_le_bytes()).map_err(io)?;
    for &c in domain.lo() {
        w.write_all(&c.to_le_bytes()).map_err(io)?;
    }
    for &c in domain.hi() {
        w.write_all(&c.to_le_bytes()).map_err(io)?;
    }
    for &x in s.interior() {
        w.write_all(&x.to_le_bytes()).map_err(io)?;
    }
    let count = s.boundary().len() as u64;
    w.write_all(&count.to_le_bytes()).map_err(io)?;
    for (v, vals) in s.boundary() {
        for &c in v {
            w.write_all(&c.to_le_bytes()).map_err(io)?;
        }
        for &x in vals {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

pub fn read_surface<R: Read>(r: &mut R) -> Result<Surface> {
    let io = |e: std::io::Error| Error::Config(format!("surface read failed: {e}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Config("bad magic: not a surface file".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(io)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(Error::Config(format!("unsupported surface version {version}")));
    }
    r.read_exact(&mut u32buf).map_err(io)?;
    let d = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf).map_err(io)?;
    let n = u32::from_le_bytes(u32buf) as usize;
    if d == 0 || n == 0 || d > 16 || n > 16 {
        return Err(Error::Config("implausible surface dimensions".into()));
    }
    let mut i64buf = [0u8; 8];
    let mut read_i64 = |r: &mut R| -> Result<i64> {
        r.read_exact(&mut i64buf).map_err(io)?;
        Ok(i64::from_le_bytes(i64buf))
    };
    let lo: Vec<i64> = (0..d).map(|_| read_i64(r)).collect::<Result<_>>()?;
    let hi: Vec<i64> = (0..d).map(|_| read_i64(r)).collect::<Result<_>>()?;
    let domain = BoxDomain::new(lo, hi)?;
    let mut f64buf = [0u8; 8];
    let mut surface = Surface::zeros(domain.clone(), n);
    for i in 0..domain.len() * n {
        r.read_exact(&mut f64buf).map_err(io)?;
        surface.interior_mut()[i] = f64::from_le_bytes(f64buf);
    }
    r.read_exact(&mut f64buf).map_err(io)?;
    let count = u64::from_le_bytes(f64buf);
    for _ in 0..count {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            r.read_exact(&mut f64buf).map_err(io)?;
            v.push(i64::from_le_bytes(f64buf));
        }
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut f64buf).map_err(io)?;
            vals.push(f64::from_le_bytes(f64buf));
        }
        surface.set_boundary(v, vals);
    }
    Ok(surface)
}
