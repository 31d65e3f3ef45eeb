//! Field serialization.
//!
//! Binary format `CZF1`, little-endian throughout:
//!
//! ```text
//! magic   4 bytes  "CZF1"
//! kind    u8       0 = scalar, 1 = symmetric tensor, 2 = maximal (value + argmax)
//! time    u8       0 = spatial grid, 1 = space-time grid
//! n       u8       spatial dimension
//! pad     u8       reserved, zero
//! m       u32 * n  grid points per axis
//! lo,hi   f64 * 2n box corners, interleaved per axis (lo_a, hi_a)
//! nt      u32      \
//! t_lo    f64       } only when time = 1
//! t_hi    f64      /
//! chan    u32      number of value channels
//! payload f64 * chan * nodes, channel after channel, row-major node order
//!         (time slice slowest on space-time grids)
//! ```
//!
//! The CSV debug dump writes one row per node: coordinates, then channels.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::domain::{Domain, Grid, SpaceTimeDomain};
use super::scalar::ScalarField;
use super::tensor::SymTensorField;
use crate::error::{CzError, Result};

const MAGIC: &[u8; 4] = b"CZF1";

pub const KIND_SCALAR: u8 = 0;
pub const KIND_TENSOR: u8 = 1;
pub const KIND_MAXIMAL: u8 = 2;

#[doc(hidden)]
pub struct Header {
    kind: u8,
    n: usize,
    m: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    time: Option<(usize, f64, f64)>,
    channels: usize,
}

fn write_header<W: Write>(w: &mut W, hdr: &Header) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[hdr.kind, hdr.time.is_some() as u8, hdr.n as u8, 0])?;
    for _ in 0..hdr.n {
        w.write_all(&(hdr.m as u32).to_le_bytes())?;
    }
    for a in 0..hdr.n {
        w.write_all(&hdr.lo[a].to_le_bytes())?;
        w.write_all(&hdr.hi[a].to_le_bytes())?;
    }
    if let Some((nt, t_lo, t_hi)) = hdr.time {
        w.write_all(&(nt as u32).to_le_bytes())?;
        w.write_all(&t_lo.to_le_bytes())?;
        w.write_all(&t_hi.to_le_bytes())?;
    }
    w.write_all(&(hdr.channels as u32).to_le_bytes())?;
    Ok(())
}

fn read_exact_array<R: Read, const K: usize>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact_array::<R, 4>(r)?))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact_array::<R, 8>(r)?))
}

fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let magic = read_exact_array::<R, 4>(r)?;
    if &magic != MAGIC {
        return Err(CzError::BadFieldFile("bad magic".into()));
    }
    let flags = read_exact_array::<R, 4>(r)?;
    let kind = flags[0];
    let has_time = flags[1] == 1;
    let n = flags[2] as usize;
    if !(1..=3).contains(&n) {
        return Err(CzError::BadFieldFile(format!("bad dimension {n}")));
    }
    let mut m = 0usize;
    for a in 0..n {
        let ma = read_u32(r)? as usize;
        if a == 0 {
            m = ma;
        } else if ma != m {
            return Err(CzError::BadFieldFile("anisotropic grids unsupported".into()));
        }
    }
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..n {
        lo[a] = read_f64(r)?;
        hi[a] = read_f64(r)?;
    }
    let time = if has_time {
        let nt = read_u32(r)? as usize;
        let t_lo = read_f64(r)?;
        let t_hi = read_f64(r)?;
        Some((nt, t_lo, t_hi))
    } else {
        None
    };
    let channels = read_u32(r)? as usize;
    Ok(Header {
        kind,
        n,
        m,
        lo,
        hi,
        time,
        channels,
    })
}

fn write_payload<W: Write>(w: &mut W, channels: &[&[f64]]) -> Result<()> {
    for ch in channels {
        for v in *ch {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_payload<R: Read>(r: &mut R, channels: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(channels);
    for _ in 0..channels {
        let mut ch = Vec::with_capacity(count);
        for _ in 0..count {
            ch.push(read_f64(r)?);
        }
        out.push(ch);
    }
    Ok(out)
}

pub trait GridIo: Grid {
    fn header_time(&self) -> Option<(usize, f64, f64)>;
    fn from_header(hdr: &Header) -> Result<Self>;
}

impl GridIo for Domain {
    fn header_time(&self) -> Option<(usize, f64, f64)> {
        None
    }

    fn from_header(hdr: &Header) -> Result<Self> {
        if hdr.time.is_some() {
            return Err(CzError::BadFieldFile("expected spatial field".into()));
        }
        Domain::new(hdr.n, hdr.lo, hdr.hi, hdr.m)
    }
}

impl GridIo for SpaceTimeDomain {
    fn header_time(&self) -> Option<(usize, f64, f64)> {
        Some((self.nt(), self.t_lo(), self.t_hi()))
    }

    fn from_header(hdr: &Header) -> Result<Self> {
        let (nt, t_lo, t_hi) = hdr
            .time
            .ok_or_else(|| CzError::BadFieldFile("expected space-time field".into()))?;
        SpaceTimeDomain::new(Domain::new(hdr.n, hdr.lo, hdr.hi, hdr.m)?, t_lo, t_hi, nt)
    }
}

fn header_for<G: GridIo>(grid: &G, kind: u8, channels: usize) -> Header {
    let space = grid.space();
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    lo[..space.n()].copy_from_slice(space.lo());
    hi[..space.n()].copy_from_slice(space.hi());
    Header {
        kind,
        n: space.n(),
        m: space.m(),
        lo,
        hi,
        time: grid.header_time(),
        channels,
    }
}

fn write_scalar_impl<G: GridIo>(field: &ScalarField<G>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, &header_for(field.grid(), KIND_SCALAR, 1))?;
    write_payload(&mut w, &[field.values()])?;
    Ok(())
}

fn read_scalar_impl<G: GridIo>(path: &Path) -> Result<ScalarField<G>> {
    let mut r = BufReader::new(File::open(path)?);
    let hdr = read_header(&mut r)?;
    if hdr.kind != KIND_SCALAR || hdr.channels != 1 {
        return Err(CzError::BadFieldFile("not a scalar field".into()));
    }
    let grid = G::from_header(&hdr)?;
    let mut payload = read_payload(&mut r, 1, grid.node_count())?;
    ScalarField::from_values(grid, payload.pop().unwrap())
}

pub fn write_scalar(field: &ScalarField<Domain>, path: impl AsRef<Path>) -> Result<()> {
    write_scalar_impl(field, path.as_ref())
}

pub fn read_scalar(path: impl AsRef<Path>) -> Result<ScalarField<Domain>> {
    read_scalar_impl(path.as_ref())
}

pub fn write_scalar_xt(field: &ScalarField<SpaceTimeDomain>, path: impl AsRef<Path>) -> Result<()> {
    write_scalar_impl(field, path.as_ref())
}

pub fn read_scalar_xt(path: impl AsRef<Path>) -> Result<ScalarField<SpaceTimeDomain>> {
    read_scalar_impl(path.as_ref())
}

pub fn write_tensor(field: &SymTensorField<Domain>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    let comps = field.component_count();
    write_header(&mut w, &header_for(field.grid(), KIND_TENSOR, comps))?;
    let channels: Vec<&[f64]> = (0..comps).map(|c| field.channel(c)).collect();
    write_payload(&mut w, &channels)?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<SymTensorField<Domain>> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let hdr = read_header(&mut r)?;
    if hdr.kind != KIND_TENSOR {
        return Err(CzError::BadFieldFile("not a tensor field".into()));
    }
    let grid = Domain::from_header(&hdr)?;
    let payload = read_payload(&mut r, hdr.channels, grid.node_count())?;
    SymTensorField::from_channels(grid, payload)
}

/// Write raw channels over a grid (used for maximal fields: value + argmax,
/// with NaN marking nodes that were not evaluated or invalid).
pub fn write_channels<G: GridIo>(
    grid: &G,
    kind: u8,
    channels: &[&[f64]],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    write_header(&mut w, &header_for(grid, kind, channels.len()))?;
    write_payload(&mut w, channels)?;
    Ok(())
}

/// Read back raw channels together with the stored kind tag. NaN entries are
/// preserved (they mark invalid maximal nodes), so no finiteness check here.
pub fn read_channels<G: GridIo>(path: impl AsRef<Path>) -> Result<(G, u8, Vec<Vec<f64>>)> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let hdr = read_header(&mut r)?;
    let grid = G::from_header(&hdr)?;
    let payload = read_payload(&mut r, hdr.channels, grid.node_count())?;
    Ok((grid, hdr.kind, payload))
}

/// CSV debug dump: one row per node with coordinates and channel values.
pub fn write_csv<G: Grid>(grid: &G, channels: &[&[f64]], names: &[&str], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    let space = grid.space();
    let n = space.n();
    let mut head: Vec<String> = (1..=n).map(|a| format!("x{a}")).collect();
    if grid.time_step().is_some() {
        head.push("t".into());
    }
    head.extend(names.iter().map(|s| s.to_string()));
    writeln!(w, "{}", head.join(","))?;
    for flat in 0..grid.node_count() {
        let s = grid.spatial_index(flat);
        let x = space.node_coords(s);
        let mut row: Vec<String> = (0..n).map(|a| format!("{}", x[a])).collect();
        if let Some(t) = grid.time_coord(grid.time_index(flat)) {
            row.push(format!("{t}"));
        }
        for ch in channels {
            row.push(format!("{}", ch[flat]));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
