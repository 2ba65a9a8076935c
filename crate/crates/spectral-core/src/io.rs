//! `GZKF` (single field) and `GZKP` (field path) binary formats.
//!
//! Header: magic (4 bytes), version (1), ndim, rep (0 space / 1 frequency),
//! dtype (0 = complex128 LE interleaved), then per axis `u32 M`, `f64 L`.
//! `GZKP` adds `u32 K`, `f64 Δt` and `K+1` value blocks.

use crate::field::{Field, FieldPath, Rep};
use crate::grid::GridSpec;
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub const VERSION: u8 = 1;
const FIELD_MAGIC: &[u8; 4] = b"GZKF";
const PATH_MAGIC: &[u8; 4] = b"GZKP";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0} (reader handles {VERSION})")]
    UnsupportedVersion(u8),
    #[error("payload truncated")]
    Truncated,
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn rd<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), FormatError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => FormatError::Truncated,
        _ => FormatError::Io(e),
    })
}

fn write_header<W: Write>(w: &mut W, magic: &[u8; 4], f: &Field) -> std::io::Result<()> {
    let g = f.grid();
    w.write_all(magic)?;
    let rep = match f.rep() {
        Rep::Space => 0u8,
        Rep::Frequency => 1u8,
    };
    w.write_all(&[VERSION, g.dim() as u8, rep, 0])?;
    for _ in 0..g.dim() {
        w.write_all(&(g.points() as u32).to_le_bytes())?;
        w.write_all(&g.length().to_le_bytes())?;
    }
    Ok(())
}

fn write_values<W: Write>(w: &mut W, f: &Field) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(f.values().len() * 16);
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)
}

fn read_header<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<(GridSpec, Rep), FormatError> {
    let mut m4 = [0u8; 4];
    rd(r, &mut m4)?;
    if &m4 != magic {
        return Err(FormatError::BadMagic(m4));
    }
    let mut b = [0u8; 4];
    rd(r, &mut b)?;
    if b[0] != VERSION {
        return Err(FormatError::UnsupportedVersion(b[0]));
    }
    let ndim = b[1] as usize;
    let rep = match b[2] {
        0 => Rep::Space,
        1 => Rep::Frequency,
        x => return Err(FormatError::InvalidHeader(format!("rep byte {x}"))),
    };
    if b[3] != 0 {
        return Err(FormatError::InvalidHeader(format!("dtype byte {}", b[3])));
    }
    let mut axes = Vec::new();
    for _ in 0..ndim {
        let mut mb = [0u8; 4];
        let mut lb = [0u8; 8];
        rd(r, &mut mb)?;
        rd(r, &mut lb)?;
        axes.push((u32::from_le_bytes(mb) as usize, f64::from_le_bytes(lb)));
    }
    let &(m, l) = axes.first().ok_or_else(|| FormatError::InvalidHeader("zero axes".into()))?;
    if axes.iter().any(|&(mi, li)| mi != m || li.to_bits() != l.to_bits()) {
        return Err(FormatError::InvalidHeader("anisotropic box".into()));
    }
    let grid = GridSpec::new(ndim, l, m).map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    Ok((grid, rep))
}

fn read_values<R: Read>(r: &mut R, grid: GridSpec, rep: Rep) -> Result<Field, FormatError> {
    let mut buf = vec![0u8; grid.len() * 16];
    rd(r, &mut buf)?;
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(Field::new(grid, values, rep).expect("length fixed by grid"))
}

pub fn write_field<W: Write>(w: &mut W, f: &Field) -> std::io::Result<()> {
    write_header(w, FIELD_MAGIC, f)?;
    write_values(w, f)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<Field, FormatError> {
    let (grid, rep) = read_header(r, FIELD_MAGIC)?;
    read_values(r, grid, rep)
}

pub fn write_path<W: Write>(w: &mut W, p: &FieldPath) -> std::io::Result<()> {
    write_header(w, PATH_MAGIC, &p.snapshots()[0])?;
    w.write_all(&(p.steps() as u32).to_le_bytes())?;
    w.write_all(&p.dt().to_le_bytes())?;
    for s in p.snapshots() {
        write_values(w, s)?;
    }
    Ok(())
}

pub fn read_path<R: Read>(r: &mut R) -> Result<FieldPath, FormatError> {
    let (grid, rep) = read_header(r, PATH_MAGIC)?;
    let mut kb = [0u8; 4];
    let mut db = [0u8; 8];
    rd(r, &mut kb)?;
    rd(r, &mut db)?;
    let k = u32::from_le_bytes(kb) as usize;
    let dt = f64::from_le_bytes(db);
    let snaps = (0..=k).map(|_| read_values(r, grid, rep)).collect::<Result<Vec<_>, _>>()?;
    FieldPath::new(dt, snaps).map_err(|e| FormatError::InvalidHeader(e.to_string()))
}

pub fn save_field(f: &Field, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: impl AsRef<Path>) -> Result<Field, FormatError> {
    read_field(&mut BufReader::new(File::open(path)?))
}

pub fn save_path(p: &FieldPath, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_path(&mut w, p)?;
    w.flush()?;
    Ok(())
}

pub fn load_path(path: impl AsRef<Path>) -> Result<FieldPath, FormatError> {
    read_path(&mut BufReader::new(File::open(path)?))
}

/// What a file holds, judged by its magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Field,
    Path,
}

pub fn sniff(path: impl AsRef<Path>) -> Result<FileKind, FormatError> {
    let mut m4 = [0u8; 4];
    rd(&mut File::open(path)?, &mut m4)?;
    match &m4 {
        FIELD_MAGIC => Ok(FileKind::Field),
        PATH_MAGIC => Ok(FileKind::Path),
        _ => Err(FormatError::BadMagic(m4)),
    }
}
