//! Binary field files.
//!
//! Half-space files (`HSF1`): magic, `version: u16`, `d, N, M, components:
//! u32`, `tail: u8`, `L, X_max: f64`, then `components × (M + tail) × N^d`
//! physical values, component-major, then level (slabs bottom to top, tail
//! last), then row-major samples. Boundary files (`TBF1`) omit `M` and
//! `X_max`; their tail byte must be zero. All numbers little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;

pub const VERSION: u16 = 1;
const HSF_MAGIC: &[u8; 4] = b"HSF1";
const TBF_MAGIC: &[u8; 4] = b"TBF1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    HalfSpace,
    Boundary,
}

/// Decoded header plus raw payload.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub kind: FileKind,
    pub dim: u32,
    pub points: u32,
    pub slabs: u32,
    pub components: u32,
    pub tail: bool,
    pub period: f64,
    pub height: f64,
    pub payload: Vec<f64>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Format {
                offset: self.pos as u64,
                message: format!("truncated {what}: need {n} bytes, {} left", self.bytes.len() - self.pos),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

impl FieldFile {
    /// Number of vertical levels stored (`M + tail` or 1).
    pub fn levels(&self) -> usize {
        match self.kind {
            FileKind::HalfSpace => self.slabs as usize + usize::from(self.tail),
            FileKind::Boundary => 1,
        }
    }

    fn expected_len(&self) -> Option<usize> {
        (self.points as usize)
            .checked_pow(self.dim)?
            .checked_mul(self.components as usize)?
            .checked_mul(self.levels())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48 + 8 * self.payload.len());
        let magic = match self.kind {
            FileKind::HalfSpace => HSF_MAGIC,
            FileKind::Boundary => TBF_MAGIC,
        };
        out.extend_from_slice(magic);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.dim.to_le_bytes());
        out.extend_from_slice(&self.points.to_le_bytes());
        if self.kind == FileKind::HalfSpace {
            out.extend_from_slice(&self.slabs.to_le_bytes());
        }
        out.extend_from_slice(&self.components.to_le_bytes());
        out.push(u8::from(self.tail));
        out.extend_from_slice(&self.period.to_le_bytes());
        if self.kind == FileKind::HalfSpace {
            out.extend_from_slice(&self.height.to_le_bytes());
        }
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let kind = match r.take(4, "magic")? {
            m if m == HSF_MAGIC => FileKind::HalfSpace,
            m if m == TBF_MAGIC => FileKind::Boundary,
            m => return Err(Error::Format { offset: 0, message: format!("bad magic {:?}", String::from_utf8_lossy(m)) }),
        };
        let at = r.pos as u64;
        let version = r.u16("version")?;
        if version != VERSION {
            return Err(Error::Format { offset: at, message: format!("unsupported version {version}") });
        }
        let dim = r.u32("d")?;
        let points = r.u32("N")?;
        let slabs = if kind == FileKind::HalfSpace { r.u32("M")? } else { 0 };
        let components = r.u32("components")?;
        let at = r.pos as u64;
        let tail = match r.u8("tail flag")? {
            0 => false,
            1 if kind == FileKind::HalfSpace => true,
            t => return Err(Error::Format { offset: at, message: format!("invalid tail flag {t}") }),
        };
        let period = r.f64("L")?;
        let height = if kind == FileKind::HalfSpace { r.f64("X_max")? } else { 0.0 };
        let mut file = Self { kind, dim, points, slabs, components, tail, period, height, payload: Vec::new() };
        let header_end = r.pos as u64;
        let len = file
            .expected_len()
            .ok_or_else(|| Error::Format { offset: header_end, message: "payload size overflows".into() })?;
        let have = (bytes.len() - r.pos) / 8;
        if bytes.len() - r.pos != 8 * len {
            return Err(Error::Format {
                offset: header_end,
                message: format!("payload holds {have} values ({} bytes), header implies {len}", bytes.len() - r.pos),
            });
        }
        file.payload = (0..len).map(|_| r.f64("payload")).collect::<Result<_>>()?;
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn from_half_space(u: &HalfSpaceField) -> Self {
        let g = u.grid();
        let levels: Vec<Vec<f64>> = u.slabs().iter().chain(u.tail()).map(|s| s.to_physical()).collect();
        let per = g.modes();
        let mut payload = Vec::with_capacity(levels.len() * per * u.components());
        for c in 0..u.components() {
            for l in &levels {
                payload.extend_from_slice(&l[c * per..(c + 1) * per]);
            }
        }
        Self {
            kind: FileKind::HalfSpace,
            dim: g.dim() as u32,
            points: g.points() as u32,
            slabs: g.slabs() as u32,
            components: u.components() as u32,
            tail: u.tail().is_some(),
            period: g.period(),
            height: g.height(),
            payload,
        }
    }

    pub fn from_boundary(a: &TangentialField) -> Self {
        let g = a.grid();
        Self {
            kind: FileKind::Boundary,
            dim: g.dim() as u32,
            points: g.points() as u32,
            slabs: 0,
            components: a.components() as u32,
            tail: false,
            period: g.period(),
            height: 0.0,
            payload: a.to_physical(),
        }
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let torus_ok = self.dim as usize == grid.dim() && self.points as usize == grid.points() && self.period == grid.period();
        let vertical_ok = self.kind == FileKind::Boundary || (self.slabs as usize == grid.slabs() && self.height == grid.height());
        if torus_ok && vertical_ok {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "file grid d={} N={} M={} L={} X={} differs from run grid",
                self.dim, self.points, self.slabs, self.period, self.height
            )))
        }
    }

    /// Decode as a half-space field on `grid`.
    pub fn to_half_space(&self, grid: &Grid) -> Result<HalfSpaceField> {
        if self.kind != FileKind::HalfSpace {
            return Err(Error::Format { offset: 0, message: "expected an HSF1 file".into() });
        }
        self.check_grid(grid)?;
        let comps = self.components as usize;
        let per = grid.modes();
        let levels = self.levels();
        let mut fields = (0..levels)
            .map(|l| {
                let mut values = Vec::with_capacity(comps * per);
                for c in 0..comps {
                    let start = (c * levels + l) * per;
                    values.extend_from_slice(&self.payload[start..start + per]);
                }
                TangentialField::from_physical(*grid, comps, &values)
            })
            .collect::<Result<Vec<_>>>()?;
        let tail = if self.tail { fields.pop() } else { None };
        HalfSpaceField::from_slabs(*grid, fields, tail)
    }

    /// Decode as boundary data on `grid`.
    pub fn to_boundary(&self, grid: &Grid) -> Result<TangentialField> {
        if self.kind != FileKind::Boundary {
            return Err(Error::Format { offset: 0, message: "expected a TBF1 file".into() });
        }
        self.check_grid(grid)?;
        TangentialField::from_physical(*grid, self.components as usize, &self.payload)
    }
}

pub fn store_field(path: &Path, u: &HalfSpaceField) -> Result<()> {
    FieldFile::from_half_space(u).write(path)
}

pub fn load_field(path: &Path, grid: &Grid) -> Result<HalfSpaceField> {
    FieldFile::read(path)?.to_half_space(grid)
}

pub fn store_boundary(path: &Path, a: &TangentialField) -> Result<()> {
    FieldFile::from_boundary(a).write(path)
}

pub fn load_boundary(path: &Path, grid: &Grid) -> Result<TangentialField> {
    FieldFile::read(path)?.to_boundary(grid)
}
