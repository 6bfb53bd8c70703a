//! Binary tensor file format `MFT1` and the CSV import path.
//!
//! Layout: magic `MFT1` (4 bytes), dtype code (1 byte: low nibble 0 = f64,
//! high-nibble bit 0x10 marks a gappy file whose payload may contain NaN),
//! ndim (1 byte), the shape as `ndim` little-endian u64 values, then the
//! payload in row-major little-endian f64. Write/read round-trips are
//! bit-identical.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CliError, Result};

const MAGIC: &[u8; 4] = b"MFT1";
const DTYPE_F64: u8 = 0x00;
const GAPPY_FLAG: u8 = 0x10;

/// In-memory image of a tensor file.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFile {
    pub shape: Vec<usize>,
    /// Row-major payload; NaN entries only when `gappy`.
    pub data: Vec<f64>,
    pub gappy: bool,
}

impl TensorFile {
    pub fn new(shape: Vec<usize>, data: Vec<f64>, gappy: bool) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(CliError::Config(format!(
                "shape {:?} needs {} entries, data has {}",
                shape,
                len,
                data.len()
            )));
        }
        if !gappy && data.iter().any(|x| x.is_nan()) {
            return Err(CliError::Config(
                "NaN entries are only allowed in gappy-flagged files".into(),
            ));
        }
        Ok(TensorFile { shape, data, gappy })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + 8 * self.shape.len() + 8 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.push(if self.gappy {
            DTYPE_F64 | GAPPY_FLAG
        } else {
            DTYPE_F64
        });
        out.push(self.shape.len() as u8);
        for &d in &self.shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for &x in &self.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 6 {
            return Err(CliError::MalformedFile("file shorter than the header".into()));
        }
        if &bytes[..4] != MAGIC {
            return Err(CliError::MalformedFile(format!(
                "bad magic {:02x?}, expected 'MFT1'",
                &bytes[..4]
            )));
        }
        let dtype = bytes[4];
        if dtype & 0x0F != DTYPE_F64 {
            return Err(CliError::MalformedFile(format!(
                "unsupported dtype code {dtype:#04x}"
            )));
        }
        let gappy = dtype & GAPPY_FLAG != 0;
        let ndim = bytes[5] as usize;
        if ndim == 0 || ndim > 8 {
            return Err(CliError::MalformedFile(format!(
                "implausible dimension count {ndim}"
            )));
        }
        let header = 6 + 8 * ndim;
        if bytes.len() < header {
            return Err(CliError::MalformedFile("truncated shape header".into()));
        }
        let mut shape = Vec::with_capacity(ndim);
        for i in 0..ndim {
            let off = 6 + 8 * i;
            let d = u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            if d == 0 || d > u32::MAX as u64 {
                return Err(CliError::MalformedFile(format!("implausible dimension {d}")));
            }
            shape.push(d as usize);
        }
        let len: usize = shape.iter().product();
        let expected = header + 8 * len;
        if bytes.len() != expected {
            return Err(CliError::MalformedFile(format!(
                "payload is {} bytes, shape {:?} needs {}",
                bytes.len() - header,
                shape,
                8 * len
            )));
        }
        let data: Vec<f64> = bytes[header..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if !gappy && data.iter().any(|x| x.is_nan()) {
            return Err(CliError::MalformedFile(
                "NaN payload in a file not flagged gappy".into(),
            ));
        }
        Ok(TensorFile { shape, data, gappy })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut f = fs::File::open(path)
            .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
        let mut bytes = Vec::new();
        f.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// Import a CSV matrix: a header row of flattened index labels followed by
/// one row per flattened space index, columns ordered by time. An optional
/// shape refolds the flat rows into tensor axes.
pub fn import_csv(text: &str, shape: Option<Vec<usize>>) -> Result<TensorFile> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let _header = lines
        .next()
        .ok_or_else(|| CliError::MalformedFile("empty csv".into()))?;
    for (i, line) in lines.enumerate() {
        let row: std::result::Result<Vec<f64>, _> = line
            .split(',')
            .map(|cell| cell.trim().parse::<f64>())
            .collect();
        let row =
            row.map_err(|e| CliError::MalformedFile(format!("csv row {}: {e}", i + 2)))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::MalformedFile(format!(
                    "csv row {} has {} columns, expected {}",
                    i + 2,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::MalformedFile("csv has a header but no data".into()));
    }
    let j = rows.len();
    let k = rows[0].len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let shape = match shape {
        Some(s) => {
            let folded: usize = s[..s.len().saturating_sub(1)].iter().product();
            if folded != j || *s.last().unwrap_or(&0) != k {
                return Err(CliError::Config(format!(
                    "shape {s:?} does not match csv layout {j} x {k}"
                )));
            }
            s
        }
        None => vec![j, k],
    };
    let gappy = data.iter().any(|x| x.is_nan());
    TensorFile::new(shape, data, gappy)
}
