//! Binary matrix/vector files and amplitude CSV export.
//!
//! Layout: 8-byte magic (`GPSMAT01` or `GPSVEC01`), little-endian `u64` rows,
//! `u64` cols, `u8` field flag (0 real, 1 complex), then row-major `f64`
//! values, interleaved `re, im` when complex. Vectors are stored with
//! `cols = 1`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMat, CVec, RVec};

pub const MATRIX_MAGIC: &[u8; 8] = b"GPSMAT01";
pub const VECTOR_MAGIC: &[u8; 8] = b"GPSVEC01";

const HEADER_LEN: usize = 8 + 8 + 8 + 1;

/// Serialise `rows x cols` complex entries, visited row-major through `at`.
/// The real flag is chosen iff every imaginary part is `+0.0` bitwise, which
/// keeps the round trip exact.
fn encode(
    magic: &[u8; 8],
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> Complex64,
) -> Vec<u8> {
    let real = (0..rows).all(|r| (0..cols).all(|c| at(r, c).im.to_bits() == 0));
    let per = if real { 8 } else { 16 };
    let mut out = Vec::with_capacity(HEADER_LEN + rows * cols * per);
    out.extend_from_slice(magic);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    out.push(if real { 0 } else { 1 });
    for r in 0..rows {
        for c in 0..cols {
            let z = at(r, c);
            out.extend_from_slice(&z.re.to_le_bytes());
            if !real {
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out
}

struct Decoded {
    rows: usize,
    cols: usize,
    complex: bool,
    values: Vec<Complex64>,
}

fn read_u64(bytes: &[u8]) -> u64 {
    let mut buf = [0u8; 8];
    buf.copy_from_slice(bytes);
    u64::from_le_bytes(buf)
}

fn decode(magic: &[u8; 8], bytes: &[u8]) -> Result<Decoded> {
    if bytes.len() < 8 || &bytes[..8] != magic {
        let found = &bytes[..bytes.len().min(8)];
        return Err(Error::MagicMismatch {
            expected: String::from_utf8_lossy(magic).into_owned(),
            found: String::from_utf8_lossy(found).into_owned(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let rows = read_u64(&bytes[8..16]);
    let cols = read_u64(&bytes[16..24]);
    let complex = match bytes[24] {
        0 => false,
        1 => true,
        f => return Err(Error::Format(format!("unknown field flag {f}"))),
    };
    let per: u64 = if complex { 16 } else { 8 };
    let payload = rows
        .checked_mul(cols)
        .and_then(|k| k.checked_mul(per))
        .ok_or_else(|| Error::Format("declared size overflows".into()))?;
    let body = &bytes[HEADER_LEN..];
    if (body.len() as u64) < payload {
        return Err(Error::Truncated {
            expected: payload,
            found: body.len() as u64,
        });
    }
    if body.len() as u64 > payload {
        return Err(Error::Format(format!(
            "{} trailing bytes after payload",
            body.len() as u64 - payload
        )));
    }
    let values = body
        .chunks_exact(per as usize)
        .map(|ch| {
            let re = f64::from_le_bytes(ch[..8].try_into().unwrap());
            let im = if complex {
                f64::from_le_bytes(ch[8..16].try_into().unwrap())
            } else {
                0.0
            };
            Complex64::new(re, im)
        })
        .collect();
    Ok(Decoded {
        rows: rows as usize,
        cols: cols as usize,
        complex,
        values,
    })
}

pub fn matrix_to_bytes(a: &CMat) -> Vec<u8> {
    encode(MATRIX_MAGIC, a.nrows(), a.ncols(), |r, c| a[(r, c)])
}

pub fn vector_to_bytes(v: &CVec) -> Vec<u8> {
    encode(VECTOR_MAGIC, v.len(), 1, |r, _| v[r])
}

/// Returns the matrix and whether it was stored as complex.
pub fn matrix_from_bytes(bytes: &[u8]) -> Result<(CMat, bool)> {
    let d = decode(MATRIX_MAGIC, bytes)?;
    let cols = d.cols;
    let a = CMat::from_fn(d.rows, d.cols, |r, c| d.values[r * cols + c]);
    Ok((a, d.complex))
}

pub fn vector_from_bytes(bytes: &[u8]) -> Result<(CVec, bool)> {
    let d = decode(VECTOR_MAGIC, bytes)?;
    if d.cols != 1 {
        return Err(Error::Format(format!(
            "vector file with {} columns",
            d.cols
        )));
    }
    Ok((CVec::from_vec(d.values), d.complex))
}

pub fn save_matrix(path: impl AsRef<Path>, a: &CMat) -> Result<()> {
    fs::write(path, matrix_to_bytes(a))?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<(CMat, bool)> {
    matrix_from_bytes(&fs::read(path)?)
}

pub fn save_vector(path: impl AsRef<Path>, v: &CVec) -> Result<()> {
    fs::write(path, vector_to_bytes(v))?;
    Ok(())
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<(CVec, bool)> {
    vector_from_bytes(&fs::read(path)?)
}

/// Load a vector that must be real (e.g. amplitudes).
pub fn load_real_vector(path: impl AsRef<Path>) -> Result<RVec> {
    let (v, _) = load_vector(path)?;
    if v.iter().any(|z| z.im != 0.0) {
        return Err(Error::Format("expected a real vector".into()));
    }
    Ok(v.map(|z| z.re))
}

pub fn save_real_vector(path: impl AsRef<Path>, v: &RVec) -> Result<()> {
    save_vector(path, &v.map(|x| Complex64::new(x, 0.0)))
}

/// Write amplitudes as CSV with header `index,value`.
pub fn write_amplitudes_csv<W: Write>(out: W, b: &RVec) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "value"])?;
    for (i, v) in b.iter().enumerate() {
        w.write_record([i.to_string(), format!("{v:?}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_amplitudes_csv<R: std::io::Read>(input: R) -> Result<RVec> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::new();
    for (expect, rec) in r.records().enumerate() {
        let rec = rec?;
        let idx: usize = rec[0]
            .parse()
            .map_err(|_| Error::Format(format!("bad index `{}`", &rec[0])))?;
        if idx != expect {
            return Err(Error::Format(format!("index {idx} out of order")));
        }
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad value `{}`", &rec[1])))?;
        values.push(v);
    }
    Ok(RVec::from_vec(values))
}
