//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes  | content                                   |
//! |--------|-------------------------------------------|
//! | 0..4   | magic `MWF1`                              |
//! | 4..8   | spatial dimension `n` (u32, 1..=5)        |
//! | 8..28  | five u32 point counts, unused slots zero  |
//! | 28..32 | fiber dimension (u32)                     |
//! | 32..   | `(re, im)` f64 pairs, row-major (point, component) |
//!
//! Box lengths are not stored; the reader supplies them.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Field, GridSpec};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MWF1";
pub const HEADER_LEN: usize = 32;
const MAX_DIM: usize = 5;

pub fn write_field<W: Write>(mut w: W, f: &Field) -> Result<()> {
    let grid = f.grid();
    if grid.dim() > MAX_DIM {
        return Err(Error::Format(format!("{} dimensions exceed the header capacity", grid.dim())));
    }
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&(grid.dim() as u32).to_le_bytes());
    for (i, &p) in grid.points().iter().enumerate() {
        header[8 + 4 * i..12 + 4 * i].copy_from_slice(&(p as u32).to_le_bytes());
    }
    header[28..32].copy_from_slice(&(f.hdim() as u32).to_le_bytes());
    w.write_all(&header)?;
    let mut body = Vec::with_capacity(f.values().len() * 16);
    for v in f.values() {
        body.extend_from_slice(&v.re.to_le_bytes());
        body.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&body)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R, lengths: &[f64]) -> Result<Field> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap()) as usize;
    let n = word(4);
    if n == 0 || n > MAX_DIM {
        return Err(Error::Format(format!("dimension {n} out of range")));
    }
    if lengths.len() != n {
        return Err(Error::Format(format!("snapshot is {n}-dimensional, {} box lengths given", lengths.len())));
    }
    let points: Vec<usize> = (0..n).map(|i| word(8 + 4 * i)).collect();
    let hdim = word(28);
    let grid = GridSpec::new(points, lengths.to_vec())?;
    let count = grid.len() * hdim;
    let mut body = vec![0u8; count * 16];
    r.read_exact(&mut body)?;
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Field::new(grid, hdim, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let grid = GridSpec::new(vec![4, 8], vec![1.0, 2.0]).unwrap();
        let f = Field::from_fn(&grid, 2, |x| vec![Complex64::new(x[0], x[1]), Complex64::new(-1.0, 0.5)]).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + grid.len() * 2 * 16);
        assert_eq!(&buf[0..4], b"MWF1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(buf[16..20].try_into().unwrap()), 0);
        assert_eq!(u32::from_le_bytes(buf[28..32].try_into().unwrap()), 2);
        let back = read_field(&buf[..], &[1.0, 2.0]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_field(&b"XXXX0000000000000000000000000000"[..], &[1.0]).is_err());
        let grid = GridSpec::new(vec![4], vec![1.0]).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &Field::zeros(&grid, 1)).unwrap();
        assert!(read_field(&buf[..buf.len() - 1], &[1.0]).is_err());
        assert!(read_field(&buf[..], &[1.0, 1.0]).is_err());
    }
}
