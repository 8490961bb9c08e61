//! Little-endian binary helpers shared by the on-disk formats.
//!
//! Every serialized structure opens with a four byte tag followed by a
//! single version byte.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u8 = 0x01;

pub fn write_header<W: Write>(w: &mut W, tag: &[u8; 4]) -> Result<()> {
    w.write_all(tag)?;
    w.write_u8(FORMAT_VERSION)?;
    Ok(())
}

pub fn read_header<R: Read>(r: &mut R, tag: &[u8; 4]) -> Result<()> {
    let mut found = [0u8; 4];
    r.read_exact(&mut found)?;
    if &found != tag {
        return Err(Error::Corrupt(format!(
            "expected tag {:?}, found {:?}",
            String::from_utf8_lossy(tag),
            String::from_utf8_lossy(&found)
        )));
    }
    let version = r.read_u8()?;
    if version != FORMAT_VERSION {
        return Err(Error::Corrupt(format!("unsupported version {version}")));
    }
    Ok(())
}

pub fn write_len<W: Write>(w: &mut W, len: usize) -> Result<()> {
    w.write_u64::<LittleEndian>(len as u64)?;
    Ok(())
}

/// Reads a length prefix, refusing values that could not possibly fit in
/// the remaining input of a sane index.
pub fn read_len<R: Read>(r: &mut R) -> Result<usize> {
    let len = r.read_u64::<LittleEndian>()?;
    if len > (1 << 40) {
        return Err(Error::Corrupt(format!("implausible length {len}")));
    }
    Ok(len as usize)
}

pub fn write_u32s<W: Write>(w: &mut W, values: &[u32]) -> Result<()> {
    write_len(w, values.len())?;
    for &v in values {
        w.write_u32::<LittleEndian>(v)?;
    }
    Ok(())
}

pub fn read_u32s<R: Read>(r: &mut R) -> Result<Vec<u32>> {
    let len = read_len(r)?;
    let mut out = vec![0u32; len];
    r.read_u32_into::<LittleEndian>(&mut out)?;
    Ok(out)
}

pub fn write_u64s<W: Write>(w: &mut W, values: impl ExactSizeIterator<Item = u64>) -> Result<()> {
    write_len(w, values.len())?;
    for v in values {
        w.write_u64::<LittleEndian>(v)?;
    }
    Ok(())
}

pub fn read_u64s<R: Read>(r: &mut R) -> Result<Vec<u64>> {
    let len = read_len(r)?;
    let mut out = vec![0u64; len];
    r.read_u64_into::<LittleEndian>(&mut out)?;
    Ok(out)
}

pub fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_u32::<LittleEndian>(s.len() as u32)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Corrupt(format!("invalid UTF-8 string: {e}")))
}
