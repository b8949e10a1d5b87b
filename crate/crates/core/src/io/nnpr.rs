//! NNPR v1: little-endian multi-channel float32 rasters.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NNPR"
//! 4       1     version (1)
//! 5       1     dtype (0 = float32)
//! 6       2     channels (u16)
//! 8       4     height (u32)
//! 12      4     width (u32)
//! 16      ...   channels x height x width f32, channel-major, row-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Raster;
use crate::scalar::Real;

pub const NNPR_MAGIC: [u8; 4] = *b"NNPR";
pub const NNPR_VERSION: u8 = 1;
const DTYPE_F32: u8 = 0;
const HEADER_LEN: usize = 16;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_nnpr<W: Write>(mut w: W, channels: &[Raster<f32>]) -> Result<()> {
    let first = channels
        .first()
        .ok_or_else(|| format_err("at least one channel is required"))?;
    let (width, height) = (first.width(), first.height());
    if channels
        .iter()
        .any(|c| c.width() != width || c.height() != height)
    {
        return Err(format_err("all channels must share dimensions"));
    }
    let n_ch = u16::try_from(channels.len()).map_err(|_| format_err("too many channels"))?;
    let h = u32::try_from(height).map_err(|_| format_err("height exceeds u32"))?;
    let wd = u32::try_from(width).map_err(|_| format_err("width exceeds u32"))?;

    let mut header = [0u8; HEADER_LEN];
    header[..4].copy_from_slice(&NNPR_MAGIC);
    header[4] = NNPR_VERSION;
    header[5] = DTYPE_F32;
    header[6..8].copy_from_slice(&n_ch.to_le_bytes());
    header[8..12].copy_from_slice(&h.to_le_bytes());
    header[12..16].copy_from_slice(&wd.to_le_bytes());
    w.write_all(&header)?;

    let mut buf = Vec::with_capacity(width * height * 4);
    for ch in channels {
        buf.clear();
        for v in ch.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_nnpr<R: Read>(mut r: R) -> Result<Vec<Raster<f32>>> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        let n = r.read(&mut header[got..])?;
        if n == 0 {
            if got >= 4 && header[..4] != NNPR_MAGIC {
                return Err(format_err("bad magic"));
            }
            return Err(format_err("truncated header"));
        }
        got += n;
    }
    if header[..4] != NNPR_MAGIC {
        return Err(format_err("bad magic"));
    }
    if header[4] != NNPR_VERSION {
        return Err(format_err(format!("unsupported version {}", header[4])));
    }
    if header[5] != DTYPE_F32 {
        return Err(format_err(format!("unsupported dtype {}", header[5])));
    }
    let channels = u16::from_le_bytes([header[6], header[7]]) as usize;
    let height = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let width = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    if channels == 0 || width == 0 || height == 0 {
        return Err(format_err("zero-sized raster"));
    }
    let per_channel = width
        .checked_mul(height)
        .ok_or_else(|| format_err("dimension overflow"))?;
    let payload = per_channel
        .checked_mul(channels)
        .and_then(|n| n.checked_mul(4))
        .filter(|n| *n <= isize::MAX as usize)
        .ok_or_else(|| format_err("dimension overflow"))?;

    let mut bytes = Vec::new();
    r.take(payload as u64 + 1).read_to_end(&mut bytes)?;
    if bytes.len() < payload {
        return Err(format_err(format!(
            "truncated payload: expected {payload} bytes, found {}",
            bytes.len()
        )));
    }
    if bytes.len() > payload {
        return Err(format_err("trailing bytes after payload"));
    }
    let values: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Ok(values
        .chunks_exact(per_channel)
        .map(|c| Raster::from_vec(width, height, c.to_vec()).expect("chunk size"))
        .collect())
}

pub fn write_nnpr_file(path: impl AsRef<Path>, channels: &[Raster<f32>]) -> Result<()> {
    write_nnpr(BufWriter::new(File::create(path)?), channels)
}

pub fn read_nnpr_file(path: impl AsRef<Path>) -> Result<Vec<Raster<f32>>> {
    read_nnpr(BufReader::new(File::open(path)?))
}

pub fn to_f32_raster<T: Real>(r: &Raster<T>) -> Raster<f32> {
    r.map(|v| v.as_f32())
}

pub fn from_f32_raster<T: Real>(r: &Raster<f32>) -> Raster<T> {
    r.map(|v| T::lit(v as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Raster<f32>> {
        (0..3)
            .map(|k| Raster::from_fn(5, 4, |c| (c.x * 10 + c.y) as f32 + k as f32 * 0.25))
            .collect()
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_nnpr(&mut buf, &sample()).unwrap();
        assert_eq!(&buf[..8], &[0x4E, 0x4E, 0x50, 0x52, 1, 0, 3, 0]);
        assert_eq!(&buf[8..16], &[4, 0, 0, 0, 5, 0, 0, 0]);
        assert_eq!(buf.len(), 16 + 3 * 20 * 4);
        // first value of channel 1 sits after all of channel 0
        let off = 16 + 20 * 4;
        assert_eq!(
            f32::from_le_bytes(buf[off..off + 4].try_into().unwrap()),
            0.25
        );
    }

    #[test]
    fn rejects_corrupt_files() {
        let mut buf = Vec::new();
        write_nnpr(&mut buf, &sample()).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_nnpr(&bad[..]), Err(Error::Format(m)) if m.contains("magic")));

        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_nnpr(short), Err(Error::Format(m)) if m.contains("truncated")));

        let mut long = buf.clone();
        long.push(0);
        assert!(read_nnpr(&long[..]).is_err());

        let mut huge = buf[..16].to_vec();
        huge[6..8].copy_from_slice(&u16::MAX.to_le_bytes());
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(read_nnpr(&huge[..]).is_err());

        let mut v2 = buf.clone();
        v2[4] = 2;
        assert!(read_nnpr(&v2[..]).is_err());
        assert!(read_nnpr(&buf[..10]).is_err());
    }

    #[test]
    fn mismatched_channels_rejected() {
        let chans = vec![Raster::filled(2, 2, 0.0f32), Raster::filled(3, 2, 0.0f32)];
        assert!(write_nnpr(Vec::new(), &chans).is_err());
        assert!(write_nnpr(Vec::new(), &[]).is_err());
    }
}
