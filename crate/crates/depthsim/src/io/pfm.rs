//! Grayscale PFM (portable float map) read/write. Header `Pf`, scale -1.0
//! (little-endian), rows stored bottom-to-top per the format convention.
//! PFM is the lossless depth interchange format; PNG16 in millimeters is a
//! lossy convenience export.

use crate::error::{Error, Result};
use crate::raycast::DepthImage;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_pfm(depth: &DepthImage, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write!(w, "Pf\n{} {}\n-1.0\n", depth.width, depth.height)?;
    // PFM stores the bottom row first
    for v in (0..depth.height).rev() {
        for u in 0..depth.width {
            w.write_all(&depth.at(u, v).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_token(r: &mut impl BufRead) -> Result<String> {
    let mut tok = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            break;
        }
        if byte[0].is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            break;
        }
        tok.push(byte[0]);
    }
    if tok.is_empty() {
        return Err(Error::Parse("unexpected end of PFM header".into()));
    }
    String::from_utf8(tok).map_err(|_| Error::Parse("non-UTF8 PFM header".into()))
}

pub fn read_pfm(path: &Path) -> Result<DepthImage> {
    let file = File::open(path)?;
    let mut r = BufReader::new(file);
    let magic = read_token(&mut r)?;
    if magic != "Pf" {
        return Err(Error::Parse(format!("expected grayscale PFM magic 'Pf', got '{magic}'")));
    }
    let width: u32 = read_token(&mut r)?
        .parse()
        .map_err(|_| Error::Parse("bad PFM width".into()))?;
    let height: u32 = read_token(&mut r)?
        .parse()
        .map_err(|_| Error::Parse("bad PFM height".into()))?;
    let scale: f64 = read_token(&mut r)?
        .parse()
        .map_err(|_| Error::Parse("bad PFM scale".into()))?;
    if scale >= 0.0 {
        return Err(Error::Parse("big-endian PFM is not supported".into()));
    }
    let mut raw = vec![0u8; (width * height * 4) as usize];
    r.read_exact(&mut raw)?;
    let mut img = DepthImage::new(width, height);
    let mut idx = 0;
    for v in (0..height).rev() {
        for u in 0..width {
            let bytes: [u8; 4] = raw[idx..idx + 4].try_into().unwrap();
            img.set(u, v, f32::from_le_bytes(bytes));
            idx += 4;
        }
    }
    Ok(img)
}

/// 16-bit PNG in millimeters; depths above 65.535 m saturate.
pub fn write_png16(depth: &DepthImage, path: &Path) -> Result<()> {
    let mut img = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::new(depth.width, depth.height);
    for (u, v, px) in img.enumerate_pixels_mut() {
        let mm = (depth.at(u, v) as f64 * 1000.0).round().clamp(0.0, 65535.0);
        *px = image::Luma([mm as u16]);
    }
    img.save(path).map_err(|e| Error::Parse(format!("png write failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn pfm_roundtrip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("depth.pfm");
        let data: Vec<f32> = (0..12).map(|i| i as f32 * 0.37 + 0.001).collect();
        let img = DepthImage::from_data(4, 3, data).unwrap();
        write_pfm(&img, &path).unwrap();
        let back = read_pfm(&path).unwrap();
        assert_eq!(back.width, 4);
        assert_eq!(back.height, 3);
        assert_eq!(back.data, img.data);
    }

    #[test]
    fn png16_saturates() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("depth.png");
        let img = DepthImage::from_data(2, 1, vec![70.0, 1.5]).unwrap();
        write_png16(&img, &path).unwrap();
        let loaded = image::open(&path).unwrap().into_luma16();
        assert_eq!(loaded.get_pixel(0, 0).0[0], 65535);
        assert_eq!(loaded.get_pixel(1, 0).0[0], 1500);
    }
}
