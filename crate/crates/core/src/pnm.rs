//! Binary graymap (P5) mask files and pixmap (P6) photo input.

use std::io::Cursor;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, ImageFormat, RgbImage};
use thiserror::Error;

use crate::mask::Mask;

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("decode: {0}")]
    Decode(#[from] image::ImageError),
    #[error("image has zero size")]
    Empty,
}

/// Encodes a mask as P5 with set pixels 255 and clear pixels 0.
pub fn encode_mask(mask: &Mask) -> Vec<u8> {
    let data: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&data, mask.width() as u32, mask.height() as u32, ExtendedColorType::L8)
        .expect("in-memory graymap encoding cannot fail");
    out
}

/// Decodes any PNM into a mask; gray levels of 128 and above count as set.
pub fn decode_mask(bytes: &[u8]) -> Result<Mask, PnmError> {
    let img = image::load(Cursor::new(bytes), ImageFormat::Pnm)?.into_luma8();
    gray_to_mask(&img)
}

pub fn gray_to_mask(img: &GrayImage) -> Result<Mask, PnmError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(PnmError::Empty);
    }
    Ok(Mask::from_fn(w, h, |c, r| img.get_pixel(c as u32, r as u32).0[0] >= 128))
}

pub fn decode_rgb(bytes: &[u8]) -> Result<RgbImage, PnmError> {
    Ok(image::load(Cursor::new(bytes), ImageFormat::Pnm)?.into_rgb8())
}

pub fn write_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<(), PnmError> {
    std::fs::write(path, encode_mask(mask))?;
    Ok(())
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask, PnmError> {
    decode_mask(&std::fs::read(path)?)
}

pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage, PnmError> {
    decode_rgb(&std::fs::read(path)?)
}

/// True when the bytes carry the P6 (color pixmap) magic number.
pub fn is_pixmap(bytes: &[u8]) -> bool {
    bytes.starts_with(b"P6") || bytes.starts_with(b"P3")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graymap_layout() {
        let m = Mask::rect(3, 2, 0, 0, 1, 1);
        let bytes = encode_mask(&m);
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(&bytes[bytes.len() - 6..], &[255, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn mask_round_trip() {
        let m = Mask::from_fn(17, 9, |c, r| (c * 7 + r * 3) % 5 == 0);
        assert_eq!(decode_mask(&encode_mask(&m)).unwrap(), m);
    }

    #[test]
    fn pixmap_decodes() {
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 0, 255, 255, 0, 0]);
        assert!(is_pixmap(&bytes));
        let img = decode_rgb(&bytes).unwrap();
        assert_eq!(img.get_pixel(0, 0).0, [0, 0, 255]);
        assert_eq!(img.get_pixel(1, 0).0, [255, 0, 0]);
        assert!(decode_mask(b"garbage").is_err());
    }
}
